"""Closed-form rate coverage probabilities for the two-user uplink.

The base station attempts the aerial user first (ground user treated as
interference), subtracts it on success, and otherwise retries the ground
user under full interference followed by the aerial user. The joint
decoding outcomes partition into five events; this module evaluates the
probability of the four "something was decoded" events in closed form and
assembles the three aggregate coverage probabilities:

* both users decoded:   p_tot = p1 + p3
* aerial user decoded:  p_aue = p1 + p2 + p3
* ground user decoded:  p_tue = p1 + p3 + p4

The derivations reduce every probability to upper incomplete gamma
functions of integer shape, except one regime of p3 (threshold product
below one) where the intersection of the decoding half-planes is evaluated
by adaptive quadrature of an exact one-dimensional integral. A published
closed form exists for that regime but is dimensionally inconsistent; it
is kept available as :func:`p3_paper_closed_form` for side-by-side
comparison and is never used in reports.
"""

import math
from dataclasses import dataclass
from typing import Optional

from scipy import integrate
from scipy import stats

from .channel import (
    SystemParams,
    LosModel,
    aue_3d_distance,
    a2c_path_loss,
    gamma_mixture_pdf,
    los_probability,
)

__all__ = [
    "ANALYTIC",
    "SEMI_ANALYTIC",
    "MONTE_CARLO",
    "DecodingThresholds",
    "NakagamiLinkParams",
    "CoverageReport",
    "QuadratureError",
    "threshold_from_rate",
    "upper_gamma_int",
    "link_params",
    "p1",
    "p2",
    "p3",
    "p4",
    "p3_paper_closed_form",
    "coverage_report",
]

ANALYTIC = "analytic"
SEMI_ANALYTIC = "semi_analytic"
MONTE_CARLO = "monte_carlo"


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class DecodingThresholds:
    """Linear SINR thresholds for the aerial and ground users."""

    theta_a: float
    theta_t: float

    def __post_init__(self):
        if self.theta_a < 0 or self.theta_t < 0:
            raise ValueError("SINR thresholds must be nonnegative")

    @classmethod
    def from_db(cls, theta_a_db: float, theta_t_db: float) -> "DecodingThresholds":
        return cls(10.0 ** (theta_a_db / 10.0), 10.0 ** (theta_t_db / 10.0))

    @classmethod
    def from_rates(cls, rate_a: float, rate_t: float, bandwidth: float) -> "DecodingThresholds":
        return cls(threshold_from_rate(rate_a, bandwidth),
                   threshold_from_rate(rate_t, bandwidth))


def threshold_from_rate(rate: float, bandwidth: float) -> float:
    """Linear SINR threshold equivalent to a target data rate.

    Inverts rate = B * log2(1 + SINR): returns 2**(rate/B) - 1, so a
    10 Mbps target over 10 MHz maps to 0 dB and 34.6 Mbps to ~10 dB.
    """
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    return 2.0 ** (rate / bandwidth) - 1.0


@dataclass(frozen=True)
class NakagamiLinkParams:
    """Distribution parameters of the two received powers at one point.

    ``beta_los``/``beta_nlos`` are the Gamma rates of the aerial user's
    LoS/NLoS components (1/W), ``mu`` is the mean of the ground user's
    exponential received power (W).
    """

    beta_los: float
    beta_nlos: float
    p_los: float
    m_los: int
    m_nlos: int
    mu: float

    def __post_init__(self):
        if self.beta_los <= 0 or self.beta_nlos <= 0:
            raise ValueError("Gamma rates must be positive")
        if not 0 <= self.p_los <= 1:
            raise ValueError("p_los must be in [0, 1]")
        if self.mu <= 0:
            raise ValueError("mu must be positive")


def link_params(params: SystemParams, p_los: float, d_a: float) -> NakagamiLinkParams:
    """Assemble the link distribution parameters for one trajectory point."""
    w_los = params.aue_tx_power * params.aue_gain * a2c_path_loss(params, d_a, True)
    w_nlos = params.aue_tx_power * params.aue_gain * a2c_path_loss(params, d_a, False)
    return NakagamiLinkParams(
        beta_los=params.m_los / w_los,
        beta_nlos=params.m_nlos / w_nlos,
        p_los=p_los,
        m_los=params.m_los,
        m_nlos=params.m_nlos,
        mu=params.tue_cutoff * params.tue_gain,
    )


@dataclass(frozen=True)
class CoverageReport:
    """Event probabilities and aggregates for one trajectory point.

    ``p5_residual`` is the no-decode remainder 1 - (p1+p2+p3+p4).
    ``ci_halfwidth`` (Monte Carlo only) is the largest 99.7% Wald
    half-width among the reported probabilities.
    """

    p1: float
    p2: float
    p3: float
    p4: float
    p_tot: float
    p_aue: float
    p_tue: float
    p5_residual: float
    method: str
    ci_halfwidth: Optional[float] = None
    trials: Optional[int] = None


def upper_gamma_int(s: int, x: float) -> float:
    """Upper incomplete gamma for integer shape s >= 1.

    Uses the exact finite series (s-1)! * exp(-x) * sum_{k<s} x^k/k!,
    which is closed-form for integer shape and keeps one numerical
    tolerance out of the validation chain.
    """
    if not isinstance(s, int) or s < 1:
        raise ValueError("shape must be an integer >= 1")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if s > 170:
        raise OverflowError("factorial(s-1) exceeds double precision")
    return _scaled_upper_gamma(s, x, 0.0)


def _scaled_upper_gamma(s: int, x: float, log_scale: float) -> float:
    # (s-1)! * exp(log_scale - x) * sum_{k<s} x^k/k!; folding the prefactor
    # exponent into the series keeps exp(c)*exp(-c) from leaving roundoff
    # behind when the two exponents coincide.
    term = 1.0
    acc = 1.0
    for k in range(1, s):
        term *= x / k
        acc += term
    return math.factorial(s - 1) * math.exp(log_scale - x) * acc


def _p1_component(beta: float, m: int, th: DecodingThresholds, noise: float, mu: float) -> float:
    # sum_i (beta*theta_a)^i / i! * s^(-i-1) * Gamma(i+1, (1+theta_t)*s*noise),
    # written with the ratio beta*theta_a/s in [0,1) for overflow safety.
    s = beta * th.theta_a + 1.0 / mu
    ratio = beta * th.theta_a / s
    arg = (1.0 + th.theta_t) * s * noise
    total = 0.0
    coeff = 1.0 / s
    for i in range(m):
        if i > 0:
            coeff *= ratio / i
        total += coeff * _scaled_upper_gamma(i + 1, arg, noise / mu)
    return total


def p1(link: NakagamiLinkParams, th: DecodingThresholds, noise: float) -> float:
    """Both decoded on the direct pass: aerial user first, then ground user
    after interference cancellation."""
    return (
        link.p_los * _p1_component(link.beta_los, link.m_los, th, noise, link.mu)
        + (1.0 - link.p_los) * _p1_component(link.beta_nlos, link.m_nlos, th, noise, link.mu)
    ) / link.mu


def _p2_component(beta: float, m: int, th: DecodingThresholds, noise: float, mu: float) -> float:
    s = beta * th.theta_a + 1.0 / mu
    ratio = beta * th.theta_a / s
    lo = s * noise
    hi = (1.0 + th.theta_t) * s * noise
    total = 0.0
    coeff = 1.0 / s
    for i in range(m):
        if i > 0:
            coeff *= ratio / i
        total += coeff * (_scaled_upper_gamma(i + 1, lo, noise / mu)
                          - _scaled_upper_gamma(i + 1, hi, noise / mu))
    return total


def p2(link: NakagamiLinkParams, th: DecodingThresholds, noise: float) -> float:
    """Aerial user decoded on the direct pass, ground user below threshold."""
    return (
        link.p_los * _p2_component(link.beta_los, link.m_los, th, noise, link.mu)
        + (1.0 - link.p_los) * _p2_component(link.beta_nlos, link.m_nlos, th, noise, link.mu)
    ) / link.mu


def _gamma_tail_weighted(beta: float, m: int, rate_shift: float, cut: float) -> float:
    # integral over [cut, inf) of a^{m-1} e^{-beta a} e^{-rate_shift a} scaled
    # by beta^m / (m-1)!  ==  (beta/(beta+rate_shift))^m * Q(m, (beta+rate_shift)*cut)
    s = beta + rate_shift
    return (beta / s) ** m * upper_gamma_int(m, s * cut) / math.factorial(m - 1)


def p3(link: NakagamiLinkParams, th: DecodingThresholds, noise: float) -> float:
    """Both decoded on the fallback pass: ground user under full
    interference, then the aerial user after cancellation.

    For threshold products >= 1 the event region simplifies and a closed
    form applies; below 1 the exact event integral is evaluated by
    adaptive quadrature (the published closed form for that regime is
    quarantined in :func:`p3_paper_closed_form`).
    """
    if th.theta_a == 0.0:
        # The direct pass can never fail, so the fallback pass never runs.
        return 0.0
    if th.theta_a * th.theta_t >= 1.0:
        pref = math.exp(-th.theta_t * noise / link.mu)
        rate_shift = th.theta_t / link.mu
        cut = th.theta_a * noise
        return pref * (
            link.p_los * _gamma_tail_weighted(link.beta_los, link.m_los, rate_shift, cut)
            + (1.0 - link.p_los)
            * _gamma_tail_weighted(link.beta_nlos, link.m_nlos, rate_shift, cut)
        )
    return _p3_semi_analytic(link, th, noise)


def _mixture_upper_quantile(link: NakagamiLinkParams, tail: float = 1e-10) -> float:
    """Upper quantile bound covering all but ``tail`` mass of the mixture."""
    q_l = stats.gamma.ppf(1.0 - tail, link.m_los, scale=1.0 / link.beta_los)
    q_n = stats.gamma.ppf(1.0 - tail, link.m_nlos, scale=1.0 / link.beta_nlos)
    if link.p_los == 1.0:
        return float(q_l)
    if link.p_los == 0.0:
        return float(q_n)
    return float(max(q_l, q_n))


def _p3_semi_analytic(link: NakagamiLinkParams, th: DecodingThresholds, noise: float) -> float:
    """Exact event integral over the aerial user's power, threshold product < 1.

    Conditioned on the aerial power a, the ground user must exceed both
    the fallback-decode bound theta_t*(a+noise) and the direct-pass-failure
    bound a/theta_a - noise; its exponential tail gives the integrand
    exp(-max(...)/mu) * f(a). The two bounds cross at
    a = theta_a*noise*(1+theta_t)/(1-theta_a*theta_t), a known kink.

    The mixture components and the exponential damping can live many
    decades apart, so the integral is evaluated in log-space (which spreads
    the narrow component bumps out to unit width) with subdivision seeds at
    the kink and at every characteristic scale.
    """
    lo = th.theta_a * noise
    hi = _mixture_upper_quantile(link)
    if hi <= lo:
        # The mixture carries at most the quantile tail mass above lo.
        return 0.0

    mu = link.mu

    def integrand_log(u):
        a = math.exp(u)
        bound = max(th.theta_t * (a + noise), a / th.theta_a - noise)
        f = gamma_mixture_pdf(a, link.p_los, link.beta_los, link.m_los,
                              link.beta_nlos, link.m_nlos)
        return a * math.exp(-bound / mu) * f

    kink = th.theta_a * noise * (1.0 + th.theta_t) / (1.0 - th.theta_a * th.theta_t)
    scales = [kink,
              link.m_los / link.beta_los,
              link.m_nlos / link.beta_nlos,
              th.theta_a * mu]
    u_lo, u_hi = math.log(lo), math.log(hi)
    seeds = sorted({math.log(s) for s in scales if lo < s < hi})
    result = integrate.quad(integrand_log, u_lo, u_hi, points=seeds or None,
                            epsabs=1e-8, epsrel=1e-10, limit=300, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > 1e-6:
        raise QuadratureError("event-region quadrature did not converge", abserr)
    return value


def p4(link: NakagamiLinkParams, th: DecodingThresholds, noise: float) -> float:
    """Ground user decoded on the fallback pass, aerial user lost.

    Integrates the exponential tail of the ground user over aerial powers
    below the noise-only decode bound.
    """
    if th.theta_a == 0.0:
        return 0.0
    pref = math.exp(-th.theta_t * noise / link.mu)
    rate_shift = th.theta_t / link.mu
    cut = th.theta_a * noise

    def component(beta, m):
        s = beta + rate_shift
        lower = math.factorial(m - 1) - upper_gamma_int(m, s * cut)
        return (beta / s) ** m * lower / math.factorial(m - 1)

    return pref * (
        link.p_los * component(link.beta_los, link.m_los)
        + (1.0 - link.p_los) * component(link.beta_nlos, link.m_nlos)
    )


def p3_paper_closed_form(link: NakagamiLinkParams, th: DecodingThresholds,
                         noise: float) -> float:
    """Published closed form for p3, kept verbatim for comparison only.

    For threshold products below 1 this expression carries a noise^2
    correction term and an asymmetric NLoS factor that disagree with the
    exact event integral; it is exposed so the discrepancy can be measured,
    and is never used by :func:`coverage_report`.
    """
    if th.theta_a * th.theta_t >= 1.0:
        return p3(link, th, noise)
    mu = link.mu

    def component(beta, m, denom_theta):
        if denom_theta == 0.0:
            shifted = math.inf
        else:
            shifted = beta + 1.0 / (denom_theta * mu)
        if math.isinf(shifted):
            tail = 0.0
        else:
            tail = (beta / shifted) ** m
        arg = (beta * th.theta_a + 1.0 / mu) * noise
        return math.exp(noise / mu) * tail * upper_gamma_int(m, arg) / math.factorial(m - 1)

    correction = 0.5 * th.theta_a * th.theta_t**2 * noise**2 \
        * (1.0 + th.theta_a) ** 2 / (1.0 - th.theta_a * th.theta_t)
    return (
        link.p_los * component(link.beta_los, link.m_los, th.theta_a)
        + (1.0 - link.p_los) * component(link.beta_nlos, link.m_nlos, th.theta_t)
        - correction
    )


def _clamp_probability(value: float) -> float:
    assert -1e-9 <= value <= 1.0 + 1e-9, f"probability out of range: {value!r}"
    return min(1.0, max(0.0, value))


def coverage_report(params: SystemParams, los: LosModel, point,
                    th: DecodingThresholds) -> CoverageReport:
    """Analytic coverage probabilities at one trajectory point.

    ``point`` needs ``r_a`` and ``h`` attributes (see trajectory module).
    The method tag is "semi_analytic" when the fallback-pass probability
    required quadrature (threshold product below 1), "analytic" otherwise.
    """
    d_a = aue_3d_distance(point.r_a, point.h, params.bs_height)
    p_los = los_probability(los, point.r_a, point.h, params.bs_height)
    link = link_params(params, p_los, d_a)
    noise = params.noise_power

    v1 = _clamp_probability(p1(link, th, noise))
    v2 = _clamp_probability(p2(link, th, noise))
    v3 = _clamp_probability(p3(link, th, noise))
    v4 = _clamp_probability(p4(link, th, noise))
    residual = _clamp_probability(1.0 - (v1 + v2 + v3 + v4))
    method = SEMI_ANALYTIC if (0.0 < th.theta_a * th.theta_t < 1.0
                               or (th.theta_t == 0.0 and th.theta_a > 0.0)) else ANALYTIC
    return CoverageReport(
        p1=v1, p2=v2, p3=v3, p4=v4,
        p_tot=_clamp_probability(v1 + v3),
        p_aue=_clamp_probability(v1 + v2 + v3),
        p_tue=_clamp_probability(v1 + v3 + v4),
        p5_residual=residual,
        method=method,
    )
