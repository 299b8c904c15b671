"""Physical-layer model for the aerial-terrestrial uplink.

Holds the system parameters, the probabilistic line-of-sight models
(ITU product form, 3GPP urban, fixed probability), path loss for the
air-to-cellular and terrestrial links, channel-inversion power control,
and the exact distributions of both users' received powers at the base
station.

Everything is in linear SI units: watts, meters, dimensionless gains.
The received-power distributions are:

* terrestrial user: exponential with mean ``tue_cutoff * tue_gain``,
  independent of its position (channel inversion cancels the path loss);
* aerial user: a two-component Gamma mixture (LoS / NLoS Nakagami-m
  fading with integer shape), weighted by the LoS probability.

All distribution functions accept scalars or numpy arrays for ``x``.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "SystemParams",
    "BuiltUpEnvironment",
    "IturLos",
    "ThreeGppUrbanLos",
    "FixedLos",
    "LosModel",
    "tue_3d_distance",
    "aue_3d_distance",
    "los_probability",
    "a2c_path_loss",
    "tue_transmit_power",
    "tue_distance_pdf",
    "tue_power_cdf",
    "tue_power_pdf",
    "aue_power_cdf",
    "aue_power_pdf",
    "gamma_mixture_cdf",
    "gamma_mixture_pdf",
]


@dataclass(frozen=True)
class SystemParams:
    """Scalar physical and link parameters of the single-cell system.

    Units: meters, watts, Hz; gains and attenuations are dimensionless
    linear factors (attenuation 13 dB -> 10**-1.3).
    """

    cell_radius: float        # m
    bs_height: float          # m
    noise_power: float        # W
    aue_tx_power: float       # W
    aue_gain: float
    tue_gain: float
    tue_cutoff: float         # W, target average received power at the BS
    pl_exp_terrestrial: float
    pl_exp_los: float
    pl_exp_nlos: float
    atten_los: float          # linear, in (0, 1]
    atten_nlos: float         # linear, in (0, 1]
    m_los: int
    m_nlos: int
    bandwidth: float          # Hz

    def __post_init__(self):
        if self.cell_radius <= 0:
            raise ValueError("cell_radius must be positive")
        if self.bs_height < 0:
            raise ValueError("bs_height must be nonnegative")
        if self.noise_power <= 0:
            raise ValueError("noise_power must be positive")
        if self.aue_tx_power <= 0:
            raise ValueError("aue_tx_power must be positive")
        if self.aue_gain <= 0 or self.tue_gain <= 0:
            raise ValueError("antenna gains must be positive")
        # Cutoff must exceed receiver sensitivity for power control to make sense.
        if self.tue_cutoff <= self.noise_power:
            raise ValueError("tue_cutoff must exceed noise_power")
        for name in ("pl_exp_terrestrial", "pl_exp_los", "pl_exp_nlos"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("atten_los", "atten_nlos"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        # Closed forms use finite sums of length m, so shapes must be integers.
        for name in ("m_los", "m_nlos"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be an integer >= 1")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")


@dataclass(frozen=True)
class BuiltUpEnvironment:
    """Built-up area descriptors for the ITU LoS model.

    ``buildings_per_km2`` is per square kilometer while distances are in
    meters; the /1000 factor inside the blockage count below performs the
    unit bridge.
    """

    built_ratio: float        # fraction of land covered by buildings, (0, 1]
    buildings_per_km2: float  # 1/km^2
    height_scale: float       # m, Rayleigh scale of building heights

    def __post_init__(self):
        if not 0 < self.built_ratio <= 1:
            raise ValueError("built_ratio must be in (0, 1]")
        if self.buildings_per_km2 <= 0:
            raise ValueError("buildings_per_km2 must be positive")
        if self.height_scale <= 0:
            raise ValueError("height_scale must be positive")


@dataclass(frozen=True)
class IturLos:
    env: BuiltUpEnvironment


@dataclass(frozen=True)
class ThreeGppUrbanLos:
    """3GPP urban model with BS antennas above rooftop level.

    Valid for aerial-user heights in (22.5, 300] m.
    """


@dataclass(frozen=True)
class FixedLos:
    """Deterministic LoS probability, mainly a test seam."""

    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("fixed LoS probability must be in [0, 1]")


LosModel = Union[IturLos, ThreeGppUrbanLos, FixedLos]


def tue_3d_distance(r_t: float, h_b: float) -> float:
    """3D propagation distance for a ground user at horizontal distance r_t."""
    return math.hypot(r_t, h_b)


def aue_3d_distance(r_a: float, h_a: float, h_b: float) -> float:
    """3D propagation distance between the aerial user and the BS antenna."""
    return math.hypot(r_a, h_a - h_b)


def los_probability(model: LosModel, r_a: float, h_a: float, h_b: float) -> float:
    """Probability that the air-to-cellular link is line-of-sight.

    ITU model: product over the expected number of buildings crossed by the
    horizontal projection of the link, each factor being the probability
    that the building at that position is lower than the ray. A Rayleigh
    building-height distribution with scale ``height_scale`` gives factors
    1 - exp(-h_ray^2 / (2 * scale^2)). When the building count is negative
    (short links) the product is empty and the probability is exactly 1.

    3GPP urban model: distance-threshold form, exactly 1 for heights in
    (100, 300] and for horizontal distances below the height-dependent
    breakpoint d1.
    """
    if r_a < 0:
        raise ValueError("horizontal distance must be nonnegative")

    if isinstance(model, FixedLos):
        return model.p

    if isinstance(model, ThreeGppUrbanLos):
        if not 22.5 < h_a <= 300:
            raise ValueError("3GPP urban LoS model requires height in (22.5, 300] m")
        if h_a > 100:
            return 1.0
        log_h = math.log10(h_a)
        d1 = max(294.05 * log_h - 432.94, 18.0)
        if r_a <= d1:
            return 1.0
        p1 = 233.98 * log_h - 0.95
        frac = d1 / r_a
        return frac + math.exp(-r_a / p1) * (1.0 - frac)

    env = model.env
    m = math.floor(r_a * math.sqrt(env.built_ratio * env.buildings_per_km2) / 1000.0 - 1.0)
    if m < 0:
        return 1.0
    two_var = 2.0 * env.height_scale**2
    prob = 1.0
    for n in range(m + 1):
        ray_height = h_a - (n + 0.5) * (h_a - h_b) / (m + 1)
        factor = 1.0 - math.exp(-(ray_height**2) / two_var)
        # Each factor is a probability; clamp guards float excursions near h_a ~ h_b.
        prob *= min(1.0, max(0.0, factor))
    return prob


def a2c_path_loss(params: SystemParams, d_a: float, los: bool) -> float:
    """Air-to-cellular path gain (dimensionless) at 3D distance d_a."""
    if d_a <= 0:
        raise ValueError("propagation distance must be positive")
    if los:
        return params.atten_los * d_a ** -params.pl_exp_los
    return params.atten_nlos * d_a ** -params.pl_exp_nlos


def tue_transmit_power(params: SystemParams, d_t):
    """Ground-user transmit power under truncated channel inversion.

    The user scales its power with distance so that the average received
    power at the BS equals ``tue_cutoff`` exactly. Accepts scalar or array
    distances; every distance must lie in the geometric range
    [bs_height, sqrt(cell_radius^2 + bs_height^2)].
    """
    d = np.asarray(d_t, dtype=float)
    hi = math.hypot(params.cell_radius, params.bs_height)
    tol = 1e-9 * hi
    if np.any(d < params.bs_height - tol) or np.any(d > hi + tol):
        raise ValueError("TUE distance outside the cell geometry")
    out = params.tue_cutoff * d**params.pl_exp_terrestrial
    return out if out.ndim else float(out)


def tue_distance_pdf(params: SystemParams, z):
    """Density of the ground user's 3D distance; 2z/R^2 on its support."""
    z = np.asarray(z, dtype=float)
    hi = math.hypot(params.cell_radius, params.bs_height)
    inside = (z >= params.bs_height) & (z <= hi)
    out = np.where(inside, 2.0 * z / params.cell_radius**2, 0.0)
    return out if out.ndim else float(out)


def tue_power_cdf(params: SystemParams, x):
    """CDF of the ground user's received power: exponential, mean cutoff*gain.

    Channel inversion makes the distribution independent of the terrestrial
    path-loss exponent and of the user's position.
    """
    mean = params.tue_cutoff * params.tue_gain
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0, -np.expm1(-np.maximum(x, 0.0) / mean), 0.0)
    return out if out.ndim else float(out)


def tue_power_pdf(params: SystemParams, x):
    mean = params.tue_cutoff * params.tue_gain
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0, np.exp(-np.maximum(x, 0.0) / mean) / mean, 0.0)
    return out if out.ndim else float(out)


def _gamma_survival_series(x, beta: float, m: int):
    """Survival of a Gamma(shape=m, rate=beta) variable via the finite series.

    For integer shape, P(X >= x) = exp(-beta x) * sum_{k<m} (beta x)^k / k!.
    """
    bx = beta * np.asarray(x, dtype=float)
    term = np.ones_like(bx)
    acc = np.ones_like(bx)
    for k in range(1, m):
        term = term * bx / k
        acc = acc + term
    return np.exp(-bx) * acc


def gamma_mixture_cdf(x, p_los: float, beta_los: float, m_los: int,
                      beta_nlos: float, m_nlos: int):
    """CDF of the two-component integer-shape Gamma mixture."""
    x = np.asarray(x, dtype=float)
    xp = np.maximum(x, 0.0)
    out = 1.0 - p_los * _gamma_survival_series(xp, beta_los, m_los) \
        - (1.0 - p_los) * _gamma_survival_series(xp, beta_nlos, m_nlos)
    out = np.where(x >= 0, out, 0.0)
    return out if out.ndim else float(out)


def gamma_mixture_pdf(x, p_los: float, beta_los: float, m_los: int,
                      beta_nlos: float, m_nlos: int):
    """Density of the two-component integer-shape Gamma mixture."""
    x = np.asarray(x, dtype=float)
    xp = np.maximum(x, 0.0)
    f_l = np.exp(-xp * beta_los) * beta_los**m_los * xp**(m_los - 1) / math.gamma(m_los)
    f_n = np.exp(-xp * beta_nlos) * beta_nlos**m_nlos * xp**(m_nlos - 1) / math.gamma(m_nlos)
    out = np.where(x >= 0, p_los * f_l + (1.0 - p_los) * f_n, 0.0)
    return out if out.ndim else float(out)


def _aue_rates(params: SystemParams, d_a: float):
    """Gamma rates of the aerial user's LoS / NLoS received-power components."""
    if d_a <= 0:
        raise ValueError("propagation distance must be positive")
    w_los = params.aue_tx_power * params.aue_gain * a2c_path_loss(params, d_a, True)
    w_nlos = params.aue_tx_power * params.aue_gain * a2c_path_loss(params, d_a, False)
    return params.m_los / w_los, params.m_nlos / w_nlos


def aue_power_cdf(params: SystemParams, p_los: float, d_a: float, x):
    """CDF of the aerial user's received power at 3D distance d_a."""
    if not 0 <= p_los <= 1:
        raise ValueError("p_los must be in [0, 1]")
    b_l, b_n = _aue_rates(params, d_a)
    return gamma_mixture_cdf(x, p_los, b_l, params.m_los, b_n, params.m_nlos)


def aue_power_pdf(params: SystemParams, p_los: float, d_a: float, x):
    """Density of the aerial user's received power at 3D distance d_a."""
    if not 0 <= p_los <= 1:
        raise ValueError("p_los must be in [0, 1]")
    b_l, b_n = _aue_rates(params, d_a)
    return gamma_mixture_pdf(x, p_los, b_l, params.m_los, b_n, params.m_nlos)
