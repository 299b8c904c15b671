"""Stochastic oracle for the decoding tree.

Samples the full system per trial (ground-user placement, both fading
channels, the LoS draw), executes the three-step decoding procedure and
tallies the five joint outcomes. Used to validate the closed forms; the
closed forms never feed back into the sampling.

Reproducibility contract: substream s of a run derives its generator from
the counter-based Philox key (seed, s), so a fixed (seed, stream_count,
trials) triple yields identical event counts on every machine regardless
of execution order. Changing stream_count reshuffles the substreams and
may change counts, but every configuration remains a valid estimate.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import (
    SystemParams,
    LosModel,
    aue_3d_distance,
    a2c_path_loss,
    los_probability,
    tue_transmit_power,
)
from .analysis import MONTE_CARLO, CoverageReport, DecodingThresholds

__all__ = [
    "McConfig",
    "DecodeEvent",
    "TrialOutcome",
    "stream_rng",
    "sample_tue_received_power",
    "sample_aue_received_power",
    "run_trial",
    "classify_events",
    "simulate_counts",
    "estimate",
]


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int
    stream_count: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.stream_count < 1:
            raise ValueError("stream_count must be >= 1")


class DecodeEvent(enum.IntEnum):
    E1 = 1  # aerial decoded, then ground decoded after cancellation
    E2 = 2  # aerial decoded, ground below threshold
    E3 = 3  # aerial failed, ground decoded under interference, aerial recovered
    E4 = 4  # aerial failed, ground decoded under interference, aerial lost
    E5 = 5  # aerial failed and ground failed under interference


@dataclass(frozen=True)
class TrialOutcome:
    event: DecodeEvent
    sinr_step1_aue: float
    sinr_step2_tue: float
    sinr_step3_aue: Optional[float] = None


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for one substream of a seeded run."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_tue_received_power(params: SystemParams, rng: np.random.Generator,
                              size: Optional[int] = None):
    """Draw the ground user's received power at the BS.

    Places the user uniformly in the disk (horizontal distance R*sqrt(U)),
    applies channel-inversion transmit power over the 3D distance, and
    multiplies by a unit-mean Rayleigh power gain and the antenna gain.
    The result is exponential with mean cutoff*gain regardless of position.
    """
    n = 1 if size is None else size
    u = rng.random(n)
    r_t = params.cell_radius * np.sqrt(u)
    d_t = np.hypot(r_t, params.bs_height)
    p_tx = tue_transmit_power(params, d_t)
    omega = rng.standard_exponential(n)
    power = p_tx * d_t ** -params.pl_exp_terrestrial * omega * params.tue_gain
    return float(power[0]) if size is None else power


def _unit_mean_gamma(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    # Sum of m exponentials, rescaled to unit mean: exact for integer shape,
    # no rejection loop.
    return rng.standard_exponential((n, m)).sum(axis=1) / m


def sample_aue_received_power(params: SystemParams, p_los: float, d_a: float,
                              rng: np.random.Generator,
                              size: Optional[int] = None):
    """Draw the aerial user's received power and its LoS flag.

    Bernoulli LoS draw, then a unit-mean Gamma power gain with the shape of
    the matching fading class, scaled by transmit power, path gain and
    antenna gain.
    """
    if d_a <= 0:
        raise ValueError("propagation distance must be positive")
    if not 0 <= p_los <= 1:
        raise ValueError("p_los must be in [0, 1]")
    n = 1 if size is None else size
    los = rng.random(n) < p_los
    n_los = int(los.sum())
    gain = np.empty(n)
    gain[los] = _unit_mean_gamma(rng, n_los, params.m_los)
    gain[~los] = _unit_mean_gamma(rng, n - n_los, params.m_nlos)
    w_los = params.aue_tx_power * params.aue_gain * a2c_path_loss(params, d_a, True)
    w_nlos = params.aue_tx_power * params.aue_gain * a2c_path_loss(params, d_a, False)
    power = np.where(los, w_los, w_nlos) * gain
    if size is None:
        return float(power[0]), bool(los[0])
    return power, los


def run_trial(x_a: float, x_t: float, th: DecodingThresholds,
              noise: float) -> TrialOutcome:
    """Classify one received-power pair through the decoding tree.

    Direct pass: aerial user against ground-user interference, then ground
    user after perfect cancellation. On direct-pass failure the full aerial
    power propagates as interference to the ground user; if that succeeds
    the aerial user is retried against noise only.
    """
    if x_a < 0 or x_t < 0:
        raise ValueError("received powers must be nonnegative")
    sinr1 = x_a / (x_t + noise)
    if sinr1 >= th.theta_a:
        sinr2 = x_t / noise
        event = DecodeEvent.E1 if sinr2 >= th.theta_t else DecodeEvent.E2
        return TrialOutcome(event, sinr1, sinr2)
    sinr2 = x_t / (x_a + noise)
    if sinr2 < th.theta_t:
        return TrialOutcome(DecodeEvent.E5, sinr1, sinr2)
    sinr3 = x_a / noise
    event = DecodeEvent.E3 if sinr3 >= th.theta_a else DecodeEvent.E4
    return TrialOutcome(event, sinr1, sinr2, sinr3)


def classify_events(x_a: np.ndarray, x_t: np.ndarray, th: DecodingThresholds,
                    noise: float) -> np.ndarray:
    """Vectorized event tally; returns counts for E1..E5 (length 5)."""
    step1 = x_a >= th.theta_a * (x_t + noise)
    step2 = x_t >= th.theta_t * noise
    step2_interf = x_t >= th.theta_t * (x_a + noise)
    step3 = x_a >= th.theta_a * noise
    fail1 = ~step1
    counts = np.array([
        np.count_nonzero(step1 & step2),
        np.count_nonzero(step1 & ~step2),
        np.count_nonzero(fail1 & step2_interf & step3),
        np.count_nonzero(fail1 & step2_interf & ~step3),
        np.count_nonzero(fail1 & ~step2_interf),
    ], dtype=np.int64)
    return counts


def _stream_sizes(trials: int, stream_count: int) -> list:
    base = trials // stream_count
    sizes = [base] * stream_count
    sizes[-1] += trials - base * stream_count
    return sizes


def simulate_counts(params: SystemParams, los: LosModel, point,
                    th: DecodingThresholds, mc: McConfig) -> np.ndarray:
    """Run mc.trials independent trials; returns exact counts of E1..E5."""
    d_a = aue_3d_distance(point.r_a, point.h, params.bs_height)
    p_los = los_probability(los, point.r_a, point.h, params.bs_height)
    counts = np.zeros(5, dtype=np.int64)
    for stream, n in enumerate(_stream_sizes(mc.trials, mc.stream_count)):
        if n == 0:
            continue
        rng = stream_rng(mc.seed, stream)
        x_t = sample_tue_received_power(params, rng, n)
        x_a, _ = sample_aue_received_power(params, p_los, d_a, rng, n)
        counts += classify_events(x_a, x_t, th, params.noise_power)
    return counts


def _wald_halfwidth(p_hat: float, trials: int) -> float:
    return 3.0 * math.sqrt(p_hat * (1.0 - p_hat) / trials)


def estimate(params: SystemParams, los: LosModel, point,
             th: DecodingThresholds, mc: McConfig) -> CoverageReport:
    """Monte Carlo coverage report with 99.7% Wald half-widths.

    Deterministic given (seed, stream_count, trials).
    """
    counts = simulate_counts(params, los, point, th, mc)
    n = mc.trials
    f1, f2, f3, f4, f5 = (c / n for c in counts)
    p_tot = f1 + f3
    p_aue = f1 + f2 + f3
    p_tue = f1 + f3 + f4
    halfwidth = max(_wald_halfwidth(p, n)
                    for p in (f1, f2, f3, f4, p_tot, p_aue, p_tue))
    return CoverageReport(
        p1=f1, p2=f2, p3=f3, p4=f4,
        p_tot=p_tot, p_aue=p_aue, p_tue=p_tue,
        p5_residual=f5,
        method=MONTE_CARLO,
        ci_halfwidth=halfwidth,
        trials=n,
    )
