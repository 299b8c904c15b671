"""Sampler distribution checks, decoding-tree classification, determinism."""

import math

import numpy as np
import pytest

from skynoma import (
    DecodeEvent,
    DecodingThresholds,
    McConfig,
    SpiralConfig,
    aue_power_cdf,
    estimate,
    run_trial,
    sample_aue_received_power,
    sample_tue_received_power,
    simulate_counts,
    spiral_points,
    stream_rng,
    tue_power_cdf,
)


def ks_statistic(samples, cdf):
    x = np.sort(samples)
    n = len(x)
    f = cdf(x)
    grid = np.arange(n, dtype=float)
    return max(np.max(f - grid / n), np.max((grid + 1.0) / n - f))


class _UnitFadingRng:
    """Delegating generator whose exponential draws are forced to 1."""

    def __init__(self, rng):
        self._rng = rng

    def random(self, *args, **kwargs):
        return self._rng.random(*args, **kwargs)

    def standard_exponential(self, size=None):
        return np.ones(size)


# ---------------------------------------------------------------------------
# ground-user sampler
# ---------------------------------------------------------------------------

def test_tue_sampler_channel_inversion(params):
    rng = _UnitFadingRng(stream_rng(5, 0))
    target = params.tue_cutoff * params.tue_gain
    draws = sample_tue_received_power(params, rng, size=1000)
    assert np.allclose(draws, target, rtol=1e-12)


def test_tue_sampler_mean(params):
    rng = stream_rng(9, 0)
    draws = sample_tue_received_power(params, rng, size=10**6)
    target = params.tue_cutoff * params.tue_gain
    assert abs(draws.mean() - target) / target < 0.005


def test_tue_sampler_ks(params):
    rng = stream_rng(13, 0)
    draws = sample_tue_received_power(params, rng, size=10**6)
    d = ks_statistic(draws, lambda x: tue_power_cdf(params, x))
    assert d < 0.002, f"KS statistic {d:.5f}"


def test_tue_sampler_scalar(params):
    value = sample_tue_received_power(params, stream_rng(1, 0))
    assert isinstance(value, float) and value > 0


# ---------------------------------------------------------------------------
# aerial-user sampler
# ---------------------------------------------------------------------------

def test_aue_sampler_rayleigh_case(params):
    import dataclasses

    rayleigh = dataclasses.replace(params, m_los=1)
    rng = stream_rng(17, 0)
    d_a = 150.0
    draws, flags = sample_aue_received_power(rayleigh, 1.0, d_a, rng, size=200000)
    assert flags.all()
    mean = rayleigh.aue_tx_power * rayleigh.aue_gain * rayleigh.atten_los * d_a ** -2.2
    assert abs(draws.mean() - mean) / mean < 0.01


def test_aue_sampler_nlos_only(params):
    draws, flags = sample_aue_received_power(params, 0.0, 150.0, stream_rng(19, 0),
                                             size=10000)
    assert not flags.any()
    assert (draws > 0).all()


def test_aue_sampler_ks(params):
    for seed, (d_a, p_los) in enumerate([(150.0, 0.7), (80.0, 1.0), (400.0, 0.2)]):
        rng = stream_rng(23 + seed, 0)
        draws, _ = sample_aue_received_power(params, p_los, d_a, rng, size=10**6)
        d = ks_statistic(draws, lambda x: aue_power_cdf(params, p_los, d_a, x))
        assert d < 0.002, f"KS statistic {d:.5f} at d_a={d_a}, p_los={p_los}"


def test_aue_sampler_domain(params):
    with pytest.raises(ValueError):
        sample_aue_received_power(params, 0.5, -1.0, stream_rng(1, 0))
    with pytest.raises(ValueError):
        sample_aue_received_power(params, 1.5, 100.0, stream_rng(1, 0))


# ---------------------------------------------------------------------------
# decoding tree
# ---------------------------------------------------------------------------

def test_run_trial_hand_checked():
    th = DecodingThresholds(1.0, 1.0)
    noise = 1.0
    out = run_trial(10.0, 1.0, th, noise)     # 10/2 ok, 1/1 ok
    assert out.event is DecodeEvent.E1
    assert out.sinr_step3_aue is None
    out = run_trial(1.0, 10.0, th, noise)     # 1/11 fails, 10/2 ok, 1/1 ok
    assert out.event is DecodeEvent.E3
    assert out.sinr_step3_aue == 1.0
    out = run_trial(0.5, 0.5, th, noise)      # both passes fail
    assert out.event is DecodeEvent.E5
    out = run_trial(10.0, 0.5, th, noise)     # direct ok, ground below
    assert out.event is DecodeEvent.E2
    out = run_trial(0.5, 10.0, th, noise)     # fallback ok, aerial lost
    assert out.event is DecodeEvent.E4
    with pytest.raises(ValueError):
        run_trial(-1.0, 0.5, th, noise)


def test_zero_thresholds_always_direct(params, urban_los):
    point = spiral_points(SpiralConfig(3, 15, 30, 500, 25.0))[0]
    mc = McConfig(trials=20000, seed=3, stream_count=2)
    report = estimate(params, urban_los, point, DecodingThresholds(0.0, 0.0), mc)
    assert report.p_tot == 1.0
    assert report.p1 == 1.0 and report.p5_residual == 0.0


def test_counts_partition_exactly(params, urban_los):
    point = spiral_points(SpiralConfig(3, 15, 30, 500, 25.0))[4]
    for seed in (1, 2, 3):
        mc = McConfig(trials=30011, seed=seed, stream_count=3)  # odd split
        counts = simulate_counts(params, urban_los, point,
                                 DecodingThresholds(100.0, 1.0), mc)
        assert counts.sum() == mc.trials
        assert (counts >= 0).all()


# ---------------------------------------------------------------------------
# reproducibility
# ---------------------------------------------------------------------------

def test_estimate_deterministic(params, urban_los):
    point = spiral_points(SpiralConfig(3, 15, 30, 500, 120.0))[2]
    th = DecodingThresholds(10.0, 1.0)
    mc = McConfig(trials=100000, seed=77, stream_count=4)
    a = simulate_counts(params, urban_los, point, th, mc)
    b = simulate_counts(params, urban_los, point, th, mc)
    assert np.array_equal(a, b)


def test_estimate_matches_analytic_for_every_los_model(params, urban_los):
    from skynoma import FixedLos, ThreeGppUrbanLos, coverage_report

    point = spiral_points(SpiralConfig(3, 15, 30, 500, 80.0))[5]
    th = DecodingThresholds.from_db(10.0, 0.0)
    trials = 300000
    for seed, los in enumerate([urban_los, ThreeGppUrbanLos(), FixedLos(0.35)]):
        analytic = coverage_report(params, los, point, th)
        mc = estimate(params, los, point, th,
                      McConfig(trials=trials, seed=400 + seed, stream_count=2))
        for name in ("p1", "p2", "p3", "p4", "p_tot"):
            a, m = getattr(analytic, name), getattr(mc, name)
            bound = 3.0 * math.sqrt(m * (1.0 - m) / trials) + 1e-4
            assert abs(a - m) <= bound, f"{type(los).__name__} {name}: {a} vs {m}"


def test_stream_count_changes_draws_not_validity(params, urban_los):
    from skynoma import coverage_report

    point = spiral_points(SpiralConfig(3, 15, 30, 500, 120.0))[2]
    th = DecodingThresholds(10.0, 1.0)
    analytic = coverage_report(params, urban_los, point, th)
    trials = 200000
    for streams in (1, 2, 7):
        counts = simulate_counts(params, urban_los, point, th,
                                 McConfig(trials=trials, seed=5, stream_count=streams))
        p_hat = (counts[0] + counts[2]) / trials
        bound = 3.0 * math.sqrt(p_hat * (1.0 - p_hat) / trials) + 1e-4
        assert abs(p_hat - analytic.p_tot) <= bound


def test_estimate_report_fields(params, urban_los):
    point = spiral_points(SpiralConfig(3, 15, 30, 500, 120.0))[0]
    mc = McConfig(trials=50000, seed=8, stream_count=2)
    report = estimate(params, urban_los, point, DecodingThresholds(10.0, 1.0), mc)
    assert report.method == "monte_carlo"
    assert report.trials == mc.trials
    assert report.ci_halfwidth is not None and 0 <= report.ci_halfwidth < 0.01
    assert report.p_tot == pytest.approx(report.p1 + report.p3, abs=1e-15)
    total = report.p1 + report.p2 + report.p3 + report.p4 + report.p5_residual
    assert total == pytest.approx(1.0, abs=1e-12)
