"""Monte Carlo engines: episode sampler and the slotted DCF simulator."""

import numpy as np
import pytest

from mprwlan import (
    analyze_stopped_process,
    build_round_model,
    evaluate_throughput,
    run_dcf,
    sample_stopping_episodes,
)
from mprwlan.sim import DcfConfig


def test_sampler_deterministic(timings54):
    model = build_round_model(1.0, 2)
    a = sample_stopping_episodes(model, 2, 20_000, 7, timings54)
    b = sample_stopping_episodes(model, 2, 20_000, 7, timings54)
    assert a == b


def test_sampler_geometric_rounds_at_theta_one(timings54):
    model = build_round_model(1.5, 4)
    report = sample_stopping_episodes(model, 1, 200_000, 3, timings54)
    expect = 1.0 / (1.0 - model.x_pmf[0])
    assert abs(report.mean_rounds_per_super_round - expect) < 3 * report.se_rounds


def test_sampler_matches_analytics(timings54):
    """lam=1, M=2, theta=2, one million episodes against the recursion."""
    model = build_round_model(1.0, 2)
    report = sample_stopping_episodes(model, 2, 1_000_000, 0, timings54)
    analysis = analyze_stopped_process(model, 2)
    point = evaluate_throughput(model, 2, timings54)
    assert abs(report.mean_rounds_per_super_round - analysis.expected_rounds) < (
        3 * report.se_rounds
    )
    # payload is degenerate here (always exactly 2), so allow float epsilon
    assert abs(report.mean_payload_per_super_round - analysis.expected_payload) <= (
        3 * report.se_payload + 1e-9
    )
    assert abs(report.throughput_pps - point.throughput_pps) < (
        3 * report.standard_error_pps
    )


def test_sampler_parameter_errors(timings54):
    model = build_round_model(1.0, 2)
    with pytest.raises(ValueError):
        sample_stopping_episodes(model, 3, 10, 0, timings54)
    with pytest.raises(ValueError):
        sample_stopping_episodes(model, 1, 0, 0, timings54)


def test_dcf_config_validation():
    with pytest.raises(ValueError):
        DcfConfig(num_stations=0, mpr_capability=2, theta=1)
    with pytest.raises(ValueError):
        DcfConfig(num_stations=5, mpr_capability=2, theta=3)
    with pytest.raises(ValueError):
        DcfConfig(num_stations=5, mpr_capability=2, theta=1, min_window=0)
    with pytest.raises(ValueError):
        DcfConfig(num_stations=5, mpr_capability=2, theta=1, backoff_factor=0.5)
    with pytest.raises(ValueError):
        DcfConfig(num_stations=5, mpr_capability=2, theta=1, measured_slots=0)


def test_dcf_degenerate_single_station(timings54):
    # K=1, W0=1: the lone station transmits every slot and always wins
    cfg = DcfConfig(
        num_stations=1, mpr_capability=1, theta=1, min_window=1,
        warmup_slots=100, measured_slots=5000, rng_seed=0,
    )
    report = run_dcf(cfg, timings54)
    expect = 1.0 / (timings54.t_rts_us + timings54.b_us) * 1e6
    assert report.throughput_pps == pytest.approx(expect, rel=1e-12)
    assert report.measured_lambda == pytest.approx(1.0)
    assert report.mean_rounds_per_super_round == pytest.approx(1.0)


def test_dcf_deterministic(timings54):
    cfg = DcfConfig(
        num_stations=20, mpr_capability=3, theta=3,
        warmup_slots=500, measured_slots=5000, rng_seed=11,
    )
    assert run_dcf(cfg, timings54) == run_dcf(cfg, timings54)


def test_dcf_payload_conservation(timings54):
    # every super round carries between theta and M packets
    cfg = DcfConfig(
        num_stations=50, mpr_capability=4, theta=2,
        warmup_slots=1000, measured_slots=20_000, rng_seed=5,
    )
    report = run_dcf(cfg, timings54)
    assert 2.0 <= report.mean_payload_per_super_round <= 4.0
    assert report.measured_lambda > 0
    assert report.num_super_rounds > 100


def test_dcf_backoff_stage_cap(timings54):
    # a tight cap keeps windows small, so attempts stay frequent
    base = dict(num_stations=50, mpr_capability=2, theta=2,
                warmup_slots=1000, measured_slots=20_000, rng_seed=2)
    capped = run_dcf(DcfConfig(max_backoff_stage=0, **base), timings54)
    free = run_dcf(DcfConfig(**base), timings54)
    assert capped.measured_lambda > free.measured_lambda


def test_winner_selection_uniformity():
    """Chi-square sanity check on the selection primitive as the simulator
    uses it: min(count, M) winners drawn uniformly without replacement."""
    rng = np.random.default_rng(0)
    win = np.arange(5)
    counts = np.zeros(5)
    trials = 20_000
    for _ in range(trials):
        counts[rng.choice(win, size=3, replace=False)] += 1
    expect = trials * 3 / 5
    chi2 = float(((counts - expect) ** 2 / expect).sum())
    assert chi2 < 18.47  # 99.9th percentile of chi-square with 4 dof
