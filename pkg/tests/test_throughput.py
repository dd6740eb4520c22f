"""Renewal-reward throughput, bounds ordering, and joint optimization."""

import math

import numpy as np
import pytest

from mprwlan import (
    build_round_model,
    carryover_upper_bound,
    evaluate_throughput,
    lower_bound,
    optimize,
    throughput_profile,
)
from mprwlan.reference import single_round_throughput_pps, spr_throughput_pps


def test_reduction_to_single_round_evaluator(timings54):
    # theta=1 stops at the first round with winners: the general machinery
    # must collapse to the directly coded geometric-round formula
    for lam in (0.5, 1.0, 3.0, 6.0):
        for mpr in (1, 2, 4, 10):
            model = build_round_model(lam, mpr)
            general = evaluate_throughput(model, 1, timings54).throughput_pps
            direct = single_round_throughput_pps(lam, mpr, timings54)
            assert general == pytest.approx(direct, rel=1e-9), (lam, mpr)


def test_reduction_to_spr_evaluator(timings54):
    for lam in (0.5, 1.0, 3.0):
        model = build_round_model(lam, 1)
        general = evaluate_throughput(model, 1, timings54).throughput_pps
        assert general == pytest.approx(spr_throughput_pps(lam, timings54), rel=1e-9)


def test_seventy_two_percent_ratio(timings54):
    model = build_round_model(6.0, 10)
    s1 = evaluate_throughput(model, 1, timings54).throughput_pps
    s9 = evaluate_throughput(model, 9, timings54).throughput_pps
    assert s1 / s9 == pytest.approx(0.72, abs=0.03)


def test_profile_consistent_with_pointwise(timings54):
    model = build_round_model(2.0, 6)
    prof = throughput_profile(model, timings54)
    for theta in range(1, 7):
        point = evaluate_throughput(model, theta, timings54)
        assert prof[theta - 1] == pytest.approx(point.throughput_pps, rel=1e-12)


def test_units_identity(timings54):
    point = evaluate_throughput(build_round_model(3.0, 4), 2, timings54)
    assert point.throughput_mbps == point.throughput_pps * timings54.payload_bits * 1e-6


def test_throughput_upper_limit(timings54):
    # payload per super round <= M and duration >= B
    for lam in (0.1, 1.0, 10.0):
        for mpr in (1, 5, 20):
            model = build_round_model(lam, mpr)
            for theta in {1, mpr}:
                point = evaluate_throughput(model, theta, timings54)
                assert 0 < point.throughput_pps <= mpr / timings54.b_us * 1e6


def test_lower_bound_is_theta_mpr(timings54):
    model = build_round_model(4.0, 7)
    assert lower_bound(model, timings54) == evaluate_throughput(model, 7, timings54)
    assert lower_bound(model, timings54).expected_payload_packets == pytest.approx(
        7.0, abs=1e-9
    )


def test_ordering_chain_along_lambda(timings54):
    for mpr in (1, 4, 10):
        for lam in np.arange(0.5, 12.1, 0.5):
            model = build_round_model(float(lam), mpr)
            prof = throughput_profile(model, timings54)
            bl = lower_bound(model, timings54).throughput_pps
            sc = carryover_upper_bound(model, timings54).throughput_pps
            assert bl <= prof.max() * (1 + 1e-9)
            assert prof.max() <= sc * (1 + 1e-9)


def test_carryover_closed_form_at_m1(timings54):
    lam = 2.0
    model = build_round_model(lam, 1)
    ex = lam / math.expm1(lam)
    denom = (1.0 / ex) * (
        timings54.t_rts_us + model.mean_idle_slots * timings54.slot_us
    ) + timings54.b_us
    assert carryover_upper_bound(model, timings54).throughput_pps == pytest.approx(
        1.0 / denom * 1e6, rel=1e-12
    )


def test_optimize_m1_is_spr_optimum(timings54):
    res = optimize(1, timings54, (0.05, 5.0), 0.05)
    assert res.theta_star == 1
    grid = np.arange(0.05, 5.0, 0.001)
    brute = max(spr_throughput_pps(float(l), timings54) for l in grid)
    assert res.s_star == pytest.approx(brute, rel=1e-6)


def test_optimize_deterministic_and_ordered(timings54):
    a = optimize(10, timings54, (0.05, 25.0), 0.1)
    b = optimize(10, timings54, (0.05, 25.0), 0.1)
    assert a == b
    assert a.b_l_star <= a.s_star * (1 + 1e-9)
    assert a.s_star <= a.s_c_star * (1 + 1e-9)
    assert a.theta_star == 9
    assert a.theta_star < 10  # stopping short of M pays at M=10


def test_optimize_rejects_bad_ranges(timings54):
    with pytest.raises(ValueError):
        optimize(10, timings54, (0.0, 10.0), 0.05)
    with pytest.raises(ValueError):
        optimize(10, timings54, (5.0, 1.0), 0.05)
    with pytest.raises(ValueError):
        optimize(10, timings54, (0.05, 10.0), -1.0)
    with pytest.raises(ValueError):
        optimize(0, timings54, (0.05, 10.0), 0.05)
