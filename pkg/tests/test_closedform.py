"""Printed closed-form expressions vs the exact renewal recursion.

The closed forms are cross-check oracles with a documented validity region:
the n-round-sum and stopped-sum forms are exact only for totals s <= mpr,
the stopping-time form and the expected-rounds series everywhere.
"""

import numpy as np
import pytest

from mprwlan import analyze_stopped_process, build_round_model
from mprwlan.closedform import (
    discrepancy_report,
    expected_rounds_closed_form,
    stop_time_closed_form,
    stopped_sum_closed_form,
    sum_pmf_closed_form,
)


def test_single_round_reduces_to_pmf():
    for lam, mpr in [(0.5, 1), (1.0, 2), (3.0, 4)]:
        model = build_round_model(lam, mpr)
        for s in range(mpr + 1):
            assert sum_pmf_closed_form(model, 1, s) == pytest.approx(
                model.x_pmf[s], abs=1e-12
            )


def test_two_round_example():
    model = build_round_model(1.0, 2)
    conv = np.convolve(model.x_pmf, model.x_pmf)
    assert sum_pmf_closed_form(model, 2, 2) == pytest.approx(conv[2], abs=1e-12)


def test_sum_pmf_exact_within_cap():
    for lam in (0.5, 1.0, 3.0):
        for mpr in (1, 2, 4):
            model = build_round_model(lam, mpr)
            conv = model.x_pmf.copy()
            for n in range(1, 7):
                if n > 1:
                    conv = np.convolve(conv, model.x_pmf)
                for s in range(mpr + 1):
                    assert sum_pmf_closed_form(model, n, s) == pytest.approx(
                        conv[s], abs=1e-9
                    ), (lam, mpr, n, s)


def test_sum_pmf_deviates_beyond_cap():
    # the printed form ignores the per-round cap above mpr; pin that it
    # really is invalid there so nobody mistakes it for ground truth
    model = build_round_model(3.0, 2)
    conv = np.convolve(model.x_pmf, model.x_pmf)
    err = abs(sum_pmf_closed_form(model, 2, 4) - conv[4])
    assert err > 1e-3


def test_stop_time_closed_form_exact_all_n():
    for lam, mpr, theta in [(1.0, 2, 2), (3.0, 4, 3), (0.5, 4, 4), (6.0, 10, 7)]:
        model = build_round_model(lam, mpr)
        analysis = analyze_stopped_process(model, theta)
        upto = min(len(analysis.stop_time_pmf), 20)
        for n in range(1, upto + 1):
            assert stop_time_closed_form(model, theta, n) == pytest.approx(
                analysis.stop_time_pmf[n - 1], abs=1e-9
            ), (lam, mpr, theta, n)


def test_expected_rounds_series_matches_recursion():
    for lam, mpr, theta in [(1.0, 2, 2), (3.0, 4, 3), (6.0, 10, 9)]:
        model = build_round_model(lam, mpr)
        analysis = analyze_stopped_process(model, theta)
        assert expected_rounds_closed_form(model, theta) == pytest.approx(
            analysis.expected_rounds, rel=1e-9
        )


def test_stopped_sum_closed_form_split_validity():
    model = build_round_model(2.0, 4)
    theta = 3
    analysis = analyze_stopped_process(model, theta)
    for s in range(theta, theta + 4):
        cf = stopped_sum_closed_form(model, theta, s)
        if s <= model.mpr:
            assert cf == pytest.approx(analysis.stopped_sum_pmf[s], abs=1e-9)
        else:
            assert abs(cf - analysis.stopped_sum_pmf[s]) > 1e-6
    assert stopped_sum_closed_form(model, theta, 1) == 0.0


def test_discrepancy_report_structure():
    model = build_round_model(1.0, 2)
    report = discrepancy_report(model, 2)
    assert report["sum_pmf_max_err_within_cap"] < 1e-9
    assert report["stop_time_max_err"] < 1e-9
    assert report["expected_rounds_err"] < 1e-9
    assert report["stopped_sum_max_err_within_cap"] < 1e-9
    # beyond-cap deviations exist and are measured, not hidden
    assert report["sum_pmf_max_err_beyond_cap"] > 1e-9


def test_parameter_errors():
    model = build_round_model(1.0, 2)
    with pytest.raises(ValueError):
        sum_pmf_closed_form(model, 0, 1)
    with pytest.raises(ValueError):
        sum_pmf_closed_form(model, 1, -1)
    with pytest.raises(ValueError):
        stop_time_closed_form(model, 3, 1)
    with pytest.raises(ValueError):
        expected_rounds_closed_form(model, 0)
