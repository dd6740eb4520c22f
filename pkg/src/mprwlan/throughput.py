"""Renewal-reward throughput, bounds, and joint (lam, theta) optimization.

Throughput is the ratio of the expected payload per super round to the
expected super-round duration: contention rounds cost t_rts plus their
idle slots, and the fixed tail b covers CTS, interframe spaces and the
data slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contention import RoundModel, build_round_model, expected_winners, stopped_sum_stats
from .timing import DerivedTimings

__all__ = [
    "ThroughputPoint",
    "OptimizationResult",
    "evaluate_throughput",
    "throughput_profile",
    "lower_bound",
    "carryover_upper_bound",
    "optimize",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ThroughputPoint:
    lam: float
    theta: int
    expected_payload_packets: float
    expected_rounds: float
    throughput_pps: float
    throughput_mbps: float


@dataclass(frozen=True)
class OptimizationResult:
    """Jointly optimized operating point plus the analytic bounds."""

    best: ThroughputPoint
    lambda_grid_info: dict
    theta_star: int
    s_star: float
    b_l_star: float
    s_c_star: float
    lambda_c_star: float
    b_l_lambda_star: float


def _round_cost_us(model: RoundModel, timings: DerivedTimings) -> float:
    return timings.t_rts_us + model.mean_idle_slots * timings.slot_us


def _point(model, theta, payload, rounds, timings) -> ThroughputPoint:
    denom_us = rounds * _round_cost_us(model, timings) + timings.b_us
    pps = payload / denom_us * 1e6
    return ThroughputPoint(
        lam=model.lam,
        theta=theta,
        expected_payload_packets=payload,
        expected_rounds=rounds,
        throughput_pps=pps,
        throughput_mbps=pps * timings.payload_bits * 1e-6,
    )


def evaluate_throughput(
    model: RoundModel, theta: int, timings: DerivedTimings
) -> ThroughputPoint:
    """Throughput at a given attempt rate and stopping threshold."""
    rounds, payload, _ = stopped_sum_stats(model, theta)
    return _point(model, theta, payload, rounds, timings)


def throughput_profile(model: RoundModel, timings: DerivedTimings) -> np.ndarray:
    """S(lam, theta) in packets/s for every theta = 1..mpr, in one pass.

    Shares the visit-weight recursion across thresholds, which makes
    parameter sweeps cheap.
    """
    from .contention import visit_weights

    mpr = model.mpr
    g = visit_weights(model, mpr)
    cost = _round_cost_us(model, timings)
    out = np.empty(mpr)
    cum_rounds = 0.0
    for theta in range(1, mpr + 1):
        cum_rounds += g[theta - 1]
        stopped = np.convolve(g[:theta], model.x_pmf[1:])[theta - 1 : theta - 1 + mpr]
        s_vals = np.arange(theta, theta + mpr)
        payload = float(np.minimum(s_vals, mpr) @ stopped)
        out[theta - 1] = payload / (cum_rounds * cost + timings.b_us) * 1e6
    return out


def lower_bound(model: RoundModel, timings: DerivedTimings) -> ThroughputPoint:
    """Throughput of the blunt rule theta = mpr (payload exactly mpr)."""
    return evaluate_throughput(model, model.mpr, timings)


def carryover_upper_bound(model: RoundModel, timings: DerivedTimings) -> ThroughputPoint:
    """Idealized bound where unselected winners persist to the next super
    round: no contention effort is wasted, so rounds per super round drop
    to mpr / E[winners per round]."""
    ex = expected_winners(model)
    rounds = model.mpr / ex
    return _point(model, model.mpr, float(model.mpr), rounds, timings)


def _golden_max(f, lo, hi, tol):
    """Deterministic golden-section maximization of a unimodal-ish f."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
    x = 0.5 * (a + b)
    return x, f(x)


def _grid_then_refine(f, grid, tol):
    """Coarse argmax over grid, then golden-section refinement around it.

    Ties on the grid break toward the smaller lam.
    """
    vals = [f(x) for x in grid]
    i = int(np.argmax(vals))
    lo = grid[max(0, i - 1)]
    hi = grid[min(len(grid) - 1, i + 1)]
    x_ref, v_ref = _golden_max(f, lo, hi, tol)
    if v_ref > vals[i]:
        return x_ref, v_ref
    return float(grid[i]), vals[i]


def optimize(
    mpr: int,
    timings: DerivedTimings,
    lambda_range: tuple[float, float] = (0.05, 30.0),
    lambda_resolution: float = 0.05,
    refine_tol: float = 1e-4,
) -> OptimizationResult:
    """Jointly optimize the attempt rate and the stopping threshold.

    Coarse lam grid at ``lambda_resolution`` with theta swept 1..mpr at each
    point, then golden-section refinement of lam around the incumbent with
    theta re-optimized per probe. Also reports the best theta=mpr lower
    bound and the carry-over upper bound at its own optimal rate.
    Deterministic: ties break toward smaller lam, then smaller theta.
    """
    lo, hi = lambda_range
    if not (0.0 < lo < hi <= 200.0):
        raise ValueError("lambda_range must satisfy 0 < lo < hi <= 200")
    if lambda_resolution <= 0:
        raise ValueError("lambda_resolution must be positive")
    if mpr < 1:
        raise ValueError("mpr must be at least 1")

    grid = np.arange(lo, hi + 1e-12, lambda_resolution)

    def best_over_theta(lam):
        prof = throughput_profile(build_round_model(lam, mpr), timings)
        theta = int(np.argmax(prof)) + 1  # argmax takes the smallest theta on ties
        return prof[theta - 1], theta

    lam_star, s_star = _grid_then_refine(lambda l: best_over_theta(l)[0], grid, refine_tol)
    _, theta_star = best_over_theta(lam_star)

    def bl(lam):
        return lower_bound(build_round_model(lam, mpr), timings).throughput_pps

    bl_lam_star, b_l_star = _grid_then_refine(bl, grid, refine_tol)

    def sc(lam):
        return carryover_upper_bound(build_round_model(lam, mpr), timings).throughput_pps

    lam_c_star, s_c_star = _grid_then_refine(sc, grid, refine_tol)

    best = evaluate_throughput(build_round_model(lam_star, mpr), theta_star, timings)
    return OptimizationResult(
        best=best,
        lambda_grid_info={
            "lambda_range": (float(lo), float(hi)),
            "lambda_resolution": float(lambda_resolution),
            "refine_tol": float(refine_tol),
            "grid_points": int(len(grid)),
        },
        theta_star=theta_star,
        s_star=best.throughput_pps,
        b_l_star=b_l_star,
        s_c_star=s_c_star,
        lambda_c_star=lam_c_star,
        b_l_lambda_star=bl_lam_star,
    )
