"""Exact per-round and stopped-process contention statistics.

One contention round is a non-idle generic slot: with Poisson(lam) attempts
conditioned on at least one, k <= mpr simultaneous requests all win and more
than mpr win nothing. The stopped process accumulates winners round by round
until the running total reaches a threshold theta. Distributions of the
stopping time and the stopped total are computed by an exact renewal
recursion over the running total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RoundModel",
    "ContentionAnalysis",
    "build_round_model",
    "expected_winners",
    "analyze_stopped_process",
    "visit_weights",
]

_PMF_TOL = 1e-12


@dataclass(frozen=True)
class RoundModel:
    """Probabilistic model of a single contention round at attempt rate lam.

    ``x_pmf[k]`` is the probability of k winners in a round, k = 0..mpr;
    ``p_idle`` the probability a generic slot is idle; ``mean_idle_slots``
    the mean number of idle slots preceding a round (geometric law).
    """

    lam: float
    mpr: int
    x_pmf: np.ndarray
    p_idle: float
    mean_idle_slots: float

    def __post_init__(self):
        pmf = np.asarray(self.x_pmf, dtype=float)
        if pmf.shape != (self.mpr + 1,):
            raise ValueError("x_pmf must have one entry per winner count 0..mpr")
        if np.any(pmf < 0):
            raise ValueError("x_pmf entries must be nonnegative")
        if abs(pmf.sum() - 1.0) > _PMF_TOL:
            raise ValueError("x_pmf must sum to 1")
        object.__setattr__(self, "x_pmf", pmf)


def build_round_model(lam: float, mpr: int) -> RoundModel:
    """Construct the winner-count law for attempt rate ``lam`` and cap ``mpr``.

    Pr{k winners} = lam^k / (k! (e^lam - 1)) for 1 <= k <= mpr; the zero
    (collision) mass is the closed complement 1 - sum of the others, never a
    truncated infinite series.
    """
    if not lam > 0:
        raise ValueError("lam must be strictly positive")
    if mpr < 1:
        raise ValueError("mpr must be at least 1")
    pmf = np.zeros(mpr + 1)
    denom = math.expm1(lam)
    term = 1.0
    for k in range(1, mpr + 1):
        term *= lam / k  # lam^k / k! by multiplicative recurrence
        pmf[k] = term / denom
    pmf[0] = max(0.0, 1.0 - pmf[1:].sum())
    p_idle = math.exp(-lam)
    return RoundModel(
        lam=lam,
        mpr=mpr,
        x_pmf=pmf,
        p_idle=p_idle,
        mean_idle_slots=p_idle / (1.0 - p_idle),
    )


def expected_winners(model: RoundModel) -> float:
    """Mean number of winners per contention round."""
    k = np.arange(model.mpr + 1)
    return float(k @ model.x_pmf)


def visit_weights(model: RoundModel, theta: int) -> np.ndarray:
    """Expected number of rounds spent at each running total 0..theta-1.

    Renewal recursion: the chain starts at total 0, each round adds X
    winners, and conditioning on eventually leaving a state divides by
    (1 - p0). The weights depend on the pmf only, so ``visit_weights(m, t)``
    is a prefix of ``visit_weights(m, t')`` for t < t'.
    """
    _check_theta(model, theta)
    p = model.x_pmf
    p0 = p[0]
    g = np.zeros(theta)
    g[0] = 1.0 / (1.0 - p0)
    for t in range(1, theta):
        # sum over the last jump x = 1..min(t, mpr)
        x_max = min(t, model.mpr)
        acc = float(np.dot(g[t - x_max : t][::-1], p[1 : x_max + 1]))
        g[t] = acc / (1.0 - p0)
    return g


@dataclass(frozen=True)
class ContentionAnalysis:
    """Distributions of the stopped contention process at threshold theta.

    ``stopped_sum_pmf[s]`` is Pr{stopped total = s} for s = 0..theta-1+mpr
    (zero below theta); ``stop_time_pmf[n-1]`` is Pr{stopping after exactly
    n rounds}, truncated once the residual mass drops below
    ``stop_time_residual``.
    """

    theta: int
    visit_weights: np.ndarray
    stop_time_pmf: np.ndarray
    expected_rounds: float
    stopped_sum_pmf: np.ndarray
    expected_payload: float
    stop_time_residual: float


def _check_theta(model: RoundModel, theta: int) -> None:
    if not 1 <= theta <= model.mpr:
        raise ValueError(f"theta must be in 1..{model.mpr}, got {theta}")


def stopped_sum_stats(model: RoundModel, theta: int):
    """Fast path: (expected_rounds, expected_payload, stopped_sum_pmf).

    Shares the renewal recursion with :func:`analyze_stopped_process` but
    skips the round-by-round stopping-time iteration, which sweeps over
    lam and theta do not need.
    """
    g = visit_weights(model, theta)
    expected_rounds = float(g.sum())
    # stopped total s needs a visit at t < theta followed by a jump s - t
    full = np.zeros(theta + model.mpr)
    full[1:] = np.convolve(g, model.x_pmf[1:])
    full[:theta] = 0.0
    s = np.arange(theta + model.mpr)
    expected_payload = float(np.minimum(s, model.mpr) @ full)
    return expected_rounds, expected_payload, full


def analyze_stopped_process(
    model: RoundModel,
    theta: int,
    residual_tol: float = 1e-12,
    max_rounds: int = 1_000_000,
) -> ContentionAnalysis:
    """Full analysis of the stopped process at threshold ``theta``.

    The stopping-time pmf is obtained by iterating the sub-stochastic kernel
    on the running-total states 0..theta-1; iteration stops when the
    surviving mass falls below ``residual_tol`` (or at ``max_rounds``, with
    the leftover mass reported in ``stop_time_residual``).
    """
    _check_theta(model, theta)
    expected_rounds, expected_payload, stopped_pmf = stopped_sum_stats(model, theta)

    p = model.x_pmf
    state = np.zeros(theta)
    state[0] = 1.0
    stop_probs = []
    for _ in range(max_rounds):
        nxt = np.convolve(state, p)
        stopped = float(nxt[theta:].sum())
        nxt = nxt[:theta]
        stop_probs.append(stopped)
        remaining = float(nxt.sum())
        if remaining < residual_tol:
            break
        state = nxt

    return ContentionAnalysis(
        theta=theta,
        visit_weights=visit_weights(model, theta),
        stop_time_pmf=np.array(stop_probs),
        expected_rounds=expected_rounds,
        stopped_sum_pmf=stopped_pmf,
        expected_payload=expected_payload,
        stop_time_residual=remaining,
    )
