"""Printed closed-form expressions for the stopped-process distributions.

These are cross-check oracles only: the renewal recursion in
:mod:`mprwlan.contention` is the ground truth. The closed forms below
evaluate the published-style combinatorial expressions directly, with the
infinite attempt tail always taken as the closed complement
e^lam - sum_{j<=mpr} lam^j/j!.

Domain of validity, established numerically and by inspecting the
underlying induction: the n-round sum form and the stopped-sum form drop
the per-round winner cap for totals above mpr, so they are exact only for
totals s <= mpr (and s = 0). The stopping-time form and the
expected-rounds series only ever use totals below theta <= mpr and are
exact everywhere. :func:`discrepancy_report` quantifies the deviations.

Evaluation uses mpmath: the alternating binomial sums cancel catastrophically
in double precision once the series index grows.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np

from .contention import RoundModel, analyze_stopped_process, stopped_sum_stats

__all__ = [
    "sum_pmf_closed_form",
    "stop_time_closed_form",
    "expected_rounds_closed_form",
    "stopped_sum_closed_form",
    "discrepancy_report",
]


def _with_dps(extra):
    return mp.workdps(60 + extra)


def _tail(lam, mpr):
    """sum_{j > mpr} lam^j / j! as the closed complement."""
    lam = mp.mpf(lam)
    partial = mp.fsum(lam**j / mp.factorial(j) for j in range(mpr + 1))
    return mp.e**lam - partial


def _upper(lam, lo, hi):
    """sum_{i = lo..hi} lam^i / i!"""
    lam = mp.mpf(lam)
    return mp.fsum(lam**i / mp.factorial(i) for i in range(lo, hi + 1))


def sum_pmf_closed_form(model: RoundModel, n: int, s: int) -> float:
    """Closed-form Pr{sum of n rounds of winners = s}.

    Exact for s = 0 and 1 <= s <= mpr; above mpr it ignores the per-round
    cap and overestimates (see module docstring).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if s < 0:
        raise ValueError("s must be nonnegative")
    with _with_dps(2 * n + s):
        lam = mp.mpf(model.lam)
        q = _tail(lam, model.mpr)
        em1 = mp.expm1(lam)
        if s == 0:
            return float((q / em1) ** n)
        inner = mp.fsum(
            mp.binomial(n, l) * (q - 1) ** (n - l) * mp.mpf(l) ** s
            for l in range(1, n + 1)
        )
        return float(lam**s / mp.factorial(s) / em1**n * inner)


def stop_time_closed_form(model: RoundModel, theta: int, n: int) -> float:
    """Closed-form Pr{contention stops after exactly n rounds}.

    Exact for all n (its building blocks only involve running totals below
    theta, where the n-round sum form is valid).
    """
    if not 1 <= theta <= model.mpr:
        raise ValueError(f"theta must be in 1..{model.mpr}")
    if n < 1:
        raise ValueError("n must be at least 1")
    with _with_dps(2 * n + theta):
        lam = mp.mpf(model.lam)
        em1 = mp.expm1(lam)
        if n == 1:
            return float(_upper(lam, theta, model.mpr) / em1)
        q = _tail(lam, model.mpr)
        first = _upper(lam, theta, model.mpr) / em1**n * q ** (n - 1)
        second = mp.mpf(0)
        for s in range(1, theta):
            reach = _upper(lam, theta - s, model.mpr)
            inner = mp.fsum(
                mp.binomial(n - 1, l) * (q - 1) ** (n - 1 - l) * mp.mpf(l) ** s
                for l in range(1, n)
            )
            second += reach * lam**s / mp.factorial(s) * inner
        return float(first + second / em1**n)


def expected_rounds_closed_form(
    model: RoundModel, theta: int, tol: float = 1e-12, max_terms: int = 400
) -> float:
    """Series form of the mean number of contention rounds before stopping.

    Truncated once successive terms fall below ``tol`` relative to the
    partial sum; raises if ``max_terms`` is hit first (slow geometric decay,
    i.e. a large zero-winner probability).
    """
    if not 1 <= theta <= model.mpr:
        raise ValueError(f"theta must be in 1..{model.mpr}")
    with _with_dps(2 * max_terms):
        lam = mp.mpf(model.lam)
        em1 = mp.expm1(lam)
        q = _tail(lam, model.mpr)
        p0 = q / em1
        total = _upper(lam, theta, model.mpr) / em1 / (1 - p0) ** 2

        for n in range(1, max_terms + 1):
            # sum over l with the l^s factor folded into the final-jump weight
            acc = mp.mpf(0)
            for l in range(1, n + 1):
                wsum = mp.fsum(
                    lam**k
                    / mp.factorial(k)
                    * mp.fsum(
                        lam**s * mp.mpf(l) ** s / mp.factorial(s)
                        for s in range(max(theta - k, 1), theta)
                    )
                    for k in range(1, model.mpr + 1)
                )
                acc += mp.binomial(n, l) * (q - 1) ** (n - l) * wsum
            term = (n + 1) / em1 ** (n + 1) * acc
            total += term
            if abs(term) < tol * abs(total) and n > 3:
                return float(total)
        raise ArithmeticError(
            "expected-rounds series did not converge within max_terms"
        )


def stopped_sum_closed_form(
    model: RoundModel, theta: int, s: int, tol: float = 1e-12, max_terms: int = 400
) -> float:
    """Closed-form Pr{stopped winner total = s}, s >= theta.

    Exact for theta <= s <= mpr; for s > mpr it keeps Poisson-style mass for
    final jumps larger than the cap and overestimates.
    """
    if not 1 <= theta <= model.mpr:
        raise ValueError(f"theta must be in 1..{model.mpr}")
    if s < theta:
        return 0.0
    with _with_dps(2 * max_terms + s):
        lam = mp.mpf(model.lam)
        em1 = mp.expm1(lam)
        q = _tail(lam, model.mpr)
        base = lam**s / mp.factorial(s) / em1
        # all paths whose running total stays at 0 until the final jump
        bracket = em1 / _upper(lam, 1, model.mpr)
        if theta > 1:
            for n in range(1, max_terms + 1):
                inner = mp.fsum(
                    mp.binomial(n, l)
                    * (q - 1) ** (n - l)
                    * mp.fsum(
                        mp.binomial(s, t) * mp.mpf(l) ** t for t in range(1, theta)
                    )
                    for l in range(1, n + 1)
                )
                term = inner / em1**n
                bracket += term
                if abs(term) < tol * abs(bracket) and n > 3:
                    break
            else:
                raise ArithmeticError(
                    "stopped-sum series did not converge within max_terms"
                )
        return float(base * bracket)


def discrepancy_report(model: RoundModel, theta: int) -> dict:
    """Measure closed forms against the renewal recursion.

    Returns per-quantity maximum absolute deviations, split at the winner
    cap where the sum/stopped-sum forms lose validity.
    """
    mpr = model.mpr
    analysis = analyze_stopped_process(model, theta)

    # n-round sum vs n-fold convolution
    conv = model.x_pmf.copy()
    sum_in, sum_out = 0.0, 0.0
    for n in range(1, 7):
        if n > 1:
            conv = np.convolve(conv, model.x_pmf)
        for s in range(n * mpr + 1):
            err = abs(sum_pmf_closed_form(model, n, s) - conv[s])
            if s <= mpr:
                sum_in = max(sum_in, err)
            else:
                sum_out = max(sum_out, err)

    stop_err = max(
        abs(stop_time_closed_form(model, theta, n) - analysis.stop_time_pmf[n - 1])
        for n in range(1, min(len(analysis.stop_time_pmf), 25) + 1)
    )

    rounds_err = abs(
        expected_rounds_closed_form(model, theta) - analysis.expected_rounds
    )

    stopped_in, stopped_out = 0.0, 0.0
    for s in range(theta, theta + mpr):
        err = abs(
            stopped_sum_closed_form(model, theta, s) - analysis.stopped_sum_pmf[s]
        )
        if s <= mpr:
            stopped_in = max(stopped_in, err)
        else:
            stopped_out = max(stopped_out, err)

    return {
        "sum_pmf_max_err_within_cap": sum_in,
        "sum_pmf_max_err_beyond_cap": sum_out,
        "stop_time_max_err": stop_err,
        "expected_rounds_err": rounds_err,
        "stopped_sum_max_err_within_cap": stopped_in,
        "stopped_sum_max_err_beyond_cap": stopped_out,
    }
