"""Independently coded single-round throughput evaluators.

These deliberately avoid the renewal recursion: everything is a direct
closed form for the one-round stopping rule, so they can serve as oracles
for the reduction cases of the general evaluator.
"""

from __future__ import annotations

import math

from .timing import DerivedTimings

__all__ = ["single_round_throughput_pps", "spr_throughput_pps"]


def single_round_throughput_pps(lam: float, mpr: int, timings: DerivedTimings) -> float:
    """Throughput (packets/s) when contention stops at the first round with
    any winners: geometric number of rounds, payload E[X | X >= 1]."""
    if not lam > 0 or mpr < 1:
        raise ValueError("lam must be positive and mpr at least 1")
    em1 = math.expm1(lam)
    term = 1.0
    win_mass = 0.0
    mean = 0.0
    for k in range(1, mpr + 1):
        term *= lam / k
        win_mass += term / em1
        mean += k * term / em1
    rounds = 1.0 / win_mass  # 1 / (1 - p0)
    payload = mean / win_mass
    m_idle = math.exp(-lam) / (1.0 - math.exp(-lam))
    denom_us = rounds * (timings.t_rts_us + m_idle * timings.slot_us) + timings.b_us
    return payload / denom_us * 1e6


def spr_throughput_pps(lam: float, timings: DerivedTimings) -> float:
    """Classic single-packet-reception RTS/CTS throughput (packets/s)."""
    p1 = lam / math.expm1(lam)
    m_idle = math.exp(-lam) / (1.0 - math.exp(-lam))
    rounds = 1.0 / p1
    denom_us = rounds * (timings.t_rts_us + m_idle * timings.slot_us) + timings.b_us
    return 1.0 / denom_us * 1e6
