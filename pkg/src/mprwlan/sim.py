"""Monte Carlo engines: i.i.d. episode sampler and full slotted DCF.

The episode sampler draws the abstract stopping process (idle slots, winner
counts, threshold stop) straight from its law and is the validation oracle
for the analytic pipeline. The DCF engine simulates K stations with
exponential backoff, multipacket reception, accumulation of winners across
contention rounds, uniform winner selection and virtual collisions; it
exists to test the Poisson attempt model itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contention import RoundModel
from .timing import DerivedTimings

__all__ = ["SimReport", "DcfConfig", "sample_stopping_episodes", "run_dcf"]

_N_BATCHES = 32


@dataclass(frozen=True)
class SimReport:
    """Empirical throughput and per-super-round statistics of one run."""

    throughput_pps: float
    throughput_mbps: float
    measured_lambda: float
    mean_rounds_per_super_round: float
    mean_payload_per_super_round: float
    num_super_rounds: int
    standard_error_pps: float
    se_rounds: float
    se_payload: float


def _ratio_batch_se(payload, duration_us):
    """Standard error of the ratio-of-means throughput via batch means."""
    ratios = []
    for pb, db in zip(
        np.array_split(payload, _N_BATCHES), np.array_split(duration_us, _N_BATCHES)
    ):
        if len(pb) and db.sum() > 0:
            ratios.append(pb.sum() / db.sum() * 1e6)
    ratios = np.asarray(ratios)
    if len(ratios) < 2:
        return 0.0
    return float(ratios.std(ddof=1) / np.sqrt(len(ratios)))


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return float(x.mean()) if len(x) else 0.0, 0.0
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(len(x)))


def sample_stopping_episodes(
    model: RoundModel,
    theta: int,
    episodes: int,
    seed: int,
    timings: DerivedTimings,
) -> SimReport:
    """Sample complete super rounds of the abstract stopping process.

    Each episode draws geometric idle-slot counts and i.i.d. winner counts
    per round until the cumulative winners reach ``theta``; payload is the
    capped total. Throughput is the ratio-of-means estimator (total payload
    over total duration), matching the renewal-reward definition, not the
    mean of per-episode ratios. ``measured_lambda`` is the model rate: this
    engine samples the round law directly and has no attempt process.
    """
    if not 1 <= theta <= model.mpr:
        raise ValueError(f"theta must be in 1..{model.mpr}")
    if episodes < 1:
        raise ValueError("episodes must be at least 1")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(model.x_pmf)
    p_busy = 1.0 - model.p_idle

    cum = np.zeros(episodes, dtype=np.int64)
    rounds = np.zeros(episodes, dtype=np.int64)
    idle = np.zeros(episodes, dtype=np.int64)
    alive = np.arange(episodes)
    while alive.size:
        x = np.searchsorted(cdf, rng.random(alive.size), side="right")
        idle[alive] += rng.geometric(p_busy, alive.size) - 1
        cum[alive] += x
        rounds[alive] += 1
        alive = alive[cum[alive] < theta]

    payload = np.minimum(cum, model.mpr).astype(float)
    duration = (
        rounds * timings.t_rts_us + idle * timings.slot_us + timings.b_us
    )
    pps = payload.sum() / duration.sum() * 1e6
    mean_rounds, se_rounds = _mean_se(rounds)
    mean_payload, se_payload = _mean_se(payload)
    return SimReport(
        throughput_pps=pps,
        throughput_mbps=pps * timings.payload_bits * 1e-6,
        measured_lambda=model.lam,
        mean_rounds_per_super_round=mean_rounds,
        mean_payload_per_super_round=mean_payload,
        num_super_rounds=episodes,
        standard_error_pps=_ratio_batch_se(payload, duration),
        se_rounds=se_rounds,
        se_payload=se_payload,
    )


@dataclass(frozen=True)
class DcfConfig:
    """Slotted DCF run configuration (saturation traffic: every station
    always has a packet queued)."""

    num_stations: int
    mpr_capability: int
    theta: int
    min_window: int = 16
    backoff_factor: float = 2.0
    max_backoff_stage: int | None = None  # None: pure geometric window growth
    warmup_slots: int = 5000
    measured_slots: int = 100_000
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_stations < 1:
            raise ValueError("num_stations must be at least 1")
        if self.min_window < 1:
            raise ValueError("min_window must be at least 1")
        if self.backoff_factor < 1:
            raise ValueError("backoff_factor must be at least 1")
        if not 1 <= self.theta <= self.mpr_capability:
            raise ValueError("theta must be in 1..mpr_capability")
        if self.warmup_slots < 0 or self.measured_slots < 1:
            raise ValueError("slot counts must be positive")


def _windows(cfg: DcfConfig, stage: np.ndarray) -> np.ndarray:
    if cfg.max_backoff_stage is not None:
        stage = np.minimum(stage, cfg.max_backoff_stage)
    w = np.floor(cfg.min_window * cfg.backoff_factor**stage).astype(np.int64)
    return np.maximum(w, 1)


def run_dcf(config: DcfConfig, timings: DerivedTimings) -> SimReport:
    """Slot-by-slot DCF simulation with multi-round contention.

    Stations decrement backoff on idle slots and transmit an RTS at zero.
    A round with 1..mpr transmitters makes them winning stations (they
    freeze for the rest of the super round); with more than mpr all collide
    and back off. Once the accumulated winners reach theta the access point
    closes the super round: min(winners, mpr) stations are selected
    uniformly at random for data transmission and reset to stage 0, the
    rest take a virtual collision. Time follows the analytic clock: sigma
    per idle slot, one RTS-round cost per contention round, and the fixed
    tail for the closing CTS/data/ACK exchange.
    """
    rng = np.random.default_rng(config.rng_seed)
    k = config.num_stations
    mpr = config.mpr_capability

    stage = np.zeros(k, dtype=np.int64)
    counter = rng.integers(0, config.min_window, size=k)
    winner = np.zeros(k, dtype=bool)

    total_slots = config.warmup_slots + config.measured_slots
    slots = 0
    attempts = 0
    measured_slot_count = 0

    sr_payload: list[float] = []
    sr_duration: list[float] = []
    sr_rounds: list[int] = []
    cur_duration = 0.0
    cur_rounds = 0
    collecting = slots >= config.warmup_slots

    def redraw(idx):
        w = _windows(config, stage[idx])
        counter[idx] = np.floor(rng.random(idx.size) * w).astype(np.int64)

    while slots < total_slots:
        active = ~winner
        tx = active & (counter == 0)
        ntx = int(tx.sum())
        if ntx == 0:
            # jump over the idle stretch until the next countdown expiry
            span = int(counter[active].min())
            span = min(span, total_slots - slots)
            in_window = max(0, slots + span - max(slots, config.warmup_slots))
            measured_slot_count += in_window
            counter[active] -= span
            cur_duration += span * timings.slot_us
            slots += span
            continue

        # one busy generic slot: a contention round takes place
        if slots >= config.warmup_slots:
            attempts += ntx
            measured_slot_count += 1
        slots += 1
        cur_rounds += 1
        cur_duration += timings.t_rts_us

        tx_idx = np.flatnonzero(tx)
        if ntx > mpr:
            stage[tx_idx] += 1
            redraw(tx_idx)
            continue

        winner[tx_idx] = True
        win_idx = np.flatnonzero(winner)
        if win_idx.size < config.theta:
            continue

        # super round closes: select data transmitters, others back off
        cur_duration += timings.b_us
        nsel = min(win_idx.size, mpr)
        selected = rng.choice(win_idx, size=nsel, replace=False)
        unselected = np.setdiff1d(win_idx, selected)
        stage[selected] = 0
        redraw(selected)
        if unselected.size:
            stage[unselected] += 1
            redraw(unselected)
        winner[:] = False

        if collecting:
            sr_payload.append(float(nsel))
            sr_duration.append(cur_duration)
            sr_rounds.append(cur_rounds)
        cur_duration = 0.0
        cur_rounds = 0
        collecting = slots >= config.warmup_slots

    payload = np.asarray(sr_payload)
    duration = np.asarray(sr_duration)
    total_time = duration.sum()
    pps = payload.sum() / total_time * 1e6 if total_time > 0 else 0.0
    mean_rounds, se_rounds = _mean_se(sr_rounds)
    mean_payload, se_payload = _mean_se(payload)
    return SimReport(
        throughput_pps=pps,
        throughput_mbps=pps * timings.payload_bits * 1e-6,
        measured_lambda=attempts / measured_slot_count if measured_slot_count else 0.0,
        mean_rounds_per_super_round=mean_rounds,
        mean_payload_per_super_round=mean_payload,
        num_super_rounds=len(sr_payload),
        standard_error_pps=_ratio_batch_se(payload, duration),
        se_rounds=se_rounds,
        se_payload=se_payload,
    )
