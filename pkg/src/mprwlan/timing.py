"""PHY/MAC parameters and derived frame/round durations.

All durations are double-precision microseconds. Control frames (RTS, CTS,
ACK) go out at the basic rate, the MAC header and payload at the data rate,
and every frame pays a fixed PHY overhead (preamble + signal field).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

__all__ = [
    "PhyMacParams",
    "DerivedTimings",
    "derive_timings",
    "default_params",
    "load_params",
]

# IEEE 802.11a-style defaults: 8184-bit payload, 6 Mbps control rate,
# 54 Mbps data rate, 20 us + 22/6 us PHY overhead per frame.
_DEFAULTS = {
    "payload_bits": 8184.0,
    "mac_header_bits": 224.0,
    "phy_overhead_us": 20.0 + 22.0 / 6.0,
    "ack_bits": 112.0,
    "rts_bits": 160.0,
    "cts_bits": 112.0,
    "basic_rate_bps": 6e6,
    "data_rate_bps": 54e6,
    "slot_us": 9.0,
    "sifs_us": 16.0,
    "difs_us": 34.0,
}


@dataclass(frozen=True)
class PhyMacParams:
    """Raw PHY/MAC constants from which every duration is derived."""

    payload_bits: float
    mac_header_bits: float
    phy_overhead_us: float
    ack_bits: float
    rts_bits: float
    cts_bits: float
    basic_rate_bps: float
    data_rate_bps: float
    slot_us: float
    sifs_us: float
    difs_us: float

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be strictly positive")
        if not self.sifs_us < self.difs_us:
            raise ValueError("sifs_us must be smaller than difs_us")


@dataclass(frozen=True)
class DerivedTimings:
    """Durations (us) entering the throughput formulas.

    ``t_rts_us`` is the cost of one contention round on top of its idle
    slots; ``b_us`` is the fixed tail of a super round (CTS, interframe
    spaces and the data slot) that does not depend on the stopping rule.
    """

    t_rts_us: float
    t_data_us: float
    b_us: float
    rts_frame_us: float
    cts_frame_us: float
    ack_frame_us: float
    header_us: float
    # carried through so downstream formulas need no second parameter object
    slot_us: float
    payload_bits: float


def derive_timings(params: PhyMacParams) -> DerivedTimings:
    """Derive all frame and round durations from raw parameters.

    Pure function; identical inputs give bit-identical outputs.
    """
    # rates in bits/us so every airtime comes out in microseconds
    basic = params.basic_rate_bps * 1e-6
    data = params.data_rate_bps * 1e-6

    rts_frame = params.rts_bits / basic + params.phy_overhead_us
    cts_frame = params.cts_bits / basic + params.phy_overhead_us
    ack_frame = params.ack_bits / basic + params.phy_overhead_us
    header = params.mac_header_bits / data + params.phy_overhead_us

    t_data = (
        header
        + params.payload_bits / data
        + ack_frame
        + params.sifs_us
        + params.difs_us
    )
    t_rts = rts_frame + params.difs_us
    b = cts_frame + 2.0 * params.sifs_us - params.difs_us + t_data
    if b <= 0:
        raise ValueError("derived super-round tail b_us must be positive")

    return DerivedTimings(
        t_rts_us=t_rts,
        t_data_us=t_data,
        b_us=b,
        rts_frame_us=rts_frame,
        cts_frame_us=cts_frame,
        ack_frame_us=ack_frame,
        header_us=header,
        slot_us=params.slot_us,
        payload_bits=params.payload_bits,
    )


def default_params() -> PhyMacParams:
    """Built-in 802.11a-style parameter set."""
    return PhyMacParams(**_DEFAULTS)


def load_params(path, overrides: dict | None = None) -> PhyMacParams:
    """Load parameters from a key-value config file.

    One ``key = value`` pair per line, ``#`` starts a comment. Keys must be
    ``PhyMacParams`` field names; unknown keys are rejected. Missing keys
    fall back to the built-in defaults. ``overrides`` (e.g. from CLI flags)
    are applied last.
    """
    values = dict(_DEFAULTS)
    valid = set(_DEFAULTS)
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, _, val = line.partition("=")
                key = key.strip()
                if key not in valid:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                try:
                    values[key] = float(val.strip())
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: value for {key!r} is not a number"
                    ) from None
    for key, val in (overrides or {}).items():
        if key not in valid:
            raise ValueError(f"unknown parameter {key!r}")
        values[key] = float(val)
    return PhyMacParams(**values)
