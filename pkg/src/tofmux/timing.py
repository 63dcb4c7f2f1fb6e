"""Quad-level frame anatomy for continuous-wave ToF cameras.

A frame is a fixed number of quads (n_quads * n_subframes), each quad
being reset -> integration -> readout -> dead time. Cycle counts are
derived in exact rational arithmetic and rounded down to whole clock
cycles; interval positions on the time axis stay exact rationals so
that overlap queries can distinguish touching from overlapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InfeasibleTiming

DEFAULT_SYS_CLOCK_HZ = 48_000_000
DEFAULT_MOD_FREQ_HZ = 24_000_000
DEFAULT_RESET_CYCLES = 768

# Fixed per-row/column costs of the readout state machine, in clock cycles.
_READOUT_BASE_CYCLES = 401


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, string or float.

    Floats go through their shortest decimal repr, so 0.28 means 7/25
    rather than the binary expansion of the IEEE double. Keeps derived
    cycle counts reproducible across languages.
    """
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        return Fraction(Decimal(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


@dataclass(frozen=True)
class CameraConfig:
    """Static acquisition parameters of one camera.

    Parameters
    ----------
    frame_rate : frames per second.
    intg_duty_cycle : fraction of a quad spent integrating, in (0, 1].
    n_col_tot, n_row : sensor dimensions driving readout cost.
    n_quads : quads per subframe, at least 3 (three correlation
        samples are the minimum for demodulation).
    n_subframes : subframes per frame.
    sys_clock_freq : system clock in Hz; all cycle counts refer to it.
    reset_cycles : per-quad reset cost in cycles.
    mod_freq : illumination modulation frequency in Hz.
    """

    frame_rate: float
    intg_duty_cycle: float
    n_col_tot: int
    n_row: int
    n_quads: int = 4
    n_subframes: int = 1
    sys_clock_freq: float = DEFAULT_SYS_CLOCK_HZ
    reset_cycles: int = DEFAULT_RESET_CYCLES
    mod_freq: float = DEFAULT_MOD_FREQ_HZ

    def __post_init__(self):
        if as_fraction(self.frame_rate) <= 0:
            raise ValueError("frame_rate must be positive")
        duty = as_fraction(self.intg_duty_cycle)
        if not 0 < duty <= 1:
            raise ValueError("intg_duty_cycle must be in (0, 1]")
        if self.n_col_tot < 1 or self.n_row < 1:
            raise ValueError("sensor dimensions must be at least 1x1")
        if self.n_quads < 3:
            raise ValueError("n_quads must be at least 3")
        if self.n_subframes < 1:
            raise ValueError("n_subframes must be at least 1")
        if as_fraction(self.sys_clock_freq) <= 0:
            raise ValueError("sys_clock_freq must be positive")
        if self.reset_cycles < 0:
            raise ValueError("reset_cycles must be non-negative")
        if as_fraction(self.mod_freq) <= 0:
            raise ValueError("mod_freq must be positive")

    @property
    def quads_per_frame(self) -> int:
        return self.n_quads * self.n_subframes

    def frame_period(self) -> Fraction:
        """Frame repetition period in seconds, exact."""
        return 1 / as_fraction(self.frame_rate)


@dataclass(frozen=True)
class QuadTiming:
    """Cycle budget of a single quad. The four phases tile it exactly."""

    t_qt: int
    t_rs: int
    t_qin: int
    t_rd: int
    t_qd: int

    def __post_init__(self):
        for name in ("t_qt", "t_rs", "t_qin", "t_rd", "t_qd"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.t_qt != self.t_rs + self.t_qin + self.t_rd + self.t_qd:
            raise ValueError("quad budget does not close")


def readout_cycles(n_col_tot: int, n_row: int) -> int:
    """Readout cost of one quad in clock cycles.

    Fixed overhead plus one cycle per column plus a quarter cycle per
    pixel; the quarter term rounds up when the pixel count is not
    divisible by four.
    """
    if n_col_tot < 1 or n_row < 1:
        raise ValueError("sensor dimensions must be at least 1x1")
    quarter = -((n_row * n_col_tot) // -4)
    return _READOUT_BASE_CYCLES + n_col_tot + quarter


def quad_cycles_from_parts(sys_clock_freq, frame_rate, n_quads, n_subframes) -> int:
    """Whole clock cycles available to one quad, rounded down."""
    clock = as_fraction(sys_clock_freq)
    rate = as_fraction(frame_rate)
    if clock <= 0 or rate <= 0 or n_quads < 1 or n_subframes < 1:
        raise ValueError("all parts must be positive")
    return math.floor(clock / (rate * n_quads * n_subframes))


def quad_total_cycles(config: CameraConfig) -> int:
    return quad_cycles_from_parts(
        config.sys_clock_freq, config.frame_rate, config.n_quads, config.n_subframes
    )


def derive_quad_timing(config: CameraConfig) -> QuadTiming:
    """Split the quad's cycle budget into reset/integration/readout/dead.

    Raises InfeasibleTiming when reset, integration and readout do not
    fit inside the quad. Integration rounds down to whole cycles.
    """
    t_qt = quad_total_cycles(config)
    t_rs = config.reset_cycles
    t_rd = readout_cycles(config.n_col_tot, config.n_row)
    t_qin = math.floor(t_qt * as_fraction(config.intg_duty_cycle))
    t_qd = t_qt - t_rs - t_qin - t_rd
    if t_qd < 0:
        raise InfeasibleTiming(
            f"quad budget short by {-t_qd} cycles "
            f"(t_qt={t_qt}, t_rs={t_rs}, t_qin={t_qin}, t_rd={t_rd})",
            deficit_cycles=-t_qd,
        )
    return QuadTiming(t_qt=t_qt, t_rs=t_rs, t_qin=t_qin, t_rd=t_rd, t_qd=t_qd)


def quad_pitch_seconds(config: CameraConfig) -> Fraction:
    """Exact spacing of quad starts: frame period over quads per frame.

    The floored cycle count t_qt can fall short of this by under one
    cycle; that remainder sits in dead time so quad starts stay on an
    exact grid across frame boundaries.
    """
    return config.frame_period() / config.quads_per_frame


def cycles_to_seconds(cycles: int, config: CameraConfig) -> Fraction:
    return Fraction(cycles) / as_fraction(config.sys_clock_freq)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint half-open intervals [start, end) in seconds.

    Construction through from_spans normalizes: empty spans dropped,
    overlapping or touching spans merged. Endpoints may be Fractions
    (exact) or floats; mixing is allowed but exactness then depends on
    the inputs.
    """

    spans: tuple

    @classmethod
    def from_spans(cls, spans: Iterable) -> "IntervalSet":
        cleaned = []
        for start, end in spans:
            if end < start:
                raise ValueError("interval end before start")
            if end > start:
                cleaned.append((start, end))
        cleaned.sort()
        merged = []
        for start, end in cleaned:
            if merged and start <= merged[-1][1]:
                if end > merged[-1][1]:
                    merged[-1] = (merged[-1][0], end)
            else:
                merged.append((start, end))
        return cls(spans=tuple(tuple(s) for s in merged))

    def __len__(self):
        return len(self.spans)

    def __iter__(self):
        return iter(self.spans)

    def total(self):
        return sum((end - start for start, end in self.spans), Fraction(0))

    def shift(self, delta) -> "IntervalSet":
        return IntervalSet(spans=tuple((s + delta, e + delta) for s, e in self.spans))

    def clip(self, window) -> "IntervalSet":
        lo, hi = window
        out = []
        for start, end in self.spans:
            s = max(start, lo)
            e = min(end, hi)
            if e > s:
                out.append((s, e))
        return IntervalSet(spans=tuple(out))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        """Pairwise intersection by merging the two sorted span lists."""
        out = []
        i = j = 0
        a, b = self.spans, other.spans
        while i < len(a) and j < len(b):
            s = max(a[i][0], b[j][0])
            e = min(a[i][1], b[j][1])
            if e > s:
                out.append((s, e))
            # advance whichever interval ends first
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(spans=tuple(out))

    def intersection_length(self, other: "IntervalSet"):
        return self.intersect(other).total()


def integration_intervals(
    config: CameraConfig,
    trigger_offset,
    window: Sequence,
    n_frames: int | None = None,
) -> IntervalSet:
    """Integration intervals of a camera stream, clipped to a window.

    The camera is triggered at trigger_offset and captures frames back
    to back from there (no pre-trigger activity). Quad k of the stream
    starts at offset + k * pitch; its integration runs from reset end
    for t_qin converted to seconds. n_frames bounds the stream length
    when given, otherwise the stream is open-ended.

    Exact when trigger_offset and window bounds are Fractions.
    """
    timing = derive_quad_timing(config)
    if timing.t_qin == 0:
        return IntervalSet(spans=())
    offset = as_fraction(trigger_offset) if not isinstance(trigger_offset, Fraction) else trigger_offset
    lo, hi = window
    if hi <= lo:
        raise ValueError("window must have positive length")
    pitch = quad_pitch_seconds(config)
    rs = cycles_to_seconds(timing.t_rs, config)
    qin = cycles_to_seconds(timing.t_qin, config)

    # conservative index range; clipping discards any extras
    first = math.floor(Fraction(lo - offset - rs - qin) / pitch) - 1
    last = math.ceil(Fraction(hi - offset - rs) / pitch) + 1
    first = max(first, 0)
    if n_frames is not None:
        last = min(last, n_frames * config.quads_per_frame - 1)
    spans = []
    for k in range(first, last + 1):
        start = offset + k * pitch + rs
        spans.append((start, start + qin))
    return IntervalSet.from_spans(spans).clip((lo, hi))
