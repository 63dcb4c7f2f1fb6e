"""Quad-level TDMA: slot assignment and exact overlap verification.

Cameras sharing a config can interleave their integration windows
inside the quad because integration occupies only a duty-cycle
fraction of it. Capacity is floor(t_qt / t_qin); camera k triggers
t_qin later than camera k-1. Verification intersects the actual
integration interval trains, so it accepts heterogeneous configs too.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import CapacityExceeded
from .timing import (
    CameraConfig,
    QuadTiming,
    as_fraction,
    cycles_to_seconds,
    derive_quad_timing,
    integration_intervals,
)


@dataclass(frozen=True)
class Schedule:
    """Per-camera trigger offsets, exact, for a shared camera config."""

    config: CameraConfig
    offsets: tuple  # Fractions, seconds
    slot_cycles: int

    @property
    def n_cameras(self) -> int:
        return len(self.offsets)

    def offsets_seconds(self) -> tuple:
        return tuple(float(off) for off in self.offsets)

    def offset_cycles(self) -> tuple:
        """Offsets in whole clock cycles; exact by construction."""
        clock = as_fraction(self.config.sys_clock_freq)
        return tuple(int(off * clock) for off in self.offsets)


@dataclass(frozen=True)
class PairwiseOverlapReport:
    """Integration overlap per camera pair over a common window."""

    window: tuple
    pair_overlap: dict  # (i, j) -> Fraction seconds, i < j

    @property
    def valid(self) -> bool:
        return all(v == 0 for v in self.pair_overlap.values())

    def worst_pair(self):
        if not self.pair_overlap:
            return None
        return max(self.pair_overlap.items(), key=lambda item: item[1])


def max_cameras(timing: QuadTiming) -> int:
    """How many cameras fit one quad at this timing."""
    if timing.t_qin <= 0:
        raise ValueError("t_qin must be positive to define capacity")
    return timing.t_qt // timing.t_qin


def assign_shifts(config: CameraConfig, n_cameras: int) -> Schedule:
    """Deterministic slot assignment: camera k starts k * t_qin later.

    Raises CapacityExceeded (carrying the bound) when n_cameras exceeds
    floor(t_qt / t_qin). The returned offsets verify to exactly zero
    pairwise integration overlap.
    """
    if n_cameras < 1:
        raise ValueError("n_cameras must be at least 1")
    timing = derive_quad_timing(config)
    bound = max_cameras(timing)
    if n_cameras > bound:
        raise CapacityExceeded(
            f"{n_cameras} cameras requested but only {bound} integration "
            f"slots fit (t_qt={timing.t_qt}, t_qin={timing.t_qin})",
            bound=bound,
            requested=n_cameras,
        )
    slot = cycles_to_seconds(timing.t_qin, config)
    offsets = tuple(k * slot for k in range(n_cameras))
    return Schedule(config=config, offsets=offsets, slot_cycles=timing.t_qin)


def pairwise_overlap(
    config_a: CameraConfig,
    config_b: CameraConfig,
    offset_a,
    offset_b,
    window: Optional[tuple] = None,
) -> Fraction:
    """Exact integration-on-integration overlap over a window, seconds.

    Only integration can collide; illumination is off during reset,
    readout and dead time. The window defaults to one frame of camera a
    starting at the later trigger, which is the steady state for
    equal-rate cameras.
    """
    off_a = as_fraction(offset_a)
    off_b = as_fraction(offset_b)
    if window is None:
        start = max(off_a, off_b)
        window = (start, start + config_a.frame_period())
    ints_a = integration_intervals(config_a, off_a, window)
    ints_b = integration_intervals(config_b, off_b, window)
    return ints_a.intersection_length(ints_b)


def verify_schedule(
    schedule_or_cameras,
    window: Optional[tuple] = None,
) -> PairwiseOverlapReport:
    """Check a schedule (or explicit (config, offset) list) pair by pair.

    Valid means every pair overlaps for exactly zero seconds.
    """
    if isinstance(schedule_or_cameras, Schedule):
        cameras = [
            (schedule_or_cameras.config, off) for off in schedule_or_cameras.offsets
        ]
    else:
        cameras = [(cfg, as_fraction(off)) for cfg, off in schedule_or_cameras]
    if window is None:
        start = max(off for _, off in cameras)
        period = max(cfg.frame_period() for cfg, _ in cameras)
        window = (start, start + period)
    report = {}
    for i in range(len(cameras)):
        for j in range(i + 1, len(cameras)):
            cfg_i, off_i = cameras[i]
            cfg_j, off_j = cameras[j]
            report[(i, j)] = pairwise_overlap(cfg_i, cfg_j, off_i, off_j, window)
    return PairwiseOverlapReport(window=tuple(window), pair_overlap=report)
