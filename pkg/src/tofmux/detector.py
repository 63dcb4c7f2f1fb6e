"""Interference detection and avoidance built on saturated-pixel counts.

Saturated pixels are the observable footprint of quad overlap: a depth
camera cannot tell interference from signal inside a bucket, but the
count of clipped pixels rises sharply while another camera's
integration shares the quad. Everything here consumes simulated frames
plus camera metadata; nothing reads simulator ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import signal as sig
from .errors import (
    InsufficientFrames,
    NoCommonValidPixels,
    RateMismatch,
)
from .simulator import Scenario, SimFrame, simulate_stream
from .timing import (
    CameraConfig,
    as_fraction,
    cycles_to_seconds,
    derive_quad_timing,
    integration_intervals,
    quad_pitch_seconds,
)

SWEEP_STEP_DEFAULT = Fraction(1, 1000)  # 1 ms
SWEEP_BURST_FRAMES = 3
_SWEEP_WARMUP_FRAMES = 2


def count_saturated(frame: SimFrame) -> int:
    return int(frame.saturation_mask.sum())


def predict_free_shifts(config: CameraConfig, n_cameras: int = 2):
    """Closed-form trigger shifts with zero integration overlap.

    Returns intervals (lo, hi) of the extra trigger delay for one more
    camera, within [0, quad pitch) and periodic with the pitch, when
    n_cameras - 1 cameras already occupy the deterministic slots
    k * t_qin. Inclusive endpoints: touching integration windows do not
    overlap. Empty when the duty cycle leaves no room (over 50% for a
    pair). Exact rational endpoints, seconds.
    """
    if n_cameras < 2:
        raise ValueError("n_cameras must be at least 2")
    timing = derive_quad_timing(config)
    pitch = quad_pitch_seconds(config)
    qin = cycles_to_seconds(timing.t_qin, config)
    lo = (n_cameras - 1) * qin
    hi = pitch - qin
    if lo > hi:
        return []
    return [(lo, hi)]


@dataclass(frozen=True)
class ShiftSweepResult:
    """Outcome of stepping one camera's trigger across a frame period."""

    shifts: tuple  # Fractions, seconds
    saturated_counts: tuple  # mean count over the burst, per shift
    normalized_counts: tuple  # counts over the sweep maximum
    mci_free_shifts: tuple  # shifts whose count ties the sweep minimum
    tie_tolerance: float
    baseline_count: float  # single-camera reference count


def sweep_shifts(
    scenario: Scenario,
    step=SWEEP_STEP_DEFAULT,
    burst_frames: int = SWEEP_BURST_FRAMES,
    tie_tolerance: Optional[float] = None,
) -> ShiftSweepResult:
    """Measure saturated counts while sliding the second camera's trigger.

    The scenario must hold exactly two cameras at equal frame rates;
    the sweep adds shifts of 0, step, 2*step, ... (strictly below one
    frame period) to the second camera's trigger and records the mean
    saturated count of the first camera over a short steady-state
    burst. Shifts whose count lies within tie_tolerance (default 1% of
    the pixel count) of the sweep minimum are reported MCI-free.
    """
    if len(scenario.cameras) != 2:
        raise ValueError("sweep requires exactly two cameras")
    (cfg_a, off_a), (cfg_b, off_b) = scenario.cameras
    if as_fraction(cfg_a.frame_rate) != as_fraction(cfg_b.frame_rate):
        raise RateMismatch("sweep requires equal frame rates")
    step = as_fraction(step)
    if step <= 0:
        raise ValueError("step must be positive")
    if burst_frames < 1:
        raise ValueError("burst_frames must be at least 1")
    period = cfg_a.frame_period()
    if step > period:
        raise ValueError("step exceeds the frame period")
    if off_a >= period or off_b >= period:
        raise ValueError("base trigger offsets must stay inside one frame period")

    first = _SWEEP_WARMUP_FRAMES
    duration = (first + burst_frames + 1) * period
    n_pixels = scenario.scene.depth_map.size

    shifts = []
    shift = Fraction(0)
    while shift < period:
        shifts.append(shift)
        shift += step

    counts = []
    for shift in shifts:
        shifted = Scenario(
            cameras=((cfg_a, off_a), (cfg_b, off_b + shift)),
            scene=scenario.scene,
            duration=duration,
            seed=scenario.seed,
            well_capacity=scenario.well_capacity,
            coherent=scenario.coherent,
            cross_gain=scenario.cross_gain,
        )
        frames = simulate_stream(shifted)[0][first : first + burst_frames]
        counts.append(sum(f.saturated_count for f in frames) / burst_frames)

    baseline_frames = simulate_stream(
        Scenario(
            cameras=((cfg_a, off_a),),
            scene=scenario.scene,
            duration=duration,
            seed=scenario.seed,
            well_capacity=scenario.well_capacity,
            coherent=scenario.coherent,
            cross_gain=scenario.cross_gain,
        )
    )[0][first : first + burst_frames]
    baseline = sum(f.saturated_count for f in baseline_frames) / burst_frames

    if tie_tolerance is None:
        tie_tolerance = 0.01 * n_pixels
    floor_count = min(counts)
    free = tuple(s for s, c in zip(shifts, counts) if c <= floor_count + tie_tolerance)
    peak = max(max(counts), 1.0)
    return ShiftSweepResult(
        shifts=tuple(shifts),
        saturated_counts=tuple(counts),
        normalized_counts=tuple(c / peak for c in counts),
        mci_free_shifts=free,
        tie_tolerance=float(tie_tolerance),
        baseline_count=baseline,
    )


@dataclass(frozen=True)
class FrameLabel:
    """Per-frame verdict from timestamp geometry."""

    frame_index: int
    paired_frame: int
    shift_seconds: float  # paired frame start minus this frame start
    mci_free: bool


def _stream_anchor(frames: Sequence[SimFrame], config: CameraConfig) -> Fraction:
    head = frames[0]
    ts = head.timestamp_exact
    if ts is None:
        ts = as_fraction(head.timestamp)
    return ts - head.frame_index * config.frame_period()


def periodicity_analysis(
    stream_a: Sequence[SimFrame],
    stream_b: Sequence[SimFrame],
    config_a: CameraConfig,
    config_b: CameraConfig,
):
    """Label each frame of stream_a MCI-free from timing alone.

    Rebuilds both cameras' integration trains from their frame
    timestamps and the derived quad timing, then marks a frame free iff
    its integration windows intersect the other train for exactly zero
    seconds. This is the geometry behind predict_free_shifts carried
    across frame boundaries, so it handles unequal frame rates, where
    the mutual shift drifts from quad to quad. Labels repeat with the
    beat period for rational rate pairs.
    """
    if not stream_a or not stream_b:
        raise InsufficientFrames("both streams must be non-empty")
    anchor_a = _stream_anchor(stream_a, config_a)
    anchor_b = _stream_anchor(stream_b, config_b)
    period_a = config_a.frame_period()
    period_b = config_b.frame_period()
    rate_b = as_fraction(config_b.frame_rate)
    n_b = max(f.frame_index for f in stream_b) + 1

    labels = []
    for frame in stream_a:
        start = anchor_a + frame.frame_index * period_a
        window = (start, start + period_a)
        own = integration_intervals(config_a, anchor_a, window)
        other = integration_intervals(config_b, anchor_b, window, n_frames=n_b)
        overlap = own.intersection_length(other)
        nearest = int(round((start - anchor_b) * rate_b))
        nearest = min(max(nearest, 0), n_b - 1)
        shift = anchor_b + nearest * period_b - start
        labels.append(
            FrameLabel(
                frame_index=frame.frame_index,
                paired_frame=nearest,
                shift_seconds=float(shift),
                mci_free=overlap == 0,
            )
        )
    return labels


@dataclass(frozen=True)
class ExtractionResult:
    """MCI-free subset found by the horizontal-line fit."""

    inlier_frames: tuple  # frame indices, ascending
    fitted_level: float
    iterations: int


def extract_mci_free(
    frames: Sequence[SimFrame],
    seed_count: int = 3,
    tolerance: Optional[float] = None,
) -> ExtractionResult:
    """Find the frames whose saturated count sits on the lowest plateau.

    Sorts frames by count, seeds a horizontal line through the lowest
    seed_count of them, then alternates between refitting the level
    (mean of inliers) and absorbing frames within tolerance (default 2%
    of the pixel count) until nothing more joins. The inlier set only
    grows, so the fixpoint exists. Works on counts alone; no timing
    metadata needed.
    """
    if seed_count < 3:
        raise ValueError("seed_count must be at least 3")
    if len(frames) < seed_count:
        raise InsufficientFrames(
            f"need at least {seed_count} frames, got {len(frames)}"
        )
    if tolerance is None:
        tolerance = 0.02 * frames[0].depth_image.size
    counts = np.array([f.saturated_count for f in frames], dtype=float)
    order = np.argsort(counts, kind="stable")
    inliers = set(int(i) for i in order[:seed_count])
    level = float(counts[list(inliers)].mean())
    iterations = 1
    while True:
        joined = {
            i
            for i in range(len(frames))
            if i not in inliers and abs(counts[i] - level) <= tolerance
        }
        if not joined:
            break
        inliers |= joined
        level = float(counts[sorted(inliers)].mean())
        iterations += 1
    indices = tuple(sorted(frames[i].frame_index for i in inliers))
    return ExtractionResult(
        inlier_frames=indices, fitted_level=level, iterations=iterations
    )


def flicker_metric(frames: Sequence[SimFrame], mod_freq: float) -> float:
    """Temporal depth instability over the pixels valid in every frame.

    Mean (over common valid pixels) of the per-pixel standard deviation
    of depth across frames, normalized by the ambiguity range. Zero for
    a stack of identical frames.
    """
    if len(frames) < 2:
        raise ValueError("flicker needs at least two frames")
    shapes = {f.depth_image.shape for f in frames}
    if len(shapes) != 1:
        raise ValueError("frames must share dimensions")
    masks = np.stack([f.saturation_mask for f in frames])
    valid = ~masks.any(axis=0)
    if not valid.any():
        raise NoCommonValidPixels("every pixel saturates in some frame")
    depths = np.stack([f.depth_image for f in frames])
    series = depths[:, valid]
    # std is shift-invariant; removing the first frame keeps identical
    # stacks at exactly zero instead of mean-rounding dust
    stds = (series - series[0]).std(axis=0)
    return float(stds.mean() / sig.ambiguity_range(mod_freq))
