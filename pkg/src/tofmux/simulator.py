"""Multi-camera stream simulator with quad-level interference.

Each camera images the same static scene from the same vantage point
(co-located rigs). Per frame and per quad, the simulator computes the
exact fraction of the integration window during which each other
camera's illumination was on, scales that camera's correlation
contribution by it, saturates pixels against the well capacity and
demodulates the survivors to depth. There is no shot noise; every
stochastic choice (oscillator phase offsets) comes from the scenario
seed, so identical scenarios produce bit-identical streams.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import signal as sig
from .errors import ScenarioInvalid
from .timing import (
    CameraConfig,
    as_fraction,
    cycles_to_seconds,
    derive_quad_timing,
    integration_intervals,
    quad_pitch_seconds,
)

# Illumination and demodulation constants of the pixel model. The wave
# gates between 0 and 1 (a_d = b_d = 1/2) and the emitted light is fully
# modulated, so the received signal has equal amplitude and offset.
ILLUM_AMPLITUDE = 1.0
DEMOD_AMPLITUDE = 0.5
DEMOD_OFFSET = 0.5

DEFAULT_BEAT_CAP = 10_000


@dataclass(frozen=True)
class SceneModel:
    """Static scene as per-pixel depth and reflectivity rasters."""

    depth_map: np.ndarray
    reflectivity_map: np.ndarray

    def __post_init__(self):
        depth = np.asarray(self.depth_map, dtype=float)
        refl = np.asarray(self.reflectivity_map, dtype=float)
        if depth.shape != refl.shape or depth.ndim != 2:
            raise ValueError("depth and reflectivity maps must share a 2-d shape")
        if not np.all(depth > 0):
            raise ValueError("depths must be positive")
        if not (np.all(refl >= 0) and np.all(refl <= 1)):
            raise ValueError("reflectivity must be in [0, 1]")
        depth.setflags(write=False)
        refl.setflags(write=False)
        object.__setattr__(self, "depth_map", depth)
        object.__setattr__(self, "reflectivity_map", refl)

    @property
    def shape(self):
        return self.depth_map.shape


def make_default_scene(
    rows: int = 60,
    cols: int = 80,
    plane_depth_m: float = 1.0,
    bump_radius_m: float = 0.15,
    reflectivity: float = 0.8,
    pixel_pitch_m: float = 0.01,
    edge_falloff: float = 0.45,
) -> SceneModel:
    """Frontal plane with a raised hemisphere in the middle.

    The hemisphere's top sits bump_radius_m in front of the plane.
    Reflectivity falls off quadratically toward the image corners so
    the corners stay below any saturation threshold referenced to the
    bright center; they are the pixels that keep reporting depth under
    heavy interference.
    """
    y = (np.arange(rows) - (rows - 1) / 2.0) * pixel_pitch_m
    x = (np.arange(cols) - (cols - 1) / 2.0) * pixel_pitch_m
    yy, xx = np.meshgrid(y, x, indexing="ij")
    rho = np.hypot(xx, yy)
    depth = np.full((rows, cols), plane_depth_m, dtype=float)
    inside = rho < bump_radius_m
    depth[inside] = plane_depth_m - np.sqrt(bump_radius_m**2 - rho[inside] ** 2)
    r_corner = math.hypot(x[-1], y[-1])
    refl = reflectivity * (1.0 - edge_falloff * (rho / r_corner) ** 2)
    return SceneModel(depth_map=depth, reflectivity_map=refl)


@dataclass(frozen=True, eq=False)
class SimFrame:
    """One captured frame: depth with holes plus ground-truth overlap."""

    camera_id: int
    frame_index: int
    timestamp: float
    depth_image: np.ndarray
    saturation_mask: np.ndarray
    saturated_count: int
    overlap_seconds: float
    timestamp_exact: Optional[Fraction] = field(default=None, repr=False)

    @property
    def n_pixels(self) -> int:
        return int(self.depth_image.size)


def frames_equal(a: SimFrame, b: SimFrame) -> bool:
    """Bitwise frame equality; NaN holes compare equal at equal spots."""
    return (
        a.camera_id == b.camera_id
        and a.frame_index == b.frame_index
        and a.timestamp == b.timestamp
        and a.saturated_count == b.saturated_count
        and a.overlap_seconds == b.overlap_seconds
        and np.array_equal(a.saturation_mask, b.saturation_mask)
        and np.array_equal(a.depth_image, b.depth_image, equal_nan=True)
    )


@dataclass(frozen=True)
class Scenario:
    """Everything that defines a capture: cameras, scene, duration, seed.

    cameras is a sequence of (CameraConfig, trigger_offset_seconds)
    pairs. well_capacity of None selects the default: 1.2x the largest
    single-camera bucket among pixels at the scene's maximum depth,
    putting the bright foreground above saturation on its own and the
    dim corners out of reach even under full interference. coherent
    declares all cameras phase-stable at a shared modulation frequency;
    incoherent interferers contribute only their DC offset.
    """

    cameras: tuple
    scene: SceneModel
    duration: float
    seed: int = 0
    well_capacity: Optional[float] = None
    coherent: bool = True
    cross_gain: float = 1.0

    def __post_init__(self):
        cams = tuple((cfg, as_fraction(off)) for cfg, off in self.cameras)
        if not cams:
            raise ScenarioInvalid("at least one camera required")
        for cfg, off in cams:
            if not isinstance(cfg, CameraConfig):
                raise ScenarioInvalid("camera entries must be (CameraConfig, offset)")
            if off < 0:
                raise ScenarioInvalid("trigger offsets must be non-negative")
            if self.scene.shape != (cfg.n_row, cfg.n_col_tot):
                raise ScenarioInvalid(
                    f"scene shape {self.scene.shape} does not match sensor "
                    f"({cfg.n_row}, {cfg.n_col_tot})"
                )
            if float(self.scene.depth_map.max()) >= sig.ambiguity_range(float(cfg.mod_freq)):
                raise ScenarioInvalid("scene depth reaches the ambiguity range")
        if self.coherent:
            freqs = {as_fraction(cfg.mod_freq) for cfg, _ in cams}
            if len(freqs) > 1:
                raise ScenarioInvalid("coherent scenario requires equal mod_freq")
        if as_fraction(self.duration) <= 0:
            raise ScenarioInvalid("duration must be positive")
        if self.well_capacity is not None and self.well_capacity <= 0:
            raise ScenarioInvalid("well_capacity must be positive")
        if self.cross_gain < 0:
            raise ScenarioInvalid("cross_gain must be non-negative")
        object.__setattr__(self, "cameras", cams)

    def frame_counts(self) -> tuple:
        dur = as_fraction(self.duration)
        return tuple(
            int(dur * as_fraction(cfg.frame_rate)) for cfg, _ in self.cameras
        )


def default_well_capacity(scene: SceneModel, config: CameraConfig) -> float:
    """Capacity with 20% headroom over the far field's strongest bucket."""
    period = 1.0 / float(config.mod_freq)
    a_r = ILLUM_AMPLITUDE * scene.reflectivity_map / scene.depth_map**2
    peak = a_r * (DEMOD_AMPLITUDE * period / 2.0 + DEMOD_OFFSET * period)
    far = scene.depth_map == scene.depth_map.max()
    return 1.2 * float(peak[far].max())


class _CameraState:
    """Precomputed per-camera fields shared by every frame."""

    def __init__(self, index, config, offset, scene, n_frames, cross_gain):
        self.index = index
        self.config = config
        self.offset = offset
        self.n_frames = n_frames
        self.timing = derive_quad_timing(config)
        self.pitch = quad_pitch_seconds(config)
        self.rs = cycles_to_seconds(self.timing.t_rs, config)
        self.qin = cycles_to_seconds(self.timing.t_qin, config)
        period = 1.0 / float(config.mod_freq)
        # inverse-square radiometry; fully modulated light so offset == amplitude
        self.amp = ILLUM_AMPLITUDE * scene.reflectivity_map / scene.depth_map**2
        self.a_c = self.amp * DEMOD_AMPLITUDE * period / 2.0
        self.b_c = self.amp * DEMOD_OFFSET * period
        self.phi = sig.depth_to_phase(scene.depth_map, float(config.mod_freq))
        self.own_buckets = np.stack(
            [self.a_c * np.cos(psi + self.phi) + self.b_c for psi in sig.BUCKET_PHASES]
        )
        # contribution templates of this camera's light inside another
        # camera's pixel are built by the receiver (phase offset differs)
        self.cross_gain = cross_gain

    def quad_interval(self, frame_index, quad):
        start = (
            self.offset
            + frame_index * self.config.frame_period()
            + quad * self.pitch
            + self.rs
        )
        return start, start + self.qin


def _interferer_buckets(receiver: _CameraState, emitter: _CameraState, rel_phase, coherent):
    """Bucket contribution of the emitter's light at overlap fraction 1.

    The emitter's light reflects off the same scene point and is
    demodulated by the receiver's wave over the receiver's period. Only
    the DC offset survives for an incoherent emitter.
    """
    period = 1.0 / float(receiver.config.mod_freq)
    amp = emitter.cross_gain * emitter.amp
    b_ci = amp * DEMOD_OFFSET * period
    if not coherent:
        return np.broadcast_to(b_ci, (4,) + b_ci.shape).copy()
    a_ci = amp * DEMOD_AMPLITUDE * period / 2.0
    phase = receiver.phi + rel_phase
    return np.stack(
        [a_ci * np.cos(psi + phase) + b_ci for psi in sig.BUCKET_PHASES]
    )


def simulate_stream(scenario: Scenario):
    """Simulate every camera; returns one list of SimFrames per camera."""
    counts = scenario.frame_counts()
    if any(n < 1 for n in counts):
        raise ScenarioInvalid("duration shorter than one frame of some camera")
    cams = [
        _CameraState(i, cfg, off, scenario.scene, counts[i], scenario.cross_gain)
        for i, (cfg, off) in enumerate(scenario.cameras)
    ]
    rng = np.random.default_rng(scenario.seed)
    osc_phase = rng.uniform(0.0, sig.TWO_PI, len(cams))
    capacity = scenario.well_capacity
    if capacity is None:
        capacity = default_well_capacity(scenario.scene, cams[0].config)

    streams = []
    for cam in cams:
        others = [c for c in cams if c.index != cam.index]
        templates = [
            _interferer_buckets(
                cam,
                other,
                (osc_phase[other.index] - osc_phase[cam.index]) % sig.TWO_PI,
                scenario.coherent,
            )
            for other in others
        ]
        frames = []
        quads = cam.config.quads_per_frame
        mod_freq = float(cam.config.mod_freq)
        for m in range(cam.n_frames):
            bins = [None, None, None, None]
            bin_counts = [0, 0, 0, 0]
            sat = np.zeros(scenario.scene.shape, dtype=bool)
            overlap_total = Fraction(0)
            for q in range(quads):
                start, end = cam.quad_interval(m, q)
                bucket = cam.own_buckets[q % 4]
                for other, template in zip(others, templates):
                    shared = integration_intervals(
                        other.config, other.offset, (start, end), n_frames=other.n_frames
                    ).total()
                    overlap_total += shared
                    if shared:
                        frac = float(shared / cam.qin)
                        bucket = bucket + frac * template[q % 4]
                sat |= bucket >= capacity
                k = q % 4
                bins[k] = bucket if bins[k] is None else bins[k] + bucket
                bin_counts[k] += 1
            c = [bins[k] / bin_counts[k] for k in range(4)]
            phase = np.arctan2(c[3] - c[1], c[0] - c[2]) % sig.TWO_PI
            phase[phase >= sig.TWO_PI] = 0.0
            depth = sig.phase_to_depth(phase, mod_freq)
            depth[sat] = np.nan
            ts = cam.offset + m * cam.config.frame_period()
            frames.append(
                SimFrame(
                    camera_id=cam.index,
                    frame_index=m,
                    timestamp=float(ts),
                    depth_image=depth,
                    saturation_mask=sat,
                    saturated_count=int(sat.sum()),
                    overlap_seconds=float(overlap_total),
                    timestamp_exact=ts,
                )
            )
        streams.append(frames)
    return streams


def beat_period(
    config_a: CameraConfig,
    config_b: CameraConfig,
    max_period: int = DEFAULT_BEAT_CAP,
) -> Optional[int]:
    """Repetition period, in frames of camera a, of its overlap pattern.

    Camera b's integration train repeats every quad pitch; camera a's
    frame start drifts across that grid by |1/fa - 1/fb| per frame (b's
    whole frame is an exact multiple of its pitch). The pattern repeats
    at the smallest k for which the accumulated drift is a multiple of
    the pitch. Equal rates give 1. Returns None (aperiodic for all
    practical purposes) when the exact period exceeds max_period.
    """
    rate_a = as_fraction(config_a.frame_rate)
    rate_b = as_fraction(config_b.frame_rate)
    drift = abs(1 / rate_a - 1 / rate_b)
    if drift == 0:
        return 1
    ratio = drift / quad_pitch_seconds(config_b)
    k = ratio.denominator
    if max_period is not None and k > max_period:
        return None
    return k


_CSV_FIELDS = [
    "camera_id",
    "frame_index",
    "timestamp_s",
    "overlap_s",
    "row",
    "col",
    "depth_m",
    "saturated",
]


def render_depth_csv(frames: Sequence[SimFrame], path) -> None:
    """One row per pixel; floats as repr so a round trip is lossless."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for frame in frames:
            rows, cols = frame.depth_image.shape
            for r in range(rows):
                for ccol in range(cols):
                    depth = frame.depth_image[r, ccol]
                    writer.writerow(
                        [
                            frame.camera_id,
                            frame.frame_index,
                            repr(frame.timestamp),
                            repr(frame.overlap_seconds),
                            r,
                            ccol,
                            "" if math.isnan(depth) else repr(float(depth)),
                            int(frame.saturation_mask[r, ccol]),
                        ]
                    )


_METRICS_FIELDS = ["frame_index", "timestamp_us", "overlap_us", "saturated_count"]


def render_metrics_csv(frames: Sequence[SimFrame], path) -> None:
    """One row per frame; times rounded to integer microseconds."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_METRICS_FIELDS)
        for frame in frames:
            ts = frame.timestamp_exact
            ts_us = round(ts * 1_000_000) if ts is not None else round(frame.timestamp * 1e6)
            writer.writerow(
                [
                    frame.frame_index,
                    ts_us,
                    round(frame.overlap_seconds * 1e6),
                    frame.saturated_count,
                ]
            )


def parse_depth_csv(path):
    """Inverse of render_depth_csv; returns frames in file order."""
    groups = {}
    order = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _CSV_FIELDS:
            raise ValueError(f"unexpected raster header {reader.fieldnames}")
        for rec in reader:
            key = (int(rec["camera_id"]), int(rec["frame_index"]))
            if key not in groups:
                groups[key] = {
                    "timestamp": float(rec["timestamp_s"]),
                    "overlap": float(rec["overlap_s"]),
                    "pixels": [],
                }
                order.append(key)
            groups[key]["pixels"].append(
                (
                    int(rec["row"]),
                    int(rec["col"]),
                    float(rec["depth_m"]) if rec["depth_m"] else math.nan,
                    bool(int(rec["saturated"])),
                )
            )
    frames = []
    for key in order:
        data = groups[key]
        rows = max(p[0] for p in data["pixels"]) + 1
        cols = max(p[1] for p in data["pixels"]) + 1
        depth = np.full((rows, cols), np.nan)
        sat = np.zeros((rows, cols), dtype=bool)
        for r, ccol, d, s in data["pixels"]:
            depth[r, ccol] = d
            sat[r, ccol] = s
        frames.append(
            SimFrame(
                camera_id=key[0],
                frame_index=key[1],
                timestamp=data["timestamp"],
                depth_image=depth,
                saturation_mask=sat,
                saturated_count=int(sat.sum()),
                overlap_seconds=data["overlap"],
            )
        )
    return frames
