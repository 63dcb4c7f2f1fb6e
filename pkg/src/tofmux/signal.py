"""Four-bucket correlation model for sinusoidal CW modulation.

The pixel correlates received light R(t) = a_r sin(2 pi f (t - tau)) + b_r
against the demodulation wave D(t + t_d) = a_d sin(2 pi f (t + t_d)) + b_d
over one modulation period. The closed form is

    C(psi) = a_c cos(psi + phi) + b_c,   psi = 2 pi f t_d,  phi = 2 pi f tau

with a_c = a_r a_d T / 2 and b_c = b_r b_d T (T the modulation period).
Buckets are energies per modulation period; a real exposure scales all of
them by the same integration-length factor, which cancels everywhere we
compare buckets against a capacity expressed in the same units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSamples

SPEED_OF_LIGHT = 299_792_458.0

TWO_PI = 2.0 * math.pi

# Demodulation phases of the four buckets, in radians.
BUCKET_PHASES = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


@dataclass(frozen=True)
class ModulationParams:
    """Sinusoid parameters of one arriving signal at one pixel.

    a_r/b_r describe the light (amplitude/offset), a_d/b_d the pixel's
    demodulation wave, tau the round-trip delay in seconds.
    """

    a_r: float
    b_r: float
    a_d: float
    b_d: float
    mod_freq: float
    tau: float

    def __post_init__(self):
        if self.a_r < 0 or self.b_r < 0 or self.a_d < 0 or self.b_d < 0:
            raise ValueError("amplitudes and offsets must be non-negative")
        if self.mod_freq <= 0:
            raise ValueError("mod_freq must be positive")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")


@dataclass(frozen=True)
class CorrelationSamples:
    """Four correlation buckets at demodulation phases 0, 90, 180, 270 deg.

    For a pure sinusoid c0 + c2 == c1 + c3 == 2 b_c up to float rounding.
    a_c and b_c are carried along when known.
    """

    c0: float
    c1: float
    c2: float
    c3: float
    a_c: Optional[float] = None
    b_c: Optional[float] = None

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3], dtype=float)


@dataclass(frozen=True)
class PixelState:
    """Accumulated buckets of one pixel and its saturation verdict."""

    buckets: tuple
    well_capacity: float
    saturated: bool


def closed_form_coeffs(params: ModulationParams):
    """(a_c, b_c) of the closed-form correlation."""
    period = 1.0 / params.mod_freq
    a_c = params.a_r * params.a_d * period / 2.0
    b_c = params.b_r * params.b_d * period
    return a_c, b_c


def correlate_closed_form(params: ModulationParams, t_d: float):
    """Correlation value at demodulation delay t_d.

    Returns (value, a_c, b_c). Works elementwise when t_d is an array.
    """
    a_c, b_c = closed_form_coeffs(params)
    psi = TWO_PI * params.mod_freq * np.asarray(t_d, dtype=float)
    phi = TWO_PI * params.mod_freq * params.tau
    value = a_c * np.cos(psi + phi) + b_c
    if np.ndim(t_d) == 0:
        value = float(value)
    return value, a_c, b_c


def correlate_numeric(params: ModulationParams, t_d: float, steps: int = 4096) -> float:
    """Trapezoidal evaluation of the correlation integral over one period.

    Kept as an independent route to the closed form; the integrand is a
    trigonometric polynomial, so the trapezoid rule on a uniform grid is
    exact up to rounding once steps resolves the harmonics.
    """
    if steps < 64:
        raise ValueError("steps must be at least 64")
    period = 1.0 / params.mod_freq
    t = np.linspace(0.0, period, steps + 1)
    omega = TWO_PI * params.mod_freq
    demod = params.a_d * np.sin(omega * (t + t_d)) + params.b_d
    received = params.a_r * np.sin(omega * (t - params.tau)) + params.b_r
    return float(np.trapezoid(demod * received, t))


def sample_four_buckets(params: ModulationParams) -> CorrelationSamples:
    """Closed-form buckets at the four canonical demodulation phases."""
    a_c, b_c = closed_form_coeffs(params)
    phi = TWO_PI * params.mod_freq * params.tau
    c = [a_c * math.cos(psi + phi) + b_c for psi in BUCKET_PHASES]
    return CorrelationSamples(c[0], c[1], c[2], c[3], a_c=a_c, b_c=b_c)


def estimate_phase(samples: CorrelationSamples) -> float:
    """Phase in [0, 2 pi) from the four buckets.

    The two differences cancel any common offset, so DC terms (ambient
    light, incoherent interference) drop out exactly.
    """
    num = samples.c3 - samples.c1
    den = samples.c0 - samples.c2
    if num == 0.0 and den == 0.0:
        raise DegenerateSamples("both bucket differences are zero")
    return wrap_phase(math.atan2(num, den))


def wrap_phase(phase: float) -> float:
    wrapped = phase % TWO_PI
    # n % TWO_PI can round up to TWO_PI itself for tiny negative n
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def phase_to_depth(phase: float, mod_freq: float) -> float:
    """Depth in meters for a phase in radians."""
    return SPEED_OF_LIGHT * phase / (2.0 * TWO_PI * mod_freq)


def depth_to_phase(depth: float, mod_freq: float) -> float:
    return 2.0 * TWO_PI * mod_freq * depth / SPEED_OF_LIGHT


def ambiguity_range(mod_freq: float) -> float:
    """Largest unambiguous depth: half the modulation wavelength."""
    return SPEED_OF_LIGHT / (2.0 * mod_freq)


def superpose_interference(
    own: ModulationParams,
    interferer: ModulationParams,
    overlap_fraction: float,
    coherent: bool,
) -> CorrelationSamples:
    """Buckets of the own signal plus a partially overlapping interferer.

    overlap_fraction is the interferer's presence during this pixel's
    integration, in [0, 1], and scales its contribution linearly. A
    coherent interferer (same modulation frequency) adds its own cosine
    term at its phase; an incoherent one averages out to its DC offset
    only. The interferer is demodulated by this pixel, so its a_d/b_d
    fields are ignored and the own demodulation wave applies. Any
    oscillator phase offset between the cameras must be folded into the
    interferer's tau by the caller.
    """
    if not 0.0 <= overlap_fraction <= 1.0:
        raise ValueError("overlap_fraction must be in [0, 1]")
    a_c, b_c = closed_form_coeffs(own)
    phi = TWO_PI * own.mod_freq * own.tau
    demod_view = ModulationParams(
        a_r=interferer.a_r,
        b_r=interferer.b_r,
        a_d=own.a_d,
        b_d=own.b_d,
        mod_freq=own.mod_freq,
        tau=interferer.tau,
    )
    a_ci, b_ci = closed_form_coeffs(demod_view)
    phi_i = TWO_PI * own.mod_freq * interferer.tau
    buckets = []
    for psi in BUCKET_PHASES:
        value = a_c * math.cos(psi + phi) + b_c
        if coherent:
            value += overlap_fraction * (a_ci * math.cos(psi + phi_i) + b_ci)
        else:
            value += overlap_fraction * b_ci
        buckets.append(value)
    return CorrelationSamples(*buckets, a_c=a_c, b_c=b_c)


def integrate_pixel(samples: CorrelationSamples, well_capacity: float) -> PixelState:
    """Clip check: a pixel is saturated when any bucket reaches capacity."""
    if well_capacity <= 0:
        raise ValueError("well_capacity must be positive")
    buckets = (samples.c0, samples.c1, samples.c2, samples.c3)
    saturated = any(b >= well_capacity for b in buckets)
    return PixelState(buckets=buckets, well_capacity=well_capacity, saturated=saturated)
