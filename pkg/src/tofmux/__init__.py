"""Multi-camera CW time-of-flight interference: timing, simulation, detection.

Continuous-wave depth cameras that share a modulation frequency corrupt
each other whenever their integration windows overlap. This package
derives the exact quad timing budget of such a camera, schedules several
of them into non-overlapping slots, simulates the four-bucket depth
pipeline under interference, and detects or avoids the corruption using
only observable frame data.
"""

from .detector import (
    ExtractionResult,
    FrameLabel,
    ShiftSweepResult,
    count_saturated,
    extract_mci_free,
    flicker_metric,
    periodicity_analysis,
    predict_free_shifts,
    sweep_shifts,
)
from .errors import (
    CapacityExceeded,
    DegenerateSamples,
    InfeasibleTiming,
    InsufficientFrames,
    NoCommonValidPixels,
    RateMismatch,
    ScenarioInvalid,
    TofmuxError,
)
from .scheduler import (
    PairwiseOverlapReport,
    Schedule,
    assign_shifts,
    max_cameras,
    pairwise_overlap,
    verify_schedule,
)
from .signal import (
    BUCKET_PHASES,
    SPEED_OF_LIGHT,
    CorrelationSamples,
    ModulationParams,
    PixelState,
    ambiguity_range,
    correlate_closed_form,
    correlate_numeric,
    depth_to_phase,
    estimate_phase,
    integrate_pixel,
    phase_to_depth,
    sample_four_buckets,
    superpose_interference,
    wrap_phase,
)
from .simulator import (
    Scenario,
    SceneModel,
    SimFrame,
    beat_period,
    default_well_capacity,
    frames_equal,
    make_default_scene,
    parse_depth_csv,
    render_depth_csv,
    render_metrics_csv,
    simulate_stream,
)
from .timing import (
    CameraConfig,
    IntervalSet,
    QuadTiming,
    as_fraction,
    cycles_to_seconds,
    derive_quad_timing,
    integration_intervals,
    quad_pitch_seconds,
    quad_total_cycles,
    readout_cycles,
)

__version__ = "0.1.0"

__all__ = [
    "BUCKET_PHASES",
    "CameraConfig",
    "CapacityExceeded",
    "CorrelationSamples",
    "DegenerateSamples",
    "ExtractionResult",
    "FrameLabel",
    "InfeasibleTiming",
    "InsufficientFrames",
    "IntervalSet",
    "ModulationParams",
    "NoCommonValidPixels",
    "PairwiseOverlapReport",
    "PixelState",
    "QuadTiming",
    "RateMismatch",
    "SPEED_OF_LIGHT",
    "Scenario",
    "ScenarioInvalid",
    "SceneModel",
    "Schedule",
    "ShiftSweepResult",
    "SimFrame",
    "TofmuxError",
    "ambiguity_range",
    "as_fraction",
    "assign_shifts",
    "beat_period",
    "correlate_closed_form",
    "correlate_numeric",
    "count_saturated",
    "cycles_to_seconds",
    "default_well_capacity",
    "depth_to_phase",
    "derive_quad_timing",
    "estimate_phase",
    "extract_mci_free",
    "flicker_metric",
    "frames_equal",
    "integrate_pixel",
    "integration_intervals",
    "make_default_scene",
    "max_cameras",
    "pairwise_overlap",
    "parse_depth_csv",
    "periodicity_analysis",
    "phase_to_depth",
    "predict_free_shifts",
    "quad_pitch_seconds",
    "quad_total_cycles",
    "readout_cycles",
    "render_depth_csv",
    "render_metrics_csv",
    "sample_four_buckets",
    "simulate_stream",
    "superpose_interference",
    "sweep_shifts",
    "verify_schedule",
    "wrap_phase",
]
