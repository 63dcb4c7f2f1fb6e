"""Scenario-file front end for the four interference experiments.

One experiment per invocation; pipelines compose through files. A
scenario is a TOML document with [sim], [scene], [[cameras]] and
[experiment] tables. Parsing is fail-closed: unknown keys are rejected
with their dotted path, units live in key names, and every run prints
the fully resolved scenario (defaults filled in) before any results.
Identical scenario files produce byte-identical artifacts.

Times in emitted CSVs are integer microseconds; exact cycle counts are
included where rounding would hide an exact zero.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .detector import (
    extract_mci_free,
    flicker_metric,
    periodicity_analysis,
    predict_free_shifts,
    sweep_shifts,
)
from .errors import NoCommonValidPixels, ScenarioInvalid, TofmuxError
from .scheduler import assign_shifts, max_cameras, verify_schedule
from .simulator import (
    Scenario,
    beat_period,
    default_well_capacity,
    make_default_scene,
    render_depth_csv,
    render_metrics_csv,
    simulate_stream,
)
from .timing import (
    DEFAULT_MOD_FREQ_HZ,
    DEFAULT_RESET_CYCLES,
    DEFAULT_SYS_CLOCK_HZ,
    CameraConfig,
    derive_quad_timing,
    quad_pitch_seconds,
)

_REQUIRED = object()
_NUMBER = (int, float)

_SIM_SCHEMA = {
    "duration_s": (_NUMBER, _REQUIRED),
    "seed": (int, 0),
    "coherent": (bool, True),
    "well_capacity": (_NUMBER, None),
    "cross_gain": (_NUMBER, 1.0),
}

_SCENE_SCHEMA = {
    "rows": (int, 60),
    "cols": (int, 80),
    "plane_depth_m": (_NUMBER, 1.0),
    "bump_radius_m": (_NUMBER, 0.15),
    "reflectivity": (_NUMBER, 0.8),
    "pixel_pitch_m": (_NUMBER, 0.01),
    "edge_falloff": (_NUMBER, 0.45),
}

_CAMERA_SCHEMA = {
    "frame_rate_hz": (_NUMBER, _REQUIRED),
    "intg_duty_cycle": (_NUMBER, _REQUIRED),
    "n_quads": (int, 4),
    "n_subframes": (int, 1),
    "sys_clock_hz": (_NUMBER, DEFAULT_SYS_CLOCK_HZ),
    "mod_freq_hz": (_NUMBER, DEFAULT_MOD_FREQ_HZ),
    "reset_cycles": (int, DEFAULT_RESET_CYCLES),
    "trigger_offset_us": (int, 0),
}

# per-kind knobs; anything else under [experiment] is rejected
_EXPERIMENT_KNOBS = {
    "schedule": {"cameras": (int, None), "frames": (int, 5)},
    "sweep": {
        "step_us": (int, 1000),
        "burst_frames": (int, 3),
        "tie_tolerance": (_NUMBER, None),
    },
    "periodicity": {"frames": (int, None)},
    "extract": {
        "seed_count": (int, 3),
        "tolerance": (_NUMBER, None),
        "frames": (int, None),
    },
}


def _type_names(types) -> str:
    return " or ".join(t.__name__ for t in types)


def _coerce(value, types, path: str):
    if not isinstance(types, tuple):
        types = (types,)
    # bool subclasses int; a TOML true where a number belongs is a mistake
    if isinstance(value, bool) and bool not in types:
        raise ScenarioInvalid(f"{path}: expected {_type_names(types)}, got bool")
    if not isinstance(value, types):
        raise ScenarioInvalid(
            f"{path}: expected {_type_names(types)}, got {type(value).__name__}"
        )
    return value


def _parse_table(table, path: str, schema: dict) -> dict:
    if not isinstance(table, dict):
        raise ScenarioInvalid(f"{path}: expected a table")
    unknown = sorted(set(table) - set(schema))
    if unknown:
        raise ScenarioInvalid(f"{path}.{unknown[0]}: unknown key")
    resolved = {}
    for key, (types, default) in schema.items():
        if key in table:
            resolved[key] = _coerce(table[key], types, f"{path}.{key}")
        elif default is _REQUIRED:
            raise ScenarioInvalid(f"{path}.{key}: required key missing")
        else:
            resolved[key] = default
    return resolved


def _parse_experiment(table):
    if not isinstance(table, dict):
        raise ScenarioInvalid("experiment: expected a table")
    if "kind" not in table:
        raise ScenarioInvalid("experiment.kind: required key missing")
    kind = _coerce(table["kind"], str, "experiment.kind")
    if kind not in _EXPERIMENT_KNOBS:
        options = ", ".join(sorted(_EXPERIMENT_KNOBS))
        raise ScenarioInvalid(f"experiment.kind: {kind!r} is not one of {options}")
    schema = {"kind": (str, _REQUIRED), **_EXPERIMENT_KNOBS[kind]}
    return kind, _parse_table(table, "experiment", schema)


def build_scenario(doc: dict):
    """Turn a parsed scenario document into a validated Scenario.

    Returns (scenario, kind, knobs, resolved) where resolved is the
    defaults-filled document used for the scenario printout.
    """
    if not isinstance(doc, dict):
        raise ScenarioInvalid("scenario root: expected a table")
    unknown = sorted(set(doc) - {"sim", "scene", "cameras", "experiment"})
    if unknown:
        raise ScenarioInvalid(f"{unknown[0]}: unknown section")
    sim = _parse_table(doc.get("sim", {}), "sim", _SIM_SCHEMA)
    scene_knobs = _parse_table(doc.get("scene", {}), "scene", _SCENE_SCHEMA)
    cam_tables = doc.get("cameras")
    if not isinstance(cam_tables, list) or not cam_tables:
        raise ScenarioInvalid("cameras: at least one [[cameras]] block required")
    cams = [
        _parse_table(tbl, f"cameras[{i}]", _CAMERA_SCHEMA)
        for i, tbl in enumerate(cam_tables)
    ]
    kind, knobs = _parse_experiment(doc.get("experiment"))

    scene = make_default_scene(
        rows=scene_knobs["rows"],
        cols=scene_knobs["cols"],
        plane_depth_m=scene_knobs["plane_depth_m"],
        bump_radius_m=scene_knobs["bump_radius_m"],
        reflectivity=scene_knobs["reflectivity"],
        pixel_pitch_m=scene_knobs["pixel_pitch_m"],
        edge_falloff=scene_knobs["edge_falloff"],
    )
    cameras = []
    for cam in cams:
        config = CameraConfig(
            frame_rate=cam["frame_rate_hz"],
            intg_duty_cycle=cam["intg_duty_cycle"],
            n_col_tot=scene_knobs["cols"],
            n_row=scene_knobs["rows"],
            n_quads=cam["n_quads"],
            n_subframes=cam["n_subframes"],
            sys_clock_freq=cam["sys_clock_hz"],
            reset_cycles=cam["reset_cycles"],
            mod_freq=cam["mod_freq_hz"],
        )
        cameras.append((config, Fraction(cam["trigger_offset_us"], 10**6)))
    scenario = Scenario(
        cameras=tuple(cameras),
        scene=scene,
        duration=sim["duration_s"],
        seed=sim["seed"],
        well_capacity=sim["well_capacity"],
        coherent=sim["coherent"],
        cross_gain=sim["cross_gain"],
    )
    resolved = {"sim": sim, "scene": scene_knobs, "cameras": cams, "experiment": knobs}
    return scenario, kind, knobs, resolved


def load_scenario(path):
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return build_scenario(doc)


def _fmt(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _scenario_text(resolved: dict, scenario: Scenario) -> str:
    lines = ["resolved scenario:"]
    for section in ("sim", "scene"):
        lines.append(f"[{section}]")
        for key, value in resolved[section].items():
            if section == "sim" and key == "well_capacity" and value is None:
                auto = default_well_capacity(scenario.scene, scenario.cameras[0][0])
                lines.append(f"  {key} = auto ({auto!r})")
            else:
                lines.append(f"  {key} = {_fmt(value)}")
    for idx, cam in enumerate(resolved["cameras"]):
        lines.append(f"[camera {idx}]")
        for key, value in cam.items():
            lines.append(f"  {key} = {_fmt(value)}")
        config = scenario.cameras[idx][0]
        qt = derive_quad_timing(config)
        lines.append(
            "  derived: t_qt=%d t_rs=%d t_qin=%d t_rd=%d t_qd=%d cycles,"
            " quad pitch %.3f us" % (
                qt.t_qt,
                qt.t_rs,
                qt.t_qin,
                qt.t_rd,
                qt.t_qd,
                float(quad_pitch_seconds(config)) * 1e6,
            )
        )
    lines.append("[experiment]")
    for key, value in resolved["experiment"].items():
        lines.append(f"  {key} = {_fmt(value)}")
    return "\n".join(lines)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _run_schedule(scenario: Scenario, knobs: dict, out: Path):
    template = scenario.cameras[0][0]
    for config, _offset in scenario.cameras[1:]:
        if config != template:
            raise ScenarioInvalid("schedule requires identical camera blocks")
    n = knobs["cameras"] if knobs["cameras"] is not None else len(scenario.cameras)
    qt = derive_quad_timing(template)
    lines = [
        "quad timing: t_qt=%d t_rs=%d t_qin=%d t_rd=%d t_qd=%d cycles"
        % (qt.t_qt, qt.t_rs, qt.t_qin, qt.t_rd, qt.t_qd),
        f"slot capacity: {max_cameras(qt)} cameras",
    ]
    schedule = assign_shifts(template, n)
    report = verify_schedule(schedule)
    for idx, (cycles, offset) in enumerate(
        zip(schedule.offset_cycles(), schedule.offsets)
    ):
        lines.append(
            f"camera {idx}: offset {cycles} cycles = {float(offset) * 1e6:.3f} us"
        )
    if report.pair_overlap:
        (wi, wj), wv = report.worst_pair()
        lines.append(f"worst pair {wi}-{wj}: {float(wv) * 1e6:.3f} us overlap")
    lines.append(f"schedule valid: {_fmt(report.valid)}")

    _write_csv(
        out / "schedule.csv",
        ["camera_index", "offset_cycles", "offset_us"],
        [
            [idx, cycles, round(float(offset) * 1e6)]
            for idx, (cycles, offset) in enumerate(
                zip(schedule.offset_cycles(), schedule.offsets)
            )
        ],
    )
    _write_csv(
        out / "pairs.csv",
        ["cam_i", "cam_j", "overlap_us"],
        [
            [i, j, round(float(value) * 1e6)]
            for (i, j), value in sorted(report.pair_overlap.items())
        ],
    )

    sim = Scenario(
        cameras=tuple((template, offset) for offset in schedule.offsets),
        scene=scenario.scene,
        duration=knobs["frames"] * template.frame_period(),
        seed=scenario.seed,
        well_capacity=scenario.well_capacity,
        coherent=scenario.coherent,
        cross_gain=scenario.cross_gain,
    )
    for idx, frames in enumerate(simulate_stream(sim)):
        render_metrics_csv(frames, out / f"metrics_cam{idx}.csv")
        counts = sorted({f.saturated_count for f in frames})
        lines.append(f"camera {idx}: saturated counts {counts} over {len(frames)} frames")
    return (0 if report.valid else 1), lines


def _run_sweep(scenario: Scenario, knobs: dict, out: Path):
    step = Fraction(knobs["step_us"], 10**6)
    result = sweep_shifts(
        scenario,
        step=step,
        burst_frames=knobs["burst_frames"],
        tie_tolerance=knobs["tie_tolerance"],
    )
    config = scenario.cameras[0][0]
    band = predict_free_shifts(config, n_cameras=2)
    pitch = quad_pitch_seconds(config)

    def predicted(shift) -> bool:
        folded = shift % pitch
        return any(lo <= folded <= hi for lo, hi in band)

    grid = {s for s in result.shifts if predicted(s)}
    free = set(result.mci_free_shifts)

    _write_csv(
        out / "sweep.csv",
        ["shift_us", "saturated_count", "normalized_count", "is_free"],
        [
            [
                int(shift * 10**6),
                repr(count),
                repr(norm),
                int(shift in free),
            ]
            for shift, count, norm in zip(
                result.shifts, result.saturated_counts, result.normalized_counts
            )
        ],
    )
    lines = [
        f"shifts tested: {len(result.shifts)} at {knobs['step_us']} us steps",
        f"single-camera baseline: {result.baseline_count:.1f} saturated",
        f"tie tolerance: {result.tie_tolerance:.1f} pixels",
        "free shifts (us): "
        + ", ".join(str(int(s * 10**6)) for s in result.mci_free_shifts),
        "predicted free band (us, mod pitch): "
        + ", ".join(
            f"[{float(lo) * 1e6:.3f}, {float(hi) * 1e6:.3f}]" for lo, hi in band
        ),
        f"matches prediction: {_fmt(free == grid)}",
    ]
    return (0 if free else 1), lines


def _run_periodicity(scenario: Scenario, knobs: dict, out: Path):
    if len(scenario.cameras) != 2:
        raise ScenarioInvalid("periodicity requires exactly two cameras")
    streams = simulate_stream(scenario)
    stream_a, stream_b = streams
    if knobs["frames"] is not None:
        stream_a = stream_a[: knobs["frames"]]
    config_a = scenario.cameras[0][0]
    config_b = scenario.cameras[1][0]
    labels = periodicity_analysis(stream_a, stream_b, config_a, config_b)
    period = beat_period(config_a, config_b)
    flags = [label.mci_free for label in labels]
    consistent = period is not None and all(
        flags[i] == flags[i % period] for i in range(len(flags))
    )

    rows = []
    for frame, label in zip(stream_a, labels):
        ts = frame.timestamp_exact
        ts_us = round(ts * 1_000_000) if ts is not None else round(frame.timestamp * 1e6)
        rows.append(
            [
                frame.frame_index,
                ts_us,
                round(frame.overlap_seconds * 1e6),
                frame.saturated_count,
                int(label.mci_free),
            ]
        )
    _write_csv(
        out / "periodicity.csv",
        ["frame_index", "timestamp_us", "overlap_us", "saturated_count", "is_free"],
        rows,
    )
    for idx, frames in enumerate(streams):
        render_metrics_csv(frames, out / f"metrics_cam{idx}.csv")
    sample = stream_a[: period if period else 1]
    if sample:
        render_depth_csv(sample, out / "raster_cam0.csv")

    lines = [
        f"beat period: {period if period is not None else 'none found'} frames",
        f"labels consistent with period: {_fmt(consistent)}",
    ]
    if period is not None and len(flags) >= period:
        lines.append(f"free frames per period: {sum(flags[:period])}")
        lines.append(
            "first period labels: "
            + ", ".join("free" if f else "hit" for f in flags[:period])
        )
    return (0 if consistent else 1), lines


def _run_extract(scenario: Scenario, knobs: dict, out: Path):
    streams = simulate_stream(scenario)
    frames = streams[0]
    if knobs["frames"] is not None:
        frames = frames[: knobs["frames"]]
    result = extract_mci_free(
        frames, seed_count=knobs["seed_count"], tolerance=knobs["tolerance"]
    )
    inlier_set = set(result.inlier_frames)
    inliers = [f for f in frames if f.frame_index in inlier_set]
    mod_freq = scenario.cameras[0][0].mod_freq

    def safe_flicker(subset):
        try:
            return repr(flicker_metric(subset, mod_freq))
        except (NoCommonValidPixels, ValueError):
            return "n/a"

    _write_csv(
        out / "extraction.csv",
        ["frame_index", "saturated_count", "is_inlier"],
        [
            [f.frame_index, f.saturated_count, int(f.frame_index in inlier_set)]
            for f in frames
        ],
    )
    render_metrics_csv(streams[0], out / "metrics_cam0.csv")
    if inliers:
        render_depth_csv(inliers[:1], out / "raster_inlier.csv")

    lines = [
        f"frames analyzed: {len(frames)}",
        f"inliers: {len(inliers)} at fitted level {result.fitted_level:.1f}"
        f" ({result.iterations} iterations)",
        "inlier frames: " + ", ".join(str(i) for i in result.inlier_frames),
        f"flicker inliers: {safe_flicker(inliers)}",
        f"flicker full stream: {safe_flicker(list(frames))}",
    ]
    return (0 if inliers else 1), lines


_RUNNERS = {
    "schedule": _run_schedule,
    "sweep": _run_sweep,
    "periodicity": _run_periodicity,
    "extract": _run_extract,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tofmux",
        description="Multi-camera time-of-flight interference experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for verb, blurb in [
        ("schedule", "derive quad timing and verify a TDMA slot assignment"),
        ("sweep", "step one camera's trigger and map saturated counts"),
        ("periodicity", "label frames MCI-free from timestamps at beating rates"),
        ("extract", "pull the MCI-free frames out of an interfered stream"),
    ]:
        p = sub.add_parser(verb, help=blurb)
        p.add_argument("--scenario", required=True, help="scenario TOML path")
        p.add_argument("--out", required=True, help="artifact directory")
        p.add_argument("--seed", type=int, default=None, help="override [sim] seed")
    args = parser.parse_args(argv)

    try:
        scenario, kind, knobs, resolved = load_scenario(args.scenario)
    except (OSError, tomllib.TOMLDecodeError, ScenarioInvalid) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    if kind != args.command:
        print(
            f"scenario error: experiment.kind is {kind!r},"
            f" does not match command {args.command!r}",
            file=sys.stderr,
        )
        return 2
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
        resolved["sim"]["seed"] = args.seed

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    text = _scenario_text(resolved, scenario)
    print(text)
    try:
        status, lines = _RUNNERS[kind](scenario, knobs, out)
    except TofmuxError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    body = text + "\n\n" + "\n".join(lines) + "\n"
    (out / "summary.txt").write_text(body)
    print("\n".join(lines))
    return status


if __name__ == "__main__":
    sys.exit(main())
