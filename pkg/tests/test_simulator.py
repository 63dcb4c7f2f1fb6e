"""Scene construction, stream simulation, beat periods, CSV round trips."""

import math
from fractions import Fraction

import numpy as np
import pytest

from tofmux import (
    CameraConfig,
    ModulationParams,
    Scenario,
    SceneModel,
    ScenarioInvalid,
    assign_shifts,
    beat_period,
    correlate_closed_form,
    default_well_capacity,
    frames_equal,
    make_default_scene,
    parse_depth_csv,
    render_depth_csv,
    render_metrics_csv,
    simulate_stream,
)

ROWS, COLS = 15, 20


def _config(**kw):
    base = dict(frame_rate=30, intg_duty_cycle=0.28, n_col_tot=COLS, n_row=ROWS)
    base.update(kw)
    return CameraConfig(**base)


def _single_camera(scene, config=None, duration=Fraction(1, 5), seed=7):
    return Scenario(
        cameras=((config or _config(), Fraction(0)),),
        scene=scene,
        duration=duration,
        seed=seed,
    )


class TestScene:
    def test_default_geometry_frozen(self):
        scene = make_default_scene()
        assert scene.shape == (60, 80)
        assert scene.depth_map[0, 0] == 1.0
        # hemisphere apex lands between pixels; nearest center is half a
        # pitch off in both axes
        apex = 1.0 - math.sqrt(0.15**2 - 2 * 0.005**2)
        assert scene.depth_map.min() == pytest.approx(apex, abs=1e-12)
        center = np.unravel_index(scene.depth_map.argmin(), scene.shape)
        assert abs(center[0] - 30) <= 1 and abs(center[1] - 40) <= 1
        r_corner2 = 0.395**2 + 0.295**2
        brightest = 0.8 * (1 - 0.45 * (2 * 0.005**2) / r_corner2)
        assert scene.reflectivity_map.max() == pytest.approx(brightest, rel=1e-12)
        assert scene.reflectivity_map[0, 0] == pytest.approx(0.44, rel=1e-12)

    def test_maps_are_read_only(self):
        scene = make_default_scene(rows=ROWS, cols=COLS)
        with pytest.raises(ValueError):
            scene.depth_map[0, 0] = 2.0

    def test_model_validation(self):
        good = np.ones((4, 4))
        with pytest.raises(ValueError):
            SceneModel(depth_map=good, reflectivity_map=np.ones((4, 5)))
        with pytest.raises(ValueError):
            SceneModel(depth_map=np.zeros((4, 4)), reflectivity_map=good)
        with pytest.raises(ValueError):
            SceneModel(depth_map=good, reflectivity_map=good * 1.5)


class TestCapacityDefault:
    def test_matches_independent_bucket_route(self, small_scene):
        config = _config()
        capacity = default_well_capacity(small_scene, config)
        period = 1.0 / config.mod_freq
        worst = 0.0
        far = small_scene.depth_map.max()
        for r in range(ROWS):
            for c in range(COLS):
                if small_scene.depth_map[r, c] != far:
                    continue
                amp = small_scene.reflectivity_map[r, c] / far**2
                params = ModulationParams(
                    a_r=amp, b_r=amp, a_d=0.5, b_d=0.5,
                    mod_freq=config.mod_freq, tau=2 * far / 299_792_458.0,
                )
                _, a_c, b_c = correlate_closed_form(params, 0.0)
                worst = max(worst, a_c + b_c)
        assert capacity == pytest.approx(1.2 * worst, rel=1e-12)


class TestSingleCamera:
    def test_stream_shape_and_timestamps(self, small_scene):
        frames = simulate_stream(_single_camera(small_scene))[0]
        assert len(frames) == 6  # floor(0.2 * 30)
        for k, frame in enumerate(frames):
            assert frame.frame_index == k
            assert frame.timestamp_exact == Fraction(k, 30)
            assert frame.timestamp == float(Fraction(k, 30))
            assert frame.overlap_seconds == 0.0
            assert frame.depth_image.shape == (ROWS, COLS)

    def test_saturation_mask_matches_nan_holes(self, small_scene):
        frames = simulate_stream(_single_camera(small_scene))[0]
        frame = frames[0]
        assert 0 < frame.saturated_count < frame.n_pixels
        assert frame.saturated_count == int(frame.saturation_mask.sum())
        assert np.array_equal(np.isnan(frame.depth_image), frame.saturation_mask)

    def test_unsaturated_depths_match_scene(self, small_scene):
        frame = simulate_stream(_single_camera(small_scene))[0][0]
        ok = ~frame.saturation_mask
        assert np.allclose(
            frame.depth_image[ok], small_scene.depth_map[ok], atol=1e-9
        )

    def test_two_runs_identical(self, small_scene):
        a = simulate_stream(_single_camera(small_scene))[0]
        b = simulate_stream(_single_camera(small_scene))[0]
        assert all(frames_equal(x, y) for x, y in zip(a, b))


class TestInterference:
    def test_free_frames_match_baseline_pixels(self, small_scene, beat_streams):
        baseline = simulate_stream(_single_camera(small_scene, _config(n_quads=6)))[0][0]
        free = [f for f in beat_streams[0] if f.overlap_seconds == 0.0]
        assert free
        for frame in free:
            assert np.array_equal(
                frame.depth_image, baseline.depth_image, equal_nan=True
            )
            assert frame.saturated_count == baseline.saturated_count

    def test_interference_never_heals_saturation(self, small_scene, beat_streams):
        baseline = simulate_stream(_single_camera(small_scene, _config(n_quads=6)))[0][0]
        counts = [f.saturated_count for f in beat_streams[0]]
        assert all(c >= baseline.saturated_count for c in counts)
        assert max(counts) > baseline.saturated_count

    def test_overlap_seconds_reported(self, beat_streams):
        overlaps = [f.overlap_seconds for f in beat_streams[0][:5]]
        assert overlaps[1] == 0.0
        assert all(v > 0 for i, v in enumerate(overlaps) if i != 1)

    def test_scheduled_pair_stays_clean(self, small_scene):
        config = _config()
        schedule = assign_shifts(config, 2)
        scenario = Scenario(
            cameras=tuple((config, off) for off in schedule.offsets),
            scene=small_scene,
            duration=Fraction(1, 5),
            seed=7,
        )
        streams = simulate_stream(scenario)
        solo = simulate_stream(_single_camera(small_scene))[0]
        for stream in streams:
            for frame, clean in zip(stream, solo):
                assert frame.overlap_seconds == 0.0
                assert frame.saturated_count == clean.saturated_count

    def test_cross_gain_zero_disables_interference(self, small_scene, beat_configs):
        cam_a, cam_b = beat_configs
        scenario = Scenario(
            cameras=((cam_a, Fraction(400, 10**6)), (cam_b, Fraction(0))),
            scene=small_scene,
            duration=Fraction(1, 2),
            seed=7,
            cross_gain=0.0,
        )
        stream = simulate_stream(scenario)[0]
        counts = {f.saturated_count for f in stream}
        assert len(counts) == 1  # flat: overlap present but weightless


class TestBeatPeriod:
    def test_frozen_rate_pairs(self):
        a6 = _config(n_quads=6)
        b6 = _config(frame_rate=28, n_quads=6)
        assert beat_period(a6, b6) == 5
        assert beat_period(b6, a6) == 7
        assert beat_period(_config(), _config(frame_rate=29)) == 15
        assert beat_period(_config(), _config()) == 1

    def test_near_equal_rates_exceed_cap(self):
        a = _config()
        b = _config(frame_rate=Fraction(300001, 10000))
        assert beat_period(a, b) is None

    def test_cap_is_adjustable(self):
        a = _config()
        b = _config(frame_rate=29)
        assert beat_period(a, b, max_period=10) is None


class TestScenarioValidation:
    def test_rejections(self, small_scene):
        camera = (_config(), Fraction(0))
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=(), scene=small_scene, duration=1)
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=((_config(), Fraction(-1, 1000)),),
                     scene=small_scene, duration=1)
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=(camera,), scene=small_scene, duration=0)
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=(camera,), scene=small_scene, duration=1,
                     well_capacity=0.0)
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=(camera,), scene=small_scene, duration=1,
                     cross_gain=-0.5)

    def test_sensor_must_match_scene(self, small_scene):
        wrong = _config(n_col_tot=COLS + 1)
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=((wrong, Fraction(0)),), scene=small_scene, duration=1)

    def test_scene_beyond_ambiguity_rejected(self):
        deep = make_default_scene(rows=ROWS, cols=COLS, plane_depth_m=7.0)
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=((_config(), Fraction(0)),), scene=deep, duration=1)

    def test_coherent_needs_shared_mod_freq(self, small_scene):
        a = _config()
        b = _config(mod_freq=20_000_000)
        cams = ((a, Fraction(0)), (b, Fraction(0)))
        with pytest.raises(ScenarioInvalid):
            Scenario(cameras=cams, scene=small_scene, duration=1)
        incoherent = Scenario(
            cameras=cams, scene=small_scene, duration=1, coherent=False
        )
        assert incoherent.frame_counts() == (30, 30)

    def test_duration_must_cover_one_frame(self, small_scene):
        scenario = Scenario(
            cameras=((_config(), Fraction(0)),),
            scene=small_scene,
            duration=Fraction(1, 100),
        )
        with pytest.raises(ScenarioInvalid):
            simulate_stream(scenario)


class TestCsv:
    def test_depth_raster_round_trip(self, beat_streams, tmp_path):
        frames = beat_streams[0][:3]
        path = tmp_path / "raster.csv"
        render_depth_csv(frames, path)
        back = parse_depth_csv(path)
        assert len(back) == 3
        assert all(frames_equal(a, b) for a, b in zip(frames, back))

    def test_raster_header_rejected_when_foreign(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("alpha,beta\n1,2\n")
        with pytest.raises(ValueError):
            parse_depth_csv(path)

    def test_metrics_rows(self, beat_streams, tmp_path):
        frames = beat_streams[0][:5]
        path = tmp_path / "metrics.csv"
        render_metrics_csv(frames, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "frame_index,timestamp_us,overlap_us,saturated_count"
        first = lines[1].split(",")
        assert first[0] == "0"
        assert first[1] == "400"  # trigger offset
        assert int(first[3]) == frames[0].saturated_count
        free = lines[2].split(",")
        assert free[2] == "0"
