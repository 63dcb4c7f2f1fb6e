from fractions import Fraction

import pytest

from tofmux import CameraConfig, Scenario, make_default_scene, simulate_stream

# small sensor keeps unit-test simulations fast; acceptance tests use 80x60
SMALL_ROWS, SMALL_COLS = 15, 20


@pytest.fixture(scope="session")
def small_scene():
    # bump scaled with the sensor: a flat far plane must survive, and the
    # bump must stay bright enough to clip at the default well capacity
    return make_default_scene(rows=SMALL_ROWS, cols=SMALL_COLS, bump_radius_m=0.07)


@pytest.fixture(scope="session")
def beat_configs():
    cam_a = CameraConfig(
        frame_rate=30, intg_duty_cycle=0.28,
        n_col_tot=SMALL_COLS, n_row=SMALL_ROWS, n_quads=6,
    )
    cam_b = CameraConfig(
        frame_rate=28, intg_duty_cycle=0.28,
        n_col_tot=SMALL_COLS, n_row=SMALL_ROWS, n_quads=6,
    )
    return cam_a, cam_b


@pytest.fixture(scope="session")
def beat_scenario(small_scene, beat_configs):
    cam_a, cam_b = beat_configs
    return Scenario(
        cameras=((cam_a, Fraction(400, 10**6)), (cam_b, Fraction(0))),
        scene=small_scene,
        duration=Fraction(2),
        seed=7,
    )


@pytest.fixture(scope="session")
def beat_streams(beat_scenario):
    return simulate_stream(beat_scenario)
