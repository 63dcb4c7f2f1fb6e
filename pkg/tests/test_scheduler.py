"""Slot assignment and exact pairwise overlap verification."""

from fractions import Fraction

import pytest

from tofmux import (
    CameraConfig,
    CapacityExceeded,
    assign_shifts,
    cycles_to_seconds,
    derive_quad_timing,
    max_cameras,
    pairwise_overlap,
    verify_schedule,
)


def _config(duty=0.28, **kw):
    base = dict(frame_rate=30, intg_duty_cycle=duty, n_col_tot=80, n_row=60)
    base.update(kw)
    return CameraConfig(**base)


QIN_S = Fraction(7, 3000)  # 112000 cycles at 48 MHz


def test_max_cameras_by_duty():
    expectations = {0.28: 3, 0.5: 2, 0.75: 1, 0.1: 10}
    for duty, expected in expectations.items():
        assert max_cameras(derive_quad_timing(_config(duty))) == expected


def test_assign_three_slots_frozen():
    schedule = assign_shifts(_config(), 3)
    assert schedule.slot_cycles == 112_000
    assert schedule.offsets == (0, QIN_S, 2 * QIN_S)
    assert schedule.offset_cycles() == (0, 112_000, 224_000)


def test_fourth_camera_refused_with_bound():
    with pytest.raises(CapacityExceeded) as err:
        assign_shifts(_config(), 4)
    assert err.value.bound == 3
    assert err.value.requested == 4


def test_single_camera_trivially_valid():
    report = verify_schedule(assign_shifts(_config(), 1))
    assert report.valid
    assert report.pair_overlap == {}


def test_full_slots_verify_to_zero():
    report = verify_schedule(assign_shifts(_config(), 3))
    assert report.valid
    assert set(report.pair_overlap) == {(0, 1), (0, 2), (1, 2)}
    assert all(value == 0 for value in report.pair_overlap.values())


def test_pairwise_overlap_frozen_cases():
    config = _config()
    # same trigger: all four quads fully shared within one frame
    assert pairwise_overlap(config, config, 0, 0) == 4 * QIN_S
    # 1 ms apart: each quad shares t_qin - 1 ms
    assert pairwise_overlap(config, config, 0, Fraction(1, 1000)) == 4 * (
        QIN_S - Fraction(1, 1000)
    )
    # inside the free band: nothing shared
    assert pairwise_overlap(config, config, 0, Fraction(3, 1000)) == 0
    # symmetric in the pair
    assert pairwise_overlap(config, config, Fraction(3, 1000), 0) == 0


def test_nudged_slot_reintroduces_overlap():
    config = _config()
    schedule = assign_shifts(config, 3)
    nudged = [
        (config, offset) if idx != 1 else (config, offset - Fraction(1, 10**4))
        for idx, (offset) in enumerate(schedule.offsets)
    ]
    report = verify_schedule(nudged)
    assert not report.valid
    (pair, worst) = report.worst_pair()
    assert pair == (0, 1)
    assert worst == 4 * Fraction(1, 10**4)


def test_verify_accepts_config_offset_pairs():
    config = _config()
    qin = cycles_to_seconds(derive_quad_timing(config).t_qin, config)
    report = verify_schedule([(config, Fraction(0)), (config, qin)])
    assert report.valid


def test_unequal_rates_still_verifiable():
    fast = _config()
    slow = _config(frame_rate=28, n_quads=6)
    report = verify_schedule([(fast, Fraction(0)), (slow, Fraction(0))])
    assert (0, 1) in report.pair_overlap
    assert report.pair_overlap[(0, 1)] > 0


def test_offsets_seconds_is_float_view_of_cycles():
    config = _config()
    schedule = assign_shifts(config, 3)
    for cycles, seconds in zip(schedule.offset_cycles(), schedule.offsets_seconds()):
        assert isinstance(seconds, float)
        assert seconds == float(cycles_to_seconds(cycles, config))
