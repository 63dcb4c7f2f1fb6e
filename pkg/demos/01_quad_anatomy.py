"""Anatomy of a depth frame: where the cycles go.

A four-bucket CW camera spends each quad period on reset, integration,
readout and dead time, all counted in system clock cycles. This walks
the budget for a 30 fps sensor across integration duty cycles and shows
where the timing turns infeasible.
"""

from tofmux import CameraConfig, InfeasibleTiming, derive_quad_timing, max_cameras

ROWS, COLS = 60, 80


def main():
    print("30 fps, 4 quads, 1 subframe, 80x60, 48 MHz clock\n")
    header = f"{'duty':>6} {'t_qt':>8} {'t_rs':>6} {'t_qin':>8} {'t_rd':>6} {'t_qd':>8} {'cams':>5}"
    print(header)
    print("-" * len(header))
    for duty in (0.05, 0.10, 0.28, 0.50, 0.75, 0.95, 0.994, 0.999):
        config = CameraConfig(
            frame_rate=30, intg_duty_cycle=duty, n_col_tot=COLS, n_row=ROWS
        )
        try:
            qt = derive_quad_timing(config)
        except InfeasibleTiming as exc:
            print(f"{duty:>6} infeasible: {exc}")
            continue
        print(
            f"{duty:>6} {qt.t_qt:>8} {qt.t_rs:>6} {qt.t_qin:>8} {qt.t_rd:>6}"
            f" {qt.t_qd:>8} {max_cameras(qt):>5}"
        )
    print()
    config = CameraConfig(frame_rate=30, intg_duty_cycle=0.28, n_col_tot=COLS, n_row=ROWS)
    qt = derive_quad_timing(config)
    total = qt.t_rs + qt.t_qin + qt.t_rd + qt.t_qd
    print(f"budget check at duty 0.28: {qt.t_rs} + {qt.t_qin} + {qt.t_rd} + {qt.t_qd}"
          f" = {total} = t_qt ({qt.t_qt})")
    print("dead time is the slack other cameras can integrate in.")


if __name__ == "__main__":
    main()
