"""Beating frame rates: interference that comes and goes on a schedule.

At 30 vs 28 fps the mutual shift between the two cameras drifts by a
fixed amount every frame, so the overlap pattern repeats after a small
number of frames. With six quads per frame the beat period is five:
four frames are corrupted to varying degrees, one is pristine. The free
frame is predictable from timestamps alone.
"""

from fractions import Fraction
from pathlib import Path

from tofmux import (
    CameraConfig,
    Scenario,
    beat_period,
    make_default_scene,
    periodicity_analysis,
    simulate_stream,
)

OUT = Path(__file__).parent / "out"


def main():
    cam_a = CameraConfig(frame_rate=30, intg_duty_cycle=0.28, n_col_tot=80, n_row=60,
                         n_quads=6)
    cam_b = CameraConfig(frame_rate=28, intg_duty_cycle=0.28, n_col_tot=80, n_row=60,
                         n_quads=6)
    period = beat_period(cam_a, cam_b)
    print(f"beat period 30 vs 28 fps, 6 quads: {period} frames")
    print(f"swapped observer (28 watching 30): {beat_period(cam_b, cam_a)} frames\n")

    scenario = Scenario(
        cameras=((cam_a, Fraction(400, 10**6)), (cam_b, Fraction(0))),
        scene=make_default_scene(),
        duration=Fraction(3, 2),
        seed=7,
    )
    stream_a, stream_b = simulate_stream(scenario)
    labels = periodicity_analysis(stream_a, stream_b, cam_a, cam_b)

    print(f"{'frame':>5} {'overlap_us':>11} {'saturated':>10} {'label':>6}")
    for frame, label in zip(stream_a[:15], labels[:15]):
        mark = "free" if label.mci_free else "hit"
        bar = "#" * (frame.saturated_count // 300)
        print(f"{frame.frame_index:>5} {frame.overlap_seconds * 1e6:>11.1f}"
              f" {frame.saturated_count:>10} {mark:>6}  {bar}")

    frees = [l.frame_index for l in labels if l.mci_free]
    print(f"\nfree frames: {frees}")
    print("every fifth frame, as the timestamps promised")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    OUT.mkdir(exist_ok=True)
    counts = [f.saturated_count for f in stream_a]
    colors = ["tab:green" if l.mci_free else "tab:red" for l in labels]
    fig, ax = plt.subplots(figsize=(9, 3.5))
    ax.bar([f.frame_index for f in stream_a], counts, color=colors)
    for x in range(0, len(counts) + 1, period):
        ax.axvline(x - 0.5, color="gray", lw=0.5)
    ax.set_xlabel("frame index (gridlines every beat period)")
    ax.set_ylabel("saturated pixels")
    fig.tight_layout()
    png = OUT / "beat_pattern.png"
    fig.savefig(png, dpi=120)
    print(f"wrote {png}")


if __name__ == "__main__":
    main()
