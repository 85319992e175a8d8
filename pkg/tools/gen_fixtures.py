"""Regenerate the bundled synthetic waveform fixtures.

Each fixture pair is tuned against the package's own normalization and
trace-distance pipeline so the shipped CSVs hit their target mismatch
values exactly at native binning:

* ``signal_fig1a`` / ``decoy_fig1a``: pump-current-modulated source look.
  Dual-peak signal versus a single decoy pulse with a turn-off tail,
  tuned to trace distance 0.4005.
* ``im_signal`` / ``im_decoy``: externally modulated source look. Nearly
  identical pulses, tuned to trace distance 3.6e-3.
* ``time_v_signal`` / ``time_v_decoy`` and ``freq_v_signal`` /
  ``freq_v_decoy``: two-laser source look with small time and frequency
  offsets, tuned so the joint product-distribution trace distance is
  0.1400.

Run from the repository root: ``python tools/gen_fixtures.py``
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from decoykit.distinguishability import (  # noqa: E402
    WaveformTrace,
    normalize,
    product_joint,
    trace_distance,
)

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "decoykit" / "fixtures"


def gauss(t: np.ndarray, center: float, sigma: float) -> np.ndarray:
    return np.exp(-0.5 * ((t - center) / sigma) ** 2)


def dist(t: np.ndarray, amps: np.ndarray, label: str):
    trace = WaveformTrace(tuple(t.tolist()), tuple(amps.tolist()), axis_label=label)
    return normalize(trace)


def write_csv(name: str, t: np.ndarray, amps: np.ndarray) -> None:
    path = OUT_DIR / name
    lines = ["coordinate,amplitude"]
    lines += [f"{repr(float(c))},{repr(float(a))}" for c, a in zip(t, amps)]
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path.name}: {len(t)} samples")


def pump_current_pair() -> None:
    """Dual-peak signal vs single-peak decoy, trace distance 0.4005."""
    t = np.linspace(0.0, 1200.0, 49)

    def shapes(sec_amp: float) -> tuple[np.ndarray, np.ndarray]:
        signal = gauss(t, 430.0, 78.0) + sec_amp * gauss(t, 810.0, 70.0)
        turnoff = np.where(t >= 490.0, np.exp(-(t - 490.0) / 160.0), gauss(t, 490.0, 40.0))
        decoy = gauss(t, 490.0, 62.0) + 0.25 * turnoff
        return signal, decoy

    lo, hi = 0.001, 5.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        sig, dec = shapes(mid)
        d = trace_distance(dist(t, sig, "time"), dist(t, dec, "time"))
        if d < 0.4005:
            lo = mid
        else:
            hi = mid
    sig, dec = shapes(mid)
    d = trace_distance(dist(t, sig, "time"), dist(t, dec, "time"))
    print(f"pump-current pair: secondary amplitude {mid:.9f}, D = {d:.9f}")
    write_csv("signal_fig1a.csv", t, sig)
    write_csv("decoy_fig1a.csv", t, dec)


def modulator_pair() -> None:
    """Nearly identical pulses from an external modulator, D = 3.6e-3."""
    t = np.linspace(0.0, 1200.0, 61)

    def shapes(shift: float) -> tuple[np.ndarray, np.ndarray]:
        signal = gauss(t, 600.0, 110.0)
        decoy = gauss(t, 600.0 + shift, 110.0)
        return signal, decoy

    lo, hi = 0.0, 30.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        sig, dec = shapes(mid)
        d = trace_distance(dist(t, sig, "time"), dist(t, dec, "time"))
        if d < 3.6e-3:
            lo = mid
        else:
            hi = mid
    sig, dec = shapes(mid)
    d = trace_distance(dist(t, sig, "time"), dist(t, dec, "time"))
    print(f"modulator pair: shift {mid:.9f} ps, D = {d:.9e}")
    write_csv("im_signal.csv", t, sig)
    write_csv("im_decoy.csv", t, dec)


def two_laser_pairs() -> None:
    """Time and frequency pairs whose product-joint mismatch is 0.1400."""
    t = np.linspace(0.0, 1200.0, 61)
    time_sig = gauss(t, 600.0, 150.0)
    time_dec = gauss(t, 640.0, 150.0)
    dt_sig = dist(t, time_sig, "time")
    dt_dec = dist(t, time_dec, "time")
    d_time = trace_distance(dt_sig, dt_dec)

    f = np.linspace(-40.0, 40.0, 65)

    def freq_shapes(shift: float) -> tuple[np.ndarray, np.ndarray]:
        return gauss(f, -shift / 2.0, 8.0), gauss(f, shift / 2.0, 8.0)

    lo, hi = 0.0, 20.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        fs, fd = freq_shapes(mid)
        joint = trace_distance(
            product_joint(dt_sig, dist(f, fs, "frequency")),
            product_joint(dt_dec, dist(f, fd, "frequency")),
        )
        if joint < 0.1400:
            lo = mid
        else:
            hi = mid
    fs, fd = freq_shapes(mid)
    df_sig = dist(f, fs, "frequency")
    df_dec = dist(f, fd, "frequency")
    d_freq = trace_distance(df_sig, df_dec)
    joint = trace_distance(product_joint(dt_sig, df_sig), product_joint(dt_dec, df_dec))
    print(
        f"two-laser pairs: freq shift {mid:.9f} GHz, D_time = {d_time:.6f}, "
        f"D_freq = {d_freq:.6f}, D_joint = {joint:.9f}"
    )
    write_csv("time_v_signal.csv", t, time_sig)
    write_csv("time_v_decoy.csv", t, time_dec)
    write_csv("freq_v_signal.csv", f, fs)
    write_csv("freq_v_decoy.csv", f, fd)


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    pump_current_pair()
    modulator_pair()
    two_laser_pairs()


if __name__ == "__main__":
    main()
