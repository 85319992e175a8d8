"""Figure rendering and gnuplot script emission for the CLI report paths.

Figures are rendered headless and without embedded timestamps so repeated
runs with identical inputs produce identical bytes. The gnuplot scripts are
plain text and reference only the CSV files emitted next to them.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .attack import BreachPoint  # noqa: E402
from .keyrate import RateCurve  # noqa: E402

_SAVE_OPTS = {"dpi": 120, "metadata": {"Date": None}}


def curve_label(curve: RateCurve) -> str:
    return f"{curve.regime}, D={curve.mismatch.d_mu_nu:g}"


def render_rate_curves(curves: Sequence[RateCurve], path: str | Path) -> None:
    """Log-scale key rate versus distance, one line per curve."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for curve in curves:
        xs = [p.length_km for p in curve.points if p.rate > 0.0]
        ys = [p.rate for p in curve.points if p.rate > 0.0]
        if xs:
            ax.semilogy(xs, ys, label=curve_label(curve))
        else:
            ax.plot([], [], label=curve_label(curve) + " (no key)")
    ax.set_xlabel("distance (km)")
    ax.set_ylabel("key rate per pulse")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def render_breach_scan(points: Sequence[BreachPoint], path: str | Path) -> None:
    """Believed rate against the attack's upper bound, breaches marked."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    lower = [(p.length_km, p.r_lower) for p in points if p.r_lower > 0.0]
    upper = [(p.length_km, p.r_upper) for p in points if p.r_upper and p.r_upper > 0.0]
    if lower:
        ax.semilogy(*zip(*lower), label="believed rate (lower bound)")
    if upper:
        ax.semilogy(*zip(*upper), "--", label="attack rate (upper bound)")
    breached = [(p.length_km, p.r_lower) for p in points if p.breached and p.r_lower > 0.0]
    if breached:
        ax.semilogy(*zip(*breached), "rx", markersize=5, label="breached")
    ax.set_xlabel("distance (km)")
    ax.set_ylabel("key rate per pulse")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def gnuplot_rates_script(csv_names: Sequence[str], labels: Sequence[str], png_name: str) -> str:
    """Gnuplot commands reproducing the rate-curve figure from the CSVs."""
    lines = [
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        f"set output '{png_name}'",
        "set logscale y",
        "set xlabel 'distance (km)'",
        "set ylabel 'key rate per pulse'",
        "set grid",
    ]
    plots = [
        f"'{name}' using 1:($2 > 0 ? $2 : 1/0) skip 1 with lines title '{label}'"
        for name, label in zip(csv_names, labels)
    ]
    lines.append("plot \\\n    " + ", \\\n    ".join(plots))
    return "\n".join(lines) + "\n"


def gnuplot_breach_script(csv_name: str, png_name: str) -> str:
    lines = [
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        f"set output '{png_name}'",
        "set logscale y",
        "set xlabel 'distance (km)'",
        "set ylabel 'key rate per pulse'",
        "set grid",
        "plot \\\n"
        f"    '{csv_name}' using 1:($2 > 0 ? $2 : 1/0) skip 1 with lines title 'believed rate', \\\n"
        f"    '{csv_name}' using 1:($3 > 0 ? $3 : 1/0) skip 1 with lines dashtype 2 title 'attack bound'",
    ]
    return "\n".join(lines) + "\n"
