"""Command-line front end.

Three subcommands cover the analysis pipelines:

* ``trace-distance``: normalize measured waveforms and report how
  distinguishable the intensity settings are.
* ``simulate``: rate-versus-distance curves under the standard, imperfect,
  and calibrated security analyses, as CSV plus rendered figures and an
  optional gnuplot script.
* ``attack``: the windowed photon-number-splitting attack scan and its
  security-breach verdict per distance.

Every command is deterministic: identical inputs produce byte-identical
output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import bundled
from .attack import BreachPoint, breach_scan, describe_windows, first_breach_distance
from .bounds import REGIMES
from .channel import PRESETS, DetectorParams, detector_from_config
from .distinguishability import (
    MismatchSpec,
    SideChannelDistribution,
    WaveformError,
    ingest_waveform,
    export_distribution_csv,
    normalize,
    product_joint,
    trace_distance,
)
from .keyrate import IntensityGrid, RateCurve, max_distance, rate_vs_distance
from .plotting import (
    curve_label,
    gnuplot_breach_script,
    gnuplot_rates_script,
    render_breach_scan,
    render_rate_curves,
)


def _fmt(value: float) -> str:
    """6 significant digits for console output; CSVs keep full precision."""
    return f"{value:.6g}"


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with Path(path).open() as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: config root must be a JSON object")
    return doc


def _resolve_detector(args: argparse.Namespace, config: dict) -> DetectorParams:
    if getattr(args, "preset", None):
        return detector_from_config(args.preset)
    if "detector" in config:
        return detector_from_config(config["detector"])
    return PRESETS["gys"]


def _resolve_waveform(path_text: str) -> Path:
    """Resolve a user-supplied path, falling back to the bundled fixtures."""
    path = Path(path_text)
    if path.is_file():
        return path
    try:
        return bundled.fixture_path(path_text)
    except FileNotFoundError:
        raise WaveformError(f"waveform file not found: {path_text}") from None


def _load_distribution(
    path_text: str, bins: int | None, axis_label: str
) -> SideChannelDistribution:
    trace = ingest_waveform(_resolve_waveform(path_text), axis_label=axis_label)
    if bins is None:
        return normalize(trace)
    edges = _equal_width_edges(trace.coordinates[0], trace.coordinates[-1], bins)
    return normalize(trace, edges)


def _equal_width_edges(lo: float, hi: float, bins: int) -> list[float]:
    if bins < 1:
        raise ValueError("--bins must be >= 1")
    width = (hi - lo) / bins
    return [lo + k * width for k in range(bins)] + [hi]


def _load_pair(
    signal: str, decoy: str, bins: int | None, axis_label: str
) -> tuple[SideChannelDistribution, SideChannelDistribution]:
    f_signal = _load_distribution(signal, bins, axis_label)
    f_decoy = _load_distribution(decoy, bins, axis_label)
    if not f_signal.same_grid(f_decoy):
        # Differing sample grids: rebin both onto the union coordinate range.
        lo = min(f_signal.axes[0].edges[0], f_decoy.axes[0].edges[0])
        hi = max(f_signal.axes[0].edges[-1], f_decoy.axes[0].edges[-1])
        n = max(f_signal.axes[0].n_bins, f_decoy.axes[0].n_bins)
        raise ValueError(
            "signal and decoy waveforms are sampled on different grids; "
            f"pass --bins to rebin both (e.g. --bins {n} over [{lo:g}, {hi:g}])"
        )
    return f_signal, f_decoy


# ----------------------------------------------------------------------------
# trace-distance


def cmd_trace_distance(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    f_signal, f_decoy = _load_pair(args.signal, args.decoy, args.bins, args.axis_label)
    d_first = trace_distance(f_signal, f_decoy)
    print(f"D[{args.axis_label}] = {_fmt(d_first)}")
    export_distribution_csv(f_signal, out_dir / f"dist_signal_{args.axis_label}.csv")
    export_distribution_csv(f_decoy, out_dir / f"dist_decoy_{args.axis_label}.csv")

    if args.signal2 or args.decoy2:
        if not (args.signal2 and args.decoy2):
            raise ValueError("--signal2 and --decoy2 must be given together")
        g_signal, g_decoy = _load_pair(args.signal2, args.decoy2, args.bins2, args.axis_label2)
        d_second = trace_distance(g_signal, g_decoy)
        print(f"D[{args.axis_label2}] = {_fmt(d_second)}")
        export_distribution_csv(g_signal, out_dir / f"dist_signal_{args.axis_label2}.csv")
        export_distribution_csv(g_decoy, out_dir / f"dist_decoy_{args.axis_label2}.csv")
        if args.joint:
            d_joint = trace_distance(
                product_joint(f_signal, g_signal), product_joint(f_decoy, g_decoy)
            )
            print(f"D[joint] = {_fmt(d_joint)}")
    elif args.joint:
        raise ValueError("--joint needs the second-axis pair (--signal2/--decoy2)")
    return 0


# ----------------------------------------------------------------------------
# simulate


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one ``simulate`` invocation."""

    detector: DetectorParams
    regimes: tuple[str, ...]
    d_values: tuple[float, ...]
    grid: IntensityGrid
    l_grid: tuple[float, ...]
    out_dir: Path
    plot_script: bool


def _resolve_simulate(args: argparse.Namespace) -> RunConfig:
    config = _load_config(args.config)
    detector = _resolve_detector(args, config)

    regimes_spec = args.regime or config.get("regime", "imperfect")
    if isinstance(regimes_spec, str):
        regimes = tuple(r.strip() for r in regimes_spec.split(",") if r.strip())
    else:
        regimes = tuple(regimes_spec)
    if regimes == ("all",):
        regimes = REGIMES
    for regime in regimes:
        if regime not in REGIMES:
            raise ValueError(f"unknown regime {regime!r}; expected {REGIMES} or 'all'")

    mismatch_cfg = dict(config.get("mismatch", {}))
    if args.d_mu_nu is not None:
        mismatch_cfg = {"d_mu_nu": [float(v) for v in args.d_mu_nu.split(",")]}
    if args.signal:
        mismatch_cfg = {"signal_waveform": args.signal, "decoy_waveform": args.decoy}
    has_d = "d_mu_nu" in mismatch_cfg
    has_pair = "signal_waveform" in mismatch_cfg or "decoy_waveform" in mismatch_cfg
    if has_d == has_pair:
        raise ValueError(
            "mismatch must supply exactly one of an explicit d_mu_nu or a waveform pair"
        )
    if has_d:
        raw = mismatch_cfg["d_mu_nu"]
        d_values = tuple(float(v) for v in (raw if isinstance(raw, list) else [raw]))
    else:
        if not (mismatch_cfg.get("signal_waveform") and mismatch_cfg.get("decoy_waveform")):
            raise ValueError("waveform mismatch needs both signal_waveform and decoy_waveform")
        f_signal, f_decoy = _load_pair(
            mismatch_cfg["signal_waveform"], mismatch_cfg["decoy_waveform"], args.bins, "time"
        )
        d_values = (trace_distance(f_signal, f_decoy),)

    grid_cfg = config.get("intensity_grid", {})
    mu_range = tuple(args.mu_range or grid_cfg.get("mu", (0.01, 0.5, 0.01)))
    nu_range = tuple(args.nu_range or grid_cfg.get("nu", (0.01, 0.2, 0.01)))
    grid = IntensityGrid(mu_range=mu_range, nu_range=nu_range)

    dist_cfg = config.get("distance_grid", {})
    start = args.l_start if args.l_start is not None else float(dist_cfg.get("start", 0.0))
    stop = args.l_stop if args.l_stop is not None else float(dist_cfg.get("stop", 160.0))
    step = args.l_step if args.l_step is not None else float(dist_cfg.get("step", 1.0))
    l_grid = _length_grid(start, stop, step)

    out_dir = Path(args.out or config.get("out_dir", "out"))
    return RunConfig(
        detector=detector,
        regimes=regimes,
        d_values=d_values,
        grid=grid,
        l_grid=l_grid,
        out_dir=out_dir,
        plot_script=bool(args.plot_script),
    )


def _length_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    if step <= 0 or stop < start:
        raise ValueError("distance grid needs step > 0 and stop >= start")
    count = int((stop - start) / step + 1e-9) + 1
    return tuple(start + k * step for k in range(count))


def _curve_csv_name(curve: RateCurve) -> str:
    return f"rates_{curve.regime}_D{curve.mismatch.d_mu_nu:.6g}.csv"


def _write_curve_csv(curve: RateCurve, path: Path) -> None:
    lines = ["length_km,rate,mu,nu"]
    for p in curve.points:
        lines.append(f"{p.length_km!r},{p.rate!r},{p.mu!r},{p.nu!r}")
    path.write_text("\n".join(lines) + "\n")


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve_simulate(args)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    curves: list[RateCurve] = []
    for regime in cfg.regimes:
        for d in cfg.d_values:
            curve = rate_vs_distance(
                cfg.detector, MismatchSpec(d_mu_nu=d), regime, cfg.l_grid, cfg.grid
            )
            curves.append(curve)
            _write_curve_csv(curve, cfg.out_dir / _curve_csv_name(curve))
            print(
                f"{regime}, D={d:.6g}: max distance {_fmt(max_distance(curve))} km"
                f" -> {_curve_csv_name(curve)}"
            )
    render_rate_curves(curves, cfg.out_dir / "rates.png")
    if cfg.plot_script:
        script = gnuplot_rates_script(
            [_curve_csv_name(c) for c in curves],
            [curve_label(c) for c in curves],
            "rates_gnuplot.png",
        )
        (cfg.out_dir / "rates.gp").write_text(script)
    return 0


# ----------------------------------------------------------------------------
# attack


def _write_breach_csv(points: Sequence[BreachPoint], path: Path) -> None:
    lines = ["length_km,r_lower,r_upper,breached,p_ss,p_ds,p_sd,p_dd"]
    for p in points:
        if p.outcome.feasible:
            guess = p.outcome.guess
            tail = f"{p.r_upper!r},{int(p.breached)},{guess.p_ss!r},{guess.p_ds!r},{guess.p_sd!r},{guess.p_dd!r}"
        else:
            tail = f",{int(p.breached)},,,,"
        lines.append(f"{p.length_km!r},{p.r_lower!r},{tail}")
    path.write_text("\n".join(lines) + "\n")


def _write_windows_txt(
    points: Sequence[BreachPoint], dist: SideChannelDistribution, path: Path
) -> None:
    lines = []
    for p in points:
        if p.outcome.feasible and p.outcome.windows is not None:
            lines.append(f"L={p.length_km:g} km: {describe_windows(p.outcome.windows, dist)}")
        else:
            lines.append(f"L={p.length_km:g} km: attack infeasible")
    path.write_text("\n".join(lines) + "\n")


def cmd_attack(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    detector = _resolve_detector(args, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    f_signal, f_decoy = _load_pair(args.signal, args.decoy, args.bins, args.axis_label)
    l_grid = _length_grid(args.l_start, args.l_stop, args.l_step)
    points = breach_scan(detector, f_signal, f_decoy, args.mu, args.nu, l_grid)
    _write_breach_csv(points, out_dir / "attack_scan.csv")
    _write_windows_txt(points, f_signal, out_dir / "attack_windows.txt")
    render_breach_scan(points, out_dir / "attack.png")
    if args.plot_script:
        (out_dir / "attack.gp").write_text(
            gnuplot_breach_script("attack_scan.csv", "attack_gnuplot.png")
        )
    first = first_breach_distance(points)
    if first is None:
        print("no breach")
    else:
        print(f"first breach at {_fmt(first)} km")
    return 0


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoykit",
        description="Decoy-state distinguishability, key-rate, and attack analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--preset", help=f"detector preset ({', '.join(sorted(PRESETS))})")
    common.add_argument("--out", default="out", help="output directory (default: out)")

    p_td = sub.add_parser(
        "trace-distance", parents=[common], help="distinguishability of two waveforms"
    )
    p_td.add_argument("--signal", required=True, help="signal waveform CSV")
    p_td.add_argument("--decoy", required=True, help="decoy waveform CSV")
    p_td.add_argument("--signal2", help="second-axis signal waveform CSV")
    p_td.add_argument("--decoy2", help="second-axis decoy waveform CSV")
    p_td.add_argument("--joint", action="store_true", help="also report the product-joint D")
    p_td.add_argument("--bins", type=int, help="rebin first axis to this many equal bins")
    p_td.add_argument("--bins2", type=int, help="rebin second axis to this many equal bins")
    p_td.add_argument("--axis-label", default="time")
    p_td.add_argument("--axis-label2", default="frequency")
    p_td.set_defaults(func=cmd_trace_distance)

    p_sim = sub.add_parser(
        "simulate", parents=[common], help="rate-versus-distance curves per regime and D"
    )
    p_sim.add_argument("--regime", help="comma list of regimes, or 'all'")
    p_sim.add_argument("--d-mu-nu", help="comma list of explicit mismatch values")
    p_sim.add_argument("--signal", help="signal waveform CSV (mismatch from data)")
    p_sim.add_argument("--decoy", help="decoy waveform CSV (mismatch from data)")
    p_sim.add_argument("--bins", type=int, help="rebin waveforms to this many equal bins")
    p_sim.add_argument("--l-start", type=float, help="first distance in km (default 0)")
    p_sim.add_argument("--l-stop", type=float, help="last distance in km (default 160)")
    p_sim.add_argument("--l-step", type=float, help="distance step in km (default 1)")
    p_sim.add_argument("--mu-range", type=float, nargs=3, metavar=("LO", "HI", "STEP"))
    p_sim.add_argument("--nu-range", type=float, nargs=3, metavar=("LO", "HI", "STEP"))
    p_sim.add_argument("--plot-script", action="store_true", help="emit a gnuplot script")
    p_sim.set_defaults(func=cmd_simulate)

    p_att = sub.add_parser(
        "attack", parents=[common], help="photon-number-splitting attack breach scan"
    )
    p_att.add_argument("--signal", required=True, help="signal waveform CSV")
    p_att.add_argument("--decoy", required=True, help="decoy waveform CSV")
    p_att.add_argument("--mu", type=float, default=0.6, help="signal intensity (default 0.6)")
    p_att.add_argument("--nu", type=float, default=0.2, help="decoy intensity (default 0.2)")
    p_att.add_argument("--bins", type=int, help="rebin waveforms to this many equal bins")
    p_att.add_argument("--axis-label", default="time")
    p_att.add_argument("--l-start", type=float, default=0.0)
    p_att.add_argument("--l-stop", type=float, default=80.0)
    p_att.add_argument("--l-step", type=float, default=1.0)
    p_att.add_argument("--plot-script", action="store_true", help="emit a gnuplot script")
    p_att.set_defaults(func=cmd_attack)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "attack" and args.mu <= args.nu:
        parser.error(f"--mu must exceed --nu (got mu={args.mu}, nu={args.nu})")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
