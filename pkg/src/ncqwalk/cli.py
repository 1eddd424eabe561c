"""Command-line entry point: ``ncqwalk <command> [options]``.

Exit status: 0 on success, 2 on usage errors, 3 on data errors.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from ncqwalk import io as nio
from ncqwalk.coins import CoinParams
from ncqwalk.errors import (
    DegenerateDistributionError,
    InvalidArgumentError,
    NCQWalkError,
    NoSignalError,
)
from ncqwalk.experiment import (
    LoopParams,
    ingest_histogram,
    max_steps,
    multiphoton_probability,
    rebin,
    simulate_histogram,
    waveplate_settings,
)
from ncqwalk.momentum import band_structure
from ncqwalk.observables import (
    gamma_scan,
    inclusive_range,
    position_distribution,
    similarity,
    summary_stats,
    trajectory_scan,
)
from ncqwalk.topology import dirac_points, phase_diagram
from ncqwalk.walk import InitialState, evolve

EXIT_USAGE = 2
EXIT_DATA = 3
OCCUPIED = 1e-14


class UsageError(Exception):
    pass


def _angle(text: str) -> float:
    try:
        return nio.parse_angle(text)
    except InvalidArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _initial(args) -> InitialState:
    if args.initial == "plus":
        return InitialState.plus()
    if args.initial == "minus":
        return InitialState.minus()
    if args.h is None and args.v is None:
        raise UsageError("--initial custom needs --h and/or --v")
    h = complex(args.h or "0")
    v = complex(args.v or "0")
    if h == 0 and v == 0:
        raise UsageError("custom spinor must be non-zero")
    return InitialState.custom(args.position, h, v)


def _add_initial(p: argparse.ArgumentParser) -> None:
    p.add_argument("--initial", choices=("plus", "minus", "custom"), default="plus",
                   help="initial coin state (chirality eigenstates or custom)")
    p.add_argument("--position", type=int, default=0, help="start site for --initial custom")
    p.add_argument("--h", help="H amplitude for --initial custom, e.g. 1 or 0.5+0.5j")
    p.add_argument("--v", help="V amplitude for --initial custom")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gnuplot-script", action="store_true",
                   help="also write a gnuplot script for the main output")


class _Outputs:
    """Collects output files in memory; nothing is written until ``flush``."""

    def __init__(self, out_dir: str, fmt: str):
        self.dir = Path(out_dir)
        self.fmt = fmt
        self.files: list[tuple[Path, str]] = []

    def table(self, stem: str, columns, rows) -> Path:
        path = self.dir / f"{stem}.{self.fmt}"
        self.files.append((path, nio.table_text(columns, rows, self.fmt)))
        return path

    def text(self, name: str, body: str) -> Path:
        path = self.dir / name
        self.files.append((path, body))
        return path

    def flush(self) -> None:
        for path, body in self.files:
            nio.atomic_write(path, body)


def _gnuplot(title: str, data: Path, using: str, style: str = "linespoints") -> str:
    sep = "set datafile separator ','\n" if data.suffix == ".csv" else ""
    return (
        f"{sep}set title '{title}'\n"
        f"plot '{data.name}' every ::1 using {using} with {style} notitle\n"
    )


def cmd_walk(args, out: _Outputs) -> None:
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    initial = _initial(args)
    params = CoinParams(args.theta, args.phi)
    state = evolve(initial, params, args.steps)
    dist = position_distribution(state)
    data = out.table("distribution", ["x", "p"], nio.distribution_rows(dist, OCCUPIED))
    mean, var, pr = summary_stats(dist)
    out.text("summary.json", nio.json_text({
        "theta": params.theta, "phi": params.phi, "steps": args.steps,
        "initial": initial.kind, "norm": state.norm(),
        "mean": mean, "variance": var, "participation_ratio": pr,
    }))
    if args.amplitudes:
        rows = [
            (int(x), a[0].real, a[0].imag, a[1].real, a[1].imag)
            for x, a in zip(state.positions, state.amplitudes)
        ]
        out.table("amplitudes", ["x", "re_h", "im_h", "re_v", "im_v"], rows)
    if args.gnuplot_script:
        out.text("distribution.gp", _gnuplot("P(x)", data, "1:2", "boxes"))


def cmd_dispersion(args, out: _Outputs) -> None:
    if args.samples < 3:
        raise UsageError("--samples must be >= 3")
    band = band_structure(CoinParams(args.theta, args.phi), args.samples)
    rows = []
    for s in band.samples:
        n = s.bloch_vector or (None, None, None)
        rows.append((s.k, s.energy_plus, s.energy_minus, *n))
    data = out.table("band", ["k", "E_plus", "E_minus", "n_x", "n_y", "n_z"], rows)
    if args.gnuplot_script:
        out.text("band.gp", _gnuplot("E(k)", data, "1:2", "lines")
                 + f"replot '{data.name}' every ::1 using 1:3 with lines notitle\n")


def cmd_phase_diagram(args, out: _Outputs) -> None:
    if args.resolution < 51:
        raise UsageError("--resolution must be >= 51")
    if args.k_resolution < 64:
        raise UsageError("--k-resolution must be >= 64")
    if args.samples_along_line < 1000:
        raise UsageError("--samples-along-line must be >= 1000")
    diagram = phase_diagram(args.resolution, args.k_resolution, args.samples_along_line,
                            workers=args.threads)
    rows = []
    for i, t in enumerate(diagram.theta_grid):
        for j, p in enumerate(diagram.phi_grid):
            rows.append((t, p, diagram.gap_zero[i, j], diagram.gap_pi[i, j],
                         diagram.q_zero[i, j], diagram.q_pi[i, j], diagram.boundary[i, j]))
    data = out.table("phase_diagram",
                     ["theta", "phi", "gap0", "gapPi", "q0", "qPi", "boundary"], rows)
    if args.format == "csv":
        out.text("phase_diagram.json", nio.json_text({
            "resolution": args.resolution,
            "k_resolution": diagram.k_resolution,
            "samples_along_line": diagram.samples_along_line,
            "theta_grid": diagram.theta_grid,
            "phi_grid": diagram.phi_grid,
            "gap0": diagram.gap_zero,
            "gapPi": diagram.gap_pi,
            "q0": diagram.q_zero,
            "qPi": diagram.q_pi,
            "boundary": diagram.boundary,
        }))
    points = dirac_points(max(101, args.resolution), args.k_resolution)
    out.table("dirac_points", ["theta", "phi", "k", "energy_label"],
              [(d.theta, d.phi, d.k, d.energy_label) for d in points])
    if args.gnuplot_script:
        out.text("phase_diagram.gp",
                 "set datafile separator ','\nset view map\n"
                 f"splot '{data.name}' every ::1 using 1:2:3 with image notitle\n")


def cmd_trajectory(args, out: _Outputs) -> None:
    initial = _initial(args)
    if args.preset == "gamma":
        points = gamma_scan(args.steps, initial, args.mode)
        rows = [(pt.theta, pt.phi, pt.report.s_l, pt.report.outer_position,
                 pt.report.inner_position, pt.report.mode) for pt in points]
        data = out.table("gamma", ["theta", "phi", "s_l", "outer", "inner", "mode"], rows)
        using = "2:3"
    else:
        if args.theta is None or args.phi_range is None:
            raise UsageError("trajectory needs --theta and --phi-range (or --preset gamma)")
        try:
            start, stop, step = nio.parse_range(args.phi_range)
            phis = inclusive_range(start, stop, step)
        except InvalidArgumentError as exc:
            raise UsageError(str(exc)) from None
        points = trajectory_scan(args.theta, phis, args.steps, initial, args.mode)
        rows = [(pt.phi, pt.report.s_l, pt.report.outer_position,
                 pt.report.inner_position, pt.report.mode) for pt in points]
        data = out.table("trajectory", ["phi", "s_l", "outer", "inner", "mode"], rows)
        using = "1:2"
    if args.gnuplot_script:
        out.text(f"{data.stem}.gp", _gnuplot("S_L", data, using, "boxes"))


def _loop_params(args) -> LoopParams:
    return LoopParams(
        round_trip_time=args.rtt,
        time_bin_distance=args.tbd,
        repetition_rate=args.rep_rate,
        outcoupling_probability=args.outcoupling,
        loop_efficiency=args.efficiency,
        mean_photons_per_pulse=args.mean_photons,
        background_rate=args.background_rate,
    )


def cmd_experiment(args, out: _Outputs) -> None:
    loop = _loop_params(args)
    n_max = max_steps(loop)
    params = CoinParams(args.theta, args.phi)
    initial = _initial(args)
    if args.mode == "simulate":
        max_step = args.max_step if args.max_step is not None else n_max
        if not 1 <= max_step <= n_max:
            raise UsageError(f"--max-step must lie in [1, {n_max}]")
        hist = simulate_histogram(loop, params, initial, args.pulses, max_step,
                                  args.seed, args.bin_width, noise=not args.analytic)
        body, meta = nio.histogram_texts(hist)
        data = out.text("histogram.csv", body)
        out.text("histogram.json", meta)
        plates = waveplate_settings(params)
        out.text("experiment.json", nio.json_text({
            "n_max": n_max,
            "max_step": max_step,
            "pulses": args.pulses,
            "seed": args.seed,
            "analytic_mean": args.analytic,
            "bins_fit_round_trip": loop.bins_fit,
            "multiphoton_probability": multiphoton_probability(loop.mean_photons_per_pulse),
            "waveplates": {"alpha": plates.alpha, "beta": plates.beta},
            "total_counts": int(hist.counts.sum()),
        }))
        if args.gnuplot_script:
            out.text("histogram.gp", _gnuplot("counts", data, "1:2", "impulses"))
        return

    if not args.input:
        raise UsageError("--mode ingest needs --input")
    hist = nio.read_histogram(args.input)
    if args.rebin_ns:
        hist = rebin(hist, args.rebin_ns)
    step = args.step
    recovered = ingest_histogram(hist, loop, step, args.window_ns)
    theory = position_distribution(evolve(initial, params, step))
    rows = [r for r in nio.distribution_rows(recovered) if (r[0] + step) % 2 == 0]
    out.table("recovered", ["x", "p"], rows)
    out.text("ingest_report.json", nio.json_text({
        "step": step,
        "window_ns": args.window_ns,
        "similarity": similarity(recovered, theory),
        "theta": params.theta,
        "phi": params.phi,
    }))


def cmd_compare(args, out: _Outputs) -> None:
    p = nio.read_distribution(args.first)
    q = nio.read_distribution(args.second)
    for name, d in ((args.first, p), (args.second, q)):
        if abs(d.total() - 1.0) > 1e-6:
            warnings.warn(f"{name}: total probability {d.total()!r}, renormalizing")
    p, q = p.normalized(), q.normalized()
    lo = min(p.offset, q.offset)
    hi = max(p.offset + p.probabilities.size, q.offset + q.probabilities.size)
    rows = [(x, p.at(x), q.at(x), q.at(x) - p.at(x)) for x in range(lo, hi)]
    out.table("comparison", ["x", "p_first", "p_second", "difference"], rows)
    diffs = np.array([r[3] for r in rows])
    out.text("comparison.json", nio.json_text({
        "similarity": similarity(p, q),
        "max_abs_difference": float(np.max(np.abs(diffs))),
    }))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncqwalk",
        description="Two-rotation discrete-time quantum walk simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", help="evolve and write P(x)")
    p.add_argument("--theta", type=_angle, default=math.pi / 4)
    p.add_argument("--phi", type=_angle, default=0.0)
    p.add_argument("--steps", type=int, default=7)
    p.add_argument("--amplitudes", action="store_true", help="also write amplitudes")
    _add_initial(p)
    _add_common(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("dispersion", help="band structure over the Brillouin zone")
    p.add_argument("--theta", type=_angle, default=math.pi / 4)
    p.add_argument("--phi", type=_angle, default=0.0)
    p.add_argument("--samples", type=int, default=201)
    _add_common(p)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("phase-diagram", help="gap and invariant maps over (theta, phi)")
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--k-resolution", type=int, default=256)
    p.add_argument("--samples-along-line", type=int, default=1000)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: QW_THREADS or 1)")
    _add_common(p)
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("trajectory", help="localization parameter along a phi scan")
    p.add_argument("--theta", type=_angle)
    p.add_argument("--phi-range", help="start:stop:step, e.g. 0:pi:pi/4")
    p.add_argument("--steps", type=int, default=7)
    p.add_argument("--mode", choices=("fixed", "adaptive"), default="fixed")
    p.add_argument("--preset", choices=("gamma",))
    _add_initial(p)
    _add_common(p)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("experiment", help="simulate or ingest arrival-time histograms")
    p.add_argument("--mode", choices=("simulate", "ingest"), default="simulate")
    p.add_argument("--theta", type=_angle, default=math.pi / 4)
    p.add_argument("--phi", type=_angle, default=0.0)
    p.add_argument("--pulses", type=int, default=10**9)
    p.add_argument("--max-step", type=int)
    p.add_argument("--bin-width", type=float, default=1.0, help="histogram bin width in ns")
    p.add_argument("--analytic", action="store_true",
                   help="write rounded expected counts instead of Poisson draws")
    p.add_argument("--input", help="histogram CSV for --mode ingest")
    p.add_argument("--step", type=int, default=7, help="step to recover when ingesting")
    p.add_argument("--window-ns", type=float, default=10.0)
    p.add_argument("--rebin-ns", type=float, help="coarsen the input to this bin width")
    p.add_argument("--rtt", type=float, default=750.0)
    p.add_argument("--tbd", type=float, default=52.0)
    p.add_argument("--rep-rate", type=float, default=111e3)
    p.add_argument("--outcoupling", type=float, default=0.05)
    p.add_argument("--efficiency", type=float, default=0.50)
    p.add_argument("--mean-photons", type=float, default=0.003)
    p.add_argument("--background-rate", type=float, default=0.0)
    _add_initial(p)
    _add_common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("compare", help="similarity and per-site difference of two P(x) files")
    p.add_argument("first")
    p.add_argument("second")
    _add_common(p)
    p.set_defaults(func=cmd_compare)
    return parser


_VALUE_FLAGS = ("--theta", "--phi", "--phi-range")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--theta -pi/4`` into ``--theta=-pi/4``; argparse reads the former as a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_join_negative_values(argv))
    out = _Outputs(args.out, args.format)
    try:
        args.func(args, out)
    except UsageError as exc:
        parser.error(str(exc))
    except InvalidArgumentError as exc:
        print(f"ncqwalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoSignalError, DegenerateDistributionError, NCQWalkError, OSError, ValueError) as exc:
        print(f"ncqwalk: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    out.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
