"""Command-line front end.

Subcommands
-----------
* ``bounds``   - closed-form error bounds and enhancement ratios, optionally on a grid;
* ``figure``   - CSV datasets for the standard figures (fig2, fig3a, fig3b, fig4a,
  fig4b, fig5a, fig5b);
* ``optimize`` - symmetric-family optimization against the closed-form reference;
* ``simulate`` - Monte Carlo Cramér-Rao saturation study.

Every CSV starts with a single ``#`` provenance comment (tool version, resolved
configuration, seed, timestamp) followed by one header row; numbers are written
with 12 significant digits.  Flags override values from an optional
``key=value`` config file; unknown config keys are errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .core import NumericError
from .fisher import SensingScenario, WeightVector
from .measurements import enhancement_ratios, hd_gd_boundary, lossy_bounds
from .montecarlo import crb_saturation_study
from .probes import optimize_symmetric, reduced_entropy, symmetric_family

FIGURES = ("fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b")
_CONFIG_KEYS = {
    "M": int, "Nbar": float, "nbar": float, "eta": float, "weights": str,
    "grid": str, "grid_over": str, "out": str, "seed": int,
    "objective": str, "batches": int, "shots": int,
}


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    points: int
    log: bool = False

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


def _parse_grid(text: str) -> GridSpec:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError(f"grid must be min:max:points[:log], got {text!r}")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from exc
    log = False
    if len(parts) == 4:
        if parts[3] not in ("log", "linear"):
            raise argparse.ArgumentTypeError(f"grid scale must be 'log' or 'linear', got {parts[3]!r}")
        log = parts[3] == "log"
    if points < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    if log and lo <= 0:
        raise argparse.ArgumentTypeError("log grid needs a positive lower bound")
    return GridSpec(lo, hi, points, log)


def _parse_weights(text: str) -> WeightVector:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weights {text!r}: {exc}") from exc
    return WeightVector.normalized(vals)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _emit(out_path, comment: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    buf.write(comment + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _provenance(command: str, echo: str, seed) -> str:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    seed_txt = "-" if seed is None else str(seed)
    return f"# gausense {__version__} | {command} | {echo} | seed={seed_txt} | generated {stamp}"


def _load_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _CONFIG_KEYS[key](val.strip())
    return values


def _resolve(args, key, default=None):
    """Flag value if given, else config-file value, else the default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in args._config_values:
        val = args._config_values[key]
        if key == "grid":
            return _parse_grid(val)
        if key == "weights":
            return _parse_weights(val)
        return val
    return default


def _energy(args, modes: int, default: float | None = None) -> float:
    n_total = _resolve(args, "Nbar")
    n_per = _resolve(args, "nbar")
    if n_total is not None and n_per is not None:
        raise ValueError("give exactly one of --Nbar / --nbar")
    if n_total is not None:
        return float(n_total)
    if n_per is not None:
        return float(n_per) * modes
    if default is None:
        raise ValueError("an energy is required: give --Nbar or --nbar")
    return default


def _scenario_row(energy: float, modes: int, eta: float) -> list:
    if eta > 0:
        scen = SensingScenario.uniform(modes, energy=energy, eta=eta)
        b = lossy_bounds(scen)
        r = enhancement_ratios(scen)
        sql = 1.0 / (4 * energy * eta)
        return [energy, modes, eta, sql, b.opgs_q, b.oegs_q,
                b.opgs_hd, b.oegs_hd, b.oegs_gd, r.r_opt, r.r_hd]
    inf = math.inf
    return [energy, modes, eta, inf, inf, inf, inf, inf, inf, math.nan, math.nan]


def _cmd_bounds(args) -> int:
    modes = int(_resolve(args, "M", 2))
    eta = float(_resolve(args, "eta", 1.0))
    grid = _resolve(args, "grid")
    over = _resolve(args, "grid_over", "Nbar")
    header = ["N_bar", "M", "eta", "sql", "opgs", "oegs",
              "opgs_hd", "oegs_hd", "oegs_gd", "R_opt", "R_HD"]
    if grid is None:
        energy = _energy(args, modes)
        rows = [_scenario_row(energy, modes, eta)]
        echo = f"M={modes} Nbar={_fmt(energy)} eta={_fmt(eta)}"
    elif over == "Nbar":
        rows = [_scenario_row(n, modes, eta) for n in grid.values()]
        echo = f"M={modes} eta={_fmt(eta)} grid(Nbar)={args.grid or 'config'}"
    else:
        energy = _energy(args, modes)
        rows = [_scenario_row(energy, modes, e) for e in grid.values()]
        echo = f"M={modes} Nbar={_fmt(energy)} grid(eta)={args.grid or 'config'}"
    _emit(_resolve(args, "out"), _provenance("bounds", echo, None), header, rows)
    return 0


def _figure_rows(figure: str, args) -> tuple[str, list[str], list[list]]:
    grid = _resolve(args, "grid")
    if figure == "fig2":
        spec = grid or GridSpec(0.1, 100.0, 60, log=True)
        header = ["N_bar", "sql", "opgs_M1", "opgs_M3", "opgs_M100"]
        rows = [[n, 1 / (4 * n), 1 / (8 * n * (n + 1)),
                 3 / (8 * n * (n + 3)), 100 / (8 * n * (n + 100))]
                for n in spec.values()]
        return "grid(Nbar)", header, rows

    if figure in ("fig3a", "fig3b"):
        modes = int(_resolve(args, "M", 2))
        energy = _energy(args, modes, default=2.0)
        points = grid.points if grid else 400
        r_max = 0.5 * math.acosh(2 * energy / modes + 1)
        simultaneous_fig = figure == "fig3b"
        if simultaneous_fig:
            header = ["r", "n_t", "entropy", "err_sim", "opgs_ref", "oegs_ref"]
            opgs_ref = modes**3 / (8 * energy * (energy + modes))
            oegs_ref = (modes * (2 * energy * (modes - 1) + 2 * modes - 1)
                        / (8 * energy * (energy + 1)))
        else:
            header = ["r", "n_t", "entropy", "err_avg", "opgs_ref", "oegs_ref"]
            opgs_ref = modes / (8 * energy * (energy + modes))
            oegs_ref = 1 / (8 * energy * (energy + 1))
        rows = []
        for r in np.linspace(0.0, r_max, points):
            n_t = (2 * energy / modes + 1) / (2 * math.cosh(2 * r))
            params = symmetric_family(n_t, r, modes)
            h11 = 2 * (params.gamma1**2 + params.gamma2**2) - 1
            h12 = 2 * (params.eps1**2 + params.eps2**2)
            if simultaneous_fig:
                err = 1 / (h11 + (modes - 1) * h12)
                err += (modes - 1) / (h11 - h12) if abs(h11 - h12) > 1e-14 else math.inf
            else:
                err = 1 / (modes * (h11 + (modes - 1) * h12))
            rows.append([r, n_t, reduced_entropy(params), err, opgs_ref, oegs_ref])
        return f"M={modes} Nbar={_fmt(energy)}", header, rows

    if figure == "fig4a":
        energy = _energy(args, 1, default=10.0)
        spec = grid or GridSpec(0.02, 1.0, 99)
        etas = list(spec.values())
        crossings = []
        if energy > 2 * (1 + math.sqrt(2)):
            disc = math.sqrt(1 - 2 * (1 + math.sqrt(2)) / energy)
            crossings = [(1 - disc) / 2, (1 + disc) / 2]
        all_etas = sorted(set(etas) | set(crossings))
        header = ["eta", "oegs_q", "oegs_hd", "oegs_gd", "crossing"]
        rows = []
        for eta in all_etas:
            b = lossy_bounds(SensingScenario.uniform(1, energy=energy, eta=eta))
            flag = int(any(abs(eta - c) < 1e-12 for c in crossings))
            rows.append([eta, b.oegs_q, b.oegs_hd, b.oegs_gd, flag])
        return f"Nbar={_fmt(energy)}", header, rows

    if figure == "fig4b":
        spec = grid or GridSpec(0.5, 200.0, 40, log=True)
        header = ["eta", "N_bar", "hd_over_gd", "N_boundary"]
        rows = []
        for eta in np.linspace(0.05, 0.95, 19):
            bnd = hd_gd_boundary(eta)
            for n in spec.values():
                b = lossy_bounds(SensingScenario.uniform(1, energy=n, eta=eta))
                rows.append([eta, n, b.oegs_hd / b.oegs_gd, bnd])
        return "grid(Nbar) x eta", header, rows

    # fig5a / fig5b: enhancement ratios vs n_bar or vs M
    etas = (1.0, 0.9, 0.8, 0.7)
    header = ["n_bar", "eta", "R_opt", "R_HD"] if figure == "fig5a" else ["M", "eta", "R_opt", "R_HD"]
    rows = []
    if figure == "fig5a":
        modes = int(_resolve(args, "M", 4))
        spec = grid or GridSpec(0.1, 20.0, 60, log=True)
        for eta in etas:
            for n in spec.values():
                r = enhancement_ratios(SensingScenario.uniform(modes, n_bar=n, eta=eta))
                rows.append([n, eta, r.r_opt, r.r_hd])
        return f"M={modes} grid(nbar)", header, rows
    n_per = _resolve(args, "nbar", 6.0)
    for eta in etas:
        for modes in range(1, 17):
            r = enhancement_ratios(SensingScenario.uniform(modes, n_bar=n_per, eta=eta))
            rows.append([modes, eta, r.r_opt, r.r_hd])
    return f"nbar={_fmt(n_per)} M=1..16", header, rows


def _cmd_figure(args) -> int:
    echo, header, rows = _figure_rows(args.figure, args)
    comment = _provenance(f"figure {args.figure}", echo, None)
    _emit(_resolve(args, "out"), comment, header, rows)
    return 0


def _cmd_optimize(args) -> int:
    modes = int(_resolve(args, "M", 2))
    energy = _energy(args, modes)
    objective = _resolve(args, "objective", "average")
    key = {"average": "average-phase", "simultaneous": "simultaneous"}.get(objective)
    if key is None:
        raise ValueError(f"unknown objective {objective!r}")
    params, bound = optimize_symmetric(energy, modes, key)
    if key == "average-phase":
        reference = 1 / (8 * energy * (energy + 1))
    else:
        reference = modes**3 / (8 * energy * (energy + modes))
    gap = abs(bound - reference)
    r_val = 0.25 * math.log(params.gamma1 / params.gamma2)
    n_t = math.sqrt(params.gamma1 * params.gamma2)
    header = ["objective", "M", "N_bar", "r", "n_t", "gamma1", "gamma2",
              "eps1", "eps2", "bound", "reference", "gap"]
    rows = [[objective, modes, energy, r_val, n_t, params.gamma1, params.gamma2,
             params.eps1, params.eps2, bound, reference, gap]]
    echo = f"objective={objective} M={modes} Nbar={_fmt(energy)}"
    _emit(_resolve(args, "out"), _provenance("optimize", echo, None), header, rows)
    print(f"optimize: {echo} bound={_fmt(bound)} reference={_fmt(reference)} gap={_fmt(gap)}",
          file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    modes = int(_resolve(args, "M", 3))
    energy = _energy(args, modes, default=3.0)
    eta = float(_resolve(args, "eta", 1.0))
    seed = int(_resolve(args, "seed", 20260810))
    batches = int(_resolve(args, "batches", 500))
    shots = int(_resolve(args, "shots", 200))
    scen = SensingScenario.uniform(modes, energy=energy, eta=eta)
    rows = [
        [row.shots, row.empirical_var, row.crb, row.ratio, row.ci_low, row.ci_high, seed]
        for row in crb_saturation_study(scen, batches, shots, seed)
    ]
    header = ["shots", "empirical_var", "crb", "ratio", "ci_low", "ci_high", "seed"]
    echo = f"M={modes} Nbar={_fmt(energy)} eta={_fmt(eta)} batches={batches} shots={shots}"
    _emit(_resolve(args, "out"), _provenance("simulate", echo, seed), header, rows)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--M", type=int, help="number of modes")
    common.add_argument("--Nbar", type=float, help="total mean photon number")
    common.add_argument("--nbar", type=float, help="mean photon number per mode")
    common.add_argument("--eta", type=float, help="loss-channel transmissivity (default 1)")
    common.add_argument("--weights", type=_parse_weights,
                        help="comma-separated weights (normalized to sum |w| = 1)")
    common.add_argument("--grid", type=_parse_grid, help="grid spec min:max:points[:log]")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--seed", type=int, help="RNG seed")
    common.add_argument("--config", help="key=value config file (flags take precedence)")

    parser = argparse.ArgumentParser(
        prog="gausense",
        description="Distributed Gaussian phase sensing: bounds, figures, optimization, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_bounds = sub.add_parser("bounds", parents=[common], help="closed-form bounds table")
    p_bounds.add_argument("--grid-over", dest="grid_over", choices=("Nbar", "eta"),
                          help="which variable the grid sweeps (default Nbar)")
    p_fig = sub.add_parser("figure", parents=[common], help="figure dataset CSV")
    p_fig.add_argument("figure", choices=FIGURES)
    p_opt = sub.add_parser("optimize", parents=[common], help="symmetric-family optimization")
    p_opt.add_argument("--objective", choices=("average", "simultaneous"))
    p_sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo CRB saturation study")
    p_sim.add_argument("--batches", type=int, help="number of independent batches (default 500)")
    p_sim.add_argument("--shots", type=int, help="shots per batch at the top rung (default 200)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args._config_values = _load_config(args.config) if args.config else {}
        handler = {
            "bounds": _cmd_bounds,
            "figure": _cmd_figure,
            "optimize": _cmd_optimize,
            "simulate": _cmd_simulate,
        }[args.command]
        return handler(args)
    except (ValueError, NumericError, OSError) as exc:
        print(f"gausense: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
