"""Command-line front end.

Every CSV starts with a ``# config: {...}`` comment holding the fully
resolved configuration (JSON, sorted keys), followed by a header row and
rows of ``repr`` floats, so identical configurations produce identical bytes.

Exit codes: 0 success, 2 configuration error, 3 numerical precondition failure.
The environment variable ``QDISP_THREADS`` sets the number of worker threads
for independent scenario points (default 1).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import dirac
from .dispersion import Branch, DispersionModel, group_velocity, hessian_eigenvalues, omega
from .errors import ConfigError, NumericalError
from .gaussian import CoherentPacket, evolve_packet, gaussian_entropy
from .grid import (EntropyTrajectory, load_field, save_field, spectral_propagate,
                   write_density_csv)
from .partition import GRID_TOLERANCE, classify, interval_signs
from .svg import heat_map, line_plot
from .two_particle import (STATISTICS, CollisionScenario, SweepScenario,
                           collision_from_mapping, collision_run, pair_density,
                           read_key_values, scenario_mapping, separation_sweep,
                           sweep_from_mapping)

FIGURE3_TIMES = (10.0, 30.0, 70.0)


def thread_count() -> int:
    raw = os.environ.get("QDISP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"QDISP_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("QDISP_THREADS must be at least 1")
    return n


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def csv_text(config: dict, columns, rows) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_jsonable(config), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _model_from_args(a) -> DispersionModel:
    if a.model == "schrodinger":
        return DispersionModel.schrodinger(a.mass, a.hbar)
    branch = Branch.POSITIVE if a.branch == "positive" else Branch.NEGATIVE
    return DispersionModel.dirac(a.mass, a.hbar, a.c, branch)


def _model_config(a) -> dict:
    return {"model": a.model, "mass": a.mass, "hbar": a.hbar, "c": a.c, "branch": a.branch}


# -- subcommands -------------------------------------------------------------

def cmd_dispersion(a) -> None:
    model = _model_from_args(a)
    k = _vector(a.k)
    lam1, lam23 = hessian_eigenvalues(model, k)
    vg = group_velocity(model, k)
    cols = [f"k{i}" for i in range(k.size)] + ["omega"]
    cols += [f"vg{i}" for i in range(k.size)] + ["lambda1", "lambda23"]
    row = list(k) + [float(omega(model, k))] + list(vg) + [lam1, lam23]
    emit(csv_text({**_model_config(a), "k": k}, cols, [row]), a.out)


def cmd_dirac_check(a) -> None:
    config = {"mass": a.mass, "hbar": a.hbar, "c": a.c, "k": a.k, "random": a.random,
              "seed": a.seed}
    if a.random:
        rng = np.random.default_rng(a.seed)
        ks = rng.normal(scale=3.0, size=(a.random, 3))
    else:
        ks = _vector(a.k)[None, :]
    cols = ["k0", "k1", "k2", "omega", "eig_error", "gram_error", "residual", "det_rel_error"]
    rows = []
    for k in ks:
        k3 = dirac.pad3(k)
        w = dirac.on_shell_omega(k3, a.mass, a.hbar, a.c)
        m = dirac.dirac_matrix(k3, a.mass, a.hbar, a.c)
        eig = np.linalg.eigvalsh(m)
        expected = np.array([-w, -w, w, w])
        det = np.linalg.det(m).real
        ref = dirac.determinant_formula(k3, a.mass, a.hbar, a.c)
        gram = dirac.gram_matrix(k3, a.mass, a.hbar, a.c)
        rows.append(list(k3) + [w, float(np.max(np.abs(eig - expected))),
                                float(np.max(np.abs(gram - np.eye(4)))),
                                float(np.max(dirac.eigen_residuals(k3, a.mass, a.hbar, a.c))),
                                abs(det - ref) / ref if ref else abs(det)])
    emit(csv_text(config, cols, rows), a.out)


def cmd_evolve(a) -> None:
    model = _model_from_args(a)
    r0 = np.broadcast_to(_vector(a.r0), (a.d,))
    k0 = np.broadcast_to(_vector(a.k0), (a.d,))
    packet = CoherentPacket.isotropic(a.sigma, r0, k0, a.d)
    if not a.dt > 0 or a.t_end < 0:
        raise ConfigError("need --dt > 0 and --t-end >= 0")
    times = a.dt * np.arange(int(np.floor(a.t_end / a.dt + 1e-9)) + 1)
    rows = []
    for t in times:
        g = evolve_packet(packet, model, t)
        rows.append([t, float(np.linalg.det(2.0 * g.density_cov)), gaussian_entropy(g)]
                    + list(g.center))
    cols = ["t", "det_sigma_t", "entropy_nats"] + [f"center{i}" for i in range(a.d)]
    config = {**_model_config(a), "sigma": a.sigma, "d": a.d, "r0": r0, "k0": k0,
              "t_end": a.t_end, "dt": a.dt}
    emit(csv_text(config, cols, rows), a.out)


def cmd_propagate(a) -> None:
    model = _model_from_args(a)
    field = load_field(a.inp)
    k0 = _vector(a.k0) if a.k0 is not None else None
    out = spectral_propagate(field, model, a.t, a.mode, k0)
    save_field(out, a.out)
    if a.density_csv:
        write_density_csv(out, a.density_csv)


def read_trajectory(path, tolerance: float) -> EntropyTrajectory:
    times, values = [], []
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    for row in rows:
        try:
            t, s = float(row[0]), float(row[1])
        except (ValueError, IndexError):
            if times:
                raise ConfigError(f"{path}: malformed row {row!r}") from None
            continue  # header
        times.append(t)
        values.append(s)
    return EntropyTrajectory(times, values, tolerance)


def cmd_classify(a) -> None:
    traj = read_trajectory(a.traj, a.tol)
    cls = classify(traj)
    signs = "".join({1: "+", 0: "0", -1: "-"}[int(v)] for v in interval_signs(traj))
    print(cls.value)
    print(f"signs: {signs}")


def _collision_outputs(result, config: dict, out: Path, stem: str, svg: bool) -> None:
    s = result.scenario
    stats = list(s.stats)
    times = result.trajectories[stats[0]].times
    cols = ["t"] + [f"S_{st.label}" for st in stats] + [f"C_{st.label}" for st in stats]
    rows = [[t] + [result.trajectories[st].entropies[i] for st in stats]
            + [result.normalization[st][i] for st in stats] for i, t in enumerate(times)]
    emit(csv_text(config, cols, rows), out / f"{stem}.csv")
    classes = {st.label: classify(result.trajectories[st]).value for st in stats}
    print(f"{stem}: " + ", ".join(f"{k} {v}" for k, v in classes.items()))
    if svg:
        series = {st.label: result.trajectories[st].entropies for st in stats}
        emit(line_plot(times, series, f"{stem}: joint entropy", "t", "entropy (nats)"),
             out / f"{stem}.svg")
        extent = (s.grid_min, s.grid_max, s.grid_min, s.grid_max)
        for (st, t), rho in result.snapshots.items():
            emit(heat_map(rho, extent, f"t = {t:g}, {st.label}"),
                 out / f"{stem}_t{t:g}_{st.label}.svg")


def cmd_collide(a) -> None:
    scenario = collision_from_mapping(read_key_values(a.scenario))
    result = collision_run(scenario, thread_count())
    _collision_outputs(result, scenario_mapping(scenario), Path(a.out), "collide", not a.no_svg)


def _sweep_outputs(table: np.ndarray, config: dict, out: Path, stem: str, svg: bool) -> None:
    cols = ["x", "S_fermion", "S_boson"]
    emit(csv_text(config, cols, table.tolist()), out / f"{stem}.csv")
    if svg:
        x = table[:, 0]
        emit(line_plot(x, {"fermion": table[:, 1], "boson": table[:, 2]},
                       "joint entropy vs separation", "x", "entropy (nats)"), out / f"{stem}.svg")
        emit(line_plot(x, {"boson - fermion": table[:, 2] - table[:, 1]},
                       "entropy difference", "x", "nats"), out / f"{stem}_difference.svg")


def cmd_sweep(a) -> None:
    cfg = read_key_values(a.scenario) if a.scenario else {}
    scenario = sweep_from_mapping(cfg)
    table = separation_sweep(scenario, workers=thread_count())
    _sweep_outputs(table, scenario_mapping(scenario), Path(a.out), "sweep", not a.no_svg)


def cmd_figures(a) -> None:
    out = Path(a.out)
    which = ["2", "3", "4a", "4b"] if a.which == "all" else [a.which]
    workers = thread_count()
    for fig in which:
        if fig == "2":
            scenario = SweepScenario()
            table = separation_sweep(scenario, workers=workers)
            _sweep_outputs(table, {"figure": "2", **scenario_mapping(scenario)}, out, "fig2", True)
            print("fig2: written")
        elif fig == "3":
            _figure3(CollisionScenario.preset(a.preset, snapshots=FIGURE3_TIMES), out, a.preset)
        else:
            vg = 2.0 if fig == "4a" else 8.0
            scenario = CollisionScenario.preset(a.preset, vg=vg)
            result = collision_run(scenario, workers)
            config = {"figure": fig, "preset": a.preset, **scenario_mapping(scenario)}
            _collision_outputs(result, config, out, f"fig{fig}", True)


def _figure3(scenario: CollisionScenario, out: Path, preset: str) -> None:
    """Joint-density snapshots plus their one-particle marginals."""
    if scenario.under_resolved():
        warnings.warn(f"packet width {scenario.sigma} is below three grid spacings "
                      f"({scenario.grid.spacing[0]}); densities are not converged", RuntimeWarning)
    p1, p2 = scenario.packets()
    grid = scenario.grid
    x = grid.axes()[0]
    h = grid.spacing[0]
    extent = (scenario.grid_min, scenario.grid_max, scenario.grid_min, scenario.grid_max)
    rows = []
    for t in scenario.snapshots:
        for st in STATISTICS:
            rho = pair_density(p1, p2, t, st, grid, scenario.method)
            emit(heat_map(rho, extent, f"t = {t:g}, {st.label}"),
                 out / f"fig3_t{t:g}_{st.label}.svg")
            marginal = rho.sum(axis=1) * h
            rows.extend([t, st.label, xi, mi] for xi, mi in zip(x, marginal))
    config = {"figure": "3", "preset": preset, **scenario_mapping(scenario)}
    emit(csv_text(config, ["t", "stats", "x", "marginal_density"], rows), out / "fig3.csv")
    print("fig3: written")


# -- parser ------------------------------------------------------------------

def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("schrodinger", "dirac"), default="schrodinger")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--branch", choices=("positive", "negative"), default="positive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdisp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="omega, group velocity and Hessian eigenvalues")
    _add_model_args(p)
    p.add_argument("--k", required=True, help="wave vector, e.g. 1,0,0")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("dirac-check", help="verify the momentum-space Dirac eigensystem")
    p.add_argument("--k", default="1,0,0")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--random", type=int, default=0, help="check N random wave vectors instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_dirac_check)

    p = sub.add_parser("evolve", help="analytic entropy trajectory of a coherent packet")
    _add_model_args(p)
    p.add_argument("--sigma", type=float, required=True,
                   help="width parameter; the amplitude covariance is sigma^2 I")
    p.add_argument("--d", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--r0", default="0")
    p.add_argument("--k0", default="0")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("propagate", help="spectral propagation of a stored field")
    _add_model_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--mode", choices=("exact", "quadratic"), default="exact")
    p.add_argument("--k0", default=None, help="expansion point for --mode quadratic")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--density-csv", default=None)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("classify", help="C/W/M/I class of an entropy trajectory CSV")
    p.add_argument("--traj", required=True, help="CSV with columns t, entropy")
    p.add_argument("--tol", type=float, default=GRID_TOLERANCE)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("collide", help="two-particle collision entropy")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--no-svg", action="store_true")
    p.set_defaults(func=cmd_collide)

    p = sub.add_parser("sweep", help="two-particle entropy against separation")
    p.add_argument("--scenario", default=None)
    p.add_argument("--out", default=".")
    p.add_argument("--no-svg", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", help="reproduce the separation sweep and collision figures")
    p.add_argument("--which", choices=("2", "3", "4a", "4b", "all"), default="all")
    p.add_argument("--preset", choices=("full", "quarter"), default="full")
    p.add_argument("--out", default="figures")
    p.set_defaults(func=cmd_figures)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                args.func(args)
            finally:
                for w in caught:
                    print(f"qdisp: warning: {w.message}", file=sys.stderr)
    except ConfigError as exc:
        print(f"qdisp: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"qdisp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"qdisp: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))
