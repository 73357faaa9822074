"""Command-line front end emitting figure-ready whitespace tables.

Subcommands
-----------
solve           overlap fixed point + risk record for one parameter set
approx-error    relative-error surface of the simplified channel overlap
usefulness      unlabeled-data usefulness against the Bayes risk
labeled-needed  labeled-count requirement curves, theory and empirical
reduction       error-reduction sweeps over the SNR or the sample ratio
simulate        one synthetic campaign compared against the theory
channel-check   Monte Carlo channel alignment against quadrature, with z-scores

Every command reads an optional JSON config (``--config``), applies the flag
overrides ``--seed/--reps/--tol``, writes whitespace-separated tables with a
single header row to ``--out`` (atomically, at the end), and drops a manifest
echoing the resolved parameters and library versions next to the output.
Identical configuration and seed produce byte-identical files; pure-theory
commands never consume a seed.

Exit codes: 0 success, 2 validation failure, 3 solver non-convergence,
4 simulation infeasibility.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import tempfile

import numpy as np
import scipy

from . import __version__
from .kernel import approx_error_grid, channel_overlap
from .overlaps import (
    ConvergenceError,
    EpsilonMixture,
    ProblemParams,
    solve_certainty,
    solve_overlaps,
)
from .risk import (
    InfeasibilityError,
    absolute_reduction,
    bayes_risk,
    labeled_needed,
    oracle_relative_reduction,
    oracle_risk,
    risk_report,
    supervised_risk_theory,
)
from .simulate import (
    SimulationError,
    channel_overlap_mc_stats,
    classify_oracle,
    classify_semisupervised,
    classify_supervised,
    generate_dataset,
    labeled_needed_empirical,
    reference_error,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_INFEASIBLE = 4


class CliError(Exception):
    """Configuration or usage problem; maps to exit code 2."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("boolean table cells are not supported")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".12g")


def _write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=".part")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _table_text(header: list[str], rows, break_after: set[int] | None = None) -> str:
    lines = [" ".join(header)]
    for index, row in enumerate(rows):
        lines.append(" ".join(_fmt(v) for v in row))
        if break_after and index in break_after:
            lines.append("")
    return "\n".join(lines) + "\n"


def _write_manifest(base_path: str, command: str, params: dict) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "versions": {
            "package": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }
    _write_text(base_path + ".manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _resolve_config(args, defaults: dict) -> dict:
    cfg = dict(defaults)
    if args.config is not None:
        try:
            with open(args.config) as handle:
                loaded = json.load(handle)
        except OSError as exc:
            raise CliError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CliError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(defaults))
        if unknown:
            raise CliError(f"unknown config keys: {unknown}")
        cfg.update(loaded)
    for flag in ("seed", "reps", "tol"):
        value = getattr(args, flag)
        if value is not None:
            if flag not in defaults:
                raise CliError(f"--{flag} is not used by this command")
            cfg[flag] = value
    return cfg


def _mixture_from_config(cfg: dict) -> EpsilonMixture:
    eta = cfg.get("eta")
    atoms = cfg.get("mixture")
    if (eta is None) == (atoms is None):
        raise CliError("specify exactly one of 'eta' or 'mixture'")
    if eta is not None:
        if not 0.0 <= float(eta) <= 1.0:
            raise CliError("eta must lie in [0, 1]")
        return EpsilonMixture.certainty(float(eta))
    try:
        return EpsilonMixture(atoms=tuple((float(e), float(w)) for e, w in atoms))
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid mixture: {exc}") from exc


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0.0 or hi < lo:
        raise CliError("grid bounds must be increasing with a positive step")
    count = int(round((hi - lo) / step)) + 1
    grid = np.linspace(lo, hi, count)
    if grid.size == 0:
        raise CliError("empty grid")
    return grid


def _intended_mixture(labeling) -> EpsilonMixture:
    atoms = []
    total = 0.0
    for frac, kappa in labeling:
        atoms.append((2.0 * float(kappa) - 1.0, float(frac)))
        total += float(frac)
    atoms.append((0.0, 1.0 - total))
    return EpsilonMixture(atoms=tuple(atoms))


def cmd_solve(args) -> int:
    defaults = {
        "lambda": 1.0,
        "c": 1.0,
        "eta": None,
        "mixture": None,
        "tol": 1e-10,
        "max_iter": 10000,
        "damping": 0.5,
    }
    cfg = _resolve_config(args, defaults)
    mixture = _mixture_from_config(cfg)
    params = ProblemParams(lam=float(cfg["lambda"]), c=float(cfg["c"]), mixture=mixture)
    solution = solve_overlaps(
        params,
        tol=float(cfg["tol"]),
        max_iter=int(cfg["max_iter"]),
        damping=float(cfg["damping"]),
    )
    report = risk_report(params.lam, solution)
    header = ["q_u", "q_v", "bayes_risk", "oracle_risk", "usefulness", "residual", "iterations"]
    row = [
        solution.q_u,
        solution.q_v,
        report.bayes_risk,
        report.oracle_risk,
        report.usefulness,
        solution.residual,
        solution.iterations,
    ]
    text = _table_text(header, [row])
    sys.stdout.write(text)
    if args.out is not None:
        _write_text(args.out, text)
        _write_manifest(args.out, "solve", cfg)
    return EXIT_OK


def cmd_approx_error(args) -> int:
    defaults = {
        "eps_min": 0.0,
        "eps_max": 1.0,
        "eps_step": 0.01,
        "q_min": 0.1,
        "q_max": 10.0,
        "q_step": 0.1,
    }
    cfg = _resolve_config(args, defaults)
    eps_grid = _grid(float(cfg["eps_min"]), float(cfg["eps_max"]), float(cfg["eps_step"]))
    q_grid = _grid(float(cfg["q_min"]), float(cfg["q_max"]), float(cfg["q_step"]))
    surface = approx_error_grid(eps_grid, q_grid)
    rows = []
    breaks = set()
    for i, eps in enumerate(eps_grid):
        for j, q in enumerate(q_grid):
            rows.append([eps, q, surface[i, j]])
        breaks.add(len(rows) - 1)
    out = args.out if args.out is not None else "approx_error.dat"
    _write_text(out, _table_text(["eps", "q", "err"], rows, break_after=breaks))
    _write_manifest(out, "approx-error", cfg)
    sys.stdout.write(f"wrote {out}\n")
    return EXIT_OK


def cmd_usefulness(args) -> int:
    defaults = {"q_max": 25.0, "points": 200, "q_min_positive": 1e-3}
    cfg = _resolve_config(args, defaults)
    points = int(cfg["points"])
    if points < 2:
        raise CliError("points must be at least 2")
    q_grid = np.concatenate(
        [
            [0.0],
            np.logspace(
                math.log10(float(cfg["q_min_positive"])),
                math.log10(float(cfg["q_max"])),
                points - 1,
            ),
        ]
    )
    rows = [[bayes_risk(q), channel_overlap(0.0, q)] for q in q_grid]
    out = args.out if args.out is not None else "usefulness.dat"
    _write_text(out, _table_text(["eps", "y"], rows))
    _write_manifest(out, "usefulness", cfg)
    sys.stdout.write(f"wrote {out}\n")
    return EXIT_OK


def cmd_labeled_needed(args) -> int:
    defaults = {
        "n": 1000,
        "p": 200,
        "lambda": 0.25,
        "etas": [0.02, 0.05, 0.1, 0.2, 0.5],
        "theory_points": 40,
        "empirical_points": 5,
        "reps": 10,
        "t_max": 40,
        "seed": 777,
    }
    cfg = _resolve_config(args, defaults)
    n = int(cfg["n"])
    p = int(cfg["p"])
    lam = float(cfg["lambda"])
    etas = [float(e) for e in cfg["etas"]]
    if not etas or any(not 0.0 < e <= 1.0 for e in etas):
        raise CliError("etas must be a nonempty list of values in (0, 1]")
    theory_points = int(cfg["theory_points"])
    empirical_points = int(cfg["empirical_points"])
    if theory_points < 2 or empirical_points < 1:
        raise CliError("theory_points must be >= 2 and empirical_points >= 1")
    seed = int(cfg["seed"])
    reps = int(cfg["reps"])
    t_max = int(cfg["t_max"])

    theory_cols = []
    for eta in etas:
        k_lo = (1.0 + math.sqrt(eta)) / 2.0
        while (2.0 * k_lo - 1.0) ** 2 < eta:  # rounding can land a hair below
            k_lo = math.nextafter(k_lo, 1.0)
        kappas = np.linspace(k_lo, 1.0, theory_points)
        theory_cols.append((kappas, [labeled_needed(eta, k, n) for k in kappas]))
    header_th = [f"x{j + 1}" for j in range(len(etas))] + [f"y{j + 1}" for j in range(len(etas))]
    rows_th = [
        [col[0][i] for col in theory_cols] + [col[1][i] for col in theory_cols]
        for i in range(theory_points)
    ]

    empirical_cols = []
    for eta in etas:
        # stay clear of the search cap: keep the theory requirement below 0.8 n
        k_lo = min((1.0 + math.sqrt(eta / 0.8)) / 2.0, 1.0)
        kappas = np.linspace(k_lo, 1.0, empirical_points)
        target = reference_error(p, n, lam, eta, seed=seed, reps=reps, t_max=t_max)
        counts = [
            labeled_needed_empirical(
                p, n, lam, eta, float(k), target, seed=seed, reps=reps, t_max=t_max
            )
            for k in kappas
        ]
        empirical_cols.append((kappas, counts))
    header_emp = [f"conf{j + 1}" for j in range(len(etas))] + [
        f"nl{j + 1}" for j in range(len(etas))
    ]
    rows_emp = [
        [col[0][i] for col in empirical_cols] + [col[1][i] for col in empirical_cols]
        for i in range(empirical_points)
    ]

    base = args.out if args.out is not None else "labeled_needed"
    path_th = base + "_th.dat"
    path_emp = base + "_emp.dat"
    _write_text(path_th, _table_text(header_th, rows_th))
    _write_text(path_emp, _table_text(header_emp, rows_emp))
    _write_manifest(base, "labeled-needed", cfg)
    sys.stdout.write(f"wrote {path_th}\nwrote {path_emp}\n")
    return EXIT_OK


def _empirical_reduction(p, n, lam, eta, kappa, seed_parts, reps, t_max):
    sups, semis, oracles = [], [], []
    for r in range(reps):
        ds = generate_dataset(p, n, lam, [(eta, kappa)], seed=seed_parts + [r])
        params = ProblemParams(
            lam=lam, c=n / p, mixture=EpsilonMixture.from_samples(ds.label_eps)
        )
        oracles.append(classify_oracle(ds).error_unlabeled)
        sups.append(classify_supervised(ds).error_unlabeled)
        semis.append(classify_semisupervised(ds, params, t_max=t_max).error_unlabeled)
    e_sup = float(np.mean(sups))
    e_semi = float(np.mean(semis))
    e_oracle = float(np.mean(oracles))
    try:
        algo_abs = absolute_reduction(e_sup, e_semi)
    except ValueError:
        algo_abs = float("nan")
    try:
        algo_oracle = oracle_relative_reduction(e_sup, e_semi, e_oracle)
    except ValueError:
        algo_oracle = float("nan")
    return algo_abs, algo_oracle


def cmd_reduction(args) -> int:
    defaults = {
        "sweep": "lambda",
        "eta": 0.2,
        "kappa": 1.0,
        "p": 200,
        "c": 1.0,
        "lambda": 2.0,
        "lambdas": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0],
        "cs": [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0],
        "reps": 10,
        "t_max": 50,
        "seed": 20240,
    }
    cfg = _resolve_config(args, defaults)
    sweep = cfg["sweep"]
    if sweep not in ("lambda", "c"):
        raise CliError("sweep must be 'lambda' or 'c'")
    eta = float(cfg["eta"])
    kappa = float(cfg["kappa"])
    p = int(cfg["p"])
    reps = int(cfg["reps"])
    t_max = int(cfg["t_max"])
    seed = int(cfg["seed"])
    if sweep == "lambda":
        values = [float(v) for v in cfg["lambdas"]]
        fixed_c = float(cfg["c"])
        points = [(lam, fixed_c) for lam in values]
        x_name = "lambda"
    else:
        values = [float(v) for v in cfg["cs"]]
        fixed_lam = float(cfg["lambda"])
        points = [(fixed_lam, c) for c in values]
        x_name = "alpha"
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise CliError("sweep grid must be nonempty and strictly increasing")

    rows = []
    for index, (lam, c) in enumerate(points):
        n = int(round(c * p))
        e_sup_th = supervised_risk_theory(lam, c, eta)
        e_semi_th = bayes_risk(solve_certainty(lam, c, eta).q_u)
        e_oracle_th = oracle_risk(lam)
        bound_abs = absolute_reduction(e_sup_th, e_semi_th)
        bound_oracle = oracle_relative_reduction(e_sup_th, e_semi_th, e_oracle_th)
        algo_abs, algo_oracle = _empirical_reduction(
            p, n, lam, eta, kappa, [seed, index], reps, t_max
        )
        rows.append([values[index], algo_abs, algo_oracle, bound_abs, bound_oracle])

    out = args.out if args.out is not None else f"reduction_{sweep}.dat"
    _write_text(
        out,
        _table_text([x_name, "algo_abs", "algo_oracle", "bound_abs", "bound_oracle"], rows),
    )
    _write_manifest(out, "reduction", cfg)
    sys.stdout.write(f"wrote {out}\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    defaults = {
        "n": 2000,
        "p": 2000,
        "lambda": 2.0,
        "labeling": [[0.2, 1.0]],
        "reps": 10,
        "t_max": 50,
        "seed": 1234,
    }
    cfg = _resolve_config(args, defaults)
    n = int(cfg["n"])
    p = int(cfg["p"])
    lam = float(cfg["lambda"])
    labeling = [(float(f), float(k)) for f, k in cfg["labeling"]]
    reps = int(cfg["reps"])
    t_max = int(cfg["t_max"])
    seed = int(cfg["seed"])

    mixture = _intended_mixture(labeling)
    params = ProblemParams(lam=lam, c=n / p, mixture=mixture)
    solution = solve_overlaps(params)
    risk_th = bayes_risk(solution.q_u)
    oracle_th = oracle_risk(lam)

    oracle_err, sup_err, semi_err = [], [], []
    for r in range(reps):
        ds = generate_dataset(p, n, lam, labeling, seed=[seed, r])
        run_params = ProblemParams(
            lam=lam, c=n / p, mixture=EpsilonMixture.from_samples(ds.label_eps)
        )
        oracle_err.append(classify_oracle(ds).error_unlabeled)
        semi_err.append(classify_semisupervised(ds, run_params, t_max=t_max).error_unlabeled)
        if ds.n_labeled > 0:
            sup_err.append(classify_supervised(ds).error_unlabeled)
    if any(e is None for e in oracle_err + semi_err):
        raise SimulationError("simulate needs unlabeled samples to score")
    e_oracle = float(np.mean(oracle_err))
    e_semi = float(np.mean(semi_err))
    e_sup = float(np.mean(sup_err)) if sup_err else float("nan")

    header = [
        "error_oracle",
        "error_oracle_theory",
        "error_sup",
        "error_semi",
        "bayes_risk_theory",
        "oracle_delta",
        "semi_delta",
        "q_u",
        "q_v",
    ]
    row = [
        e_oracle,
        oracle_th,
        e_sup,
        e_semi,
        risk_th,
        e_oracle - oracle_th,
        e_semi - risk_th,
        solution.q_u,
        solution.q_v,
    ]
    text = _table_text(header, [row])
    sys.stdout.write(text)
    if args.out is not None:
        _write_text(args.out, text)
        _write_manifest(args.out, "simulate", cfg)
    return EXIT_OK


def cmd_channel_check(args) -> int:
    defaults = {
        "eps_values": [0.0, 0.25, 0.5, 0.75, 0.95],
        "q_values": [0.1, 0.5, 1.0, 2.0, 5.0],
        "trials": 200000,
        "seed": 99,
    }
    cfg = _resolve_config(args, defaults)
    eps_values = [float(e) for e in cfg["eps_values"]]
    q_values = [float(q) for q in cfg["q_values"]]
    for name, grid in (("eps_values", eps_values), ("q_values", q_values)):
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise CliError(f"{name} must be nonempty and strictly increasing")
    trials = int(cfg["trials"])
    seed = int(cfg["seed"])
    rows = []
    for index, eps in enumerate(eps_values):
        for jndex, q in enumerate(q_values):
            mc, stderr = channel_overlap_mc_stats(
                eps, q, trials, seed=[seed, index, jndex]
            )
            theory = channel_overlap(eps, q)
            if stderr > 0.0:
                z = (mc - theory) / stderr
            else:
                z = 0.0 if mc == theory else float("inf")
            rows.append([eps, q, mc, theory, stderr, z])
    out = args.out if args.out is not None else "channel_check.dat"
    _write_text(out, _table_text(["eps", "q", "mc", "theory", "stderr", "z"], rows))
    _write_manifest(out, "channel-check", cfg)
    sys.stdout.write(f"wrote {out}\n")
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "approx-error": cmd_approx_error,
    "usefulness": cmd_usefulness,
    "labeled-needed": cmd_labeled_needed,
    "reduction": cmd_reduction,
    "simulate": cmd_simulate,
    "channel-check": cmd_channel_check,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uncertain-ssl",
        description="Overlap theory and Monte Carlo verification for "
        "semi-supervised classification with uncertain labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON config file for this run")
        cmd.add_argument("--seed", type=int, help="override the config seed")
        cmd.add_argument("--reps", type=int, help="override the replicate count")
        cmd.add_argument("--tol", type=float, help="override the solver tolerance")
        cmd.add_argument("--out", help="output path (or base path for multi-file commands)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (InfeasibilityError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CliError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
