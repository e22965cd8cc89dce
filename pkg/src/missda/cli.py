"""Command-line toolkit: reference tables, simulations, data generation, fitting.

Every command writes its primary result (CSV or JSON), a rendered PNG figure
next to it, and a manifest recording the resolved arguments, so any output
can be reproduced by re-running with `--config <manifest>`.  Exit codes:
0 on success (including fits reported as non-converged), 2 on usage or input
errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import read_dataset_csv, write_dataset_csv, write_truth_csv
from .efficiency import are_full, are_ignore_mcar, mcar_grid, table_grid
from .errors import DataError, MissdaError
from .estimation import FitConfig, fit_complete, fit_full, fit_ignore
from .missingness import (
    DISCRIMINANT_SQUARE,
    MECHANISMS,
    FullParams,
    MissParams,
    gamma,
    selection_argument,
)
from .model import CanonicalModel, beta_from_theta, sigmoid
from .montecarlo import SimConfig, gen_dataset, run_replications

TABLE_DELTAS = (1.0, 1.5, 2.0, 2.5, 3.0)
TABLE_XI0 = (1.5, 3.0, 5.0)
TABLE_XI1 = (-0.1, -0.5, -1.0, -5.0, -10.0)
MCAR_PI1 = (0.1, 0.2, 0.3, 0.4, 0.5)
MCAR_DELTAS = (1.0, 2.0, 3.0, 4.0)

FULL_GRID_PRESETS = ("paper-table2", "paper-table3")
MCAR_GRID_PRESET = "paper-table1"
SIM_PRESETS = {"paper-table4": 100, "paper-table5": 500}


def reference_grid_cells() -> list[tuple[float, float, float]]:
    """The 75 (delta, xi0, xi1) cells of the reference grids, row-major."""
    return [
        (delta, xi0, xi1)
        for xi1 in TABLE_XI1
        for xi0 in TABLE_XI0
        for delta in TABLE_DELTAS
    ]


# ---------------------------------------------------------------------------
# option plumbing
# ---------------------------------------------------------------------------


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    if isinstance(raw, dict) and "args" in raw and isinstance(raw["args"], dict):
        return raw["args"]
    if isinstance(raw, dict):
        return raw
    raise DataError(f"config {path} must contain a JSON object")


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge precedence: explicit flag > config file > internal default."""
    config = _load_config(getattr(args, "config", None))
    resolved = dict(defaults)
    for key in defaults:
        if key in config:
            resolved[key] = config[key]
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _env_seed() -> int:
    return int(os.environ.get("MISSDA_SEED", "0"))


def _env_threads() -> int:
    return int(os.environ.get("MISSDA_THREADS", "1"))


def _fmt(value, digits: int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if digits is None:
        return repr(float(value))
    return format(float(value), f".{digits}f")


def _write_csv(path: Path, columns: list[str], rows: list[dict], digits: int | None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c), digits) for c in columns])


def _write_manifest(path: Path, command: str, resolved: dict, run: dict, outputs):
    manifest = {
        "tool": "missda",
        "version": __version__,
        "command": command,
        "args": resolved,
        "run": run,
        "outputs": [str(p) for p in outputs],
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_stamp(threads: int | None = None) -> dict:
    run = {"timestamp": datetime.now(timezone.utc).isoformat()}
    if threads is not None:
        run["threads"] = threads
    return run


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_are(args: argparse.Namespace) -> None:
    opts = _resolve(
        args,
        {
            "grid": None, "mcar": False, "delta": None, "xi0": None, "xi1": None,
            "pi1": 0.5, "p": 1, "gamma_bar": 1.0, "audit_pi1": False,
            "digits": None, "out": "are.csv", "figure": True,
        },
    )
    out = Path(opts["out"])
    outputs = [out]

    grid = opts["grid"]
    if grid is not None and grid not in FULL_GRID_PRESETS + (MCAR_GRID_PRESET,):
        raise DataError(
            f"unknown grid {grid!r}; expected one of "
            f"{FULL_GRID_PRESETS + (MCAR_GRID_PRESET,)}"
        )
    mcar_mode = bool(opts["mcar"]) or grid == MCAR_GRID_PRESET

    if mcar_mode:
        if grid == MCAR_GRID_PRESET:
            rows = mcar_grid(MCAR_PI1, MCAR_DELTAS, gamma_bar=1.0, p=1)
        elif grid is not None:
            raise DataError(f"grid {grid!r} is not an MCAR grid")
        else:
            if opts["delta"] is None:
                raise DataError("single-cell MCAR mode requires --delta")
            rows = mcar_grid(
                [opts["pi1"]], [opts["delta"]],
                gamma_bar=opts["gamma_bar"], p=opts["p"],
            )
        columns = ["pi1", "delta", "are"]
        _write_csv(out, columns, rows, opts["digits"])
        if opts["figure"]:
            from .figures import save_mcar_figure

            fig_path = out.with_suffix(".png")
            save_mcar_figure(rows, fig_path)
            outputs.append(fig_path)
    else:
        if grid in FULL_GRID_PRESETS:
            cells = reference_grid_cells()
        else:
            if None in (opts["delta"], opts["xi0"], opts["xi1"]):
                raise DataError("single-cell mode requires --delta, --xi0 and --xi1")
            cells = [(opts["delta"], opts["xi0"], opts["xi1"])]
        rows = table_grid(cells, pi1=opts["pi1"], p=opts["p"],
                          audit_pi1=bool(opts["audit_pi1"]))
        columns = ["delta", "xi0", "xi1", "are", "gamma"]
        if opts["audit_pi1"]:
            columns += ["are_pi1_min", "are_pi1_max"]
        for row in rows:
            if row["error"]:
                print(f"cell {row['delta']},{row['xi0']},{row['xi1']}: "
                      f"{row['error']}", file=sys.stderr)
        _write_csv(out, columns, rows, opts["digits"])
        if opts["figure"]:
            from .figures import save_are_grid_figure

            fig_path = out.with_suffix(".png")
            save_are_grid_figure(rows, fig_path)
            outputs.append(fig_path)

    manifest = out.with_name(out.stem + "_manifest.json")
    _write_manifest(manifest, "are", opts, _run_stamp(), outputs)


def _cmd_simulate(args: argparse.Namespace) -> None:
    opts = _resolve(
        args,
        {
            "grid": None, "delta": None, "xi0": None, "xi1": None,
            "pi1": 0.5, "p": 1, "n": None, "B": 500, "seed": _env_seed(),
            "bootstrap": 1000, "mechanism": DISCRIMINANT_SQUARE,
            "digits": None, "out": "simulate.csv", "figure": True,
        },
    )
    threads = args.threads if args.threads is not None else _env_threads()
    out = Path(opts["out"])

    grid = opts["grid"]
    if grid is not None:
        if grid not in SIM_PRESETS:
            raise DataError(f"unknown grid {grid!r}; expected one of {tuple(SIM_PRESETS)}")
        cells = reference_grid_cells()
        n_default = SIM_PRESETS[grid]
    else:
        if None in (opts["delta"], opts["xi0"], opts["xi1"]):
            raise DataError("single-cell mode requires --delta, --xi0 and --xi1")
        cells = [(opts["delta"], opts["xi0"], opts["xi1"])]
        n_default = None
    n = opts["n"] if opts["n"] is not None else n_default
    if n is None:
        raise DataError("--n is required unless a grid preset supplies it")

    cell_seeds = np.random.SeedSequence(int(opts["seed"])).generate_state(
        len(cells), dtype=np.uint64
    )
    rows = []
    for (delta, xi0, xi1), cell_seed in zip(cells, cell_seeds):
        model = CanonicalModel(delta=delta, pi1=opts["pi1"], p=opts["p"])
        xi = MissParams(xi0=xi0, xi1=xi1)
        config = SimConfig(
            model=model, xi=xi, n=int(n), B=int(opts["B"]), seed=int(cell_seed),
            bootstrap_resamples=int(opts["bootstrap"]),
            mechanism=opts["mechanism"], threads=threads,
        )
        result = run_replications(config)
        rows.append(
            {
                "delta": delta, "xi0": xi0, "xi1": xi1, "n": int(n),
                "re_hat": result.re_hat, "bootstrap_se": result.bootstrap_se,
                "are_theoretical": are_full(model, xi).are,
                "n_failed": result.n_failed,
            }
        )
        if result.flagged:
            print(
                f"cell {delta},{xi0},{xi1}: {result.n_failed}/{config.B} "
                "replications failed to converge",
                file=sys.stderr,
            )

    columns = ["delta", "xi0", "xi1", "n", "re_hat", "bootstrap_se",
               "are_theoretical", "n_failed"]
    _write_csv(out, columns, rows, opts["digits"])
    outputs = [out]
    if opts["figure"]:
        from .figures import save_simulation_figure

        fig_path = out.with_suffix(".png")
        save_simulation_figure(rows, fig_path)
        outputs.append(fig_path)
    manifest = out.with_name(out.stem + "_manifest.json")
    _write_manifest(manifest, "simulate", opts, _run_stamp(threads), outputs)


def _cmd_gen(args: argparse.Namespace) -> None:
    opts = _resolve(
        args,
        {
            "n": 500, "delta": 2.0, "pi1": 0.5, "p": 2, "xi0": 3.0, "xi1": -2.0,
            "mechanism": DISCRIMINANT_SQUARE, "seed": _env_seed(),
            "out": "dataset.csv", "figure": True,
        },
    )
    out = Path(opts["out"])
    model = CanonicalModel(delta=opts["delta"], pi1=opts["pi1"], p=int(opts["p"]))
    xi = MissParams(xi0=opts["xi0"], xi1=opts["xi1"])
    sample = gen_dataset(model, xi, int(opts["n"]), int(opts["seed"]),
                         opts["mechanism"])
    write_dataset_csv(out, sample.data)
    truth_path = out.with_name(out.stem + "_truth.csv")
    write_truth_csv(truth_path, sample.data.y, sample.z, sample.m)
    outputs = [out, truth_path]
    if opts["figure"]:
        from .figures import save_dataset_figure
        from .model import canonical_theta

        fig_path = out.with_suffix(".png")
        save_dataset_figure(
            sample.data.y, sample.data.labels, fig_path,
            beta=beta_from_theta(canonical_theta(model)),
        )
        outputs.append(fig_path)
    manifest = out.with_name(out.stem + "_manifest.json")
    _write_manifest(manifest, "gen", opts, _run_stamp(), outputs)


def _theta_to_dict(theta) -> dict:
    return {
        "pi1": theta.pi1,
        "mu1": theta.mu1.tolist(),
        "mu2": theta.mu2.tolist(),
        "sigma": theta.sigma.tolist(),
    }


def _cmd_fit(args: argparse.Namespace) -> None:
    opts = _resolve(
        args,
        {
            "input": None, "mode": "full", "mechanism": DISCRIMINANT_SQUARE,
            "out": "fit.json", "gtol": 1e-6, "max_iter": 500,
        },
    )
    if not opts["input"]:
        raise DataError("--input CSV is required")
    if opts["mode"] not in ("complete", "ignore", "full"):
        raise DataError(f"unknown mode {opts['mode']!r}")
    data = read_dataset_csv(opts["input"])
    config = FitConfig(gtol=float(opts["gtol"]), max_iter=int(opts["max_iter"]))

    report: dict = {
        "mode": opts["mode"],
        "mechanism": opts["mechanism"],
        "n": data.n,
        "p": data.p,
        "n_labeled": data.n_labeled,
        "n_unlabeled": data.n_unlabeled,
    }
    if opts["mode"] == "complete":
        theta = fit_complete(data)
        from .likelihood import loglik_complete

        report.update(
            theta_hat=_theta_to_dict(theta),
            beta_hat=_beta_to_dict(beta_from_theta(theta)),
            loglik=loglik_complete(theta, data).value,
            converged=True,
            iterations=0,
            gradient_norm=0.0,
        )
    elif opts["mode"] == "ignore":
        fit = fit_ignore(data, config=config)
        report.update(
            theta_hat=_theta_to_dict(fit.params),
            beta_hat=_beta_to_dict(beta_from_theta(fit.params)),
            loglik=fit.loglik,
            converged=fit.converged,
            iterations=fit.iterations,
            gradient_norm=fit.gradient_norm,
        )
    else:
        fit = fit_full(data, config=config, mechanism=opts["mechanism"])
        psi = fit.params
        q_boundary = float(
            sigmoid(selection_argument(np.array(0.0), psi.xi, psi.mechanism))
        )
        report.update(
            theta_hat=_theta_to_dict(psi.theta),
            xi_hat={"xi0": psi.xi.xi0, "xi1": psi.xi.xi1},
            beta_hat=_beta_to_dict(beta_from_theta(psi.theta)),
            loglik=fit.loglik,
            converged=fit.converged,
            iterations=fit.iterations,
            gradient_norm=fit.gradient_norm,
            q_curve={
                "q_at_boundary": q_boundary,
                "gamma_hat": gamma(psi),
                "empirical_missing_rate": data.n_unlabeled / data.n,
            },
        )

    out = Path(opts["out"])
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    manifest = out.with_name(out.stem + "_manifest.json")
    _write_manifest(manifest, "fit", opts, _run_stamp(), [out])


def _beta_to_dict(beta) -> dict:
    return {"beta0": beta.beta0, "beta1": beta.beta1.tolist()}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file (or manifest) supplying defaults")
    sub.add_argument("--out", help="primary output path")
    sub.add_argument("--digits", type=int, help="round displayed values to N decimals")
    sub.add_argument("--no-figure", dest="figure", action="store_false", default=None,
                     help="skip the PNG figure")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="missda",
        description="Semi-supervised two-class normal discriminant analysis "
                    "with an informative missing-label mechanism.",
    )
    parser.add_argument("--version", action="version", version=f"missda {__version__}")
    subs = parser.add_subparsers(dest="command")

    p_are = subs.add_parser("are", help="asymptotic relative efficiency tables")
    p_are.add_argument("--grid", help="preset grid: paper-table1, paper-table2 or paper-table3")
    p_are.add_argument("--mcar", action="store_true", default=None,
                       help="MCAR ignore-rule efficiency instead of the full rule")
    p_are.add_argument("--delta", type=float)
    p_are.add_argument("--xi0", type=float)
    p_are.add_argument("--xi1", type=float)
    p_are.add_argument("--pi1", type=float)
    p_are.add_argument("--p", type=int)
    p_are.add_argument("--gamma-bar", dest="gamma_bar", type=float,
                       help="MCAR missing fraction (default 1)")
    p_are.add_argument("--audit-pi1", dest="audit_pi1", action="store_true",
                       default=None, help="report min/max ARE over priors 0.2..0.8")
    _add_common(p_are)
    p_are.set_defaults(handler=_cmd_are)

    p_sim = subs.add_parser("simulate", help="Monte Carlo relative-efficiency study")
    p_sim.add_argument("--grid", help="preset grid: paper-table4 (n=100) or paper-table5 (n=500)")
    p_sim.add_argument("--delta", type=float)
    p_sim.add_argument("--xi0", type=float)
    p_sim.add_argument("--xi1", type=float)
    p_sim.add_argument("--pi1", type=float)
    p_sim.add_argument("--p", type=int)
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--B", type=int, help="number of replications")
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--bootstrap", type=int, help="bootstrap resamples")
    p_sim.add_argument("--mechanism", choices=MECHANISMS)
    p_sim.add_argument("--threads", type=int)
    _add_common(p_sim)
    p_sim.set_defaults(handler=_cmd_simulate)

    p_gen = subs.add_parser("gen", help="generate a partially classified dataset")
    p_gen.add_argument("--n", type=int)
    p_gen.add_argument("--delta", type=float)
    p_gen.add_argument("--pi1", type=float)
    p_gen.add_argument("--p", type=int)
    p_gen.add_argument("--xi0", type=float)
    p_gen.add_argument("--xi1", type=float)
    p_gen.add_argument("--mechanism", choices=MECHANISMS)
    p_gen.add_argument("--seed", type=int)
    _add_common(p_gen)
    p_gen.set_defaults(handler=_cmd_gen)

    p_fit = subs.add_parser("fit", help="fit a model to a dataset CSV")
    p_fit.add_argument("--input", help="dataset CSV (y1..yp,label)")
    p_fit.add_argument("--mode", choices=("complete", "ignore", "full"))
    p_fit.add_argument("--mechanism", choices=MECHANISMS)
    p_fit.add_argument("--gtol", type=float)
    p_fit.add_argument("--max-iter", dest="max_iter", type=int)
    _add_common(p_fit)
    p_fit.set_defaults(handler=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "handler", None):
        parser.print_help(sys.stderr)
        return 2
    try:
        args.handler(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MissdaError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
