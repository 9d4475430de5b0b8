"""Command-line front end: ``lamperti-ou {simulate,oracle,verify}``.

Exit codes: 0 pass, 1 statistical fail, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .config import MAX_SEED, RunConfig, load_config
from .errors import ConfigError, Unavailable
from .experiments import EXPERIMENTS, REPLICATE_KEYS, RunOptions, run_experiment
from .oracles import mean_inverse_hat_I, moment_oracle
from .paths import build_scene, exp_functional, simulate_path
from .processes import ProcessKind, eval_U, eval_U_stationary, eval_V, eval_X
from .replicates import run_replicates

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="INI file with [model] and [experiment]")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed (overrides the config)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    common.add_argument("--reps", type=int, metavar="N", help="replicate count override")
    common.add_argument("--threads", type=int, default=1, metavar="K", help="worker threads (results do not depend on it)")
    common.add_argument("--quiet", action="store_true", help="suppress console output")
    p = argparse.ArgumentParser(prog="lamperti-ou", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="write trajectories of X, U, V or stationary U as CSV")
    sub.add_parser("oracle", parents=[common], help="write the moment table of the dual functional")
    sub.add_parser("verify", parents=[common],
                   help=f"run a verification experiment ({', '.join(sorted(EXPERIMENTS))})")
    return p


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        if not 0 <= args.seed <= MAX_SEED:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.reps is not None:
        if args.reps < 1:
            raise ConfigError("--reps must be positive")
        keys = [k for k in REPLICATE_KEYS if k in cfg.params]
        if not keys:
            raise ConfigError(f"--reps does not apply to {cfg.experiment!r}")
        cfg.params[keys[0]] = args.reps
    if args.threads < 1:
        raise ConfigError("--threads must be positive")
    return cfg


def _manifest(cfg: RunConfig, files: list[str], extra: dict | None = None) -> dict:
    out = {
        "package": "lamperti_ou",
        "version": __version__,
        "backend": BACKEND,
        "config": cfg.echo(),
        "seed": cfg.seed,
        "files": sorted(files),
    }
    out.update(extra or {})
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n", encoding="utf-8")


# -- commands -----------------------------------------------------------------------


def cmd_simulate(cfg: RunConfig, threads: int = 1) -> tuple[int, list[str]]:
    p = cfg.params
    kind = ProcessKind(p["kind"])
    times = np.linspace(0.0, p["horizon"], p["n_points"])
    start = float(p["start"])
    if kind is not ProcessKind.U_STATIONARY and not (start > 0 or (kind is ProcessKind.V and start == 0)):
        raise ConfigError("experiment section: start must be positive")

    def one(i, rng):
        if kind is ProcessKind.U_STATIONARY:
            scene = build_scene(cfg.model, rng, A_max=float(times[-1]), step=cfg.step, rel_tol=cfg.rel_tol)
            return eval_U_stationary(scene, times)
        expf = exp_functional(simulate_path(cfg.model, max(float(times[-1]), 1.0), rng, cfg.step))
        if kind is ProcessKind.X:
            return eval_X(expf, times, start, rng)
        if kind is ProcessKind.U:
            return eval_U(expf, times, start, rng)
        return eval_V(expf, times, start)

    rows = run_replicates(one, p["n_reps"], cfg.seed, threads=threads)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, values in enumerate(rows):
        name = f"trajectory_{i:04d}.csv"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(times, np.atleast_1d(values)):
            w.writerow([repr(float(t)), repr(float(v))])
        (out / name).write_text(buf.getvalue(), encoding="utf-8")
        files.append(name)
    _write_json(out / "manifest.json", _manifest(cfg, files + ["manifest.json"], {"kind": kind.value}))
    return EXIT_PASS, files


def oracle_rows(cfg: RunConfig) -> list[list[str]]:
    model = cfg.model
    if not model.is_subordinator:
        raise ConfigError(f"oracle needs a subordinator model, got {model.label()}")
    label = model.label()
    rows = [[label, "moment", str(n), repr(moment_oracle(model, n))] for n in range(1, cfg.params["n_max"] + 1)]
    m = mean_inverse_hat_I(model)
    rows.append([label, "mean_inverse_hat_I", "", "infinite" if m == float("inf") else repr(m)])
    return rows


def cmd_oracle(cfg: RunConfig) -> tuple[int, list[str]]:
    if not 1 <= cfg.params["n_max"] <= 20:
        raise ConfigError("experiment section: n_max must lie in 1..20")
    rows = oracle_rows(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "quantity", "n", "value"])
    w.writerows(rows)
    (out / "oracle.csv").write_text(buf.getvalue(), encoding="utf-8")
    _write_json(out / "manifest.json", _manifest(cfg, ["oracle.csv", "manifest.json"]))
    return EXIT_PASS, ["oracle.csv"]


def cmd_verify(cfg: RunConfig, threads: int = 1):
    opts = RunOptions(threads=threads, step=cfg.step, rel_tol=cfg.rel_tol, budget_s=cfg.budget_s)
    report = run_experiment(cfg.experiment, cfg.model, cfg.params, cfg.seed, opts)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", report.to_dict())
    (out / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    _write_json(out / "manifest.json", _manifest(cfg, ["report.json", "report.csv", "manifest.json"]))
    return (EXIT_PASS if report.verdict else EXIT_FAIL), report


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    say = (lambda *a: None) if args.quiet else (lambda *a: print(*a))
    try:
        cfg = _apply_overrides(load_config(args.config, args.command), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "simulate":
            code, files = cmd_simulate(cfg, args.threads)
            say(f"wrote {len(files)} trajectories to {cfg.out}")
        elif args.command == "oracle":
            code, _ = cmd_oracle(cfg)
            say(f"wrote {Path(cfg.out) / 'oracle.csv'}")
        else:
            code, report = cmd_verify(cfg, args.threads)
            say(report.summary_line())
            for k, v in report.checks.items():
                say(f"  [{'ok' if v else 'FAIL'}] {k}")
            for note in report.notes:
                say(f"  note: {note}")
        return code
    except (ConfigError, Unavailable, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
