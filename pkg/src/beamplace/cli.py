"""Command-line interface: ``beamplace generate | solve | compare``.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 exact solver
refused the instance (vertex cap or node budget), 130 interrupted.
Standard output carries data only; diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .graph import build_graph
from .linkbudget import (
    METRICS_COLUMNS,
    empirical_cdf,
    evaluate,
    write_cdf_csv,
    write_metrics_csv,
    write_per_user_csv,
)
from .scenario import (
    ConfigError,
    ScenarioConfig,
    config_hash,
    generate,
    instance_seed,
    load_config,
    read_users_csv,
    write_users_csv,
)
from .solvers import ALGORITHMS, BudgetExceeded, InstanceTooLarge, solve

log = logging.getLogger("beamplace")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_EXACT, EXIT_INTERRUPT = 0, 2, 3, 4, 130

TRIAL_COLUMNS = ["instance_id", "solver", "n", "trial", "seed", "nab", "load_gap", "mean_scgnr_db", "min_scgnr_db"]
SUMMARY_COLUMNS = ["solver", "n", "trials", "mean_nab", "mean_load_gap", "mean_mean_scgnr_db", "mean_min_scgnr_db"]


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _manifest(args, cfg: ScenarioConfig, records: list[dict], files: list[Path], out: Path,
              name: str = "manifest.json", **extra) -> Path:
    doc = {
        "tool": "beamplace",
        "version": __version__,
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "command": ["beamplace", *args.argv],
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "files": sorted(str(p.relative_to(out)) for p in files),
        "records": records,
        **extra,
    }
    path = out / name
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def _parse_sizes(text: str) -> list[int]:
    """Comma list ("10,20,30") or inclusive range "start:stop:step"."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1:
                raise ValueError
            sizes = list(range(start, stop + 1, step))
        else:
            sizes = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"sizes must be positive integers, got {text!r}")
    return sizes


def _parse_algos(text: str) -> list[str]:
    algos = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if not algos or bad:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}; choose from {', '.join(ALGORITHMS)}")
    return algos


# -- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files, records = [], []
    for i in range(args.count):
        seed = instance_seed(cfg.seed, i)
        users = generate(cfg.with_seed(seed))
        path = out / f"users_{i:04d}.csv"
        write_users_csv(users, path)
        files.append(path)
        records.append({"instance_id": path.stem, "seed": seed, "n": len(users), "file": path.name})
    _manifest(args, cfg, records, files, out)
    return EXIT_OK


# -- solve ------------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = _load(args)
    instance = Path(args.instance)
    users = read_users_csv(instance)
    params = cfg.solver if args.seed is None else cfg.solver.with_seed(args.seed)
    out = Path(args.out) if args.out else instance.parent
    out.mkdir(parents=True, exist_ok=True)

    g = build_graph(users, cfg.sat, cfg.distance)
    t0 = time.perf_counter()
    sol = solve(args.algo, users, cfg.sat, g, params, instance_id=instance.stem)
    runtime_ms = (time.perf_counter() - t0) * 1e3
    report = evaluate(sol, users, cfg.sat, cfg.link, g)

    stem = f"{instance.stem}_{args.algo}"
    sol_path = out / f"{stem}.json"
    metrics_path = out / f"{stem}_metrics.csv"
    sol.save(sol_path)
    write_metrics_csv([report], metrics_path)
    files = [sol_path, metrics_path]
    if args.per_user:
        pu = out / f"{stem}_users.csv"
        write_per_user_csv(report, pu)
        files.append(pu)
    record = {"instance_id": instance.stem, "solver": args.algo, "runtime_ms": round(runtime_ms, 3), **report.row()}
    _manifest(args, cfg, [record], files, out, name=f"{stem}_manifest.json")
    print(sol.nab)
    return EXIT_OK


# -- compare ----------------------------------------------------------------

def _run_trial(task):
    cfg, n, trial, algos = task
    seed = instance_seed(cfg.seed, trial)
    inst_cfg = cfg.with_users(n).with_seed(seed)
    users = generate(inst_cfg)
    g = build_graph(users, cfg.sat, cfg.distance)
    params = cfg.solver.with_seed(seed)
    instance_id = f"n{n}_t{trial:03d}"
    results = []
    for algo in algos:
        t0 = time.perf_counter()
        sol = solve(algo, users, cfg.sat, g, params, instance_id=instance_id)
        runtime_ms = (time.perf_counter() - t0) * 1e3
        rep = evaluate(sol, users, cfg.sat, cfg.link, g)
        row = rep.row()
        row.update(trial=trial, seed=seed)
        results.append((row, runtime_ms, rep.mean_scgnr_db, rep.min_scgnr_db))
    return n, trial, results


def summarize(rows: list[dict], raw: dict) -> list[dict]:
    """Per (solver, n) means; ``raw`` maps (solver, n) -> lists of unrounded stats."""
    groups: dict[tuple[str, int], list[dict]] = {}
    for r in rows:
        groups.setdefault((r["solver"], int(r["n"])), []).append(r)
    out = []
    for (solver, n), rs in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        means, mins = raw[(solver, n)]
        out.append({
            "solver": solver,
            "n": n,
            "trials": len(rs),
            "mean_nab": f"{np.mean([int(r['nab']) for r in rs]):.6f}",
            "mean_load_gap": f"{np.mean([int(r['load_gap']) for r in rs]):.6f}",
            "mean_mean_scgnr_db": f"{np.mean(means):.6f}",
            "mean_min_scgnr_db": f"{np.mean(mins):.6f}",
        })
    return out


def trend_checks(summary: list[dict]) -> list[dict]:
    """Directional comparisons of greedy against bkmeans per size."""
    by = {(s["solver"], s["n"]): s for s in summary}
    sizes = sorted({s["n"] for s in summary})
    checks = []
    for n in sizes:
        g, b = by.get(("greedy", n)), by.get(("bkmeans", n))
        if g is None or b is None:
            continue
        pairs = [
            ("nab_greedy_le_bkmeans", float(g["mean_nab"]) <= float(b["mean_nab"]), "mean_nab"),
            ("mean_scgnr_bkmeans_ge_greedy", float(b["mean_mean_scgnr_db"]) >= float(g["mean_mean_scgnr_db"]), "mean_mean_scgnr_db"),
            ("min_scgnr_bkmeans_ge_greedy", float(b["mean_min_scgnr_db"]) >= float(g["mean_min_scgnr_db"]), "mean_min_scgnr_db"),
        ]
        if n >= 500:
            pairs.append(("load_gap_bkmeans_le_greedy", float(b["mean_load_gap"]) <= float(g["mean_load_gap"]), "mean_load_gap"))
        for name, holds, key in pairs:
            checks.append({"check": name, "n": n, "greedy": float(g[key]), "bkmeans": float(b[key]), "holds": bool(holds)})
    return checks


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)


def cmd_compare(args) -> int:
    cfg = _load(args)
    if args.trials < 1:
        raise ConfigError("trials", "must be >= 1")
    if "exact" in args.algos and max(args.sizes) > cfg.solver.exact_limit:
        raise InstanceTooLarge(
            f"size {max(args.sizes)} exceeds the exact solver cap of {cfg.solver.exact_limit} "
            "(raise solver.exact_limit in the config)"
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(cfg, n, t, args.algos) for n in args.sizes for t in range(args.trials)]

    done: dict[tuple[int, int], list] = {}
    interrupted = False
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for n, trial, res in pool.map(_run_trial, tasks):
                    done[(n, trial)] = res
        else:
            for task in tasks:
                n, trial, res = _run_trial(task)
                done[(n, trial)] = res
    except KeyboardInterrupt:
        interrupted = True
        log.warning("interrupted; writing %d completed trials", len(done))

    rows, records = [], []
    raw: dict[tuple[str, int], tuple[list, list]] = {}
    order = {a: i for i, a in enumerate(args.algos)}
    for (n, trial) in sorted(done):
        for row, runtime_ms, mean_db, min_db in sorted(done[(n, trial)], key=lambda r: order[r[0]["solver"]]):
            rows.append(row)
            means, mins = raw.setdefault((row["solver"], n), ([], []))
            means.append(mean_db)
            mins.append(min_db)
            records.append({"instance_id": row["instance_id"], "solver": row["solver"],
                            "runtime_ms": round(runtime_ms, 3), **{k: row[k] for k in METRICS_COLUMNS[2:]}})

    files = []
    trials_path = out / "trials.csv"
    _write_csv(trials_path, TRIAL_COLUMNS, rows)
    files.append(trials_path)
    summary = summarize(rows, raw)
    summary_path = out / "summary.csv"
    _write_csv(summary_path, SUMMARY_COLUMNS, summary)
    files.append(summary_path)
    cdf_dir = out / "cdf"
    cdf_dir.mkdir(exist_ok=True)
    for (solver, n), (means, mins) in sorted(raw.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        for stat, values in (("mean", means), ("min", mins)):
            p = cdf_dir / f"cdf_{solver}_n{n}_{stat}_scgnr.csv"
            write_cdf_csv(empirical_cdf(values), p)
            files.append(p)

    checks = trend_checks(summary)
    failed = [c for c in checks if not c["holds"]]
    for c in failed:
        log.warning("trend check %s failed at n=%d (greedy %.4f, bkmeans %.4f)", c["check"], c["n"], c["greedy"], c["bkmeans"])
    extra = {
        "sizes": args.sizes,
        "algorithms": args.algos,
        "trials": args.trials,
        "interrupted": interrupted,
        "trend_checks": checks,
        "trend_failures": len(failed),
        "model_parameters": {
            "sat": cfg.sat.__dict__,
            "link": cfg.link.__dict__,
            "region": cfg.region.__dict__,
            "distribution": cfg.distribution,
        },
    }
    _manifest(args, cfg, records, files, out, **extra)
    return EXIT_INTERRUPT if interrupted else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="beamplace", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"beamplace {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    def common(sp):
        sp.add_argument("--config", help="experiment config (JSON); defaults are used when omitted")
        sp.add_argument("--seed", type=int, help="overrides the config seed")

    g = sub.add_parser("generate", help="write seeded user-set CSVs")
    common(g)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve one user-set CSV")
    common(s)
    s.add_argument("--instance", required=True)
    s.add_argument("--algo", choices=ALGORITHMS, default="greedy")
    s.add_argument("--out", help="output directory (defaults to the instance's directory)")
    s.add_argument("--per-user", action="store_true", help="also write per-user SCGNR CSV")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("compare", help="Monte Carlo comparison over sizes and algorithms")
    common(c)
    c.add_argument("--trials", type=int, default=20)
    c.add_argument("--sizes", type=_parse_sizes, default=[10, 20, 30], help="'10,20,30' or '10:30:10'")
    c.add_argument("--algos", type=_parse_algos, default=["greedy", "bkmeans"])
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"beamplace: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InstanceTooLarge, BudgetExceeded) as exc:
        print(f"beamplace: {exc}", file=sys.stderr)
        return EXIT_EXACT
    except OSError as exc:
        print(f"beamplace: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # malformed instance files and similar input problems
        print(f"beamplace: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
