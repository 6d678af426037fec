"""Experiment runner.

Four subcommands: ``run`` solves one scenario, ``compare`` sweeps the sum
power budget against two baseline schemes, ``region`` sweeps the trade-off
weight, and ``fusion-curve`` tabulates voting accuracy against the
threshold.  Sweeps write CSV (or JSON) with a fixed column order; rows are
sorted before writing so a worker pool never changes the output bytes.

The ``run`` output carries no timing, so repeated identical invocations
emit identical bytes.  Sweep rows do include a wall_ms column; golden-file
comparisons should skip it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from importlib import resources
from pathlib import Path

from . import beamform, fusion, optimizer
from .channel import synthesize_channels
from .errors import Infeasible, MalformedScenario, MpisacError, UnreachableTarget
from .optimizer import HmoConfig, Solution
from .scenario import Scenario, load_scenario, loads_scenario, parse_power

# One row per (scheme, parameter point, seed).  pareto is 0/1 for region
# rows and empty elsewhere; wall_ms is wall time in milliseconds.
RECORD_COLUMNS = (
    "experiment", "mu", "p_sum", "seed", "scheme", "x", "s_size",
    "accuracy", "rate", "objective", "wall_ms", "pareto",
)

FUSION_CURVE_COLUMNS = ("n", "exact", "approx", "best_exact", "opt_approx")

# Weight used by `compare` unless --mu is given.  Small on purpose: the
# sweep is about detection accuracy versus the power budget, and a large
# weight collapses every scheme onto the pure-communication corner.
DEFAULT_COMPARE_MU = 0.01

_SCHEME_ORDER = {"mpisac": 0, "isac-no-fusion": 1, "multi-radar": 2}


# ---------------------------------------------------------------- arguments

def _mu_arg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"mu must be a number, got {text!r}")
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"mu must be in [0, 1], got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed_arg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be nonnegative, got {text}")
    return v


def _power_value(text: str) -> float:
    """Accept either a plain number in watts or a value with a unit."""
    try:
        return float(text)
    except ValueError:
        return parse_power(text)


def _parse_grid(text: str, conv, what: str) -> tuple[float, ...]:
    """Parse "a:b:step" (inclusive of b when it lands on the grid) or a
    single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (conv(parts[0]),)
        if len(parts) != 3:
            raise ValueError("expected a single value or a:b:step")
        a, b, step = (conv(p) for p in parts)
    except (ValueError, MalformedScenario) as exc:
        raise argparse.ArgumentTypeError(f"bad {what} grid {text!r}: {exc}")
    if step <= 0.0:
        raise argparse.ArgumentTypeError(f"bad {what} grid {text!r}: step must be positive")
    if b < a:
        raise argparse.ArgumentTypeError(f"bad {what} grid {text!r}: end below start")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    # round so 0.1 * 3 prints as 0.3 in the output
    return tuple(round(a + k * step, 12) for k in range(count))


def _mu_grid_arg(text: str) -> tuple[float, ...]:
    grid = _parse_grid(text, float, "mu")
    for v in grid:
        if not 0.0 <= v <= 1.0:
            raise argparse.ArgumentTypeError(f"mu grid value {v} outside [0, 1]")
    return grid


def _psum_grid_arg(text: str) -> tuple[float, ...]:
    grid = _parse_grid(text, _power_value, "power")
    for v in grid:
        if v <= 0.0:
            raise argparse.ArgumentTypeError(f"power grid value {v} is not positive")
    return grid


def load_scenario_arg(spec_str: str) -> Scenario:
    """Resolve --scenario: an existing file path, or the name of a shipped
    scenario (default, vote7)."""
    p = Path(spec_str)
    if p.exists():
        return load_scenario(p)
    if "/" not in spec_str and "\\" not in spec_str:
        ref = resources.files("mpisac").joinpath("data", spec_str + ".toml")
        if ref.is_file():
            return loads_scenario(ref.read_text(encoding="utf-8"))
    raise MalformedScenario(f"scenario not found: {spec_str}")


def _worker_count(n_tasks: int) -> int:
    env = os.environ.get("MPISAC_THREADS", "").strip()
    if env:
        try:
            w = int(env)
        except ValueError:
            raise MpisacError(f"MPISAC_THREADS must be an integer, got {env!r}")
        if w < 1:
            raise MpisacError(f"MPISAC_THREADS must be at least 1, got {w}")
    else:
        w = os.cpu_count() or 1
    return max(1, min(w, n_tasks))


# ---------------------------------------------------------------- baselines

def isac_no_fusion(scenario: Scenario, mu: float, table=None) -> Solution:
    """Best single-sensing-DFR selection by objective; all K singletons are
    tried and infeasible ones skipped.  Falls back to all-communication when
    no singleton fits the power budget."""
    if table is None:
        table = beamform.mode_table(synthesize_channels(scenario))
    K = scenario.params.K
    best = None
    for i in range(K):
        x = tuple(1 if j == i else 0 for j in range(K))
        try:
            cand = optimizer.evaluate_selection(scenario, x, mu, table=table)
        except (Infeasible, UnreachableTarget):
            continue
        if best is None or cand.objective > best.objective:
            best = cand
    if best is None:
        best = optimizer.evaluate_selection(scenario, (0,) * K, mu, table=table)
    return best


def multi_radar(scenario: Scenario, mu: float, table=None) -> Solution:
    """All-sensing baseline.  When the pinned minimum powers do not fit the
    budget, greedily drop the weakest echo (largest minimum power) until
    they do.  Dropped radars idle at zero power rather than switching to
    communication, so the rate is exactly zero."""
    if table is None:
        table = beamform.mode_table(synthesize_channels(scenario))
    pr = scenario.params
    K = pr.K
    pmin = []
    for i in range(K):
        b = float(table.b[i, 1])
        pmin.append(math.inf if b <= 0.0 else pr.sigma2 * pr.gamma / b)
    keep = list(range(K))
    while keep:
        worst = max(keep, key=lambda i: pmin[i])
        if pmin[worst] <= pr.P_T and sum(pmin[i] for i in keep) <= pr.P_sum:
            break
        keep.remove(worst)
    x = tuple(1 if i in keep else 0 for i in range(K))
    p = tuple(pmin[i] if i in keep else 0.0 for i in range(K))
    acc = fusion.surrogate_accuracy(scenario.errors, tuple(sorted(keep)))
    obj = (1.0 - mu) * acc
    return Solution(x=x, p=p, accuracy=acc, rate=0.0, objective=obj,
                    mu=mu, trace=(obj,))


# ------------------------------------------------------------------ records

def _bitstring(x) -> str:
    return "".join(str(int(v)) for v in x)


def _record(experiment: str, mu: float, p_sum: float, seed: int, scheme: str,
            sol: Solution, wall_ms: float) -> dict:
    return {
        "experiment": experiment,
        "mu": mu,
        "p_sum": p_sum,
        "seed": seed,
        "scheme": scheme,
        "x": _bitstring(sol.x),
        "s_size": int(sum(sol.x)),
        "accuracy": sol.accuracy,
        "rate": sol.rate,
        "objective": sol.objective,
        "wall_ms": wall_ms,
        "pareto": "",
    }


def _compare_point(task) -> list[dict]:
    base, mu, p_sum, seed, cfg = task
    sc = replace(base, params=replace(base.params, P_sum=p_sum), seed=seed)
    ch = synthesize_channels(sc)
    table = beamform.mode_table(ch)
    rows = []
    t0 = time.perf_counter()
    sol = optimizer.hmo_solve(sc, mu, replace(cfg, seed=seed), channels=ch)
    rows.append(_record("compare", mu, p_sum, seed, "mpisac", sol,
                        (time.perf_counter() - t0) * 1e3))
    t0 = time.perf_counter()
    sol = isac_no_fusion(sc, mu, table)
    rows.append(_record("compare", mu, p_sum, seed, "isac-no-fusion", sol,
                        (time.perf_counter() - t0) * 1e3))
    t0 = time.perf_counter()
    sol = multi_radar(sc, mu, table)
    rows.append(_record("compare", mu, p_sum, seed, "multi-radar", sol,
                        (time.perf_counter() - t0) * 1e3))
    return rows


def _region_point(task) -> list[dict]:
    base, mu, seed, cfg, exhaustive = task
    sc = replace(base, seed=seed)
    ch = synthesize_channels(sc)
    t0 = time.perf_counter()
    if exhaustive:
        sol = optimizer.exhaustive_solve(sc, mu, channels=ch)
        scheme = "exhaustive"
    else:
        sol = optimizer.hmo_solve(sc, mu, replace(cfg, seed=seed), channels=ch)
        scheme = "hmo"
    wall = (time.perf_counter() - t0) * 1e3
    return [_record("region", mu, sc.params.P_sum, seed, scheme, sol, wall)]


def mark_pareto(rows: list[dict]) -> None:
    """Set pareto=1 on rows not dominated in (rate, accuracy) by any other
    row with the same seed, else 0."""
    for r in rows:
        dominated = any(
            o["seed"] == r["seed"]
            and o["rate"] >= r["rate"] and o["accuracy"] >= r["accuracy"]
            and (o["rate"] > r["rate"] or o["accuracy"] > r["accuracy"])
            for o in rows)
        r["pareto"] = 0 if dominated else 1


def _run_grid(worker, tasks: list) -> list[dict]:
    w = _worker_count(len(tasks))
    if w <= 1:
        results = [worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=w) as ex:
            results = list(ex.map(worker, tasks))
    return [row for rows in results for row in rows]


# ------------------------------------------------------------------- output

def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return "%.9g" % v
    return str(v)


def _csv_text(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt_cell(r[c]) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_rows(rows: list[dict], columns, fmt: str, out: str | None) -> None:
    if fmt == "csv":
        _emit(_csv_text(rows, columns), out)
    else:
        _emit(json.dumps(rows, sort_keys=True, indent=2) + "\n", out)


# ------------------------------------------------------------- subcommands

def _cmd_run(args) -> int:
    sc = load_scenario_arg(args.scenario)
    channel_seed = args.seed if args.seed is not None else sc.seed
    search_seed = channel_seed
    if args.channel_seed is not None:
        channel_seed = args.channel_seed
    if args.search_seed is not None:
        search_seed = args.search_seed
    sc = replace(sc, seed=channel_seed)
    ch = synthesize_channels(sc)
    if args.exhaustive:
        sol = optimizer.exhaustive_solve(sc, args.mu, channels=ch)
        scheme = "exhaustive"
    else:
        cfg = HmoConfig(L=args.L, max_iter=args.max_iter,
                        max_regen=args.max_regen, seed=search_seed)
        sol = optimizer.hmo_solve(sc, args.mu, cfg, channels=ch)
        scheme = "hmo"
    payload = {
        "experiment": "run",
        "scheme": scheme,
        "scenario": args.scenario,
        "mu": sol.mu,
        "p_sum": sc.params.P_sum,
        "channel_seed": channel_seed,
        "search_seed": search_seed,
        "x": _bitstring(sol.x),
        "s_size": int(sum(sol.x)),
        "accuracy": sol.accuracy,
        "rate": sol.rate,
        "objective": sol.objective,
        "p": list(sol.p),
        "trace": list(sol.trace),
    }
    if args.format == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        row = {c: payload.get(c, "") for c in RECORD_COLUMNS}
        row["experiment"] = "run"
        row["seed"] = channel_seed
        # no timing in run output, identical runs stay byte-identical
        row["wall_ms"] = ""
        _emit(_csv_text([row], RECORD_COLUMNS), args.out)
    return 0


def _cmd_compare(args) -> int:
    base = load_scenario_arg(args.scenario)
    cfg = HmoConfig(L=args.L, max_iter=args.max_iter, max_regen=args.max_regen)
    tasks = [(base, args.mu, p_sum, seed, cfg)
             for p_sum in args.psum_grid for seed in range(args.seeds)]
    rows = _run_grid(_compare_point, tasks)
    rows.sort(key=lambda r: (r["p_sum"], r["seed"], _SCHEME_ORDER[r["scheme"]]))
    _emit_rows(rows, RECORD_COLUMNS, args.format, args.out)
    return 0


def _cmd_region(args) -> int:
    base = load_scenario_arg(args.scenario)
    cfg = HmoConfig(L=args.L, max_iter=args.max_iter, max_regen=args.max_regen)
    tasks = [(base, mu, seed, cfg, args.exhaustive)
             for mu in args.mu_grid for seed in range(args.seeds)]
    rows = _run_grid(_region_point, tasks)
    mark_pareto(rows)
    rows.sort(key=lambda r: (r["mu"], r["seed"]))
    _emit_rows(rows, RECORD_COLUMNS, args.format, args.out)
    return 0


def _cmd_fusion_curve(args) -> int:
    sc = load_scenario_arg(args.scenario)
    prof = sc.errors
    N = len(prof.P)
    n_best = fusion.best_exact_threshold(prof)
    n_opt = fusion.optimal_threshold(prof)
    rows = []
    for n in range(1, N + 1):
        rows.append({
            "n": n,
            "exact": fusion.exact_accuracy(prof, n),
            "approx": fusion.binomial_accuracy(prof, n),
            "best_exact": int(n == n_best),
            "opt_approx": int(n == n_opt),
        })
    _emit_rows(rows, FUSION_CURVE_COLUMNS, args.format, args.out)
    return 0


# --------------------------------------------------------------------- main

def _add_common(sub, default_mu=None):
    sub.add_argument("--scenario", default="default",
                     help="scenario file path, or a shipped name (default, vote7)")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default=None)
    if default_mu is not None:
        sub.add_argument("--mu", type=_mu_arg, default=default_mu,
                         help="trade-off weight in [0, 1]")
    sub.add_argument("--L", type=_positive_int, default=2,
                     help="neighborhood radius (max bits flipped per move)")
    sub.add_argument("--max-iter", type=_positive_int, default=10,
                     help="accepted moves before the search stops")
    sub.add_argument("--max-regen", type=_positive_int, default=50,
                     help="consecutive rejected draws before the search stops")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpisac",
        description="Sensing/communication mode selection experiments.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("run", help="solve one scenario")
    _add_common(p, default_mu=0.5)
    p.add_argument("--seed", type=_seed_arg, default=None,
                   help="channel and search seed (default: scenario seed)")
    p.add_argument("--channel-seed", type=_seed_arg, default=None)
    p.add_argument("--search-seed", type=_seed_arg, default=None)
    p.add_argument("--exhaustive", action="store_true",
                   help="enumerate all selections instead of searching")
    p.set_defaults(func=_cmd_run, format_default="json")

    p = subs.add_parser("compare", help="sweep the power budget against baselines")
    _add_common(p, default_mu=DEFAULT_COMPARE_MU)
    p.add_argument("--psum-grid", type=_psum_grid_arg, default="0.005:0.05:0.005",
                   help="sum power grid a:b:step, watts or unit strings")
    p.add_argument("--seeds", type=_positive_int, default=1,
                   help="seeds 0..N-1 per grid point")
    p.set_defaults(func=_cmd_compare, format_default="csv")

    p = subs.add_parser("region", help="sweep the trade-off weight")
    _add_common(p)
    p.add_argument("--mu-grid", type=_mu_grid_arg, default="0:1:0.1",
                   help="weight grid a:b:step within [0, 1]")
    p.add_argument("--seeds", type=_positive_int, default=1)
    p.add_argument("--exhaustive", action="store_true")
    p.set_defaults(func=_cmd_region, format_default="csv")

    p = subs.add_parser("fusion-curve",
                        help="voting accuracy against the threshold")
    _add_common(p)
    p.set_defaults(func=_cmd_fusion_curve, format_default="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # grid defaults pass through argparse types only when given on the
    # command line; normalize the string defaults here
    if getattr(args, "psum_grid", None) is not None and isinstance(args.psum_grid, str):
        args.psum_grid = _psum_grid_arg(args.psum_grid)
    if getattr(args, "mu_grid", None) is not None and isinstance(args.mu_grid, str):
        args.mu_grid = _mu_grid_arg(args.mu_grid)
    if args.format is None:
        args.format = args.format_default
    try:
        return args.func(args)
    except MpisacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
