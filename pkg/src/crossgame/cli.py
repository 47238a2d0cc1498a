"""Command line: scenario runs, parameter sweeps, level comparisons,
equilibrium spot-checks and SVG plots.

Exit codes: 0 success, 2 input error, 3 runtime invariant violation
(collision abort).  All outputs are deterministic for identical inputs;
sweep rows are written in axes-then-seed order regardless of --jobs.
"""

from __future__ import annotations

import argparse
import copy
import csv
import itertools
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import sim as sim_mod
from .game import HorizonParams, PayoffWeights
from .policy import K_MAX, DecisionMemo, levelk_action, make_snapshot, solve_spne
from .sim import (
    CollisionError,
    ConfigError,
    METRIC_FIELDS,
    config_from_dict,
    summary_json,
    trace_lines,
)
from .svg import render_line_chart
from .world import APPROACHES, KinematicLimits, TURNS, VehicleState, build_layout

SWEEP_SCHEMA = "crossgame-sweep/1"

ALLOWED_SWEEP_PATHS = {
    "steps",
    "p_rand",
    "emergency_prob",
    "emergency_order_priority",
    "L_in",
    "L_out",
    "level_mix",
    "arrival",
    "route_probs",
    "limits.v_max",
    "limits.d_min",
    "weights.w_prog",
    "weights.w_wait",
    "weights.w_safe",
    "weights.c_col",
    "weights.rho",
    "horizon.T",
    "horizon.gamma",
    "arrival.mode",
    "arrival.h",
    "arrival.rate",
    "route_probs.straight",
    "route_probs.left",
    "route_probs.right",
}


class CliError(Exception):
    """User input error; maps to exit code 2."""


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"{path}: file not found")
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")


def _set_path(d: dict, path: str, value) -> None:
    parts = path.split(".")
    cur = d
    for p in parts[:-1]:
        cur = cur.setdefault(p, {})
        if not isinstance(cur, dict):
            raise CliError(f"{path}: cannot assign into non-object field")
    cur[parts[-1]] = value


def _run_config_dict(cfg_dict: dict) -> dict:
    """Worker for parallel runs; returns the flat summary dict."""
    config = config_from_dict(cfg_dict)
    result = sim_mod.run(config)
    return result.summary.to_dict()


def _run_many(cfg_dicts: list[dict], jobs: int) -> list[dict]:
    if jobs <= 1 or len(cfg_dicts) <= 1:
        return [_run_config_dict(c) for c in cfg_dicts]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_config_dict, cfg_dicts, chunksize=1))


def _metric_cell(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    cfg_dict = _load_json(args.config)
    if not isinstance(cfg_dict, dict):
        raise CliError("config: must be a JSON object")
    if args.seed is not None:
        cfg_dict["seed"] = args.seed
    if args.steps is not None:
        cfg_dict["steps"] = args.steps
    try:
        config = config_from_dict(cfg_dict)
    except ConfigError as exc:
        raise CliError(f"config error: {exc}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / "trace.jsonl"
    summary_path = out_dir / "summary.json"
    try:
        result = sim_mod.run(config)
    except CollisionError as exc:
        trace_path.write_text(
            "\n".join(trace_lines(config, exc.records)) + "\n", encoding="utf-8"
        )
        print(f"collision abort at step {exc.step}: pairs {sorted(exc.pairs)}", file=sys.stderr)
        print(f"diagnostic trace written to {trace_path}", file=sys.stderr)
        return 3

    trace_path.write_text("\n".join(trace_lines(config, result.records)) + "\n", encoding="utf-8")
    summary_path.write_text(summary_json(result.summary), encoding="utf-8")
    if not args.quiet:
        sys.stdout.write(summary_json(result.summary))
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _parse_sweep(spec: dict, max_runs: int):
    if not isinstance(spec, dict):
        raise CliError("sweep: must be a JSON object")
    unknown = set(spec) - {"schema", "base", "axes", "seeds", "out"}
    if unknown:
        raise CliError(f"sweep.{sorted(unknown)[0]}: unknown field")
    if spec.get("schema") != SWEEP_SCHEMA:
        raise CliError(f"sweep.schema: must be '{SWEEP_SCHEMA}'")
    base = spec.get("base")
    if not isinstance(base, dict):
        raise CliError("sweep.base: must be a config object")
    axes = spec.get("axes", [])
    if not isinstance(axes, list):
        raise CliError("sweep.axes: must be a list of [path, values] pairs")
    parsed_axes: list[tuple[str, list]] = []
    for entry in axes:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise CliError("sweep.axes: each entry must be [path, values]")
        path, values = entry
        if path not in ALLOWED_SWEEP_PATHS:
            raise CliError(f"sweep.axes: unknown parameter path '{path}'")
        if not isinstance(values, list) or not values:
            raise CliError(f"sweep.axes: '{path}' needs a nonempty value list")
        parsed_axes.append((path, values))
    seeds = spec.get("seeds", [0])
    if not (isinstance(seeds, list) and seeds and all(isinstance(s, int) for s in seeds)):
        raise CliError("sweep.seeds: must be a nonempty list of integers")
    n_runs = len(seeds)
    for _, values in parsed_axes:
        n_runs *= len(values)
    if n_runs > max_runs:
        raise CliError(f"sweep: {n_runs} runs exceed the cap of {max_runs}")
    return base, parsed_axes, seeds, spec.get("out")


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = _load_json(args.sweep)
    base, axes, seeds, spec_out = _parse_sweep(spec, args.max_runs)

    tasks: list[dict] = []
    identity: list[list] = []
    value_lists = [values for _, values in axes]
    for point in itertools.product(*value_lists) if axes else [()]:
        for seed in seeds:
            cfg = copy.deepcopy(base)
            for (path, _), value in zip(axes, point):
                _set_path(cfg, path, value)
            cfg["seed"] = seed
            try:
                config_from_dict(cfg)
            except ConfigError as exc:
                raise CliError(f"config error at {list(point)}, seed {seed}: {exc}")
            tasks.append(cfg)
            identity.append(list(point) + [seed])

    summaries = _run_many(tasks, args.jobs)

    out_dir = Path(args.out if args.out is not None else (spec_out or "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "results.csv"
    header = [path for path, _ in axes] + ["seed"] + list(METRIC_FIELDS)
    rows = [
        ident + [_metric_cell(s[f]) for f in METRIC_FIELDS]
        for ident, s in zip(identity, summaries)
    ]
    _write_csv(out_path, header, rows)
    if not args.quiet:
        print(f"{len(rows)} rows -> {out_path}")
    return 0


# ---------------------------------------------------------------------------
# compare-levels
# ---------------------------------------------------------------------------


def _parse_levels(text: str) -> list[int]:
    try:
        levels = [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise CliError(f"levels: not an integer list: '{text}'")
    if not levels:
        raise CliError("levels: must name at least one level")
    for lv in levels:
        if not (0 <= lv <= K_MAX):
            raise CliError(f"levels: level {lv} outside [0, {K_MAX}]")
    return levels


def _resolve_seeds(args: argparse.Namespace) -> list[int]:
    if args.seeds:
        try:
            return [int(s) for s in args.seeds.split(",") if s != ""]
        except ValueError:
            raise CliError(f"seeds: not an integer list: '{args.seeds}'")
    return list(range(args.seed_base, args.seed_base + args.num_seeds))


def cmd_compare_levels(args: argparse.Namespace) -> int:
    cfg_dict = _load_json(args.config)
    if not isinstance(cfg_dict, dict):
        raise CliError("config: must be a JSON object")
    if args.steps is not None:
        cfg_dict["steps"] = args.steps
    levels = _parse_levels(args.levels)
    seeds = _resolve_seeds(args)

    tasks: list[dict] = []
    for level in levels:
        for seed in seeds:
            cfg = copy.deepcopy(cfg_dict)
            cfg["level_mix"] = {str(level): 1.0}
            cfg["seed"] = seed
            try:
                config_from_dict(cfg)
            except ConfigError as exc:
                raise CliError(f"config error: {exc}")
            tasks.append(cfg)

    summaries = _run_many(tasks, args.jobs)
    by_level: dict[int, list[dict]] = {}
    for i, level in enumerate(levels):
        by_level[level] = summaries[i * len(seeds) : (i + 1) * len(seeds)]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "results.csv"
    header = ["kind", "level", "seed"] + list(METRIC_FIELDS)
    rows: list[list] = []
    for level in levels:
        for seed, summary in zip(seeds, by_level[level]):
            rows.append(
                ["run", level, seed] + [_metric_cell(summary[f]) for f in METRIC_FIELDS]
            )
    aggregates: dict[int, dict] = {}
    for level in levels:
        agg: dict = {}
        for f in METRIC_FIELDS:
            vals = [s[f] for s in by_level[level] if s[f] is not None]
            agg[f] = sum(vals) / len(vals) if vals else None
        aggregates[level] = agg
        rows.append(["aggregate", level, ""] + [_metric_cell(agg[f]) for f in METRIC_FIELDS])
    _write_csv(out_path, header, rows)

    lines = ["level  mean_travel  mean_speed  mean_queue  max_queue"]
    for level in levels:
        agg = aggregates[level]
        mt = agg["mean_travel_time"]
        lines.append(
            f"{level:>5}  {mt if mt is None else f'{mt:.3f}':>11}  "
            f"{agg['mean_speed']:.3f}      {agg['mean_queue_len']:.3f}       "
            f"{agg['max_queue_len']:.1f}"
        )
    for a, b in itertools.combinations(levels, 2):
        wins_a = wins_b = ties = 0
        for sa, sb in zip(by_level[a], by_level[b]):
            ta, tb = sa["mean_travel_time"], sb["mean_travel_time"]
            if ta is None or tb is None:
                continue
            if ta < tb:
                wins_a += 1
            elif tb < ta:
                wins_b += 1
            else:
                ties += 1
        total = wins_a + wins_b + ties
        if total:
            lines.append(
                f"travel-time wins: level {a} beats level {b} on "
                f"{wins_a}/{total} seeds (ties {ties})"
            )
    if not args.quiet:
        print("\n".join(lines))
    print(f"results -> {out_path}" if not args.quiet else "", end="" if args.quiet else "\n")
    return 0


# ---------------------------------------------------------------------------
# spne-check
# ---------------------------------------------------------------------------


def random_small_snapshot(rng: random.Random, max_vehicles: int, layout, limits):
    """Random collision-free snapshot with 1..max_vehicles vehicles."""
    n = rng.randint(1, max_vehicles)
    vehicles: list[VehicleState] = []
    used_cells: set[int] = set()
    vid = 0
    while len(vehicles) < n:
        route = (rng.choice(APPROACHES), rng.choice(TURNS))
        cells = layout.route_table[route]
        idx = rng.randrange(0, len(cells) - 1)
        if cells[idx] in used_cells:
            continue
        used_cells.add(cells[idx])
        vehicles.append(
            VehicleState(
                id=vid,
                emergency=rng.random() < 0.1,
                route=route,
                cell_index=idx,
                speed=rng.randint(0, limits.v_max),
                level=1,
                spawn_step=0,
            )
        )
        vid += 1
    return make_snapshot(vehicles, layout, limits)


def cmd_spne_check(args: argparse.Namespace) -> int:
    if args.max_vehicles not in (1, 2):
        raise CliError("max-vehicles: must be 1 or 2")
    rng = random.Random(args.seed)
    layout = build_layout(4, 4)
    limits = KinematicLimits(v_max=2, d_min=1)
    weights = PayoffWeights()
    depth = 2
    horizon = HorizonParams(T=depth, gamma=0.5)
    matches = {k: 0 for k in range(1, K_MAX + 1)}
    for _ in range(args.count):
        snapshot = random_small_snapshot(rng, args.max_vehicles, layout, limits)
        profile = solve_spne(snapshot, depth, weights, horizon)
        memo = DecisionMemo()
        for k in range(1, K_MAX + 1):
            ok = all(
                levelk_action(snapshot, v.id, k, weights, horizon, memo) == profile[v.id][0]
                for v in snapshot.vehicles
            )
            if ok:
                matches[k] += 1
    if args.count == 0:
        print("no snapshots requested")
        return 0
    for k in range(1, K_MAX + 1):
        frac = matches[k] / args.count
        print(f"level {k} vs SPNE: first-action agreement {matches[k]}/{args.count} = {frac:.3f}")
    return 0


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------


def cmd_plot(args: argparse.Namespace) -> int:
    try:
        with open(args.results, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            fieldnames = reader.fieldnames or []
            rows = list(reader)
    except FileNotFoundError:
        raise CliError(f"{args.results}: file not found")
    for col in (args.x, args.y) + ((args.group,) if args.group else ()):
        if col not in fieldnames:
            raise CliError(f"column '{col}' not in CSV (has: {', '.join(fieldnames)})")

    groups: dict[str, dict[float, list[float]]] = {}
    for row in rows:
        xs, ys = row[args.x], row[args.y]
        if xs == "" or ys == "":
            continue
        try:
            x = float(xs)
            y = float(ys)
        except ValueError:
            raise CliError(f"non-numeric value in column '{args.x}' or '{args.y}': {xs!r}/{ys!r}")
        g = row[args.group] if args.group else "all"
        groups.setdefault(g, {}).setdefault(x, []).append(y)

    def _group_sort_key(g: str):
        try:
            return (0, float(g), "")
        except ValueError:
            return (1, 0.0, g)

    series = []
    for g in sorted(groups, key=_group_sort_key):
        pts = [
            (x, sum(ys) / len(ys), min(ys), max(ys))
            for x, ys in sorted(groups[g].items())
        ]
        series.append((g, pts))
    svg = render_line_chart(series, args.x, args.y, title=f"{args.y} vs {args.x}")
    out_path = Path(args.out)
    if out_path.is_dir():
        out_path = out_path / "chart.svg"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(svg, encoding="utf-8")
    if not args.quiet:
        print(f"chart -> {out_path}")
    return 0


# ---------------------------------------------------------------------------
# entry
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossgame",
        description="Level-k game simulation of an unsignalized intersection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a config JSON")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--steps", type=int, default=None)
    p_run.add_argument("--out", default=".")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep from a sweep JSON")
    p_sweep.add_argument("sweep")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--max-runs", type=int, default=10000)
    p_sweep.add_argument("--quiet", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare-levels", help="same seeds under pure reasoning levels")
    p_cmp.add_argument("config")
    p_cmp.add_argument("--levels", default="0,1")
    p_cmp.add_argument("--seeds", default="", help="explicit comma-separated seed list")
    p_cmp.add_argument("--num-seeds", type=int, default=30)
    p_cmp.add_argument("--seed-base", type=int, default=0)
    p_cmp.add_argument("--steps", type=int, default=None)
    p_cmp.add_argument("--jobs", type=int, default=1)
    p_cmp.add_argument("--out", default=".")
    p_cmp.add_argument("--quiet", action="store_true")
    p_cmp.set_defaults(func=cmd_compare_levels)

    p_spne = sub.add_parser("spne-check", help="level-k vs backward-induction agreement")
    p_spne.add_argument("--count", type=int, default=100)
    p_spne.add_argument("--seed", type=int, default=0)
    p_spne.add_argument("--max-vehicles", type=int, default=2)
    p_spne.set_defaults(func=cmd_spne_check)

    p_plot = sub.add_parser("plot", help="SVG line chart from a results CSV")
    p_plot.add_argument("results")
    p_plot.add_argument("--x", required=True)
    p_plot.add_argument("--y", required=True)
    p_plot.add_argument("--group", default=None)
    p_plot.add_argument("--out", default="chart.svg")
    p_plot.add_argument("--quiet", action="store_true")
    p_plot.set_defaults(func=cmd_plot)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
