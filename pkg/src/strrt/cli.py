"""Command-line interface: gen, plan, bench, render.

Exit codes: 0 success, 1 no solution found, 2 bad scenario/config/planner,
3 unwritable output path, 4 scenario not renderable.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .bench import (
    PlannerSpec,
    UnknownPlannerError,
    aggregate,
    curve_to_csv,
    default_grid,
    make_planner,
    records_to_csv,
    records_to_jsonl,
    run_benchmark,
)
from .render import (
    RenderDimensionError,
    render_cost_convergence,
    render_scenario,
    render_success_rate,
)
from .scenario import (
    Scenario,
    ScenarioFormatError,
    load_scenario_file,
    make_cluttered,
    make_narrow_passage,
    save_scenario,
)
from .solution import SolutionPath

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_BAD_INPUT = 2
EXIT_UNWRITABLE = 3
EXIT_UNRENDERABLE = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load_scenario_or_die(path: str) -> Scenario:
    try:
        return load_scenario_file(path)
    except (OSError, ScenarioFormatError) as e:
        raise CliError(EXIT_BAD_INPUT, f"cannot load scenario {path}: {e}") from e


def _write_text(path: str, text: str):
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise CliError(EXIT_UNWRITABLE, f"cannot write {path}: {e}") from e


def _parse_value(raw: str):
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("inf", "infinity"):
        return math.inf
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise CliError(EXIT_BAD_INPUT, f"--param expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        out[key] = _parse_value(raw)
    return out


def _parse_windows(raw: str) -> tuple[tuple[float, float], ...]:
    windows = []
    for part in raw.split(","):
        try:
            a, b = part.split(":")
            windows.append((float(a), float(b)))
        except ValueError as e:
            raise CliError(
                EXIT_BAD_INPUT, f"--windows expects t0:t1[,t0:t1...], got {raw!r}"
            ) from e
    return tuple(windows)


def cmd_gen(args) -> int:
    t_max = math.inf if args.t_max is None else args.t_max
    try:
        if args.kind == "narrow":
            windows = _parse_windows(args.windows) if args.windows else ((4.0, 4.5), (8.0, 8.5), (12.0, 12.5))
            scn = make_narrow_passage(dim=args.dim, windows=windows, t_max=t_max)
        else:
            scn = make_cluttered(
                dim=args.dim,
                n_obstacles=args.n_obstacles,
                seed=args.seed,
                t_max=t_max,
            )
    except (ValueError, RuntimeError) as e:
        raise CliError(EXIT_BAD_INPUT, f"cannot generate scenario: {e}") from e
    _write_text(args.out, save_scenario(scn))
    return EXIT_OK


def cmd_plan(args) -> int:
    scn = _load_scenario_or_die(args.scenario)
    params = _parse_params(args.param)
    try:
        planner = make_planner(args.planner, scn, args.seed, params)
    except (UnknownPlannerError, ValueError) as e:
        raise CliError(EXIT_BAD_INPUT, str(e)) from e
    solution, stats = planner.solve(budget_s=args.budget, max_iterations=args.iterations)
    if args.stats:
        _write_text(args.stats, json.dumps(stats.to_dict(), indent=2) + "\n")
    if args.snapshot:
        if not hasattr(planner, "snapshot"):
            raise CliError(EXIT_BAD_INPUT, f"planner {args.planner} has no tree snapshot")
        _write_text(args.snapshot, json.dumps(planner.snapshot()) + "\n")
    if solution is None:
        print("no solution found", file=sys.stderr)
        return EXIT_NO_SOLUTION
    _write_text(args.out, solution.to_json())
    print(f"solution cost {solution.cost} after {stats.iterations} iterations", file=sys.stderr)
    return EXIT_OK


def _scenario_from_config(cfg, config_dir: Path) -> Scenario:
    if isinstance(cfg, str):
        path = Path(cfg)
        if not path.is_absolute():
            path = config_dir / path
        return _load_scenario_or_die(str(path))
    if isinstance(cfg, dict):
        kind = cfg.get("kind")
        try:
            if kind == "narrow":
                keys = {k: v for k, v in cfg.items() if k != "kind"}
                if "windows" in keys:
                    keys["windows"] = tuple(tuple(w) for w in keys["windows"])
                return make_narrow_passage(**keys)
            if kind == "cluttered":
                return make_cluttered(**{k: v for k, v in cfg.items() if k != "kind"})
        except (TypeError, ValueError) as e:
            raise CliError(EXIT_BAD_INPUT, f"bad scenario spec: {e}") from e
        raise CliError(EXIT_BAD_INPUT, f"unknown scenario kind {kind!r}")
    raise CliError(EXIT_BAD_INPUT, "config 'scenario' must be a path or an object")


def cmd_bench(args) -> int:
    config_path = Path(args.config)
    try:
        cfg = json.loads(config_path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(EXIT_BAD_INPUT, f"cannot load config {args.config}: {e}") from e
    if not isinstance(cfg, dict) or "scenario" not in cfg or "planners" not in cfg:
        raise CliError(EXIT_BAD_INPUT, "config must define 'scenario' and 'planners'")
    scenario = _scenario_from_config(cfg["scenario"], config_path.parent)
    planners = []
    for i, p in enumerate(cfg["planners"]):
        if not isinstance(p, dict) or "kind" not in p:
            raise CliError(EXIT_BAD_INPUT, f"planners[{i}] must be an object with 'kind'")
        planners.append(
            PlannerSpec(
                kind=p["kind"],
                label=p.get("label", p["kind"]),
                params=p.get("params", {}),
            )
        )
    runs = args.runs if args.runs is not None else cfg.get("runs", 100)
    budget = args.budget if args.budget is not None else cfg.get("budget_s")
    iterations = args.iterations if args.iterations is not None else cfg.get("iterations")
    base_seed = args.base_seed if args.base_seed is not None else cfg.get("base_seed", 0)
    grid_points = cfg.get("grid_points", 100)
    if budget is None and iterations is None:
        raise CliError(EXIT_BAD_INPUT, "config needs 'budget_s' or 'iterations'")

    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CliError(EXIT_UNWRITABLE, f"cannot create {out_dir}: {e}") from e

    def progress(label, seed, stats):
        if not args.quiet:
            cost = stats.final_cost
            shown = "inf" if math.isinf(cost) else f"{cost:.4f}"
            print(f"[{label}] seed {seed}: cost {shown}", file=sys.stderr)

    try:
        records = run_benchmark(
            scenario,
            planners,
            runs=runs,
            base_seed=base_seed,
            budget_s=budget,
            max_iterations=iterations,
            progress=progress,
        )
    except UnknownPlannerError as e:
        raise CliError(EXIT_BAD_INPUT, str(e)) from e
    horizon = budget if budget is not None else float(iterations)
    curves = aggregate(records, default_grid(horizon, grid_points))
    _write_text(out_dir / "records.csv", records_to_csv(records))
    _write_text(out_dir / "records.jsonl", records_to_jsonl(records))
    for curve in curves:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in curve.planner)
        _write_text(out_dir / f"aggregate_{safe}.csv", curve_to_csv(curve))
    if cfg.get("figures", True):
        x_label = "time [s]" if budget is not None else "iterations"
        try:
            render_success_rate(curves, out_dir / "success_rate.svg", x_label)
            render_cost_convergence(curves, out_dir / "cost_convergence.svg", x_label)
        except OSError as e:
            raise CliError(EXIT_UNWRITABLE, f"cannot write figures: {e}") from e
    return EXIT_OK


def cmd_render(args) -> int:
    scn = _load_scenario_or_die(args.scenario)
    solution = None
    snapshot = None
    if args.solution:
        try:
            solution = SolutionPath.from_json(Path(args.solution).read_text())
        except (OSError, ValueError, KeyError) as e:
            raise CliError(EXIT_BAD_INPUT, f"cannot load solution {args.solution}: {e}") from e
    if args.snapshot:
        try:
            snapshot = json.loads(Path(args.snapshot).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise CliError(EXIT_BAD_INPUT, f"cannot load snapshot {args.snapshot}: {e}") from e
    try:
        render_scenario(
            scn,
            args.out,
            snapshot=snapshot,
            solution=solution,
            t_hi=args.t_max,
            frames=args.frames,
        )
    except RenderDimensionError as e:
        raise CliError(EXIT_UNRENDERABLE, str(e)) from e
    except OSError as e:
        raise CliError(EXIT_UNWRITABLE, f"cannot write {args.out}: {e}") from e
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strrt", description="Space-time motion planning and benchmarks"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a scenario file")
    p_gen.add_argument("--kind", choices=("narrow", "cluttered"), required=True)
    p_gen.add_argument("--dim", type=int, default=1)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--n-obstacles", type=int, default=10)
    p_gen.add_argument("--windows", help="narrow passage openings, t0:t1[,t0:t1...]")
    p_gen.add_argument("--t-max", type=float, default=None, help="arrival-time bound")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_plan = sub.add_parser("plan", help="plan on a scenario")
    p_plan.add_argument("--scenario", required=True)
    p_plan.add_argument("--planner", default="strrt")
    p_plan.add_argument("--seed", type=int, default=0)
    p_plan.add_argument("--budget", type=float, default=None, help="wall-clock seconds")
    p_plan.add_argument("--iterations", type=int, default=None, help="iteration cap")
    p_plan.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p_plan.add_argument("--out", required=True, help="solution JSON path")
    p_plan.add_argument("--stats", default=None, help="run statistics JSON path")
    p_plan.add_argument("--snapshot", default=None, help="tree snapshot JSON path")
    p_plan.set_defaults(func=cmd_plan)

    p_bench = sub.add_parser("bench", help="run a benchmark config")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--out-dir", required=True)
    p_bench.add_argument("--runs", type=int, default=None)
    p_bench.add_argument("--budget", type=float, default=None)
    p_bench.add_argument("--iterations", type=int, default=None)
    p_bench.add_argument("--base-seed", type=int, default=None)
    p_bench.add_argument("--quiet", action="store_true")
    p_bench.set_defaults(func=cmd_bench)

    p_render = sub.add_parser("render", help="render a scenario to SVG")
    p_render.add_argument("--scenario", required=True)
    p_render.add_argument("--solution", default=None)
    p_render.add_argument("--snapshot", default=None)
    p_render.add_argument("--t-max", type=float, default=None, help="time horizon shown")
    p_render.add_argument("--frames", type=int, default=6)
    p_render.add_argument("--out", required=True)
    p_render.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plan" and args.budget is None and args.iterations is None:
            raise CliError(EXIT_BAD_INPUT, "plan needs --budget and/or --iterations")
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
