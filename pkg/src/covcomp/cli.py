"""Command-line interface: ``covcomp gen|solve|sweep|oracle|simulate``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from .clustering import (
    ClusteringError,
    clustering_from_topology,
    evaluate,
    stability,
    topology_document,
)
from .coverage import CoverageConfig, CoverageError, CoverageModel
from .descent import DescentConfig, run_descent
from .framesim import schedule_csv, simulate_cluster, throughput_check
from .linkmodel import build_alpha
from .oracle import DEFAULT_CAP, EnumerationTooLarge, clustering_count, oracle_best, oracle_pareto, oracle_table
from .pareto import SweepConfig, SweepRow, default_lambdas, sweep, sweep_csv
from .scenario import (
    UAV_D,
    UAV_GAMMA,
    UAV_RADIO,
    UAV_SIDE,
    UAV_TASKS,
    Region,
    ScenarioError,
    dumps_scenario,
    generate_scenario,
    load_scenario,
)


class CliError(Exception):
    pass


def _write_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _load(path, pathloss_r=None):
    if not Path(path).exists():
        raise CliError(f"scenario file not found: {path}")
    scenario = load_scenario(path)
    if pathloss_r is not None:
        scenario = scenario.with_radio(pathloss_r=pathloss_r)
    return scenario


# -- gen -----------------------------------------------------------------------------


def cmd_gen(args, parser):
    if args.region is not None:
        vals = args.region
        if len(vals) not in (2, 4):
            parser.error("--region takes lo,hi or xlo,xhi,ylo,yhi")
        region = Region(len(vals) // 2, tuple(zip(vals[0::2], vals[1::2])))
    else:
        region = Region.square(args.square_km * 1000.0, dimension=args.dimension)

    radio = UAV_RADIO if args.pathloss_r is None else replace(UAV_RADIO, pathloss_r=args.pathloss_r)
    tasks = replace(
        UAV_TASKS,
        b0_bits=UAV_TASKS.b0_bits if args.b0 is None else args.b0,
        b1_bits=UAV_TASKS.b1_bits if args.b1 is None else args.b1,
        task_arrival_RT=UAV_TASKS.task_arrival_RT if args.rt is None else args.rt,
    )
    if args.method == "exact1d" or (args.method is None and region.dimension == 1):
        cfg = CoverageConfig(method="exact1d", resolution_m=None)
    elif args.method == "montecarlo":
        cfg = CoverageConfig(method="montecarlo", resolution_m=None, samples=args.samples, seed=args.mc_seed)
    else:
        cfg = CoverageConfig(method="grid", resolution_m=args.resolution_m)
    scenario = generate_scenario(
        args.n,
        region,
        radio=radio,
        tasks=tasks,
        coverage_radius_D=UAV_D if args.D is None else args.D,
        gamma=UAV_GAMMA if args.gamma is None else args.gamma,
        coverage_config=cfg,
        seed=args.seed,
    )
    _write_atomic(args.out, dumps_scenario(scenario))
    print(f"wrote {args.out}: {scenario.n} nodes, region {list(region.bounds)}, seed {args.seed}")


# -- solve ---------------------------------------------------------------------------


def _summary(evaluation, clustering, scenario, extra=""):
    return (
        f"lambda={evaluation.lam} masters={len(clustering.masters)} "
        f"coverage={evaluation.coverage.fraction:.6f} rate={evaluation.rate:.6f} "
        f"L={evaluation.lagrangian:.6f} {stability(evaluation, scenario.tasks).value}{extra}"
    )


def cmd_solve(args, parser):
    scenario = _load(args.scenario, args.pathloss_r)
    alpha = build_alpha(scenario)
    model = CoverageModel(scenario)
    cfg = DescentConfig(
        lam=args.lam,
        tol=args.tol,
        max_outer_iters=args.max_iters,
        absolute_area=args.absolute_area,
        leximin=not args.no_leximin,
    )
    best = None
    for k in range(args.restarts):
        res = run_descent(scenario, cfg, alpha=alpha, model=model, order_seed=None if k == 0 else k)
        if best is None or res.evaluation.lagrangian > best.evaluation.lagrangian:
            best = res
    if args.out_topology:
        doc = topology_document(scenario, best.clustering, best.evaluation, alpha)
        doc["iterations"] = best.iterations
        doc["converged"] = best.converged
        _write_atomic(args.out_topology, json.dumps(doc, indent=2) + "\n")
    if args.trace:
        _write_atomic(args.trace, best.trace.to_csv())
    flag = "" if best.converged else " (iteration cap reached)"
    print(_summary(best.evaluation, best.clustering, scenario, f" iterations={best.iterations}{flag}"))


# -- sweep ---------------------------------------------------------------------------


def cmd_sweep(args, parser):
    if args.lambdas is not None and args.grid is not None:
        parser.error("give either --lambdas or --grid, not both")
    if args.lambdas is not None:
        lams = args.lambdas
    elif args.grid is not None:
        if len(args.grid) != 3 or args.grid[2] < 1:
            parser.error("--grid takes min,max,count with count >= 1")
        lams = default_lambdas(args.grid[0], args.grid[1], int(args.grid[2]), include_zero=args.with_zero)
    else:
        lams = default_lambdas()
    if not lams:
        parser.error("the lambda grid is empty")
    if any(x < 0 for x in lams):
        parser.error("lambda values must be non-negative")

    scenario = _load(args.scenario, args.pathloss_r)
    cfg = SweepConfig(
        lambdas=tuple(lams),
        tol=args.tol,
        restarts=args.restarts,
        absolute_area=args.absolute_area,
        leximin=not args.no_leximin,
    )
    rows = sweep(scenario, cfg)
    text = sweep_csv(rows, scenario.tasks, pareto=args.pareto)
    if args.out_csv:
        _write_atomic(args.out_csv, text)
    else:
        sys.stdout.write(text)
    if args.topology_dir:
        alpha = build_alpha(scenario)
        out = Path(args.topology_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, r in enumerate(rows):
            doc = topology_document(scenario, r.clustering, r.evaluation, alpha)
            _write_atomic(out / f"topology_{k:03d}.json", json.dumps(doc, indent=2) + "\n")


# -- oracle --------------------------------------------------------------------------


def cmd_oracle(args, parser):
    if (args.lam is None) == (not args.pareto):
        parser.error("give exactly one of --lambda or --pareto")
    scenario = _load(args.scenario, args.pathloss_r)
    if scenario.n > args.cap:
        raise EnumerationTooLarge(scenario.n, clustering_count(scenario.n), args.cap)
    table = oracle_table(scenario, cap=args.cap, absolute_area=args.absolute_area)
    if args.pareto:
        pts = oracle_pareto(scenario, table=table)
        rows = [SweepRow(float("nan"), p.clustering, evaluate(scenario, p.clustering, 0.0, absolute_area=args.absolute_area), 0, True) for p in pts]
    else:
        clustering, ev = oracle_best(scenario, args.lam, table=table)
        rows = [SweepRow(args.lam, clustering, ev, 0, True)]
        print(_summary(ev, clustering, scenario))
    text = sweep_csv(rows, scenario.tasks)
    if args.out_csv:
        _write_atomic(args.out_csv, text)
    else:
        sys.stdout.write(text)


# -- simulate ------------------------------------------------------------------------


def cmd_simulate(args, parser):
    if not args.T > 0:
        parser.error("--T must be positive")
    scenario = _load(args.scenario)
    try:
        doc = json.loads(Path(args.topology).read_text())
    except FileNotFoundError:
        raise CliError(f"topology file not found: {args.topology}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.topology}: parse error: {exc}") from None
    clustering = clustering_from_topology(doc, scenario.n)
    alpha = build_alpha(scenario)
    analytical = {int(c["master"]) - 1: c.get("rate_tasks_per_s") for c in doc["clusters"]}
    schedules = []
    for m, members in clustering.clusters().items():
        sched = simulate_cluster(scenario, m, members, T=args.T)
        schedules.append(sched)
        sim = throughput_check(sched)
        ref = analytical.get(m)
        ref_txt = "" if ref is None else f" analytical={ref!r} rel_err={abs(sim - ref) / ref:.3e}"
        print(f"cluster master={m + 1} size={len(members)} tau={sched.tau!r} simulated_rate={sim!r}{ref_txt}")
    text = schedule_csv(schedules)
    if args.out_csv:
        _write_atomic(args.out_csv, text)


# -- parser --------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="covcomp", description="Coverage vs. computation-rate clustering planner.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random scenario file")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--square-km", type=float, default=UAV_SIDE / 1000.0)
    g.add_argument("--dimension", type=int, default=2, choices=(1, 2))
    g.add_argument("--region", type=_float_list, help="explicit bounds lo,hi[,lo,hi] in meters")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--preset", choices=("uav",), default="uav", help="parameter preset (UAV surveillance)")
    g.add_argument("--D", type=float, help="coverage radius, meters")
    g.add_argument("--gamma", type=float, help="processing speed, tasks/s")
    g.add_argument("--b0", type=float, help="task input size, bits")
    g.add_argument("--b1", type=float, help="task output size, bits")
    g.add_argument("--rt", type=float, help="task arrival rate R_T, tasks/s")
    g.add_argument("--pathloss-r", type=float)
    g.add_argument("--method", choices=("grid", "montecarlo", "exact1d"))
    g.add_argument("--resolution-m", type=float, default=25.0)
    g.add_argument("--samples", type=_positive_int, default=100_000)
    g.add_argument("--mc-seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)

    def common(sp):
        sp.add_argument("--scenario", required=True)
        sp.add_argument("--pathloss-r", type=float, help="override the scenario's path-loss exponent")
        sp.add_argument("--absolute-area", action="store_true", help="use covered m^2 instead of the fraction in L")

    s = sub.add_parser("solve", help="run the local search at one lambda")
    common(s)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--out-topology")
    s.add_argument("--trace")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--max-iters", type=_positive_int)
    s.add_argument("--restarts", type=_positive_int, default=1)
    s.add_argument("--no-leximin", action="store_true", help="compare worker moves on the minimum cluster rate only")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="sweep lambda and emit coverage/rate rows")
    common(w)
    w.add_argument("--lambdas", type=_float_list)
    w.add_argument("--grid", type=_float_list, help="min,max,count (log-spaced)")
    w.add_argument("--with-zero", action="store_true", help="prepend lambda=0 to --grid")
    w.add_argument("--restarts", type=_positive_int, default=1)
    w.add_argument("--tol", type=float, default=1e-9)
    w.add_argument("--no-leximin", action="store_true", help="compare worker moves on the minimum cluster rate only")
    w.add_argument("--pareto", action="store_true", help="keep only the Pareto frontier, coverage ascending")
    w.add_argument("--out-csv")
    w.add_argument("--topology-dir")
    w.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", help="exhaustive search (small n)")
    common(o)
    o.add_argument("--lambda", dest="lam", type=float)
    o.add_argument("--pareto", action="store_true")
    o.add_argument("--cap", type=int, default=DEFAULT_CAP)
    o.add_argument("--out-csv")
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("simulate", help="event-simulate one frame per cluster of a topology")
    m.add_argument("--scenario", required=True)
    m.add_argument("--topology", required=True)
    m.add_argument("--T", type=float, default=1.0)
    m.add_argument("--out-csv")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, parser)
    except (CliError, ScenarioError, CoverageError, ClusteringError, EnumerationTooLarge, OSError, ValueError) as exc:
        print(f"covcomp {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
