"""Command-line front end.

Subcommands mirror the library: sample, cross, quench, influence, explore,
reveal, arm, circuit, compare (pi/bounds/empirical) and experiment.  Point
sets travel as CSV files with a JSON sidecar (see io.write_points); most
results are printed as JSON, the compare and experiment families as CSV.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

from .arms import AnnulusQuery, ArmQuery, blue_circuit_quenched_mc, one_arm_quenched_mc
from .compare import (
    check_pi_bounds_single,
    default_event_spec,
    empirical_comparison,
    pi_ratio,
    pi_table,
)
from .crossing import (
    BLUE,
    HORIZONTAL,
    RED,
    VERTICAL,
    CrossingQuery,
    detect_crossing,
    draw_coloring,
    quenched_probability_exact,
    quenched_probability_mc,
)
from .experiments import KINDS, ExperimentConfig, run_experiment, write_outputs
from .explore import quarter_inner, revealment_exact, revealment_mc, run_exploration
from .geometry import Rect, build_tessellation, sample_binomial, sample_poisson
from .influence import influence_l2, influences_exact, influences_mc
from .io import read_points, write_points


def _parse_rect(text: str) -> Rect:
    """Parses 'rho,area[,cx,cy]' (center defaults to the origin)."""
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 2:
        return Rect(rho=parts[0], area=parts[1])
    if len(parts) == 4:
        return Rect(rho=parts[0], area=parts[1], center=(parts[2], parts[3]))
    raise argparse.ArgumentTypeError("expected 'rho,area' or 'rho,area,cx,cy'")


def _parse_point(text: str) -> tuple[float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected 'x,y'")
    return parts[0], parts[1]


def _emit_json(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _emit_csv(header: list[str], rows: list[list]) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _load(args) -> tuple:
    config = read_points(args.points)
    return config, build_tessellation(config)


def _target_query(args, window: Rect) -> CrossingQuery:
    target = args.target if args.target is not None else window
    return CrossingQuery(target=target, direction=args.direction, color=args.color)


def cmd_sample(args) -> int:
    window = Rect(rho=args.rho, area=args.area)
    if args.model == "binomial":
        if args.n is None:
            raise SystemExit("sample: --n is required for the binomial model")
        config = sample_binomial(window, args.n, args.seed)
    else:
        config = sample_poisson(window, args.seed)
    side = write_points(config, args.out)
    _emit_json({"out": str(args.out), "sidecar": str(side), "model": config.model, "count": config.n})
    return 0


def cmd_cross(args) -> int:
    _, tess = _load(args)
    coloring = draw_coloring(tess, args.color_seed)
    query = _target_query(args, tess.window)
    _emit_json(
        {
            "crossing": detect_crossing(tess, coloring, query),
            "color": args.color,
            "direction": args.direction,
            "n_cells": tess.n_cells,
        }
    )
    return 0


def cmd_quench(args) -> int:
    _, tess = _load(args)
    query = _target_query(args, tess.window)
    if args.exact:
        est = quenched_probability_exact(tess, query)
    else:
        est = quenched_probability_mc(tess, query, args.colorings, args.seed, workers=args.workers)
    _emit_json({"value": est.value, "method": est.method, "m": est.colorings_used, "ci": est.ci_halfwidth})
    return 0


def cmd_influence(args) -> int:
    _, tess = _load(args)
    query = _target_query(args, tess.window)
    if args.exact:
        vec = influences_exact(tess, query)
    else:
        vec = influences_mc(tess, query, args.colorings, args.seed, workers=args.workers)
    _emit_json(
        {
            "influences": [float(v) for v in vec.values],
            "sum_sq": influence_l2(vec),
            "method": vec.method,
            "m": vec.m,
        }
    )
    return 0


def cmd_explore(args) -> int:
    _, tess = _load(args)
    coloring = draw_coloring(tess, args.color_seed)
    inner = quarter_inner(tess.window)
    trace = run_exploration(
        tess, inner, coloring, segment_seed=args.segment_seed, segment_x=args.segment_x
    )
    _emit_json(
        {
            "segment_x": trace.segment_x,
            "queried": list(trace.queried),
            "queried_count": len(trace.queried),
            "outcome": trace.outcome,
        }
    )
    return 0


def cmd_reveal(args) -> int:
    _, tess = _load(args)
    inner = quarter_inner(tess.window)
    if args.exact:
        rep = revealment_exact(tess, inner, segment_x=args.segment_x)
    else:
        rep = revealment_mc(tess, inner, args.runs, args.seed, workers=args.workers)
    _emit_json(
        {
            "delta": rep.delta,
            "method": rep.method,
            "m": rep.m,
            "segment_x": rep.segment_x,
            "per_cell": [float(v) for v in rep.per_cell],
        }
    )
    return 0


def cmd_arm(args) -> int:
    _, tess = _load(args)
    q = ArmQuery(u=args.u, a=args.a, b=args.b)
    est = one_arm_quenched_mc(tess, q, args.colorings, args.seed)
    _emit_json({"value": est.value, "method": est.method, "m": est.colorings_used, "ci": est.ci_halfwidth})
    return 0


def cmd_circuit(args) -> int:
    _, tess = _load(args)
    q = AnnulusQuery(center=args.center, j=args.j)
    est = blue_circuit_quenched_mc(tess, q, args.colorings, args.seed)
    _emit_json({"value": est.value, "method": est.method, "m": est.colorings_used, "ci": est.ci_halfwidth})
    return 0


def cmd_compare_pi(args) -> int:
    value = pi_ratio(args.n, args.m)
    ok = value <= 2.0 + 1e-9
    _emit_csv(["n", "m", "pi", "bound_ok"], [[args.n, args.m, repr(value), "true" if ok else "false"]])
    return 0


def cmd_compare_bounds(args) -> int:
    rows = []
    all_ok = True
    for n in range(1, args.nmax + 1):
        violations, _, _, _ = check_pi_bounds_single(n)
        table = pi_table(n)
        ok = not violations
        all_ok = all_ok and ok
        rows.append([n, table.argmax, repr(table.max_value), "true" if ok else "false"])
    _emit_csv(["n", "m", "pi", "bound_ok"], rows)
    return 0 if all_ok else 1


def cmd_compare_empirical(args) -> int:
    spec = default_event_spec(args.event, args.n, rho=args.rho)
    rep = empirical_comparison(spec, args.n, args.K, args.m, args.seed)
    _emit_csv(
        [
            "event", "n", "K", "m", "p_binomial", "p_poisson",
            "se_binomial", "se_poisson", "upper_ok", "lower_ok", "tail_ok",
        ],
        [[
            args.event, rep.n, rep.K, rep.m, repr(rep.p_binomial), repr(rep.p_poisson),
            repr(rep.se_binomial), repr(rep.se_poisson),
            "true" if rep.upper_ok else "false",
            "" if rep.lower_ok is None else ("true" if rep.lower_ok else "false"),
            "true" if rep.tail_ok else "false",
        ]],
    )
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    rows = run_experiment(args.kind, cfg)
    out = args.out if args.out is not None else cfg.out
    text = write_outputs(args.kind, cfg, rows, out=out, svg=args.svg)
    if out is None:
        sys.stdout.write(text)
    return 0


def _add_points(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", required=True, help="point-set CSV written by the sample command")


def _add_target(p: argparse.ArgumentParser) -> None:
    p.add_argument("--target", type=_parse_rect, default=None, help="'rho,area[,cx,cy]' (default: the window)")
    p.add_argument("--direction", choices=[HORIZONTAL, VERTICAL], default=HORIZONTAL)
    p.add_argument("--color", choices=[RED, BLUE], default=RED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voronoiperc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a point configuration and save it")
    p.add_argument("--model", choices=["binomial", "poisson"], required=True)
    p.add_argument("--n", type=int, default=None, help="point count (binomial model)")
    p.add_argument("--rho", type=float, default=1.0, help="window aspect ratio")
    p.add_argument("--area", type=float, default=1.0, help="window area")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("cross", help="crossing indicator for one coloring")
    _add_points(p)
    p.add_argument("--color-seed", type=int, required=True, dest="color_seed")
    _add_target(p)
    p.set_defaults(func=cmd_cross)

    p = sub.add_parser("quench", help="quenched crossing probability of a tessellation")
    _add_points(p)
    p.add_argument("--exact", action="store_true", help="enumerate all colorings (small cell counts)")
    p.add_argument("--colorings", type=int, default=1024, help="Monte Carlo coloring count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_target(p)
    p.set_defaults(func=cmd_quench)

    p = sub.add_parser("influence", help="per-point influences on the crossing event")
    _add_points(p)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--colorings", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_target(p)
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("explore", help="run the segment-to-right exploration once")
    _add_points(p)
    p.add_argument("--color-seed", type=int, required=True, dest="color_seed")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--segment-x", type=float, default=None, dest="segment_x")
    g.add_argument("--segment-seed", type=int, default=None, dest="segment_seed")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("reveal", help="revealment of the exploration algorithm")
    _add_points(p)
    p.add_argument("--exact", action="store_true", help="average over all colorings at a fixed segment")
    p.add_argument("--segment-x", type=float, default=None, dest="segment_x")
    p.add_argument("--runs", type=int, default=1024, help="Monte Carlo run count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_reveal)

    p = sub.add_parser("arm", help="one-arm probability from a ball to a larger radius")
    _add_points(p)
    p.add_argument("--u", type=_parse_point, required=True, help="'x,y' center")
    p.add_argument("--a", type=float, required=True, help="inner radius")
    p.add_argument("--b", type=float, required=True, help="outer radius")
    p.add_argument("--colorings", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_arm)

    p = sub.add_parser("circuit", help="blue circuit probability in a scale-j annulus")
    _add_points(p)
    p.add_argument("--center", type=_parse_point, required=True, help="'x,y' annulus center")
    p.add_argument("--j", type=int, required=True, help="annulus scale index")
    p.add_argument("--colorings", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("compare", help="binomial vs Poisson comparison tools")
    csub = p.add_subparsers(dest="compare_command", required=True)

    c = csub.add_parser("pi", help="one density ratio value")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.set_defaults(func=cmd_compare_pi)

    c = csub.add_parser("bounds", help="ratio bounds for all n up to a limit")
    c.add_argument("--nmax", type=int, required=True)
    c.set_defaults(func=cmd_compare_bounds)

    c = csub.add_parser("empirical", help="sampled event probabilities under both models")
    c.add_argument("--event", choices=["empty", "crossing"], required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--K", type=int, default=200, help="point-set replicas")
    c.add_argument("--m", type=int, default=64, help="colorings per replica (crossing event)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--rho", type=float, default=1.0)
    c.set_defaults(func=cmd_compare_empirical)

    p = sub.add_parser("experiment", help="batch experiments driven by a JSON config")
    p.add_argument("kind", choices=list(KINDS))
    p.add_argument("--config", required=True, help="JSON file mirroring ExperimentConfig")
    p.add_argument("--out", default=None, help="CSV path (JSON summary written next to it)")
    p.add_argument("--svg", default=None, help="write line plots to this SVG path")
    p.add_argument("--workers", type=int, default=None, help="override the config worker count")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
