"""Command-line interface.

Every command writes one report (JSON by default) to stdout or ``--output``.
Exit status is 0 on success, 1 on domain errors (bad graph file, failed
precondition, size guard) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .experiments import (
    EXPERIMENT_SOLVER_TOL,
    REFERENCE_SAMPLES,
    REFERENCE_TABLE,
    SWEEP_TOLS,
    SampleConfig,
    WeightMode,
    binomial_interval,
    distribution_from_records,
    probe_edge_sum_conjecture,
    run_samples,
)
from .graph import (
    TABLE_GRAPHS,
    CliqueSumSpec,
    GraphError,
    WeightedGraph,
    cost_matrix,
    named_graph,
    read_graph,
    vertex_sum,
)
from .linalg import BACKEND, numerical_rank
from .maxcut import MAX_BRUTE_FORCE_N, brute_force_maxcut, gw_round, sdp_value
from .sdp import DEFAULT_MAX_ITER, DEFAULT_RANK_TOL, DEFAULT_TOL, check_optimality, rank_report, solve
from .structure import (
    compose_vertex_sum,
    cycle_rank1_analysis,
    diamond_analysis,
    vertex_sum_min_rank_exists,
)


class DomainError(Exception):
    """Reported as a one-line diagnostic with exit status 1."""


# --------------------------------------------------------------------------
# argument types


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return v


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite comma-separated numbers: {text!r}")
    return vals


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


# --------------------------------------------------------------------------
# graph input


def _load_graph(spec: str | None, weights: Sequence[float] | None, path: str | None,
                default: str | None = None) -> WeightedGraph:
    """Resolve ``--graph`` (a name or a ``.json`` file), ``--graph-file`` and ``--weights``."""
    if spec and path:
        raise DomainError("give either --graph or --graph-file, not both")
    if path is None and spec is not None and (spec.endswith(".json") or Path(spec).is_file()):
        path = spec
    if path is not None:
        if weights is not None:
            raise DomainError("--weights only applies to named graphs")
        try:
            return read_graph(path)
        except OSError as exc:
            raise DomainError(f"{path}: {exc.strerror or exc}") from None
    name = spec or default
    if name is None:
        raise DomainError("a graph is required (--graph NAME or --graph-file PATH)")
    return named_graph(name, weights)


def _add_graph_args(p: argparse.ArgumentParser, suffix: str = "", default: str | None = None) -> None:
    p.add_argument(f"--graph{suffix}", metavar="NAME|FILE",
                   help="named graph (k3 c4 c5 c6 diamond butterfly fish kN cN) or a graph JSON file"
                   + (f"; default {default}" if default else ""))
    p.add_argument(f"--weights{suffix}", type=_float_list, metavar="W1,W2,...",
                   help="edge weights for a named graph, in its edge order")
    p.add_argument(f"--graph-file{suffix}", metavar="PATH", help="graph JSON file")


def _graph_from(args, suffix: str = "", default: str | None = None) -> WeightedGraph:
    key = suffix.replace("-", "_")
    return _load_graph(getattr(args, f"graph{key}"), getattr(args, f"weights{key}"),
                       getattr(args, f"graph_file{key}"), default)


# --------------------------------------------------------------------------
# report emission


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _text_lines(obj, prefix: str = "") -> list[str]:
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            lines.extend(_text_lines(v, f"{prefix}{k}."))
        elif isinstance(v, list) and v and isinstance(v[0], list):
            lines.append(f"{prefix}{k}:")
            lines.extend("  " + " ".join(f"{x: .6g}" for x in row) for row in v)
        else:
            lines.append(f"{prefix}{k}: {v}")
    return lines


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(report)
    if fmt == "text":
        return "\n".join(_text_lines(_clean(report))) + "\n"
    raise DomainError(f"format {fmt!r} is not available for this command")


# --------------------------------------------------------------------------
# commands


def _solution_report(g: WeightedGraph, tol: float, max_iter: int, rank_tol: float) -> dict:
    C = cost_matrix(g)
    sol = solve(C, tol=tol, max_iter=max_iter)
    chk = check_optimality(C, sol.X, sol.S, max(tol, math.sqrt(tol)))
    return {
        "command": "solve",
        "graph": g.to_json_obj(),
        "tol": tol,
        "solution": sol.to_json_obj(),
        "rank": rank_report(sol, rank_tol).to_json_obj(),
        "optimality": {
            "ok": chk.ok,
            "diag_residual": chk.diag_residual,
            "min_eig_X": chk.min_eig_X,
            "dual_residual": chk.dual_residual,
            "min_eig_S": chk.min_eig_S,
            "complementarity": chk.complementarity,
        },
    }


def cmd_solve(args) -> str:
    g = _graph_from(args)
    return _render(_solution_report(g, args.tol, args.max_iter, args.rank_tol), args.format)


def cmd_analyze_cycle(args) -> str:
    if args.weights is None:
        if args.graph_file is None:
            raise DomainError("analyze-cycle needs --weights or --graph-file")
        g = read_graph(args.graph_file)
        weights = []
        for i in range(g.n):
            w = g.weight(i, (i + 1) % g.n)
            if w is None or g.m != g.n:
                raise DomainError("graph file is not a cycle with edges (i, i+1 mod n)")
            weights.append(w)
    else:
        weights = args.weights
    res = cycle_rank1_analysis(weights)
    report = {"command": "analyze-cycle", "weights": list(weights), **res.to_json_obj()}
    return _render(report, args.format)


def cmd_analyze_diamond(args) -> str:
    g = _graph_from(args, default="diamond")
    res = diamond_analysis(g, check_precondition=not args.skip_precondition)
    report = {"command": "analyze-diamond", "graph": g.to_json_obj(), **res.to_json_obj()}
    return _render(report, args.format)


def cmd_compose_vertex_sum(args) -> str:
    g1 = _graph_from(args, "1", default="k3")
    g2 = _graph_from(args, "2", default="k3")
    v1 = g1.n - 1 if args.vertex1 is None else args.vertex1
    v2 = 0 if args.vertex2 is None else args.vertex2
    glued = vertex_sum(CliqueSumSpec(g1, g2, (v1,), (v2,)))
    g = glued.graph
    # solve the two parts in the canonical labelling of the sum
    p1 = g.induced(sorted(glued.relabel1))
    p2 = g.induced(sorted(glued.relabel2))
    s1 = solve(cost_matrix(p1), tol=args.solver_tol)
    s2 = solve(cost_matrix(p2), tol=args.solver_tol)
    if not (s1.converged and s2.converged):
        raise DomainError("component SDP did not converge")
    comp = compose_vertex_sum(s1.X, s1.S, s2.X, s2.S, tol=args.tol)
    C = cost_matrix(g)
    chk = check_optimality(C, comp.X_composed, comp.S_composed, args.tol)
    report = {
        "command": "compose-vertex-sum",
        "graph": g.to_json_obj(),
        "relabel1": list(glued.relabel1),
        "relabel2": list(glued.relabel2),
        **comp.to_json_obj(),
        "rank_X_composed": numerical_rank(comp.X_composed, args.tol),
        "min_rank_achievable": vertex_sum_min_rank_exists(s1.X, s2.X, args.tol),
        "optimality_ok": chk.ok,
        "objective": float(np.sum(C * comp.X_composed)),
    }
    return _render(report, args.format)


CSV_COLUMNS = ("graph", "mode", "rank", "count", "fraction", "excluded", "seed", "tol")


def cmd_sample(args) -> str:
    graphs = list(TABLE_GRAPHS) if args.graph == "all" else [args.graph]
    modes = list(WeightMode) if args.mode == "both" else [WeightMode(args.mode)]
    rows = []
    for name in graphs:
        named_graph(name)
        for mode in modes:
            cfg = SampleConfig(name, args.samples, mode, args.seed, args.rank_tol, args.solver_tol)
            records = run_samples(cfg, args.threads)
            dist = distribution_from_records(records, args.rank_tol)
            rows.append((cfg, dist, records))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for cfg, dist, _ in rows:
            top = max([3, *dist.counts])
            for r in range(1, top + 1):
                w.writerow((cfg.graph_name, cfg.weight_mode.value, r, dist.counts.get(r, 0),
                            repr(dist.fraction(r)), dist.excluded, cfg.seed, repr(cfg.rank_tol)))
        return buf.getvalue()
    results = []
    for cfg, dist, records in rows:
        entry = {
            "config": cfg.to_json_obj(),
            "counts": {str(r): c for r, c in dist.counts.items()},
            "fractions": {str(r): f for r, f in dist.fractions.items()},
            "excluded": dist.excluded,
            "counted": dist.counted,
            "strictly_complementary": dist.strictly_complementary,
            "optimality_failures": dist.optimality_failures,
            "sensitivity": {
                repr(t): {str(r): f for r, f in distribution_from_records(records, t).fractions.items()}
                for t in SWEEP_TOLS
            },
        }
        key = (cfg.graph_name, cfg.weight_mode)
        if key in REFERENCE_TABLE:
            ref = []
            for r, p in enumerate(REFERENCE_TABLE[key], start=1):
                lo, hi = binomial_interval(p, REFERENCE_SAMPLES)
                f = dist.fraction(r)
                ref.append({"rank": r, "reference": p, "low": lo, "high": hi, "observed": f,
                            "within": lo - 1e-12 <= f <= hi + 1e-12})
            entry["reference_table"] = ref
        results.append(entry)
    report = {"command": "sample", "results": results}
    if args.format == "text":
        lines = []
        for e in results:
            c = e["config"]
            fr = " ".join(f"r{r}={f:.3f}" for r, f in e["fractions"].items())
            lines.append(f"{c['graph']:<10}{c['mode']:<10}{fr}  excluded={e['excluded']}")
        return "\n".join(lines) + "\n"
    return _dump_json(report)


def cmd_probe_conjecture(args) -> str:
    g1 = _graph_from(args, "1", default="k3")
    g2 = _graph_from(args, "2", default="k3")
    map1 = args.map1 if args.map1 is not None else (g1.n - 2, g1.n - 1)
    map2 = args.map2 if args.map2 is not None else (0, 1)
    spec = CliqueSumSpec(g1, g2, map1, map2)
    probe = probe_edge_sum_conjecture(spec, args.samples, args.seed, args.mode, args.tol)
    report = {
        "command": "probe-conjecture",
        "config": {"samples": args.samples, "seed": args.seed, "mode": args.mode,
                   "tol": args.tol, "map1": list(map1), "map2": list(map2)},
        **probe.to_json_obj(),
    }
    return _render(report, args.format)


def cmd_round(args) -> str:
    g = _graph_from(args)
    C = cost_matrix(g)
    sol = solve(C, tol=args.tol)
    if not sol.converged:
        raise DomainError(f"SDP solve ended with status {sol.status.value}")
    cut = gw_round(g, sol, trials=args.trials, seed=args.seed, tol=args.tol)
    report = {"command": "round", "graph": g.to_json_obj(), "trials": args.trials,
              **cut.to_json_obj(), "sdp_value": sdp_value(g, sol)}
    if g.n <= MAX_BRUTE_FORCE_N and g.n <= 20:
        report["brute_force_value"] = brute_force_maxcut(g).value
    return _render(report, args.format)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxcut-sdp", description="Max-cut SDP solver and rank-structure tools."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND})")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def common(p, formats=("json", "text")):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--output", "-o", metavar="PATH", help="write the report here instead of stdout")

    p = sub.add_parser("solve", help="solve the max-cut SDP of a graph")
    _add_graph_args(p)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=_positive_int, default=DEFAULT_MAX_ITER)
    p.add_argument("--rank-tol", type=_positive_float, default=DEFAULT_RANK_TOL)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze-cycle", help="rank-1 test and optimal cut of a weighted cycle")
    p.add_argument("--weights", type=_float_list, metavar="W0,W1,...",
                   help="weight of edge (i, i+1 mod n), i = 0..n-1")
    p.add_argument("--graph-file", metavar="PATH", help="cycle graph JSON file")
    common(p)
    p.set_defaults(func=cmd_analyze_cycle)

    p = sub.add_parser("analyze-diamond", help="classify a positive-weight diamond")
    _add_graph_args(p, default="diamond")
    p.add_argument("--skip-precondition", action="store_true",
                   help="classify even if the triangles are not rank 1 and agreeing")
    common(p)
    p.set_defaults(func=cmd_analyze_diamond)

    p = sub.add_parser("compose-vertex-sum", help="glue optimal solutions of two graphs at a vertex")
    _add_graph_args(p, "1", default="k3")
    _add_graph_args(p, "2", default="k3")
    p.add_argument("--vertex1", type=int, help="glued vertex of the first graph (default: last)")
    p.add_argument("--vertex2", type=int, help="glued vertex of the second graph (default: 0)")
    p.add_argument("--tol", type=_positive_float, default=1e-6, help="optimality and rank tolerance")
    p.add_argument("--solver-tol", type=_positive_float, default=1e-10)
    common(p)
    p.set_defaults(func=cmd_compose_vertex_sum)

    p = sub.add_parser("sample", help="rank distribution over random weights")
    p.add_argument("--graph", required=True, metavar="NAME",
                   help=f"named graph, or 'all' for {' '.join(TABLE_GRAPHS)}")
    p.add_argument("--mode", choices=("arbitrary", "positive", "both"), default="arbitrary")
    p.add_argument("--samples", type=_positive_int, default=REFERENCE_SAMPLES)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--rank-tol", type=_positive_float, default=DEFAULT_RANK_TOL)
    p.add_argument("--solver-tol", type=_positive_float, default=EXPERIMENT_SOLVER_TOL)
    p.add_argument("--threads", type=_positive_int, default=1)
    common(p, ("csv", "json", "text"))
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("probe-conjecture", help="test the edge-sum dual conjecture on random weights")
    _add_graph_args(p, "1", default="k3")
    _add_graph_args(p, "2", default="k3")
    p.add_argument("--map1", type=_int_list, metavar="U,V", help="shared edge in the first graph")
    p.add_argument("--map2", type=_int_list, metavar="U,V", help="shared edge in the second graph")
    p.add_argument("--samples", type=_positive_int, default=REFERENCE_SAMPLES)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--mode", choices=("arbitrary", "positive"), default="arbitrary")
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_probe_conjecture)

    p = sub.add_parser("round", help="hyperplane rounding of the SDP solution")
    _add_graph_args(p)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    common(p)
    p.set_defaults(func=cmd_round)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except (DomainError, GraphError, ValueError, np.linalg.LinAlgError, RuntimeError, OSError) as exc:
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"maxcut-sdp {args.command}: error: {msg}", file=sys.stderr)
        return 1
    if args.output:
        try:
            Path(args.output).write_text(out, encoding="utf-8")
        except OSError as exc:
            print(f"maxcut-sdp {args.command}: error: {args.output}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
