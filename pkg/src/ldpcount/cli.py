"""Command-line interface.

Exit codes: 0 success, 1 validation/parse failure, 2 resource limit.
All randomized subcommands are deterministic given --seed; two identical
invocations produce byte-identical output regardless of --threads.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cycles import estimate_odd_cycles
from .errors import ParseError, ResourceLimitError, ValidationError
from .experiments import (
    ExperimentConfig,
    error_scaling,
    make_graph,
    run_trials,
    verify_bounds,
)
from .graphs import dump_edge_list, graph_stats, load_edge_list
from .mechanisms import PrivacyBudget, check_budget, derive_seed
from .oracles import exact_counts
from .triangles import estimate_triangles


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the toolkit reserves 2 for resource
    # limits, so usage errors are validation failures instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _add_source(p: _Parser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph", help="edge-list file path")
    group.add_argument("--gen", help="generator spec er:<n>:<p> | ba:<n>:<m0> | ktree:<n>:<k>")


def _add_budget(p: _Parser) -> None:
    p.add_argument("--eps0", type=float, help="degree-publication budget")
    p.add_argument("--eps1", type=float, help="randomized-response budget")
    p.add_argument("--eps2", type=float, help="counting-query budget")
    p.add_argument("--zeta", type=float, default=0.1, help="clipping failure probability")
    p.add_argument("--eps-total", type=float, default=None,
                   help="declared total budget; the run is rejected if eps0+eps1+eps2 exceeds it")


def _add_run(p: _Parser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("noisy", "no-noise"), default="noisy")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> _Parser:
    parser = _Parser(prog="ldpcount", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="write a generated graph as an edge list")
    p.add_argument("--gen", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("stats", help="size, degree and degeneracy statistics")
    _add_source(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("count-exact", help="exact subgraph counts")
    _add_source(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cycles", default="", help="comma-separated cycle lengths")
    p.add_argument("--paths", default="", help="comma-separated path edge counts")
    p.add_argument("--monotone", default="", help="comma-separated even cycle lengths")
    p.add_argument("--out", default=None)

    p = sub.add_parser("estimate-triangles", help="one private triangle estimate")
    _add_source(p)
    _add_budget(p)
    _add_run(p)

    p = sub.add_parser("estimate-cycles", help="one private odd-cycle estimate")
    _add_source(p)
    _add_budget(p)
    _add_run(p)
    p.add_argument("--k", type=int, required=True, help="odd cycle length >= 5")

    p = sub.add_parser("experiment", help="Monte-Carlo trials with summary stats")
    _add_source(p)
    _add_budget(p)
    _add_run(p)
    p.add_argument("--task", choices=("triangles", "cycles"), required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--keep-estimates", action="store_true")

    p = sub.add_parser("verify-bounds", help="ordered-structure bound measurements")
    _add_source(p)
    p.add_argument("--orderings", type=int, required=True)
    p.add_argument("--eps0", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("error-scaling", help="RMSE vs n and its log-log slope")
    _add_budget(p)
    _add_run(p)
    p.add_argument("--task", choices=("triangles", "cycles"), required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--gen", required=True, help="template with {n}, e.g. ba:{n}:3")
    p.add_argument("--sizes", required=True, help="comma-separated node counts")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--threads", type=int, default=1)

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(doc: dict, out: str | None) -> None:
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)


def _load_source(args):
    if args.graph is not None:
        with open(args.graph, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)
    return make_graph(args.gen, derive_seed(args.seed, "graph"))


def _budget_from(args) -> PrivacyBudget | None:
    if args.mode == "no-noise":
        sys.stderr.write(
            "WARNING: no-noise mode publishes exact values; "
            "it is a test harness, NOT a privacy mechanism.\n"
        )
        return None
    missing = [f for f in ("eps0", "eps1", "eps2") if getattr(args, f) is None]
    if missing:
        raise ValidationError(f"noisy mode requires {', '.join('--' + m for m in missing)}")
    budget = PrivacyBudget(eps0=args.eps0, eps1=args.eps1, eps2=args.eps2, zeta=args.zeta)
    if args.eps_total is not None and not check_budget(budget, args.eps_total):
        raise ValidationError(
            f"budget spends {budget.total}, more than the declared total {args.eps_total}"
        )
    return budget


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _run(args) -> None:
    if args.command == "gen-graph":
        graph = make_graph(args.gen, derive_seed(args.seed, "graph"))
        _emit(dump_edge_list(graph), args.out)
    elif args.command == "stats":
        _emit_json(graph_stats(_load_source(args)).to_json_dict(), args.out)
    elif args.command == "count-exact":
        counts = exact_counts(
            _load_source(args),
            cycle_lengths=_int_list(args.cycles),
            path_lengths=_int_list(args.paths),
            monotone_lengths=_int_list(args.monotone),
        )
        _emit_json(counts.to_json_dict(), args.out)
    elif args.command == "estimate-triangles":
        report = estimate_triangles(
            _load_source(args), _budget_from(args), args.seed, args.mode
        )
        _emit_json(report.to_json_dict(), args.out)
    elif args.command == "estimate-cycles":
        report = estimate_odd_cycles(
            _load_source(args), args.k, _budget_from(args), args.seed, args.mode
        )
        _emit_json(report.to_json_dict(), args.out)
    elif args.command == "experiment":
        config = ExperimentConfig(
            task=args.task,
            trials=args.trials,
            seed=args.seed,
            mode=args.mode,
            graph_path=args.graph,
            gen=args.gen,
            k=args.k,
            budget=_budget_from(args),
            eps_total=args.eps_total,
            threads=args.threads,
            keep_estimates=args.keep_estimates,
        )
        summary = run_trials(config)
        if args.format == "csv":
            _emit(summary.to_csv(), args.out)
        else:
            _emit_json(summary.to_json_dict(), args.out)
    elif args.command == "verify-bounds":
        report = verify_bounds(
            _load_source(args), args.orderings, args.eps0, args.seed
        )
        _emit_json(report.to_json_dict(), args.out)
    elif args.command == "error-scaling":
        report = error_scaling(
            args.task,
            args.gen,
            _int_list(args.sizes),
            _budget_from(args),
            args.trials,
            args.seed,
            k=args.k,
            mode=args.mode,
            threads=args.threads,
        )
        if args.format == "csv":
            _emit(report.to_csv(), args.out)
        else:
            _emit_json(report.to_json_dict(), args.out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _run(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ResourceLimitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ParseError, ValidationError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
