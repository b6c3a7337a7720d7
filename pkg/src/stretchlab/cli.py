"""Command-line interface: ``stretchlab <command> ...``.

Exit codes: 0 success, 2 invalid input or config, 3 bound violation found
by ``experiment --compare``, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds as _bounds
from .constructs import resolve_c, three_phase_generate
from .errors import ConfigError, InvalidInputError, NoValidCError
from .harness import ExperimentSpec, compare_to_bounds, run_experiment, write_outputs
from .model import EmbeddedGraph, ModelParams, generate, save_graph
from .stretch import oracle_stretch, stretch_factor

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VIOLATION = 3
EXIT_IO = 4


def _print_json(obj, out=None):
    text = json.dumps(obj, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_generate(args):
    g = generate(ModelParams(args.n, args.p, args.seed))
    if args.out:
        save_graph(g, args.out)
    else:
        print(g.to_json())
    return EXIT_OK


def cmd_stretch(args):
    g = EmbeddedGraph.from_json(Path(args.inp).read_text())
    rep = oracle_stretch(g) if args.oracle else stretch_factor(g)
    _print_json(rep.to_dict())
    return EXIT_OK


def cmd_bounds(args):
    if (args.p is None) == (args.p_expr is None):
        raise InvalidInputError("give exactly one of --p and --p-expr")
    regime = None
    if args.p_expr is not None:
        pexpr = _bounds.PExpression.parse(args.p_expr)
        p = pexpr(args.n)
        regime = _bounds.regime_classify(pexpr).value
    else:
        p = args.p
    doc = _bounds.all_bounds(args.n, p, args.lam, args.w, args.c)
    if regime is not None:
        doc["p_expr"] = str(pexpr)
        doc["regime"] = regime
    _print_json(doc)
    return EXIT_OK


def cmd_experiment(args):
    spec = ExperimentSpec.load(args.config)
    if args.out:
        spec = ExperimentSpec.from_dict({**spec.to_dict(), "output_path": args.out})
    records, summary = run_experiment(spec, workers=args.workers)
    report = compare_to_bounds(summary, spec) if args.compare else None
    if spec.output_path:
        paths = write_outputs(spec, records, summary, Path(spec.output_path), report)
        print(json.dumps({k: str(v) for k, v in paths.items()}, indent=1))
    else:
        _print_json([s.to_dict() for s in summary])
    if report is not None and not report["ok"]:
        print(f"bound violations: {report['violations']}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_three_phase(args):
    c, in_window = resolve_c(args.n, args.c)
    g, trace = three_phase_generate(ModelParams(args.n, args.p, args.seed), c, args.lam)
    doc = trace.to_dict()
    rep = stretch_factor(g)
    doc["stretch"] = rep.to_dict()
    if not in_window:
        doc["note"] = "c outside (1/51, 1/(16 pi)): exploratory run"
    if args.graph_out:
        save_graph(g, args.graph_out)
    _print_json(doc, args.out)
    return EXIT_OK


def cmd_pick_c(args):
    _print_json({"n": args.n, "c": resolve_c(args.n, None)[0]})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stretchlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a randomly embedded G(n, p) as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stretch", help="exact stretch factor of a graph JSON file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--oracle", action="store_true", help="use the Floyd-Warshall reference")
    p.set_defaults(func=cmd_stretch)

    p = sub.add_parser("bounds", help="evaluate every bound for (n, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--p-expr")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--w", type=float, help="value of w(n); default log n")
    p.add_argument("--c", type=float)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="override output_path")
    p.add_argument("--compare", action="store_true", help="compare with the bounds; exit 3 on violation")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("constructs", help="lower-bound construction tools")
    csub = p.add_subparsers(dest="construct", required=True)
    t = csub.add_parser("three-phase", help="run the three-phase generator once and print its trace")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--p", type=float, required=True)
    t.add_argument("--lambda", dest="lam", type=float, required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--c", type=float, help="exploratory c in (0, 1/(16 pi)) instead of pick_c")
    t.add_argument("--out")
    t.add_argument("--graph-out")
    t.set_defaults(func=cmd_three_phase)
    t = csub.add_parser("pick-c", help="admissible c for n")
    t.add_argument("--n", type=int, required=True)
    t.set_defaults(func=cmd_pick_c)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidInputError, NoValidCError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
