"""Command-line interface.

Subcommands map onto the library: interpretation (with the counter-model
variants), matrix equality, site-addressed rewriting, axiom verification,
graph-state operations, normal forms, the equality decision procedure,
random state generation, and trace replay.  Everything speaks JSON on disk;
``--json`` switches stdout to JSON as well.

Exit codes: 0 success, 1 malformed input, 2 precondition or theory
violation, 3 failed internal semantic check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .diagram import Diagram
from .errors import (
    ArityMismatchError,
    CheckFailedError,
    MalformedDiagramError,
    PatternError,
    RuleNotInTheoryError,
    ZeroStateError,
    ZXError,
)
from .gen import random_real_stabilizer_state
from .graphstate import (
    SimpleGraph,
    graph_state_diagram,
    local_complement,
    pivot,
)
from .normalform import decide_equal, is_real, reduce, to_gs_rlc
from .rewrite import (
    Direction,
    MatchSite,
    RuleId,
    TheoryLevel,
    apply_rule,
    find_matches,
    replay_trace,
    verify_axioms,
)
from .rewrite.trace import RewriteTrace
from .semantics import (
    DEFAULT_TOL,
    EqMode,
    eq_up_to,
    flatten,
    interpret,
    interpret_zero,
    matrix_to_lists,
)

_THEORIES = {
    "plain": TheoryLevel.PLAIN_ZX,
    "hl": TheoryLevel.ZX_PLUS_HL,
    "eu": TheoryLevel.ZX_PLUS_EU,
    "angle-free": TheoryLevel.ANGLE_FREE,
}

_MODES = {
    "exact": EqMode.EXACT,
    "phase": EqMode.UP_TO_PHASE,
    "scalar": EqMode.UP_TO_SCALAR,
}


def _load_diagram(path: str) -> Diagram:
    d = Diagram.from_json(Path(path).read_text())
    problems = d.validate()
    if problems:
        raise MalformedDiagramError("; ".join(problems))
    return d


def _load_graph(path: str) -> SimpleGraph:
    return SimpleGraph.from_json(Path(path).read_text())


def _emit(payload: dict, as_json: bool, human: str) -> None:
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        print(human)


def _matrix_str(m: np.ndarray) -> str:
    return "\n".join(
        "  ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row) for row in m
    )


def cmd_interpret(args) -> int:
    d = _load_diagram(args.diagram)
    if args.flat:
        d = flatten(d)
    m = interpret_zero(d) if args.zero else interpret(d)
    _emit({"matrix": matrix_to_lists(m)}, args.json, _matrix_str(m))
    return 0


def cmd_eq(args) -> int:
    m1 = interpret(_load_diagram(args.first))
    m2 = interpret(_load_diagram(args.second))
    res = eq_up_to(m1, m2, _MODES[args.mode], args.tol)
    payload = {"equal": res.equal}
    if res.scalar is not None:
        payload["scalar"] = [res.scalar.real, res.scalar.imag]
    _emit(payload, args.json, "equal" if res.equal else "unequal")
    return 0


def cmd_rewrite(args) -> int:
    d = _load_diagram(args.diagram)
    rule = RuleId(args.rule)
    direction = Direction(args.direction)
    theory = _THEORIES[args.theory]
    if args.list:
        sites = find_matches(d, rule, direction, theory)
        payload = {
            "sites": [
                {"binding": s.binding, "color_swapped": s.color_swapped}
                for s in sites
            ]
        }
        human = "\n".join(
            f"{i}: {s.binding}{' (swapped)' if s.color_swapped else ''}"
            for i, s in enumerate(sites)
        )
        _emit(payload, args.json, human or "no sites")
        return 0
    if args.binding is None:
        raise PatternError("provide --binding or use --list")
    binding = {
        k: tuple(v) if isinstance(v, list) else v
        for k, v in json.loads(args.binding).items()
    }
    site = MatchSite(rule, direction, binding, hash(d), args.swapped)
    from .rewrite.rules import require_rule

    require_rule(rule, theory)
    result = apply_rule(d, site)
    scalar = None
    if args.checked:
        res = eq_up_to(interpret(d), interpret(result), EqMode.UP_TO_SCALAR, args.tol)
        if not res.equal:
            raise CheckFailedError(
                f"rule {rule.value} at {binding} changed the semantics"
            )
        scalar = res.scalar
    payload = {"diagram": result.to_dict()}
    if scalar is not None:
        payload["scalar"] = [scalar.real, scalar.imag]
    _emit(payload, args.json, result.to_json(indent=2))
    return 0


def cmd_verify_axioms(args) -> int:
    rules = [RuleId(r) for r in args.rules] if args.rules else None
    reports = verify_axioms(rules, tol=args.tol, workers=args.workers)
    rows = [r.row() for r in reports.values()]
    if args.json:
        print(json.dumps({"rules": rows}, indent=2))
    else:
        print(f"{'rule':6} {'standard':>9} {'zero':>6} {'flat':>6}")
        for row in rows:
            marks = ["pass" if row[k] else "FAIL" for k in ("standard", "zero", "flat")]
            print(f"{row['rule']:6} {marks[0]:>9} {marks[1]:>6} {marks[2]:>6}")
    bad = [r for r in rows if not r["standard"]]
    if bad:
        raise CheckFailedError(f"unsound rules: {[r['rule'] for r in bad]}")
    return 0


def cmd_countermodel(args) -> int:
    from .rewrite import h_loop_diagram, pi_rotation_diagram

    h = Diagram.h_box()
    chain = apply_rule(
        h, MatchSite(RuleId.EU, Direction.FORWARD, {"h": 0}, hash(h))
    )
    loop = h_loop_diagram()
    pi = pi_rotation_diagram()
    rows = {
        "euler": {
            "zero": {
                "lhs": matrix_to_lists(interpret_zero(h)),
                "rhs": matrix_to_lists(interpret_zero(chain)),
                "equal": eq_up_to(
                    interpret_zero(h), interpret_zero(chain), EqMode.UP_TO_SCALAR
                ).equal,
            },
            "flat": {
                "equal": eq_up_to(
                    interpret(flatten(h)), interpret(flatten(chain)), EqMode.UP_TO_SCALAR
                ).equal,
            },
        },
        "h-loop": {
            "zero": {
                "lhs": matrix_to_lists(interpret_zero(pi)),
                "rhs": matrix_to_lists(interpret_zero(loop)),
                "equal": eq_up_to(
                    interpret_zero(pi), interpret_zero(loop), EqMode.UP_TO_SCALAR
                ).equal,
            },
            "flat": {
                "equal": eq_up_to(
                    interpret(flatten(pi)), interpret(flatten(loop)), EqMode.UP_TO_SCALAR
                ).equal,
            },
        },
    }
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print("phase-erasing interpretation:")
        print("  euler:   lhs (H) vs rhs (three quarter turns):",
              "equal" if rows["euler"]["zero"]["equal"] else "UNEQUAL")
        print("  h-loop:  lhs (pi rotation) vs rhs (H self-loop):",
              "equal" if rows["h-loop"]["zero"]["equal"] else "UNEQUAL")
        print("    pi-rotation maps to:")
        print(_matrix_str(interpret_zero(pi)))
        print("    H self-loop maps to:")
        print(_matrix_str(interpret_zero(loop)))
        print("doubling interpretation:")
        print("  euler:  ", "equal" if rows["euler"]["flat"]["equal"] else "UNEQUAL")
        print("  h-loop: ", "equal" if rows["h-loop"]["flat"]["equal"] else "UNEQUAL")
    return 0


def cmd_graphstate(args) -> int:
    g = _load_graph(args.graph)
    d = graph_state_diagram(g)
    _emit({"diagram": d.to_dict()}, args.json, d.to_json(indent=2))
    return 0


def cmd_lc(args) -> int:
    g = local_complement(_load_graph(args.graph), args.vertex)
    _emit({"graph": g.to_dict()}, args.json, g.to_json(indent=2))
    return 0


def cmd_pivot(args) -> int:
    g = pivot(_load_graph(args.graph), args.u, args.v)
    _emit({"graph": g.to_dict()}, args.json, g.to_json(indent=2))
    return 0


def cmd_normalize(args) -> int:
    d = _load_diagram(args.diagram).bend_inputs()
    if not is_real(d):
        raise ZXError("normalization requires phases in {0, pi}")
    n = reduce(to_gs_rlc(d, checked=args.checked), checked=args.checked)
    _emit({"gs_rlc": n.to_dict()}, args.json, n.to_json(indent=2))
    return 0


def cmd_decide(args) -> int:
    d1 = _load_diagram(args.first)
    d2 = _load_diagram(args.second)
    dec = decide_equal(d1, d2, checked=args.checked)
    human = ("equal" if dec.equal else "unequal") + f" ({dec.reason})"
    _emit(dec.to_dict(), args.json, human)
    return 0


def cmd_gen(args) -> int:
    d = random_real_stabilizer_state(
        args.qubits, args.depth, seed=args.seed, projections=args.projections
    )
    _emit({"diagram": d.to_dict()}, args.json, d.to_json(indent=2))
    return 0


def cmd_replay_trace(args) -> int:
    initial, steps = RewriteTrace.from_json(Path(args.trace).read_text())
    trace = replay_trace(
        initial,
        steps,
        checked=not args.unchecked,
        theory=_THEORIES[args.theory],
    )
    scalars = [
        [s.scalar.real, s.scalar.imag]
        for s in trace.atomic_steps()
        if s.scalar is not None
    ]
    payload = {
        "steps": len(trace.atomic_steps()),
        "final": trace.final.to_dict(),
        "scalars": scalars,
    }
    _emit(
        payload,
        args.json,
        f"replayed {len(trace.atomic_steps())} steps; all checks passed"
        if not args.unchecked
        else f"replayed {len(trace.atomic_steps())} steps (unchecked)",
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zxpivot", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", help="JSON output")
        return sp

    sp = add("interpret", cmd_interpret, help="interpret a diagram as a matrix")
    sp.add_argument("diagram")
    sp.add_argument("--zero", action="store_true", help="erase phases first")
    sp.add_argument("--flat", action="store_true", help="double the diagram first")

    sp = add("eq", cmd_eq, help="compare two diagrams' matrices")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--mode", choices=sorted(_MODES), default="scalar")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = add("rewrite", cmd_rewrite, help="apply a rule at a site")
    sp.add_argument("diagram")
    sp.add_argument("--rule", required=True, choices=[r.value for r in RuleId])
    sp.add_argument("--direction", choices=[d.value for d in Direction], default="forward")
    sp.add_argument("--theory", choices=sorted(_THEORIES), default="eu")
    sp.add_argument("--binding", help="JSON object naming the site")
    sp.add_argument("--swapped", action="store_true", help="colour-swapped variant")
    sp.add_argument("--list", action="store_true", help="list matching sites")
    sp.add_argument("--checked", action="store_true", help="verify semantics")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = add("verify-axioms", cmd_verify_axioms, help="soundness/separation table")
    sp.add_argument("--rules", nargs="*", help="subset of rules")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--workers", type=int, default=0)

    add("countermodel", cmd_countermodel, help="explicit counter-model values")

    sp = add("graphstate", cmd_graphstate, help="graph-state diagram of a graph")
    sp.add_argument("graph")

    sp = add("lc", cmd_lc, help="local complementation of a graph")
    sp.add_argument("graph")
    sp.add_argument("vertex")

    sp = add("pivot", cmd_pivot, help="pivot a graph along an edge")
    sp.add_argument("graph")
    sp.add_argument("u")
    sp.add_argument("v")

    sp = add("normalize", cmd_normalize, help="reduced GS-RLC normal form")
    sp.add_argument("diagram")
    sp.add_argument("--checked", action="store_true")

    sp = add("decide", cmd_decide, help="decide equality of two real states")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--checked", action="store_true")

    sp = add("gen", cmd_gen, help="random real stabilizer diagram state")
    sp.add_argument("--qubits", type=int, required=True)
    sp.add_argument("--depth", type=int, default=10)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--projections", type=int, default=0)

    sp = add("replay-trace", cmd_replay_trace, help="re-run a stored trace")
    sp.add_argument("trace")
    sp.add_argument("--theory", choices=sorted(_THEORIES), default="eu")
    sp.add_argument("--unchecked", action="store_true")

    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CheckFailedError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 3
    except (MalformedDiagramError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        ArityMismatchError,
        PatternError,
        RuleNotInTheoryError,
        ZeroStateError,
        ZXError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
