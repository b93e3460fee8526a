"""Command-line workbench: build complexes, measure them, certify constants."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import calculus as calc
from .builders import as_ordered_complex, cone, horn, join, ord_construction, order_complex, sd
from .core import BudgetExceeded, Chain, ComplexError, SemiSimplicialSet, format_rational
from .families import (
    DEFAULT_MAX_SIMPLICES,
    FiniteRing,
    FormParameter,
    UnimodularPosetSpec,
    hyperbolic_module,
    hyperbolic_split_injection_complex,
    parse_vector,
    split_injection_complex,
    tits_building_A,
    tits_building_C,
    unimodular_poset,
)
from .homology import reduced_betti
from .report import Budget, run_suite
from .ubc import NotABoundary, min_fill, ubc_exact, ubc_sampled

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_IO = 4
EXIT_INVALID = 5

BUILD_FAMILIES = ("tits-a", "tits-c", "unimodular", "split-inj", "hyperbolic", "cone", "join", "sd", "ord", "horn")


def _ring(m: int) -> FiniteRing:
    return FiniteRing.zmod(m)


def _load_complex(path: str) -> SemiSimplicialSet:
    return SemiSimplicialSet.from_json(json.loads(Path(path).read_text()))


def _emit(data, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise ComplexError(f"{args.family} needs {', '.join(missing)}")


def cmd_build(args) -> int:
    fam = args.family
    budget = args.max_vertices
    if fam == "tits-a":
        _need(args, "p", "n")
        X = order_complex(tits_building_A(args.p, args.n)).sset
    elif fam == "tits-c":
        _need(args, "p", "n")
        X = order_complex(tits_building_C(args.p, args.n)).sset
    elif fam == "unimodular":
        _need(args, "m", "n")
        suffix = tuple(parse_vector(v) for v in args.suffix)
        spec = UnimodularPosetSpec(_ring(args.m), args.n, args.shape, args.delta, suffix)
        X = order_complex(unimodular_poset(spec, budget)).sset
    elif fam == "split-inj":
        _need(args, "m", "n")
        X = split_injection_complex(_ring(args.m), args.n, max(budget, DEFAULT_MAX_SIMPLICES))
    elif fam == "hyperbolic":
        _need(args, "p", "g")
        R = FiniteRing.zmod(args.p)
        fp = FormParameter(args.epsilon, frozenset(args.Lambda)) if args.Lambda is not None else (
            FormParameter.symplectic(R) if args.epsilon == -1 else FormParameter.quadratic(R)
        )
        cx = hyperbolic_split_injection_complex(hyperbolic_module(fp, R, args.g), budget)
        X = cx.unordered.sset if args.unordered else cx.ordered
    elif fam == "horn":
        _need(args, "n", "k")
        X = horn(args.n, args.k).sset
    else:
        _need(args, "input")
        source = _load_complex(args.input)
        if fam == "sd":
            X = sd(source)
        elif fam == "cone":
            X = cone(as_ordered_complex(source)).sset
        elif fam == "ord":
            X = ord_construction(as_ordered_complex(source))
        else:  # join
            _need(args, "input2")
            other = as_ordered_complex(_load_complex(args.input2))
            X = join(as_ordered_complex(source), other).sset
    if X.count(0) > budget:
        raise BudgetExceeded(f"{X.count(0)} vertices exceed --max-vertices {budget}")
    _emit(X.to_json(), args.out)
    return EXIT_OK


def cmd_homology(args) -> int:
    X = _load_complex(args.complex)
    max_q = args.max_degree if args.max_degree is not None else X.dim
    _emit(reduced_betti(X, max_q).to_json(), args.out)
    return EXIT_OK


def cmd_ubc(args) -> int:
    X = _load_complex(args.complex)
    sub = _load_complex(args.sub) if args.sub else None
    if args.mode == "exact":
        m = ubc_exact(
            X,
            args.degree,
            sub=sub,
            max_circuits=args.max_circuits,
            time_budget_sec=args.time_budget_sec,
            fallback_samples=args.samples,
            seed=args.seed,
        )
    else:
        m = ubc_sampled(X, args.degree, args.samples, args.seed, sub=sub)
    _emit(m.to_json(), args.out)
    return EXIT_OK


def cmd_minfill(args) -> int:
    X = _load_complex(args.complex)
    sigma = Chain.from_json(json.loads(Path(args.chain).read_text()))
    res = min_fill(X, args.degree, sigma)
    _emit(
        {
            "degree": args.degree,
            "fill_norm": format_rational(res.fill_norm),
            "target_norm": format_rational(sigma.norm()),
            "witness": res.witness.to_json(),
            "method": res.method,
        },
        args.out,
    )
    return EXIT_OK


def _rule_arg(text: str):
    if text in ("inf", "∞"):
        return calc.INF
    return Fraction(text)


def cmd_certify(args) -> int:
    if args.rule not in calc.RULES:
        raise ComplexError(f"unknown rule {args.rule!r}; choose from {', '.join(sorted(calc.PUBLIC_RULES))}")
    fn = calc.RULES[args.rule]
    if len(args.args) != len(fn.params):
        raise ComplexError(f"{args.rule} takes {len(fn.params)} arguments: {', '.join(fn.params)}")
    values = []
    for name, text in zip(fn.params, args.args):
        v = _rule_arg(text)
        if name not in calc.CONSTANT_ARGS[args.rule] and not name.startswith("K"):
            if v != int(v):
                raise ComplexError(f"{name} must be an integer")
            v = int(v)
        values.append(v)
    node = fn(*values)
    out = {"rule": args.rule, "args": dict(zip(fn.params, args.args)), "value": calc._fmt(node.value)}
    if not args.value_only:
        out["derivation"] = node.to_json()
    _emit(out, args.out)
    return EXIT_OK


def cmd_stable_range(args) -> int:
    if args.kind == "gl":
        if args.sr is None:
            raise ComplexError("stable-range gl needs --sr")
        res = calc.stable_range_gl(args.n, args.sr, args.q)
    else:
        res = calc.stable_range_aut(args.n, args.q)
    _emit({"kind": args.kind, "n": args.n, "sr": args.sr, "q": args.q, **res.to_json()}, args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    budget = Budget(args.max_vertices, args.max_circuits, args.time_budget_sec, args.samples)
    rep = run_suite(args.suite, args.seed, budget, jobs=args.jobs, only=args.family)
    if args.out:
        Path(args.out).write_text(rep.dumps())
    else:
        sys.stdout.write(rep.dumps())
    if args.csv:
        Path(args.csv).write_text(rep.csv())
    failed = [r for r in rep.rows if not r.verdict]
    for r in failed:
        print(f"FAIL {r.family} {r.params} q={r.degree} {r.check}: {r.observed} {r.relation} {r.expected}", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--max-vertices", type=int, default=100_000)
    budget.add_argument("--max-circuits", type=int, default=100_000)
    budget.add_argument("--time-budget-sec", type=float, default=None,
                        help="wall-clock cap per exact measurement (makes results timing-dependent)")
    budget.add_argument("--out", help="output path (stdout if omitted)")

    p = argparse.ArgumentParser(prog="ubckit", description="Uniform boundary condition workbench")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[budget], help="construct a complex and write core JSON")
    b.add_argument("family", choices=BUILD_FAMILIES)
    for flag in ("--p", "--m", "--n", "--k", "--g"):
        b.add_argument(flag, type=int)
    b.add_argument("--shape", default="all", choices=("all", "affine", "union"))
    b.add_argument("--delta", type=int, default=0)
    b.add_argument("--suffix", nargs="*", default=[], help="suffix vectors such as 1.0.0")
    b.add_argument("--epsilon", type=int, default=-1, choices=(-1, 1))
    b.add_argument("--lambda", dest="Lambda", type=int, nargs="*", help="elements of Λ")
    b.add_argument("--unordered", action="store_true", help="hyperbolic: emit S^M instead of X^M")
    b.add_argument("--input")
    b.add_argument("--input2")
    b.set_defaults(func=cmd_build)

    h = sub.add_parser("homology", parents=[budget], help="reduced Betti numbers")
    h.add_argument("complex")
    h.add_argument("--max-degree", type=int)
    h.set_defaults(func=cmd_homology)

    u = sub.add_parser("ubc", parents=[budget], help="measure the q-UBC constant")
    u.add_argument("complex")
    u.add_argument("--degree", type=int, required=True)
    u.add_argument("--mode", choices=("exact", "sample"), default="exact")
    u.add_argument("--samples", type=int, default=200)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--sub", help="subcomplex JSON for the relative constant")
    u.set_defaults(func=cmd_ubc)

    f = sub.add_parser("minfill", parents=[budget], help="minimal l1 filling of a boundary")
    f.add_argument("complex")
    f.add_argument("--degree", type=int, required=True)
    f.add_argument("--chain", required=True)
    f.set_defaults(func=cmd_minfill)

    c = sub.add_parser("certify", parents=[budget], help="evaluate a constant with its derivation")
    c.add_argument("--rule", required=True)
    c.add_argument("--args", nargs="*", default=[])
    c.add_argument("--value-only", action="store_true")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("stable-range", parents=[budget], help="stable-range verdict")
    s.add_argument("kind", choices=("gl", "aut"))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--sr", type=int)
    s.add_argument("--q", type=int, required=True)
    s.set_defaults(func=cmd_stable_range)

    r = sub.add_parser("report", parents=[budget], help="run a fixed suite and emit JSON and CSV")
    r.add_argument("--suite", default="desk", choices=("desk",))
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--csv")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--samples", type=int, default=24, help="fallback samples when a budget is hit")
    r.add_argument("--family", help="restrict to one family")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ComplexError, NotABoundary, ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
