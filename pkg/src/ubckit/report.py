"""The fixed desk-scale suite: every instance produces checkable rows."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

from . import calculus as calc
from .builders import (
    boundary_simplex,
    cone,
    horn,
    link,
    order_complex,
    ord_construction,
    path,
    sd,
    sd_certificate,
    simplex,
    barycentric_subdivision,
)
from .core import (
    BudgetExceeded,
    OrderedSimplicialComplex,
    SemiSimplicialSet,
    format_rational,
    same_order,
    validate,
)
from .families import (
    FiniteRing,
    FormParameter,
    UnimodularPosetSpec,
    hyperbolic_module,
    hyperbolic_split_injection_complex,
    link_matches_complement,
    ord_matches_ordered,
    solomon_tits_filtration,
    split_injection_betti,
    split_injection_complex,
    streamed_sd_check,
    tits_building_A,
    tits_building_C,
    unimodular_poset,
)
from .homology import euler_consistent, reduced_betti
from .ubc import DEFAULT_MAX_CIRCUITS, UbcMeasurement, ubc_exact, ubc_sampled

CSV_COLUMNS = (
    "family",
    "params",
    "degree",
    "check",
    "observed",
    "relation",
    "expected",
    "rule",
    "mode",
    "seed",
    "reduced_betti",
    "verdict",
)


@dataclass(frozen=True)
class Budget:
    max_vertices: int = 100_000
    max_circuits: int = DEFAULT_MAX_CIRCUITS
    time_budget_sec: float | None = None
    fallback_samples: int = 24


@dataclass(frozen=True)
class ReportRow:
    family: str
    params: str
    degree: int  # -1 for whole-instance checks
    check: str
    observed: str
    relation: str  # "<=", "==" or ">="
    expected: str
    rule: str = ""
    mode: str = ""
    seed: int | None = None
    reduced_betti: tuple[int, ...] = ()
    verdict: bool = field(default=False)

    def recomputed_verdict(self) -> bool:
        return compare(self.observed, self.relation, self.expected)

    def sort_key(self):
        return (self.family, self.params, self.degree, self.check)

    def to_json(self) -> dict:
        out = asdict(self)
        out["reduced_betti"] = list(self.reduced_betti)
        return out


def _value(text: str):
    if text == "inf":
        return math.inf
    if text in ("true", "false"):
        return text
    return Fraction(text)


def compare(observed: str, relation: str, expected: str) -> bool:
    a, b = _value(observed), _value(expected)
    if isinstance(a, str) or isinstance(b, str):
        return relation == "==" and a == b
    return {"<=": a <= b, "==": a == b, ">=": a >= b}[relation]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return format_rational(v)


def row(family, params, degree, check, observed, relation, expected, **extra) -> ReportRow:
    obs, exp = _fmt(observed), _fmt(expected)
    return ReportRow(family, params, degree, check, obs, relation, exp, verdict=compare(obs, relation, exp), **extra)


class Instance:
    """Accumulates rows for one desk instance."""

    def __init__(self, family: str, params: str, budget: Budget, seed: int):
        self.family, self.params, self.budget, self.seed = family, params, budget, seed
        self.rows: list[ReportRow] = []
        self.skipped: list[dict] = []
        self.betti: tuple[int, ...] = ()

    def add(self, degree, check, observed, relation, expected, **extra):
        extra.setdefault("reduced_betti", self.betti)
        self.rows.append(row(self.family, self.params, degree, check, observed, relation, expected, **extra))

    def skip(self, check: str, reason: str):
        self.skipped.append({"family": self.family, "params": self.params, "check": check, "reason": reason})

    def structure(self, X: SemiSimplicialSet, max_q: int | None = None):
        """Exactness rows (identities, ∂∂ = 0, Euler) and the Betti profile."""
        self.add(-1, "simplicial-identities", validate(X).ok, "==", True)
        self.add(-1, "euler-characteristic", euler_consistent(X), "==", True)
        self.betti = reduced_betti(X, max_q).betti
        return self.betti

    def measure(self, X, q, *, samples: int | None = None, sub=None) -> UbcMeasurement:
        if samples is not None:
            return ubc_sampled(X, q, samples, self.seed, sub=sub)
        b = self.budget
        return ubc_exact(
            X,
            q,
            sub=sub,
            max_circuits=b.max_circuits,
            time_budget_sec=b.time_budget_sec,
            fallback_samples=b.fallback_samples,
            seed=self.seed,
        )

    def ubc_row(self, q, m: UbcMeasurement, certified: calc.CertifiedConstant | Fraction, rule: str | None = None, check="ubc"):
        value = certified.value if isinstance(certified, calc.CertifiedConstant) else certified
        rule = rule or (certified.rule if isinstance(certified, calc.CertifiedConstant) else "")
        seed = m.seed if m.mode == "sampled" else None
        self.add(q, check, m.value, "<=", value, rule=rule, mode=m.mode, seed=seed)


# ---------------------------------------------------------------------------
# instances


def _paths(inst: Instance, N: int):
    X = path(N).sset
    inst.structure(X)
    m = inst.measure(X, 0)
    inst.add(0, "ubc", m.value, "==", Fraction(N, 2), rule="half-diameter", mode=m.mode)


def _cones(inst: Instance, base: str):
    S = _named_complex(base)
    C = cone(S)
    X = C.sset
    inst.structure(X)
    inst.add(-1, "acyclic", all(b == 0 for b in inst.betti), "==", True)
    for q in range(0, X.dim + 1):
        inst.ubc_row(q, inst.measure(X, q), calc.k_cone(q))


def _named_complex(name: str) -> OrderedSimplicialComplex:
    if name == "bd-simplex-2":
        return boundary_simplex(2)
    if name == "bd-simplex-3":
        return boundary_simplex(3)
    if name == "tits-a-F2-2":
        return order_complex(tits_building_A(2, 2))
    if name.startswith("simplex-"):
        return simplex(int(name.split("-")[1]))
    raise ValueError(name)


def _subdivision(inst: Instance, base: str):
    X = _named_complex(base).sset
    cert = sd_certificate(X)
    inst.add(-1, "sd-certificate", cert.verified, "==", True, rule="sd_certificate")
    S = cert.target
    inst.structure(S)
    for q in range(0, 3):
        mx = inst.measure(X, q)
        ms = inst.measure(S, q)
        inst.ubc_row(q, ms, calc.k_sd_down(q, mx.value), check="ubc(Sd X) from X")
        inst.ubc_row(q, mx, calc.k_sd_up(q, ms.value), check="ubc(X) from Sd X")


def _mayer_vietoris(inst: Instance):
    Y, Y2 = horn(3, 0), horn(3, 1)
    X = boundary_simplex(3)
    assert Y.simplices | Y2.simplices == X.simplices
    common = Y.simplices & Y2.simplices
    I = OrderedSimplicialComplex("horn-intersection", tuple(v for v in X.vertices if (v,) in common), frozenset(common))
    inst.structure(X.sset)
    for q in (0, 1):
        kY, kY2 = inst.measure(Y.sset, q).value, inst.measure(Y2.sset, q).value
        kI = inst.measure(I.sset, q - 1).value if q >= 1 else Fraction(0)
        inst.ubc_row(q, inst.measure(X.sset, q), calc.k_mv(q, kY, kY2, kI))


def _tits_a(inst: Instance, n: int, sampled_from: int | None):
    T = tits_building_A(2, n)
    inst.add(-1, "vertices", len(T), "==", sum(_gauss(n, k, 2) for k in range(1, n)))
    X = order_complex(T).sset
    inst.structure(X)
    inst.add(-1, f"betti[{n - 2}]", inst.betti[n - 2], "==", 2 ** (n * (n - 1) // 2), rule="p^binom(n,2)")
    inst.add(-1, "concentrated", sum(inst.betti) == inst.betti[n - 2], "==", True)
    if n >= 3:
        line = next(x for x in T.elements if T.dimension(x) == 1)
        filt = solomon_tits_filtration(T, line)
        kinds = [k for step in filt.steps[:-1] for k in step.link_kinds.values()]
        last = list(filt.steps[-1].link_kinds.values())
        inst.add(-1, "filtration-links", all(k == "cone" for k in kinds) and all(k == "building" for k in last), "==", True)
    for q in range(0, n - 2):
        samples = inst.budget.fallback_samples if sampled_from is not None and q >= sampled_from else None
        inst.ubc_row(q, inst.measure(X, q, samples=samples), calc.k_tits(n))


def _gauss(n, k, p):
    from .families import gaussian_binomial

    return gaussian_binomial(n, k, p)


def _tits_c(inst: Instance, n: int):
    T = tits_building_C(2, n)
    X = order_complex(T).sset
    inst.structure(X)
    inst.add(-1, f"betti[{n - 1}]", inst.betti[n - 1], "==", 2 ** (n * n), rule="p^(n^2)")
    inst.add(-1, "concentrated", sum(inst.betti) == inst.betti[n - 1], "==", True)


def _unimodular(inst: Instance, m: int, n: int):
    R = FiniteRing.prime_field(m) if m in (2, 3) else FiniteRing.zmod(m)
    sr = R.stable_rank
    target = n - sr - 1
    prof = split_injection_betti(R, n, max(target, 0))
    inst.betti = prof.betti
    inst.add(-1, "acyclic-through", prof.acyclic_through, ">=", target, rule="n-sr-1")
    try:
        U = unimodular_poset(UnimodularPosetSpec(R, n), inst.budget.max_vertices)
        X = split_injection_complex(R, n, inst.budget.max_vertices * 4)
    except BudgetExceeded:
        # Too large to hold as a poset: compare the two enumerations as streams.
        check = streamed_sd_check(R, n)
        inst.add(-1, "max-chain-length", check.max_chain_length, "<=", n + 1, mode="streamed")
        inst.add(-1, "sd-isomorphism", check.isomorphic, "==", True, mode="streamed")
        return
    inst.add(-1, "simplicial-identities", validate(X).ok, "==", True)
    inst.add(-1, "max-chain-length", U.maximal_chain_length(), "<=", n + 1)
    inst.add(-1, "sd-isomorphism", same_order(barycentric_subdivision(X), U), "==", True)


def _ord(inst: Instance, base: str):
    S = _named_complex(base)
    n = S.dim  # level of the Cohen-Macaulay complex
    O = ord_construction(S)
    inst.structure(O)
    if base == "simplex-2":
        for q, expected in enumerate((0, 0, 2)):
            inst.add(-1, f"betti[{q}]", inst.betti[q], "==", expected)
    K = _cm_constant(inst, S, n)
    inst.add(-1, "input-K", K, ">=", 0, rule="max over complex and links")
    k = calc.k_ord(n, K)
    for q in range(0, n):
        inst.ubc_row(q, inst.measure(O, q), k)


def _cm_constant(inst: Instance, S: OrderedSimplicialComplex, n: int) -> Fraction:
    """Largest measured constant of S and its links in the degrees the level requires."""
    K = max((inst.measure(S.sset, q).value for q in range(0, n)), default=Fraction(0))
    for sigma in sorted(S.simplices):
        lk = link(S, sigma)
        level = n - len(sigma)
        if lk.simplices:
            K = max([K] + [inst.measure(lk.sset, q).value for q in range(0, level)])
    return K


def _hyperbolic(inst: Instance, p: int, g: int):
    R = FiniteRing.prime_field(p)
    fp = FormParameter.symplectic(R)
    M = hyperbolic_module(fp, R, g)
    inst.add(-1, "non-degenerate", M.is_nondegenerate(), "==", True)
    cx = hyperbolic_split_injection_complex(M, inst.budget.max_vertices)
    inst.structure(cx.ordered)
    inst.add(-1, "vertices", len(cx.vertices), "==", {(3, 1): 24, (2, 1): 6, (2, 2): 120}.get((p, g), len(cx.vertices)))
    inst.add(-1, "ord(S)=X", ord_matches_ordered(cx), "==", True)
    if g >= 2:
        inst.add(-1, "link=complement", link_matches_complement(M, cx.vertices[0]), "==", True)


DESK: tuple[tuple[str, str, Callable, tuple], ...] = (
    *(("path", f"N={N}", _paths, (N,)) for N in (2, 4, 8)),
    *(("cone", f"base={b}", _cones, (b,)) for b in ("bd-simplex-2", "bd-simplex-3", "tits-a-F2-2")),
    *(("sd", f"base={b}", _subdivision, (b,)) for b in ("simplex-2", "bd-simplex-3")),
    ("mayer-vietoris", "bd-simplex-3=horn0+horn1", _mayer_vietoris, ()),
    ("tits-a", "p=2,n=2", _tits_a, (2, None)),
    ("tits-a", "p=2,n=3", _tits_a, (3, None)),
    ("tits-a", "p=2,n=4", _tits_a, (4, 1)),
    *(("tits-c", f"p=2,n={n}", _tits_c, (n,)) for n in (1, 2)),
    *(("unimodular", f"m={m},n={n}", _unimodular, (m, n)) for m in (2, 3, 4, 6) for n in (1, 2, 3)),
    *(("ord", f"base={b}", _ord, (b,)) for b in ("simplex-1", "simplex-2", "bd-simplex-3")),
    ("hyperbolic", "p=3,g=1", _hyperbolic, (3, 1)),
    ("hyperbolic", "p=2,g=2", _hyperbolic, (2, 2)),
)


def _run(job) -> tuple[list[ReportRow], list[dict]]:
    family, params, fn, args, budget, seed = job
    inst = Instance(family, params, budget, seed)
    fn(inst, *args)
    return inst.rows, inst.skipped


@dataclass
class Report:
    suite: str
    seed: int
    budget: Budget
    rows: list[ReportRow]
    skipped: list[dict]

    @property
    def ok(self) -> bool:
        return all(r.verdict for r in self.rows)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "budget": asdict(self.budget),
            "ok": self.ok,
            "rows": [r.to_json() for r in self.rows],
            "skipped": self.skipped,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            d = r.to_json()
            d["reduced_betti"] = ";".join(map(str, r.reduced_betti))
            d["verdict"] = "true" if r.verdict else "false"
            d["seed"] = "" if r.seed is None else r.seed
            w.writerow([d[c] for c in CSV_COLUMNS])
        return buf.getvalue()


def run_suite(suite: str = "desk", seed: int = 0, budget: Budget | None = None, jobs: int = 1, only: str | None = None) -> Report:
    if suite != "desk":
        raise ValueError(f"unknown suite {suite!r}")
    budget = budget or Budget()
    todo = [(f, p, fn, a, budget, seed) for f, p, fn, a in DESK if only is None or f == only]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run, todo))
    else:
        results = [_run(j) for j in todo]
    rows = sorted((r for rs, _ in results for r in rs), key=ReportRow.sort_key)
    skipped = sorted((s for _, ss in results for s in ss), key=lambda s: (s["family"], s["params"], s["check"]))
    return Report(suite, seed, budget, rows, skipped)
