"""Certified UBC constants: explicit formulas and recursions evaluated over
exact extended rationals, each result carrying its derivation."""

from __future__ import annotations

import functools
import inspect
import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable

INF = math.inf
Value = Fraction | float


@dataclass(frozen=True, eq=False)
class CertifiedConstant:
    value: Value
    rule: str
    inputs: tuple[tuple[str, object], ...]
    step: str
    children: tuple["CertifiedConstant", ...] = ()

    def __float__(self) -> float:
        return float(self.value)

    def nodes(self) -> list["CertifiedConstant"]:
        seen: dict[int, CertifiedConstant] = {}
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen[id(node)] = node
            stack.extend(node.children)
        return list(seen.values())

    def depth(self) -> int:
        memo: dict[int, int] = {}

        def d(node):
            if id(node) not in memo:
                memo[id(node)] = 1 + max((d(c) for c in node.children), default=0)
            return memo[id(node)]

        return d(self)

    def to_json(self) -> dict:
        """The derivation as a DAG: shared sub-derivations appear once."""
        order: dict[int, int] = {}
        out = []

        def visit(node):
            if id(node) in order:
                return order[id(node)]
            kids = [visit(c) for c in node.children]
            order[id(node)] = len(out)
            out.append(
                {
                    "id": len(out),
                    "rule": node.rule,
                    "step": node.step,
                    "inputs": {k: _fmt(v) for k, v in node.inputs},
                    "value": _fmt(node.value),
                    "children": kids,
                }
            )
            return order[id(node)]

        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 100_000))
        try:
            root = visit(self)
        finally:
            sys.setrecursionlimit(limit)
        return {"rule": self.rule, "value": _fmt(self.value), "root": root, "nodes": out}


def _fmt(v) -> str | int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)  # exact values can run to many thousands of digits
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v if isinstance(v, int) else str(v)


def _num(v):
    if isinstance(v, CertifiedConstant):
        return v.value
    if isinstance(v, float):
        if math.isinf(v):
            return INF
        return Fraction(v)
    if isinstance(v, str):
        return INF if v in ("inf", "∞") else Fraction(v)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    raise TypeError(f"not a number: {v!r}")


RULES: dict[str, Callable[..., CertifiedConstant]] = {}
CONSTANT_ARGS: dict[str, tuple[str, ...]] = {}
_CACHES: list = []


def given(value, label: str = "measured") -> CertifiedConstant:
    """Leaf node for an externally supplied constant (e.g. a measurement)."""
    return CertifiedConstant(_num(value), "given", (("label", label),), label)


def rule(name: str, step: str, constants: tuple[str, ...]):
    """Register a rule.  ``constants`` names the UBC-constant arguments:
    an infinite constant makes the result infinite without evaluation."""

    def deco(fn):
        params = tuple(inspect.signature(fn).parameters)

        @functools.lru_cache(maxsize=None)
        def cached(*args):
            kw = dict(zip(params, args))
            if any(kw[c] == INF for c in constants):
                return CertifiedConstant(INF, name, tuple(kw.items()), step)
            value, children = fn(*args)
            return CertifiedConstant(value, name, tuple(kw.items()), step, tuple(children))

        @functools.wraps(fn)
        def public(*args):
            if len(args) != len(params):
                raise TypeError(f"{name} takes {len(params)} arguments")
            norm = []
            extra = []
            for p, a in zip(params, args):
                if p in constants or p.startswith("K"):
                    if isinstance(a, CertifiedConstant):
                        extra.append(a)
                    val = _num(a)
                    if val != INF and val < 0:
                        raise ValueError(f"{name}: constant {p} must be nonnegative")
                    norm.append(val)
                else:
                    norm.append(int(a))
            node = cached(*norm)
            return replace(node, children=node.children + tuple(extra)) if extra else node

        RULES[name] = public
        CONSTANT_ARGS[name] = constants
        _CACHES.append(cached)
        public.params = params
        return public

    return deco


def clear_caches() -> None:
    for c in _CACHES:
        c.cache_clear()


def replay(node: CertifiedConstant) -> bool:
    """Recompute a derivation from scratch and compare values node by node."""
    clear_caches()
    fresh = {}

    def recompute(n: CertifiedConstant):
        if n.rule in ("given",):
            return n.value
        if n.rule == "max":
            return max((c.value for c in n.children), default=Fraction(0))
        return RULES[n.rule](*[v for _, v in n.inputs]).value

    return all(recompute(n) == n.value for n in node.nodes())


def _max(label: str, nodes: Iterable[CertifiedConstant]) -> CertifiedConstant:
    """Vacuous maxima are 0."""
    nodes = tuple(nodes)
    value = max((n.value for n in nodes), default=Fraction(0))
    return CertifiedConstant(value, "max", (("over", label),), label, nodes)


def _ff(x: int, k: int) -> int:
    """Falling factorial x (x-1) ... (x-k+1); zero once a factor is zero."""
    out = 1
    for i in range(k):
        out *= x - i
    return out


# ---------------------------------------------------------------------------
# explicit formulas


@rule("k_three", "two-out-of-three: constant for the pair from the complex and subcomplex", ("K_X", "K_Y"))
def k_three(q, K_X, K_Y):
    return K_X * (1 + K_Y * (q + 1)), ()


@rule("k_two", "two-out-of-three: constant for the subcomplex from the complex and pair", ("K_X", "K_pair"))
def k_two(q, K_X, K_pair):
    return (q + 2) * K_pair * K_X + K_X, ()


@rule("k_one", "two-out-of-three: constant for the complex from the subcomplex and pair", ("K_Y", "K_pair"))
def k_one(q, K_Y, K_pair):
    return K_pair + K_Y + (q + 2) * K_pair * K_Y, ()


@rule("k_fact", "composition of two highly acyclic inclusions", ("K_pair", "K_mid"))
def k_fact(q, K_pair, K_mid):
    return K_pair + K_mid + (q + 2) * K_pair * K_mid, ()


@rule("k_mv", "union of two subcomplexes (Mayer-Vietoris)", ("K_Y", "K_Y2"))
def k_mv(q, K_Y, K_Y2, K_int):
    # the intersection enters only as a factor of K_Y + K_Y2, and not at all in degree 0
    if q == 0 or K_Y + K_Y2 == 0:
        return K_Y + K_Y2, ()
    if K_int == INF:
        return INF, ()
    return (1 + (q + 1) * K_int) * (K_Y + K_Y2), ()


@rule("k_susp", "join with the boundary of an n-simplex", ("K",))
def k_susp(n, q, K):
    """2^n (q+1)_n K + Σ_{i=1..n} 2^i (q+1)_{i-1}, with (x)_k the falling factorial."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    value = 2**n * _ff(q + 1, n) * K + sum(2**i * _ff(q + 1, i - 1) for i in range(1, n + 1))
    return Fraction(value), ()


@rule("k_cone", "simplicial cone", ())
def k_cone(q):
    return Fraction(1), ()


@rule("k_cell", "attaching a cell along a uniformly acyclic link", ("K_link",))
def k_cell(p, q, K_link):
    s = k_susp(p, q, K_link)
    return 1 + (q + 1) * s.value, (s,)


@rule("k_mt", "one discrete Morse step (cell attachment plus two-out-of-three)", ("K_Y", "K_link"))
def k_mt(p, q, K_Y, K_link):
    cell = k_cell(p, q, K_link)
    one = k_one(q, K_Y, cell.value)
    return one.value, (cell, one)


@rule("k_retract_up", "poset deformation retract: constant for the poset", ("K_S",))
def k_retract_up(q, K_S):
    return (q + 1) + K_S, ()


@rule("k_retract_down", "poset deformation retract: constant for the retract", ("K_F",))
def k_retract_down(K_F):
    return K_F, ()


@rule("k_sd_up", "subdivision: constant for the complex from its subdivision", ("K_sd",))
def k_sd_up(q, K_sd):
    return math.factorial(q + 1) * K_sd, ()


@rule("k_sd_down", "subdivision: constant for the subdivision from the complex", ("K_x",))
def k_sd_down(q, K_x):
    return math.factorial(q + 2) + math.factorial(q + 1) * K_x, ()


@rule("retract_shift", "retraction onto a fixed vertex set, adding its degree offset", ("K",))
def retract_shift(offset, K):
    return offset + K, ()


@rule("k_tl2", "filling in degree n+1 via the link of an added vertex", ("K_link_prev",))
def k_tl2(q, K_link_prev):
    return Fraction((q + 2) * (2 + 2 * (q + 2) * (q + 1) + 2 * (q + 1))) * (1 + (q + 1) * K_link_prev), ()


@rule("k_tl1", "full subcomplex: right fold of compositions over skeleta", ("K_link",))
def k_tl1(q, n, K_link):
    acc = Fraction(0)
    children = []
    for p in range(0, n + 1):
        cell = k_cell(p, q, K_link)
        node = k_fact(q, cell.value, acc)
        children += [cell, node]
        acc = node.value
    return acc, children


# ---------------------------------------------------------------------------
# Tits buildings


@rule("k_tits_stage", "Solomon-Tits filtration stage r at degree q", ())
def k_tits_stage(n, q, r):
    if r == 0:
        return Fraction(1), (k_cone(q),)
    prev = k_tits_stage(n, q, r - 1)
    link = k_tits(n - 1) if r == n - 1 else k_cone(q)
    step = k_mt(0, q, prev.value, link.value)
    return step.value, (prev, link, step)


@rule("k_tits", "uniform Solomon-Tits bound", ())
def k_tits(n):
    if n <= 2:
        return Fraction(0), ()
    m = _max("q <= n-3", (k_tits_stage(n, q, n - 1) for q in range(0, n - 2)))
    return m.value, (m,)


# ---------------------------------------------------------------------------
# ord-construction


@rule("k_ord_star", "ord-construction: star filtration", ("K",))
def k_ord_star(n, K):
    if n <= 0:
        return Fraction(0), ()
    acc = Fraction(1)
    children = []
    Kp = max(Fraction(1), K)
    for i in range(1, n + 1):
        inner = k_ord(n - i - 1, Kp)
        cands = []
        for q in range(0, n):
            s = k_susp(i, q - 1, inner.value) if q - 1 >= -1 else None
            cands.append(k_mv(q, 1, acc, s.value))
            children.append(s)
        m = _max(f"stage {i}: q <= n-1", cands)
        children += [inner, m]
        acc = m.value
    return acc, children


@rule("k_ord", "ord-construction of a uniformly bounded Cohen-Macaulay complex", ("K",))
def k_ord(n, K):
    if n <= 0:
        return Fraction(0), ()
    st = k_ord_star(n, K)
    H = 2 * st.value
    best = H
    for _ in range(1, n):
        H = st.value * (2 + n * H)
        best = max(best, H)
    return math.factorial(n) * best, (st,)


# ---------------------------------------------------------------------------
# unimodular sequences: link lemmas and the four mutual recursions


@rule("k_gl1_plus", "link lemma I, interior filtration (steps A to D)", ("K",))
def k_gl1_plus(l, sr, m, d, K):
    top = d - m
    if m < 1 or top < 0:
        return Fraction(0), ()
    children = []
    base = given(K, "K") if m == 1 else k_gl1_plus(l, sr, m - 1, d - 1, K)
    P1 = retract_shift(d - m + 1, base.value)
    children += [base, P1]
    Q = P1.value
    for r in range(0, l + sr - m):
        off = (d - r - 2) if m == 1 else (d - r - 2) - (m - 1)
        if off < 0:
            lkplus = given(0, "vacuous link")
        elif m == 1:
            lkplus = retract_shift(off, K)
        else:
            inner = k_gl1_plus(l, sr, m - 1, d - r - 2, K)
            lkplus = retract_shift(off + 1, inner.value)
            children.append(inner)
        lk = _max("link join, q <= d-m-1", (k_susp(m + r + 1, q, lkplus.value) for q in range(0, d - m)))
        step = _max("Morse step, q <= d-m", (k_mt(0, q, Q, lk.value) for q in range(0, top + 1)))
        children += [lkplus, lk, step]
        Q = step.value
    return Q, children


@rule("k_gl1", "link lemma I", ("K",))
def k_gl1(l, sr, m, d, K):
    plus = k_gl1_plus(l, sr, m, d, K)
    mx = _max("q <= d-1", (k_susp(m, q, plus.value) for q in range(0, d)))
    return mx.value, (plus, mx)


@rule("k_gl2_filtration", "link lemma II, filtration of the added sequences", ("K",))
def k_gl2_filtration(l, sr, d, K):
    if d < 0:
        return Fraction(0), ()
    P = retract_shift(d, K)
    children = [P]
    val = P.value
    for r in range(0, l + sr):
        lk = retract_shift(d, k_gl1(l, sr, r + 1, d, K).value)
        step = _max("Morse step, q <= d", (k_mt(0, q, val, lk.value) for q in range(0, d + 1)))
        children += [lk, step]
        val = step.value
    return val, children


@rule("k_gl2_insertion", "link lemma II, insertion of the initial vector", ("K",))
def k_gl2_insertion(l, sr, d, K):
    D = d + 1
    if D < 0:
        return Fraction(0), ()

    def lk(r):
        return retract_shift(D, k_gl1(l, sr, r + 1, D, K).value)

    seed = _max("degree-raising fill, q <= d+1", (k_tl2(q, lk(1).value) for q in range(0, D + 1)))
    P = _max("Morse step, q <= d+1", (k_mt(0, q, seed.value, lk(0).value) for q in range(0, D + 1)))
    children = [seed, P]
    for r in range(1, l + sr):
        P = _max("Morse step, q <= d+1", (k_mt(0, q, P.value, lk(r).value) for q in range(0, D + 1)))
        children.append(P)
    return P.value, children


@rule("k_gl2", "link lemma II", ("K",))
def k_gl2(l, sr, d, K):
    a = k_gl2_filtration(l, sr, d, K)
    b = k_gl2_insertion(l, sr, d, K)
    return max(a.value, b.value), (a, b)


@rule("k1", "unimodular sequences: all of R^n", ())
def k1(n, sr):
    if n <= 0 or n - sr - 1 < -1:
        return Fraction(0), ()
    inner = _max(
        "K3(n-1) and K4(n-1,k), k <= n+1+sr",
        [k3(n - 1, sr)] + [k4(n - 1, sr, k) for k in range(1, n + 2 + sr)],
    )
    out = k_gl2(n + 1, sr, n - sr - 1, inner.value)
    return out.value, (inner, out)


@rule("k2", "unimodular sequences with a fixed suffix of length k", ())
def k2(n, sr, k):
    if k == 0:
        base = k1(n, sr)
        return base.value, (base,)
    if n <= sr:
        return Fraction(0), ()
    inner = _max(
        "K4(n-1,k) and K4(n-1,k+k'), k' <= n+1+sr",
        [k4(n - 1, sr, k)] + [k4(n - 1, sr, k + kp) for kp in range(1, n + 2 + sr)],
    )
    out = k_gl2(n + 1, sr, n - sr - 1 - k, inner.value)
    return out.value, (inner, out)


@rule("k3", "unimodular sequences in an affine translate", ())
def k3(n, sr):
    inner = _max("K2(n,k), k <= n+2+sr", [k2(n, sr, k) for k in range(1, n + 3 + sr)])
    out = k_gl2(n + 2, sr, n - sr - 1, inner.value)
    return out.value, (inner, out)


@rule("k4", "affine translate with a fixed suffix of length k", ())
def k4(n, sr, k):
    if k == 0:
        base = k3(n, sr)
        return base.value, (base,)
    if n <= sr:
        return Fraction(0), ()
    inner = _max(
        "K4(n-1,k-1) and K4(n-1,k'+k-1), k' <= n+2+sr",
        [k4(n - 1, sr, k - 1)] + [k4(n - 1, sr, kp + k - 1) for kp in range(1, n + 3 + sr)],
    )
    out = k_gl2(n + 2, sr, n - sr - k, inner.value)
    return out.value, (inner, out)


# ---------------------------------------------------------------------------
# hyperbolic split injections


@rule("k_aut", "hyperbolic split injections", ())
def k_aut(g):
    if g <= 3:
        return Fraction(0), ()
    if g <= 5:
        return Fraction(2), ()
    N = (g - 4) // 2
    prev = k_aut(g - 1)
    older = _max("K(g-p-2), p <= g-2", [k_aut(g - p - 2) for p in range(0, g - 1)])
    K1 = _max("first inclusion, q <= N", (k_tl1(q, N, prev.value) for q in range(0, N + 1)))
    K2 = _max("second inclusion, q <= N", (k_tl1(q, N, older.value) for q in range(0, N + 1)))
    helper = _max(
        "composition with the cone, q <= N",
        (k_fact(q, k_fact(q, K2.value, K1.value).value, 1) for q in range(0, N + 1)),
    )
    return max(helper.value, prev.value), (prev, older, K1, K2, helper)


# ---------------------------------------------------------------------------
# stable ranges


@dataclass(frozen=True)
class StableRange:
    iso: bool
    inj: bool
    gamma_tilde: int
    tau_tilde: int | None = None
    formulas_agree: bool = True

    def to_json(self) -> dict:
        out = {"iso": self.iso, "inj": self.inj, "gamma_tilde": self.gamma_tilde}
        if self.tau_tilde is not None:
            out["tau_tilde"] = self.tau_tilde
        out["formulas_agree"] = self.formulas_agree
        return out


def stable_range_gl(n: int, sr: int, q: int) -> StableRange:
    """γ̃(q,n) = min_{1≤j≤q}(n−2q−sr+j), closed form n−2q−sr+1 (also used at q = 0)."""
    closed = n - 2 * q - sr + 1
    by_min = min((n - 2 * q - sr + j for j in range(1, q + 1)), default=closed)
    return StableRange(2 * q <= n - sr, 2 * q <= n - sr + 2, closed, None, by_min == closed)


def stable_range_aut(n: int, q: int) -> StableRange:
    """τ̃ = min_j(n−2q−3+j) = n−2q−2 and γ̃ = min_j(⌊(n−2q−3+2j)/2⌋ − j) = ⌊(n−2q−3)/2⌋."""
    tau_closed = n - 2 * q - 2
    gamma_closed = (n - 2 * q - 3) // 2
    tau_min = min((n - 2 * q - 3 + j for j in range(1, q + 1)), default=tau_closed)
    gamma_min = min(((n - 2 * q - 3 + 2 * j) // 2 - j for j in range(1, q + 1)), default=gamma_closed)
    agree = tau_min == tau_closed and gamma_min == gamma_closed
    return StableRange(2 * q <= n - 3, 2 * q <= n - 1, gamma_closed, tau_closed, agree)


PUBLIC_RULES = (
    "k_three", "k_two", "k_one", "k_fact", "k_mv", "k_susp", "k_cone", "k_cell", "k_mt",
    "k_retract_up", "k_retract_down", "k_sd_up", "k_sd_down", "k_tl2", "k_tl1",
    "k_ord", "k_ord_star", "k_gl1", "k_gl1_plus", "k_gl2", "k1", "k2", "k3", "k4",
    "k_tits", "k_aut",
)
