"""Constructions on complexes and posets, with explicit chain-homotopy data."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .core import (
    ComplexError,
    OrderedSimplicialComplex,
    Poset,
    SemiSimplicialSet,
    SparseMatrix,
    boundary_matrix,
    simplex_id,
)

# ---------------------------------------------------------------------------
# basic complexes


def simplex(n: int, prefix: str = "") -> OrderedSimplicialComplex:
    verts = [f"{prefix}{k}" for k in range(n + 1)]
    return OrderedSimplicialComplex.from_facets(f"simplex{n}", verts, [verts] if n >= 0 else [])


def boundary_simplex(n: int, prefix: str = "") -> OrderedSimplicialComplex:
    verts = [f"{prefix}{k}" for k in range(n + 1)]
    facets = [[v for v in verts if v != w] for w in verts] if n >= 1 else []
    return OrderedSimplicialComplex.from_facets(f"bdry_simplex{n}", verts, facets)


def horn(n: int, k: int, prefix: str = "") -> OrderedSimplicialComplex:
    """Boundary of the n-simplex minus its k-th facet (the one opposite vertex k)."""
    if not 0 <= k <= n or n < 1:
        raise ComplexError(f"horn({n},{k}) out of range")
    verts = [f"{prefix}{j}" for j in range(n + 1)]
    facets = [[v for v in verts if v != verts[j]] for j in range(n + 1) if j != k]
    return OrderedSimplicialComplex.from_facets(f"horn{n}_{k}", verts, facets)


def path(N: int) -> OrderedSimplicialComplex:
    verts = [str(k) for k in range(N + 1)]
    facets = [[verts[k], verts[k + 1]] for k in range(N)] or [[verts[0]]]
    return OrderedSimplicialComplex.from_facets(f"path{N}", verts, facets)


# ---------------------------------------------------------------------------
# links, stars, joins, cones


def link(X: OrderedSimplicialComplex, sigma: Iterable[str]) -> OrderedSimplicialComplex:
    s = X.normalize(sigma)
    if s not in X.simplices:
        raise ComplexError(f"{simplex_id(s)} is not a simplex of {X.name}")
    ss = set(s)
    out = [t for t in X.simplices if ss.isdisjoint(t) and X.normalize(ss | set(t)) in X.simplices]
    return OrderedSimplicialComplex(f"lk({X.name},{simplex_id(s)})", tuple(v for v in X.vertices if (v,) in out), frozenset(out))


def star(X: OrderedSimplicialComplex, sigma: Iterable[str]) -> OrderedSimplicialComplex:
    s = X.normalize(sigma)
    lk = link(X, s)
    facets = [set(s) | set(t) for t in lk.simplices] or [set(s)]
    return OrderedSimplicialComplex.from_facets(f"st({X.name},{simplex_id(s)})", X.vertices, facets)


def _disjoint_labels(X: OrderedSimplicialComplex, Y: OrderedSimplicialComplex):
    if set(X.vertices).isdisjoint(Y.vertices):
        return X, Y
    return relabel(X, lambda v: f"l{v}"), relabel(Y, lambda v: f"r{v}")


def relabel(X: OrderedSimplicialComplex, fn) -> OrderedSimplicialComplex:
    return OrderedSimplicialComplex(X.name, tuple(fn(v) for v in X.vertices), frozenset(tuple(fn(v) for v in s) for s in X.simplices))


def join(X: OrderedSimplicialComplex, Y: OrderedSimplicialComplex, name: str | None = None) -> OrderedSimplicialComplex:
    """Simplices σ ⊔ τ; X vertices ordered before Y vertices."""
    X, Y = _disjoint_labels(X, Y)
    simplices = set(X.simplices) | set(Y.simplices)
    simplices |= {s + t for s in X.simplices for t in Y.simplices}
    return OrderedSimplicialComplex(name or f"{X.name}*{Y.name}", X.vertices + Y.vertices, frozenset(simplices))


def cone(X: OrderedSimplicialComplex, apex: str = "c") -> OrderedSimplicialComplex:
    while apex in X.rank:
        apex += "c"
    pt = OrderedSimplicialComplex(apex, (apex,), frozenset({(apex,)}))
    return join(X, pt, name=f"cone({X.name})")


def boundary_simplex_join(n: int, X: OrderedSimplicialComplex) -> OrderedSimplicialComplex:
    return join(boundary_simplex(n, prefix="s"), X, name=f"bdry{n}*{X.name}")


def as_ordered_complex(X: SemiSimplicialSet) -> OrderedSimplicialComplex:
    """Recover an ordered simplicial complex from a vertex-labelled set whose
    simplices are determined by their vertex sets."""
    if X.labels is None:
        raise ComplexError(f"{X.name} carries no vertex labels")
    verts = tuple(X.labels[0][j][0] for j in range(X.count(0))) if X.dim >= 0 else ()
    tuples = [lab for deg in X.labels for lab in deg]
    sets = {frozenset(t) for t in tuples}
    if len(sets) != len(tuples) or any(len(set(t)) != len(t) for t in tuples):
        raise ComplexError(f"{X.name} is not a simplicial complex (repeated vertex sets)")
    out = OrderedSimplicialComplex.from_facets(X.name, verts, tuples)
    if len(out.simplices) != len(tuples):
        raise ComplexError(f"{X.name} is not closed under faces")
    return out


def cone_apex(X: OrderedSimplicialComplex) -> str | None:
    """A vertex v with σ ∪ {v} a simplex for every simplex σ, if any."""
    for v in X.vertices:
        if all(v in s or X.normalize(set(s) | {v}) in X.simplices for s in X.simplices):
            return v
    return None


# ---------------------------------------------------------------------------
# posets: links, joins, order complexes, subdivision


@dataclass(frozen=True, eq=False)
class PosetLink:
    element: str
    up: frozenset[str]
    down: frozenset[str]
    lk_plus: Poset
    lk_minus: Poset
    lk: Poset


def poset_join(lower: Poset, upper: Poset, name: str | None = None) -> Poset:
    """Every element of ``lower`` below every element of ``upper``."""
    if not set(lower.elements).isdisjoint(upper.elements):
        raise ComplexError("poset join needs disjoint element sets")
    rel = [(a, b) for a in lower.elements for b in lower.above(a)]
    rel += [(a, b) for a in upper.elements for b in upper.above(a)]
    rel += [(a, b) for a in lower.elements for b in upper.elements]
    return Poset.from_relation(name or f"{lower.name}*{upper.name}", lower.elements + upper.elements, rel)


def poset_link(F: Poset, x: str, ambient: Poset | None = None) -> PosetLink:
    amb = ambient or F
    if x not in amb:
        raise ComplexError(f"{x!r} not in poset")
    members = set(F.elements)
    up = frozenset(amb.above(x) & members)
    down = frozenset(amb.below(x) & members)
    lp = amb.subposet(up, name=f"lk+({x})")
    lm = amb.subposet(down, name=f"lk-({x})")
    return PosetLink(x, up, down, lp, lm, poset_join(lm, lp, name=f"lk({x})"))


def linear_extension(F: Poset) -> tuple[str, ...]:
    """Deterministic linear extension (smallest available name first)."""
    import heapq

    indeg = {e: 0 for e in F.elements}
    for e in F.elements:
        for b in F.covers[e]:
            indeg[b] += 1
    heap = [e for e, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        e = heapq.heappop(heap)
        out.append(e)
        for b in F.covers[e]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, b)
    return tuple(out)


def flags(F: Poset, max_len: int | None = None) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = []
    stack = [(e,) for e in F.elements]
    while stack:
        f = stack.pop()
        out.append(f)
        if max_len is None or len(f) < max_len:
            stack.extend(f + (b,) for b in F.above(f[-1]))
    return out


def order_complex(F: Poset, max_dim: int | None = None) -> OrderedSimplicialComplex:
    """Strict chains x_0 < ... < x_p as simplices."""
    ext = linear_extension(F)
    return OrderedSimplicialComplex(
        f"ord({F.name})", ext, frozenset(flags(F, None if max_dim is None else max_dim + 1))
    )


def face_poset_elements(X: SemiSimplicialSet) -> dict[tuple[int, str], str]:
    names = {(q, s): s for q, deg in enumerate(X.ids) for s in deg}
    if len(set(names.values())) != len(names):
        names = {(q, s): f"{q}:{s}" for q, s in names}
    return names


def barycentric_subdivision(X: SemiSimplicialSet) -> Poset:
    """Simplices of a regular X ordered by the face relation."""
    for q in range(1, len(X.ids)):
        for sid, fs in zip(X.ids[q], X.faces[q]):
            if len(set(fs)) != len(fs):
                raise ComplexError(f"{X.name} is not regular: simplex {sid} has repeated faces")
    if not X.regular:
        raise ComplexError(f"{X.name} is not flagged regular")
    names = face_poset_elements(X)
    rel = [
        (names[(q - 1, X.ids[q - 1][f])], names[(q, sid)])
        for q in range(1, len(X.ids))
        for sid, fs in zip(X.ids[q], X.faces[q])
        for f in fs
    ]
    return Poset.from_relation(f"Sd({X.name})", names.values(), rel)


def sd(X: SemiSimplicialSet) -> SemiSimplicialSet:
    return order_complex(barycentric_subdivision(X)).sset


def ord_construction(S: OrderedSimplicialComplex, name: str | None = None) -> SemiSimplicialSet:
    """Injective tuples whose underlying set is a simplex; face i deletes entry i."""
    tuples = [p for s in S.simplices for p in itertools.permutations(s)]
    return SemiSimplicialSet.from_tuples(name or f"ord({S.name})", tuples, close=False)


# ---------------------------------------------------------------------------
# chain homotopy certificates

SIGN_CONVENTION = "dH + Hd = transport - id"


@dataclass(frozen=True, eq=False)
class HomotopyCertificate:
    """Chain maps f: C -> C', g: C' -> C and homotopies on both sides.

    Convention: ∂H_C + H_C∂ = g∘f − id and ∂H_C' + H_C'∂ = f∘g − id.
    Bases are the unreduced simplicial chain complexes of ``source`` and
    ``target``.  Matrices are indexed by degree.
    """

    source: SemiSimplicialSet
    target: SemiSimplicialSet
    f: Mapping[int, SparseMatrix]
    g: Mapping[int, SparseMatrix]
    H_source: Mapping[int, SparseMatrix]
    H_target: Mapping[int, SparseMatrix]
    convention: str = SIGN_CONVENTION

    @property
    def top(self) -> int:
        return max(self.source.dim, self.target.dim)

    def _get(self, table, q, rows, cols) -> SparseMatrix:
        return table.get(q) or SparseMatrix.zero(rows, cols)

    def f_(self, q):
        return self._get(self.f, q, self.target.count(q), self.source.count(q))

    def g_(self, q):
        return self._get(self.g, q, self.source.count(q), self.target.count(q))

    def Hs(self, q):
        return self._get(self.H_source, q, self.source.count(q + 1), self.source.count(q))

    def Ht(self, q):
        return self._get(self.H_target, q, self.target.count(q + 1), self.target.count(q))

    def norms(self) -> dict[str, dict[int, Fraction]]:
        qs = range(0, self.top + 1)
        return {
            "f": {q: self.f_(q).norm() for q in qs},
            "g": {q: self.g_(q).norm() for q in qs},
            "H_source": {q: self.Hs(q).norm() for q in qs},
            "H_target": {q: self.Ht(q).norm() for q in qs},
        }

    def problems(self) -> list[str]:
        out = []
        for q in range(0, self.top + 1):
            if q >= 1:
                if not (_bd(self.target, q) @ self.f_(q) - self.f_(q - 1) @ _bd(self.source, q)).is_zero():
                    out.append(f"f is not a chain map in degree {q}")
                if not (_bd(self.source, q) @ self.g_(q) - self.g_(q - 1) @ _bd(self.target, q)).is_zero():
                    out.append(f"g is not a chain map in degree {q}")
            for side, X, H, fst, snd in (
                ("source", self.source, self.Hs, self.f_, self.g_),
                ("target", self.target, self.Ht, self.g_, self.f_),
            ):
                lhs = _bd(X, q + 1) @ H(q)
                if q >= 1:
                    lhs = lhs + H(q - 1) @ _bd(X, q)
                rhs = snd(q) @ fst(q) - SparseMatrix.identity(X.count(q))
                if not (lhs - rhs).is_zero():
                    out.append(f"homotopy identity fails on {side} in degree {q}")
        return out

    @cached_property
    def verified(self) -> bool:
        return not self.problems()

    def reversed(self) -> "HomotopyCertificate":
        return HomotopyCertificate(self.target, self.source, self.g, self.f, self.H_target, self.H_source, self.convention)


def _bd(X: SemiSimplicialSet, q: int) -> SparseMatrix:
    if 1 <= q <= X.dim:
        return boundary_matrix(X, q)
    return SparseMatrix.zero(X.count(q - 1), X.count(q))


def _matrix(rows_index: Mapping[str, int], nrows: int, columns: Sequence[Mapping[str, int | Fraction]]) -> SparseMatrix:
    return SparseMatrix.from_columns(nrows, ({rows_index[k]: v for k, v in col.items()} for col in columns))


def _add_into(acc: dict, chain: Mapping, scale=1):
    for k, v in chain.items():
        nv = acc.get(k, 0) + scale * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


def _flag_boundary(flag: tuple[str, ...]) -> dict[tuple[str, ...], int]:
    out: dict[tuple[str, ...], int] = {}
    if len(flag) == 1:
        return out
    for i in range(len(flag)):
        _add_into(out, {flag[:i] + flag[i + 1 :]: (-1) ** i})
    return out


def sd_certificate(X: SemiSimplicialSet) -> HomotopyCertificate:
    """Certificate between C(X) and C(Sd X) built from vertex labels.

    f appends σ to the image of ∂σ with sign (-1)^q; g sends the flag of
    initial segments of σ to σ and every other flag to 0; H on Sd X is built
    degree by degree by coning off with the top simplex of each flag.
    """
    if not X.regular:
        raise ComplexError(f"{X.name} is not regular")
    if X.labels is None:
        raise ComplexError(f"{X.name} needs vertex labels for the subdivision certificate")
    for q, deg in enumerate(X.labels):
        for t in deg:
            if len(set(t)) != len(t):
                raise ComplexError(f"simplex {simplex_id(t)} repeats a vertex")
    F = barycentric_subdivision(X)
    names = face_poset_elements(X)
    S = order_complex(F).sset
    element_of = {names[(q, s)]: (q, s) for q in range(len(X.ids)) for s in X.ids[q]}
    lab = {names[(q, s)]: X.labels[q][j] for q in range(len(X.ids)) for j, s in enumerate(X.ids[q])}

    f_memo: dict[str, dict[tuple[str, ...], int]] = {}

    def f_of(q: int, sid: str) -> dict[tuple[str, ...], int]:
        key = names[(q, sid)]
        if key in f_memo:
            return f_memo[key]
        if q == 0:
            res = {(key,): 1}
        else:
            res: dict[tuple[str, ...], int] = {}
            fs = X.faces[q][X.index(q, sid)]
            for i, fj in enumerate(fs):
                sub = f_of(q - 1, X.ids[q - 1][fj])
                sign = (-1) ** (q + i)
                _add_into(res, {fl + (key,): v for fl, v in sub.items()}, sign)
        f_memo[key] = res
        return res

    def g_of(flag: tuple[str, ...]) -> dict[str, int]:
        top = lab[flag[-1]]
        pos = {v: k for k, v in enumerate(top)}
        marks = [max(pos[v] for v in lab[e]) for e in flag]
        if any(a >= b for a, b in zip(marks, marks[1:])):
            return {}
        return {simplex_id(tuple(top[m] for m in marks)): 1}

    def fg(flag):
        out: dict[tuple[str, ...], int] = {}
        q = len(flag) - 1
        for sid, v in g_of(flag).items():
            _add_into(out, f_of(q, sid), v)
        return out

    H_memo: dict[tuple[str, ...], dict[tuple[str, ...], int]] = {}

    def H_of(flag: tuple[str, ...]) -> dict[tuple[str, ...], int]:
        if flag in H_memo:
            return H_memo[flag]
        q = len(flag) - 1
        apex = flag[-1]
        c = fg(flag)
        _add_into(c, {flag: 1}, -1)
        for face, v in _flag_boundary(flag).items():
            _add_into(c, H_of(face), -v)
        res = {fl + (apex,): v * (-1) ** (q + 1) for fl, v in c.items() if fl[-1] != apex}
        H_memo[flag] = res
        return res

    S_index = [{tuple(S.labels[q][j]): j for j in range(S.count(q))} for q in range(len(S.ids))]
    f_tab, g_tab, H_tab = {}, {}, {}
    for q in range(len(X.ids)):
        f_tab[q] = SparseMatrix.from_columns(
            S.count(q), ({S_index[q][fl]: v for fl, v in f_of(q, sid).items()} for sid in X.ids[q])
        )
    for q in range(len(S.ids)):
        g_cols, H_cols = [], []
        for t in S.labels[q]:
            g_cols.append({X.index(q, sid): v for sid, v in g_of(t).items()})
            H_cols.append({S_index[q + 1][fl]: v for fl, v in H_of(t).items()} if q + 1 < len(S.ids) else {})
            if q + 1 >= len(S.ids) and H_of(t):
                raise ComplexError("homotopy leaves the subdivision")
        g_tab[q] = SparseMatrix.from_columns(X.count(q), g_cols)
        H_tab[q] = SparseMatrix.from_columns(S.count(q + 1), H_cols)
    return HomotopyCertificate(X, S, f_tab, g_tab, {}, H_tab)


def poset_retract(F: Poset, S: Iterable[str]) -> tuple[dict[str, str], HomotopyCertificate]:
    """Retraction r(x) = max{y ∈ S : y ≤ x} with its chain homotopy.

    The certificate runs from C(ord S) to C(ord F); f is the inclusion and g
    is induced by r, dropping degenerate flags.
    """
    keep = set(S)
    r: dict[str, str] = {}
    for x in F.elements:
        below = [y for y in keep if F.leq(y, x)]
        if not below:
            raise ComplexError(f"no element of the subposet lies below {x!r}")
        tops = [m for m in below if all(F.leq(y, m) for y in below)]
        if not tops:
            raise ComplexError(f"elements below {x!r} have no maximum in the subposet")
        r[x] = tops[0]
    OS = order_complex(F.subposet(keep)).sset
    OF = order_complex(F).sset

    def collapse(seq: Sequence[str]) -> tuple[str, ...] | None:
        return tuple(seq) if all(F.less(a, b) for a, b in zip(seq, seq[1:])) else None

    def H_of(flag):
        out: dict[tuple[str, ...], int] = {}
        for i in range(len(flag)):
            new = collapse([r[x] for x in flag[: i + 1]] + list(flag[i:]))
            if new is not None:
                _add_into(out, {new: (-1) ** i})
        return out

    FI = [{tuple(OF.labels[q][j]): j for j in range(OF.count(q))} for q in range(len(OF.ids))]
    f_tab, g_tab, H_tab = {}, {}, {}
    for q in range(len(OS.ids)):
        f_tab[q] = SparseMatrix.from_columns(OF.count(q), ({FI[q][tuple(t)]: 1} for t in OS.labels[q]))
    for q in range(len(OF.ids)):
        g_cols, H_cols = [], []
        for t in OF.labels[q]:
            img = collapse([r[x] for x in t])
            g_cols.append({OS.index(q, simplex_id(img)): 1} if img is not None and q < len(OS.ids) else {})
            h = H_of(t)
            H_cols.append({FI[q + 1][k]: v for k, v in h.items()})
        g_tab[q] = SparseMatrix.from_columns(OS.count(q), g_cols)
        H_tab[q] = SparseMatrix.from_columns(OF.count(q + 1), H_cols)
    cert = HomotopyCertificate(OS, OF, f_tab, g_tab, {}, H_tab)
    if not cert.verified:
        flipped = HomotopyCertificate(OS, OF, f_tab, g_tab, {}, {q: -m for q, m in H_tab.items()})
        if flipped.verified:
            cert = flipped
    return r, cert


def identity_certificate(X: SemiSimplicialSet) -> HomotopyCertificate:
    ident = {q: SparseMatrix.identity(X.count(q)) for q in range(len(X.ids))}
    return HomotopyCertificate(X, X, ident, ident, {}, {})
