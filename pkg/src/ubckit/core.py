"""Exact carriers: semi-simplicial sets, ordered simplicial complexes, posets,
chains with the l1 norm, sparse integer matrices and chain-complex views."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

Rational = Fraction
AUGMENTATION_ID = "()"


class ComplexError(ValueError):
    """Malformed complex, chain or pair."""


class BudgetExceeded(RuntimeError):
    """An enumeration or search exceeded its configured budget."""


def simplex_id(labels: Sequence[str]) -> str:
    return "(" + ",".join(labels) + ")"


def parse_rational(text: str | int | Fraction) -> Fraction:
    return Fraction(text)


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# semi-simplicial sets


@dataclass(frozen=True, eq=False)
class SemiSimplicialSet:
    """Simplices per degree with face maps stored as integer indices.

    ``faces[q][j][i]`` is the index (into ``ids[q-1]``) of the i-th face of the
    j-th q-simplex.  ``labels`` optionally records the vertex tuple of every
    simplex for complexes generated from tuples.
    """

    name: str
    ids: tuple[tuple[str, ...], ...]
    faces: tuple[tuple[tuple[int, ...], ...], ...]
    regular: bool = False
    labels: tuple[tuple[tuple[str, ...], ...], ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.ids) - 1

    def count(self, q: int) -> int:
        if 0 <= q < len(self.ids):
            return len(self.ids[q])
        return 0

    def simplices(self, q: int) -> tuple[str, ...]:
        if 0 <= q < len(self.ids):
            return self.ids[q]
        return ()

    @cached_property
    def _index(self) -> tuple[dict[str, int], ...]:
        return tuple({s: j for j, s in enumerate(deg)} for deg in self.ids)

    def index(self, q: int, sid: str) -> int:
        try:
            return self._index[q][sid]
        except (IndexError, KeyError):
            raise ComplexError(f"no {q}-simplex {sid!r} in {self.name}") from None

    def contains(self, q: int, sid: str) -> bool:
        return 0 <= q < len(self.ids) and sid in self._index[q]

    def face(self, q: int, sid: str, i: int) -> str:
        return self.ids[q - 1][self.faces[q][self.index(q, sid)][i]]

    def label(self, q: int, sid: str) -> tuple[str, ...]:
        if self.labels is None:
            raise ComplexError(f"{self.name} carries no vertex labels")
        return self.labels[q][self.index(q, sid)]

    def simplex_count(self) -> int:
        return sum(len(d) for d in self.ids)

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * len(d) for q, d in enumerate(self.ids))

    # construction --------------------------------------------------------

    @classmethod
    def from_tuples(
        cls,
        name: str,
        tuples: Iterable[Sequence[str]],
        *,
        close: bool = True,
        max_simplices: int | None = None,
    ) -> "SemiSimplicialSet":
        """Build the face-closed complex whose simplices are vertex tuples.

        Face i deletes position i.  When ``close`` is false the input must
        already be face-closed.
        """
        by_len: dict[int, set[tuple[str, ...]]] = {}
        for t in tuples:
            t = tuple(t)
            if not t:
                continue
            by_len.setdefault(len(t), set()).add(t)
        if close and by_len:
            for length in range(max(by_len), 1, -1):
                lower = by_len.setdefault(length - 1, set())
                for t in by_len.get(length, ()):
                    for i in range(length):
                        lower.add(t[:i] + t[i + 1 :])
        total = sum(len(v) for v in by_len.values())
        if max_simplices is not None and total > max_simplices:
            raise BudgetExceeded(f"{name}: {total} simplices exceed budget {max_simplices}")
        top = max(by_len) if by_len else 0
        ids: list[tuple[str, ...]] = []
        labels: list[tuple[tuple[str, ...], ...]] = []
        faces: list[tuple[tuple[int, ...], ...]] = []
        prev_index: dict[tuple[str, ...], int] = {}
        for length in range(1, top + 1):
            keyed = sorted((simplex_id(t), t) for t in by_len.get(length, ()))
            if length > 1 and not keyed:
                break
            ids.append(tuple(k for k, _ in keyed))
            labels.append(tuple(t for _, t in keyed))
            if length == 1:
                faces.append(tuple(() for _ in keyed))
            else:
                try:
                    faces.append(
                        tuple(
                            tuple(prev_index[t[:i] + t[i + 1 :]] for i in range(length))
                            for _, t in keyed
                        )
                    )
                except KeyError as exc:
                    raise ComplexError(f"{name}: missing face {exc.args[0]!r}") from None
            prev_index = {t: j for j, (_, t) in enumerate(keyed)}
        faces_t = tuple(faces)
        regular = all(len(set(f)) == len(f) for deg in faces_t[1:] for f in deg)
        return cls(name, tuple(ids), faces_t, regular, tuple(labels))

    @classmethod
    def empty(cls, name: str = "empty") -> "SemiSimplicialSet":
        return cls(name, (), (), True, ())

    def renamed(self, name: str) -> "SemiSimplicialSet":
        return SemiSimplicialSet(name, self.ids, self.faces, self.regular, self.labels)

    # JSON ------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "regular": self.regular,
            "degrees": [{"q": q, "simplices": list(d)} for q, d in enumerate(self.ids)],
            "faces": [
                {"q": q, "simplex": sid, "i": i, "face": self.ids[q - 1][f]}
                for q in range(1, len(self.ids))
                for sid, fs in zip(self.ids[q], self.faces[q])
                for i, f in enumerate(fs)
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SemiSimplicialSet":
        degrees = sorted(data.get("degrees", []), key=lambda d: d["q"])
        ids = []
        for expected, d in enumerate(degrees):
            if d["q"] != expected:
                raise ComplexError(f"degree list skips q={expected}")
            ids.append(tuple(sorted(d["simplices"])))
        index = [{s: j for j, s in enumerate(deg)} for deg in ids]
        face_table: list[list[list[int | None]]] = [
            [[None] * (q + 1) for _ in deg] if q > 0 else [[] for _ in deg]
            for q, deg in enumerate(ids)
        ]
        for entry in data.get("faces", []):
            q, i = entry["q"], entry["i"]
            try:
                j = index[q][entry["simplex"]]
                f = index[q - 1][entry["face"]]
            except (IndexError, KeyError):
                raise ComplexError(f"face entry references unknown simplex: {entry}") from None
            if not 0 <= i <= q:
                raise ComplexError(f"face index {i} out of range in degree {q}")
            face_table[q][j][i] = f
        for q in range(1, len(ids)):
            for j, fs in enumerate(face_table[q]):
                if any(f is None for f in fs):
                    raise ComplexError(f"simplex {ids[q][j]!r} lacks some faces")
        faces = tuple(tuple(tuple(fs) for fs in deg) for deg in face_table)
        labels = None
        if all(s.startswith("(") and s.endswith(")") for deg in ids for s in deg):
            labels = _labels_from_ids(ids, faces)
        return cls(data.get("name", "complex"), tuple(ids), faces, bool(data.get("regular", False)), labels)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def loads(cls, text: str) -> "SemiSimplicialSet":
        return cls.from_json(json.loads(text))


def split_top_level(text: str) -> list[str]:
    """Split the inside of a parenthesised id at depth-zero commas."""
    inner = text[1:-1]
    if not inner:
        return []
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(inner):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(inner[start:k])
            start = k + 1
    parts.append(inner[start:])
    return parts


def _labels_from_ids(ids, faces):
    labels = []
    for q, deg in enumerate(ids):
        row = []
        for j, sid in enumerate(deg):
            parts = tuple(split_top_level(sid))
            if len(parts) != q + 1:
                return None
            if q > 0:
                for i, f in enumerate(faces[q][j]):
                    if simplex_id(parts[:i] + parts[i + 1 :]) != ids[q - 1][f]:
                        return None
            row.append(parts)
        labels.append(tuple(row))
    return tuple(labels)


@dataclass(frozen=True)
class ValidationReport:
    identity_violations: tuple[str, ...] = ()
    regularity_violations: tuple[str, ...] = ()
    structural_errors: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not (self.identity_violations or self.regularity_violations or self.structural_errors)

    def problems(self) -> list[str]:
        return [*self.structural_errors, *self.identity_violations, *self.regularity_violations]


def validate(X: SemiSimplicialSet) -> ValidationReport:
    """Check d_i d_j = d_{j-1} d_i for i < j, index ranges and regularity."""
    identity, regularity, structural = [], [], []
    if len(X.faces) != len(X.ids):
        structural.append("face table and simplex table have different lengths")
        return ValidationReport((), (), tuple(structural))
    for q in range(1, len(X.ids)):
        lower = len(X.ids[q - 1])
        for j, fs in enumerate(X.faces[q]):
            sid = X.ids[q][j]
            if len(fs) != q + 1 or any(not 0 <= f < lower for f in fs):
                structural.append(f"{sid}: malformed face list")
                continue
            if X.regular and len(set(fs)) != len(fs):
                regularity.append(f"{sid}: repeated codimension-1 face")
            if q < 2:
                continue
            for i in range(q + 1):
                for k in range(i + 1, q + 1):
                    a = X.faces[q - 1][fs[k]][i]
                    b = X.faces[q - 1][fs[i]][k - 1]
                    if a != b:
                        identity.append(f"{sid}: d{i}d{k} != d{k - 1}d{i}")
    return ValidationReport(tuple(identity), tuple(regularity), tuple(structural))


# ---------------------------------------------------------------------------
# ordered simplicial complexes


@dataclass(frozen=True, eq=False)
class OrderedSimplicialComplex:
    """Vertex sets closed under nonempty subsets; each simplex stored as a
    tuple sorted by ``vertices`` (a linear extension of the vertex order)."""

    name: str
    vertices: tuple[str, ...]
    simplices: frozenset[tuple[str, ...]]

    @cached_property
    def rank(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    @classmethod
    def from_facets(cls, name: str, vertices: Sequence[str], facets: Iterable[Iterable[str]]):
        vertices = tuple(vertices)
        rank = {v: k for k, v in enumerate(vertices)}
        out: set[tuple[str, ...]] = set()
        for facet in facets:
            f = tuple(sorted(set(facet), key=rank.__getitem__))
            if not f or f in out:
                continue
            for r in range(1, len(f) + 1):
                out.update(itertools.combinations(f, r))
        used = {v for s in out for v in s}
        return cls(name, tuple(v for v in vertices if v in used), frozenset(out))

    def normalize(self, simplex: Iterable[str]) -> tuple[str, ...]:
        try:
            return tuple(sorted(set(simplex), key=self.rank.__getitem__))
        except KeyError as exc:
            raise ComplexError(f"unknown vertex {exc.args[0]!r}") from None

    def __contains__(self, simplex) -> bool:
        try:
            return self.normalize(simplex) in self.simplices
        except ComplexError:
            return False

    @property
    def dim(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    @cached_property
    def sset(self) -> SemiSimplicialSet:
        return SemiSimplicialSet.from_tuples(self.name, self.simplices, close=False)

    def facets(self) -> list[tuple[str, ...]]:
        by_vertex: dict[str, list[tuple[str, ...]]] = {}
        for s in self.simplices:
            by_vertex.setdefault(s[0], []).append(s)
        out = []
        for s in self.simplices:
            ss = set(s)
            if not any(len(t) > len(s) and ss.issubset(t) for t in self.simplices):
                out.append(s)
        return sorted(out)


# ---------------------------------------------------------------------------
# posets


@dataclass(frozen=True, eq=False)
class Poset:
    """A finite strict partial order given by generating relations x < y.

    ``up[x]`` lists elements known to be above x (typically covers); the full
    order is the transitive closure, computed lazily.
    """

    name: str
    elements: tuple[str, ...]
    up: Mapping[str, frozenset[str]]

    @classmethod
    def from_relation(cls, name: str, elements: Iterable[str], less: Iterable[tuple[str, str]]):
        elems = tuple(sorted(set(elements)))
        known = set(elems)
        up: dict[str, set[str]] = {e: set() for e in elems}
        for a, b in less:
            if a not in known or b not in known:
                raise ComplexError(f"relation {a!r} < {b!r} uses unknown element")
            if a == b:
                raise ComplexError(f"relation {a!r} < {a!r} is not irreflexive")
            up[a].add(b)
        poset = cls(name, elems, {e: frozenset(s) for e, s in up.items()})
        poset._topological()  # raises on cycles
        return poset

    @classmethod
    def from_key(cls, name: str, elements: Iterable[str], less) -> "Poset":
        elems = sorted(set(elements))
        return cls.from_relation(name, elems, [(a, b) for a in elems for b in elems if a != b and less(a, b)])

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.up

    def _topological(self) -> list[str]:
        indeg = {e: 0 for e in self.elements}
        for e in self.elements:
            for b in self.up[e]:
                indeg[b] += 1
        stack = [e for e in self.elements if indeg[e] == 0]
        order = []
        while stack:
            e = stack.pop()
            order.append(e)
            for b in self.up[e]:
                indeg[b] -= 1
                if indeg[b] == 0:
                    stack.append(b)
        if len(order) != len(self.elements):
            raise ComplexError(f"{self.name}: relation has a cycle (not antisymmetric)")
        return order

    @cached_property
    def _above(self) -> dict[str, frozenset[str]]:
        above: dict[str, frozenset[str]] = {}
        for e in reversed(self._topological()):
            acc = set(self.up[e])
            for b in self.up[e]:
                acc |= above[b]
            above[e] = frozenset(acc)
        return above

    @cached_property
    def _below(self) -> dict[str, frozenset[str]]:
        below: dict[str, set[str]] = {e: set() for e in self.elements}
        for e, ups in self._above.items():
            for b in ups:
                below[b].add(e)
        return {e: frozenset(s) for e, s in below.items()}

    def above(self, x: str) -> frozenset[str]:
        return self._above[x]

    def below(self, x: str) -> frozenset[str]:
        return self._below[x]

    def less(self, a: str, b: str) -> bool:
        return b in self._above[a]

    def leq(self, a: str, b: str) -> bool:
        return a == b or self.less(a, b)

    def comparable(self, a: str, b: str) -> bool:
        return a == b or self.less(a, b) or self.less(b, a)

    @cached_property
    def covers(self) -> dict[str, frozenset[str]]:
        """Hasse diagram: y covers x."""
        # When every generating relation climbs exactly one level of the longest-chain
        # height, no generator can be implied by a longer path, so the generators are the covers.
        height: dict[str, int] = {}
        for e in self._topological():
            height.setdefault(e, 0)
            for b in self.up[e]:
                height[b] = max(height.get(b, 0), height[e] + 1)
        if all(height[b] == height[e] + 1 for e in self.elements for b in self.up[e]):
            return dict(self.up)
        out = {}
        for x in self.elements:
            ups = self._above[x]
            out[x] = frozenset(y for y in ups if not any(y in self._above[z] for z in ups))
        return out

    def relation_count(self) -> int:
        return sum(len(s) for s in self._above.values())

    def subposet(self, keep: Iterable[str], name: str | None = None) -> "Poset":
        keep_set = set(keep)
        missing = keep_set - set(self.elements)
        if missing:
            raise ComplexError(f"subposet elements not in {self.name}: {sorted(missing)[:3]}")
        return Poset(
            name or f"{self.name}|sub",
            tuple(e for e in self.elements if e in keep_set),
            {e: frozenset(self._above[e] & keep_set) for e in keep_set},
        )

    def maximal_chain_length(self) -> int:
        """Number of elements in a longest chain."""
        height: dict[str, int] = {}
        for e in reversed(self._topological()):
            height[e] = 1 + max((height[b] for b in self.up[e]), default=0)
        return max(height.values(), default=0)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "elements": list(self.elements),
            "covers": [[x, y] for x in self.elements for y in sorted(self.covers[x])],
        }


def same_order(F: Poset, G: Poset, mapping: Mapping[str, str] | None = None) -> bool:
    """True iff ``mapping`` (identity by default) is an order isomorphism."""
    mapping = mapping or {e: e for e in F.elements}
    if len(F) != len(G) or set(mapping) != set(F.elements):
        return False
    if set(mapping.values()) != set(G.elements):
        return False
    return all({mapping[y] for y in F.covers[x]} == G.covers[mapping[x]] for x in F.elements)


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class Chain:
    degree: int
    coeffs: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: Fraction(v) for k, v in sorted(self.coeffs.items()) if v != 0}
        object.__setattr__(self, "coeffs", clean)
        if self.degree < -1:
            raise ComplexError("chain degree below -1")
        if self.degree == -1 and any(k != AUGMENTATION_ID for k in clean):
            raise ComplexError("degree -1 chains live on the augmentation generator only")

    def norm(self) -> Fraction:
        return sum((abs(v) for v in self.coeffs.values()), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Chain") -> "Chain":
        if other.degree != self.degree:
            raise ComplexError("adding chains of different degrees")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Chain(self.degree, out)

    def __neg__(self) -> "Chain":
        return Chain(self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, a) -> "Chain":
        return Chain(self.degree, {k: v * a for k, v in self.coeffs.items()})

    def to_json(self) -> dict:
        return {"q": self.degree, "coeffs": [[k, format_rational(v)] for k, v in self.coeffs.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Chain":
        out: dict[str, Fraction] = {}
        for k, v in data["coeffs"]:
            out[k] = out.get(k, 0) + Fraction(v)
        return cls(int(data["q"]), out)


def check_chain(X: SemiSimplicialSet, c: Chain) -> None:
    for sid in c.coeffs:
        if c.degree == -1:
            continue
        if not X.contains(c.degree, sid):
            raise ComplexError(f"{sid!r} is not a {c.degree}-simplex of {X.name}")


def boundary(X: SemiSimplicialSet, c: Chain, *, reduced: bool = True) -> Chain:
    """Alternating face sum; degree-0 chains map to the augmentation."""
    check_chain(X, c)
    if c.degree == -1:
        raise ComplexError("no boundary below the augmentation")
    if c.degree == 0:
        if not reduced:
            return Chain(-1, {})
        return Chain(-1, {AUGMENTATION_ID: sum(c.coeffs.values(), Fraction(0))})
    out: dict[str, Fraction] = {}
    q = c.degree
    for sid, v in c.coeffs.items():
        fs = X.faces[q][X.index(q, sid)]
        for i, f in enumerate(fs):
            key = X.ids[q - 1][f]
            out[key] = out.get(key, 0) + (v if i % 2 == 0 else -v)
    return Chain(q - 1, out)


# ---------------------------------------------------------------------------
# sparse matrices


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Column-sparse matrix; entries are ints or Fractions."""

    nrows: int
    cols: tuple[Mapping[int, int | Fraction], ...]

    @property
    def ncols(self) -> int:
        return len(self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @classmethod
    def from_columns(cls, nrows: int, cols: Iterable[Mapping[int, int | Fraction]]):
        return cls(nrows, tuple({r: v for r, v in c.items() if v != 0} for c in cols))

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, tuple({j: 1} for j in range(n)))

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, tuple({} for _ in range(ncols)))

    def apply(self, vec: Mapping[int, int | Fraction]) -> dict[int, int | Fraction]:
        out: dict[int, int | Fraction] = {}
        for j, a in vec.items():
            if a == 0:
                continue
            for r, v in self.cols[j].items():
                out[r] = out.get(r, 0) + a * v
        return {r: v for r, v in out.items() if v != 0}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if other.nrows != self.ncols:
            raise ComplexError(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseMatrix(self.nrows, tuple(self.apply(c) for c in other.cols))

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if other.shape != self.shape:
            raise ComplexError("shape mismatch in addition")
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            for r, v in b.items():
                c[r] = c.get(r, 0) + v
            cols.append({r: v for r, v in c.items() if v != 0})
        return SparseMatrix(self.nrows, tuple(cols))

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.nrows, tuple({r: -v for r, v in c.items()} for c in self.cols))

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def norm(self) -> Fraction:
        """Operator norm for l1: the maximal column l1 sum."""
        return max((sum((abs(Fraction(v)) for v in c.values()), Fraction(0)) for c in self.cols), default=Fraction(0))

    def to_dense(self) -> list[list[int | Fraction]]:
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for r, v in c.items():
                rows[r][j] = v
        return rows

    def restrict(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMatrix":
        pos = {r: k for k, r in enumerate(rows)}
        return SparseMatrix(
            len(rows),
            tuple({pos[r]: v for r, v in self.cols[j].items() if r in pos} for j in cols),
        )


def boundary_matrix(X: SemiSimplicialSet, q: int) -> SparseMatrix:
    """Signed face incidences of the q-simplices (columns) in degree q-1."""
    if not 1 <= q <= X.dim:
        raise ComplexError(f"degree {q} outside 1..{X.dim}")
    cols = []
    for fs in X.faces[q]:
        col: dict[int, int] = {}
        for i, f in enumerate(fs):
            col[f] = col.get(f, 0) + (1 if i % 2 == 0 else -1)
        cols.append({r: v for r, v in col.items() if v})
    return SparseMatrix(X.count(q - 1), tuple(cols))


def augmentation_matrix(X: SemiSimplicialSet) -> SparseMatrix:
    return SparseMatrix(1, tuple({0: 1} for _ in range(X.count(0))))


# ---------------------------------------------------------------------------
# pairs and chain-complex views


@dataclass(frozen=True, eq=False)
class PairComplex:
    total: SemiSimplicialSet
    sub: SemiSimplicialSet

    def __post_init__(self):
        problems = pair_problems(self.total, self.sub)
        if problems:
            raise ComplexError("; ".join(problems[:5]))

    def in_sub(self, q: int, sid: str) -> bool:
        return self.sub.contains(q, sid)


def pair_problems(total: SemiSimplicialSet, sub: SemiSimplicialSet) -> list[str]:
    out = []
    for q in range(len(sub.ids)):
        for j, sid in enumerate(sub.ids[q]):
            if not total.contains(q, sid):
                out.append(f"{sid!r} not in total")
                continue
            if q == 0:
                continue
            tf = [total.ids[q - 1][f] for f in total.faces[q][total.index(q, sid)]]
            sf = [sub.ids[q - 1][f] for f in sub.faces[q][j]]
            if tf != sf:
                out.append(f"{sid!r}: faces differ between sub and total")
    for q in range(1, len(total.ids)):
        for sid, fs in zip(total.ids[q], total.faces[q]):
            if sub.contains(q, sid):
                for f in fs:
                    if not sub.contains(q - 1, total.ids[q - 1][f]):
                        out.append(f"sub not face-closed at {sid!r}")
    return out


def subcomplex(X: SemiSimplicialSet, keep: Iterable[tuple[int, str]] | Mapping[int, Iterable[str]], name: str | None = None) -> SemiSimplicialSet:
    """The sub-semi-simplicial set on the given simplices (must be face-closed)."""
    if isinstance(keep, Mapping):
        wanted = {q: set(v) for q, v in keep.items()}
    else:
        wanted = {}
        for q, sid in keep:
            wanted.setdefault(q, set()).add(sid)
    ids, faces, labels = [], [], []
    positions: list[dict[int, int]] = []
    for q in range(len(X.ids)):
        keep_q = [j for j, s in enumerate(X.ids[q]) if s in wanted.get(q, ())]
        if not keep_q and q > 0:
            break
        pos = {j: k for k, j in enumerate(keep_q)}
        ids.append(tuple(X.ids[q][j] for j in keep_q))
        if q == 0:
            faces.append(tuple(() for _ in keep_q))
        else:
            try:
                faces.append(tuple(tuple(positions[-1][f] for f in X.faces[q][j]) for j in keep_q))
            except KeyError:
                raise ComplexError("subcomplex selection is not face-closed") from None
        if X.labels is not None:
            labels.append(tuple(X.labels[q][j] for j in keep_q))
        positions.append(pos)
    if ids and not ids[0]:
        ids, faces, labels = [], [], []
    return SemiSimplicialSet(
        name or f"{X.name}|sub",
        tuple(ids),
        tuple(faces),
        X.regular,
        tuple(labels) if X.labels is not None else None,
    )


@dataclass(frozen=True, eq=False)
class ChainComplexView:
    """Based chain complex: ``bases[q]`` ids and ``d[q]``: C_q -> C_{q-1}.

    Reduced views carry degree -1 with the single augmentation generator.
    Relative views keep only simplices outside the subcomplex.
    """

    name: str
    bases: Mapping[int, tuple[str, ...]]
    d: Mapping[int, SparseMatrix]
    kind: str = "reduced"

    def basis(self, q: int) -> tuple[str, ...]:
        return self.bases.get(q, ())

    def dim(self, q: int) -> int:
        return len(self.bases.get(q, ()))

    def boundary(self, q: int) -> SparseMatrix:
        """∂_q: C_q -> C_{q-1}, zero matrix outside the stored range."""
        if q in self.d:
            return self.d[q]
        return SparseMatrix.zero(self.dim(q - 1), self.dim(q))

    @cached_property
    def _pos(self) -> dict[int, dict[str, int]]:
        return {q: {s: k for k, s in enumerate(b)} for q, b in self.bases.items()}

    def position(self, q: int, sid: str) -> int:
        try:
            return self._pos[q][sid]
        except KeyError:
            raise ComplexError(f"{sid!r} is not a basis element in degree {q} of {self.name}") from None

    def vector(self, c: Chain) -> dict[int, Fraction]:
        return {self.position(c.degree, k): v for k, v in c.coeffs.items()}

    def chain(self, q: int, vec: Mapping[int, int | Fraction]) -> Chain:
        basis = self.basis(q)
        return Chain(q, {basis[r]: Fraction(v) for r, v in vec.items() if v != 0})

    @property
    def top(self) -> int:
        return max((q for q, b in self.bases.items() if b), default=-1)


def chain_complex(X: SemiSimplicialSet, *, reduced: bool = True) -> ChainComplexView:
    bases = {q: X.ids[q] for q in range(len(X.ids))}
    d = {q: boundary_matrix(X, q) for q in range(1, len(X.ids))}
    if reduced:
        if X.count(0) == 0:
            raise ComplexError("augmentation of an empty complex")
        bases[-1] = (AUGMENTATION_ID,)
        d[0] = augmentation_matrix(X)
    return ChainComplexView(X.name, bases, d, "reduced" if reduced else "unreduced")


def reduced_augmentation(X: SemiSimplicialSet) -> ChainComplexView:
    return chain_complex(X, reduced=True)


def relative_complex(P: PairComplex) -> ChainComplexView:
    X, Y = P.total, P.sub
    keep = {q: [j for j, s in enumerate(X.ids[q]) if not Y.contains(q, s)] for q in range(len(X.ids))}
    bases = {q: tuple(X.ids[q][j] for j in keep[q]) for q in keep}
    d = {q: boundary_matrix(X, q).restrict(keep[q - 1], keep[q]) for q in range(1, len(X.ids))}
    return ChainComplexView(f"{X.name}/{Y.name}", bases, d, "relative")


def relative_split(P: PairComplex, c: Chain) -> Chain:
    """Representative of the coset c + C(sub) supported off sub (norm preserving)."""
    check_chain(P.total, c)
    return Chain(c.degree, {k: v for k, v in c.coeffs.items() if not P.sub.contains(c.degree, k)})


def iter_chunks(it: Iterable, size: int) -> Iterator[list]:
    it = iter(it)
    while chunk := list(itertools.islice(it, size)):
        yield chunk
