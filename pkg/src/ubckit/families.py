"""Concrete complexes over finite rings: unimodular sequences, split
injections, Tits buildings of types A and C, quadratic modules and the
hyperbolic split-injection complexes."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .builders import ord_construction, poset_link
from .core import (
    BudgetExceeded,
    ComplexError,
    OrderedSimplicialComplex,
    Poset,
    SemiSimplicialSet,
    same_order,
    simplex_id,
)
from .homology import HomologyProfile, rank_of_columns

DEFAULT_MAX_VERTICES = 100_000
DEFAULT_MAX_SIMPLICES = 1_000_000

Vector = tuple[int, ...]


def prime_factors(m: int) -> tuple[int, ...]:
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return tuple(out)


@dataclass(frozen=True)
class FiniteRing:
    """ℤ/m, or the prime field F_p when ``field`` is set (then m = p)."""

    modulus: int
    field: bool = False

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be at least 2")
        if self.field and prime_factors(self.modulus) != (self.modulus,):
            raise ValueError(f"F_{self.modulus}: modulus is not prime")

    @classmethod
    def zmod(cls, m: int) -> "FiniteRing":
        return cls(m, prime_factors(m) == (m,))

    @classmethod
    def prime_field(cls, p: int) -> "FiniteRing":
        return cls(p, True)

    @property
    def name(self) -> str:
        return f"F{self.modulus}" if self.field else f"Z{self.modulus}"

    @property
    def stable_rank(self) -> int:
        return 1

    @property
    def primes(self) -> tuple[int, ...]:
        return prime_factors(self.modulus)

    @property
    def elements(self) -> range:
        return range(self.modulus)

    def is_unit(self, a: int) -> bool:
        return all(a % p for p in self.primes)

    def vectors(self, n: int) -> Iterator[Vector]:
        return itertools.product(range(self.modulus), repeat=n)


def vector_label(v: Sequence[int]) -> str:
    return ".".join(str(x) for x in v)


def parse_vector(label: str) -> Vector:
    return tuple(int(x) for x in label.split("."))


# ---------------------------------------------------------------------------
# linear algebra mod p


def _echelon_insert(basis: dict[int, list[int]], v: Sequence[int], p: int) -> bool:
    """Reduce v against an echelon basis mod p; insert and return True if independent."""
    w = [x % p for x in v]
    for c, row in basis.items():
        if w[c]:
            f = w[c]
            w = [(a - f * b) % p for a, b in zip(w, row)]
    lead = next((c for c, x in enumerate(w) if x), None)
    if lead is None:
        return False
    inv = pow(w[lead], -1, p)
    w = [(x * inv) % p for x in w]
    for c, row in basis.items():
        if row[lead]:
            f = row[lead]
            basis[c] = [(a - f * b) % p for a, b in zip(row, w)]
    basis[lead] = w
    return True


def rank_mod_p(vectors: Iterable[Sequence[int]], p: int) -> int:
    basis: dict[int, list[int]] = {}
    return sum(_echelon_insert(basis, v, p) for v in vectors)


def rref(rows: Iterable[Sequence[int]], p: int) -> tuple[Vector, ...]:
    basis: dict[int, list[int]] = {}
    for v in rows:
        _echelon_insert(basis, v, p)
    return tuple(tuple(basis[c]) for c in sorted(basis))


def span(rows: Sequence[Sequence[int]], p: int) -> frozenset[Vector]:
    n = len(rows[0]) if rows else 0
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        out.add(tuple(sum(a * r[k] for a, r in zip(coeffs, rows)) % p for k in range(n)))
    return frozenset(out)


def kernel_mod_p(rows: Sequence[Sequence[int]], n: int, p: int) -> list[Vector]:
    """Basis of {x in F_p^n : r·x = 0 for every row r}."""
    R = rref(rows, p)
    pivots = [next(c for c, x in enumerate(r) if x) for r in R]
    free = [c for c in range(n) if c not in pivots]
    out = []
    for fcol in free:
        x = [0] * n
        x[fcol] = 1
        for r, pc in zip(R, pivots):
            x[pc] = (-r[fcol]) % p
        out.append(tuple(x))
    return out


# ---------------------------------------------------------------------------
# unimodular sequences


def is_unimodular(R: FiniteRing, n: int, vectors: Sequence[Sequence[int]]) -> bool:
    """True iff the n×k matrix of columns has a left inverse over R."""
    for v in vectors:
        if len(v) != n:
            raise ValueError(f"vector {tuple(v)} does not lie in R^{n}")
    k = len(vectors)
    if k > n:
        return False
    return all(rank_mod_p(vectors, p) == k for p in R.primes)


def left_inverse_exists(R: FiniteRing, n: int, vectors: Sequence[Sequence[int]]) -> bool:
    """Brute force over all k×n matrices B with B·A = I (the oracle)."""
    k, m = len(vectors), R.modulus
    for flat in itertools.product(range(m), repeat=k * n):
        B = [flat[i * n : (i + 1) * n] for i in range(k)]
        if all(
            sum(B[i][r] * vectors[j][r] for r in range(n)) % m == (1 if i == j else 0)
            for i in range(k)
            for j in range(k)
        ):
            return True
    return False


class _Extender:
    """Which vectors extend a unimodular sequence, memoised by span.

    A sequence over Z/m is unimodular iff its reduction mod every prime p | m is
    linearly independent, so a frame is the tuple of its spans mod each prime and
    the admissible next vectors depend only on that tuple.
    """

    def __init__(self, R: FiniteRing, universe: Sequence[Vector]):
        self.primes = R.primes
        self.universe = list(universe)
        self.reduced = {p: [tuple(x % p for x in v) for v in self.universe] for p in self.primes}
        self._cache: dict[tuple, list[tuple[Vector, tuple]]] = {}

    def root(self, N: int) -> tuple:
        zero = tuple(0 for _ in range(N))
        return tuple(frozenset([zero]) for _ in self.primes)

    @staticmethod
    def _grow(span: frozenset, w: Vector, p: int) -> frozenset:
        return frozenset(tuple((a + c * b) % p for a, b in zip(u, w)) for u in span for c in range(p))

    def step(self, frame: tuple, v: Vector) -> tuple | None:
        new = []
        for p, span in zip(self.primes, frame):
            w = tuple(x % p for x in v)
            if w in span:
                return None
            new.append(self._grow(span, w, p))
        return tuple(new)

    def successors(self, frame: tuple) -> list[tuple[Vector, tuple]]:
        hit = self._cache.get(frame)
        if hit is None:
            hit = []
            children: dict[tuple, tuple] = {}
            for k, v in enumerate(self.universe):
                ws = tuple(self.reduced[p][k] for p in self.primes)
                if any(w in span for w, span in zip(ws, frame)):
                    continue
                child = children.get(ws)
                if child is None:
                    child = children[ws] = tuple(self._grow(s, w, p) for s, w, p in zip(frame, ws, self.primes))
                hit.append((v, child))
            self._cache[frame] = hit
        return hit


SHAPES = ("all", "affine", "union")


@dataclass(frozen=True)
class UnimodularPosetSpec:
    """Sequences of distinct vectors from a universe X ⊆ R^N followed by a fixed suffix.

    shape "all": X = R^n (N = n); "affine": X = R^n + δe_{n+1} (N = n+1);
    "union": X = (R^n + δe_{n+1}) ∪ (R^n + δe_{n+1} + e_{n+2}) (N = n+2).
    """

    ring: FiniteRing
    n: int
    shape: str = "all"
    delta: int = 0
    suffix: tuple[Vector, ...] = ()

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}")
        for v in self.suffix:
            if len(v) != self.ambient:
                raise ValueError(f"suffix vector {v} not in R^{self.ambient}")

    @property
    def ambient(self) -> int:
        return self.n + {"all": 0, "affine": 1, "union": 2}[self.shape]

    def universe(self) -> list[Vector]:
        m, d = self.ring.modulus, self.delta % self.ring.modulus
        base = list(self.ring.vectors(self.n))
        if self.shape == "all":
            return base
        if self.shape == "affine":
            return [v + (d,) for v in base]
        return [v + (d, 0) for v in base] + [v + (d, 1) for v in base]


def unimodular_sequences(spec: UnimodularPosetSpec, max_elements: int = DEFAULT_MAX_VERTICES) -> list[tuple[Vector, ...]]:
    ext = _Extender(spec.ring, spec.universe())
    frame = ext.root(spec.ambient)
    for v in spec.suffix:
        frame = ext.step(frame, v)
        if frame is None:
            warnings.warn(f"suffix {spec.suffix} is not unimodular; the poset is empty")
            return []
    out: list[tuple[Vector, ...]] = []
    stack: list[tuple[tuple[Vector, ...], tuple]] = [((), frame)]
    while stack:
        seq, fr = stack.pop()
        for v, nf in ext.successors(fr):
            new = seq + (v,)
            out.append(new)
            if len(out) > max_elements:
                raise BudgetExceeded(f"more than {max_elements} unimodular sequences")
            stack.append((new, nf))
    return out


def sequence_label(seq: Sequence[Vector]) -> str:
    return simplex_id([vector_label(v) for v in seq])


def unimodular_poset(spec: UnimodularPosetSpec, max_elements: int = DEFAULT_MAX_VERTICES) -> Poset:
    """Nonempty admissible sequences ordered by the subsequence relation."""
    seqs = unimodular_sequences(spec, max_elements)
    labels = {s: sequence_label(s) for s in seqs}
    up: dict[str, set[str]] = {lab: set() for lab in labels.values()}
    for s, lab in labels.items():
        if len(s) > 1:
            for i in range(len(s)):
                up[labels[s[:i] + s[i + 1 :]]].add(lab)
    name = f"U({spec.ring.name}^{spec.n},{spec.shape})"
    return Poset(name, tuple(sorted(up)), {k: frozenset(v) for k, v in up.items()})


def split_injection_tuples(R: FiniteRing, n: int) -> Iterator[tuple[Vector, ...]]:
    """Unimodular tuples of R^n, shortest first."""
    ext = _Extender(R, R.vectors(n))
    level = [((), ext.root(n))]
    while level:
        nxt = []
        for seq, fr in level:
            for v, nf in ext.successors(fr):
                yield seq + (v,)
                nxt.append((seq + (v,), nf))
        level = nxt


def split_injection_complex(R: FiniteRing, n: int, max_simplices: int = DEFAULT_MAX_SIMPLICES) -> SemiSimplicialSet:
    """p-simplices are unimodular (p+1)-frames; face i drops the i-th vector."""
    tuples = []
    for t in split_injection_tuples(R, n):
        tuples.append(tuple(vector_label(v) for v in t))
        if len(tuples) > max_simplices:
            raise BudgetExceeded(f"split-injection complex over {R.name}^{n} exceeds {max_simplices} simplices")
    X = SemiSimplicialSet.from_tuples(f"X({R.name}^{n})", tuples, close=False)
    return X


def split_injection_betti(R: FiniteRing, n: int, max_q: int) -> HomologyProfile:
    """Reduced Betti numbers of the split-injection complex up to ``max_q``.

    Columns of the top boundary needed are streamed and elimination stops
    once the rank reaches the nullity below, so the top degree is never
    materialised in full.
    """
    index: dict[int, dict[tuple[Vector, ...], int]] = {}
    stream = split_injection_tuples(R, n)
    pending: tuple[Vector, ...] | None = None

    def degree_tuples(q):
        nonlocal pending
        out = []
        if pending is not None and len(pending) == q + 1:
            out.append(pending)
            pending = None
        for t in stream:
            if len(t) != q + 1:
                pending = t
                break
            out.append(t)
        return out

    def columns(q, tuples):
        rows = index[q - 1]
        for t in tuples:
            col: dict[int, int] = {}
            for i in range(len(t)):
                r = rows[t[:i] + t[i + 1 :]]
                col[r] = col.get(r, 0) + (-1) ** i
            yield col

    def streamed_columns(q):
        nonlocal pending
        rows = index[q - 1]
        if pending is not None and len(pending) == q + 1:
            first, pending = pending, None
            yield from columns(q, [first])
        for t in stream:
            if len(t) != q + 1:
                pending = t
                return
            yield from columns(q, [t])

    verts = degree_tuples(0)
    if not verts:
        return HomologyProfile(tuple(0 for _ in range(max_q + 1)), False)
    index[0] = {t: j for j, t in enumerate(verts)}
    dims = {0: len(verts)}
    ranks = {0: 1}
    betti = []
    for q in range(0, max_q + 1):
        nullity = dims[q] - ranks[q]
        if q + 1 <= max_q:
            tuples = degree_tuples(q + 1)
            index[q + 1] = {t: j for j, t in enumerate(tuples)}
            dims[q + 1] = len(tuples)
            ranks[q + 1] = rank_of_columns(columns(q + 1, tuples))
        else:
            ranks[q + 1] = rank_of_columns(streamed_columns(q + 1), cap=nullity)
        betti.append(nullity - ranks[q + 1])
    return HomologyProfile(tuple(betti), True)


@dataclass(frozen=True)
class StreamedSdCheck:
    sequences: int
    max_chain_length: int
    isomorphic: bool


def streamed_sd_check(R: FiniteRing, n: int) -> StreamedSdCheck:
    """Sd(split-injection complex) ≅ U(R^n) without building either poset.

    U is enumerated depth-first and X breadth-first. The identity on labels is
    an order isomorphism iff both enumerations agree and every one-vector
    deletion of an element is again an element, because those deletions are
    exactly the covers on both sides.
    """
    U = set(unimodular_sequences(UnimodularPosetSpec(R, n), max_elements=10**9))
    seen = 0
    longest = 0
    ok = True
    for t in split_injection_tuples(R, n):
        seen += 1
        longest = max(longest, len(t))
        if t not in U or any(t[:i] + t[i + 1 :] not in U for i in range(len(t)) if len(t) > 1):
            ok = False
            break
    return StreamedSdCheck(len(U), longest, ok and seen == len(U))


# ---------------------------------------------------------------------------
# Tits buildings


def subspace_label(rows: Sequence[Sequence[int]]) -> str:
    return "|".join(vector_label(r) for r in rows)


def parse_subspace(label: str) -> tuple[Vector, ...]:
    return tuple(parse_vector(r) for r in label.split("|"))


def rref_subspaces(p: int, n: int, k: int) -> Iterator[tuple[Vector, ...]]:
    """Every k-dimensional subspace of F_p^n, once, as its reduced echelon basis."""
    for pivots in itertools.combinations(range(n), k):
        slots = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for values in itertools.product(range(p), repeat=len(slots)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), val in zip(slots, values):
                rows[i][c] = val
            yield tuple(tuple(r) for r in rows)


@dataclass(frozen=True, eq=False)
class SubspacePoset(Poset):
    """Poset of subspaces of F_p^N labelled by reduced echelon bases."""

    p: int = 2
    N: int = 0

    def basis(self, x: str) -> tuple[Vector, ...]:
        return parse_subspace(x)

    def dimension(self, x: str) -> int:
        return len(parse_subspace(x))

    def vectors(self, x: str) -> frozenset[Vector]:
        return span(parse_subspace(x), self.p)


def _subspace_poset(name: str, p: int, N: int, spaces: list[tuple[Vector, ...]]) -> SubspacePoset:
    labels = [subspace_label(s) for s in spaces]
    vecs = {lab: span(s, p) for lab, s in zip(labels, spaces)}
    dims = {lab: len(s) for lab, s in zip(labels, spaces)}
    up: dict[str, set[str]] = {lab: set() for lab in labels}
    for a in labels:
        for b in labels:
            if dims[a] + 1 == dims[b] and vecs[a] < vecs[b]:
                up[a].add(b)
    return SubspacePoset(name, tuple(sorted(labels)), {k: frozenset(v) for k, v in up.items()}, p, N)


def tits_building_A(p: int, n: int) -> SubspacePoset:
    """Proper nonzero subspaces of F_p^n ordered by inclusion."""
    if n < 2:
        raise ValueError("the type A building needs n >= 2")
    if prime_factors(p) != (p,):
        raise ValueError(f"{p} is not prime")
    spaces = [s for k in range(1, n) for s in rref_subspaces(p, n, k)]
    return _subspace_poset(f"T_A(F{p},{n})", p, n, spaces)


def symplectic_form(x: Sequence[int], y: Sequence[int], n: int, p: int) -> int:
    return sum(x[i] * y[n + i] - x[n + i] * y[i] for i in range(n)) % p


def tits_building_C(p: int, n: int) -> SubspacePoset:
    """Nonzero isotropic subspaces of (F_p^{2n}, standard symplectic form)."""
    if n < 1:
        raise ValueError("the type C building needs n >= 1")
    spaces = [
        s
        for k in range(1, n + 1)
        for s in rref_subspaces(p, 2 * n, k)
        if all(symplectic_form(a, b, n, p) == 0 for a, b in itertools.combinations(s, 2))
    ]
    return _subspace_poset(f"T_C(F{p},{n})", p, 2 * n, spaces)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class FiltrationStep:
    r: int
    added: tuple[str, ...]
    link_kinds: dict[str, str]
    cone_apexes: dict[str, str]


@dataclass(frozen=True)
class SolomonTitsFiltration:
    line: str
    stages: tuple[Poset, ...]
    steps: tuple[FiltrationStep, ...]

    @property
    def exhaustive(self) -> bool:
        return bool(self.stages)


def poset_cone_point(F: Poset) -> str | None:
    """An element comparable with every other element (its order complex is a cone)."""
    for x in F.elements:
        if len(F.above(x)) + len(F.below(x)) + 1 == len(F):
            return x
    return None


def solomon_tits_filtration(T: SubspacePoset, line: str) -> SolomonTitsFiltration:
    """Q_0 = subspaces containing ℓ; Q_r adds subspaces of dimension ≤ r avoiding ℓ.

    For each subspace P added at stage r+1 the link of P in Q_r is computed;
    it must be a cone for r ≠ n−2 and isomorphic to the building of F^{n−1}
    (via coordinates in the echelon basis of P) for r = n−2.
    """
    n, p = T.N, T.p
    if line not in T or T.dimension(line) != 1:
        raise ComplexError(f"{line!r} is not a line of {T.name}")
    lvecs = T.vectors(line)
    contains = {x: lvecs <= T.vectors(x) for x in T.elements}
    stage_sets = [{x for x in T.elements if contains[x]}]
    for r in range(1, n):
        stage_sets.append(stage_sets[0] | {x for x in T.elements if not contains[x] and T.dimension(x) <= r})
    stages = tuple(T.subposet(s, name=f"Q{r}") for r, s in enumerate(stage_sets))
    smaller = tits_building_A(p, n - 1) if n - 1 >= 2 else None
    steps = []
    for r in range(0, n - 1):
        added = tuple(sorted(stage_sets[r + 1] - stage_sets[r]))
        kinds, apexes = {}, {}
        for P in added:
            lk = poset_link(stages[r], P, ambient=T).lk
            apex = poset_cone_point(lk)
            if apex is not None:
                kinds[P], apexes[P] = "cone", apex
            elif r == n - 2 and _is_building_of(T, P, lk, smaller):
                kinds[P] = "building"
            else:
                kinds[P] = "other"
        steps.append(FiltrationStep(r, added, kinds, apexes))
    return SolomonTitsFiltration(line, stages, tuple(steps))


def _coordinates(basis: Sequence[Vector], v: Vector, p: int) -> Vector:
    k = len(basis)
    for coeffs in itertools.product(range(p), repeat=k):
        if tuple(sum(a * b[i] for a, b in zip(coeffs, basis)) % p for i in range(len(v))) == tuple(v):
            return coeffs
    raise ComplexError(f"{v} not in the span")


def _is_building_of(T: SubspacePoset, P: str, lk: Poset, smaller: Poset | None) -> bool:
    basis = T.basis(P)
    if smaller is None:
        return len(lk) == 0 and len(basis) == 1
    mapping = {}
    for U in lk.elements:
        coords = [_coordinates(basis, v, T.p) for v in T.basis(U)]
        mapping[U] = subspace_label(rref(coords, T.p))
    return same_order(lk, smaller, mapping)


# ---------------------------------------------------------------------------
# quadratic modules


@dataclass(frozen=True)
class FormParameter:
    epsilon: int
    Lambda: frozenset[int]

    def problems(self, R: FiniteRing) -> list[str]:
        m, e = R.modulus, self.epsilon % R.modulus
        out = []
        if self.epsilon not in (1, -1):
            out.append("epsilon must be +1 or -1")
        lam = {a % m for a in self.Lambda}
        if 0 not in lam or any((a + b) % m not in lam for a in lam for b in lam):
            out.append("Lambda is not an additive subgroup")
        lower = {(a - e * a) % m for a in R.elements}
        upper = {a for a in R.elements if (a + e * a) % m == 0}
        if not lower <= lam:
            out.append("Lambda misses some a - εa")
        if not lam <= upper:
            out.append("Lambda contains some a with a + εa ≠ 0")
        return out

    @classmethod
    def symplectic(cls, R: FiniteRing) -> "FormParameter":
        return cls(-1, frozenset(R.elements))

    @classmethod
    def quadratic(cls, R: FiniteRing) -> "FormParameter":
        return cls(1, frozenset({0}))


@dataclass(frozen=True, eq=False)
class QuadraticModule:
    """R^rank with Gram matrix of λ and μ on the standard basis."""

    ring: FiniteRing
    fp: FormParameter
    gram: tuple[tuple[int, ...], ...]
    mu_basis: tuple[int, ...]
    name: str = "M"

    @property
    def rank(self) -> int:
        return len(self.gram)

    def lam(self, x: Sequence[int], y: Sequence[int]) -> int:
        m = self.ring.modulus
        return sum(x[i] * self.gram[i][j] * y[j] for i in range(self.rank) for j in range(self.rank)) % m

    def reduce(self, a: int) -> int:
        """Canonical representative of a + Λ."""
        m = self.ring.modulus
        return min((a + l) % m for l in self.fp.Lambda)

    def mu(self, x: Sequence[int]) -> int:
        total = sum(x[i] * x[i] * self.mu_basis[i] for i in range(self.rank))
        total += sum(x[i] * x[j] * self.gram[i][j] for i in range(self.rank) for j in range(i + 1, self.rank))
        return self.reduce(total % self.ring.modulus)

    @cached_property
    def outside_hypotheses(self) -> bool:
        """2 is not a unit: the characteristic-2 situation excluded by the acyclicity theorems."""
        return not self.ring.is_unit(2)

    def is_nondegenerate(self) -> bool:
        return self.ring.is_unit(_det_mod(self.gram, self.ring.modulus))

    def problems(self) -> list[str]:
        out = list(self.fp.problems(self.ring))
        m, e = self.ring.modulus, self.fp.epsilon
        for i in range(self.rank):
            for j in range(self.rank):
                if (self.gram[i][j] - e * self.gram[j][i]) % m:
                    out.append(f"λ is not ε-symmetric at ({i},{j})")
        return out

    def vectors(self) -> Iterator[Vector]:
        return self.ring.vectors(self.rank)


def _det_mod(M: Sequence[Sequence[int]], m: int) -> int:
    n = len(M)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= M[i][perm[i]]
        total += (-1) ** inv * prod
    return total % m


def hyperbolic_module(fp: FormParameter, R: FiniteRing, n: int) -> QuadraticModule:
    """H^{⊕n}: blocks λ(e,f) = 1, λ(f,e) = ε, μ(e) = μ(f) = 0."""
    bad = fp.problems(R)
    if bad:
        raise ValueError("invalid form parameter: " + "; ".join(bad))
    m = R.modulus
    gram = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        gram[2 * i][2 * i + 1] = 1
        gram[2 * i + 1][2 * i] = fp.epsilon % m
    return QuadraticModule(R, fp, tuple(tuple(r) for r in gram), tuple(0 for _ in range(2 * n)), f"H^{n}({R.name})")


def zero_module(fp: FormParameter, R: FiniteRing) -> QuadraticModule:
    return QuadraticModule(R, fp, (), (), "0")


Morphism = tuple[Vector, Vector]


def morphism_label(h: Morphism) -> str:
    return f"{vector_label(h[0])}|{vector_label(h[1])}"


def hyperbolic_vertices(M: QuadraticModule, max_vertices: int = DEFAULT_MAX_VERTICES) -> list[Morphism]:
    """Pairs (e', f') realising a morphism H → M."""
    if M.rank == 0:
        return []
    m = M.ring.modulus
    iso = [x for x in M.vectors() if M.mu(x) == M.reduce(0) and M.lam(x, x) == 0]
    out = []
    for e in iso:
        for f in iso:
            if M.lam(e, f) == 1 and M.lam(f, e) == M.fp.epsilon % m:
                out.append((e, f))
                if len(out) > max_vertices:
                    raise BudgetExceeded(f"more than {max_vertices} hyperbolic vertices")
    return out


def orthogonal(M: QuadraticModule, h: Morphism, k: Morphism) -> bool:
    return all(M.lam(x, y) == 0 and M.lam(y, x) == 0 for x in h for y in k)


def is_morphism(M: QuadraticModule, images: Sequence[Morphism]) -> bool:
    """Does e_i ↦ images[i][0], f_i ↦ images[i][1] preserve λ and μ on H^{⊕g}?"""
    H = hyperbolic_module(M.fp, M.ring, len(images))
    flat = [v for h in images for v in h]
    zero = M.reduce(0)
    for a in range(len(flat)):
        if M.mu(flat[a]) != zero:
            return False
        for b in range(len(flat)):
            if M.lam(flat[a], flat[b]) != H.gram[a][b] % M.ring.modulus:
                return False
    return True


@dataclass(frozen=True, eq=False)
class HyperbolicComplexes:
    module: QuadraticModule
    vertices: tuple[Morphism, ...]
    ordered: SemiSimplicialSet
    unordered: OrderedSimplicialComplex


def _orthogonality_graph(M: QuadraticModule, verts: Sequence[Morphism]) -> nx.Graph:
    G = nx.Graph()
    labels = [morphism_label(h) for h in verts]
    G.add_nodes_from(labels)
    for (a, ha), (b, hb) in itertools.combinations(zip(labels, verts), 2):
        if orthogonal(M, ha, hb):
            G.add_edge(a, b)
    return G


def hyperbolic_split_injection_complex(
    M: QuadraticModule,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
) -> HyperbolicComplexes:
    """X^M from morphisms H^{⊕(p+1)} → M, and S^M from orthogonal vertex sets."""
    verts = hyperbolic_vertices(M, max_vertices)
    labels = [morphism_label(h) for h in verts]
    by_label = dict(zip(labels, verts))
    G = _orthogonality_graph(M, verts)
    cliques = []
    for c in nx.enumerate_all_cliques(G):
        cliques.append(tuple(sorted(c)))
        if len(cliques) > max_simplices:
            raise BudgetExceeded(f"S^M exceeds {max_simplices} simplices")
    S = OrderedSimplicialComplex(f"S({M.name})", tuple(sorted(labels)), frozenset(cliques))
    tuples: list[tuple[str, ...]] = []
    stack: list[tuple[str, ...]] = [(lab,) for lab in labels]
    while stack:
        t = stack.pop()
        if not is_morphism(M, [by_label[x] for x in t]):
            continue
        tuples.append(t)
        if len(tuples) > max_simplices:
            raise BudgetExceeded(f"X^M exceeds {max_simplices} simplices")
        stack.extend(t + (x,) for x in G.neighbors(t[-1]) if x not in t)
    X = SemiSimplicialSet.from_tuples(f"X({M.name})", tuples, close=False)
    return HyperbolicComplexes(M, tuple(verts), X, S)


def witt_index(M: QuadraticModule, max_nodes: int = 1_000_000) -> int:
    """Largest g admitting a morphism H^{⊕g} → M, by depth-first search in
    successive orthogonal complements."""
    verts = hyperbolic_vertices(M)
    visited = 0

    def search(cands: list[Morphism]) -> int:
        nonlocal visited
        best = 0
        for i, h in enumerate(cands):
            visited += 1
            if visited > max_nodes:
                raise BudgetExceeded("Witt index search exceeded its budget")
            rest = [k for k in cands[i + 1 :] if orthogonal(M, h, k)]
            best = max(best, 1 + search(rest))
        return best

    return search(verts)


def orthogonal_complement(M: QuadraticModule, h: Morphism) -> tuple[QuadraticModule, tuple[Vector, ...]]:
    """h(H)^⊥ as a quadratic module on a basis (fields only), with that basis."""
    if not M.ring.field:
        raise ComplexError("orthogonal complements are computed over fields only")
    p, n = M.ring.modulus, M.rank
    rows = []
    for v in h:
        rows.append(tuple(sum(v[i] * M.gram[i][j] for i in range(n)) % p for j in range(n)))
        rows.append(tuple(sum(M.gram[j][i] * v[i] for i in range(n)) % p for j in range(n)))
    basis = tuple(kernel_mod_p(rows, n, p))
    gram = tuple(tuple(M.lam(a, b) for b in basis) for a in basis)
    mu = tuple(M.mu(a) for a in basis)
    return QuadraticModule(M.ring, M.fp, gram, mu, f"{M.name}⊥"), basis


def link_matches_complement(M: QuadraticModule, h: Morphism) -> bool:
    """Compare the link of h in S^M with S of h(H)^⊥ pushed into M."""
    from .builders import link

    cx = hyperbolic_split_injection_complex(M)
    lk = link(cx.unordered, [morphism_label(h)])
    comp, basis = orthogonal_complement(M, h)
    inner = hyperbolic_split_injection_complex(comp).unordered
    p = M.ring.modulus

    def push(label: str) -> str:
        e, f = (parse_vector(part) for part in label.split("|"))
        img = []
        for coords in (e, f):
            img.append(tuple(sum(c * b[i] for c, b in zip(coords, basis)) % p for i in range(M.rank)))
        return morphism_label((img[0], img[1]))

    pushed = {tuple(sorted(push(v) for v in s)) for s in inner.simplices}
    return pushed == set(lk.simplices)


def ord_matches_ordered(cx: HyperbolicComplexes) -> bool:
    """ord(S^M) and X^M have the same simplices and face maps."""
    O = ord_construction(cx.unordered)
    X = cx.ordered
    return O.ids == X.ids and O.faces == X.faces
