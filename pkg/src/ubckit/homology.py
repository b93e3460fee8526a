"""Exact reduced and relative Betti numbers over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .core import (
    ChainComplexView,
    PairComplex,
    SemiSimplicialSet,
    SparseMatrix,
    chain_complex,
    relative_complex,
)


def _integral(col: Mapping[int, int | Fraction]) -> dict[int, int]:
    den = 1
    for v in col.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // gcd(den, v.denominator)
    return {r: int(v * den) for r, v in col.items() if v}


def _primitive(v: dict[int, int]) -> dict[int, int]:
    g = 0
    for x in v.values():
        g = gcd(g, x)
        if g == 1:
            return v
    return {r: x // g for r, x in v.items()} if g > 1 else v


def rank_of_columns(cols: Iterable[Mapping[int, int | Fraction]], cap: int | None = None) -> int:
    """Rank of a column stream by fraction-free column reduction.

    Each column is reduced against stored pivots keyed by their largest row
    until its largest row is fresh or it vanishes.  Stops early at ``cap``.
    """
    if cap is not None and cap <= 0:
        return 0
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for col in cols:
        v = _integral(col)
        while v:
            low = max(v)
            p = pivots.get(low)
            if p is None:
                break
            a, b = p[low], v[low]
            g = gcd(a, b)
            a, b = a // g, b // g
            if a == 1:
                new = dict(v)
            elif a == -1:
                new = {r: -x for r, x in v.items()}
            else:
                new = {r: a * x for r, x in v.items()}
            for r, x in p.items():
                y = new.get(r, 0) - b * x
                if y:
                    new[r] = y
                else:
                    new.pop(r, None)
            v = _primitive(new)
        if v:
            pivots[max(v)] = v
            rank += 1
            if cap is not None and rank >= cap:
                break
    return rank


def matrix_rank(M: SparseMatrix, cap: int | None = None) -> int:
    return rank_of_columns(M.cols, cap)


def bareiss_rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    """Dense fraction-free elimination; used as an independent oracle."""
    den = 1
    for row in rows:
        for v in row:
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
    A = [[int(v * den) for v in row] for row in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    rank, prev, r = 0, 1, 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                A[i][j] = (A[r][c] * A[i][j] - A[i][c] * A[r][j]) // prev
            A[i][c] = 0
        prev = A[r][c]
        r += 1
        rank += 1
        if r == m:
            break
    return rank


@dataclass(frozen=True)
class HomologyProfile:
    """Betti numbers ``betti[q]`` for q = 0..max_q (reduced or relative)."""

    betti: tuple[int, ...]
    nonempty: bool
    ranks: tuple[int, ...] = ()

    @property
    def max_q(self) -> int:
        return len(self.betti) - 1

    @property
    def acyclic_through(self) -> int:
        """Largest n with b_0..b_n all zero; -1 if only nonempty, -2 if empty."""
        if not self.nonempty:
            return -2
        n = -1
        for b in self.betti:
            if b:
                break
            n += 1
        return n

    def is_acyclic(self, n: int) -> bool:
        if n > self.max_q:
            raise ValueError(f"profile only reaches degree {self.max_q}")
        return self.acyclic_through >= n

    def to_json(self) -> dict:
        return {"reduced_betti": list(self.betti)}


def view_betti(view: ChainComplexView, max_q: int) -> HomologyProfile:
    """b_q = dim C_q - rank ∂_q - rank ∂_{q+1}, with early stopping."""
    lo = min(view.bases) if view.bases else 0
    ranks: dict[int, int] = {}
    betti = []
    for q in range(lo, max_q + 1):
        if q not in ranks:
            ranks[q] = matrix_rank(view.boundary(q)) if q > lo else 0
        nullity = view.dim(q) - ranks[q]
        ranks[q + 1] = matrix_rank(view.boundary(q + 1), cap=nullity)
        if q >= 0:
            betti.append(nullity - ranks[q + 1])
    return HomologyProfile(tuple(betti), True, tuple(ranks.get(q, 0) for q in range(0, max_q + 2)))


def reduced_betti(X: SemiSimplicialSet, max_q: int | None = None) -> HomologyProfile:
    if max_q is None:
        max_q = max(X.dim, 0)
    if X.count(0) == 0:
        return HomologyProfile(tuple(0 for _ in range(max_q + 1)), False)
    return view_betti(chain_complex(X, reduced=True), max_q)


def relative_betti(P: PairComplex, max_q: int | None = None) -> HomologyProfile:
    if max_q is None:
        max_q = max(P.total.dim, 0)
    return view_betti(relative_complex(P), max_q)


def is_n_acyclic(X: SemiSimplicialSet, n: int) -> bool:
    if X.count(0) == 0:
        return False
    if n < 0:
        return True
    return reduced_betti(X, n).acyclic_through >= n


def euler_consistent(X: SemiSimplicialSet) -> bool:
    """Alternating simplex count (with the -1 degree) equals alternating reduced Betti sum."""
    if X.count(0) == 0:
        return True
    prof = reduced_betti(X, X.dim)
    cells = -1 + X.euler_characteristic()
    return cells == sum((-1) ** q * b for q, b in enumerate(prof.betti))
