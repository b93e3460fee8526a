"""Linear programming: an exact rational simplex method with Bland's rule, and
floating-point l1 fillings accepted only with an exact optimality certificate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog


class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


@dataclass(frozen=True)
class LPSolution:
    value: Fraction
    x: tuple[Fraction, ...]
    duals: tuple[Fraction, ...]
    basis: tuple[int, ...]
    pivots: int


def simplex_from_basis(
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
    basis: Sequence[int],
    max_pivots: int = 1_000_000,
    _keep_tableau: bool = False,
) -> LPSolution:
    """Minimise c·x subject to A x = b, x ≥ 0, starting from a basis whose
    columns of A form the identity and with b ≥ 0.

    Bland's rule (lowest index enters, lowest basic index leaves on ties)
    guarantees termination.  ``duals`` are y with y·A ≤ c and y·b = value.
    """
    m = len(A)
    n = len(c)
    T = [[Fraction(v) for v in row] for row in A]
    rhs = [Fraction(v) for v in b]
    if any(v < 0 for v in rhs):
        raise ValueError("starting basis is not feasible")
    basis = list(basis)
    start = list(basis)
    for i, j in enumerate(basis):
        if T[i][j] != 1 or any(T[k][j] != 0 for k in range(m) if k != i):
            raise ValueError("starting basis columns are not the identity")
    cost = [Fraction(v) for v in c]
    red = cost[:]
    obj = Fraction(0)
    for i, j in enumerate(basis):
        cj = cost[j]
        if cj:
            row = T[i]
            for k in range(n):
                if row[k]:
                    red[k] -= cj * row[k]
            obj += cj * rhs[i]
    pivots = 0
    while True:
        enter = next((j for j in range(n) if red[j] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise Unbounded("objective unbounded below")
        piv = T[leave][enter]
        prow = T[leave]
        if piv != 1:
            prow = [v / piv for v in prow]
            T[leave] = prow
            rhs[leave] /= piv
        nz = [k for k in range(n) if prow[k]]
        for i in range(m):
            if i == leave:
                continue
            f = T[i][enter]
            if f:
                row = T[i]
                for k in nz:
                    row[k] -= f * prow[k]
                rhs[i] -= f * rhs[leave]
        f = red[enter]
        for k in nz:
            red[k] -= f * prow[k]
        obj += f * rhs[leave]
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("pivot budget exhausted")
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = rhs[i]
    duals = tuple(cost[j] - red[j] for j in start)
    solution = LPSolution(obj, tuple(x), duals, tuple(basis), pivots)
    if _keep_tableau:
        return solution, T, rhs
    return solution


def solve_standard_form(
    A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]
) -> LPSolution:
    """Two-phase exact simplex for min c·x, A x = b, x ≥ 0."""
    m = len(A)
    n = len(c)
    rows, rhs = [], []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        rows.append([Fraction(sign * v) for v in A[i]] + [Fraction(int(k == i)) for k in range(m)])
        rhs.append(Fraction(sign * b[i]))
    phase1, T, R = simplex_from_basis(
        rows, rhs, [Fraction(0)] * n + [Fraction(1)] * m, list(range(n, n + m)), _keep_tableau=True
    )
    if phase1.value != 0:
        raise Infeasible("no feasible point")
    basis = list(phase1.basis)
    keep = []
    for i, j in enumerate(basis):
        if j >= n:
            enter = next((k for k in range(n) if T[i][k] != 0), None)
            if enter is None:
                continue  # redundant constraint
            T, R = _pivot(T, R, i, enter)
            basis[i] = enter
        keep.append(i)
    return simplex_from_basis([T[i][:n] for i in keep], [R[i] for i in keep], c, [basis[i] for i in keep])


def _pivot(T, R, i, j):
    piv = T[i][j]
    T = [list(r) for r in T]
    R = list(R)
    T[i] = [v / piv for v in T[i]]
    R[i] /= piv
    for k in range(len(T)):
        if k != i and T[k][j]:
            f = T[k][j]
            T[k] = [a - f * b for a, b in zip(T[k], T[i])]
            R[k] -= f * R[i]
    return T, R


def _rationalize(values, max_den: int) -> list[Fraction]:
    return [Fraction(float(v)).limit_denominator(max_den) for v in values]


def certified_l1_fill(
    cols: Sequence[Mapping[int, int | Fraction]],
    nrows: int,
    target: Mapping[int, Fraction],
    max_den: int = 10_000,
) -> tuple[Fraction, list[Fraction], list[Fraction]] | None:
    """min ‖x‖₁ subject to D x = target, solved in floating point and certified exactly.

    The HiGHS primal and dual are rounded to nearby rationals; the result is
    returned only if D x = target holds exactly, |Dᵀy| ≤ 1 holds exactly and
    y·target = ‖x‖₁, which together prove optimality.  Returns None otherwise.
    """
    n = len(cols)
    if n == 0:
        return None
    data, ri, ci = [], [], []
    for j, col in enumerate(cols):
        for r, v in col.items():
            data.append(float(v))
            ri.append(r)
            ci.append(j)
    D = sparse.csc_matrix((data, (ri, ci)), shape=(nrows, n))
    b = np.zeros(nrows)
    for r, v in target.items():
        b[r] = float(v)
    res = linprog(
        np.ones(2 * n), A_eq=sparse.hstack([D, -D]).tocsc(), b_eq=b, bounds=(0, None), method="highs"
    )
    if res.status != 0:
        return None
    x = [p - q for p, q in zip(_rationalize(res.x[:n], max_den), _rationalize(res.x[n:], max_den))]
    y = _rationalize(res.eqlin.marginals, max_den)
    value = sum(map(abs, x), Fraction(0))
    lhs: dict[int, Fraction] = {}
    for j, col in enumerate(cols):
        if x[j]:
            for r, v in col.items():
                lhs[r] = lhs.get(r, 0) + x[j] * v
    if {r: v for r, v in lhs.items() if v} != {r: Fraction(v) for r, v in target.items() if v}:
        return None
    for col in cols:
        if abs(sum((y[r] * v for r, v in col.items()), Fraction(0))) > 1:
            return None
    if sum((y[r] * Fraction(v) for r, v in target.items()), Fraction(0)) != value:
        return None
    return value, x, y
