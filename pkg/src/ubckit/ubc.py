"""Exact l1-minimal fillings and uniform boundary condition constants."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx
import numpy as np

from .builders import HomotopyCertificate
from .core import (
    Chain,
    ChainComplexView,
    ComplexError,
    PairComplex,
    SemiSimplicialSet,
    boundary,
    chain_complex,
    check_chain,
    relative_complex,
    relative_split,
)
from .homology import matrix_rank
from .lp import certified_l1_fill, simplex_from_basis

INF = math.inf
DEFAULT_MAX_CIRCUITS = 100_000
DEFAULT_SAMPLES = 200


class NotABoundary(ValueError):
    """The chain is not in the image of the next boundary map."""


@dataclass(frozen=True)
class FillResult:
    witness: Chain
    fill_norm: Fraction
    target: Chain
    residual: Chain | None = None
    dual: tuple[Fraction, ...] = ()
    method: str = "lp"


@dataclass(frozen=True)
class UbcMeasurement:
    degree: int
    mode: str
    value: Fraction | float
    attaining_cycle: Chain | None = None
    sample_count: int = 0
    seed: int | None = None
    downgraded: bool = False
    circuits: int = 0
    method: str = ""

    def to_json(self) -> dict:
        from .core import format_rational

        return {
            "degree": self.degree,
            "mode": self.mode,
            "value": "inf" if self.value == INF else format_rational(self.value),
            "attaining_cycle": self.attaining_cycle.to_json() if self.attaining_cycle else None,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "downgraded": self.downgraded,
            "circuits": self.circuits,
            "method": self.method,
        }


# ---------------------------------------------------------------------------
# linear algebra for fillings


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass
class _Reduction:
    """Gauss–Jordan data for D (m×n): E·D = R with R in reduced echelon form."""

    m: int
    n: int
    pivot_cols: list[int]
    R_rows: list[dict[int, Fraction]]
    E_rows: list[dict[int, Fraction]]  # first r rows solve, the rest test consistency


def _gauss_jordan(cols: Sequence[Mapping[int, int]], m: int) -> _Reduction:
    n = len(cols)
    D_rows: list[dict[int, Fraction]] = [dict() for _ in range(m)]
    for j, col in enumerate(cols):
        for r, v in col.items():
            D_rows[r][j] = Fraction(v)
    E_rows: list[dict[int, Fraction]] = [{r: Fraction(1)} for r in range(m)]
    where: dict[int, set[int]] = {}
    for r, row in enumerate(D_rows):
        for j in row:
            where.setdefault(j, set()).add(r)
    used: set[int] = set()
    order: list[int] = []
    pivots: list[int] = []
    for j in range(n):
        cand = [r for r in where.get(j, ()) if r not in used]
        if not cand:
            continue
        r = min(cand, key=lambda r: (abs(D_rows[r][j]) != 1, len(D_rows[r]), r))
        piv = D_rows[r][j]
        if piv != 1:
            D_rows[r] = {k: v / piv for k, v in D_rows[r].items()}
            E_rows[r] = {k: v / piv for k, v in E_rows[r].items()}
        prow, perow = D_rows[r], E_rows[r]
        for s in list(where.get(j, ())):
            if s == r:
                continue
            f = D_rows[s][j]
            row = D_rows[s]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    if k not in row:
                        where.setdefault(k, set()).add(s)
                    row[k] = nv
                else:
                    if k in row:
                        del row[k]
                        where[k].discard(s)
            erow = E_rows[s]
            for k, v in perow.items():
                nv = erow.get(k, 0) - f * v
                if nv:
                    erow[k] = nv
                else:
                    erow.pop(k, None)
        used.add(r)
        order.append(r)
        pivots.append(j)
    rest = [r for r in range(m) if r not in used]
    return _Reduction(m, n, pivots, [D_rows[r] for r in order], [E_rows[r] for r in order + rest])


class FillSolver:
    """Minimal l1 fillings for ∂_{q+1} of a chain-complex view.

    A particular solution comes from the echelon form; the kernel of ∂_{q+1}
    is parametrised by its free columns.  With a kernel of dimension 0 the
    filling is unique; with dimension 1 the optimum is a weighted median,
    evaluated in closed form; otherwise a floating LP is tried and kept only
    when its rounded primal and dual certify each other exactly, with the
    exact simplex method as the fallback.
    """

    def __init__(self, view: ChainComplexView, q: int):
        self.view = view
        self.q = q
        self.D = view.boundary(q + 1)
        self.m, self.n = self.D.nrows, self.D.ncols
        red = _gauss_jordan(self.D.cols, self.m)
        self.red = red
        self.rank = len(red.pivot_cols)
        free = [j for j in range(self.n) if j not in set(red.pivot_cols)]
        self.kernel: list[list[Fraction]] = []
        for fcol in free:
            z = [Fraction(0)] * self.n
            z[fcol] = Fraction(1)
            for i, pc in enumerate(red.pivot_cols):
                v = red.R_rows[i].get(fcol)
                if v:
                    z[pc] = -v
            self.kernel.append(z)

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel)

    def _solve_rows(self, target: Mapping[int, Fraction]) -> list[Fraction]:
        vals = []
        for erow in self.red.E_rows:
            acc = Fraction(0)
            for k, v in erow.items():
                t = target.get(k)
                if t:
                    acc += v * t
            vals.append(acc)
        if any(vals[self.rank :]):
            raise NotABoundary("chain is not a boundary")
        return vals[: self.rank]

    def particular(self, target: Mapping[int, Fraction]) -> list[Fraction]:
        x = [Fraction(0)] * self.n
        for pc, v in zip(self.red.pivot_cols, self._solve_rows(target)):
            x[pc] = v
        return x

    def solve(self, target: Mapping[int, int | Fraction]) -> tuple[Fraction, list[Fraction], tuple[Fraction, ...], str]:
        target = {k: Fraction(v) for k, v in target.items() if v}
        if not target:
            return Fraction(0), [Fraction(0)] * self.n, (), "zero"
        if self.kernel_dim == 0:
            x = self.particular(target)
            return sum(map(abs, x), Fraction(0)), x, (), "unique"
        if self.kernel_dim == 1:
            x0 = self.particular(target)
            z = self.kernel[0]
            best, best_t = None, Fraction(0)
            for j, zj in enumerate(z):
                if zj:
                    t = -x0[j] / zj
                    val = sum((abs(a + t * b) for a, b in zip(x0, z)), Fraction(0))
                    if best is None or val < best:
                        best, best_t = val, t
            x = [a + best_t * b for a, b in zip(x0, z)]
            return best, x, (), "median"
        self._solve_rows(target)  # raises unless target is a boundary
        fast = certified_l1_fill(self.D.cols, self.m, target)
        if fast is not None:
            value, x, y = fast
            return value, x, tuple(y), "lp-certified"
        return self._lp(target)

    def _lp(self, target):
        rhs = self._solve_rows(target)
        r, n = self.rank, self.n
        rows, b, basis, signs = [], [], [], []
        for i in range(r):
            s = -1 if rhs[i] < 0 else 1
            plus = [Fraction(0)] * n
            for k, v in self.red.R_rows[i].items():
                plus[k] = s * v
            rows.append(plus + [-v for v in plus])
            b.append(s * rhs[i])
            pc = self.red.pivot_cols[i]
            basis.append(pc if s > 0 else n + pc)
            signs.append(s)
        sol = simplex_from_basis(rows, b, [Fraction(1)] * (2 * n), basis)
        x = [sol.x[j] - sol.x[n + j] for j in range(n)]
        # duals w.r.t. the sign-adjusted echelon rows; pull back to C_q
        y = [0] * self.m
        for i in range(r):
            coeff = sol.duals[i] * signs[i]
            for k, v in self.red.E_rows[i].items():
                y[k] += coeff * v
        return sol.value, x, tuple(Fraction(v) for v in y), "lp"

    def dual_feasible(self, y: Sequence[Fraction]) -> bool:
        """|y·∂τ| ≤ 1 for every (q+1)-simplex τ."""
        return all(abs(sum((y[r] * v for r, v in col.items()), Fraction(0))) <= 1 for col in self.D.cols)

    def fill(self, c: Chain) -> FillResult:
        if c.degree != self.q:
            raise ComplexError(f"expected a degree-{self.q} chain")
        value, x, dual, method = self.solve(self.view.vector(c))
        witness = self.view.chain(self.q + 1, {j: v for j, v in enumerate(x) if v})
        return FillResult(witness, value, c, None, dual, method)


def _view_for(X: SemiSimplicialSet, q: int) -> ChainComplexView:
    if q < 0:
        raise ComplexError("fillings start in degree 0")
    return chain_complex(X, reduced=True)


def min_fill(X: SemiSimplicialSet, q: int, sigma: Chain) -> FillResult:
    """Minimal l1 chain ρ with ∂ρ = σ."""
    check_chain(X, sigma)
    if sigma.degree != q:
        raise ComplexError("degree mismatch")
    return FillSolver(_view_for(X, q), q).fill(sigma)


def relative_min_fill(P: PairComplex, q: int, sigma: Chain) -> FillResult:
    """Minimal ρ off the subcomplex with ∂ρ − σ supported in the subcomplex."""
    check_chain(P.total, sigma)
    if sigma.degree != q:
        raise ComplexError("degree mismatch")
    if q >= 1:
        bd = boundary(P.total, sigma, reduced=False)
        off = [k for k in bd.coeffs if not P.sub.contains(q - 1, k)]
        if off:
            raise ComplexError(f"boundary of σ leaves the subcomplex at {off[0]!r}")
    view = relative_complex(P)
    rep = relative_split(P, sigma)
    res = FillSolver(view, q).fill(rep)
    if res.witness.is_zero():
        residual = -sigma
    else:
        residual = boundary(P.total, res.witness, reduced=False) - sigma
    return FillResult(res.witness, res.fill_norm, sigma, residual, res.dual, res.method)


# ---------------------------------------------------------------------------
# circuits of the boundary space V = im ∂_{q+1} ⊆ C_q


def _graph_circuits(A, m: int, deadline: float | None = None) -> Iterator[dict[int, int]] | None:
    """Circuits of ker A when A is a signed incidence matrix (≤ 2 entries ±1,
    opposite signs when 2): simple cycles of the associated multigraph."""
    ground = ("ground",)
    G = nx.Graph()
    loops = []
    for j, col in enumerate(A.cols):
        items = list(col.items())
        if any(abs(v) != 1 for _, v in items) or len(items) > 2:
            return None
        if len(items) == 2 and items[0][1] == items[1][1]:
            return None
        if not items:
            loops.append(j)
            continue
        if len(items) == 1:
            (r, v), = items
            tail, head = (ground, ("n", r)) if v == 1 else (("n", r), ground)
        else:
            (r1, v1), (r2, v2) = items
            tail, head = (("n", r1), ("n", r2)) if v1 == -1 else (("n", r2), ("n", r1))
        mid = ("e", j)
        G.add_edge(tail, mid)
        G.add_edge(mid, head)
        G.nodes[mid]["ends"] = (tail, head)

    def gen():
        for j in loops:
            yield {j: 1}
        for cyc in nx.simple_cycles(G):
            _check(deadline)
            k = len(cyc)
            circuit = {}
            for idx, node in enumerate(cyc):
                if node[0] != "e":
                    continue
                prev, nxt = cyc[idx - 1], cyc[(idx + 1) % k]
                tail, head = G.nodes[node]["ends"]
                circuit[node[1]] = 1 if (prev, nxt) == (tail, head) else -1
            yield circuit

    return gen()


def _span_basis(vectors: list[list[Fraction]]):
    """Echelon form used for membership tests."""
    basis: list[tuple[int, list[Fraction]]] = []
    for v in vectors:
        _insert(basis, v)
    return basis


def _reduce(basis, v):
    w = list(v)
    for lead, row in basis:
        if w[lead]:
            f = w[lead]
            w = [a - f * b for a, b in zip(w, row)]
    return w


def _insert(basis, v) -> bool:
    w = _reduce(basis, v)
    lead = next((k for k, x in enumerate(w) if x), None)
    if lead is None:
        return False
    piv = w[lead]
    basis.append((lead, [x / piv for x in w]))
    return True


def _hyperplane_circuits(
    B_rows: list[list[Fraction]], k: int, budget: int, deadline: float | None = None
) -> Iterator[dict[int, Fraction]]:
    """Circuits of the column space of B (rows indexed by C_q basis): for each
    hyperplane of the row matroid, the vector B·x vanishing exactly there."""
    m = len(B_rows)
    nonzero = [i for i in range(m) if any(B_rows[i])]

    def closure(basis) -> frozenset[int]:
        return frozenset(i for i in nonzero if not any(_reduce(basis, B_rows[i])))

    if k == 1:
        x = [Fraction(1)]
        yield {i: B_rows[i][0] for i in nonzero}
        return
    seen: set[frozenset[int]] = set()
    frontier: list[tuple[frozenset[int], list]] = []
    for i in nonzero:
        basis = _span_basis([B_rows[i]])
        F = closure(basis)
        if F not in seen:
            seen.add(F)
            frontier.append((F, basis))
    for rank in range(1, k - 1):
        nxt = []
        for F, basis in frontier:
            for i in nonzero:
                if i in F:
                    continue
                _check(deadline)
                nb = list(basis)
                _insert(nb, B_rows[i])
                G = closure(nb)
                if G not in seen:
                    seen.add(G)
                    if len(seen) > budget * 10:
                        raise _Budget()
                    nxt.append((G, nb))
        frontier = nxt
    emitted = 0
    for F, _ in frontier:
        _check(deadline)
        rows = [B_rows[i] for i in sorted(F)]
        x = _nullvector(rows, k)
        vec = {}
        for i in nonzero:
            v = sum((a * b for a, b in zip(B_rows[i], x)), Fraction(0))
            if v:
                vec[i] = v
        emitted += 1
        if emitted > budget:
            raise _Budget()
        yield vec


def _nullvector(rows, k):
    basis = []
    for r in rows:
        _insert(basis, r)
    leads = {lead for lead, _ in basis}
    free = next(c for c in range(k) if c not in leads)
    # back-substitute into a fully reduced form
    full = []
    for lead, row in sorted(basis, key=lambda t: t[0]):
        full.append((lead, row))
    for idx in range(len(full) - 1, -1, -1):
        lead, row = full[idx]
        for jdx in range(idx):
            l2, r2 = full[jdx]
            if r2[lead]:
                f = r2[lead]
                full[jdx] = (l2, [a - f * b for a, b in zip(r2, row)])
    x = [Fraction(0)] * k
    x[free] = Fraction(1)
    for lead, row in full:
        x[lead] = -row[free]
    return x


class _Budget(Exception):
    pass


def _check(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise _Budget()


def _integral(vec: Mapping[int, Fraction]) -> dict[int, int]:
    den = 1
    for v in vec.values():
        den = _lcm(den, Fraction(v).denominator)
    out = {r: int(v * den) for r, v in vec.items()}
    g = 0
    for v in out.values():
        g = math.gcd(g, v)
    return {r: v // g for r, v in out.items()} if g > 1 else out


# ---------------------------------------------------------------------------
# batched evaluation of fill ratios


class _Evaluator:
    """Max of fill(c)/‖c‖ over a stream of circuits."""

    def __init__(self, solver: FillSolver, deadline: float | None = None):
        self.solver = solver
        self.deadline = deadline
        self.best: Fraction = Fraction(0)
        self.best_circuit: dict[int, int] | None = None
        self.count = 0
        s = solver
        self.fast = s.kernel_dim <= 1
        if self.fast:
            den = 1
            for erow in s.red.E_rows:
                for v in erow.values():
                    den = _lcm(den, v.denominator)
            self.L = den
            r = s.rank
            self.P = [[0] * s.m for _ in range(len(s.red.E_rows))]
            for i, erow in enumerate(s.red.E_rows):
                for k, v in erow.items():
                    self.P[i][k] = int(v * den)
            z = [Fraction(0)] * s.n
            if s.kernel_dim == 1:
                zz = s.kernel[0]
                zden = 1
                for v in zz:
                    zden = _lcm(zden, v.denominator)
                z = [int(v * zden) for v in zz]
            self.z = [int(v) for v in z]
            self.pivots = s.red.pivot_cols
            bound = max((abs(v) for row in self.P for v in row), default=1) * max(1, max(map(abs, self.z), default=1))
            self.bound = bound

    def feed(self, circuits: list[dict[int, int]]):
        if not circuits:
            return
        self.count += len(circuits)
        if not self.fast:
            for c in circuits:
                _check(self.deadline)
                self._exact(c)
            return
        s = self.solver
        width = max(sum(abs(v) for v in c.values()) for c in circuits)
        safe = self.bound * width * max(1, s.n) * max(1, max(map(abs, self.z), default=1)) < 2**62
        dtype = np.int64 if safe else object
        C = np.zeros((s.m, len(circuits)), dtype=dtype)
        for j, c in enumerate(circuits):
            for r, v in c.items():
                C[r, j] = v
        P = np.array(self.P, dtype=dtype).reshape(len(self.P), s.m)
        Y = P @ C  # rows: echelon rows, cols: circuits
        if s.rank < len(self.P) and np.any(Y[s.rank :] != 0):
            raise NotABoundary("an enumerated circuit is not a boundary")
        A = np.zeros((s.n, len(circuits)), dtype=dtype)
        if s.rank:
            A[self.pivots, :] = Y[: s.rank]
        norms = np.array([sum(abs(v) for v in c.values()) for c in circuits], dtype=float)
        if s.kernel_dim == 0:
            fills = np.abs(A).sum(axis=0).astype(float) / self.L
        else:
            z = np.array(self.z, dtype=dtype)
            fills = None
            for j in np.nonzero(z)[0]:
                val = np.abs(A * z[j] - np.outer(z, A[j])).sum(axis=0).astype(float) / (abs(int(z[j])) * self.L)
                fills = val if fills is None else np.minimum(fills, val)
        ratios = fills / norms
        top = ratios.max()
        for idx in np.nonzero(ratios >= top * (1 - 1e-9) - 1e-12)[0]:
            self._exact(circuits[int(idx)])

    def _exact(self, c: dict[int, int]):
        value, _, _, _ = self.solver.solve(c)
        ratio = value / sum(abs(v) for v in c.values())
        if self.best_circuit is None or ratio > self.best:
            self.best, self.best_circuit = ratio, c


def _chunks(it: Iterable, size: int) -> Iterator[list]:
    buf = []
    for x in it:
        buf.append(x)
        if len(buf) >= size:
            yield buf
            buf = []
    if buf:
        yield buf


# ---------------------------------------------------------------------------
# public measurements


def _make_view(X: SemiSimplicialSet, sub: SemiSimplicialSet | None) -> ChainComplexView:
    if sub is None:
        return chain_complex(X, reduced=True)
    return relative_complex(PairComplex(X, sub))


def ubc_view(
    view: ChainComplexView,
    q: int,
    *,
    max_circuits: int = DEFAULT_MAX_CIRCUITS,
    time_budget_sec: float | None = None,
    fallback_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> UbcMeasurement:
    """Exact q-UBC constant of a based chain complex by circuit enumeration."""
    start = time.monotonic()
    D = view.boundary(q + 1)
    rank_next = matrix_rank(D)
    if rank_next == 0:
        return UbcMeasurement(q, "exact", Fraction(0), None, method="empty")
    solver = FillSolver(view, q)
    deadline = None if time_budget_sec is None else start + time_budget_sec
    ev = _Evaluator(solver, deadline)

    def over_time():
        return deadline is not None and time.monotonic() > deadline

    try:
        if q == 0 and view.kind == "reduced":
            return _ubc_zero(view, solver)
        A = view.boundary(q)
        circuits = None
        exact_q = view.dim(q) - matrix_rank(A) == rank_next
        method = "graph-cycles"
        if exact_q:
            circuits = _graph_circuits(A, view.dim(q), deadline)
        if circuits is None:
            method = "hyperplanes"
            basis_cols = _independent_columns(D)
            B_rows = [[Fraction(D.cols[j].get(i, 0)) for j in basis_cols] for i in range(view.dim(q))]
            circuits = (_integral(c) for c in _hyperplane_circuits(B_rows, len(basis_cols), max_circuits, deadline))
        for chunk in _chunks(circuits, 4096):
            if ev.count + len(chunk) > max_circuits or over_time():
                raise _Budget()
            ev.feed(chunk)
    except _Budget:
        # the fallback gets a fresh allowance of the same length
        grace = None if time_budget_sec is None else time.monotonic() + time_budget_sec
        sampled = ubc_sampled_view(view, q, fallback_samples, seed, deadline=grace)
        return UbcMeasurement(
            q, "sampled", sampled.value, sampled.attaining_cycle, sampled.sample_count, seed, True, ev.count, "fallback"
        )
    cyc = view.chain(q, ev.best_circuit) if ev.best_circuit else None
    return UbcMeasurement(q, "exact", ev.best, cyc, circuits=ev.count, method=method)


def _independent_columns(D) -> list[int]:
    from .homology import rank_of_columns

    chosen, r = [], 0
    for j, col in enumerate(D.cols):
        if rank_of_columns([D.cols[k] for k in chosen] + [col]) > r:
            chosen.append(j)
            r += 1
    return chosen


def _ubc_zero(view: ChainComplexView, solver: FillSolver) -> UbcMeasurement:
    """Degree 0: circuits are v − u within a component; the fill is the graph distance."""
    D = view.boundary(1)
    G = nx.Graph()
    G.add_nodes_from(range(view.dim(0)))
    for col in D.cols:
        if len(col) == 2:
            a, b = col
            G.add_edge(a, b)
    best, pair, count = 0, None, 0
    for comp in nx.connected_components(G):
        sub = G.subgraph(comp)
        for u, dist in nx.all_pairs_shortest_path_length(sub):
            for v, d in dist.items():
                if u < v:
                    count += 1
                    if d > best:
                        best, pair = d, (u, v)
    if pair is None:
        return UbcMeasurement(0, "exact", Fraction(0), None, circuits=count, method="distances")
    u, v = pair
    circuit = {u: -1, v: 1}
    value, _, _, _ = solver.solve(circuit)
    if value != best:
        raise AssertionError("graph distance disagrees with the minimal filling")
    return UbcMeasurement(0, "exact", Fraction(best, 2), view.chain(0, circuit), circuits=count, method="distances")


def ubc_exact(
    X: SemiSimplicialSet,
    q: int,
    *,
    sub: SemiSimplicialSet | None = None,
    max_circuits: int = DEFAULT_MAX_CIRCUITS,
    time_budget_sec: float | None = None,
    fallback_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> UbcMeasurement:
    """Max over circuits c of im ∂_{q+1} of fill(c)/‖c‖ (relative when ``sub`` is given)."""
    if X.count(0) == 0:
        return UbcMeasurement(q, "exact", Fraction(0), None, method="empty")
    return ubc_view(
        _make_view(X, sub),
        q,
        max_circuits=max_circuits,
        time_budget_sec=time_budget_sec,
        fallback_samples=fallback_samples,
        seed=seed,
    )


def ubc_sampled_view(
    view: ChainComplexView, q: int, samples: int, seed: int, *, deadline: float | None = None
) -> UbcMeasurement:
    """Best ratio over random boundaries; stops early (after at least one draw) past ``deadline``."""
    if samples < 1:
        raise ValueError("samples must be positive")
    D = view.boundary(q + 1)
    if D.ncols == 0 or D.is_zero():
        return UbcMeasurement(q, "sampled", Fraction(0), None, samples, seed, method="empty")
    rng = np.random.default_rng(seed)
    solver = FillSolver(view, q)
    best, best_c = Fraction(0), None
    drawn = 0
    for _ in range(samples):
        if drawn and deadline is not None and time.monotonic() > deadline:
            break
        drawn += 1
        size = int(rng.integers(1, min(4, D.ncols) + 1))
        taus = rng.choice(D.ncols, size=size, replace=False)
        coeffs = rng.integers(-3, 4, size=size)
        sigma: dict[int, int] = {}
        for t, a in zip(taus, coeffs):
            for r, v in D.cols[int(t)].items():
                sigma[r] = sigma.get(r, 0) + int(a) * v
        sigma = {r: v for r, v in sigma.items() if v}
        if not sigma:
            continue
        value, _, _, _ = solver.solve(sigma)
        ratio = value / sum(abs(v) for v in sigma.values())
        if ratio > best or best_c is None:
            best, best_c = ratio, sigma
    cyc = view.chain(q, best_c) if best_c else None
    return UbcMeasurement(q, "sampled", best, cyc, drawn, seed, method="samples")


def ubc_sampled(X: SemiSimplicialSet, q: int, samples: int, seed: int, *, sub: SemiSimplicialSet | None = None) -> UbcMeasurement:
    """Lower bound from random boundaries ∂τ with coefficients in {−3,…,3} (PCG64 stream)."""
    return ubc_sampled_view(_make_view(X, sub), q, samples, seed)


def check_uniform_acyclicity(X: SemiSimplicialSet, n: int, K, **budget) -> bool:
    from .homology import is_n_acyclic

    if X.count(0) == 0:
        return False
    if n < 0:
        return True
    if not is_n_acyclic(X, n):
        return False
    return all(ubc_exact(X, q, **budget).value <= K for q in range(0, n + 1))


def transport_ubc(cert: HomotopyCertificate, q: int, K_other, *, rigorous: bool = False) -> Fraction | float:
    """UBC bound for the source of ``cert`` from a constant of its target:
    ‖H‖_q + ‖g‖·K·‖f‖_q, with ‖g‖ taken in degree q (or q+1 when ``rigorous``)."""
    if not cert.verified:
        raise ComplexError("certificate does not verify")
    if K_other == INF:
        return INF
    g_deg = q + 1 if rigorous else q
    return cert.Hs(q).norm() + cert.g_(g_deg).norm() * Fraction(K_other) * cert.f_(q).norm()
