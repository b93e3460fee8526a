from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ubckit.builders import (
    boundary_simplex,
    cone,
    horn,
    identity_certificate,
    ord_construction,
    path,
    poset_retract,
    sd,
    sd_certificate,
    simplex,
)
from ubckit.calculus import k_retract_up, k_sd_down
from ubckit.core import Chain, OrderedSimplicialComplex, PairComplex, boundary
from ubckit.families import UnimodularPosetSpec, FiniteRing, unimodular_poset
from ubckit.builders import order_complex
from ubckit.ubc import (
    NotABoundary,
    check_uniform_acyclicity,
    min_fill,
    relative_min_fill,
    transport_ubc,
    ubc_exact,
    ubc_sampled,
)

SMALL = {
    "path4": path(4).sset,
    "triangle": simplex(2).sset,
    "sphere2": boundary_simplex(3).sset,
    "cone-circle": cone(boundary_simplex(2)).sset,
    "horn": horn(3, 1).sset,
    "sd-triangle": sd(simplex(2).sset),
    "ord-triangle": ord_construction(simplex(2)),
}


# minimal fillings


def test_zero_chain_fills_with_zero():
    res = min_fill(path(2).sset, 0, Chain(0, {}))
    assert res.fill_norm == 0 and res.witness.is_zero()


def test_endpoint_difference_on_path():
    X = path(2).sset
    sigma = Chain(0, {"(2)": 1, "(0)": -1})
    res = min_fill(X, 0, sigma)
    assert res.fill_norm == 2
    assert boundary(X, res.witness) == sigma


def test_circle_is_not_a_boundary():
    X = boundary_simplex(2).sset
    cycle = Chain(1, {"(0,1)": 1, "(1,2)": 1, "(0,2)": -1})
    assert boundary(X, cycle).is_zero()
    with pytest.raises(NotABoundary):
        min_fill(X, 1, cycle)


def _dual_certifies(X, q, res):
    """y with |y·∂τ| ≤ 1 for all τ and y·σ = value proves optimality."""
    if not res.dual:
        return True
    from ubckit.core import boundary_matrix

    D = boundary_matrix(X, q + 1)
    ids = X.ids[q]
    feasible = all(abs(sum(res.dual[r] * v for r, v in col.items())) <= 1 for col in D.cols)
    value = sum(res.dual[ids.index(k)] * v for k, v in res.target.coeffs.items())
    return feasible and value == res.fill_norm


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(sorted(SMALL)),
    st.integers(0, 1),
    st.lists(st.integers(-3, 3), min_size=1, max_size=12),
)
def test_min_fill_matches_floating_lp(name, q, coeffs):
    X = SMALL[name]
    if q + 1 >= len(X.ids):
        return
    taus = X.ids[q + 1]
    tau = Chain(q + 1, {t: a for t, a in zip(taus, coeffs)})
    sigma = boundary(X, tau)
    if sigma.is_zero():
        return
    res = min_fill(X, q, sigma)
    assert boundary(X, res.witness) == sigma
    assert res.fill_norm == res.witness.norm()
    assert float(res.fill_norm) == pytest.approx(oracles.lp_min_fill(X, q, sigma.coeffs), abs=1e-7)
    assert _dual_certifies(X, q, res)


def test_relative_fill_inside_subcomplex_is_free():
    X, Y = path(2).sset, path(1).sset
    sigma = Chain(0, {"(0)": 1, "(1)": -1})
    res = relative_min_fill(PairComplex(X, Y), 0, sigma)
    assert res.fill_norm == 0 and res.residual == -sigma


def test_relative_edge_has_no_filling():
    P = PairComplex(simplex(1).sset, boundary_simplex(1).sset)
    with pytest.raises(NotABoundary):
        relative_min_fill(P, 1, Chain(1, {"(0,1)": 1}))


def test_cone_pair_fillings_are_short():
    base = boundary_simplex(2)
    C = cone(base)
    P = PairComplex(C.sset, base.sset)
    for sid in C.sset.ids[1]:
        if "c" in sid:
            continue
        sigma = Chain(1, {sid: 1})
        res = relative_min_fill(P, 1, sigma)
        assert res.fill_norm <= sigma.norm()


# exact constants


@pytest.mark.parametrize("N", [1, 2, 3, 4, 8])
def test_path_constant_is_half_the_length(N):
    assert ubc_exact(path(N).sset, 0).value == Fraction(N, 2)


@pytest.mark.parametrize("name", sorted(SMALL))
def test_exact_matches_circuit_enumeration(name):
    X = SMALL[name]
    for q in range(0, X.dim):
        exact = ubc_exact(X, q)
        assert exact.mode == "exact"
        assert float(exact.value) == pytest.approx(oracles.brute_ubc(X, q), abs=1e-7)


def test_tits_building_degree_zero_matches_enumeration():
    from ubckit.families import tits_building_A

    X = order_complex(tits_building_A(2, 3)).sset
    assert float(ubc_exact(X, 0).value) == pytest.approx(oracles.brute_ubc(X, 0))


def test_top_degree_constant_is_zero():
    X = boundary_simplex(2).sset
    assert ubc_exact(X, 1).value == 0


@pytest.mark.parametrize("base", [boundary_simplex(2), boundary_simplex(3), horn(2, 0)])
def test_cone_constants_at_most_one(base):
    C = cone(base).sset
    for q in range(C.dim):
        assert ubc_exact(C, q).value <= 1


def test_relative_constant_of_cone_pair():
    base = boundary_simplex(2)
    assert ubc_exact(cone(base).sset, 1, sub=base.sset).value <= 1


def test_budget_downgrades_to_sampling():
    X = sd(boundary_simplex(3).sset)
    m = ubc_exact(X, 1, max_circuits=3, fallback_samples=5, seed=2)
    assert m.mode == "sampled" and m.downgraded and m.sample_count == 5


# sampled constants


def test_sampling_is_deterministic_and_below_exact():
    X = sd(boundary_simplex(3).sset)
    a = ubc_sampled(X, 1, 30, seed=11)
    b = ubc_sampled(X, 1, 30, seed=11)
    assert a.value == b.value and a.attaining_cycle == b.attaining_cycle
    assert a.value <= ubc_exact(X, 1).value


def test_sampled_cone_at_most_one():
    assert ubc_sampled(cone(boundary_simplex(3)).sset, 1, 40, seed=3).value <= 1


def test_sampled_path_approaches_exact_from_below():
    values = [ubc_sampled(path(4).sset, 0, s, seed=0).value for s in (1, 10, 200)]
    assert values == sorted(values) and values[-1] <= 2
    assert values[-1] >= Fraction(3, 2)


# uniform acyclicity


def test_uniform_acyclicity_examples():
    two_points = OrderedSimplicialComplex.from_facets("pts", ["a", "b"], [["a"], ["b"]]).sset
    assert check_uniform_acyclicity(boundary_simplex(2).sset, -1, 0)
    assert check_uniform_acyclicity(boundary_simplex(2).sset, 0, 10)
    assert not check_uniform_acyclicity(boundary_simplex(2).sset, 1, 10)
    assert not check_uniform_acyclicity(two_points, 0, 100)
    C = cone(boundary_simplex(2)).sset
    assert check_uniform_acyclicity(C, C.dim - 1, 1)
    S = boundary_simplex(3).sset
    K = max(ubc_exact(S, q).value for q in range(2))
    assert check_uniform_acyclicity(S, 1, K)


def test_unimodular_poset_over_f2_cubed_is_one_acyclic():
    from ubckit.homology import is_n_acyclic

    X = order_complex(unimodular_poset(UnimodularPosetSpec(FiniteRing.prime_field(2), 3))).sset
    assert is_n_acyclic(X, 1)
    assert check_uniform_acyclicity(X, 0, ubc_exact(X, 0).value)


def test_certified_float_lp_agrees_with_exact_simplex():
    from ubckit.core import chain_complex
    from ubckit.ubc import FillSolver

    X = ord_construction(simplex(3))
    solver = FillSolver(chain_complex(X), 1)
    assert solver.kernel_dim > 1
    D = solver.D
    for j in range(0, D.ncols, 3):
        target = dict(D.apply({j: 1, (j + 5) % D.ncols: -2}))
        value, _, dual, method = solver.solve(target)
        assert method == "lp-certified"
        assert value == solver._lp({k: Fraction(v) for k, v in target.items()})[0]
        assert solver.dual_feasible(dual)


# transport


def test_identity_transport_returns_the_constant():
    cert = identity_certificate(boundary_simplex(3).sset)
    assert transport_ubc(cert, 1, Fraction(7, 3)) == Fraction(7, 3)


@pytest.mark.parametrize("X", [simplex(2).sset, boundary_simplex(3).sset])
def test_subdivision_transport_bound(X):
    cert = sd_certificate(X).reversed()  # from Sd X to X
    for q in range(3):
        K_X = ubc_exact(X, q).value
        bound = transport_ubc(cert, q, K_X, rigorous=True)
        assert bound <= k_sd_down(q, K_X).value
        assert ubc_exact(cert.source, q).value <= bound


def test_retract_transport_bound():
    from ubckit.core import Poset

    F = Poset.from_relation("F", ["m", "a", "b"], [("m", "a"), ("m", "b")])
    r, cert = poset_retract(F, ["m"])
    rev = cert.reversed()
    for q in range(2):
        K_S = ubc_exact(cert.source, q).value
        assert transport_ubc(rev, q, K_S) <= k_retract_up(q, K_S).value
