import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ubckit.builders import order_complex, poset_link
from ubckit.families import (
    FiniteRing,
    FormParameter,
    UnimodularPosetSpec,
    gaussian_binomial,
    hyperbolic_module,
    hyperbolic_split_injection_complex,
    hyperbolic_vertices,
    is_unimodular,
    left_inverse_exists,
    link_matches_complement,
    ord_matches_ordered,
    sequence_label,
    solomon_tits_filtration,
    split_injection_betti,
    split_injection_complex,
    split_injection_tuples,
    streamed_sd_check,
    tits_building_A,
    tits_building_C,
    unimodular_poset,
    unimodular_sequences,
    witt_index,
    zero_module,
)
from ubckit.homology import reduced_betti

Z4, Z6, F2, F3 = FiniteRing.zmod(4), FiniteRing.zmod(6), FiniteRing.prime_field(2), FiniteRing.prime_field(3)


# unimodularity


def test_unimodular_examples():
    assert is_unimodular(Z4, 1, [(1,)])
    assert not is_unimodular(Z4, 1, [(2,)])
    assert is_unimodular(Z6, 2, [(2, 3)])
    assert left_inverse_exists(Z6, 2, [(2, 3)])


@settings(max_examples=150, deadline=None)
@given(
    st.sampled_from([2, 3, 4, 6]),
    st.integers(1, 2).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.tuples(*[st.integers(0, 5)] * n), min_size=1, max_size=n))
    ),
)
def test_unimodular_matches_left_inverse_search(m, data):
    n, vectors = data
    R = FiniteRing.zmod(m)
    vectors = [tuple(x % m for x in v) for v in vectors]
    assert is_unimodular(R, n, vectors) == left_inverse_exists(R, n, vectors)


@pytest.mark.parametrize("m,n", [(2, 1), (2, 2), (3, 2), (4, 2), (6, 2), (2, 3)])
def test_sequences_match_brute_force(m, n):
    R = FiniteRing.zmod(m)
    fast = set(unimodular_sequences(UnimodularPosetSpec(R, n)))
    assert fast == set(oracles.all_unimodular_sequences(R, n))
    assert set(split_injection_tuples(R, n)) == fast


def test_units_of_z4_form_an_antichain():
    U = unimodular_poset(UnimodularPosetSpec(Z4, 1))
    assert set(U.elements) == {"(1)", "(3)"} and not U.less("(1)", "(3)")


@pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (4, 2), (6, 2), (2, 3)])
def test_maximal_sequence_length_bound(m, n):
    R = FiniteRing.zmod(m)
    U = unimodular_poset(UnimodularPosetSpec(R, n))
    assert U.maximal_chain_length() <= n + R.stable_rank


def test_unimodular_poset_over_f2_squared_is_connected():
    X = order_complex(unimodular_poset(UnimodularPosetSpec(F2, 2))).sset
    assert reduced_betti(X).betti[0] == 0


def test_affine_and_suffix_shapes():
    spec = UnimodularPosetSpec(F2, 1, "affine", delta=1)
    assert all(v[-1] == 1 for s in unimodular_sequences(spec) for v in s)
    with_suffix = UnimodularPosetSpec(F2, 1, "affine", delta=0, suffix=((0, 1),))
    for s in unimodular_sequences(with_suffix):
        assert is_unimodular(F2, 2, list(s) + [(0, 1)])
    with pytest.warns(UserWarning):
        assert unimodular_sequences(UnimodularPosetSpec(F2, 1, "affine", suffix=((0, 0),))) == []


def test_split_injection_vertices():
    assert split_injection_complex(F2, 1).count(0) == 1
    assert split_injection_complex(F2, 2).count(0) == 3


def test_streamed_betti_matches_full_complex():
    X = split_injection_complex(Z4, 2)
    assert split_injection_betti(Z4, 2, 1).betti == reduced_betti(X, 1).betti


def test_streamed_subdivision_check():
    check = streamed_sd_check(Z6, 2)
    assert check.isomorphic and check.max_chain_length == 2
    assert check.sequences == len(unimodular_sequences(UnimodularPosetSpec(Z6, 2)))


# Tits buildings


def test_tits_a_counts():
    assert len(tits_building_A(2, 2)) == 3 and tits_building_A(2, 2).relation_count() == 0
    T = tits_building_A(2, 3)
    assert len(T) == 14 and T.relation_count() == 21
    assert len(tits_building_A(3, 2)) == 4


@pytest.mark.parametrize("p,n", [(2, 3), (2, 4), (3, 3)])
def test_tits_a_vertex_count_is_gaussian_sum(p, n):
    assert len(tits_building_A(p, n)) == sum(gaussian_binomial(n, k, p) for k in range(1, n))


def test_tits_c_counts():
    C1 = tits_building_C(2, 1)
    assert len(C1) == 3 and C1.relation_count() == 0
    C2 = tits_building_C(2, 2)
    dims = [C2.dimension(x) for x in C2.elements]
    assert dims.count(1) == 15 and dims.count(2) == 15 and C2.relation_count() == 45
    assert len(tits_building_C(3, 1)) == 4


def test_solomon_tits_filtration_over_f2_cubed():
    T = tits_building_A(2, 3)
    line = next(x for x in T.elements if T.dimension(x) == 1)
    filt = solomon_tits_filtration(T, line)
    Q0 = filt.stages[0]
    assert any(len(Q0.above(x)) + len(Q0.below(x)) + 1 == len(Q0) for x in Q0.elements)
    planes = set(filt.stages[2].elements) - set(filt.stages[1].elements)
    assert len(planes) == 4
    last = filt.steps[-1]
    assert set(last.link_kinds.values()) == {"building"}
    assert all(k == "cone" for s in filt.steps[:-1] for k in s.link_kinds.values())


# quadratic modules


def test_hyperbolic_gram_over_f3():
    M = hyperbolic_module(FormParameter.symplectic(F3), F3, 1)
    assert M.gram == ((0, 1), (2, 0))
    assert M.is_nondegenerate() and M.problems() == []


def test_hyperbolic_sum_is_block_diagonal():
    M = hyperbolic_module(FormParameter.symplectic(F3), F3, 2)
    for i, j in itertools.product(range(4), repeat=2):
        if i // 2 != j // 2:
            assert M.gram[i][j] == 0


def test_witt_index():
    fp = FormParameter.symplectic(F3)
    assert witt_index(hyperbolic_module(fp, F3, 2)) == 2
    assert witt_index(zero_module(fp, F3)) == 0


def test_hyperbolic_vertex_count_over_f3():
    M = hyperbolic_module(FormParameter.symplectic(F3), F3, 1)
    brute = sum(1 for e in M.vectors() for f in M.vectors() if M.lam(e, f) == 1)
    assert len(hyperbolic_vertices(M)) == brute == 24


def test_zero_module_complex_is_empty():
    cx = hyperbolic_split_injection_complex(zero_module(FormParameter.symplectic(F3), F3))
    assert cx.ordered.count(0) == 0


def test_hyperbolic_ord_and_link_over_f2():
    M = hyperbolic_module(FormParameter.symplectic(F2), F2, 2)
    cx = hyperbolic_split_injection_complex(M)
    assert ord_matches_ordered(cx)
    assert link_matches_complement(M, cx.vertices[0])
    assert M.outside_hypotheses


def test_invalid_form_parameter():
    with pytest.raises(ValueError):
        hyperbolic_module(FormParameter(1, frozenset({1})), F3, 1)
