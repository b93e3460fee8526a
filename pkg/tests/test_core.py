import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ubckit.builders import boundary_simplex, path, simplex
from ubckit.core import (
    AUGMENTATION_ID,
    Chain,
    ComplexError,
    PairComplex,
    Poset,
    SemiSimplicialSet,
    augmentation_matrix,
    boundary,
    boundary_matrix,
    relative_split,
    same_order,
    subcomplex,
    validate,
)


def test_standard_simplex_validates_cleanly():
    assert validate(simplex(2).sset).problems() == []


def test_repeated_face_is_a_regularity_violation():
    X = SemiSimplicialSet("loop", (("v",), ("e",)), ((), ((0, 0),)), regular=True)
    rep = validate(X)
    assert rep.regularity_violations and not rep.identity_violations


def test_broken_simplicial_identity_is_reported():
    X = simplex(2).sset
    faces = list(X.faces)
    f = faces[2][0]
    faces[2] = ((f[1], f[0], f[2]),)
    bad = SemiSimplicialSet("twisted", X.ids, tuple(faces), X.regular)
    assert validate(bad).identity_violations


def test_edge_boundary_column():
    D = boundary_matrix(simplex(1).sset, 1).to_dense()
    assert D == [[-1], [1]]


def test_path_boundary_matrix():
    X = path(2).sset
    assert X.ids[0] == ("(0)", "(1)", "(2)")
    assert boundary_matrix(X, 1).to_dense() == [[-1, 0], [1, -1], [0, 1]]


def test_boundary_squares_to_zero_on_triangle():
    X = simplex(2).sset
    assert (boundary_matrix(X, 1) @ boundary_matrix(X, 2)).is_zero()
    assert (augmentation_matrix(X) @ boundary_matrix(X, 1)).is_zero()


def test_augmentation_row_of_triangle_boundary():
    assert augmentation_matrix(boundary_simplex(2).sset).to_dense() == [[1, 1, 1]]


def test_chain_boundary_reaches_augmentation():
    X = path(1).sset
    assert boundary(X, Chain(0, {"(0)": 2, "(1)": 1})) == Chain(-1, {AUGMENTATION_ID: 3})
    assert boundary(X, Chain(1, {"(0,1)": 1})) == Chain(0, {"(0)": -1, "(1)": 1})


def test_chain_rejects_unknown_simplex():
    with pytest.raises(ComplexError):
        boundary(path(1).sset, Chain(1, {"(0,7)": 1}))


def test_relative_split_examples():
    X = simplex(1).sset
    Y = boundary_simplex(1).sset
    P = PairComplex(X, Y)
    assert relative_split(P, Chain(0, {"(0)": 3})).norm() == 0
    assert relative_split(P, Chain(1, {"(0,1)": 1})) == Chain(1, {"(0,1)": 1})
    # degree 0 in a pair where one vertex is outside the sub
    Z = path(2).sset
    W = subcomplex(Z, [(0, "(0)")])
    split = relative_split(PairComplex(Z, W), Chain(0, {"(0)": 1, "(2)": 2}))
    assert split == Chain(0, {"(2)": 2}) and split.norm() == 2


def test_pair_rejects_foreign_simplex():
    with pytest.raises(ComplexError):
        PairComplex(path(1).sset, path(3).sset)


def test_json_round_trip():
    X = boundary_simplex(3).sset
    Y = SemiSimplicialSet.from_json(json.loads(json.dumps(X.to_json())))
    assert Y.ids == X.ids and Y.faces == X.faces
    c = Chain(1, {"(0,1)": Fraction(1, 3), "(1,2)": -2})
    assert Chain.from_json(json.loads(json.dumps(c.to_json()))) == c


@st.composite
def complexes(draw):
    n = draw(st.integers(1, 6))
    facets = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=4), min_size=1, max_size=6))
    verts = [str(v) for v in range(n)]
    from ubckit.core import OrderedSimplicialComplex

    return OrderedSimplicialComplex.from_facets("random", verts, [[str(v) for v in f] for f in facets]).sset


@settings(max_examples=60, deadline=None)
@given(complexes())
def test_generated_complexes_are_valid_and_exact(X):
    assert validate(X).ok
    for q in range(1, X.dim + 1):
        lower = augmentation_matrix(X) if q == 1 else boundary_matrix(X, q - 1)
        assert (lower @ boundary_matrix(X, q)).is_zero()


def test_poset_covers_and_chain_length():
    P = Poset.from_relation("chain", ["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert P.covers["a"] == frozenset({"b"})
    assert P.maximal_chain_length() == 3
    Q = Poset.from_relation("chain", ["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert same_order(P, Q)
    A = Poset.from_relation("anti", ["a", "b", "c"], [])
    assert not same_order(P, A)
