import itertools

import pytest

import oracles
from ubckit.builders import (
    as_ordered_complex,
    barycentric_subdivision,
    boundary_simplex,
    cone,
    horn,
    identity_certificate,
    join,
    link,
    ord_construction,
    order_complex,
    poset_link,
    poset_retract,
    sd,
    sd_certificate,
    simplex,
    star,
)
from ubckit.core import ComplexError, OrderedSimplicialComplex, Poset, SemiSimplicialSet
from ubckit.homology import reduced_betti


def subsets_poset(n, with_empty=True):
    ground = range(1, n + 1)
    elems = [frozenset(c) for k in range(0 if with_empty else 1, n + 1) for c in itertools.combinations(ground, k)]
    name = lambda s: "{" + ",".join(map(str, sorted(s))) + "}"
    rel = [(name(a), name(b)) for a in elems for b in elems if a < b]
    return Poset.from_relation(f"2^{n}", [name(e) for e in elems], rel)


def counts(X):
    return tuple(X.count(q) for q in range(len(X.ids)))


# links and stars


def test_link_of_facet_is_opposite_vertex():
    X = simplex(3)
    assert link(X, ["0", "1", "2"]).simplices == {("3",)}


def test_link_of_vertex_in_triangle_boundary_is_two_points():
    lk = link(boundary_simplex(2), ["0"])
    assert lk.simplices == {("1",), ("2",)}


def test_star_of_vertex():
    st = star(boundary_simplex(2), ["0"])
    assert st.facets() == [("0", "1"), ("0", "2")]


def test_poset_link_in_chain():
    P = Poset.from_relation("abc", ["a", "b", "c"], [("a", "b"), ("b", "c")])
    L = poset_link(P, "b")
    assert L.lk_minus.elements == ("a",) and L.lk_plus.elements == ("c",)
    assert L.lk.less("a", "c")


def test_poset_link_in_antichain_is_empty():
    P = Poset.from_relation("anti", ["a", "b", "c"], [])
    L = poset_link(P, "a")
    assert not L.up and not L.down and len(L.lk) == 0


def test_poset_link_in_subsets():
    L = poset_link(subsets_poset(2), "{1}")
    assert L.down == {"{}"} and L.up == {"{1,2}"}


# joins and cones


def test_cone_over_empty_is_a_point():
    empty = OrderedSimplicialComplex("empty", (), frozenset())
    C = cone(empty)
    assert counts(C.sset) == (1,)


def test_suspension_of_a_point_is_a_two_edge_path():
    X = join(boundary_simplex(1), simplex(0, prefix="p"))
    assert counts(X.sset) == (3, 2)
    assert reduced_betti(X.sset).betti == (0, 0)


def test_join_of_two_points_is_an_edge():
    X = join(simplex(0, prefix="a"), simplex(0, prefix="b"))
    assert counts(X.sset) == (2, 1)


def test_cone_apex_is_last():
    C = cone(boundary_simplex(2))
    assert C.vertices[-1] == "c"
    assert all(s[-1] == "c" for s in C.simplices if "c" in s)


# order complexes


def test_order_complex_of_antichain():
    P = Poset.from_relation("anti", ["a", "b", "c", "d"], [])
    assert counts(order_complex(P).sset) == (4,)


def test_order_complex_of_total_order_is_a_simplex():
    P = Poset.from_relation("tot", ["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert counts(order_complex(P).sset) == (3, 3, 1)


def test_order_complex_of_proper_subsets_of_two():
    X = order_complex(subsets_poset(2, with_empty=False)).sset
    assert counts(X) == (3, 2)


# subdivision


def test_subdivided_edge_is_a_path():
    X = sd(simplex(1).sset)
    assert counts(X) == (3, 2) and reduced_betti(X).betti == (0, 0)


def test_subdivided_triangle_boundary_is_a_hexagon():
    X = sd(boundary_simplex(2).sset)
    assert counts(X) == (6, 6) and reduced_betti(X).betti == (0, 1)


def test_subdivision_rejects_repeated_faces():
    loop = SemiSimplicialSet("loop", (("v",), ("e",)), ((), ((0, 0),)))
    with pytest.raises(ComplexError, match="e"):
        barycentric_subdivision(loop)


def test_point_certificate_is_trivial():
    c = sd_certificate(simplex(0).sset)
    assert c.verified
    assert c.norms()["f"] == {0: 1} and c.norms()["H_target"] == {0: 0}


def test_edge_certificate_norms():
    c = sd_certificate(simplex(1).sset)
    assert c.verified
    assert c.norms()["f"][1] == 2


@pytest.mark.parametrize("X", [simplex(2).sset, boundary_simplex(3).sset])
def test_triangle_certificate_homotopy_bounded(X):
    c = sd_certificate(X)
    assert c.verified
    for q, h in c.norms()["H_target"].items():
        assert h <= {0: 1, 1: 5, 2: 23}[q]


def test_certificate_transport_is_a_chain_map_on_subdivided_sphere():
    c = sd_certificate(boundary_simplex(3).sset)
    assert c.problems() == []
    assert reduced_betti(c.target).betti == reduced_betti(c.source).betti


def test_identity_certificate():
    assert identity_certificate(boundary_simplex(2).sset).verified


# poset retraction


def test_retract_onto_everything_is_identity():
    P = subsets_poset(2)
    r, c = poset_retract(P, P.elements)
    assert all(r[x] == x for x in P.elements)
    assert all(v == 0 for v in c.norms()["H_target"].values())


def test_retract_edge_onto_bottom():
    P = Poset.from_relation("ab", ["a", "b"], [("a", "b")])
    r, c = poset_retract(P, ["a"])
    assert r == {"a": "a", "b": "a"} and c.verified
    assert c.Ht(0).to_dense() == [[0, -1]]


def test_retract_onto_unique_minimum():
    P = subsets_poset(3)
    r, c = poset_retract(P, ["{}"])
    assert c.verified
    for q, h in c.norms()["H_target"].items():
        assert h <= q + 1


def test_retract_needs_lower_bound():
    P = Poset.from_relation("anti", ["a", "b"], [])
    with pytest.raises(ComplexError, match="b"):
        poset_retract(P, ["a"])


# ord construction and horns


def test_ord_of_point_and_edge():
    assert counts(ord_construction(simplex(0))) == (1,)
    assert counts(ord_construction(simplex(1))) == (2, 2)


def test_ord_of_triangle_is_injective_words():
    X = ord_construction(simplex(2))
    assert counts(X) == (3, 6, 6)
    assert oracles.reduced_betti(X) == (0, 0, 2)


def test_horns():
    assert counts(horn(1, 1).sset) == (1,)
    H = horn(2, 2)
    assert counts(H.sset) == (3, 2)
    assert set(H.facets()) == {("0", "2"), ("1", "2")}


def test_as_ordered_complex_round_trip_and_errors():
    X = boundary_simplex(2)
    assert as_ordered_complex(X.sset).simplices == X.simplices
    with pytest.raises(ComplexError):
        as_ordered_complex(ord_construction(simplex(1)))
