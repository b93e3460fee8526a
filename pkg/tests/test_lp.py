from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from ubckit.lp import Infeasible, solve_standard_form


def test_small_program():
    # min x + 2y  s.t. x + y = 3, x - y = 1
    sol = solve_standard_form([[1, 1], [1, -1]], [3, 1], [1, 2])
    assert sol.value == 4 and sol.x == (2, 1)


def test_infeasible_program():
    with pytest.raises(Infeasible):
        solve_standard_form([[1, 1]], [-1], [1, 1])


@settings(max_examples=80, deadline=None)
@given(
    st.integers(1, 3).flatmap(
        lambda m: st.tuples(
            st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=m, max_size=m),
            st.lists(st.integers(0, 4), min_size=5, max_size=5),
            st.lists(st.integers(0, 5), min_size=5, max_size=5),
        )
    )
)
def test_matches_floating_solver_with_exact_duals(data):
    A, x0, c = data
    b = [sum(a * x for a, x in zip(row, x0)) for row in A]  # feasible by construction
    sol = solve_standard_form(A, b, c)
    ref = linprog(c, A_eq=np.array(A, float), b_eq=np.array(b, float), bounds=(0, None), method="highs")
    assert ref.status == 0
    assert float(sol.value) == pytest.approx(ref.fun, abs=1e-7)
    assert all(sum(Fraction(a) * x for a, x in zip(row, sol.x)) == bi for row, bi in zip(A, b))
    assert all(x >= 0 for x in sol.x)
