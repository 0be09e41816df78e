import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import nonzero_fractions, pos
from tsip.errors import InvalidInputError, NegativeDiscriminantError
from tsip.families import FAMILY_NAMES, SAMPLE_PARAMS, instantiate
from tsip.groundstate import (
    FirstCategoryInput,
    SecondCategoryInput,
    ansatz_residual,
    beta,
    raw_coefficients,
    solve_degenerate,
    solve_first,
    solve_raw,
    solve_second,
)
from tsip.ratfun import Poly, RationalFunction

F = Fraction


def test_beta_irrational_falls_back_to_float():
    b = beta(2, 2, "plus")
    assert isinstance(b, float)
    assert b == pytest.approx(1 + math.sqrt(3), rel=1e-15)


def test_beta_zero_lambda():
    assert beta(0, 2, "minus") == 0


@given(pos, pos)
def test_beta_inverts_shift_parametrization(a, alpha):
    if a > alpha / 2:
        assert beta(a * (a - alpha), alpha, "plus") == a
    # minus branch inverts a(a + alpha)
    assert beta(a * (a + alpha), alpha, "minus") == a


def test_beta_negative_discriminant():
    with pytest.raises(NegativeDiscriminantError):
        beta(-5, 2)


def test_solve_first_irrational():
    sol = solve_first(FirstCategoryInput(2, 0, 0, 2, "plus"))
    assert sol.exactness == "floating"
    assert sol.b1 == pytest.approx(1 + math.sqrt(3))
    assert sol.b0 == 0
    assert sol.E0 == pytest.approx(2 * (1 + math.sqrt(3)))
    assert sol.residual_max() < 1e-12


@given(pos, nonzero_fractions, pos)
def test_solve_first_exact_residual(a, lam1, alpha):
    if not a > alpha / 2:
        return
    sol = solve_first(FirstCategoryInput(a * (a - alpha), lam1, 3, alpha, "plus"))
    assert sol.exact and sol.b1 == a and sol.b0 == lam1 / (2 * a)
    assert sol.residual_max() == 0.0
    assert ansatz_residual(sol.P, sol.V, sol.w(), sol.E0).is_zero()


def test_zero_linear_term_gives_zero_b0():
    assert solve_first(FirstCategoryInput(6, 0, 1, 1, "minus")).b0 == 0


def test_harmonic_degenerate_path():
    sol = solve_degenerate("identity", F(1, 4) * 9, 0, F(-3, 2))
    assert sol.b1 == F(3, 2) and sol.b0 == 0 and sol.E0 == 0


def test_isotonic_degenerate_path():
    omega, l = F(2), F(3, 2)
    sol = solve_degenerate("identity", omega**2 / 4, 0, -omega * (l + F(3, 2)), mu2=l * (l + 1))
    assert sol.b1 == omega / 2 and sol.bm1 == -(l + 1) and sol.E0 == 0


def test_second_category_pt2():
    # A(A + alpha) and B(B - alpha) at A = 2, B = 1, alpha = 1
    sol = solve_second(SecondCategoryInput(6, 0, 0, 1, "minus"))
    assert sol.b1 == 2 and sol.bm1 == -1 and sol.b0 == 0
    assert sol.residual_max() == 0.0


@given(pos, pos, pos)
def test_second_category_signs(lam2, mu2, alpha):
    for br in ("plus", "minus"):
        try:
            sol = solve_second(SecondCategoryInput(lam2, mu2, 0, alpha, br))
        except InvalidInputError:
            continue
        assert sol.b1 > 0 and sol.bm1 < 0 and sol.b0 == 0
        assert sol.residual_max() < 1e-9 * (1 + abs(float(lam2)) + abs(float(mu2)))


def test_solvers_reject_nonpositive_b1():
    with pytest.raises(InvalidInputError):
        solve_first(FirstCategoryInput(0, 0, 0, 2, "minus"))
    with pytest.raises(InvalidInputError):
        solve_first(FirstCategoryInput(1, 0, 0, 0))


@pytest.mark.parametrize("name", [n for n in FAMILY_NAMES if n != "scarf-2"])
def test_round_trip_catalog(name):
    for p in SAMPLE_PARAMS[name]:
        inst = instantiate(name, p)
        sol = solve_raw(raw_coefficients(inst))
        assert sol.exact
        assert sol.w() == inst.w0
        assert sol.E0 == 0


def test_scarf2_has_no_raw_form():
    with pytest.raises(InvalidInputError):
        raw_coefficients(instantiate("scarf-2", SAMPLE_PARAMS["scarf-2"][0]))


@settings(max_examples=40)
@given(
    st.sampled_from([n for n in FAMILY_NAMES]),
    st.integers(2, 5),
    st.lists(nonzero_fractions, min_size=7, max_size=7),
    st.integers(-6, 6),
)
def test_no_higher_degree_ground_state(name, degree, coeffs, E):
    inst = instantiate(name, SAMPLE_PARAMS[name][0])
    low = -1 if inst.w0.den.degree else 0
    terms = {k: coeffs[k - low] for k in range(low, degree + 1)}
    w = RationalFunction.laurent(terms)
    assert not ansatz_residual(inst.P, inst.potential, w, E).is_zero()


@settings(max_examples=40)
@given(st.sampled_from([n for n in FAMILY_NAMES]), st.integers(2, 5), nonzero_fractions)
def test_perturbed_ground_state_is_not_a_solution(name, degree, c):
    inst = instantiate(name, SAMPLE_PARAMS[name][0])
    w = inst.w0 + RationalFunction.from_poly(Poly.monomial(degree, c))
    for E in (0, 1, -1):
        assert not ansatz_residual(inst.P, inst.potential, w, E).is_zero()
