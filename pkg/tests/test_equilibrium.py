"""Equilibrium solver tests: payoff quadratics, best responses, FOC solve, oracles."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triopoly.equilibrium import (
    ConcavityViolation,
    QuadraticPayoff,
    best_response,
    best_response_iteration,
    build_payoff_quadratic,
    closed_form_outputs,
    solve_equilibrium,
)
from triopoly.exact import QuadraticForm
from triopoly.market import (
    ALL_ASSIGNMENTS,
    FIRMS,
    PATTERNS,
    ModelParams,
    payoff_vector,
    resolve_market,
)
from triopoly.verify import sample_model_params

SPOT = ModelParams(10, "1/2", 2, 2, 3)

# Equilibrium outputs at SPOT, frozen after independent re-derivation.
SPOT_X = {
    1: (Fraction(114, 35), Fraction(114, 35), Fraction(94, 35)),
    2: (Fraction(114, 35), Fraction(114, 35), Fraction(94, 35)),
    3: (Fraction(1284, 385), Fraction(114, 35), Fraction(1004, 385)),
    4: (Fraction(216, 65), Fraction(216, 65), Fraction(166, 65)),
    5: (Fraction(638, 195), Fraction(216, 65), Fraction(508, 195)),
    6: (Fraction(216, 65), Fraction(216, 65), Fraction(166, 65)),
}

small = st.fractions(min_value=-8, max_value=8, max_denominator=16)


# --- payoff quadratics -----------------------------------------------------------


def test_pattern1_payoff_coefficients():
    payoff = build_payoff_quadratic(SPOT, 1, "A")
    assert payoff.form.quad[0][0] == -1
    # Coefficient of the x_A x_B cross term is -b/2; the symmetric matrix
    # stores half of it in each off-diagonal slot.
    assert payoff.form.quad[0][1] + payoff.form.quad[1][0] == -Fraction(1, 4)
    assert payoff.form.gradient((0, 0, 0))[0] == SPOT.a - SPOT.c_a
    assert payoff.own_curvature == -2


def test_payoff_evaluates_spot_psi():
    payoff = build_payoff_quadratic(SPOT, 1, "A")
    assert payoff.form.evaluate((2, 2, 2)) == 1


@given(st.sampled_from(ALL_ASSIGNMENTS), st.tuples(small, small, small))
@settings(max_examples=100, deadline=None)
def test_payoff_form_matches_resolved_market(asg, chosen):
    state = resolve_market(SPOT, asg, chosen)
    psi = payoff_vector(SPOT, state).psi
    for i, firm in enumerate(FIRMS):
        form = build_payoff_quadratic(SPOT, asg, firm).form
        assert form.evaluate(chosen) == psi[i]


def test_own_curvature_negative_everywhere():
    rng = random.Random(7)
    for _ in range(10):
        params = sample_model_params(rng)
        for asg in ALL_ASSIGNMENTS:
            for firm in FIRMS:
                assert build_payoff_quadratic(params, asg, firm).own_curvature < 0


# --- best responses ----------------------------------------------------------------


def test_best_response_examples():
    assert best_response(SPOT, 1, "A", (2, 2)) == Fraction(7, 2)
    assert best_response(SPOT, 2, "C", (2, 2)) == 5


def test_best_response_symmetric_firms_agree():
    params = ModelParams(10, "1/3", 4, 4, 4)
    assert best_response(params, 1, "A", (3, 3)) == best_response(params, 1, "B", (3, 3))


def test_respond_rejects_convex_payoff():
    convex = QuadraticForm(((1, 0, 0), (0, 0, 0), (0, 0, 0)), (0, 0, 0), 0)
    payoff = QuadraticPayoff("A", PATTERNS[1], convex)
    with pytest.raises(ConcavityViolation):
        payoff.respond((1, 1))


# --- exact equilibrium solve ----------------------------------------------------------


@pytest.mark.parametrize("pattern", sorted(SPOT_X))
def test_spot_equilibria(pattern):
    eq = solve_equilibrium(SPOT, pattern)
    assert eq.state.x == SPOT_X[pattern]
    assert eq.soc_ok
    assert eq.interior


def test_spot_pattern1_prices_and_pattern2_chosen():
    eq1 = solve_equilibrium(SPOT, 1)
    assert eq1.state.p == (Fraction(132, 35), Fraction(132, 35), Fraction(142, 35))
    eq2 = solve_equilibrium(SPOT, 2)
    assert eq2.chosen == (Fraction(114, 35), Fraction(114, 35), Fraction(142, 35))
    assert eq1.state == eq2.state


def test_full_symmetry_collapse_all_assignments():
    params = ModelParams(10, "1/2", 4, 4, 4)
    expected = (params.a - 4) / (2 + params.b)
    for asg in ALL_ASSIGNMENTS:
        state = solve_equilibrium(params, asg).state
        assert state.x == (expected, expected, expected)


def test_foc_gradients_vanish_on_random_draws():
    rng = random.Random(11)
    for _ in range(15):
        params = sample_model_params(rng)
        for pattern in sorted(PATTERNS):
            eq = solve_equilibrium(params, pattern)
            for i, firm in enumerate(FIRMS):
                form = build_payoff_quadratic(params, pattern, firm).form
                assert form.gradient(eq.chosen)[i] == 0


def test_solve_accepts_string_and_int():
    assert solve_equilibrium(SPOT, "QQQ") == solve_equilibrium(SPOT, 1)
    assert solve_equilibrium(SPOT, "2") == solve_equilibrium(SPOT, 2)


def test_equilibrium_serialization():
    doc = solve_equilibrium(SPOT, 1).to_dict()
    assert doc["assignment"] == "QQQ"
    assert doc["pattern"] == 1
    assert doc["x"] == ["114/35", "114/35", "94/35"]
    assert doc["x_dec"][0] == "3.25714285714"
    assert doc["flags"] == {"interior": True, "soc_ok": True}
    assert doc["params"]["b"] == "1/2"


def test_mirror_assignments_swap_ab():
    eq_mirror = solve_equilibrium(SPOT, "QPP")
    eq_base = solve_equilibrium(SPOT, 5)
    assert eq_mirror.state == eq_base.state.swap_ab()


# --- closed-form output tables ----------------------------------------------------------


def test_closed_forms_spot_pattern1():
    table = closed_form_outputs(SPOT, 1)
    assert table.corrected == SPOT_X[1]
    assert table.printed == (SPOT_X[1][0], SPOT_X[1][1], -SPOT_X[1][2])
    assert not table.printed_matches_corrected
    doc = table.to_dict()
    assert doc["printed"][2] == "-94/35"
    assert doc["corrected"][2] == "94/35"
    assert doc["printed_matches_corrected"] is False


@pytest.mark.parametrize("pattern", [2, 3, 4, 5, 6])
def test_closed_forms_match_solver_above_pattern1(pattern):
    table = closed_form_outputs(SPOT, pattern)
    assert table.printed_matches_corrected
    assert table.corrected == SPOT_X[pattern]


def test_closed_forms_random_draws_match_solver():
    rng = random.Random(23)
    for _ in range(25):
        params = sample_model_params(rng)
        for pattern in sorted(PATTERNS):
            table = closed_form_outputs(params, pattern)
            assert table.corrected == solve_equilibrium(params, pattern).state.x


def test_closed_forms_validation():
    with pytest.raises(ValueError, match="c_A = c_B"):
        closed_form_outputs(ModelParams(10, "1/2", 2, 3, 3), 1)
    with pytest.raises(ValueError, match="pattern"):
        closed_form_outputs(SPOT, 0)


# --- best-response iteration ----------------------------------------------------------


def test_iteration_symmetric_case():
    params = ModelParams(10, "1/2", 4, 4, 4)
    result = best_response_iteration(params, 1)
    assert result.converged
    expected = 12 / 5
    assert all(abs(v - expected) < 1e-10 for v in result.chosen)


def test_iteration_matches_exact_solver_spot():
    result = best_response_iteration(SPOT, 1)
    assert result.converged
    exact = solve_equilibrium(SPOT, 1).chosen
    for approx, truth in zip(result.chosen, exact):
        assert abs(approx - float(truth)) < 1e-10


def test_iteration_zero_budget_returns_init():
    result = best_response_iteration(SPOT, 1, init=(1.0, 2.0, 3.0), max_iter=0)
    assert result.chosen == (1.0, 2.0, 3.0)
    assert not result.converged
    assert result.iterations == 0


def test_iteration_reports_non_convergence():
    result = best_response_iteration(SPOT, 1, max_iter=3)
    assert not result.converged
    assert result.iterations == 3


def test_iteration_within_ten_tol_of_exact():
    rng = random.Random(31)
    tol = 1e-12
    for _ in range(5):
        params = sample_model_params(rng)
        for pattern in (1, 6):
            result = best_response_iteration(params, pattern, tol=tol)
            if not result.converged:
                continue
            exact = solve_equilibrium(params, pattern).chosen
            for approx, truth in zip(result.chosen, exact):
                assert abs(approx - float(truth)) <= 10 * tol


def test_iteration_validation():
    with pytest.raises(ValueError, match="damping"):
        best_response_iteration(SPOT, 1, damping=0)
    with pytest.raises(ValueError, match="tol"):
        best_response_iteration(SPOT, 1, tol=0)
    with pytest.raises(ValueError, match="max_iter"):
        best_response_iteration(SPOT, 1, max_iter=-1)
    with pytest.raises(ValueError, match="init"):
        best_response_iteration(SPOT, 1, init=(0.0, 0.0))
    near_one = ModelParams(10, Fraction(10**7 - 1, 10**7), 2, 2, 3)
    with pytest.raises(ValueError, match="float mode"):
        best_response_iteration(near_one, 1)
