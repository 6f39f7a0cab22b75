"""Nash equilibria of the relative-payoff game, one solve per strategy assignment.

The route to an equilibrium is always the same, whatever mix of quantity and
price choosers the assignment contains:

1. Express the whole market state as an exact affine function of the three
   committed strategic values v = (v_A, v_B, v_C), by solving the pinning
   system symbolically (multi right-hand-side elimination over Fractions).
2. Each firm's relative payoff psi_i then becomes an exact quadratic form in
   v. Its own-variable first-order condition is one linear equation.
3. Stack the three first-order conditions and solve the 3x3 system exactly.
   Second-order conditions reduce to the own curvature of each quadratic
   being negative, which is checked, not assumed.

Printed closed-form output tables exist for the six numbered patterns and
are kept here in two variants: ``printed`` is the table as transcribed, and
``corrected`` the variant that agrees with the solver. They differ in a
single entry, the sign of the all-quantity pattern's third output. The
solver is ground truth; the tables are cross-checks and documentation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exact import (
    AffineForm,
    QuadraticForm,
    RationalLike,
    SingularSystem,
    _eliminate,
    decimal_string,
    format_rational,
    rational_vector,
)
from .market import (
    FIRMS,
    PATTERNS,
    QUANTITY,
    AssignmentLike,
    MarketState,
    ModelParams,
    PayoffVector,
    StrategyAssignment,
    as_assignment,
    ensure_float_safe,
    firm_index,
    payoff_vector,
    resolve_market,
)

__all__ = [
    "ConcavityViolation",
    "QuadraticPayoff",
    "build_payoff_quadratic",
    "best_response",
    "Equilibrium",
    "solve_equilibrium",
    "ClosedFormOutputs",
    "closed_form_outputs",
    "IterationResult",
    "best_response_iteration",
]


class ConcavityViolation(Exception):
    """A payoff is not strictly concave in the firm's own variable."""


@lru_cache(maxsize=8192)
def _affine_state(a: Fraction, b: Fraction,
                  assignment: StrategyAssignment) -> tuple[tuple[AffineForm, ...],
                                                           tuple[AffineForm, ...]]:
    """Quantities and prices as affine forms in the committed vector v.

    Builds the same pinning system as resolve_market but with symbolic right
    hand sides: one column per v-coordinate plus one constant column, solved
    in a single elimination pass. Keyed by (a, b) rather than full params
    because costs never enter the demand geometry; parameter sweeps then
    share this work across draws that differ only in costs.
    """
    rows = []
    coeff_cols = [[Fraction(0)] * 3 for _ in range(3)]
    const_col = [Fraction(0)] * 3
    for i, choice in enumerate(assignment.choices):
        if choice == QUANTITY:
            rows.append([Fraction(1 if j == i else 0) for j in range(3)])
            coeff_cols[i][i] = Fraction(1)
        else:
            rows.append([Fraction(1) if j == i else b for j in range(3)])
            coeff_cols[i][i] = Fraction(-1)
            const_col[i] = a
    solution = _eliminate(rows, [*coeff_cols, const_col])
    x_forms = tuple(
        AffineForm(tuple(solution[i][j] for j in range(3)), solution[i][3])
        for i in range(3)
    )
    p_forms = []
    for i in range(3):
        others = x_forms[(i + 1) % 3] + x_forms[(i + 2) % 3]
        p_forms.append(a - x_forms[i] - b * others)
    return x_forms, tuple(p_forms)


@lru_cache(maxsize=512)
def _relative_payoff_forms(params: ModelParams,
                           assignment: StrategyAssignment) -> tuple[QuadraticForm, ...]:
    x_forms, p_forms = _affine_state(params.a, params.b, assignment)
    profits = tuple(
        (p_forms[i] - params.costs[i]) * x_forms[i] for i in range(3)
    )
    half = Fraction(1, 2)
    return tuple(
        profits[i] - half * (profits[(i + 1) % 3] + profits[(i + 2) % 3])
        for i in range(3)
    )


@dataclass(frozen=True)
class QuadraticPayoff:
    """One firm's relative payoff as an exact quadratic in the committed vector."""

    firm: str
    assignment: StrategyAssignment
    form: QuadraticForm

    @property
    def own_index(self) -> int:
        return firm_index(self.firm)

    @property
    def own_curvature(self) -> Fraction:
        """Second derivative in the firm's own variable; negative means concave."""
        i = self.own_index
        return 2 * self.form.quad[i][i]

    def respond(self, others: Sequence[RationalLike]) -> Fraction:
        """Payoff-maximizing own value against two fixed rival values.

        ``others`` lists the rivals' committed values in firm order with this
        firm skipped. Raises ConcavityViolation when the payoff has no
        interior maximum in the own variable.
        """
        rivals = rational_vector(others, 2)
        if self.own_curvature >= 0:
            raise ConcavityViolation(
                f"payoff of firm {self.firm} under {self.assignment} is not concave "
                f"in its own variable (curvature {self.own_curvature})"
            )
        i = self.own_index
        full = list(rivals)
        full.insert(i, Fraction(0))
        slope = self.form.lin[i] + 2 * sum(
            self.form.quad[i][j] * full[j] for j in range(3) if j != i
        )
        return -slope / self.own_curvature


def build_payoff_quadratic(params: ModelParams, assignment: AssignmentLike,
                           firm: str) -> QuadraticPayoff:
    """Exact quadratic representation of one firm's relative payoff."""
    asg = as_assignment(assignment)
    form = _relative_payoff_forms(params, asg)[firm_index(firm)]
    return QuadraticPayoff(firm, asg, form)


def best_response(params: ModelParams, assignment: AssignmentLike, firm: str,
                  others: Sequence[RationalLike]) -> Fraction:
    """Exact best response of one firm to fixed rival values."""
    return build_payoff_quadratic(params, assignment, firm).respond(others)


@dataclass(frozen=True)
class Equilibrium:
    """A solved assignment: committed values, resulting state, payoffs, and flags.

    ``interior`` records whether all quantities and prices are nonnegative;
    ``soc_ok`` whether every firm's own curvature is negative. Both are
    reported rather than enforced, so degenerate corners stay visible.
    """

    params: ModelParams
    assignment: StrategyAssignment
    chosen: tuple[Fraction, Fraction, Fraction]
    state: MarketState
    payoffs: PayoffVector
    interior: bool
    soc_ok: bool

    def to_dict(self) -> dict:
        return {
            "assignment": str(self.assignment),
            "pattern": self.assignment.pattern,
            "params": self.params.to_dict(),
            "chosen": [format_rational(v) for v in self.chosen],
            "chosen_dec": [decimal_string(v) for v in self.chosen],
            "x": [format_rational(v) for v in self.state.x],
            "x_dec": [decimal_string(v) for v in self.state.x],
            "p": [format_rational(v) for v in self.state.p],
            "p_dec": [decimal_string(v) for v in self.state.p],
            "pi": [format_rational(v) for v in self.payoffs.pi],
            "pi_dec": [decimal_string(v) for v in self.payoffs.pi],
            "psi": [format_rational(v) for v in self.payoffs.psi],
            "psi_dec": [decimal_string(v) for v in self.payoffs.psi],
            "flags": {"interior": self.interior, "soc_ok": self.soc_ok},
        }


def solve_equilibrium(params: ModelParams, assignment: AssignmentLike) -> Equilibrium:
    """Solve the stacked first-order conditions of one assignment exactly.

    Row i of the system is firm i's own-variable first-order condition
    2 Q_i[i, :] v = -lin_i[i]. The solution is verified by checking that each
    firm's own gradient vanishes at it, then expanded into the market state.
    """
    return _solve_cached(params, as_assignment(assignment))


@lru_cache(maxsize=512)
def _solve_cached(params: ModelParams, assignment: StrategyAssignment) -> Equilibrium:
    forms = _relative_payoff_forms(params, assignment)
    rows = []
    rhs = []
    for i in range(3):
        rows.append([2 * forms[i].quad[i][j] for j in range(3)])
        rhs.append(-forms[i].lin[i])
    try:
        chosen = tuple(rational_vector(_solve_foc(rows, rhs), 3))
    except SingularSystem as exc:
        raise SingularSystem(
            exc.pivot_step,
            f"stacked first-order conditions for {assignment} at {params.describe()}",
        ) from None
    for i in range(3):
        assert forms[i].gradient(chosen)[i] == 0
    state = resolve_market(params, assignment, chosen)
    payoffs = payoff_vector(params, state)
    soc_ok = all(2 * forms[i].quad[i][i] < 0 for i in range(3))
    interior = all(v >= 0 for v in state.x) and all(v >= 0 for v in state.p)
    return Equilibrium(params, assignment, chosen, state, payoffs, interior, soc_ok)


def _solve_foc(rows, rhs):
    solution = _eliminate(rows, [rhs])
    return [solution[i][0] for i in range(3)]


@dataclass(frozen=True)
class ClosedFormOutputs:
    """Equilibrium outputs from the transcribed reference formulas for one pattern.

    ``printed`` is the table exactly as transcribed; ``corrected`` agrees
    with the solver everywhere. The two differ only for pattern 1, whose
    transcribed third output has the wrong sign. Both variants assume firms
    A and B share a marginal cost.
    """

    pattern: int
    printed: tuple[Fraction, Fraction, Fraction]
    corrected: tuple[Fraction, Fraction, Fraction]

    @property
    def printed_matches_corrected(self) -> bool:
        return self.printed == self.corrected

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "printed": [format_rational(v) for v in self.printed],
            "corrected": [format_rational(v) for v in self.corrected],
            "printed_matches_corrected": self.printed_matches_corrected,
        }


def closed_form_outputs(params: ModelParams, pattern: int) -> ClosedFormOutputs:
    """Evaluate the transcribed reference output formulas for one numbered pattern.

    The formulas contain only the shared cost of firms A and B plus firm C's
    cost, so parameter sets with c_A != c_B are rejected.
    """
    if pattern not in PATTERNS:
        raise ValueError(f"pattern number must be 1..6, got {pattern}")
    if params.c_a != params.c_b:
        raise ValueError(
            "closed-form output tables assume c_A = c_B, "
            f"got cA={params.c_a} cB={params.c_b}"
        )
    printed = _printed_output_table(params.a, params.b, params.c_a, params.c_c)[pattern]
    corrected = printed if pattern != 1 else (printed[0], printed[1], -printed[2])
    return ClosedFormOutputs(pattern, printed, corrected)


@lru_cache(maxsize=2048)
def _printed_output_table(a: Fraction, b: Fraction, ca: Fraction,
                          cc: Fraction) -> dict:
    """All six transcribed output triples, computed once per parameter set."""
    d12 = (4 - b) * (b + 2)
    x12_ab = (b * cc - 4 * ca - a * b + 4 * a) / d12
    # Transcribed with denominator (b - 4)(b + 2); equals the negative of the
    # solver's value for pattern 1 and the true value for pattern 2.
    x1_c_printed = (b * cc + 4 * cc - 2 * b * ca + a * b - 4 * a) / d12
    x2_c = (b * cc + 4 * cc - 2 * b * ca + a * b - 4 * a) / ((b - 4) * (b + 2))

    d3 = (4 - b) * (1 - b) * (b + 2) * (3 * b + 4)
    x3_a = (
        5 * b**2 * cc + 4 * b * cc
        - 3 * b**3 * ca + 6 * b**2 * ca + 4 * b * ca - 16 * ca
        + 3 * a * b**3 - 11 * a * b**2 - 8 * a * b + 16 * a
    ) / d3
    x3_c = (
        7 * b**2 * cc - 16 * cc
        - 3 * b**3 * ca + 4 * b**2 * ca + 8 * b * ca
        + 3 * a * b**3 - 11 * a * b**2 - 8 * a * b + 16 * a
    ) / d3

    d46 = (1 - b) * (b + 2) * (5 * b + 4)
    x46_ab = (
        2 * b**2 * cc + b * cc
        + 3 * b**2 * ca - 2 * b * ca - 4 * ca
        - 5 * a * b**2 + a * b + 4 * a
    ) / d46
    x46_c = (
        b**2 * cc - 3 * b * cc - 4 * cc
        + 4 * b**2 * ca + 2 * b * ca
        - 5 * a * b**2 + a * b + 4 * a
    ) / d46

    d5 = (1 - b) * (b + 2) * (b + 4) * (5 * b + 4)
    x5_a = (
        -(b**3) * cc + 3 * b**2 * cc + 4 * b * cc
        + 6 * b**3 * ca + 16 * b**2 * ca - 12 * b * ca - 16 * ca
        - 5 * a * b**3 - 19 * a * b**2 + 8 * a * b + 16 * a
    ) / d5
    x5_c = (
        4 * b**3 * cc + 7 * b**2 * cc - 16 * b * cc - 16 * cc
        + b**3 * ca + 12 * b**2 * ca + 8 * b * ca
        - 5 * a * b**3 - 19 * a * b**2 + 8 * a * b + 16 * a
    ) / d5

    return {
        1: (x12_ab, x12_ab, x1_c_printed),
        2: (x12_ab, x12_ab, x2_c),
        3: (x3_a, x12_ab, x3_c),
        4: (x46_ab, x46_ab, x46_c),
        5: (x5_a, x46_ab, x5_c),
        6: (x46_ab, x46_ab, x46_c),
    }


@dataclass(frozen=True)
class IterationResult:
    """Outcome of the damped best-response iteration (float arithmetic)."""

    chosen: tuple[float, float, float]
    converged: bool
    iterations: int


def best_response_iteration(params: ModelParams, assignment: AssignmentLike,
                            init: Sequence[float] | None = None, *,
                            damping: float = 0.5, tol: float = 1e-12,
                            max_iter: int = 10000) -> IterationResult:
    """Simultaneous damped best-response dynamics in float arithmetic.

    All three firms respond at once to the previous iterate and the update is
    averaged with weight ``damping`` toward the response. Stops when the
    iterate moves by less than ``tol`` in the max norm. This is the package's
    independent numeric route to the same equilibria the exact solver finds.
    """
    asg = as_assignment(assignment)
    ensure_float_safe(params)
    if not 0 < damping <= 1:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 0:
        raise ValueError(f"max_iter must be nonnegative, got {max_iter}")
    if init is None:
        current = [0.0, 0.0, 0.0]
    else:
        current = [float(v) for v in init]
        if len(current) != 3:
            raise ValueError(f"init must have 3 components, got {len(current)}")

    forms = _relative_payoff_forms(params, asg)
    curvature = []
    slope = []
    intercept = []
    for i in range(3):
        own = float(2 * forms[i].quad[i][i])
        if own >= 0:
            raise ConcavityViolation(
                f"payoff of firm {FIRMS[i]} under {asg} is not concave in its own variable"
            )
        curvature.append(own)
        slope.append([float(2 * forms[i].quad[i][j]) for j in range(3)])
        intercept.append(float(forms[i].lin[i]))

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        responses = [
            -(intercept[i] + sum(slope[i][j] * current[j] for j in range(3) if j != i))
            / curvature[i]
            for i in range(3)
        ]
        nxt = [
            (1 - damping) * current[i] + damping * responses[i]
            for i in range(3)
        ]
        delta = max(abs(nxt[i] - current[i]) for i in range(3))
        current = nxt
        if delta < tol:
            converged = True
            break
    assert all(math.isfinite(v) for v in current)
    return IterationResult(tuple(current), converged, iterations)
