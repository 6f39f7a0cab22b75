"""Exact rational arithmetic: scalars, small linear solves, affine and quadratic forms.

Everything the solver computes runs over ``fractions.Fraction``, so equality
checks are decisive and no tolerance ever enters the algebra. Floats appear
only at the output boundary (decimal rendering) and in the explicitly
float-mode numeric routines elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

Rational = Fraction

RationalLike = Union[int, str, Fraction]

_SCALARS = (int, Fraction)

__all__ = [
    "Rational",
    "RationalLike",
    "as_rational",
    "format_rational",
    "decimal_string",
    "rational_vector",
    "SingularSystem",
    "solve_linear",
    "AffineForm",
    "QuadraticForm",
]


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact ``Fraction``.

    Accepts ``Fraction``, ``int``, and strings in the forms ``"3"``,
    ``"-3/4"``, or a decimal literal like ``"2.5"`` (converted exactly).
    Floats are rejected: binary floats carry representation error that would
    silently poison exact results, so callers must pass a string instead.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"invalid rational literal {value!r}") from exc
    raise TypeError(
        f"cannot convert {type(value).__name__} to an exact rational; "
        "pass an int, a Fraction, or a string"
    )


def format_rational(value: RationalLike) -> str:
    """Render as ``"num/den"`` with the denominator always present, e.g. ``"3/1"``."""
    frac = as_rational(value)
    return f"{frac.numerator}/{frac.denominator}"


def decimal_string(value) -> str:
    """12-significant-digit decimal rendering used by every human-facing output."""
    return format(float(value), ".12g")


def rational_vector(values: Sequence[RationalLike], dim: int | None = None) -> tuple[Fraction, ...]:
    """Coerce a sequence to a tuple of Fractions, optionally enforcing its length."""
    vec = tuple(as_rational(v) for v in values)
    if dim is not None and len(vec) != dim:
        raise ValueError(f"expected a vector of length {dim}, got {len(vec)}")
    return vec


class SingularSystem(Exception):
    """Gaussian elimination found no nonzero pivot; the system has no unique solution."""

    def __init__(self, pivot_step: int, detail: str = ""):
        self.pivot_step = pivot_step
        message = f"singular system: no nonzero pivot at elimination step {pivot_step}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


def _eliminate(matrix: Sequence[Sequence[RationalLike]],
               columns: Sequence[Sequence[RationalLike]]) -> list[list[Fraction]]:
    """Solve A X = B exactly for several right-hand columns at once.

    ``columns`` holds the columns of B; the result is row-major, so
    ``result[i][j]`` is component i of the solution for column j. Raises
    SingularSystem when some elimination step has only zero pivots below it.
    """
    n = len(matrix)
    rows = [list(rational_vector(row, n)) for row in matrix]
    if len(rows) != n:
        raise ValueError("matrix must be square")
    cols = [rational_vector(col, n) for col in columns]
    m = len(cols)
    aug = [rows[i] + [col[i] for col in cols] for i in range(n)]
    for step in range(n):
        pivot_row = next((r for r in range(step, n) if aug[r][step] != 0), None)
        if pivot_row is None:
            raise SingularSystem(step)
        if pivot_row != step:
            aug[step], aug[pivot_row] = aug[pivot_row], aug[step]
        pivot = aug[step][step]
        for r in range(step + 1, n):
            factor = aug[r][step] / pivot
            if factor:
                row = aug[r]
                top = aug[step]
                for c in range(step, n + m):
                    row[c] -= factor * top[c]
    solution = [[Fraction(0)] * m for _ in range(n)]
    for i in reversed(range(n)):
        for j in range(m):
            acc = aug[i][n + j]
            for c in range(i + 1, n):
                acc -= aug[i][c] * solution[c][j]
            solution[i][j] = acc / aug[i][i]
    return solution


def solve_linear(matrix: Sequence[Sequence[RationalLike]],
                 rhs: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    """Solve the square system A x = b exactly.

    Partial pivoting only needs a nonzero pivot over Fractions (there is no
    rounding to fight), and the result is checked by substituting back into
    the original system before it is returned.
    """
    n = len(matrix)
    if n == 0:
        raise ValueError("matrix must have at least one row")
    rows = [rational_vector(row, n) for row in matrix]
    vec = rational_vector(rhs, n)
    solution = _eliminate(rows, [vec])
    x = tuple(solution[i][0] for i in range(n))
    for i in range(n):
        residual = sum(rows[i][j] * x[j] for j in range(n)) - vec[i]
        assert residual == 0, "back-substitution check failed"
    return x


@dataclass(frozen=True)
class AffineForm:
    """An exact affine map ``v -> coeffs . v + const`` over a fixed variable vector."""

    coeffs: tuple[Fraction, ...]
    const: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", rational_vector(self.coeffs))
        object.__setattr__(self, "const", as_rational(self.const))

    @classmethod
    def constant(cls, dim: int, value: RationalLike) -> "AffineForm":
        return cls((Fraction(0),) * dim, as_rational(value))

    @classmethod
    def variable(cls, dim: int, index: int) -> "AffineForm":
        if not 0 <= index < dim:
            raise ValueError(f"variable index {index} out of range for dimension {dim}")
        coeffs = tuple(Fraction(1 if i == index else 0) for i in range(dim))
        return cls(coeffs, Fraction(0))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def evaluate(self, point: Sequence[RationalLike]) -> Fraction:
        vec = rational_vector(point, self.dim)
        return sum((c * v for c, v in zip(self.coeffs, vec)), start=self.const)

    def _check_dim(self, other: "AffineForm") -> None:
        if self.dim != other.dim:
            raise ValueError("affine forms have mismatched dimensions")

    def __add__(self, other):
        if isinstance(other, AffineForm):
            self._check_dim(other)
            return AffineForm(
                tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                self.const + other.const,
            )
        if isinstance(other, _SCALARS):
            return AffineForm(self.coeffs, self.const + other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return AffineForm(tuple(-c for c in self.coeffs), -self.const)

    def __sub__(self, other):
        if isinstance(other, (AffineForm, *_SCALARS)):
            return self + (-other if isinstance(other, AffineForm) else -as_rational(other))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _SCALARS):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, AffineForm):
            self._check_dim(other)
            n = self.dim
            half = Fraction(1, 2)
            quad = tuple(
                tuple(
                    half * (self.coeffs[i] * other.coeffs[j] + other.coeffs[i] * self.coeffs[j])
                    for j in range(n)
                )
                for i in range(n)
            )
            lin = tuple(
                self.const * other.coeffs[i] + other.const * self.coeffs[i]
                for i in range(n)
            )
            return QuadraticForm(quad, lin, self.const * other.const)
        if isinstance(other, _SCALARS):
            scalar = as_rational(other)
            return AffineForm(tuple(c * scalar for c in self.coeffs), self.const * scalar)
        return NotImplemented

    __rmul__ = __mul__


@dataclass(frozen=True)
class QuadraticForm:
    """An exact quadratic map ``v -> v' Q v + lin . v + const`` with symmetric Q.

    Symmetry is enforced at construction so the gradient is simply
    ``2 Q v + lin`` with no hidden factor bookkeeping.
    """

    quad: tuple[tuple[Fraction, ...], ...]
    lin: tuple[Fraction, ...]
    const: Fraction

    def __post_init__(self):
        lin = rational_vector(self.lin)
        n = len(lin)
        if len(self.quad) != n:
            raise ValueError(f"quadratic matrix must be {n}x{n} to match the linear part")
        quad = tuple(rational_vector(row, n) for row in self.quad)
        for i in range(n):
            for j in range(i):
                if quad[i][j] != quad[j][i]:
                    raise ValueError("quadratic coefficient matrix must be symmetric")
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "const", as_rational(self.const))

    @classmethod
    def zero(cls, dim: int) -> "QuadraticForm":
        row = (Fraction(0),) * dim
        return cls((row,) * dim, row, Fraction(0))

    @property
    def dim(self) -> int:
        return len(self.lin)

    def evaluate(self, point: Sequence[RationalLike]) -> Fraction:
        v = rational_vector(point, self.dim)
        total = self.const
        for i in range(self.dim):
            total += self.lin[i] * v[i]
            row = self.quad[i]
            for j in range(self.dim):
                total += row[j] * v[i] * v[j]
        return total

    def gradient(self, point: Sequence[RationalLike]) -> tuple[Fraction, ...]:
        v = rational_vector(point, self.dim)
        return tuple(
            2 * sum(self.quad[i][j] * v[j] for j in range(self.dim)) + self.lin[i]
            for i in range(self.dim)
        )

    def slice(self, keep: Sequence[int], fixed: Mapping[int, RationalLike]) -> "QuadraticForm":
        """Restrict to the ``keep`` coordinates, pinning the rest at ``fixed`` values.

        The result is a quadratic form over len(keep) variables whose value at
        y equals this form's value at the full vector assembled from y and the
        fixed entries. ``keep`` and ``fixed`` together must cover every
        coordinate exactly once.
        """
        n = self.dim
        keep = tuple(keep)
        fixed_vals = {i: as_rational(v) for i, v in fixed.items()}
        seen = set(keep) | set(fixed_vals)
        if len(keep) + len(fixed_vals) != n or seen != set(range(n)):
            raise ValueError("keep and fixed must partition the coordinate indices")
        m = len(keep)
        quad = tuple(
            tuple(self.quad[keep[r]][keep[s]] for s in range(m)) for r in range(m)
        )
        lin = tuple(
            self.lin[keep[r]]
            + 2 * sum(self.quad[keep[r]][f] * val for f, val in fixed_vals.items())
            for r in range(m)
        )
        const = self.const
        for f, val in fixed_vals.items():
            const += self.lin[f] * val
        for f, vf in fixed_vals.items():
            for g, vg in fixed_vals.items():
                const += self.quad[f][g] * vf * vg
        return QuadraticForm(quad, lin, const)

    def _check_dim(self, other: "QuadraticForm") -> None:
        if self.dim != other.dim:
            raise ValueError("quadratic forms have mismatched dimensions")

    def __add__(self, other):
        if isinstance(other, QuadraticForm):
            self._check_dim(other)
            quad = tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.quad, other.quad)
            )
            lin = tuple(a + b for a, b in zip(self.lin, other.lin))
            return QuadraticForm(quad, lin, self.const + other.const)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QuadraticForm):
            return self + (-other)
        return NotImplemented

    def __neg__(self):
        quad = tuple(tuple(-e for e in row) for row in self.quad)
        return QuadraticForm(quad, tuple(-e for e in self.lin), -self.const)

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            s = as_rational(other)
            quad = tuple(tuple(e * s for e in row) for row in self.quad)
            return QuadraticForm(quad, tuple(e * s for e in self.lin), self.const * s)
        return NotImplemented

    __rmul__ = __mul__
