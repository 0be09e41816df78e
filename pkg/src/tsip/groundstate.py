"""Ground states from raw quadratic or Laurent potential coefficients.

For ``dy/dx = alpha (1 + s y^2)`` the potential is either
``l2 y^2 + l1 y + l0`` (first category) or ``l2 y^2 + m2 / y^2 + l0``
(second category).  The ground-state RS function is then a degree-one
polynomial, respectively ``b1 y + b_1 / y``, whose coefficients follow from
the root map :func:`beta`.  Results stay exact whenever the square roots are
rational and fall back to floats otherwise.

The degenerate maps ``P = 1``, ``P = -alpha y`` and ``P = -y^2`` are solved
directly by :func:`solve_degenerate`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, sqrt

import numpy as np

from .errors import InvalidInputError, NegativeDiscriminantError
from .ratfun import Poly, RationalFunction

__all__ = [
    "FirstCategoryInput",
    "SecondCategoryInput",
    "GroundSolution",
    "rational_sqrt",
    "beta",
    "solve_first",
    "solve_second",
    "solve_degenerate",
    "raw_coefficients",
    "solve_raw",
    "ansatz_residual",
]

BRANCHES = {"plus": 1, "minus": -1}


def _branch_sign(branch) -> int:
    if branch in BRANCHES:
        return BRANCHES[branch]
    if branch in (1, -1):
        return branch
    raise InvalidInputError(f"branch must be 'plus' or 'minus', got {branch!r}")


def _exact(x):
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return x


def rational_sqrt(q):
    """Exact square root of a nonnegative rational, or None if irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sqrt(x):
    """Square root that stays exact when it can; returns (value, exact)."""
    if isinstance(x, Fraction):
        if x < 0:
            raise NegativeDiscriminantError(f"negative discriminant {x}")
        r = rational_sqrt(x)
        if r is not None:
            return r, True
        return sqrt(x), False
    if x < 0:
        raise NegativeDiscriminantError(f"negative discriminant {x}")
    return sqrt(x), False


def beta(lam, alpha, branch="plus"):
    """Root map ``+-alpha/2 + sqrt((alpha/2)^2 + lam)``.

    Returns a Fraction when the discriminant is a rational square and a float
    otherwise.
    """
    s = _branch_sign(branch)
    lam, alpha = _exact(lam), _exact(alpha)
    half = alpha / 2
    root, _ = _sqrt(half * half + lam)
    return s * half + root


@dataclass(frozen=True)
class FirstCategoryInput:
    lam2: object
    lam1: object
    lam0: object
    alpha: object
    branch: str = "plus"


@dataclass(frozen=True)
class SecondCategoryInput:
    lam2: object
    mu2: object
    lam0: object
    alpha: object
    branch: str = "plus"


@dataclass(frozen=True)
class GroundSolution:
    b0: object
    b1: object
    bm1: object  # None for polynomial ground states
    E0: object
    exact: bool
    P: Poly
    V: object = None  # exact RationalFunction when the inputs were exact
    coeffs: tuple = ()  # (lam2, lam1, lam0, mu2)

    @property
    def exactness(self) -> str:
        return "exact-rational" if self.exact else "floating"

    def w(self) -> RationalFunction:
        """Ground-state RS function (exact solutions only)."""
        if not self.exact:
            raise InvalidInputError("floating ground state has no exact RS function")
        if self.bm1 is None:
            return RationalFunction.from_poly(Poly([self.b0, self.b1]))
        return RationalFunction.laurent({1: self.b1, 0: self.b0, -1: self.bm1})

    def residual_max(self, samples=None) -> float:
        """Max |-P w' + w^2 - V + E0| over sample points (0 for exact solutions)."""
        if self.exact and self.V is not None:
            res = _riccati(self.P, self.w(), self.V, self.E0)
            return 0.0 if res.is_zero() else float("inf")
        y = np.linspace(0.3, 2.7, 9) if samples is None else np.asarray(samples, dtype=float)
        b0, b1 = float(self.b0), float(self.b1)
        bm1 = 0.0 if self.bm1 is None else float(self.bm1)
        w = b0 + b1 * y + bm1 / y
        dw = b1 - bm1 / y**2
        Pv = self.P.evaluate(y).real
        V = self._Vnum(y)
        return float(np.max(np.abs(-Pv * dw + w * w - V + float(self.E0))))

    def _Vnum(self, y):
        l2, l1, l0, m2 = (float(c) for c in self.coeffs)
        return l2 * y**2 + l1 * y + l0 + m2 / y**2


def _riccati(P: Poly, w: RationalFunction, V: RationalFunction, E) -> RationalFunction:
    return w * w - RationalFunction.from_poly(P) * w.derivative() - V + E


def _potential(lam2, lam1, lam0, mu2):
    if all(isinstance(c, Fraction) for c in (lam2, lam1, lam0, mu2)):
        return RationalFunction.laurent({2: lam2, 1: lam1, 0: lam0, -2: mu2})
    return None


def _make(b0, b1, bm1, E0, exact, P, coeffs):
    lam2, lam1, lam0, mu2 = coeffs
    V = _potential(lam2, lam1, lam0, mu2) if exact else None
    return GroundSolution(b0, b1, bm1, E0, exact, P, V, coeffs)


def _is_exact(*xs):
    return all(isinstance(x, Fraction) for x in xs)


def solve_first(inp: FirstCategoryInput) -> GroundSolution:
    """Degree-one polynomial ground state for ``P = alpha (1 + s y^2)``."""
    s = _branch_sign(inp.branch)
    lam2, lam1, lam0, alpha = (_exact(v) for v in (inp.lam2, inp.lam1, inp.lam0, inp.alpha))
    if alpha == 0:
        raise InvalidInputError("alpha must be nonzero; use solve_degenerate for P = 1")
    b1 = beta(lam2, alpha, s)
    if not b1 > 0:
        raise InvalidInputError(f"no admissible ground state: root map gives b1 = {b1} <= 0")
    b0 = lam1 / (2 * b1)
    E0 = lam0 + alpha * b1 - b0 * b0
    P = Poly([alpha, 0, s * alpha]) if _is_exact(alpha) else Poly([Fraction(alpha), 0, s * Fraction(alpha)])
    return _make(b0, b1, None, E0, _is_exact(b0, b1, E0), P, (lam2, lam1, lam0, Fraction(0)))


def solve_second(inp: SecondCategoryInput) -> GroundSolution:
    """Laurent ground state ``b1 y + b_1 / y`` for ``P = alpha (1 + s y^2)``."""
    s = _branch_sign(inp.branch)
    lam2, mu2, lam0, alpha = (_exact(v) for v in (inp.lam2, inp.mu2, inp.lam0, inp.alpha))
    if alpha == 0:
        raise InvalidInputError("alpha must be nonzero; use solve_degenerate for P = 1")
    if mu2 < 0:
        raise InvalidInputError(f"mu2 must be nonnegative, got {mu2}")
    b1 = beta(lam2, alpha, s)
    if not b1 > 0:
        raise InvalidInputError(f"no admissible ground state: root map gives b1 = {b1} <= 0")
    bp = beta(mu2, alpha, "plus")
    bm1 = -bp
    E0 = lam0 + alpha * (b1 + s * bp) + 2 * b1 * bp
    zero = Fraction(0) if _is_exact(b1, bp) else 0.0
    P = Poly([alpha, 0, s * alpha]) if _is_exact(alpha) else Poly([Fraction(alpha), 0, s * Fraction(alpha)])
    return _make(zero, b1, bm1, E0, _is_exact(b1, bp, E0), P, (lam2, Fraction(0), lam0, mu2))


def solve_degenerate(kind, lam2, lam1=0, lam0=0, mu2=None, alpha=None) -> GroundSolution:
    """Ground state for the degenerate maps.

    ``kind`` is ``identity`` (P = 1, optional centrifugal ``mu2``),
    ``expneg`` (P = -alpha y) or ``reciprocal`` (P = -y^2).
    """
    lam2, lam1, lam0 = _exact(lam2), _exact(lam1), _exact(lam0)
    if kind == "identity":
        b1, _ = _sqrt(lam2)
        if not b1 > 0:
            raise InvalidInputError("identity map needs lam2 > 0")
        if mu2 is None:
            b0 = lam1 / (2 * b1)
            E0 = lam0 + b1 - b0 * b0
            return _make(b0, b1, None, E0, _is_exact(b0, b1, E0), Poly([1]), (lam2, lam1, lam0, Fraction(0)))
        mu2 = _exact(mu2)
        if lam1 != 0:
            raise InvalidInputError("centrifugal form takes no linear term")
        r, _ = _sqrt(Fraction(1, 4) + mu2 if isinstance(mu2, Fraction) else 0.25 + mu2)
        bm1 = -Fraction(1, 2) - r if isinstance(r, Fraction) else -0.5 - r
        E0 = lam0 + b1 - 2 * b1 * bm1
        zero = Fraction(0) if _is_exact(b1, bm1) else 0.0
        return _make(zero, b1, bm1, E0, _is_exact(b1, bm1, E0), Poly([1]), (lam2, lam1, lam0, mu2))
    if kind == "expneg":
        alpha = _exact(alpha)
        if alpha is None or not alpha > 0:
            raise InvalidInputError("expneg map needs alpha > 0")
        r, _ = _sqrt(lam2)
        if not r > 0:
            raise InvalidInputError("expneg map needs lam2 > 0")
        b1 = -r
        b0 = (lam1 - alpha * b1) / (2 * b1)
        E0 = lam0 - b0 * b0
        P = Poly([0, -alpha])
        return _make(b0, b1, None, E0, _is_exact(b0, b1, E0), P, (lam2, lam1, lam0, Fraction(0)))
    if kind == "reciprocal":
        disc = Fraction(1, 4) + lam2 if isinstance(lam2, Fraction) else 0.25 + lam2
        r, _ = _sqrt(disc)
        b1 = -Fraction(1, 2) - r if isinstance(r, Fraction) else -0.5 - r
        b0 = lam1 / (2 * b1)
        E0 = lam0 - b0 * b0
        P = Poly([0, 0, -1])
        return _make(b0, b1, None, E0, _is_exact(b0, b1, E0), P, (lam2, lam1, lam0, Fraction(0)))
    raise InvalidInputError(f"unknown degenerate kind {kind!r}")


def raw_coefficients(inst) -> dict:
    """Express a catalog instance as raw coefficients for the solvers above.

    Returns a dict with ``solver`` (first, second or a degenerate kind) and the
    matching keyword arguments.  The shifted-phase hyperbolic family has no
    real raw form and is refused.
    """
    from .families import Scarf2

    if isinstance(inst.family, Scarf2):
        raise InvalidInputError("scarf-2 has complex raw coefficients; build it from its native parameters")
    V = inst.potential
    P = inst.P
    low = V.den.degree  # 0 or 2
    num = V.num

    def c(k):
        g = num.coeff(k + low)
        if not g.is_real:
            raise InvalidInputError("raw coefficients must be real")
        return g.re

    lam2, lam1, lam0 = c(2), c(1), c(0)
    mu2 = c(-2) if low else Fraction(0)
    kind = inst.cov.kind
    if kind == "identity":
        return {"solver": "identity", "lam2": lam2, "lam1": lam1, "lam0": lam0,
                "mu2": mu2 if inst.name == "isotonic" else None}
    if kind == "expneg":
        return {"solver": "expneg", "lam2": lam2, "lam1": lam1, "lam0": lam0, "alpha": -P.coeff(1).re}
    if kind == "reciprocal":
        return {"solver": "reciprocal", "lam2": lam2, "lam1": lam1, "lam0": lam0}
    alpha = P.coeff(0).re
    branch = "plus" if P.coeff(2).re == alpha else "minus"
    if inst.category == "second":
        return {"solver": "second", "lam2": lam2, "mu2": mu2, "lam0": lam0, "alpha": alpha, "branch": branch}
    return {"solver": "first", "lam2": lam2, "lam1": lam1, "lam0": lam0, "alpha": alpha, "branch": branch}


def solve_raw(spec: dict) -> GroundSolution:
    """Dispatch a dict produced by :func:`raw_coefficients` (or the CLI)."""
    spec = dict(spec)
    solver = spec.pop("solver")
    if solver == "first":
        return solve_first(FirstCategoryInput(**spec))
    if solver == "second":
        return solve_second(SecondCategoryInput(**spec))
    return solve_degenerate(solver, **spec)


def ansatz_residual(P: Poly, V: RationalFunction, w: RationalFunction, E) -> RationalFunction:
    """Residual ``-P w' + w^2 - V + E`` of a trial RS function."""
    return _riccati(P, w, V, E)
