"""Catalog of the twelve translationally shape-invariant potentials.

Every family is described in an auxiliary variable ``y`` obeying
``dy/dx = P(y)`` with ``P`` at most quadratic.  Potentials are shifted so the
ground-state energy is zero, and the superpotential ``w0`` solves
``-P w0' + w0^2 = V`` exactly.

Parameter names on the public surface: ``A``, ``B``, ``alpha``, ``omega``,
``gamma``, ``l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
import math

import numpy as np

from .errors import (
    ConsistencyError,
    ConstraintViolation,
    IndexBeyondBoundError,
    InvalidInputError,
    UnknownFamilyError,
)
from .ratfun import GaussRational, I_UNIT, Poly, RationalFunction, as_gauss

__all__ = [
    "ChangeOfVariable",
    "Family",
    "FamilyInstance",
    "FAMILY_NAMES",
    "SAMPLE_PARAMS",
    "list_families",
    "get_family",
    "instantiate",
    "energy",
    "param_shift",
    "parse_rational",
]

INF = math.inf


def parse_rational(text) -> Fraction:
    """Exact parse of ``"p/q"``, integer or finite decimal strings."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise InvalidInputError(f"floats are not accepted as exact parameters: {text!r}")
    s = str(text).strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"cannot parse {s!r} as an exact rational") from exc


@dataclass(frozen=True)
class ChangeOfVariable:
    """x -> y map with ``dy/dx = P(y)``.

    ``kind`` selects the closed form of the map; ``rate`` is the coefficient of
    x inside it.  For ``tanh-ipi4`` the working variable is the real
    ``t = tanh(rate*x)`` and the complex ``y = (t + i)/(1 + i t)`` is kept as a
    Moebius relation.
    """

    kind: str
    label: str
    rate: Fraction
    P: Poly
    x_domain: tuple
    y_image: tuple
    phase_pi: Fraction = Fraction(0)

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        r = float(self.rate)
        k = self.kind
        if k == "identity":
            return x.copy()
        if k == "reciprocal":
            return 1.0 / x
        if k == "expneg":
            return np.exp(-r * x)
        if k == "tan":
            if self.phase_pi == Fraction(-1, 2):
                return -1.0 / np.tan(r * x)
            return np.tan(r * x)
        if k in ("tanh", "tanh-ipi4"):
            return np.tanh(r * x)
        if k == "coth":
            return -1.0 / np.tanh(r * x)
        raise InvalidInputError(f"unknown change of variable {k!r}")

    def contains(self, x) -> bool:
        lo, hi = self.x_domain
        x = np.asarray(x, dtype=float)
        return bool(np.all((x > lo) & (x < hi)))

    def complex_y(self, t):
        """Complex variable for the shifted-phase chart."""
        t = np.asarray(t)
        return (t + 1j) / (1 + 1j * t)

    def to_json(self):
        return {
            "kind": self.label,
            "rate": f"{self.rate.numerator}/{self.rate.denominator}",
            "P": self.P.to_json(),
            "x_domain": [_float_json(v) for v in self.x_domain],
            "y_image": [_float_json(v) for v in self.y_image],
        }


def _float_json(v):
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return float(v)


def _F(x):
    return Fraction(x)


# ---------------------------------------------------------------------------
# generic first- and second-category shapes


def _first_w0(a, lam1):
    return RationalFunction.from_poly(Poly([lam1 / (2 * a), a]))


def _first_R(a, lam1, s, ap):
    a1 = a + s * ap
    return lam1 * lam1 / (4 * a * a) + ap * a - lam1 * lam1 / (4 * a1 * a1) + ap * a1


def _first_phi(a, lam1, s):
    return -s * a * a + lam1 * lam1 / (4 * a * a)


def _second_w0(lam, mu):
    return RationalFunction(Poly([-mu, 0, lam]), Poly([0, 1]))


def _second_R(lam, mu, s, ap):
    lam1, mu1 = lam + s * ap, mu + ap
    return ap * (lam + s * mu) - 2 * lam * mu + ap * (lam1 + s * mu1) + 2 * lam1 * mu1


def _second_phi(lam, mu, s):
    c = lam + s * mu
    return c * c


class Family:
    """Descriptor for one family: parameters, constraints and per-family rules."""

    name = ""
    category = ""  # first, second or exceptional
    expected_class = ""  # I or II
    param_names: tuple = ()
    constraint_text: tuple = ()
    known_root_values: tuple = ()
    sign = 0
    description = ""

    # -- hooks ------------------------------------------------------------------
    def check(self, p):
        """Return the first violated constraint text, or None."""
        raise NotImplementedError

    def natural(self, p) -> tuple:
        raise NotImplementedError

    def alpha_prime(self, p):
        return Fraction(0)

    def shift(self, p, k) -> dict:
        raise NotImplementedError

    def w0(self, p) -> RationalFunction:
        raise NotImplementedError

    def R(self, p) -> GaussRational:
        raise NotImplementedError

    def closed_energy(self, p, n) -> GaussRational:
        raise NotImplementedError

    def bound_ok(self, p, n) -> bool:
        return True

    def cov(self, p) -> ChangeOfVariable:
        raise NotImplementedError

    def P(self, p) -> Poly:
        return self.cov(p).P

    def max_bound_index(self, p):
        """Largest admissible level index, or None when unbounded."""
        if self.bounded is False:
            return None
        n = 0
        if not self.bound_ok(p, 0):
            return -1
        while self.bound_ok(p, n + 1):
            n += 1
        return n

    bounded = False

    def descriptor(self):
        return {
            "name": self.name,
            "category": self.category,
            "parameters": list(self.param_names),
            "constraints": list(self.constraint_text),
            "description": self.description,
        }


class _FirstCategory(Family):
    category = "first"
    expected_class = "I"

    def lam1(self, p):
        raise NotImplementedError

    def natural(self, p):
        return (as_gauss(p["A"]), as_gauss(self.lam1(p)))

    def w0(self, p):
        a, lam1 = self.natural(p)
        return _first_w0(a, lam1)

    def R(self, p):
        a, lam1 = self.natural(p)
        return _first_R(a, lam1, self.sign, as_gauss(self.alpha_prime(p)))

    def closed_energy(self, p, n):
        a, lam1 = self.natural(p)
        an, _ = self.natural(self.shift(p, n))
        return _first_phi(a, lam1, self.sign) - _first_phi(an, lam1, self.sign)

    def shift(self, p, k):
        q = dict(p)
        q["A"] = p["A"] + self.sign * self.alpha_prime(p) * k
        return q

    def P(self, p):
        ap = self.alpha_prime(p)
        return Poly([ap, 0, self.sign * ap])


class _SecondCategory(Family):
    category = "second"
    expected_class = "II"

    def w0(self, p):
        lam, mu = self.natural(p)
        return _second_w0(lam, mu)

    def R(self, p):
        lam, mu = self.natural(p)
        return _second_R(lam, mu, self.sign, as_gauss(self.alpha_prime(p)))

    def closed_energy(self, p, n):
        lam, mu = self.natural(p)
        lam_n, mu_n = self.natural(self.shift(p, n))
        return self.sign * (_second_phi(lam_n, mu_n, self.sign) - _second_phi(lam, mu, self.sign))

    def P(self, p):
        ap = self.alpha_prime(p)
        return Poly([ap, 0, self.sign * ap])


# ---------------------------------------------------------------------------
# exceptional families


class Harmonic(Family):
    name = "harmonic"
    category = "exceptional"
    expected_class = "I"
    param_names = ("omega",)
    constraint_text = ("omega > 0",)
    description = "harmonic oscillator on the real line, y = x"

    def check(self, p):
        return None if p["omega"] > 0 else "omega > 0"

    def natural(self, p):
        return (as_gauss(p["omega"] / 2),)

    def shift(self, p, k):
        return dict(p)

    def w0(self, p):
        return RationalFunction.from_poly(Poly([0, p["omega"] / 2]))

    def R(self, p):
        return as_gauss(p["omega"])

    def closed_energy(self, p, n):
        return as_gauss(n * p["omega"])

    def cov(self, p):
        return ChangeOfVariable("identity", "Identity", _F(1), Poly([1]), (-INF, INF), (-INF, INF))


class Isotonic(Family):
    name = "isotonic"
    category = "exceptional"
    expected_class = "II"
    param_names = ("omega", "l")
    constraint_text = ("omega > 0", "l > 0")
    known_root_values = (0,)
    description = "radial oscillator with centrifugal barrier on x > 0, y = x"

    def check(self, p):
        if not p["omega"] > 0:
            return "omega > 0"
        if not p["l"] > 0:
            return "l > 0"
        return None

    def natural(self, p):
        return (as_gauss(p["omega"] / 2), as_gauss(p["l"] + 1))

    def shift(self, p, k):
        q = dict(p)
        q["l"] = p["l"] + k
        return q

    def w0(self, p):
        return RationalFunction(Poly([-(p["l"] + 1), 0, p["omega"] / 2]), Poly([0, 1]))

    def R(self, p):
        return as_gauss(2 * p["omega"])

    def closed_energy(self, p, n):
        return as_gauss(2 * n * p["omega"])

    def cov(self, p):
        return ChangeOfVariable("identity", "Identity", _F(1), Poly([1]), (0.0, INF), (0.0, INF))


class Kepler(Family):
    name = "kepler"
    category = "exceptional"
    expected_class = "I"
    param_names = ("gamma", "l")
    constraint_text = ("gamma > 0", "l > 0")
    known_root_values = (0,)
    description = "Coulomb problem with centrifugal barrier, y = 1/x"

    def check(self, p):
        if not p["gamma"] > 0:
            return "gamma > 0"
        if not p["l"] > 0:
            return "l > 0"
        return None

    def natural(self, p):
        return (as_gauss(p["l"] + 1),)

    def shift(self, p, k):
        q = dict(p)
        q["l"] = p["l"] + k
        return q

    def w0(self, p):
        a = p["l"] + 1
        return RationalFunction.from_poly(Poly([p["gamma"] / (2 * a), -a]))

    def _level_const(self, p, a):
        return p["gamma"] ** 2 / (4 * a * a)

    def R(self, p):
        a = p["l"] + 1
        return as_gauss(self._level_const(p, a) - self._level_const(p, a + 1))

    def closed_energy(self, p, n):
        a = p["l"] + 1
        return as_gauss(self._level_const(p, a) - self._level_const(p, a + n))

    def cov(self, p):
        return ChangeOfVariable("reciprocal", "Reciprocal", _F(1), Poly([0, 0, -1]), (0.0, INF), (0.0, INF))


class Morse(Family):
    name = "morse"
    category = "exceptional"
    expected_class = "I"
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "B > 0", "A > 0")
    known_root_values = (0,)
    bounded = True
    description = "Morse oscillator, y = exp(-alpha x)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not p["B"] > 0:
            return "B > 0"
        if not p["A"] > 0:
            return "A > 0"
        return None

    def natural(self, p):
        return (as_gauss(p["A"]),)

    def shift(self, p, k):
        q = dict(p)
        q["A"] = p["A"] - k * p["alpha"]
        return q

    def w0(self, p):
        return RationalFunction.from_poly(Poly([p["A"], -p["B"]]))

    def R(self, p):
        a = p["A"]
        a1 = a - p["alpha"]
        return as_gauss(a * a - a1 * a1)

    def closed_energy(self, p, n):
        return as_gauss(n * p["alpha"] * (2 * p["A"] - n * p["alpha"]))

    def bound_ok(self, p, n):
        return p["A"] - n * p["alpha"] > 0

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("expneg", "ExpNeg", al, Poly([0, -al]), (-INF, INF), (0.0, INF))


# ---------------------------------------------------------------------------
# first category


class RosenMorse1(_FirstCategory):
    name = "rosen-morse-1"
    sign = 1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "A > 0")
    known_root_values = ()
    description = "trigonometric Rosen-Morse on (0, pi/alpha), y = -cot(alpha x)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not p["A"] > 0:
            return "A > 0"
        return None

    def alpha_prime(self, p):
        return p["alpha"]

    def lam1(self, p):
        return -2 * p["B"]

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("tan", "Tan", al, self.P(p), (0.0, math.pi / float(al)), (-INF, INF),
                                phase_pi=Fraction(-1, 2))


class RosenMorse2(_FirstCategory):
    name = "rosen-morse-2"
    sign = -1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "A > 0", "|B| < A^2")
    bounded = True
    description = "hyperbolic Rosen-Morse on the real line, y = tanh(alpha x)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not p["A"] > 0:
            return "A > 0"
        if not abs(p["B"]) < p["A"] ** 2:
            return "|B| < A^2"
        return None

    def alpha_prime(self, p):
        return p["alpha"]

    def lam1(self, p):
        return 2 * p["B"]

    def bound_ok(self, p, n):
        an = p["A"] - n * p["alpha"]
        return an > 0 and an * an > abs(p["B"])

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("tanh", "Tanh", al, self.P(p), (-INF, INF), (-1.0, 1.0))


class Eckart(_FirstCategory):
    name = "eckart"
    sign = -1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "A > 0", "B > A^2")
    bounded = True
    description = "Eckart potential on x > 0, y = -coth(alpha x)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not p["A"] > 0:
            return "A > 0"
        if not p["B"] > p["A"] ** 2:
            return "B > A^2"
        return None

    def alpha_prime(self, p):
        return -p["alpha"]

    def lam1(self, p):
        return 2 * p["B"]

    def bound_ok(self, p, n):
        an = p["A"] + n * p["alpha"]
        return an * an < p["B"]

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("coth", "Coth", al, self.P(p), (0.0, INF), (-INF, -1.0))


# ---------------------------------------------------------------------------
# second category


class PoschlTeller(_SecondCategory):
    name = "poschl-teller"
    sign = -1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "0 < A < B")
    known_root_values = (0,)
    bounded = True
    description = "hyperbolic Poschl-Teller on x > 0, y = tanh(alpha x / 2)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not 0 < p["A"] < p["B"]:
            return "0 < A < B"
        return None

    def alpha_prime(self, p):
        return p["alpha"] / 2

    def natural(self, p):
        return (as_gauss((p["A"] + p["B"]) / 2), as_gauss((p["B"] - p["A"]) / 2))

    def shift(self, p, k):
        q = dict(p)
        q["A"] = p["A"] - k * p["alpha"]
        return q

    def bound_ok(self, p, n):
        return p["A"] - n * p["alpha"] > 0

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("tanh", "HalfTanh", al / 2, self.P(p), (0.0, INF), (0.0, 1.0))


class PoschlTeller1(_SecondCategory):
    name = "poschl-teller-1"
    sign = 1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "A > 0", "B > 0")
    known_root_values = (0,)
    description = "trigonometric Poschl-Teller on (0, pi/(2 alpha)), y = tan(alpha x)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not p["A"] > 0:
            return "A > 0"
        if not p["B"] > 0:
            return "B > 0"
        return None

    def alpha_prime(self, p):
        return p["alpha"]

    def natural(self, p):
        return (as_gauss(p["A"]), as_gauss(p["B"]))

    def shift(self, p, k):
        q = dict(p)
        q["A"] = p["A"] + k * p["alpha"]
        q["B"] = p["B"] + k * p["alpha"]
        return q

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("tan", "Tan", al, self.P(p), (0.0, math.pi / (2 * float(al))), (0.0, INF))


class PoschlTeller2(_SecondCategory):
    name = "poschl-teller-2"
    sign = -1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "0 < B < A")
    known_root_values = (0,)
    bounded = True
    description = "hyperbolic Poschl-Teller II on x > 0, y = tanh(alpha x)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not 0 < p["B"] < p["A"]:
            return "0 < B < A"
        return None

    def alpha_prime(self, p):
        return p["alpha"]

    def natural(self, p):
        return (as_gauss(p["A"]), as_gauss(p["B"]))

    def shift(self, p, k):
        q = dict(p)
        q["A"] = p["A"] - k * p["alpha"]
        q["B"] = p["B"] + k * p["alpha"]
        return q

    def bound_ok(self, p, n):
        return p["A"] - p["B"] - 2 * n * p["alpha"] > 0

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("tanh", "Tanh", al, self.P(p), (0.0, INF), (0.0, 1.0))


class Scarf1(_SecondCategory):
    name = "scarf-1"
    sign = 1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "B < A", "A + B > 0")
    known_root_values = (0,)
    description = "trigonometric Scarf on (0, pi/alpha), y = tan(alpha x / 2)"

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not p["B"] < p["A"]:
            return "B < A"
        if not p["A"] + p["B"] > 0:
            return "A + B > 0"
        return None

    def alpha_prime(self, p):
        return p["alpha"] / 2

    def natural(self, p):
        return (as_gauss((p["A"] + p["B"]) / 2), as_gauss((p["A"] - p["B"]) / 2))

    def shift(self, p, k):
        q = dict(p)
        q["A"] = p["A"] + k * p["alpha"]
        return q

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("tan", "HalfTan", al / 2, self.P(p), (0.0, math.pi / float(al)), (0.0, INF))


class Scarf2(_SecondCategory):
    name = "scarf-2"
    sign = -1
    param_names = ("A", "B", "alpha")
    constraint_text = ("alpha > 0", "A > 0")
    known_root_values = ()
    bounded = True
    description = "hyperbolic Scarf on the real line, y = tanh(alpha x / 2 + i pi / 4)"

    # y = (t + i) / (1 + i t) with real t = tanh(alpha x / 2)
    MOEBIUS = (1, I_UNIT, I_UNIT, 1)

    def check(self, p):
        if not p["alpha"] > 0:
            return "alpha > 0"
        if not p["A"] > 0:
            return "A > 0"
        return None

    def alpha_prime(self, p):
        return p["alpha"] / 2

    def natural(self, p):
        A, B = p["A"], p["B"]
        return (GaussRational(A / 2, B / 2), GaussRational(-A / 2, B / 2))

    def shift(self, p, k):
        q = dict(p)
        q["A"] = p["A"] - k * p["alpha"]
        return q

    def bound_ok(self, p, n):
        return p["A"] - n * p["alpha"] > 0

    def w0_complex(self, p):
        """Superpotential in the complex variable y."""
        lam, mu = self.natural(p)
        return _second_w0(lam, mu)

    def w0(self, p):
        return self.w0_complex(p).compose_mobius(*self.MOEBIUS)

    def cov(self, p):
        al = p["alpha"]
        return ChangeOfVariable("tanh-ipi4", "HalfTanhShiftedIPi4", al / 2, self.P(p), (-INF, INF), (-1.0, 1.0))


_REGISTRY = {
    f.name: f
    for f in (
        Harmonic(),
        Isotonic(),
        Kepler(),
        Morse(),
        RosenMorse1(),
        RosenMorse2(),
        Eckart(),
        PoschlTeller(),
        PoschlTeller1(),
        PoschlTeller2(),
        Scarf1(),
        Scarf2(),
    )
}

FAMILY_NAMES = tuple(_REGISTRY)


def _sp(**kw):
    return {k: parse_rational(v) for k, v in kw.items()}


#: three admissible parameter sets per family, used by tests and `verify --all`
SAMPLE_PARAMS = {
    "harmonic": [_sp(omega=2), _sp(omega="1/2"), _sp(omega=3)],
    "isotonic": [_sp(omega=2, l=1), _sp(omega=1, l="1/2"), _sp(omega=3, l=2)],
    "kepler": [_sp(gamma=2, l=1), _sp(gamma=4, l="1/2"), _sp(gamma=6, l=2)],
    "morse": [_sp(A=7, B=1, alpha=1), _sp(A=2, B=1, alpha=1), _sp(A="9/2", B=2, alpha="1/2")],
    "rosen-morse-1": [_sp(A=2, B=1, alpha=1), _sp(A="3/2", B=-1, alpha="1/2"), _sp(A=3, B=2, alpha=1)],
    "rosen-morse-2": [_sp(A=8, B=1, alpha=1), _sp(A=3, B=1, alpha=1), _sp(A=5, B=-2, alpha="1/2")],
    "eckart": [_sp(A=1, B=10, alpha=1), _sp(A="1/2", B=5, alpha="1/2"), _sp(A=2, B=30, alpha=1)],
    "poschl-teller": [_sp(A=6, B=8, alpha=1), _sp(A="3/2", B="5/2", alpha="1/2"), _sp(A=4, B=9, alpha=1)],
    "poschl-teller-1": [_sp(A=1, B=2, alpha=1), _sp(A="3/2", B="1/2", alpha="1/2"), _sp(A=2, B=3, alpha=1)],
    "poschl-teller-2": [_sp(A=12, B=1, alpha=1), _sp(A=5, B=2, alpha="1/2"), _sp(A="9/2", B="1/2", alpha="1/4")],
    "scarf-1": [_sp(A=2, B=1, alpha=1), _sp(A=3, B=-1, alpha="1/2"), _sp(A="5/2", B="1/2", alpha=1)],
    "scarf-2": [_sp(A=6, B=1, alpha=1), _sp(A=3, B=2, alpha="1/2"), _sp(A="5/2", B=-1, alpha=1)],
}


def get_family(name) -> Family:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownFamilyError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}") from None


def list_families():
    """Descriptors of all twelve families, catalog order."""
    out = []
    for name, fam in _REGISTRY.items():
        d = fam.descriptor()
        sample = SAMPLE_PARAMS[name][0]
        inst = instantiate(name, sample)
        d["example"] = {
            "params": {k: f"{v.numerator}/{v.denominator}" for k, v in sample.items()},
            "change_of_variable": inst.cov.to_json(),
            "w0": inst.w0.to_json(),
        }
        out.append(d)
    return out


@dataclass(frozen=True, eq=False)
class FamilyInstance:
    """A concrete potential: family plus exact parameter values."""

    family: Family
    params: MappingProxyType
    cov: ChangeOfVariable
    w0: RationalFunction
    potential: RationalFunction
    max_bound_index: object  # int or None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def name(self) -> str:
        return self.family.name

    @property
    def category(self) -> str:
        return self.family.category

    @property
    def P(self) -> Poly:
        return self.cov.P

    @property
    def natural(self) -> tuple:
        return self.family.natural(self.params)

    @property
    def key(self):
        return (self.name, tuple(sorted(self.params.items())))

    def __eq__(self, other):
        return isinstance(other, FamilyInstance) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @cached_property
    def known_roots(self) -> tuple:
        """Exact roots of P together with the fixed poles of w0."""
        roots = []
        ap = self.P.coeff(0)
        if self.P.degree == 2 and ap:
            s = self.P.coeff(2) / ap
            roots += [I_UNIT, -I_UNIT] if s == 1 else [GaussRational(1), GaussRational(-1)]
        elif self.P.degree >= 1:
            roots.append(GaussRational(0))
        for r in self.family.known_root_values:
            g = as_gauss(r)
            if g not in roots:
                roots.append(g)
        if isinstance(self.family, Scarf2):
            roots += [I_UNIT, -I_UNIT]
        return tuple(roots)

    def R(self) -> GaussRational:
        return self.family.R(self.params)

    def check_index(self, n):
        if n < 0:
            raise InvalidInputError(f"level index must be nonnegative, got {n}")
        mb = self.max_bound_index
        if mb is not None and n > mb:
            raise IndexBeyondBoundError(n, mb)

    def shifted(self, k) -> FamilyInstance:
        """Instance with parameters shifted k times (constraints not re-checked)."""
        key = ("shift", k)
        inst = self._cache.get(key)
        if inst is None:
            inst = _build(self.family, self.family.shift(dict(self.params), k), check=False)
            self._cache[key] = inst
        return inst

    def energy(self, n) -> GaussRational:
        return energy(self, n)

    def to_json(self):
        return {
            "family": self.name,
            "params": {k: f"{v.numerator}/{v.denominator}" for k, v in self.params.items()},
            "category": self.category,
            "change_of_variable": self.cov.to_json(),
            "w0": self.w0.to_json(),
            "potential": self.potential.to_json(),
            "max_bound_index": self.max_bound_index,
        }

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"FamilyInstance({self.name}: {ps})"


def _coerce_params(fam: Family, params) -> dict:
    unknown = set(params) - set(fam.param_names)
    if unknown:
        raise InvalidInputError(f"unknown parameter(s) for {fam.name}: {', '.join(sorted(unknown))}")
    missing = [k for k in fam.param_names if k not in params]
    if missing:
        raise InvalidInputError(f"missing parameter(s) for {fam.name}: {', '.join(missing)}")
    return {k: parse_rational(params[k]) for k in fam.param_names}


def _build(fam: Family, p: dict, check=True) -> FamilyInstance:
    if check:
        bad = fam.check(p)
        if bad is not None:
            raise ConstraintViolation(f"{fam.name}: constraint violated: {bad}")
    cov = fam.cov(p)
    w0 = fam.w0(p)
    V = w0 * w0 - RationalFunction.from_poly(cov.P) * w0.derivative()
    mb = fam.max_bound_index(p)
    inst = FamilyInstance(fam, MappingProxyType(dict(p)), cov, w0, V, mb)
    if check:
        if fam.closed_energy(p, 0) != 0:
            raise ConsistencyError(f"{fam.name}: closed-form ground energy is not zero")
        if isinstance(fam, Scarf2) and not V.is_real():
            raise ConsistencyError("scarf-2 potential has non-real coefficients in the real chart")
    return inst


def instantiate(name, params) -> FamilyInstance:
    fam = get_family(name)
    return _build(fam, _coerce_params(fam, params))


def param_shift(inst: FamilyInstance, k: int) -> dict:
    if k < 0:
        raise InvalidInputError("shift count must be nonnegative")
    return inst.family.shift(dict(inst.params), k)


def energy(inst: FamilyInstance, n: int) -> GaussRational:
    """Exact E_n, computed by telescoping R and by the closed form; both must agree."""
    inst.check_index(n)
    cached = inst._cache.get(("E", n))
    if cached is not None:
        return cached
    fam, p = inst.family, dict(inst.params)
    telescoped = GaussRational(0)
    for k in range(n):
        telescoped = telescoped + fam.R(fam.shift(p, k))
    closed = fam.closed_energy(p, n)
    if telescoped != closed:
        raise ConsistencyError(f"{inst!r}: telescoped E_{n} = {telescoped} but closed form gives {closed}")
    inst._cache[("E", n)] = closed
    return closed
