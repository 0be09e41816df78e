"""Exact polynomials and rational functions in one variable over Q(i).

Coefficients live in the field of Gaussian rationals.  A :class:`Poly` keeps
its coefficients as a tuple of Gaussian-integer pairs over one shared positive
integer denominator, which keeps multiplication and GCD work in plain Python
integers.  :class:`RationalFunction` values are always fully reduced with a
monic denominator, so structural equality coincides with mathematical
equality.

All objects are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
import numbers

import numpy as np

from .errors import DivisionError, InvalidInputError, PoleError, UnknownRootError

__all__ = [
    "GaussRational",
    "Poly",
    "RationalFunction",
    "PartialFractionForm",
    "POLE_GUARD",
    "poly_gcd",
    "ratfun_arith",
    "ratfun_derivative",
    "ratfun_eval",
    "partial_fractions",
    "as_gauss",
]

#: minimum distance |y - root| accepted by numeric evaluation
POLE_GUARD = 1e-9


def _lcm(a, b):
    return a // gcd(a, b) * b


class GaussRational:
    """Exact complex rational ``(a + b i) / d`` with ``d > 0`` and gcd(a, b, d) = 1."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussRational) and im == 0:
            self._a, self._b, self._d = re._a, re._b, re._d
            return
        r = _to_fraction(re)
        i = _to_fraction(im)
        d = _lcm(r.denominator, i.denominator)
        a = r.numerator * (d // r.denominator)
        b = i.numerator * (d // i.denominator)
        self._a, self._b, self._d = a, b, d
        self._normalize()

    @classmethod
    def _raw(cls, a, b, d):
        obj = object.__new__(cls)
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(a, b, d)
        if g > 1:
            a, b, d = a // g, b // g, d // g
        obj._a, obj._b, obj._d = a, b, d
        return obj

    def _normalize(self):
        if self._d == 0:
            raise DivisionError("zero denominator")
        if self._d < 0:
            self._a, self._b, self._d = -self._a, -self._b, -self._d
        g = gcd(self._a, self._b, self._d)
        if g > 1:
            self._a //= g
            self._b //= g
            self._d //= g

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def is_real(self) -> bool:
        return self._b == 0

    def conjugate(self) -> GaussRational:
        return GaussRational._raw(self._a, -self._b, self._d)

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __add__(self, other):
        o = as_gauss(other, strict=False)
        if o is None:
            return NotImplemented
        d = self._d * o._d
        return GaussRational._raw(self._a * o._d + o._a * self._d, self._b * o._d + o._b * self._d, d)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational._raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = as_gauss(other, strict=False)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = as_gauss(other, strict=False)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = as_gauss(other, strict=False)
        if o is None:
            return NotImplemented
        a, b, c, e = self._a, self._b, o._a, o._b
        return GaussRational._raw(a * c - b * e, a * e + b * c, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> GaussRational:
        n2 = self._a * self._a + self._b * self._b
        if n2 == 0:
            raise DivisionError("division by zero Gaussian rational")
        return GaussRational._raw(self._d * self._a, -self._d * self._b, n2)

    def __truediv__(self, other):
        o = as_gauss(other, strict=False)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = as_gauss(other, strict=False)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussRational._raw(1, 0, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = as_gauss(other, strict=False)
        if o is None:
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    def __float__(self):
        if self._b:
            raise TypeError(f"{self} is not real")
        return self._a / self._d

    def __repr__(self):
        return f"GaussRational({self})"

    def __str__(self):
        re, im = self.re, self.im
        if not im:
            return str(re)
        if not re:
            return f"{im}i"
        sign = "+" if im > 0 else "-"
        return f"({re}{sign}{abs(im)}i)"

    def to_json(self):
        """``"p/q"`` for real values, ``{"re": ..., "im": ...}`` otherwise."""
        if self._b == 0:
            return _frac_str(self.re)
        return {"re": _frac_str(self.re), "im": _frac_str(self.im)}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, dict):
            return cls(Fraction(obj["re"]), Fraction(obj.get("im", "0")))
        return cls(Fraction(obj))


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    raise InvalidInputError(f"exact rational expected, got {type(x).__name__} {x!r}")


def as_gauss(x, strict=True):
    """Coerce ints, Fractions and GaussRationals; floats are rejected."""
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        return GaussRational._raw(x, 0, 1)
    if isinstance(x, Fraction):
        return GaussRational._raw(x.numerator, 0, x.denominator)
    if strict:
        raise InvalidInputError(f"exact scalar expected, got {type(x).__name__} {x!r}")
    return None


ZERO = GaussRational._raw(0, 0, 1)
ONE = GaussRational._raw(1, 0, 1)
I_UNIT = GaussRational._raw(0, 1, 1)


class Poly:
    """Polynomial ``sum_k c_k y^k`` with Gaussian-rational coefficients.

    Internally ``c_k = (a_k + i b_k) / den``.  The zero polynomial has no
    coefficients and degree -1.
    """

    __slots__ = ("_num", "_den", "_roots")

    def __init__(self, coeffs=()):
        gs = [as_gauss(c) for c in coeffs]
        den = 1
        for g in gs:
            den = _lcm(den, g._d)
        num = tuple((g._a * (den // g._d), g._b * (den // g._d)) for g in gs)
        self._set(num, den)

    @classmethod
    def _from_ints(cls, num, den=1):
        obj = object.__new__(cls)
        obj._set(tuple(num), den)
        return obj

    def _set(self, num, den):
        end = len(num)
        while end and num[end - 1] == (0, 0):
            end -= 1
        num = num[:end]
        if not num:
            self._num, self._den, self._roots = (), 1, None
            return
        if den < 0:
            num = tuple((-a, -b) for a, b in num)
            den = -den
        g = den
        for a, b in num:
            if g == 1:
                break
            g = gcd(g, a, b)
        if g > 1:
            num = tuple((a // g, b // g) for a, b in num)
            den //= g
        self._num, self._den, self._roots = num, den, None

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def monomial(cls, k, c=1):
        return cls([0] * k + [c])

    @classmethod
    def linear_root(cls, root):
        """The monic factor ``y - root``."""
        return cls([-as_gauss(root), 1])

    # -- inspection ---------------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        d = self._den
        return tuple(GaussRational._raw(a, b, d) for a, b in self._num)

    @property
    def degree(self) -> int:
        return len(self._num) - 1

    def is_zero(self) -> bool:
        return not self._num

    def is_const(self) -> bool:
        return len(self._num) <= 1

    @property
    def lead(self) -> GaussRational:
        if not self._num:
            return ZERO
        a, b = self._num[-1]
        return GaussRational._raw(a, b, self._den)

    def coeff(self, k) -> GaussRational:
        if 0 <= k < len(self._num):
            a, b = self._num[k]
            return GaussRational._raw(a, b, self._den)
        return ZERO

    def is_real(self) -> bool:
        return all(b == 0 for _, b in self._num)

    def is_monic(self) -> bool:
        return bool(self._num) and self._num[-1] == (self._den, 0)

    def low_order(self) -> int:
        """Multiplicity of the root y = 0."""
        for k, ab in enumerate(self._num):
            if ab != (0, 0):
                return k
        return 0

    def is_monomial(self) -> bool:
        return bool(self._num) and all(ab == (0, 0) for ab in self._num[:-1])

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._num == other._num and self._den == other._den
        g = as_gauss(other, strict=False)
        if g is None:
            return NotImplemented
        return self == Poly([g])

    def __hash__(self):
        return hash((self._num, self._den))

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            g = as_gauss(other, strict=False)
            if g is None:
                return NotImplemented
            other = Poly([g])
        d1, d2 = self._den, other._den
        L = _lcm(d1, d2)
        s1, s2 = L // d1, L // d2
        n1, n2 = self._num, other._num
        out = []
        for k in range(max(len(n1), len(n2))):
            a1, b1 = n1[k] if k < len(n1) else (0, 0)
            a2, b2 = n2[k] if k < len(n2) else (0, 0)
            out.append((a1 * s1 + a2 * s2, b1 * s1 + b2 * s2))
        return Poly._from_ints(out, L)

    __radd__ = __add__

    def __neg__(self):
        return Poly._from_ints([(-a, -b) for a, b in self._num], self._den)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            g = as_gauss(other, strict=False)
            if g is None:
                return NotImplemented
            other = Poly([g])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            g = as_gauss(other, strict=False)
            if g is None:
                return NotImplemented
            return self.scale(g)
        n1, n2 = self._num, other._num
        if not n1 or not n2:
            return Poly()
        out_a = [0] * (len(n1) + len(n2) - 1)
        out_b = [0] * (len(n1) + len(n2) - 1)
        real = all(b == 0 for _, b in n1) and all(b == 0 for _, b in n2)
        if real:
            for i, (a, _) in enumerate(n1):
                if a:
                    for j, (c, _) in enumerate(n2):
                        out_a[i + j] += a * c
        else:
            for i, (a, b) in enumerate(n1):
                if a == 0 and b == 0:
                    continue
                for j, (c, e) in enumerate(n2):
                    out_a[i + j] += a * c - b * e
                    out_b[i + j] += a * e + b * c
        return Poly._from_ints(list(zip(out_a, out_b)), self._den * other._den)

    __rmul__ = __mul__

    def scale(self, c) -> Poly:
        g = as_gauss(c)
        x, y = g._a, g._b
        if y == 0:
            return Poly._from_ints([(a * x, b * x) for a, b in self._num], self._den * g._d)
        return Poly._from_ints([(a * x - b * y, a * y + b * x) for a, b in self._num], self._den * g._d)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Poly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift_degree(self, k) -> Poly:
        """Multiply by ``y**k``."""
        return Poly._from_ints([(0, 0)] * k + list(self._num), self._den)

    def monic(self) -> Poly:
        if not self._num:
            return self
        return self.scale(self.lead.inverse())

    def conjugate(self) -> Poly:
        return Poly._from_ints([(a, -b) for a, b in self._num], self._den)

    def derivative(self) -> Poly:
        return Poly._from_ints([(k * a, k * b) for k, (a, b) in enumerate(self._num)][1:], self._den)

    def antiderivative(self) -> Poly:
        """Antiderivative with zero constant term."""
        return Poly([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def __divmod__(self, other):
        return _poly_divmod(self, other)

    def __floordiv__(self, other):
        return _poly_divmod(self, other)[0]

    def __mod__(self, other):
        return _poly_divmod(self, other)[1]

    def exact_div(self, other) -> Poly:
        q, r = _poly_divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def __call__(self, y):
        """Exact Horner evaluation at a Gaussian rational."""
        g = as_gauss(y)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def taylor_shift(self, r) -> Poly:
        """Return ``p(y + r)``."""
        step = Poly([as_gauss(r), 1])
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * step + Poly([c])
        return acc

    def compose(self, other: Poly) -> Poly:
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + Poly([c])
        return acc

    # -- numerics -------------------------------------------------------------
    def numeric_coeffs(self) -> np.ndarray:
        """Complex coefficients, ascending degree."""
        d = self._den
        return np.array([complex(a / d, b / d) for a, b in self._num], dtype=complex)

    def evaluate(self, z):
        """Horner evaluation at complex doubles (scalar or array)."""
        z = np.asarray(z)
        c = self.numeric_coeffs()
        if c.size == 0:
            return np.zeros_like(z, dtype=complex)[()]
        if not np.iscomplexobj(z) and not np.any(c.imag):
            c = c.real
        acc = np.zeros_like(z, dtype=c.dtype) + c[-1]
        for ck in c[-2::-1]:
            acc = acc * z + ck
        return acc[()]

    def roots(self) -> np.ndarray:
        if self._roots is None:
            c = self.numeric_coeffs()
            self._roots = np.roots(c[::-1]) if c.size > 1 else np.array([], dtype=complex)
        return self._roots

    # -- display --------------------------------------------------------------
    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self._num:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("y" if k == 1 else f"y^{k}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(reversed(parts)).replace("+ -", "- ")

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, obj):
        return cls([GaussRational.from_json(c) for c in obj])


def _poly_divmod(p: Poly, q: Poly):
    if q.is_zero():
        raise DivisionError("polynomial division by zero")
    if p.degree < q.degree:
        return Poly(), p
    # work with the monic divisor, whose integer form has a real leading entry
    inv_lead = q.lead.inverse()
    qm = q.scale(inv_lead)
    Q, dq = qm._num, qm._den
    m = len(Q) - 1
    R = [list(ab) for ab in p._num]
    S = [[0, 0] for _ in range(len(R) - m)]
    scale = 1  # R and S carry an extra integer factor dq**steps
    for k in range(len(R) - 1, m - 1, -1):
        ta, tb = R[k]
        for row in R:
            row[0] *= dq
            row[1] *= dq
        for row in S:
            row[0] *= dq
            row[1] *= dq
        scale *= dq
        if ta == 0 and tb == 0:
            continue
        shift = k - m
        for j, (qa, qb) in enumerate(Q):
            R[j + shift][0] -= ta * qa - tb * qb
            R[j + shift][1] -= ta * qb + tb * qa
        S[shift][0] += ta * dq
        S[shift][1] += tb * dq
        # keep integer sizes in check
        g = scale
        for row in R:
            if g == 1:
                break
            g = gcd(g, row[0], row[1])
        for row in S:
            if g == 1:
                break
            g = gcd(g, row[0], row[1])
        if g > 1:
            for row in R:
                row[0] //= g
                row[1] //= g
            for row in S:
                row[0] //= g
                row[1] //= g
            scale //= g
    # p = (S * qm + R) / (scale * p._den)
    rem = Poly._from_ints([tuple(r) for r in R[:m]], p._den * scale)
    quot_m = Poly._from_ints([tuple(s) for s in S], p._den * scale)
    return quot_m.scale(inv_lead), rem


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor; raises on two zero inputs."""
    if p.is_zero() and q.is_zero():
        raise InvalidInputError("gcd of two zero polynomials")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    if p.is_const() or q.is_const():
        return Poly([1])
    if p.is_monomial() or q.is_monomial():
        k = min(p.low_order(), q.low_order())
        return Poly.monomial(k)
    if p == q:
        return p.monic()
    a, b = (p, q) if p.degree >= q.degree else (q, p)
    a, b = a.monic(), b.monic()
    while not b.is_zero():
        r = a % b
        a, b = b, (r.monic() if not r.is_zero() else r)
    return a


_POLY_ONE = Poly([1])


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Reduced quotient ``num / den`` with monic ``den``."""

    num: Poly
    den: Poly = field(default_factory=lambda: _POLY_ONE)

    def __post_init__(self):
        num, den = self.num, self.den
        if not isinstance(num, Poly):
            num = Poly(num) if isinstance(num, (list, tuple)) else Poly([num])
        if not isinstance(den, Poly):
            den = Poly(den) if isinstance(den, (list, tuple)) else Poly([den])
        if den.is_zero():
            raise DivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly(), _POLY_ONE
        else:
            g = poly_gcd(num, den)
            if not g.is_const():
                num, den = num.exact_div(g), den.exact_div(g)
            if not den.is_monic():
                inv = den.lead.inverse()
                num, den = num.scale(inv), den.scale(inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def _reduced(cls, num: Poly, den: Poly) -> RationalFunction:
        """Trusted constructor: caller guarantees coprime inputs and monic den."""
        obj = object.__new__(cls)
        if num.is_zero():
            den = _POLY_ONE
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", den)
        return obj

    # -- constructors ---------------------------------------------------------
    @classmethod
    def const(cls, c) -> RationalFunction:
        return cls._reduced(Poly([c]), _POLY_ONE)

    @classmethod
    def from_poly(cls, p) -> RationalFunction:
        if not isinstance(p, Poly):
            p = Poly(p)
        return cls._reduced(p, _POLY_ONE)

    @classmethod
    def variable(cls) -> RationalFunction:
        return cls._reduced(Poly([0, 1]), _POLY_ONE)

    @classmethod
    def laurent(cls, terms: dict) -> RationalFunction:
        """Build ``sum c_k y^k`` from a {power: coefficient} map (negative powers allowed)."""
        low = min(0, min(terms, default=0))
        coeffs = [0] * (max(max(terms, default=0), 0) - low + 1)
        for k, c in terms.items():
            coeffs[k - low] = as_gauss(c)
        return cls(Poly(coeffs), Poly.monomial(-low))

    # -- predicates -------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def is_poly(self) -> bool:
        return self.den.is_const()

    def is_real(self) -> bool:
        return self.num.is_real() and self.den.is_real()

    def constant_value(self) -> GaussRational:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.num.coeff(0)

    def coefficients(self):
        """All numerator and denominator coefficients."""
        return self.num.coeffs + self.den.coeffs

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, Poly):
            return self == RationalFunction.from_poly(other)
        g = as_gauss(other, strict=False)
        if g is None:
            return NotImplemented
        return self.is_const() and self.num.coeff(0) == g

    def __hash__(self):
        return hash((self.num, self.den))

    # -- arithmetic ---------------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Poly):
            return RationalFunction.from_poly(x)
        g = as_gauss(x, strict=False)
        if g is None:
            return None
        return RationalFunction.const(g)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num, self.den, o.num, o.den
        if a.is_zero():
            return o
        if c.is_zero():
            return self
        g = poly_gcd(b, d)
        if g.is_const():
            return RationalFunction._reduced(a * d + c * b, b * d)
        b1, d1 = b.exact_div(g), d.exact_div(g)
        t = a * d1 + c * b1
        if t.is_zero():
            return RationalFunction._reduced(Poly(), _POLY_ONE)
        g2 = poly_gcd(t, g)
        if g2.is_const():
            return RationalFunction._reduced(t, b1 * d)
        return RationalFunction._reduced(t.exact_div(g2), b1 * d.exact_div(g2))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._reduced(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num, self.den, o.num, o.den
        if a.is_zero() or c.is_zero():
            return RationalFunction._reduced(Poly(), _POLY_ONE)
        g1 = poly_gcd(a, d)
        g2 = poly_gcd(c, b)
        if not g1.is_const():
            a, d = a.exact_div(g1), d.exact_div(g1)
        if not g2.is_const():
            c, b = c.exact_div(g2), b.exact_div(g2)
        return RationalFunction._reduced(a * c, b * d)

    __rmul__ = __mul__

    def reciprocal(self) -> RationalFunction:
        if self.num.is_zero():
            raise DivisionError("division by the zero rational function")
        inv = self.num.lead.inverse()
        return RationalFunction._reduced(self.den.scale(inv), self.num.scale(inv))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        return RationalFunction._reduced(self.num ** k, self.den ** k)

    def conjugate(self) -> RationalFunction:
        return RationalFunction._reduced(self.num.conjugate(), self.den.conjugate())

    def derivative(self) -> RationalFunction:
        n, d = self.num, self.den
        if d.is_const():
            return RationalFunction._reduced(n.derivative(), d)
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def __call__(self, y):
        """Exact evaluation at a Gaussian rational."""
        dv = self.den(y)
        if not dv:
            raise DivisionError(f"{y} is a pole of {self}")
        return self.num(y) / dv

    def compose_mobius(self, a, b, c, d) -> RationalFunction:
        """Substitute ``y = (a t + b) / (c t + d)`` and return a function of ``t``."""
        top = Poly([b, a])
        bottom = Poly([d, c])

        def homog(p: Poly):
            n = p.degree
            acc = Poly()
            for k, ck in enumerate(p.coeffs):
                acc = acc + (top ** k) * (bottom ** (n - k)) * ck
            return acc, n

        nn, dn = homog(self.num)
        dd, ddeg = homog(self.den)
        if ddeg >= dn:
            return RationalFunction(nn * bottom ** (ddeg - dn), dd)
        return RationalFunction(nn, dd * bottom ** (dn - ddeg))

    # -- numerics ---------------------------------------------------------------
    def evaluate(self, z, guard=POLE_GUARD):
        """Evaluate at complex doubles, refusing points within ``guard`` of a pole."""
        z = np.asarray(z)
        if guard is not None and self.den.degree > 0:
            roots = self.den.roots()
            dist = np.min(np.abs(z[..., None] - roots), axis=-1)
            if np.any(dist < guard):
                k = np.argmin(dist)
                flat = z.reshape(-1)
                nearest = roots[np.argmin(np.abs(flat[k] - roots))]
                raise PoleError(float(np.min(dist)), complex(nearest))
        return self.num.evaluate(z) / self.den.evaluate(z)

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.den.is_const():
            return f"{self.num}"
        return f"({self.num})/({self.den})"

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(Poly.from_json(obj["num"]), Poly.from_json(obj["den"]))


def ratfun_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InvalidInputError(f"unknown operation {op!r}")


def ratfun_derivative(f: RationalFunction) -> RationalFunction:
    return f.derivative()


def ratfun_eval(f: RationalFunction, y0, guard=POLE_GUARD):
    return f.evaluate(y0, guard=guard)


@dataclass(frozen=True)
class PartialFractionForm:
    polynomial_part: Poly
    terms: tuple  # of (root, multiplicity, coefficient)
    remainder: RationalFunction = field(default_factory=lambda: RationalFunction.const(0))

    def reassemble(self) -> RationalFunction:
        acc = RationalFunction.from_poly(self.polynomial_part) + self.remainder
        for root, mult, coeff in self.terms:
            acc = acc + RationalFunction(Poly([coeff]), Poly.linear_root(root) ** mult)
        return acc


def _series_quotient(r: Poly, g: Poly, m: int) -> list:
    """First ``m`` Taylor coefficients of r/g around 0 (requires g(0) != 0)."""
    rc, gc = r.coeffs, g.coeffs
    g0inv = gc[0].inverse()
    h = []
    for k in range(m):
        acc = rc[k] if k < len(rc) else ZERO
        for j in range(1, min(k, len(gc) - 1) + 1):
            acc = acc - gc[j] * h[k - j]
        h.append(acc * g0inv)
    return h


def partial_fractions(f: RationalFunction, known_roots, allow_remainder=False) -> PartialFractionForm:
    """Decompose ``f`` over the supplied denominator roots.

    With ``allow_remainder`` the part of the denominator not covered by
    ``known_roots`` is returned as an undecomposed remainder instead of
    raising :class:`UnknownRootError`.
    """
    poly_part, proper = divmod(f.num, f.den)
    rest = f.den
    terms = []
    seen = set()
    for root in known_roots:
        root = as_gauss(root)
        if root in seen:
            continue
        seen.add(root)
        lin = Poly.linear_root(root)
        mult = 0
        while rest.degree > 0:
            q, r = divmod(rest, lin)
            if not r.is_zero():
                break
            rest = q
            mult += 1
        if mult == 0:
            continue
        cofactor = f.den.exact_div(lin ** mult)
        h = _series_quotient(proper.taylor_shift(root), cofactor.taylor_shift(root), mult)
        for k, hk in enumerate(h):
            if hk:
                terms.append((root, mult - k, hk))
    result = PartialFractionForm(poly_part, tuple(terms))
    if rest.degree > 0:
        if not allow_remainder:
            raise UnknownRootError(rest.monic())
        remainder = f - result.reassemble()
        result = PartialFractionForm(poly_part, tuple(terms), remainder)
    if result.reassemble() != f:
        raise ArithmeticError("partial fraction reassembly mismatch")
    return result
