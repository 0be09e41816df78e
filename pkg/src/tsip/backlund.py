"""Excited-state RS functions by finite-difference Baecklund steps.

``w_n(a) = w0(a) - E_n(a) / (w0(a) + w_{n-1}(a_1))`` unrolls into a
terminating continued fraction whose partial denominators are
``w0(a_{j-1}) + w0(a_j)`` and partial numerators ``E_n - E_{j-1}``.  Both the
memoized recursion (:func:`rs_function`) and the bottom-up fold of the ladder
(:func:`fold_ladder`) are provided so they can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
import threading

from .errors import InvalidInputError, ZeroDenominatorFunctionError
from .families import FamilyInstance, energy
from .ratfun import GaussRational, Poly, RationalFunction, as_gauss

__all__ = [
    "Level",
    "CFLadderTerm",
    "backlund_step",
    "rs_function",
    "cf_expansion",
    "fold_ladder",
    "ladder_consistency",
    "node_polynomial",
    "clear_cache",
]

_MEMO: dict = {}
_MEMO_LOCK = threading.Lock()


def clear_cache():
    with _MEMO_LOCK:
        _MEMO.clear()


def backlund_step(w_k: RationalFunction, w_kl: RationalFunction, deltaE, *, require_positive=True) -> RationalFunction:
    """``w_l = w_k - deltaE / (w_k + w_kl)``."""
    dE = as_gauss(deltaE)
    if require_positive and not (dE.is_real and dE.re > 0):
        raise InvalidInputError(f"energy gap must be positive, got {dE}")
    s = w_k + w_kl
    if s.is_zero():
        raise ZeroDenominatorFunctionError("w_k + w_kl vanishes identically")
    return w_k - RationalFunction.const(dE) / s


@dataclass(frozen=True)
class Level:
    n: int
    energy: GaussRational
    w: RationalFunction
    node_poly: Poly
    params_at_level: dict
    instance: FamilyInstance

    def to_json(self):
        return {
            "family": self.instance.name,
            "params": self.instance.to_json()["params"],
            "n": self.n,
            "energy": self.energy.to_json(),
            "w": self.w.to_json(),
            "node_poly": self.node_poly.to_json(),
        }


@dataclass(frozen=True)
class CFLadderTerm:
    numerator: GaussRational  # E_n - E_{j-1}
    denominator_seed: RationalFunction  # w0(a_{j-1}) + w0(a_j)


def _closed(inst: FamilyInstance, n):
    return inst.family.closed_energy(dict(inst.params), n)


def _w0_at(inst: FamilyInstance, k):
    fam = inst.family
    return fam.w0(fam.shift(dict(inst.params), k))


def node_polynomial(w: RationalFunction, known_roots) -> Poly:
    """Denominator of ``w`` with all factors at the known roots removed, monic."""
    q = w.den
    for r in known_roots:
        lin = Poly.linear_root(r)
        while q.degree > 0:
            quo, rem = divmod(q, lin)
            if not rem.is_zero():
                break
            q = quo
    return q.monic()


def _rs(inst: FamilyInstance, n: int, strict: bool) -> RationalFunction:
    fam = inst.family
    p = dict(inst.params)
    key = (fam.name, tuple(sorted(p.items())), n)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    if n == 0:
        w = inst.w0
    else:
        shifted = inst.shifted(1)
        w_prev = _rs(shifted, n - 1, strict)
        w = backlund_step(inst.w0, w_prev, _closed(inst, n), require_positive=strict)
    with _MEMO_LOCK:
        _MEMO[key] = w
    return w


def rs_function(inst: FamilyInstance, n: int, strict: bool = True) -> Level:
    """Exact level ``n``.

    With ``strict=False`` indices past the last bound state are built formally;
    such levels are not normalizable and are only useful as negative controls.
    """
    if strict:
        inst.check_index(n)
        E = energy(inst, n)
    else:
        if n < 0:
            raise InvalidInputError(f"level index must be nonnegative, got {n}")
        E = _closed(inst, n)
    w = _rs(inst, n, strict)
    Q = node_polynomial(w, inst.known_roots)
    params_n = inst.family.shift(dict(inst.params), n)
    return Level(n, E, w, Q, params_n, inst)


def cf_expansion(inst: FamilyInstance, n: int) -> list:
    """Ladder terms ``(E_n - E_{j-1}, w0(a_{j-1}) + w0(a_j))`` for j = 1..n."""
    inst.check_index(n)
    En = _closed(inst, n)
    terms = []
    w_prev = _w0_at(inst, 0)
    for j in range(1, n + 1):
        w_j = _w0_at(inst, j)
        terms.append(CFLadderTerm(En - _closed(inst, j - 1), w_prev + w_j))
        w_prev = w_j
    return terms


def fold_ladder(inst: FamilyInstance, terms) -> RationalFunction:
    """Evaluate the continued fraction bottom-up and return ``w_n``."""
    if not terms:
        return inst.w0
    D = terms[-1].denominator_seed
    for j in range(len(terms) - 2, -1, -1):
        D = terms[j].denominator_seed - RationalFunction.const(terms[j + 1].numerator) / D
    return inst.w0 - RationalFunction.const(terms[0].numerator) / D


def ladder_consistency(inst: FamilyInstance, n: int) -> bool:
    """Check ``w_{n-1}(a_1) = w_n - P g'/g`` with ``g = w0 - w_n``."""
    if n < 1:
        raise InvalidInputError("ladder consistency needs n >= 1")
    inst.check_index(n)
    w_n = rs_function(inst, n).w
    w_prev = rs_function(inst.shifted(1), n - 1, strict=False).w
    g = inst.w0 - w_n
    rhs = w_n - RationalFunction.from_poly(inst.P) * g.derivative() / g
    return rhs == w_prev
