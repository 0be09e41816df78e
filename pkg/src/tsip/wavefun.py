"""Closed-form eigenfunctions from exact RS functions.

``psi_n = exp(-int w_n dx) = exp(-int w_n / P dy)``.  Writing
``w_n / P = -Q'/Q + R`` with ``Q`` the node polynomial, ``R`` only has poles
at the fixed roots (roots of ``P`` and of the ground-state superpotential), so

    psi_n = Q(y) * prod (y - r)^e_r * exp(S(y) - T(y))

where ``e_r`` are minus the simple-pole residues of ``R``, ``S`` collects its
higher-order pole terms and ``T`` is the antiderivative of its polynomial part.
Evaluation happens in log space with chart-aware formulas so tails and
endpoint singularities stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import math

import numpy as np
from scipy import integrate

from .backlund import Level
from .errors import (
    DecompositionResidualError,
    DomainError,
    InstanceMismatchError,
    NonIntegrableError,
    UnknownRootError,
)
from .families import FamilyInstance
from .ratfun import GaussRational, Poly, RationalFunction, partial_fractions

__all__ = [
    "ClosedFormWavefunction",
    "assemble",
    "eval_psi",
    "normalize",
    "overlap",
    "sign_changes",
    "integration_window",
]

LOG2 = math.log(2.0)
#: ψ² is neglected where it is below exp(-2 * TAIL_DROP) relative to its peak
TAIL_DROP = 35.0


@dataclass(frozen=True)
class ClosedFormWavefunction:
    level: Level
    instance: FamilyInstance
    node_poly: Poly
    power_factors: tuple  # (root, exponent) pairs
    exp_rational: RationalFunction  # enters as exp(+S)
    exp_poly_integral: Poly  # enters as exp(-T)
    log_norm: float = 0.0
    window: tuple = None  # (breakpoints, peak log|psi|) cached by normalize

    @property
    def cov(self):
        return self.instance.cov

    @property
    def n(self) -> int:
        return self.level.n

    @property
    def normalization(self) -> float:
        return math.exp(self.log_norm)

    def __call__(self, x):
        return eval_psi(self, x)

    # -- numerics ---------------------------------------------------------------
    def log_abs(self, x):
        """(log|psi| without normalization, sign) at x."""
        x = np.asarray(x, dtype=float)
        cov = self.cov
        y = cov.forward(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lq, sq = _log_abs_poly(self.node_poly, y)
            total = lq
            for root, expo in self.power_factors:
                total = total + _log_factor(cov, x, y, root, expo)
            if not self.exp_rational.is_zero():
                total = total + self.exp_rational.evaluate(y, guard=None).real
            if not self.exp_poly_integral.is_zero():
                total = total - self.exp_poly_integral.evaluate(y).real
        return total, sq

    def to_json(self):
        return {
            "family": self.instance.name,
            "n": self.n,
            "node_poly": self.node_poly.to_json(),
            "power_factors": [{"root": r.to_json(), "exponent": e.to_json()} for r, e in self.power_factors],
            "exp_rational": self.exp_rational.to_json(),
            "exp_poly_integral": self.exp_poly_integral.to_json(),
            "normalization": self.normalization,
            "change_of_variable": self.cov.to_json(),
        }


def _log_abs_poly(q: Poly, y):
    """log|q(y)| and sign(q(y)), switching to Horner in 1/y for |y| > 1."""
    c = q.numeric_coeffs().real
    y = np.asarray(y, dtype=float)
    deg = len(c) - 1
    small = np.abs(y) <= 1.0
    val = np.zeros_like(y)
    acc = np.full_like(y, c[-1])
    for ck in c[-2::-1]:
        acc = acc * y + ck
    val = acc
    if deg > 0 and not np.all(small):
        inv = np.where(small, 1.0, 1.0 / np.where(small, 1.0, y))
        acc2 = np.full_like(y, c[0])
        for ck in c[1:]:
            acc2 = acc2 * inv + ck
        big_log = deg * np.log(np.abs(y)) + np.log(np.abs(acc2))
        big_sign = np.sign(acc2) * np.where(y < 0, (-1.0) ** deg, 1.0)
        log_val = np.where(small, np.log(np.abs(val)), big_log)
        sign = np.where(small, np.sign(val), big_sign)
        return log_val, sign
    return np.log(np.abs(val)), np.sign(val)


def _log_abs_y_minus(cov, x, y, r: float):
    """log|y - r| for a real fixed root, exact-in-limit on each chart."""
    kind = cov.kind
    u = float(cov.rate) * x
    if r == 0.0:
        if kind == "expneg":
            return -u
        if kind == "reciprocal":
            return -np.log(np.abs(x))
        if kind in ("tanh", "tanh-ipi4"):
            return np.log(np.abs(np.tanh(u)))
        return np.log(np.abs(y))
    if kind in ("tanh", "tanh-ipi4") and abs(r) == 1.0:
        # 1 - tanh u = 2 / (1 + e^{2u});  1 + tanh u = 2 / (1 + e^{-2u})
        return LOG2 - np.logaddexp(0.0, 2 * u) if r > 0 else LOG2 - np.logaddexp(0.0, -2 * u)
    if kind == "coth" and abs(r) == 1.0:
        # y = -coth u:  |y - 1| = coth u + 1,  |y + 1| = coth u - 1
        tail = np.log(-np.expm1(-2 * np.abs(u)))
        return LOG2 - tail if r > 0 else LOG2 - 2 * np.abs(u) - tail
    return np.log(np.abs(y - r))


def _log_one_plus_y2(cov, x, y):
    if cov.kind == "tan":
        u = float(cov.rate) * x
        if cov.phase_pi == -0.5:
            return -2.0 * np.log(np.abs(np.sin(u)))
        return -2.0 * np.log(np.abs(np.cos(u)))
    return np.log1p(y * y)


def _log_factor(cov, x, y, root: GaussRational, expo: GaussRational):
    if root.is_real:
        if not expo.is_real:
            raise DecompositionResidualError(f"complex exponent {expo} at real root {root}")
        return float(expo) * _log_abs_y_minus(cov, x, y, float(root))
    # pair (y - r)^e (y - conj r)^conj(e) for r = +-i: only the +i member carries it
    if root.re != 0 or abs(root.im) != 1:
        raise DecompositionResidualError(f"unsupported complex root {root}")
    # real part of e*log(y - i) with log(y - i) = 1/2 log(1+y^2) - i atan2(1, y)
    e = complex(expo) if root.im > 0 else complex(expo).conjugate()
    return e.real * _log_one_plus_y2(cov, x, y) + 2.0 * e.imag * np.arctan2(1.0, y)


def assemble(level: Level, inst: FamilyInstance) -> ClosedFormWavefunction:
    """Factor psi_n from the exact partial-fraction decomposition of w_n / P."""
    if level.instance != inst:
        raise InstanceMismatchError("level was built for a different instance")
    Q = level.node_poly
    f = level.w / RationalFunction.from_poly(inst.P)
    block = RationalFunction(Q.derivative(), Q)
    try:
        pf = partial_fractions(f + block, inst.known_roots)
    except UnknownRootError as exc:
        raise DecompositionResidualError(
            f"{inst!r} level {level.n}: w/P + Q'/Q has poles outside the fixed roots: {exc.factor}"
        ) from exc
    power = {}
    exp_rat = RationalFunction.const(0)
    for root, mult, coeff in pf.terms:
        if mult == 1:
            power[root] = power.get(root, GaussRational(0)) - coeff
        else:
            lin = Poly.linear_root(root) ** (mult - 1)
            exp_rat = exp_rat + RationalFunction(Poly([coeff / (mult - 1)]), lin)
    # complex pairs are carried by their +i member
    factors = []
    for root, expo in power.items():
        if root.is_real:
            factors.append((root, expo))
        elif root.im > 0:
            partner = power.get(root.conjugate())
            if partner is None or partner != expo.conjugate():
                raise DecompositionResidualError(f"unpaired complex power factor at {root}")
            factors.append((root, expo))
        elif root.conjugate() not in power:
            raise DecompositionResidualError(f"unpaired complex power factor at {root}")
    if not exp_rat.is_real():
        raise DecompositionResidualError("exponential rational part is not real")
    T = pf.polynomial_part.antiderivative()
    if not T.is_real():
        raise DecompositionResidualError("exponential polynomial part is not real")
    # the factorization must differentiate back to -w/P
    recon = RationalFunction.from_poly(pf.polynomial_part) - exp_rat.derivative() - block
    for root, expo in power.items():
        recon = recon - RationalFunction(Poly([expo]), Poly.linear_root(root))
    if recon != f:
        raise DecompositionResidualError("reassembled logarithmic derivative differs from w/P")
    factors.sort(key=lambda re: (float(re[0].re), float(re[0].im)))
    return ClosedFormWavefunction(level, inst, Q, tuple(factors), exp_rat, T)


def _check_domain(cf: ClosedFormWavefunction, x):
    lo, hi = cf.cov.x_domain
    xa = np.asarray(x, dtype=float)
    if not np.all((xa > lo) & (xa < hi)):
        raise DomainError(f"x outside the open domain ({lo}, {hi})")


def eval_psi(cf: ClosedFormWavefunction, x):
    """Normalized psi_n(x); exact zero at nodes."""
    _check_domain(cf, x)
    la, sg = cf.log_abs(x)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        val = sg * np.exp(la + cf.log_norm)
    val = np.where(sg == 0, 0.0, val)
    return val[()] if np.ndim(val) == 0 else val


def _scale(cf) -> float:
    kind = cf.cov.kind
    if kind in ("identity", "reciprocal"):
        return 1.0
    return 1.0 / float(cf.cov.rate)


def _endpoint_exponent(cf, end: float, inward: float, scale: float) -> float:
    d1, d2 = 1e-5 * scale, 1e-8 * scale
    g1, _ = cf.log_abs(end + inward * d1)
    g2, _ = cf.log_abs(end + inward * d2)
    return float((g1 - g2) / (math.log(d1) - math.log(d2)))


def integration_window(cf: ClosedFormWavefunction, pieces: int = 0):
    """Breakpoints covering the region where psi^2 is non-negligible.

    Raises :class:`NonIntegrableError` when a tail fails to decay or an
    endpoint singularity is not square integrable.
    """
    lo, hi = cf.cov.x_domain
    scale = _scale(cf)
    for end, inward in ((lo, 1.0), (hi, -1.0)):
        if math.isfinite(end):
            s = _endpoint_exponent(cf, end, inward, scale)
            if not 2 * s > -1 + 1e-9:
                raise NonIntegrableError(f"psi ~ dist^{s:.4g} at x = {end} is not square integrable")
    if math.isfinite(lo) and math.isfinite(hi):
        seed = 0.5 * (lo + hi)
    elif math.isfinite(lo):
        seed = lo + scale
    elif math.isfinite(hi):
        seed = hi - scale
    else:
        seed = 0.0
    pts = [seed]
    vals = [float(cf.log_abs(seed)[0])]

    def scan(direction):
        step, x, trail = scale, seed, []
        for _ in range(80):
            x = x + direction * step
            step *= 2.0
            g = float(cf.log_abs(x)[0])
            trail.append((x, g))
            gmax = max(vals + [v for _, v in trail])
            if len(trail) > 2 and g < gmax - TAIL_DROP:
                return trail
        raise NonIntegrableError("psi does not decay at an infinite end of the domain")

    right = [] if math.isfinite(hi) else scan(1.0)
    left = [] if math.isfinite(lo) else scan(-1.0)
    allpts = sorted([(x, g) for x, g in left + right] + [(seed, vals[0])])
    finite_vals = [g for _, g in allpts if np.isfinite(g)]
    gmax = max(finite_vals) if finite_vals else 0.0
    xs = [x for x, _ in allpts]
    gs = [g for _, g in allpts]
    keep = [i for i, g in enumerate(gs) if g >= gmax - TAIL_DROP]
    i0 = max(min(keep) - 1, 0) if keep else 0
    i1 = min(max(keep) + 1, len(xs) - 1) if keep else len(xs) - 1
    a = lo if math.isfinite(lo) else xs[i0]
    b = hi if math.isfinite(hi) else xs[i1]
    m = pieces or max(24, 6 * (cf.n + 1))
    inner = list(np.linspace(a, b, m + 1))
    bps = sorted(set(inner + [x for x in xs if a < x < b]))
    return bps, gmax


def _quad_pieces(func, bps, epsabs=1e-14):
    span = bps[-1] - bps[0]
    merged = [bps[0]]
    for x in bps[1:]:
        # near-duplicate breakpoints would give slivers quad cannot handle
        if x - merged[-1] > 1e-10 * span:
            merged.append(x)
    merged[-1] = bps[-1]
    total = 0.0
    for a, b in zip(merged[:-1], merged[1:]):
        val, _ = integrate.quad(func, a, b, epsabs=epsabs, epsrel=1e-11, limit=200)
        total += val
    return total


def normalize(cf: ClosedFormWavefunction) -> ClosedFormWavefunction:
    """Return a copy scaled so that the integral of psi^2 is one."""
    mb = cf.instance.max_bound_index
    if mb is not None and cf.n > mb:
        raise NonIntegrableError(
            f"level {cf.n} lies beyond the last bound state (index {mb}); psi is not normalizable"
        )
    bps, gref = _window(cf)

    def dens(x):
        la, sg = cf.log_abs(x)
        return 0.0 if sg == 0 else float(np.exp(2.0 * (la - gref)))

    total = _quad_pieces(dens, bps)
    if not (total > 0 and math.isfinite(total)):
        raise NonIntegrableError(f"norm integral evaluated to {total}")
    return replace(cf, log_norm=-gref - 0.5 * math.log(total), window=(bps, gref))


def _window(cf):
    return cf.window if cf.window is not None else integration_window(cf)


def overlap(cf_m: ClosedFormWavefunction, cf_n: ClosedFormWavefunction) -> float:
    """Integral of psi_m psi_n over the common domain."""
    if cf_m.instance != cf_n.instance:
        raise InstanceMismatchError("overlap between wavefunctions of different instances")
    b1, g1 = _window(cf_m)
    b2, g2 = _window(cf_n)
    lo, hi = min(b1[0], b2[0]), max(b1[-1], b2[-1])
    bps = sorted(set([x for x in b1 + b2 if lo <= x <= hi]))
    shift = g1 + g2 + cf_m.log_norm + cf_n.log_norm

    def prod(x):
        la, sa = cf_m.log_abs(x)
        lb, sb = cf_n.log_abs(x)
        if sa == 0 or sb == 0:
            return 0.0
        return float(sa * sb * np.exp(la + lb - g1 - g2))

    # overlaps of distinct levels cancel to zero, so only an absolute target makes sense
    return _quad_pieces(prod, bps, epsabs=1e-12 * math.exp(-shift)) * math.exp(shift)


def sign_changes(cf: ClosedFormWavefunction, samples: int = 20001) -> int:
    """Count sign changes of psi on a dense sampling of the integration window."""
    bps, _ = _window(cf)
    a, b = bps[0], bps[-1]
    lo, hi = cf.cov.x_domain
    width = b - a
    if a <= lo:
        a = lo + 1e-9 * width
    if b >= hi:
        b = hi - 1e-9 * width
    x = np.linspace(a, b, samples)
    _, sg = cf.log_abs(x)
    sg = sg[sg != 0]
    return int(np.count_nonzero(sg[1:] != sg[:-1]))
