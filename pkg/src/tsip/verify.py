"""Independent checks: exact residuals, a Numerov eigenvalue oracle, shape
invariance and the two class identities for the ground RS function."""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from . import numerov
from .backlund import backlund_step, cf_expansion, fold_ladder, ladder_consistency, rs_function
from .errors import (
    BracketingError,
    NoClassError,
    NonConstantDifferenceError,
    TSIPError,
)
from .families import FamilyInstance, Scarf2, energy
from .ratfun import GaussRational, Poly, RationalFunction
from .wavefun import assemble, normalize, overlap, sign_changes

__all__ = [
    "Grid",
    "ClassAssignment",
    "VerificationReport",
    "riccati_residual",
    "numerov_spectrum",
    "numerov_level",
    "shape_invariance_check",
    "classify",
    "full_report",
    "AdHocInstance",
    "complex_chart_level",
    "continuum_threshold",
    "end_exponents",
    "node_sweep",
    "DEFAULT_POINTS",
    "ENDPOINT_OFFSET",
]

DEFAULT_POINTS = 4001
#: Dirichlet points sit exactly on finite ends; the first Numerov step never
#: evaluates V at the boundary point, so no offset is needed there.
ENDPOINT_OFFSET = 0.0
#: WKB decay exponent reached before an infinite end is truncated
WKB_DEPTH = 16.0


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    points: int = DEFAULT_POINTS

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)

    def nodes(self):
        return np.linspace(self.x_min, self.x_max, self.points)


def riccati_residual(inst, level) -> RationalFunction:
    """``-P w' + w^2 - V + E`` for a level (zero for correct levels)."""
    w = level.w
    return w * w - RationalFunction.from_poly(inst.P) * w.derivative() - inst.potential + level.energy


# ---------------------------------------------------------------------------
# Numerov oracle


def _potential_x(inst):
    V, cov = inst.potential, inst.cov

    def f(x):
        with np.errstate(all="ignore"):
            return np.real(V.evaluate(cov.forward(x), guard=None))

    return f


def _end_y(cov, side):
    """Limit of y at an infinite end of the x-domain (None when |y| -> inf)."""
    k = cov.kind
    if k == "identity":
        return None
    if k == "reciprocal":
        return 0.0
    if k == "expneg":
        return 0.0 if side > 0 else None
    if k in ("tanh", "tanh-ipi4"):
        return float(side)
    if k == "coth":
        return -1.0
    return None


def continuum_threshold(inst) -> float:
    """Lowest limiting value of V at the infinite ends of the domain."""
    lo, hi = inst.cov.x_domain
    out = math.inf
    for end, side in ((lo, -1), (hi, 1)):
        if math.isfinite(end):
            continue
        y = _end_y(inst.cov, side)
        if y is None:
            continue
        v = float(np.real(inst.potential.evaluate(y, guard=None)))
        out = min(out, v)
    return out


def _scale(inst) -> float:
    if inst.cov.kind in ("identity", "reciprocal"):
        return 1.0
    return 1.0 / float(inst.cov.rate)


def _sample_points(inst):
    lo, hi = inst.cov.x_domain
    scale = _scale(inst)
    if math.isfinite(lo) and math.isfinite(hi):
        return np.linspace(lo + ENDPOINT_OFFSET, hi - ENDPOINT_OFFSET, 20001)
    if math.isfinite(lo):
        seed = lo + ENDPOINT_OFFSET
        core = np.linspace(seed, lo + scale, 2001)
        octs = [np.linspace(lo + scale * 2**k, lo + scale * 2 ** (k + 1), 200) for k in range(40)]
        return np.concatenate([core] + octs)
    seed = 0.0
    core = np.linspace(-scale, scale, 2001)
    right = [np.linspace(scale * 2**k, scale * 2 ** (k + 1), 200) for k in range(40)]
    left = [-r[::-1] for r in right[::-1]]
    return np.concatenate(left + [core] + right)


def _wkb_end(Vx, x_turn, E, direction, scale):
    """March outward from a turning point until the WKB exponent reaches WKB_DEPTH."""
    x, acc = x_turn, 0.0
    for _ in range(200000):
        v = float(Vx(np.array([x]))[0]) - E
        dx = scale / 40 if v <= 0 else min(scale / 10, 0.2 / math.sqrt(v))
        acc += math.sqrt(max(v, 0.0)) * dx
        x += direction * dx
        if acc >= WKB_DEPTH:
            return x
    raise BracketingError(-1, f"no decay found beyond turning point {x_turn}")


def level_grid(inst, E_ref, points=DEFAULT_POINTS, offset=ENDPOINT_OFFSET):
    """Grid covering the classically allowed region of ``E_ref`` plus decaying tails."""
    Vx = _potential_x(inst)
    xs = _sample_points(inst)
    V = Vx(xs)
    allowed = np.nonzero(V < E_ref)[0]
    if allowed.size == 0:
        raise BracketingError(-1, f"no classically allowed region below E = {E_ref}")
    lo, hi = inst.cov.x_domain
    scale = _scale(inst)
    x_l, x_r = xs[allowed[0]], xs[allowed[-1]]
    a = lo + offset if math.isfinite(lo) else _wkb_end(Vx, x_l, E_ref, -1.0, scale)
    b = hi - offset if math.isfinite(hi) else _wkb_end(Vx, x_r, E_ref, 1.0, scale)
    return Grid(a, b, points), x_r


@dataclass
class _Problem:
    grid: Grid
    V: np.ndarray
    h2: float
    start: int
    stop: int
    match: int

    def q(self, E):
        return E - self.V

    def mismatch(self, E):
        return numerov.match_wronskian(self.q(E), self.h2, self.start, self.stop, self.match)

    def nodes(self, E):
        # the last point is the Dirichlet boundary and is not counted
        return numerov.count_nodes(self.q(E), self.h2, self.start, self.stop - 1)


def _problem(inst, E_top, grid, x_turn=None):
    x = grid.nodes()
    V = _potential_x(inst)(x)
    h2 = grid.spacing**2
    good = np.nonzero(np.isfinite(V) & (h2 * (V - E_top) / 12.0 < 0.5))[0]
    if good.size < 8:
        raise BracketingError(-1, "grid too coarse for the potential")
    start = max(int(good[0]) - 1, 0)
    stop = min(int(good[-1]) + 1, len(x) - 1)
    V = np.where(np.isfinite(V), V, 1e300)
    if x_turn is None:
        m = (start + stop) // 2
    else:
        m = int(np.searchsorted(x, x_turn))
    m = min(max(m, start + 2), stop - 3)
    return _Problem(grid, V, h2, start, stop, m)


@dataclass(frozen=True)
class OracleLevel:
    n: int
    energy: float  # extrapolated
    raw_energy: float  # single solve on the base grid
    bracket: tuple
    grid: Grid
    nodes_low: int
    nodes_high: int


def _bracket(inst, n):
    E = [float(energy(inst, k)) for k in range(max(n - 1, 0), n + 1)]
    En = E[-1]
    mb = inst.max_bound_index
    has_next = mb is None or n + 1 <= mb
    up = float(energy(inst, n + 1)) - En if has_next else None
    down = En - E[0] if n > 0 else None
    gap_up = up if up is not None else down
    gap_down = down if down is not None else up
    if gap_up is None:
        gap_up = gap_down = max(abs(En), 1.0)
    lo = En - 0.25 * gap_down
    hi = En + 0.25 * gap_up
    thr = continuum_threshold(inst)
    if math.isfinite(thr):
        hi = min(hi, En + 0.5 * (thr - En))
    return lo, hi


def _has_finite_end(inst):
    return any(math.isfinite(e) for e in inst.cov.x_domain)


def _locate(inst, n, grid, x_turn=None):
    """Raw Numerov eigenvalue of level n on a fixed grid."""
    lo, hi = _bracket(inst, n)
    prob = _problem(inst, hi, grid, x_turn)
    n_lo, n_hi = prob.nodes(lo), prob.nodes(hi)
    if n_lo != n or n_hi != n + 1:
        raise BracketingError(
            n,
            f"node counts {n_lo}, {n_hi} at E = {lo:.6g}, {hi:.6g} (expected {n}, {n + 1}); "
            f"grid [{grid.x_min:.6g}, {grid.x_max:.6g}] with {grid.points} points",
        )
    d_lo, d_hi = prob.mismatch(lo), prob.mismatch(hi)
    if not d_lo * d_hi < 0:
        raise BracketingError(n, f"matching function does not change sign on [{lo:.6g}, {hi:.6g}]")
    E = brentq(prob.mismatch, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200)
    return E, (lo, hi), n_lo, n_hi


def end_exponents(inst, grid) -> list:
    """Frobenius exponents ``s`` (psi ~ d^s) at the finite ends of the domain.

    ``c = lim d^2 V`` is estimated from two small distances d and the
    exponent follows from ``s (s - 1) = c``.
    """
    out = []
    Vx = _potential_x(inst)
    width = grid.x_max - grid.x_min
    lo, hi = inst.cov.x_domain
    for end, direction in ((lo, 1.0), (hi, -1.0)):
        if not math.isfinite(end):
            continue
        t = 1e-6 * width
        d = np.array([t, 2 * t])
        c_t = d**2 * Vx(end + direction * d)
        c = 2 * c_t[0] - c_t[1]
        out.append(0.5 + math.sqrt(max(0.25 + c, 0.0)))
    return out


def extrapolation_orders(exponents, limit=3) -> list:
    """Powers of h in the error expansion: 4 for smooth problems, plus
    ``2s - 1`` and ``2s`` for ends with a non-integer exponent."""
    orders = {4.0}
    for s in exponents:
        if abs(s - round(s)) > 1e-3:
            orders.update(p for p in (2 * s - 1, 2 * s) if p < 4 - 1e-6)
    return sorted(orders)[:limit]


def _richardson(hs, values, orders):
    A = np.array([[1.0] + [h**p for p in orders] for h in hs])
    return float(np.linalg.solve(A, np.asarray(values))[0])


def numerov_level(inst, n, points=DEFAULT_POINTS, grid=None, extrapolate=True) -> OracleLevel:
    """Oracle eigenvalue of level n, bracketed by node counting.

    With an explicit ``grid`` a single raw solve is returned.  Otherwise the
    grid is fitted to the level and the spacing error is removed by
    Richardson extrapolation over nested subgrids (spacings h, 2h, 4h, ...).
    The powers eliminated are 4 plus any lower powers produced by
    non-analytic behaviour at singular ends.
    """
    if grid is not None:
        E, br, a, b = _locate(inst, n, grid)
        return OracleLevel(n, E, E, br, grid, a, b)
    En = float(energy(inst, n))
    base, x_turn = level_grid(inst, En, points, ENDPOINT_OFFSET)
    E1, br, a, b = _locate(inst, n, base, x_turn)
    if not extrapolate:
        return OracleLevel(n, E1, E1, br, base, a, b)
    orders = extrapolation_orders(end_exponents(inst, base))
    hs, values = [base.spacing], [E1]
    for k in range(1, len(orders) + 1):
        if (points - 1) % 2**k:
            break
        sub = Grid(base.x_min, base.x_max, (points - 1) // 2**k + 1)
        try:
            values.append(_locate(inst, n, sub, x_turn)[0])
        except BracketingError:
            break
        hs.append(sub.spacing)
    E = _richardson(hs, values, orders[: len(values) - 1]) if len(values) > 1 else E1
    return OracleLevel(n, E, E1, br, base, a, b)


def numerov_spectrum(inst, count, points=DEFAULT_POINTS, grid=None) -> list:
    """Lowest ``count`` eigenvalues of ``-psi'' + V psi = E psi``."""
    if count < 1:
        raise ValueError("count must be positive")
    inst.check_index(count - 1)
    return [numerov_level(inst, n, points, grid).energy for n in range(count)]


def node_sweep(inst, top, points=DEFAULT_POINTS) -> int:
    """Number of states below the upper bracket of level ``top`` (forward node count)."""
    _, hi = _bracket(inst, top)
    grid, x_turn = level_grid(inst, hi, points)
    return _problem(inst, hi, grid, x_turn).nodes(hi)


# ---------------------------------------------------------------------------
# shape invariance and classification


class AdHocInstance:
    """Minimal stand-in for hand-built potentials used as negative controls."""

    def __init__(self, name, P, w0, shift=None):
        self.name = name
        self.P = P
        self.w0 = w0
        self.potential = w0 * w0 - RationalFunction.from_poly(P) * w0.derivative()
        self._shift = shift

    def shifted(self, k):
        if k == 0 or self._shift is None:
            return self
        return AdHocInstance(self.name, self.P, self._shift(self.w0, k))


def shape_invariance_check(inst) -> GaussRational:
    """R(a) from ``V + 2 P w0'`` minus the shifted potential; must be constant."""
    V_plus = inst.potential + 2 * RationalFunction.from_poly(inst.P) * inst.w0.derivative()
    diff = V_plus - inst.shifted(1).potential
    if not diff.is_const():
        raise NonConstantDifferenceError(diff)
    return diff.constant_value()


@dataclass(frozen=True)
class ClassAssignment:
    cls: str  # "I" or "II"
    alpha0: GaussRational
    alpha1: object  # alpha1 for class I, alpha1^2 for class II
    alpha2: GaussRational

    def to_json(self):
        key = "alpha1" if self.cls == "I" else "alpha1_squared"
        return {"class": self.cls, "alpha0": self.alpha0.to_json(), key: self.alpha1.to_json(),
                "alpha2": self.alpha2.to_json()}


def _solve_exact(rows, rhs):
    """Gaussian elimination over Q(i); returns one solution or None if inconsistent."""
    m = len(rows[0]) if rows else 0
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = A[r][c].inverse()
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                fac = A[i][c]
                A[i] = [vi - fac * vr for vi, vr in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(A)):
        if A[i][m]:
            return None
    sol = [GaussRational(0)] * m
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][m]
    return sol


def _poly_equations(target: RationalFunction, basis: list):
    """Coefficient equations for ``target = sum c_k basis_k`` over a common denominator."""
    den = target.den
    for b in basis:
        den = den * b.den.exact_div(_gcd_den(den, b.den))
    t = (target * RationalFunction.from_poly(den))
    bs = [(b * RationalFunction.from_poly(den)) for b in basis]
    deg = max([t.num.degree] + [b.num.degree for b in bs])
    rows = [[b.num.coeff(k) for b in bs] for k in range(deg + 1)]
    rhs = [t.num.coeff(k) for k in range(deg + 1)]
    return rows, rhs


def _gcd_den(a, b):
    from .ratfun import poly_gcd

    return poly_gcd(a, b)


def _laurent_w0(inst):
    if isinstance(getattr(inst, "family", None), Scarf2):
        return inst.family.w0_complex(dict(inst.params))
    return inst.w0


def classify(inst) -> ClassAssignment:
    """Class I: ``P w0' = a0 + a1 w0 + a2 w0^2``.  Class II:
    ``(P w0' - a0 - a2 w0^2)^2 = a1^2 w0^2 (a0 + a2 w0^2)``."""
    Prf = RationalFunction.from_poly(inst.P)
    w0 = inst.w0
    lhs = Prf * w0.derivative()
    one = RationalFunction.const(1)
    rows, rhs = _poly_equations(lhs, [one, w0, w0 * w0])
    sol = _solve_exact(rows, rhs)
    if sol is not None:
        a0, a1, a2 = sol
        if lhs == a0 + a1 * w0 + a2 * w0 * w0:
            return ClassAssignment("I", a0, a1, a2)
    w = _laurent_w0(inst)
    lhs = Prf * w.derivative()
    if w.den == Poly([0, 1]) and w.num.degree == 2 and not w.num.coeff(1):
        b1, bm1 = w.num.coeff(2), w.num.coeff(0)
        root = RationalFunction.laurent({1: b1, -1: -bm1})
        # a0 = -4 b1 b_1 a2 makes a0 + a2 w^2 = a2 (b1 y - b_1/y)^2
        basis_a2 = w * w - 4 * b1 * bm1
        rows, rhs = _poly_equations(lhs, [basis_a2, w * root])
        sol = _solve_exact(rows, rhs)
        if sol is not None:
            a2, c = sol
            if a2:
                a0 = -4 * b1 * bm1 * a2
                a1_sq = c * c / a2
                left = lhs - a0 - a2 * w * w
                if left * left == a1_sq * w * w * (a0 + a2 * w * w):
                    return ClassAssignment("II", a0, a1_sq, a2)
    raise NoClassError(f"{getattr(inst, 'name', inst)} satisfies neither class identity")


def complex_chart_level(inst, n) -> RationalFunction:
    """Scarf II level n built in the complex variable y and mapped to real t.

    The recursion runs on the complex superpotentials directly; the result
    must coincide with the level computed in the real chart.
    """
    fam = inst.family
    if not isinstance(fam, Scarf2):
        raise TypeError("complex chart route applies to scarf-2 only")
    inst.check_index(n)
    p = dict(inst.params)

    def level(k, m):
        # w_m at parameters shifted k times
        pk = fam.shift(p, k)
        w0 = fam.w0_complex(pk)
        if m == 0:
            return w0
        return backlund_step(w0, level(k + 1, m - 1), fam.closed_energy(pk, m))

    return level(0, n).compose_mobius(*Scarf2.MOEBIUS)


# ---------------------------------------------------------------------------
# aggregate report


@dataclass
class VerificationReport:
    family: str
    params: dict
    levels: list
    residual_zero: list = field(default_factory=list)
    exact_energies: list = field(default_factory=list)
    oracle_energies: list = field(default_factory=list)
    energy_discrepancies: list = field(default_factory=list)
    node_counts: list = field(default_factory=list)
    oracle_node_sweep: int = -1
    orthonormality_error: float = math.nan
    shape_invariance_constant: object = None
    telescoping_ok: bool = False
    ladder_ok: list = field(default_factory=list)
    cf_fold_ok: list = field(default_factory=list)
    class_assignment: object = None
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self):
        return {
            "family": self.family,
            "params": self.params,
            "levels": self.levels,
            "passed": self.passed,
            "residual_zero": self.residual_zero,
            "exact_energies": [e.to_json() for e in self.exact_energies],
            "oracle_energies": self.oracle_energies,
            "energy_discrepancies": self.energy_discrepancies,
            "node_counts": self.node_counts,
            "oracle_node_sweep": self.oracle_node_sweep,
            "orthonormality_error": None if math.isnan(self.orthonormality_error) else self.orthonormality_error,
            "shape_invariance_constant": None if self.shape_invariance_constant is None
            else self.shape_invariance_constant.to_json(),
            "telescoping_ok": self.telescoping_ok,
            "ladder_ok": self.ladder_ok,
            "cf_fold_ok": self.cf_fold_ok,
            "class_assignment": None if self.class_assignment is None else self.class_assignment.to_json(),
            "failures": self.failures,
        }


ORACLE_REL_TOL = 1e-6
ORACLE_ABS_TOL_GROUND = 1e-8


def oracle_discrepancy(n, exact, oracle) -> float:
    """Absolute error for the zero ground energy, relative error otherwise."""
    exact = float(exact)
    if n == 0 or exact == 0:
        return abs(oracle - exact)
    return abs(oracle - exact) / abs(exact)


def full_report(inst: FamilyInstance, n_max: int, points=DEFAULT_POINTS, oracle=True, wavefunctions=True):
    """Run every check on levels 0..n_max; failures are recorded, not raised."""
    rep = VerificationReport(inst.name, inst.to_json()["params"], list(range(n_max + 1)))

    def guard(label, fn):
        try:
            return fn()
        except (TSIPError, ArithmeticError, ValueError) as exc:
            rep.failures.append(f"{label}: {type(exc).__name__}: {exc}")
            return None

    if guard("index", lambda: inst.check_index(n_max)) is None and rep.failures:
        return rep
    levels = []
    for n in range(n_max + 1):
        lev = guard(f"level {n}", lambda n=n: rs_function(inst, n))
        if lev is None:
            return rep
        levels.append(lev)
        rep.exact_energies.append(lev.energy)
        zero = riccati_residual(inst, lev).is_zero()
        rep.residual_zero.append(zero)
        if not zero:
            rep.failures.append(f"level {n}: nonzero Riccati residual")
        if n >= 1:
            ok = bool(guard(f"ladder {n}", lambda n=n: ladder_consistency(inst, n)))
            rep.ladder_ok.append(ok)
            if not ok:
                rep.failures.append(f"level {n}: ladder identity fails")
        fold = guard(f"cf {n}", lambda n=n: fold_ladder(inst, cf_expansion(inst, n)))
        rep.cf_fold_ok.append(fold == lev.w)
        if fold != lev.w:
            rep.failures.append(f"level {n}: continued fraction fold differs from recursion")
        if isinstance(inst.family, Scarf2):
            routed = guard(f"complex chart {n}", lambda n=n: complex_chart_level(inst, n))
            if routed != lev.w or not lev.w.is_real():
                rep.failures.append(f"level {n}: complex-chart route disagrees or has imaginary parts")

    R = guard("shape invariance", lambda: shape_invariance_check(inst))
    rep.shape_invariance_constant = R
    if R is not None and R != inst.R():
        rep.failures.append(f"shape invariance: potentials give R = {R} but the family law gives {inst.R()}")

    def telescope():
        acc = GaussRational(0)
        for k in range(n_max + 1):
            if acc != energy(inst, k):
                return False
            acc = acc + shape_invariance_check(inst.shifted(k))
        return True

    rep.telescoping_ok = bool(guard("telescoping", telescope))
    if not rep.telescoping_ok:
        rep.failures.append("telescoped shape-invariance constants do not reproduce the spectrum")

    cls = guard("classify", lambda: classify(inst))
    rep.class_assignment = cls
    expected = inst.family.expected_class
    if cls is not None and cls.cls != expected:
        rep.failures.append(f"class {cls.cls} but the family belongs to class {expected}")

    if wavefunctions:
        cfs = []
        for lev in levels:
            cf = guard(f"wavefunction {lev.n}", lambda lev=lev: normalize(assemble(lev, inst)))
            if cf is None:
                break
            cfs.append(cf)
            nodes = sign_changes(cf)
            rep.node_counts.append(nodes)
            if nodes != lev.n:
                rep.failures.append(f"level {lev.n}: psi has {nodes} sign changes")
        if len(cfs) == len(levels):
            M = np.array([[overlap(a, b) for b in cfs] for a in cfs])
            rep.orthonormality_error = float(np.max(np.abs(M - np.eye(len(cfs)))))
            if rep.orthonormality_error > 1e-7:
                rep.failures.append(f"overlap matrix deviates from identity by {rep.orthonormality_error:.3g}")

    if oracle:
        for lev in levels:
            res = guard(f"oracle {lev.n}", lambda lev=lev: numerov_level(inst, lev.n, points))
            if res is None:
                rep.oracle_energies.append(None)
                rep.energy_discrepancies.append(None)
                continue
            rep.oracle_energies.append(res.energy)
            d = oracle_discrepancy(lev.n, lev.energy, res.energy)
            rep.energy_discrepancies.append(d)
            tol = ORACLE_ABS_TOL_GROUND if lev.n == 0 else ORACLE_REL_TOL
            if not d <= tol:
                rep.failures.append(f"level {lev.n}: oracle {res.energy:.12g} vs exact {float(lev.energy):.12g}")
        sweep = guard("node sweep", lambda: node_sweep(inst, n_max, points))
        if sweep is not None:
            rep.oracle_node_sweep = sweep
            if sweep != n_max + 1:
                rep.failures.append(f"node sweep counts {sweep} states below the top bracket, expected {n_max + 1}")
    return rep
