import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import brentq

from tsip.backlund import rs_function
from tsip.errors import DomainError, InstanceMismatchError, NonIntegrableError
from tsip.families import FAMILY_NAMES, SAMPLE_PARAMS, instantiate
from tsip.ratfun import Poly
from tsip.wavefun import assemble, eval_psi, normalize, overlap, sign_changes

F = Fraction


def psi(inst, n, norm=True):
    cf = assemble(rs_function(inst, n), inst)
    return normalize(cf) if norm else cf


def proportional(a, b, rtol=1e-9):
    ratio = np.asarray(a) / np.asarray(b)
    return np.ptp(ratio) <= rtol * abs(np.mean(ratio))


# -- closed forms -----------------------------------------------------------------------


@pytest.mark.parametrize("omega", [F(2), F(1, 2)])
def test_harmonic_closed_forms(omega):
    inst = instantiate("harmonic", {"omega": omega})
    w = float(omega)
    nodes = [lambda x: 1.0 + 0 * x, lambda x: x, lambda x: w * x**2 - 1, lambda x: w * x**3 - 3 * x]
    x = np.linspace(-2.3, 2.9, 23)
    for n, q in enumerate(nodes):
        cf = psi(inst, n)
        assert cf.power_factors == ()
        assert cf.exp_poly_integral == Poly([0, 0, omega / 4])
        assert proportional(eval_psi(cf, x), q(x) * np.exp(-w * x**2 / 4))


@pytest.mark.parametrize("omega, l", [(F(2), F(1)), (F(1), F(1, 2))])
def test_isotonic_first_excited(omega, l):
    inst = instantiate("isotonic", {"omega": omega, "l": l})
    w, ll = float(omega), float(l)
    x = np.linspace(0.2, 3.7, 19)
    ref = x ** (ll + 1) * (w * x**2 - (2 * ll + 3)) * np.exp(-w * x**2 / 4)
    assert proportional(eval_psi(psi(inst, 1), x), ref)


@pytest.mark.parametrize("gamma, l", [(F(2), F(1)), (F(3), F(1, 2))])
def test_kepler_first_excited(gamma, l):
    inst = instantiate("kepler", {"gamma": gamma, "l": l})
    g, ll = float(gamma), float(l)
    x = np.linspace(0.31, 9.13, 16)  # avoids the node
    ref = x ** (ll + 1) * (x - 2 * (ll + 1) * (ll + 2) / g) * np.exp(-g * x / (2 * (ll + 2)))
    cf = psi(inst, 1)
    assert proportional(eval_psi(cf, x), ref)
    # the double pole of P at y = 0 shows up as an exponential of a rational term
    assert not cf.exp_rational.is_zero()


@pytest.mark.parametrize("A, B, alpha", [(F(7), F(1), F(1)), (F(9, 2), F(2), F(1, 2))])
def test_morse_first_excited(A, B, alpha):
    inst = instantiate("morse", {"A": A, "B": B, "alpha": alpha})
    a, b, al = float(A), float(B), float(alpha)
    x = np.linspace(-1.5, 4.0, 21)
    yy = np.exp(-al * x)
    ref = yy ** ((a - al) / al) * np.exp(-b * yy / al) * (b * yy - (a - al / 2))
    assert proportional(eval_psi(psi(inst, 1), x), ref)


# -- evaluation -----------------------------------------------------------------------------


def test_odd_state_vanishes_at_origin():
    assert eval_psi(psi(instantiate("harmonic", {"omega": 2}), 1), 0.0) == 0.0


def test_harmonic_nodes_location():
    cf = psi(instantiate("harmonic", {"omega": 2}), 2)
    r = 1 / math.sqrt(2)
    assert eval_psi(cf, r) == pytest.approx(0.0, abs=1e-12)
    assert eval_psi(cf, -r) == pytest.approx(0.0, abs=1e-12)
    assert eval_psi(cf, r - 1e-3) * eval_psi(cf, r + 1e-3) < 0


def test_domain_error():
    cf = psi(instantiate("isotonic", {"omega": 2, "l": 1}), 0)
    with pytest.raises(DomainError):
        eval_psi(cf, -1.0)
    cf = psi(instantiate("scarf-1", SAMPLE_PARAMS["scarf-1"][0]), 0)
    with pytest.raises(DomainError):
        eval_psi(cf, [1.0, 4.0])


def test_gaussian_normalization():
    omega = 2.0
    cf = psi(instantiate("harmonic", {"omega": 2}), 0)
    assert eval_psi(cf, 0.0) == pytest.approx((omega / (2 * math.pi)) ** 0.25, rel=1e-9)
    assert (omega / (2 * math.pi)) ** 0.25 == pytest.approx(0.7511255, abs=1e-7)


def test_normalize_idempotent():
    cf = psi(instantiate("morse", SAMPLE_PARAMS["morse"][0]), 3)
    again = normalize(cf)
    assert again.normalization == pytest.approx(cf.normalization, rel=1e-10)
    assert overlap(cf, cf) == pytest.approx(1.0, abs=1e-8)


def test_level_past_bound_is_not_normalizable():
    inst = instantiate("morse", {"A": F(1, 2), "B": 1, "alpha": 1})
    cf = assemble(rs_function(inst, 1, strict=False), inst)
    with pytest.raises(NonIntegrableError):
        normalize(cf)


def test_overlap_examples():
    inst = instantiate("harmonic", {"omega": 2})
    assert overlap(psi(inst, 0), psi(inst, 2)) == pytest.approx(0.0, abs=1e-8)
    assert overlap(psi(inst, 2), psi(inst, 2)) == pytest.approx(1.0, abs=1e-8)
    other = instantiate("harmonic", {"omega": 3})
    with pytest.raises(InstanceMismatchError):
        overlap(psi(inst, 0), psi(other, 0))


def test_assemble_rejects_foreign_level():
    a = instantiate("harmonic", {"omega": 2})
    b = instantiate("harmonic", {"omega": 3})
    with pytest.raises(InstanceMismatchError):
        assemble(rs_function(a, 1), b)


# -- properties over the catalog ---------------------------------------------------------


def top_level(inst, cap):
    mb = inst.max_bound_index
    return cap if mb is None else min(cap, mb)


def x_nodes(cf, a, b):
    x = np.linspace(a, b, 4001)[1:-1]
    _, sg = cf.log_abs(x)
    x, sg = x[sg != 0], sg[sg != 0]
    idx = np.nonzero(sg[1:] != sg[:-1])[0]
    return [brentq(lambda t: eval_psi(cf, t), x[i], x[i + 1], xtol=1e-14) for i in idx]


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_log_derivative_round_trip(name):
    inst = instantiate(name, SAMPLE_PARAMS[name][0])
    n = top_level(inst, 3)
    lev = rs_function(inst, n)
    cf = psi(inst, n)
    bps, _ = cf.window
    a, b = bps[0], bps[-1]
    # distance to the nearest node or finite endpoint sets a per-point step
    marks = np.array(x_nodes(cf, a, b) + [e for e in cf.cov.x_domain if math.isfinite(e)])
    assert len(x_nodes(cf, a, b)) == n
    x = np.linspace(a, b, 203)[1:-1]
    dist = np.min(np.abs(x[:, None] - marks[None, :]), axis=1) if len(marks) else np.full_like(x, b - a)
    keep = dist > 0.01 * (b - a)
    x, dist = x[keep], dist[keep]
    assert len(x) >= 180
    g = lambda t: cf.log_abs(t)[0]  # noqa: E731

    def d5(h):
        return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h)

    h = 0.02 * np.minimum(dist, b - a)
    d = (16 * d5(h / 2) - d5(h)) / 15
    w = lev.w.evaluate(cf.cov.forward(x)).real
    assert np.all(np.abs(-d - w) <= 1e-9 * np.maximum(1.0, np.abs(w)))


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_sign_changes_and_orthonormality(name):
    inst = instantiate(name, SAMPLE_PARAMS[name][0])
    top = top_level(inst, 5)
    cfs = [psi(inst, n) for n in range(top + 1)]
    assert [sign_changes(cf) for cf in cfs] == list(range(top + 1))
    M = np.array([[overlap(a, b) for b in cfs] for a in cfs])
    assert np.max(np.abs(M - np.eye(top + 1))) <= 1e-7


def test_descriptor_is_serializable():
    import json

    cf = psi(instantiate("kepler", {"gamma": 2, "l": 1}), 2)
    d = json.loads(json.dumps(cf.to_json()))
    assert d["n"] == 2 and d["family"] == "kepler"
    assert Poly.from_json(d["node_poly"]) == cf.node_poly
