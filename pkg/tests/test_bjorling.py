import numpy as np
import pytest

from isogrow.bjorling import (BjorlingData, builtin_bjorling, curve_from_coefficients,
                              derive_cauchy_data, sample_initial_strip,
                              validate_bjorling)
from isogrow.errors import DegenerateCurve, NonOrthogonal, StarOverflow, UnknownName
from isogrow.quantities import extract

XIS = np.linspace(-0.9, 0.9, 41)


def test_catalog_validates(cylinder_data, sphere_data):
    validate_bjorling(cylinder_data)
    validate_bjorling(sphere_data)
    with pytest.raises(UnknownName):
        builtin_bjorling("torus")


def test_bad_normal_rejected(cylinder_data):
    bad = BjorlingData(f=cylinder_data.f, fp=cylinder_data.fp,
                       n=cylinder_data.f, np_=cylinder_data.fp, r=1.0)
    with pytest.raises(NonOrthogonal):
        validate_bjorling(bad)


def test_stationary_curve_rejected():
    # f' has a zero at xi = 0 (curve f = (xi^2, 0, 0) is not regular there)
    f, fp, fpp = curve_from_coefficients([[0.0, 0.0, 1.0], [0.0], [0.0]], [[], [], []])
    n, np_, npp = curve_from_coefficients([[0.0], [0.0], [1.0]], [[], [], []])
    data = BjorlingData(f=f, fp=fp, n=n, np_=np_, r=1.0, fpp=fpp, npp=npp)
    with pytest.raises(DegenerateCurve):
        validate_bjorling(data)


def test_cylinder_cauchy_closed_forms(cylinder_cauchy):
    cd = cylinder_cauchy
    assert np.max(np.abs(cd.u0(XIS))) < 1e-12
    assert np.max(np.abs(cd.v0(XIS))) < 1e-12
    assert np.max(np.abs(cd.w0(XIS))) < 1e-12
    assert np.max(np.abs(cd.k0(XIS) + 1.0)) < 1e-12
    assert np.max(np.abs(cd.l0(XIS))) < 1e-12


def test_sphere_cauchy_closed_forms(sphere_cauchy):
    # independently differentiated closed forms for the Mercator diagonal
    cd = sphere_cauchy
    assert np.max(np.abs(cd.u0(XIS) - np.log(1 / np.cosh(XIS)))) < 1e-12
    assert np.max(np.abs(cd.v0(XIS) + 0.5 * np.tanh(XIS))) < 1e-12
    assert np.max(np.abs(cd.w0(XIS) - 0.5 * np.tanh(XIS))) < 1e-12
    assert np.max(np.abs(cd.k0(XIS) + 1 / np.cosh(XIS))) < 1e-12
    assert np.max(np.abs(cd.l0(XIS) + 1 / np.cosh(XIS))) < 1e-12


def test_psi0_orthonormal(sphere_cauchy, rng):
    xis = rng.uniform(-0.95, 0.95, size=100)
    psi = sphere_cauchy.psi0(xis)
    gram = np.einsum("...ji,...jk->...ik", psi, psi)
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10
    assert np.max(np.abs(np.linalg.det(psi) - 1.0)) < 1e-10


def test_frame_ode_residual(sphere_cauchy):
    """FD probe of the frame equation against the extracted scalars."""
    cd = sphere_cauchy
    step = 1e-6
    for xi in (-0.5, 0.0, 0.4):
        dpsi = (cd.psi0(xi + step) - cd.psi0(xi - step)) / (2 * step)
        m = np.array([[0, 2 * cd.w0(xi), -cd.k0(xi)],
                      [-2 * cd.w0(xi), 0, cd.l0(xi)],
                      [cd.k0(xi), -cd.l0(xi), 0]], dtype=float)
        resid = np.max(np.abs(dpsi - cd.psi0(xi) @ m))
        assert resid < 1e-8


def test_fd_fallback_matches_analytic(sphere_data, sphere_cauchy):
    nofpp = BjorlingData(f=sphere_data.f, fp=sphere_data.fp, n=sphere_data.n,
                        np_=sphere_data.np_, r=sphere_data.r)
    cd_fd = derive_cauchy_data(nofpp)
    for fld in ("v0", "w0", "k0", "l0"):
        a = getattr(sphere_cauchy, fld)(XIS)
        b = getattr(cd_fd, fld)(XIS)
        assert np.max(np.abs(a - b)) < 1e-9


def test_user_curve_coefficients():
    # plane curve f = (xi, 0, 0) with normal (0, 0, 1): a flat strip
    f, fp, fpp = curve_from_coefficients([[0.0, 1.0], [0.0], [0.0]], [[], [], []])
    n, np_, npp = curve_from_coefficients([[0.0], [0.0], [1.0]], [[], [], []])
    data = BjorlingData(f=f, fp=fp, n=n, np_=np_, r=1.0, fpp=fpp, npp=npp)
    validate_bjorling(data)
    cd = derive_cauchy_data(data)
    assert np.max(np.abs(cd.k0(XIS))) < 1e-12
    assert np.max(np.abs(cd.l0(XIS))) < 1e-12


def _howtostart_sup(strip, cd):
    q = extract(strip)
    eps = strip.spec.eps
    sups = {}
    for name, ref in (("v", cd.v0), ("w_tilde", cd.w0), ("k", cd.k0), ("l", cd.l0)):
        fld = getattr(q, name)
        sup = 0.0
        for (m, n) in fld.indices():
            xi = (m - n) * eps / 4.0
            sup = max(sup, abs(float(fld.get((m, n))) - float(ref(xi))))
        sups[name] = sup
    return sups


@pytest.mark.parametrize("name", ["cylinder", "sphere_mercator"])
def test_strip_reproduces_sampled_data(name):
    data = builtin_bjorling(name, r=1.0)
    cd = derive_cauchy_data(data)
    strip = sample_initial_strip(cd, data, 0.1)
    sups = _howtostart_sup(strip, cd)
    for key, val in sups.items():
        assert val < 1e-12, (key, val)


def test_strip_first_order_accuracy(sphere_data, sphere_cauchy):
    """Positions and difference quotients approach the curve frame at O(eps)."""
    sups = []
    for eps in (0.1, 0.05, 0.025):
        strip = sample_initial_strip(sphere_cauchy, sphere_data, eps)
        pos = strip.positions
        sup_f = 0.0
        sup_dx = 0.0
        sup_dy = 0.0
        for (m, n) in pos.indices():
            xi = (m - n) * eps / 4.0
            sup_f = max(sup_f, float(np.linalg.norm(pos.get((m, n)) - sphere_data.f(xi))))
        q = extract(strip)
        for (m, n) in q.u_hat.indices():
            xi = (m - n) * eps / 4.0
            psi = sphere_cauchy.psi0(xi)
            target = np.exp(sphere_cauchy.u0(xi)) * psi[:, 0]
            dx = np.exp(q.u_hat.get((m, n))) * q.a.get((m, n))
            sup_dx = max(sup_dx, float(np.linalg.norm(dx - target)))
        for (m, n) in q.u_check.indices():
            xi = (m - n) * eps / 4.0
            psi = sphere_cauchy.psi0(xi)
            target = np.exp(sphere_cauchy.u0(xi)) * psi[:, 1]
            dy = np.exp(q.u_check.get((m, n))) * q.b.get((m, n))
            sup_dy = max(sup_dy, float(np.linalg.norm(dy - target)))
        sups.append((sup_f, sup_dx, sup_dy))
    for ch in range(3):
        for lvl in range(2):
            ratio = sups[lvl + 1][ch] / sups[lvl][ch]
            assert 0.4 <= ratio <= 0.6, (ch, lvl, ratio, sups)


def test_star_overflow_gate(sphere_data, sphere_cauchy):
    with pytest.raises(StarOverflow):
        # eps * sup|k0| = 1.2 >= 1 for a scaled-up curvature
        from isogrow.bjorling import CauchyData
        cd = sphere_cauchy
        hot = CauchyData(u0=cd.u0, v0=cd.v0, w0=cd.w0,
                         k0=lambda xi: 12.0 * np.ones_like(np.asarray(xi, float)),
                         l0=cd.l0, psi0=cd.psi0, r=cd.r)
        sample_initial_strip(hot, sphere_data, 0.1)
