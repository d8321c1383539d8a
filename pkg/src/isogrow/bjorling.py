"""Curve-plus-normal data, derived Cauchy data, and the initial strip.

An analytic curve f with unit normal field n (orthogonal to f') determines,
along eta = 0,

    u0 = log(|f'|^2 / 2) / 2,
    Psi0 = (Psi1, Psi2, n) with Psi1 - Psi2 = e^{-u0} f',  det Psi0 = +1,

and the derived scalars v0 = u0'/2 plus (w0, k0, l0) read off the skew
matrix Psi0^T Psi0' as

    Psi0' = Psi0 [[0, 2 w0, -k0], [-2 w0, 0, l0], [k0, -l0, 0]].

``sample_initial_strip`` turns these into the two-row vertex zig-zag on
Omega(r, eps/2).  The marching enforces, exactly by construction, the
sampled-data identities on the strip's staggered slots:

    v    = v0(xi)  at quad centers,
    w~   = w0(xi)  at quad centers,
    k, l = k0(xi), l0(xi)  at the staggered edge slots,

where the angle conditions take opposite signs at a quad's bottom vertex
(edges point out of it) versus its top vertex (edges point into it);
likewise the lengths satisfy |edge| = exp(local conformal factor).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (DegenerateCurve, DegenerateTriple, NonOrthogonal,
                     StarOverflow, UnknownName)
from .lattice import DiscreteSurface, DomainSpec

SQRT2 = float(np.sqrt(2.0))


@dataclass
class BjorlingData:
    """Analytic curve f, unit normal n and their derivatives on [-r, r].

    All evaluators are vectorized: xi of shape (...,) maps to (..., 3).
    fpp/npp are optional second derivatives; when present, the Cauchy
    quantities are computed analytically instead of by finite differences.
    Evaluators must tolerate arguments somewhat beyond [-r, r] (the smooth
    solver pads its periodic domain).
    """

    f: Callable
    fp: Callable
    n: Callable
    np_: Callable
    r: float
    name: str = "custom"
    fpp: Callable | None = None
    npp: Callable | None = None


def _vec3(*comps):
    return np.stack(np.broadcast_arrays(*comps), axis=-1).astype(float)


def cylinder_data(r: float = 1.0) -> BjorlingData:
    """Diagonal trace of the unit cylinder (cos x, sin x, y)."""
    def f(xi):
        xi = np.asarray(xi, dtype=float)
        return _vec3(np.cos(xi), np.sin(xi), -xi)

    def fp(xi):
        xi = np.asarray(xi, dtype=float)
        return _vec3(-np.sin(xi), np.cos(xi), -np.ones_like(xi))

    def fpp(xi):
        xi = np.asarray(xi, dtype=float)
        return _vec3(-np.cos(xi), -np.sin(xi), np.zeros_like(xi))

    def n(xi):
        xi = np.asarray(xi, dtype=float)
        return _vec3(np.cos(xi), np.sin(xi), np.zeros_like(xi))

    def np_(xi):
        xi = np.asarray(xi, dtype=float)
        return _vec3(-np.sin(xi), np.cos(xi), np.zeros_like(xi))

    def npp(xi):
        xi = np.asarray(xi, dtype=float)
        return _vec3(-np.cos(xi), -np.sin(xi), np.zeros_like(xi))

    return BjorlingData(f=f, fp=fp, n=n, np_=np_, r=r, name="cylinder",
                        fpp=fpp, npp=npp)


def sphere_mercator_data(r: float = 1.0) -> BjorlingData:
    """Diagonal trace of the Mercator sphere (sech y cos x, sech y sin x, tanh y)."""
    def f(xi):
        xi = np.asarray(xi, dtype=float)
        s = 1.0 / np.cosh(xi)
        return _vec3(s * np.cos(xi), s * np.sin(xi), -np.tanh(xi))

    def fp(xi):
        xi = np.asarray(xi, dtype=float)
        s, t, c, sn = 1.0 / np.cosh(xi), np.tanh(xi), np.cos(xi), np.sin(xi)
        return _vec3(-s * t * c - s * sn, -s * t * sn + s * c, -s * s)

    def fpp(xi):
        xi = np.asarray(xi, dtype=float)
        s, t, c, sn = 1.0 / np.cosh(xi), np.tanh(xi), np.cos(xi), np.sin(xi)
        return _vec3(-2 * s**3 * c + 2 * s * t * sn,
                     -2 * s**3 * sn - 2 * s * t * c,
                     2 * s * s * t)

    return BjorlingData(f=f, fp=fp, n=f, np_=fp, r=r, name="sphere_mercator",
                        fpp=fpp, npp=fpp)


def curve_from_coefficients(poly, trig) -> tuple[Callable, Callable, Callable]:
    """Component-wise evaluators (value, d/dxi, d2/dxi2) from coefficient lists.

    poly: three ascending coefficient lists; trig: three lists of
    [a, b, omega] terms meaning a*cos(omega*xi) + b*sin(omega*xi).
    """
    polys = [np.polynomial.Polynomial(c if len(c) else [0.0]) for c in poly]
    dpolys = [p.deriv() for p in polys]
    ddpolys = [p.deriv(2) for p in polys]
    trig = [[(float(a), float(b), float(w)) for a, b, w in comp] for comp in trig]

    def evaluate(xi, order):
        xi = np.asarray(xi, dtype=float)
        comps = []
        for i in range(3):
            base = [polys, dpolys, ddpolys][order][i](xi)
            for a, b, w in trig[i]:
                if order == 0:
                    base = base + a * np.cos(w * xi) + b * np.sin(w * xi)
                elif order == 1:
                    base = base + w * (-a * np.sin(w * xi) + b * np.cos(w * xi))
                else:
                    base = base + w * w * (-a * np.cos(w * xi) - b * np.sin(w * xi))
            comps.append(base)
        return _vec3(*comps)

    return (lambda xi: evaluate(xi, 0), lambda xi: evaluate(xi, 1),
            lambda xi: evaluate(xi, 2))


def builtin_bjorling(name: str, r: float = 1.0) -> BjorlingData:
    if name == "cylinder":
        return cylinder_data(r)
    if name == "sphere_mercator":
        return sphere_mercator_data(r)
    raise UnknownName(f"no built-in Bjorling data named {name!r}")


def validate_bjorling(data: BjorlingData, samples: int = 65):
    xi = np.linspace(-data.r, data.r, samples)
    fp = data.fp(xi)
    n = data.n(xi)
    speed = np.linalg.norm(fp, axis=-1)
    if np.any(speed <= 1e-14):
        raise DegenerateCurve("curve tangent vanishes on the data interval")
    if np.max(np.abs(np.linalg.norm(n, axis=-1) - 1.0)) > 1e-12:
        raise NonOrthogonal("normal field is not unit length")
    if np.max(np.abs(np.einsum("...i,...i->...", fp, n)) / speed) > 1e-10:
        raise NonOrthogonal("normal field is not orthogonal to the tangent")


@dataclass
class CauchyData:
    """Scalar evaluators u0, v0, w0, k0, l0 and the adapted frame Psi0."""

    u0: Callable
    v0: Callable
    w0: Callable
    k0: Callable
    l0: Callable
    psi0: Callable   # xi -> (..., 3, 3), columns Psi1, Psi2, Psi3
    r: float


def derive_cauchy_data(data: BjorlingData, fd_step: float | None = None) -> CauchyData:
    """Cauchy data along eta = 0 from curve-and-normal data.

    With second derivatives available the scalars are computed in closed
    form; otherwise Psi0 and u0 are probed by central differences of step
    ``fd_step`` (default 1e-6, balancing truncation against round-off).
    """
    validate_bjorling(data)

    def u0(xi):
        fp = data.fp(xi)
        sq = np.einsum("...i,...i->...", fp, fp)
        if np.any(sq <= 0):
            raise DegenerateCurve("vanishing tangent")
        return 0.5 * np.log(sq / 2.0)

    def frame_parts(xi):
        fp = data.fp(xi)
        speed = np.linalg.norm(fp, axis=-1, keepdims=True)
        t = fp / speed
        nv = data.n(xi)
        s = np.cross(nv, t)
        return t, s, nv

    def psi0(xi):
        t, s, nv = frame_parts(xi)
        psi1 = (t + s) / SQRT2
        psi2 = (s - t) / SQRT2
        return np.stack([psi1, psi2, nv], axis=-1)

    analytic = data.fpp is not None and data.npp is not None

    if analytic:
        def scalars(xi):
            fp, fpp, nv, npv = data.fp(xi), data.fpp(xi), data.n(xi), data.np_(xi)
            sq = np.einsum("...i,...i->...", fp, fp)
            u0p = np.einsum("...i,...i->...", fp, fpp) / sq
            speed = np.sqrt(sq)[..., None]
            t = fp / speed
            tp = fpp / speed - t * np.einsum("...i,...i->...", t, fpp)[..., None] / speed
            s = np.cross(nv, t)
            sp = np.cross(npv, t) + np.cross(nv, tp)
            psi1 = (t + s) / SQRT2
            psi2 = (s - t) / SQRT2
            psi2p = (sp - tp) / SQRT2
            w0 = 0.5 * np.einsum("...i,...i->...", psi1, psi2p)
            k0 = -np.einsum("...i,...i->...", psi1, npv)
            l0 = np.einsum("...i,...i->...", psi2, npv)
            return 0.5 * u0p, w0, k0, l0
    else:
        step = 1e-6 if fd_step is None else float(fd_step)

        def scalars(xi):
            xi = np.asarray(xi, dtype=float)
            v0 = 0.5 * (u0(xi + step) - u0(xi - step)) / (2 * step)
            dpsi = (psi0(xi + step) - psi0(xi - step)) / (2 * step)
            m = np.einsum("...ji,...jk->...ik", psi0(xi), dpsi)
            m = 0.5 * (m - np.swapaxes(m, -1, -2))
            return v0, 0.5 * m[..., 0, 1], m[..., 2, 0], m[..., 1, 2]

    return CauchyData(
        u0=u0,
        v0=lambda xi: scalars(xi)[0],
        w0=lambda xi: scalars(xi)[1],
        k0=lambda xi: scalars(xi)[2],
        l0=lambda xi: scalars(xi)[3],
        psi0=psi0,
        r=data.r,
    )


def _star(eps_z: float) -> float:
    if abs(eps_z) >= 1.0:
        raise StarOverflow(f"|eps*z| = {abs(eps_z):.3g} >= 1")
    return float(np.sqrt(1.0 - eps_z * eps_z))


def _unit(v, what: str):
    nrm = float(np.linalg.norm(v))
    if nrm <= 1e-300:
        raise DegenerateTriple(f"degenerate {what} in strip construction")
    return v / nrm


def sample_initial_strip(cd: CauchyData, data: BjorlingData, eps: float) -> DiscreteSurface:
    """Two-row vertex zig-zag on Omega(r, eps/2) realizing the sampled data.

    Row 0 holds vertices P_j at xi = j*eps, row 1 holds Q_j at
    xi = j*eps + eps/2.  The anchor triple fixes P_0 = f(0) with the
    x-edge along Psi1(0) and the y-edge in the tangent plane on the
    Psi2(0) side; each further vertex is placed by one length, one angle
    and one dihedral condition sampled from the Cauchy data.
    """
    if not eps < data.r:
        raise ValueError("eps must be smaller than the data half-width r")
    spec = DomainSpec(r=data.r, h=eps / 2.0, eps=eps)

    probe = np.linspace(-data.r, data.r, max(65, 4 * spec.m_max + 1))
    worst = max(np.max(np.abs(g(probe))) for g in (cd.v0, cd.w0, cd.k0, cd.l0))
    if eps * worst >= 1.0:
        raise StarOverflow(f"eps * sup|data| = {eps * worst:.3g} >= 1")

    strip = DiscreteSurface.empty(spec)
    pos = strip.positions

    def p_idx(j):
        return (2 * j, -2 * j)

    def q_idx(j):
        return (2 * j + 2, -2 * j)

    v0 = lambda x: float(cd.v0(x))
    w0 = lambda x: float(cd.w0(x))
    k0 = lambda x: float(cd.k0(x))
    l0 = lambda x: float(cd.l0(x))

    # anchor triple around xi = 0
    psi = cd.psi0(0.0)
    a0 = psi[:, 0]
    u00 = float(cd.u0(0.0))
    uhat = u00 + 0.5 * eps * v0(0.0)      # log|A_0|
    ucheck_w = u00 - 0.5 * eps * v0(0.0)  # log|B_{-1}|
    alpha = eps * w0(0.0)
    ub = alpha * a0 + _star(alpha) * psi[:, 1]
    P0 = data.f(0.0)
    pos.set(p_idx(0), P0)
    pos.set(q_idx(0), P0 + eps * np.exp(uhat) * a0)
    pos.set(q_idx(-1), P0 + eps * np.exp(ucheck_w) * ub)
    nup0 = _unit(np.cross(a0, ub), "anchor plane")

    # eastward march: alternate B-steps (new row-0 vertex) and A-steps (new row-1 vertex)
    uh = uhat
    nup = nup0
    j = 0
    while spec.contains(p_idx(j + 1)):
        P, Q = pos.get(p_idx(j)), pos.get(q_idx(j))
        a = _unit(Q - P, "x-edge")
        uc = uh + eps * v0(j * eps + eps / 2)
        alpha = eps * w0(j * eps + eps / 2)
        el = eps * l0(j * eps + eps / 4)
        s = _star(alpha)
        m = np.cross(nup, a)
        u_b = alpha * a + s * (_star(el) * m - el * nup)
        pos.set(p_idx(j + 1), Q - eps * np.exp(uc) * u_b)
        ndown = _unit(np.cross(a, u_b), "down-quad plane")

        if not spec.contains(q_idx(j + 1)):
            break
        b = _unit(Q - pos.get(p_idx(j + 1)), "y-edge")
        uh = uc + eps * v0((j + 1) * eps)
        alpha = -eps * w0((j + 1) * eps)
        ek = eps * k0(j * eps + 3 * eps / 4)
        s = _star(alpha)
        m = np.cross(ndown, b)
        u_a = alpha * b + s * (-_star(ek) * m + ek * ndown)
        pos.set(q_idx(j + 1), pos.get(p_idx(j + 1)) + eps * np.exp(uh) * u_a)
        nup = _unit(np.cross(u_a, b), "up-quad plane")
        j += 1

    # westward march: A-steps (new row-0 vertex) then B-steps (new row-1 vertex)
    uc = ucheck_w
    nup = nup0
    j = -1
    while spec.contains(p_idx(j)):
        Q, Pe = pos.get(q_idx(j)), pos.get(p_idx(j + 1))
        b = _unit(Q - Pe, "y-edge")
        uh = uc - eps * v0(j * eps + eps / 2)
        alpha = eps * w0(j * eps + eps / 2)
        ek = eps * k0(j * eps + 3 * eps / 4)
        s = _star(alpha)
        m = np.cross(nup, b)
        u_a = alpha * b - s * (_star(ek) * m + ek * nup)
        pos.set(p_idx(j), Q - eps * np.exp(uh) * u_a)
        ndown = _unit(np.cross(u_a, b), "down-quad plane")

        if not spec.contains(q_idx(j - 1)):
            break
        a = _unit(Q - pos.get(p_idx(j)), "x-edge")
        uc = uh - eps * v0(j * eps)
        alpha = -eps * w0(j * eps)
        el = eps * l0(j * eps + eps / 4)
        s = _star(alpha)
        m = np.cross(ndown, a)
        u_b = alpha * a + s * (_star(el) * m + el * ndown)
        pos.set(q_idx(j - 1), pos.get(p_idx(j)) + eps * np.exp(uc) * u_b)
        nup = _unit(np.cross(a, u_b), "up-quad plane")
        j -= 1

    return strip
