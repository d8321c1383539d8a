"""Smooth-side references: closed-form isothermic surfaces, a Cauchy
solver for the Gauss-Codazzi system, and frame/surface reconstruction.

The evolution system in (xi, eta) coordinates is

    v_eta = w_xi
    w_eta = -v_xi - k*l
    k_eta =  k_xi + 2 l (w - v)
    l_eta = -l_xi + 2 k (w + v)

with u carried along via u_eta = 2 w.  The (v, w) block is elliptic, so
marching in eta amplifies mode kappa like exp(kappa*eta); stability for
analytic data comes from three ingredients:

  * data are multiplied by an entire plateau window (difference of erf),
    making the periodic extension analytic with rapidly decaying spectrum;
  * modes above a hard cutoff are dropped, with the cutoff chosen from a
    round-off growth budget  kappa_cut * eta_range <= budget;
  * an exponential taper exp(-alpha (k/k_max)^p) is applied each step; it
    only bites near the Nyquist band, i.e. when the budget cutoff does not
    bind first.  (Tapering relative to the cutoff instead would damp
    mid-band window-edge modes whose exact growth must cancel in the
    interior, and destroys the solution there.)

Accuracy therefore degrades with the eta range; results are meaningful on
the shrinking interior |xi| <= r - eta - margin, which the history object
exposes as a mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf

from .bjorling import CauchyData
from .errors import BlowUp, FrameDrift, UnknownName

FILTER_ALPHA = 36.0
FILTER_POWER = 16
CUT_BUDGET = 16.0     # kappa_cut * eta_range; exp(budget) bounds round-off growth
CUT_FRACTION = 0.6    # never keep more than this fraction of the Nyquist band
WINDOW_WIDTH = 0.25
REORTH_EVERY = 16


@dataclass
class SmoothSurface:
    """Closed-form isothermic surface with all derived quantity evaluators.

    Evaluators broadcast over (x, y) arrays; F, Fx, Fy, N return (..., 3).
    """

    name: str
    F: Callable
    Fx: Callable
    Fy: Callable
    N: Callable
    u: Callable
    v: Callable
    w: Callable
    k: Callable
    l: Callable


def _vec3(*comps):
    return np.stack(np.broadcast_arrays(*comps), axis=-1).astype(float)


def builtin_surface(name: str) -> SmoothSurface:
    if name == "cylinder":
        def F(x, y):
            return _vec3(np.cos(x), np.sin(x), y)

        def Fx(x, y):
            return _vec3(-np.sin(x), np.cos(x), np.zeros_like(x + y))

        def Fy(x, y):
            z = np.zeros_like(np.asarray(x, dtype=float) + y)
            return _vec3(z, z, np.ones_like(z))

        def N(x, y):
            return _vec3(np.cos(x), np.sin(x), np.zeros_like(x + y))

        zero = lambda x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return SmoothSurface(name=name, F=F, Fx=Fx, Fy=Fy, N=N, u=zero,
                             v=zero, w=zero,
                             k=lambda x, y: -np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape),
                             l=zero)
    if name == "sphere_mercator":
        def F(x, y):
            s = 1.0 / np.cosh(y)
            return _vec3(s * np.cos(x), s * np.sin(x), np.tanh(y))

        def Fx(x, y):
            s = 1.0 / np.cosh(y)
            return _vec3(-s * np.sin(x), s * np.cos(x), np.zeros_like(s * x))

        def Fy(x, y):
            s, t = 1.0 / np.cosh(y), np.tanh(y)
            return _vec3(-s * t * np.cos(x), -s * t * np.sin(x), s * s)

        return SmoothSurface(
            name=name, F=F, Fx=Fx, Fy=Fy, N=F,
            u=lambda x, y: -np.log(np.cosh(y)) + 0.0 * np.asarray(x, dtype=float),
            v=lambda x, y: 0.5 * np.tanh(y) + 0.0 * np.asarray(x, dtype=float),
            w=lambda x, y: -0.5 * np.tanh(y) + 0.0 * np.asarray(x, dtype=float),
            k=lambda x, y: -1.0 / np.cosh(y) + 0.0 * np.asarray(x, dtype=float),
            l=lambda x, y: -1.0 / np.cosh(y) + 0.0 * np.asarray(x, dtype=float),
        )
    raise UnknownName(f"no built-in surface named {name!r}")


def surface_invariant_residuals(surf: SmoothSurface, x, y, fd: float = 1e-5,
                                fd2: float = 2e-4) -> dict:
    """Conformality, curvature-line and Gauss-Codazzi residuals at points.

    Derivatives not provided by the surface are probed by central
    differences: step ``fd`` for first derivatives, the larger ``fd2`` for
    second differences (whose round-off noise scales like eps_mach/fd2^2).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    e2u = np.exp(2 * surf.u(x, y))
    fx, fy = surf.Fx(x, y), surf.Fy(x, y)
    conf = max(
        float(np.max(np.abs(np.einsum("...i,...i->...", fx, fx) - e2u))),
        float(np.max(np.abs(np.einsum("...i,...i->...", fy, fy) - e2u))),
        float(np.max(np.abs(np.einsum("...i,...i->...", fx, fy)))),
    )
    fxy = (surf.Fx(x, y + fd) - surf.Fx(x, y - fd)) / (2 * fd)
    curv = float(np.max(np.abs(np.einsum("...i,...i->...", fxy, surf.N(x, y)))))
    uxx = (surf.u(x + fd2, y) - 2 * surf.u(x, y) + surf.u(x - fd2, y)) / fd2**2
    uyy = (surf.u(x, y + fd2) - 2 * surf.u(x, y) + surf.u(x, y - fd2)) / fd2**2
    gauss = float(np.max(np.abs(-(uxx + uyy) - surf.k(x, y) * surf.l(x, y))))
    lx = (surf.l(x + fd, y) - surf.l(x - fd, y)) / (2 * fd)
    ux = (surf.u(x + fd, y) - surf.u(x - fd, y)) / (2 * fd)
    ky = (surf.k(x, y + fd) - surf.k(x, y - fd)) / (2 * fd)
    uy = (surf.u(x, y + fd) - surf.u(x, y - fd)) / (2 * fd)
    codazzi = max(float(np.max(np.abs(lx - surf.k(x, y) * ux))),
                  float(np.max(np.abs(ky - surf.l(x, y) * uy))))
    return {"conformality": conf, "curvature_line": curv, "gauss": gauss,
            "codazzi": codazzi}


@dataclass
class GCState:
    eta: float
    xi: np.ndarray
    v: np.ndarray
    w: np.ndarray
    k: np.ndarray
    l: np.ndarray
    u: np.ndarray | None = None


@dataclass
class GCHistory:
    """States at every accepted eta level, plus the solver geometry."""

    xi: np.ndarray
    etas: np.ndarray
    v: np.ndarray   # (levels, nodes)
    w: np.ndarray
    k: np.ndarray
    l: np.ndarray
    u: np.ndarray
    r: float
    window_halfwidth: float
    kappa_cut: float

    def state(self, level: int) -> GCState:
        return GCState(eta=float(self.etas[level]), xi=self.xi,
                       v=self.v[level], w=self.w[level], k=self.k[level],
                       l=self.l[level], u=self.u[level])

    def interior_mask(self, level: int, margin: float = 0.1) -> np.ndarray:
        return np.abs(self.xi) <= self.r - abs(float(self.etas[level])) - margin

    def __len__(self):
        return len(self.etas)


def export_gc_history_csv(history: "GCHistory", path) -> None:
    """Level-by-level CSV of the solved fields: eta,xi,v,w,k,l(,u)."""
    lines = ["eta,xi,v,w,k,l,u"]
    for lev in range(len(history)):
        eta = float(history.etas[lev])
        for i in range(history.xi.size):
            lines.append(f"{eta:.17g},{history.xi[i]:.17g},{history.v[lev, i]:.17g},"
                         f"{history.w[lev, i]:.17g},{history.k[lev, i]:.17g},"
                         f"{history.l[lev, i]:.17g},{history.u[lev, i]:.17g}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _plateau_window(xi, halfwidth, width):
    return 0.5 * (erf((xi + halfwidth) / width) - erf((xi - halfwidth) / width))


def solve_gc_cauchy(init: CauchyData, h: float, n_nodes: int = 512,
                    window_width: float = WINDOW_WIDTH,
                    cut_budget: float = CUT_BUDGET,
                    filter_alpha: float = FILTER_ALPHA,
                    filter_power: int = FILTER_POWER,
                    blowup_factor: float = 100.0,
                    min_steps: int = 128) -> GCHistory:
    """March the Gauss-Codazzi Cauchy problem from eta = 0 to eta = h.

    Classical RK4 in eta with Fourier differencing in xi on a padded
    periodic domain; see the module docstring for the stabilization.
    Raises BlowUp when the solution grows past ``blowup_factor`` times its
    initial magnitude, which is the expected outcome for rough data.
    """
    r = init.r
    b = r + 4.0 * window_width
    L = b + 5.0 * window_width
    xi = (np.arange(n_nodes) - n_nodes // 2) * (2 * L / n_nodes)
    wave = 2 * np.pi * np.fft.rfftfreq(n_nodes, d=2 * L / n_nodes)

    kappa_max = float(wave[-1])
    kappa_cut = min(CUT_FRACTION * kappa_max, cut_budget / max(h, 1e-12))
    keep = wave <= kappa_cut
    sigma = np.where(keep, np.exp(-filter_alpha * (wave / kappa_max) ** filter_power), 0.0)

    def dxi(f):
        return np.fft.irfft(1j * wave * np.fft.rfft(f), n=n_nodes)

    def smooth(f):
        return np.fft.irfft(sigma * np.fft.rfft(f), n=n_nodes)

    win = _plateau_window(xi, b, window_width)
    v = smooth(np.asarray(init.v0(xi), dtype=float) * win)
    w = smooth(np.asarray(init.w0(xi), dtype=float) * win)
    k = smooth(np.asarray(init.k0(xi), dtype=float) * win)
    l = smooth(np.asarray(init.l0(xi), dtype=float) * win)
    u = np.asarray(init.u0(xi), dtype=float)

    n_steps = max(min_steps, int(math.ceil(4.0 * h * kappa_cut)))
    if n_steps % 2:
        n_steps += 1
    deta = h / n_steps

    scale0 = max(1.0, float(max(np.max(np.abs(f)) for f in (v, w, k, l))))

    def rhs(state):
        v, w, k, l, u = state
        return (dxi(w),
                -dxi(v) - k * l,
                dxi(k) + 2 * l * (w - v),
                -dxi(l) + 2 * k * (w + v),
                2 * w)

    levels_v = [v.copy()]; levels_w = [w.copy()]
    levels_k = [k.copy()]; levels_l = [l.copy()]
    levels_u = [u.copy()]
    state = (v, w, k, l, u)
    for step in range(n_steps):
        k1 = rhs(state)
        k2 = rhs(tuple(s + 0.5 * deta * d for s, d in zip(state, k1)))
        k3 = rhs(tuple(s + 0.5 * deta * d for s, d in zip(state, k2)))
        k4 = rhs(tuple(s + deta * d for s, d in zip(state, k3)))
        state = tuple(s + deta / 6.0 * (d1 + 2 * d2 + 2 * d3 + d4)
                      for s, d1, d2, d3, d4 in zip(state, k1, k2, k3, k4))
        state = tuple(smooth(f) for f in state[:4]) + (state[4],)
        peak = max(np.max(np.abs(f)) for f in state[:4])
        if not np.isfinite(peak) or peak > blowup_factor * scale0:
            raise BlowUp(f"solution magnitude {peak:.3e} exceeds bound at eta = {(step + 1) * deta:.4f}",
                         eta=(step + 1) * deta)
        levels_v.append(state[0].copy()); levels_w.append(state[1].copy())
        levels_k.append(state[2].copy()); levels_l.append(state[3].copy())
        levels_u.append(state[4].copy())

    return GCHistory(xi=xi, etas=np.arange(n_steps + 1) * deta,
                     v=np.array(levels_v), w=np.array(levels_w),
                     k=np.array(levels_k), l=np.array(levels_l),
                     u=np.array(levels_u), r=r, window_halfwidth=b,
                     kappa_cut=kappa_cut)


@dataclass
class ReconstructedPatch:
    """Frame and position samples on the (xi, eta) grid (coarse eta levels)."""

    xi: np.ndarray
    etas: np.ndarray
    F: np.ndarray      # (levels, nodes, 3)
    Psi: np.ndarray    # (levels, nodes, 3, 3); columns are the frame vectors
    u: np.ndarray      # (levels, nodes)
    r: float
    max_frame_drift: float = 0.0

    def interior_mask(self, level: int, margin: float = 0.1) -> np.ndarray:
        return np.abs(self.xi) <= self.r - abs(float(self.etas[level])) - margin


def _interp_mid(f):
    """Values at midpoints i+1/2 from a 4-point centered stencil (O(h^4))."""
    out = (-f[..., :-3] + 9 * f[..., 1:-2] + 9 * f[..., 2:-1] - f[..., 3:]) / 16.0
    first = (5 * f[..., 0] + 15 * f[..., 1] - 5 * f[..., 2] + f[..., 3]) / 16.0
    last = (5 * f[..., -1] + 15 * f[..., -2] - 5 * f[..., -3] + f[..., -4]) / 16.0
    return np.concatenate([first[..., None], out, last[..., None]], axis=-1)


def _xi_generator(v, w, k, l):
    """so(3) matrix in Psi_xi = Psi * B, as (..., 3, 3)."""
    z = np.zeros_like(v)
    return np.stack([
        np.stack([z, 2 * w, -k], axis=-1),
        np.stack([-2 * w, z, l], axis=-1),
        np.stack([k, -l, z], axis=-1),
    ], axis=-2)


def _eta_generator(v, k, l):
    """so(3) matrix in Psi_eta = Psi * A."""
    z = np.zeros_like(v)
    return np.stack([
        np.stack([z, -2 * v, -k], axis=-1),
        np.stack([2 * v, z, -l], axis=-1),
        np.stack([k, l, z], axis=-1),
    ], axis=-2)


def _orthogonality_defect(psi):
    g = np.einsum("...ji,...jk->...ik", psi, psi)
    g = g - np.eye(3)
    return float(np.max(np.abs(g)))


def _polar_project(psi):
    uu, _, vt = np.linalg.svd(psi)
    return uu @ vt


def reconstruct_surface(history: GCHistory, anchor_F, anchor_Psi,
                        reorth_every: int = REORTH_EVERY,
                        drift_limit: float = 1e-6) -> ReconstructedPatch:
    """Integrate frame and position through a solved Gauss-Codazzi history.

    The frame is first laid along eta = 0 from the anchor by the xi frame
    equation, then marched in eta (step = two stored levels, the middle one
    supplying exact RK4 midpoint coefficients) together with
    F_eta = e^u (Psi_1 + Psi_2).  The frame is polar-reorthonormalized
    every ``reorth_every`` eta steps; exceeding ``drift_limit`` before a
    projection raises FrameDrift.
    """
    xi = history.xi
    n = xi.size
    dxi = float(xi[1] - xi[0])
    i0 = n // 2
    if abs(float(xi[i0])) > 1e-12:
        raise ValueError("grid must contain xi = 0")

    lev0 = history.state(0)
    bmat = _xi_generator(lev0.v, lev0.w, lev0.k, lev0.l)
    bmid = _interp_mid(np.moveaxis(bmat, 0, -1))
    bmid = np.moveaxis(bmid, -1, 0)  # (n-1, 3, 3) at midpoints i+1/2

    psi_row = np.empty((n, 3, 3))
    f_row = np.empty((n, 3))
    psi_row[i0] = np.asarray(anchor_Psi, dtype=float)
    f_row[i0] = np.asarray(anchor_F, dtype=float)
    e_u0 = np.exp(lev0.u)
    eu_mid = _interp_mid(e_u0)

    def row_step(psi, f, bm_lo, bm_mid, bm_hi, eu_lo, eu_mid_, eu_hi, hstep):
        def tangent(p, eu):
            return eu * (p[:, 0] - p[:, 1])

        k1p = psi @ bm_lo
        k1f = tangent(psi, eu_lo)
        p2 = psi + 0.5 * hstep * k1p
        k2p = p2 @ bm_mid
        k2f = tangent(p2, eu_mid_)
        p3 = psi + 0.5 * hstep * k2p
        k3p = p3 @ bm_mid
        k3f = tangent(p3, eu_mid_)
        p4 = psi + hstep * k3p
        k4p = p4 @ bm_hi
        k4f = tangent(p4, eu_hi)
        return (psi + hstep / 6 * (k1p + 2 * k2p + 2 * k3p + k4p),
                f + hstep / 6 * (k1f + 2 * k2f + 2 * k3f + k4f))

    for i in range(i0, n - 1):
        psi_row[i + 1], f_row[i + 1] = row_step(
            psi_row[i], f_row[i], bmat[i], bmid[i], bmat[i + 1],
            e_u0[i], eu_mid[i], e_u0[i + 1], dxi)
    for i in range(i0, 0, -1):
        psi_row[i - 1], f_row[i - 1] = row_step(
            psi_row[i], f_row[i], bmat[i], bmid[i - 1], bmat[i - 1],
            e_u0[i], eu_mid[i - 1], e_u0[i - 1], -dxi)

    n_levels = len(history)
    if n_levels % 2 == 0:
        n_levels -= 1  # need an odd count so steps pair up
    coarse = range(0, n_levels, 2)
    etas = history.etas[list(coarse)]
    F = np.empty((len(etas), n, 3))
    Psi = np.empty((len(etas), n, 3, 3))
    U = history.u[list(coarse)]
    F[0], Psi[0] = f_row, psi_row

    psi = psi_row.copy()
    f = f_row.copy()
    max_drift = _orthogonality_defect(psi)
    for out_idx, lev in enumerate(range(0, n_levels - 2, 2)):
        h2 = float(history.etas[lev + 2] - history.etas[lev])
        s0, s1, s2 = (history.state(lev), history.state(lev + 1),
                      history.state(lev + 2))
        a0 = _eta_generator(s0.v, s0.k, s0.l)
        a1 = _eta_generator(s1.v, s1.k, s1.l)
        a2 = _eta_generator(s2.v, s2.k, s2.l)
        eu0, eu1, eu2 = np.exp(s0.u), np.exp(s1.u), np.exp(s2.u)

        def tangent(p, eu):
            return eu[:, None] * (p[..., 0] + p[..., 1])

        k1p = psi @ a0
        k1f = tangent(psi, eu0)
        p2 = psi + 0.5 * h2 * k1p
        k2p = p2 @ a1
        k2f = tangent(p2, eu1)
        p3 = psi + 0.5 * h2 * k2p
        k3p = p3 @ a1
        k3f = tangent(p3, eu1)
        p4 = psi + h2 * k3p
        k4p = p4 @ a2
        k4f = tangent(p4, eu2)
        psi = psi + h2 / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        f = f + h2 / 6 * (k1f + 2 * k2f + 2 * k3f + k4f)

        step_no = out_idx + 1
        if step_no % reorth_every == 0 or step_no == len(etas) - 1:
            drift = _orthogonality_defect(psi)
            max_drift = max(max_drift, drift)
            if drift > drift_limit:
                raise FrameDrift(f"frame orthogonality defect {drift:.3e} at eta = {etas[step_no]:.4f}")
            psi = _polar_project(psi)
        F[step_no] = f
        Psi[step_no] = psi

    return ReconstructedPatch(xi=xi, etas=etas, F=F, Psi=Psi, u=U,
                              r=history.r, max_frame_drift=max_drift)


def path_independence_defect(patch: ReconstructedPatch,
                             i_lo: int, i_hi: int, lev_lo: int, lev_hi: int) -> float:
    """Two-path position integral around a grid rectangle (closedness check).

    Integrates F_xi = e^u (Psi1 - Psi2) and F_eta = e^u (Psi1 + Psi2) with
    composite Simpson along the rectangle's sides; returns the norm of the
    mismatch between the two corner-to-corner paths.
    """
    if (i_hi - i_lo) % 2 or (lev_hi - lev_lo) % 2:
        raise ValueError("rectangle sides must span an even number of intervals")
    dxi = float(patch.xi[1] - patch.xi[0])
    deta = float(patch.etas[1] - patch.etas[0])

    def fxi(lev, sl):
        eu = np.exp(patch.u[lev, sl])
        p = patch.Psi[lev, sl]
        return eu[:, None] * (p[..., 0] - p[..., 1])

    def feta(sl_lev, i):
        eu = np.exp(patch.u[sl_lev, i])
        p = patch.Psi[sl_lev, i]
        return eu[:, None] * (p[..., 0] + p[..., 1])

    def simpson(vals, step):
        wts = np.ones(vals.shape[0])
        wts[1:-1:2] = 4.0
        wts[2:-1:2] = 2.0
        return step / 3.0 * np.einsum("i,i...->...", wts, vals)

    sl = slice(i_lo, i_hi + 1)
    levs = slice(lev_lo, lev_hi + 1)
    path_a = simpson(fxi(lev_lo, sl), dxi) + simpson(feta(levs, i_hi), deta)
    path_b = simpson(feta(levs, i_lo), deta) + simpson(fxi(lev_hi, sl), dxi)
    return float(np.linalg.norm(path_a - path_b))
