"""Grow the maximal discrete isothermic surface from an initial strip.

Each missing quad corner is the unique conformal-square completion of the
three corners already present.  Sweeps run row by row in both eta
directions; within a row all completions depend only on earlier rows, so
they are evaluated as one vectorized batch.  A collinear triple or an
ill-conditioned completion stops the sweep in that direction (a normal
outcome, reported rather than raised).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TOL_COLLINEAR
from .lattice import DiscreteSurface, DomainSpec, LatticeIndex

COND_LIMIT = 1e8


@dataclass
class Degeneracy:
    center: LatticeIndex
    reason: str


@dataclass
class GrowthResult:
    surface: DiscreteSurface
    achieved_h_up: float
    achieved_h_down: float
    degeneracies: list = field(default_factory=list)

    @property
    def achieved_h(self) -> float:
        return min(self.achieved_h_up, self.achieved_h_down)


def _complete_rows(pa, pb, pd, cond_limit):
    """Vectorized conformal-square completion: solve q(pa, pb, X, pd) = -1.

    Returns (points, ok_mask, condition_numbers); rows failing the
    collinearity or conditioning tests have ok=False.
    """
    u = pb - pa
    v = pd - pa
    cross = np.cross(u, v)
    nu = np.linalg.norm(u, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    nw = np.linalg.norm(pb - pd, axis=-1)
    diam = np.maximum(np.maximum(nu, nv), nw)
    area = 0.5 * np.linalg.norm(cross, axis=-1)
    ok = (diam > 0) & (area > TOL_COLLINEAR * diam * diam)

    e1 = u / np.where(nu > 0, nu, 1.0)[..., None]
    normal = cross / np.where(2 * area > 0, 2 * area, 1.0)[..., None]
    e2 = np.cross(normal, e1)

    zb = nu.astype(complex)
    zd = np.einsum("...i,...i->...", v, e1) + 1j * np.einsum("...i,...i->...", v, e2)
    den = zb + zd
    cond = (np.abs(zb) + np.abs(zd)) / np.maximum(np.abs(den), 1e-300)
    ok = ok & (cond <= cond_limit)
    den = np.where(den == 0, 1.0, den)
    zc = 2.0 * zb * zd / den
    pts = pa + zc.real[..., None] * e1 + zc.imag[..., None] * e2
    return pts, ok, cond


def grow(strip: DiscreteSurface, target_h: float,
         cond_limit: float = COND_LIMIT) -> GrowthResult:
    """Extend a surface to Omega(r, target_h) by conformal-square completion.

    Returns the grown surface together with the eta-height reached in each
    sweep direction; growth in a direction stops early at the first
    degenerate completion, which is recorded in ``degeneracies``.
    """
    src = strip.spec
    if target_h > src.r:
        raise ValueError("target_h must not exceed r")
    spec = DomainSpec(r=src.r, h=max(target_h, src.eps / 2), eps=src.eps)
    surface = DiscreteSurface.empty(spec)
    # identical bounding boxes: m_max depends only on (r, eps)
    surface.positions.data[...] = strip.positions.data
    surface.positions.mask[...] = strip.positions.mask

    pos = surface.positions
    M = spec.m_max
    off = pos.offset
    degeneracies: list[Degeneracy] = []

    def batch(row_targets, pred_offsets, kernel_order):
        """Complete one row; returns False when the sweep must stop."""
        tgt, pa, pb, pd, centers = [], [], [], [], []
        for (m, n) in row_targets:
            c = (m + pred_offsets[0][0], n + pred_offsets[0][1])
            preds = [(m + dm, n + dn) for dm, dn in pred_offsets[1:]]
            if all(pos.has(p) for p in preds):
                pts = [pos.get(p) for p in preds]
                tgt.append((m, n))
                pa.append(pts[kernel_order[0]])
                pb.append(pts[kernel_order[1]])
                pd.append(pts[kernel_order[2]])
                centers.append(c)
        if not tgt:
            return False
        pts, ok, _ = _complete_rows(np.array(pa), np.array(pb), np.array(pd), cond_limit)
        if not np.all(ok):
            bad = int(np.argmin(ok))
            degeneracies.append(Degeneracy(center=centers[bad],
                                           reason="collinear or ill-conditioned completion"))
            return False
        for (m, n), p in zip(tgt, pts):
            i, j = m + off, n + off
            pos.data[i, j] = p
            pos.mask[i, j] = True
        return True

    def row_vertices(t):
        lo = max(-M, 2 * t - M)
        hi = min(M, 2 * t + M)
        start = lo if lo % 2 == 0 else lo + 1
        return [(m, 2 * t - m) for m in range(start, hi + 1, 2)
                if spec.contains((m, 2 * t - m))]

    # upward: new vertex is p3 = T_eta(center); known (p1, p2, p4)
    t_top = spec.s_max // 2
    achieved_up = 1
    for t in range(2, t_top + 1):
        if not batch(row_vertices(t),
                     [(-1, -1), (-2, -2), (0, -2), (-2, 0)],  # center, p1, p2, p4
                     kernel_order=(0, 1, 2)):
            break
        achieved_up = t

    # downward: new vertex is p1 = T_eta^-1(center); known (p2, p3, p4)
    # q(p3, p4, p1, p2) = -1, so the kernel sees (pa, pb, pd) = (p3, p4, p2)
    t_bot = math.ceil(spec.s_min / 2)
    achieved_down = 0
    for t in range(-1, t_bot - 1, -1):
        if not batch(row_vertices(t),
                     [(1, 1), (2, 0), (2, 2), (0, 2)],  # center, p2, p3, p4
                     kernel_order=(1, 2, 0)):
            break
        achieved_down = t

    return GrowthResult(surface=surface,
                        achieved_h_up=achieved_up * spec.eps / 2.0,
                        achieved_h_down=-achieved_down * spec.eps / 2.0,
                        degeneracies=degeneracies)


def degeneracy_scan(surface: DiscreteSurface) -> list[tuple[LatticeIndex, str]]:
    """Collinear vertex triples around quad centers, as (center, which) pairs.

    Checks the lower triple (T_xi^-1, T_eta^-1, T_xi) and the upper triple
    (T_xi^-1, T_eta, T_xi) wherever all three vertices exist.
    """
    pos = surface.positions
    M = surface.spec.m_max
    out = []
    for n in range(-M, M + 1):
        if n % 2 == 0:
            continue
        for m in range(-M, M + 1):
            if m % 2 == 0:
                continue
            p4 = (m - 1, n + 1)
            p2 = (m + 1, n - 1)
            if not (pos.has(p4) and pos.has(p2)):
                continue
            for name, mid in (("lower", (m - 1, n - 1)), ("upper", (m + 1, n + 1))):
                if not pos.has(mid):
                    continue
                u = pos.get(p2) - pos.get(p4)
                v = pos.get(mid) - pos.get(p4)
                diam = max(np.linalg.norm(u), np.linalg.norm(v),
                           np.linalg.norm(pos.get(mid) - pos.get(p2)))
                area = 0.5 * np.linalg.norm(np.cross(u, v))
                if diam == 0 or area <= TOL_COLLINEAR * diam * diam:
                    out.append(((m, n), name))
    return out
