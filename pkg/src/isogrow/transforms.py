"""Christoffel (dual) and Darboux transformations, discrete and smooth.

Christoffel inverts the metric edge-wise,

    delta_x F* = delta_x F / |delta_x F|^2,  delta_y F* = -delta_y F / |delta_y F|^2,

a closed one-form on discrete isothermic surfaces, integrated here over a
breadth-first spanning tree (closedness makes the tree immaterial up to
round-off, which the per-quad loop defect verifies).

Darboux prescribes cross-ratios per edge family: with gamma = C/eps^2,

    q(T_x^-1 F, T_x F, T_x F+, T_x^-1 F+) =  1/gamma   on x-edges,
    q(T_y^-1 F, T_y F, T_y F+, T_y^-1 F+) = -1/gamma   on y-edges,

each new vertex of F+ being the planar cross-ratio solve from one edge
relation; relations between already-placed vertices become consistency
checks.  The smooth counterparts integrate the corresponding ODE systems
along grid lines with sub-stepped RK4 / Gauss quadrature.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import CollapsedPair, DegenerateEdge, DegeneratePlane, CollinearInput
from .geometry import cross_ratio, solve_cross_ratio_vertex
from .lattice import DiscreteSurface, LatticeIndex
from .smooth import SmoothSurface

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


def _vertex_graph_neighbors(m, n):
    # (neighbor vertex, connecting edge midpoint, axis, orientation sign)
    return (((m + 2, n), (m + 1, n), "x", +1),
            ((m - 2, n), (m - 1, n), "x", -1),
            ((m, n + 2), (m, n + 1), "y", +1),
            ((m, n - 2), (m, n - 1), "y", -1))


def christoffel_discrete(surface: DiscreteSurface,
                         base: LatticeIndex | None = None) -> DiscreteSurface:
    """Dual surface by integrating the inverted edge one-form from ``base``.

    The dual is anchored at the origin: F*(base) = 0.
    """
    pos = surface.positions
    eps = surface.spec.eps
    if base is None:
        base = (0, 0) if pos.has((0, 0)) else pos.indices()[0]
    if not pos.has(base):
        raise ValueError(f"base vertex {base} missing from surface")

    dual = DiscreteSurface.empty(surface.spec)
    dual.positions.set(base, np.zeros(3))
    queue = deque([base])
    seen = {base}
    while queue:
        m, n = queue.popleft()
        here = dual.positions.get((m, n))
        for nbr, _, axis, sign in _vertex_graph_neighbors(m, n):
            if nbr in seen or not pos.has(nbr):
                continue
            step = sign * (pos.get(nbr) - pos.get((m, n)))  # eps * delta F on this edge
            sq = float(step @ step)
            if sq == 0.0:
                raise DegenerateEdge(f"zero edge at {(m, n)} -> {nbr}")
            factor = 1.0 if axis == "x" else -1.0
            dual.positions.set(nbr, here + sign * factor * eps * eps * step / sq)
            seen.add(nbr)
            queue.append(nbr)
    return dual


def christoffel_closedness(surface: DiscreteSurface) -> float:
    """Largest relative per-quad loop defect of the dual one-form."""
    worst = 0.0
    for c in surface.complete_quad_centers():
        p1, p2, p3, p4 = surface.corner_points(c)
        legs = []
        for a, bpt, factor in ((p1, p2, 1.0), (p2, p3, -1.0), (p4, p3, 1.0), (p1, p4, -1.0)):
            step = bpt - a
            legs.append(factor * step / float(step @ step))
        loop = legs[0] + legs[1] - legs[2] - legs[3]
        scale = max(float(np.linalg.norm(g)) for g in legs)
        worst = max(worst, float(np.linalg.norm(loop)) / scale)
    return worst


def christoffel_smooth(surface: SmoothSurface, xs, ys, i0: int, j0: int,
                       order: str = "xy") -> np.ndarray:
    """Dual samples on the grid xs x ys, anchored to 0 at (i0, j0).

    The one-form (e^{-2u} F_x, -e^{-2u} F_y) is integrated along grid
    lines with 5-point Gauss quadrature per interval; ``order`` picks
    row-first or column-first paths (their agreement is the closedness
    check).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)

    def gx(x, y):
        return surface.Fx(x, y) * np.exp(-2 * surface.u(x, y))[..., None]

    def gy(x, y):
        return -surface.Fy(x, y) * np.exp(-2 * surface.u(x, y))[..., None]

    def segment(fun, a, b, fixed, along_x):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        pts = mid + half * _GL_NODES
        if along_x:
            vals = fun(pts, np.full_like(pts, fixed))
        else:
            vals = fun(np.full_like(pts, fixed), pts)
        return half * np.einsum("i,i...->...", _GL_WEIGHTS, vals)

    out = np.zeros((xs.size, ys.size, 3))

    def fill_along_x(j):
        y = ys[j]
        for i in range(i0, xs.size - 1):
            out[i + 1, j] = out[i, j] + segment(gx, xs[i], xs[i + 1], y, True)
        for i in range(i0, 0, -1):
            out[i - 1, j] = out[i, j] - segment(gx, xs[i - 1], xs[i], y, True)

    def fill_along_y(i):
        x = xs[i]
        for j in range(j0, ys.size - 1):
            out[i, j + 1] = out[i, j] + segment(gy, ys[j], ys[j + 1], x, False)
        for j in range(j0, 0, -1):
            out[i, j - 1] = out[i, j] - segment(gy, ys[j - 1], ys[j], x, False)

    if order == "xy":
        fill_along_x(j0)
        for i in range(xs.size):
            fill_along_y(i)
    elif order == "yx":
        fill_along_y(i0)
        for j in range(ys.size):
            for i in range(i0, xs.size - 1):
                out[i + 1, j] = out[i, j] + segment(gx, xs[i], xs[i + 1], ys[j], True)
            for i in range(i0, 0, -1):
                out[i - 1, j] = out[i, j] - segment(gx, xs[i - 1], xs[i], ys[j], True)
    else:
        raise ValueError("order must be 'xy' or 'yx'")
    return out


@dataclass
class DarbouxResult:
    surface: DiscreteSurface
    gamma: float
    consistency_defect: float = 0.0
    edge_count: int = 0


def darboux_discrete(surface: DiscreteSurface, seed: np.ndarray, C: float,
                     seed_vertex: LatticeIndex = (0, 0)) -> DarbouxResult:
    """Discrete Darboux transform with parameter gamma = C/eps^2.

    ``seed`` is the transformed position at ``seed_vertex``; propagation is
    breadth-first, each new vertex coming from exactly one edge relation.
    Relations between already-placed vertices are re-evaluated and their
    worst mismatch (relative to the mesh) is reported as
    ``consistency_defect``.
    """
    if C == 0:
        raise ValueError("Darboux parameter C must be nonzero")
    pos = surface.positions
    eps = surface.spec.eps
    gamma = C / eps**2
    targets = {"x": 1.0 / gamma, "y": -1.0 / gamma}
    seed = np.asarray(seed, dtype=float)
    if not pos.has(seed_vertex):
        raise ValueError(f"seed vertex {seed_vertex} missing from surface")
    if np.linalg.norm(seed - pos.get(seed_vertex)) == 0.0:
        raise CollapsedPair("seed coincides with the surface point")

    plus = DiscreteSurface.empty(surface.spec)
    plus.positions.set(seed_vertex, seed)
    queue = deque([seed_vertex])
    seen = {seed_vertex}
    defect = 0.0
    n_edges = 0

    def propagate(v, nbr, axis, sign):
        # quadruple (T^-1 F, T F, T F+, T^-1 F+) along the edge; positive
        # orientation means nbr is the T-side vertex
        f_v, f_n = pos.get(v), pos.get(nbr)
        q = targets[axis]
        try:
            if sign > 0:
                return solve_cross_ratio_vertex((f_v, f_n, plus.positions.get(v)), 3, q)
            return solve_cross_ratio_vertex((f_n, f_v, plus.positions.get(v)), 4, q)
        except CollinearInput as exc:
            raise DegeneratePlane(str(exc)) from exc

    while queue:
        v = queue.popleft()
        for nbr, _, axis, sign in _vertex_graph_neighbors(*v):
            if not pos.has(nbr):
                continue
            value = propagate(v, nbr, axis, sign)
            n_edges += 1
            if nbr in seen:
                defect = max(defect, float(np.linalg.norm(value - plus.positions.get(nbr))) / eps)
            else:
                plus.positions.set(nbr, value)
                seen.add(nbr)
                queue.append(nbr)

    return DarbouxResult(surface=plus, gamma=gamma, consistency_defect=defect,
                         edge_count=n_edges)


def darboux_cross_ratio_audit(surface: DiscreteSurface, plus: DiscreteSurface,
                              gamma: float) -> float:
    """Largest relative defect of the per-edge cross-ratio conditions."""
    pos, ppos = surface.positions, plus.positions
    worst = 0.0
    for (m, n) in pos.indices():
        for nbr, _, axis, sign in _vertex_graph_neighbors(m, n):
            if sign < 0 or not pos.has(nbr) or not ppos.has(nbr) or not ppos.has((m, n)):
                continue
            target = 1.0 / gamma if axis == "x" else -1.0 / gamma
            q = cross_ratio(pos.get((m, n)), pos.get(nbr), ppos.get(nbr), ppos.get((m, n)))
            worst = max(worst, abs(q - target) / abs(target))
    return worst


def _reflect(vec, direction):
    return vec - 2.0 * np.einsum("...i,...i->...", vec, direction)[..., None] * direction


def darboux_smooth(surface: SmoothSurface, seed: np.ndarray, C: float,
                   xs, ys, i0: int, j0: int, substeps: int = 8,
                   order: str = "xy", collapse_tol: float = 1e-9) -> np.ndarray:
    """Smooth Darboux transform sampled on the grid xs x ys.

    Integrates

        F+_x = -|d|^2/(C |F_x|^2) (F_x - 2 <F_x, d^> d^),
        F+_y = +|d|^2/(C |F_y|^2) (F_y - 2 <F_y, d^> d^),   d = F+ - F,

    by RK4 with ``substeps`` sub-intervals per grid cell, starting from
    F+(xs[i0], ys[j0]) = seed.  One grid line is integrated first; all
    parallel lines then advance together as one batch.
    """
    if C == 0:
        raise ValueError("Darboux parameter C must be nonzero")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    seed = np.asarray(seed, dtype=float)

    def rhs(x, y, fplus, axis):
        d = fplus - surface.F(x, y)
        dd = np.einsum("...i,...i->...", d, d)
        if np.any(dd < collapse_tol**2):
            raise CollapsedPair("transform touched the surface")
        dhat = d / np.sqrt(dd)[..., None]
        coeff = dd / (C * np.exp(2 * surface.u(x, y)))
        if axis == "x":
            return -coeff[..., None] * _reflect(surface.Fx(x, y), dhat)
        return coeff[..., None] * _reflect(surface.Fy(x, y), dhat)

    def advance(fplus, a, b, x_fixed, y_fixed, axis):
        """RK4 from coordinate a to b along ``axis``; fplus is (..., 3)."""
        h = (b - a) / substeps
        t = a
        for _ in range(substeps):
            def at(s, f):
                if axis == "x":
                    return rhs(s, y_fixed, f, axis)
                return rhs(x_fixed, s, f, axis)
            k1 = at(t, fplus)
            k2 = at(t + h / 2, fplus + h / 2 * k1)
            k3 = at(t + h / 2, fplus + h / 2 * k2)
            k4 = at(t + h, fplus + h * k3)
            fplus = fplus + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        return fplus

    out = np.zeros((xs.size, ys.size, 3))
    out[i0, j0] = seed

    if order == "xy":
        for i in range(i0, xs.size - 1):
            out[i + 1, j0] = advance(out[i, j0], xs[i], xs[i + 1], None, ys[j0], "x")
        for i in range(i0, 0, -1):
            out[i - 1, j0] = advance(out[i, j0], xs[i], xs[i - 1], None, ys[j0], "x")
        for j in range(j0, ys.size - 1):
            out[:, j + 1] = advance(out[:, j], ys[j], ys[j + 1], xs, None, "y")
        for j in range(j0, 0, -1):
            out[:, j - 1] = advance(out[:, j], ys[j], ys[j - 1], xs, None, "y")
    elif order == "yx":
        for j in range(j0, ys.size - 1):
            out[i0, j + 1] = advance(out[i0, j], ys[j], ys[j + 1], xs[i0], None, "y")
        for j in range(j0, 0, -1):
            out[i0, j - 1] = advance(out[i0, j], ys[j], ys[j - 1], xs[i0], None, "y")
        for i in range(i0, xs.size - 1):
            out[i + 1, :] = advance(out[i, :], xs[i], xs[i + 1], None, ys, "x")
        for i in range(i0, 0, -1):
            out[i - 1, :] = advance(out[i, :], xs[i], xs[i - 1], None, ys, "x")
    else:
        raise ValueError("order must be 'xy' or 'yx'")
    return out
