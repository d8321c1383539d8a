"""Euclidean plane charts, cross-ratios and conformal-square completion.

A *conformal square* is a cyclically ordered, concyclic quadruple
(p1, p2, p3, p4) whose opposite edge-length products agree,

    |p1-p2| |p3-p4| = |p1-p4| |p2-p3|,

equivalently whose complex cross-ratio in the common plane equals -1.
Everything here works on raw ``numpy`` 3-vectors.

Orientation convention: cross-ratios are reported in the chart of
``plane_chart(p1, p2, p3)``; the value -1 is conjugation-invariant, so
completion does not depend on this choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, CollinearInput, OffPlane

TOL_COLLINEAR = 1e-10   # triangle area relative to squared diameter
TOL_PLANE = 1e-9        # point-to-plane distance relative to diameter

Point3 = np.ndarray


def point(x, y, z) -> Point3:
    return np.array([x, y, z], dtype=float)


def _norm(v):
    return float(np.linalg.norm(v))


@dataclass(frozen=True)
class PlaneChart:
    """Orthonormal in-plane frame identifying an affine plane with C."""

    origin: Point3
    e1: Point3
    e2: Point3
    normal: Point3
    scale: float

    def to_complex(self, p: Point3) -> complex:
        d = p - self.origin
        off = abs(float(d @ self.normal))
        limit = TOL_PLANE * max(self.scale, _norm(d))
        if off > limit:
            raise OffPlane(f"point is {off:.3e} from the chart plane (limit {limit:.3e})")
        return complex(d @ self.e1, d @ self.e2)

    def from_complex(self, z: complex) -> Point3:
        return self.origin + z.real * self.e1 + z.imag * self.e2


def plane_chart(p: Point3, q: Point3, r: Point3) -> PlaneChart:
    """Chart of the plane through three points; e1 points from p toward q.

    Raises CollinearInput when the triangle area falls below
    TOL_COLLINEAR times the squared diameter of the triple.
    """
    u = q - p
    v = r - p
    cross = np.cross(u, v)
    diam = max(_norm(u), _norm(v), _norm(q - r))
    area = 0.5 * _norm(cross)
    if diam == 0.0 or area <= TOL_COLLINEAR * diam * diam:
        raise CollinearInput("triple does not span a plane")
    normal = cross / _norm(cross)
    e1 = u / _norm(u)
    e2 = np.cross(normal, e1)
    return PlaneChart(origin=p.copy(), e1=e1, e2=e2, normal=normal, scale=diam)


def cross_ratio(p1: Point3, p2: Point3, p3: Point3, p4: Point3) -> complex:
    """Complex cross-ratio (p1-p2)(p2-p3)^-1 (p3-p4)(p4-p1)^-1 of coplanar points."""
    pts = (p1, p2, p3, p4)
    diam = max(_norm(a - b) for a in pts for b in pts)
    for a, b in ((p1, p2), (p2, p3), (p3, p4), (p4, p1)):
        if _norm(a - b) <= 1e-14 * max(diam, 1.0):
            raise CoincidentPoints("consecutive points coincide")
    chart = plane_chart(p1, p2, p3)
    z = [chart.to_complex(p) for p in pts]
    return (z[0] - z[1]) / (z[1] - z[2]) * (z[2] - z[3]) / (z[3] - z[0])


def solve_cross_ratio_vertex(known: tuple[Point3, Point3, Point3], missing_slot: int,
                             target: complex) -> Point3:
    """Fourth vertex of a quadruple with prescribed cross-ratio.

    ``known`` holds the three remaining vertices in slot order (slots are
    cyclic positions 1..4), ``missing_slot`` says which one to solve for.
    The cross-ratio equation is linear in each vertex once the plane of the
    known triple is identified with C, so the solution is unique whenever
    the denominator does not vanish.
    """
    if missing_slot not in (1, 2, 3, 4):
        raise ValueError("missing_slot must be in 1..4")
    chart = plane_chart(*known)
    za, zb, zc = (chart.to_complex(p) for p in known)
    q = complex(target)
    # Write the quadruple as (z1, z2, z3, z4) with the unknown inserted.
    if missing_slot == 3:
        z1, z2, z4 = za, zb, zc
        den = (z1 - z2) + q * (z4 - z1)
        _check_moebius_den(den, chart.scale)
        z = ((z1 - z2) * z4 + q * (z4 - z1) * z2) / den
    elif missing_slot == 4:
        z1, z2, z3 = za, zb, zc
        den = (z1 - z2) + q * (z2 - z3)
        _check_moebius_den(den, chart.scale)
        z = ((z1 - z2) * z3 + q * (z2 - z3) * z1) / den
    elif missing_slot == 1:
        z2, z3, z4 = za, zb, zc
        # cross-ratio is invariant under the double cyclic shift (3,4,1,2)
        den = (z3 - z4) + q * (z2 - z3)
        _check_moebius_den(den, chart.scale)
        z = ((z3 - z4) * z2 + q * (z2 - z3) * z4) / den
    else:
        z1, z3, z4 = za, zb, zc
        den = (z3 - z4) + q * (z4 - z1)
        _check_moebius_den(den, chart.scale)
        z = ((z3 - z4) * z1 + q * (z4 - z1) * z3) / den
    return chart.from_complex(z)


def _check_moebius_den(den: complex, scale: float):
    if abs(den) <= 1e-13 * max(scale, 1.0):
        raise CollinearInput("cross-ratio solve is singular for this configuration")


def complete_conformal_square(known: tuple[Point3, Point3, Point3],
                              missing_slot: int = 3) -> Point3:
    """The unique fourth point making the quadruple a conformal square.

    ``known`` lists the three given vertices in slot order with
    ``missing_slot`` skipped, e.g. (p1, p2, p4) for missing_slot=3.
    """
    return solve_cross_ratio_vertex(tuple(known), missing_slot, -1.0)


@dataclass(frozen=True)
class QuadCheckReport:
    concyclicity_residual: float
    cr_residual: float
    planarity_residual: float
    is_conformal_square: bool


def check_quad(p1: Point3, p2: Point3, p3: Point3, p4: Point3,
               tol: float = 1e-10) -> QuadCheckReport:
    """Residual diagnostics of the conformal-square property.

    Degenerate inputs yield large residuals instead of exceptions.
    Concyclicity is |dist(center, p4) - radius| / radius for the
    circumcircle of (p1, p2, p3); planarity and the edge-product defect
    are scale-relative.
    """
    pts = (p1, p2, p3, p4)
    diam = max(_norm(a - b) for a in pts for b in pts)
    if diam == 0.0:
        return QuadCheckReport(np.inf, np.inf, np.inf, False)
    try:
        chart = plane_chart(p1, p2, p3)
    except CollinearInput:
        return QuadCheckReport(np.inf, np.inf, np.inf, False)

    planarity = abs(float((p4 - chart.origin) @ chart.normal)) / diam

    z2 = complex((p2 - p1) @ chart.e1, (p2 - p1) @ chart.e2)
    z3 = complex((p3 - p1) @ chart.e1, (p3 - p1) @ chart.e2)
    # circumcenter of 0, z2, z3 from |c|^2 = |c-z2|^2 = |c-z3|^2
    a = np.array([[z2.real, z2.imag], [z3.real, z3.imag]], dtype=float)
    rhs = 0.5 * np.array([abs(z2) ** 2, abs(z3) ** 2])
    det = np.linalg.det(a)
    if abs(det) <= 1e-14 * max(diam, 1.0) ** 2:
        return QuadCheckReport(np.inf, np.inf, planarity, False)
    cx, cy = np.linalg.solve(a, rhs)
    center = chart.from_complex(complex(cx, cy))
    radius = _norm(center - p1)
    concyclicity = abs(_norm(p4 - center) - radius) / radius

    lhs = _norm(p1 - p2) * _norm(p3 - p4)
    rhs_len = _norm(p1 - p4) * _norm(p2 - p3)
    cr_res = abs(lhs - rhs_len) / max(lhs, rhs_len) if max(lhs, rhs_len) > 0 else np.inf

    ok = planarity < tol and concyclicity < tol and cr_res < tol
    return QuadCheckReport(concyclicity_residual=float(concyclicity),
                           cr_residual=float(cr_res),
                           planarity_residual=float(planarity),
                           is_conformal_square=bool(ok))
