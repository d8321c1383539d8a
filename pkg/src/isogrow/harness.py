"""Convergence experiments: grow at several mesh widths, measure sup-norm
errors against a smooth reference, and fit the order.

For each eps the three error channels are

    e_F  = sup |F_eps - F|          over vertices,
    e_Fx = sup |delta_x F_eps - F_x| over x-edge midpoints,
    e_Fy = sup |delta_y F_eps - F_y| over y-edge midpoints,

with the smooth reference evaluated exactly at the lattice coordinates
(no interpolation) and the sup restricted to the eta-range reached by
every mesh in the study (h_common).  Orders are least-squares slopes of
log e against log eps.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bjorling import BjorlingData, derive_cauchy_data, sample_initial_strip
from .errors import EmptyOverlap
from .growth import grow
from .lattice import DiscreteSurface
from .quantities import _shift, _shift_mask
from .smooth import SmoothSurface


@dataclass
class ConvergenceReport:
    eps_list: list
    e_F: list
    e_Fx: list
    e_Fy: list
    achieved_h: list
    h_common: float
    fitted_order_F: float
    fitted_order_Fx: float
    fitted_order_Fy: float


def surface_errors(surface: DiscreteSurface, reference: SmoothSurface,
                   h_limit: float) -> tuple[float, float, float]:
    """Sup-norm errors of positions and both difference quotients.

    Restricted to slots with |eta| <= h_limit (so different meshes are
    compared over one common band).
    """
    eps = surface.spec.eps
    P = surface.positions.data
    mask = surface.positions.mask
    s = P.shape[0]
    off = surface.positions.offset
    idx = np.arange(s) - off
    X = idx[:, None] * eps / 2.0 + np.zeros((1, s))
    Y = np.zeros((s, 1)) + idx[None, :] * eps / 2.0
    eta = 0.5 * (X + Y)
    band = np.abs(eta) <= h_limit + 1e-12

    sel = mask & band
    if not np.any(sel):
        raise EmptyOverlap("no vertices in the comparison band")
    e_f = float(np.max(np.linalg.norm(P[sel] - reference.F(X[sel], Y[sel]), axis=-1)))

    m_odd = (idx[:, None] % 2 != 0) & np.ones((1, s), dtype=bool)
    n_odd = np.ones((s, 1), dtype=bool) & (idx[None, :] % 2 != 0)

    dxF = (_shift(P, 1, 0, np.nan) - _shift(P, -1, 0, np.nan)) / eps
    hx = _shift_mask(mask, 1, 0) & _shift_mask(mask, -1, 0) & m_odd & ~n_odd & band
    e_fx = float(np.max(np.linalg.norm(dxF[hx] - reference.Fx(X[hx], Y[hx]), axis=-1))) \
        if np.any(hx) else math.nan

    dyF = (_shift(P, 0, 1, np.nan) - _shift(P, 0, -1, np.nan)) / eps
    hy = _shift_mask(mask, 0, 1) & _shift_mask(mask, 0, -1) & ~m_odd & n_odd & band
    e_fy = float(np.max(np.linalg.norm(dyF[hy] - reference.Fy(X[hy], Y[hy]), axis=-1))) \
        if np.any(hy) else math.nan

    return e_f, e_fx, e_fy


def _fit_order(eps_list, errors):
    # errors at round-off scale carry no order information
    if len(eps_list) < 2 or any(not np.isfinite(e) or e <= 1e-12 for e in errors):
        return math.nan
    return float(np.polyfit(np.log(eps_list), np.log(errors), 1)[0])


def run_convergence(data: BjorlingData, reference: SmoothSurface,
                    eps_list, target_h: float) -> ConvergenceReport:
    """Grow at each eps, compare against the reference on the common band."""
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    cd = derive_cauchy_data(data)

    def one(eps):
        strip = sample_initial_strip(cd, data, eps)
        return grow(strip, target_h)

    threads = int(os.environ.get("ISOGROW_THREADS", "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, eps_list))
    else:
        results = [one(eps) for eps in eps_list]

    achieved = [min(res.achieved_h_up, res.achieved_h_down) for res in results]
    h_common = min(achieved)
    if h_common <= max(eps_list) / 2:
        raise EmptyOverlap(f"common height {h_common:.4f} leaves no usable band")

    e_F, e_Fx, e_Fy = [], [], []
    for res in results:
        ef, efx, efy = surface_errors(res.surface, reference, h_common)
        e_F.append(ef)
        e_Fx.append(efx)
        e_Fy.append(efy)

    return ConvergenceReport(
        eps_list=list(eps_list), e_F=e_F, e_Fx=e_Fx, e_Fy=e_Fy,
        achieved_h=achieved, h_common=h_common,
        fitted_order_F=_fit_order(eps_list, e_F),
        fitted_order_Fx=_fit_order(eps_list, e_Fx),
        fitted_order_Fy=_fit_order(eps_list, e_Fy),
    )


def emit_report(report: ConvergenceReport, path_base: str) -> list:
    """Write <base>.csv and <base>.txt deterministically; returns the paths."""
    csv_path = f"{path_base}.csv"
    txt_path = f"{path_base}.txt"
    lines = ["eps,e_F,e_Fx,e_Fy,achieved_h"]
    for i, eps in enumerate(report.eps_list):
        lines.append(f"{eps:.17g},{report.e_F[i]:.17g},{report.e_Fx[i]:.17g},"
                     f"{report.e_Fy[i]:.17g},{report.achieved_h[i]:.17g}")
    with open(csv_path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    txt = ["convergence study",
           f"meshes: {len(report.eps_list)}",
           f"common height: {report.h_common:.12g}",
           f"order e_F : {report.fitted_order_F:.6g}",
           f"order e_Fx: {report.fitted_order_Fx:.6g}",
           f"order e_Fy: {report.fitted_order_Fy:.6g}"]
    with open(txt_path, "w", newline="") as fh:
        fh.write("\n".join(txt) + "\n")
    return [csv_path, txt_path]
