"""Deterministic OBJ quad-mesh export for discrete surfaces.

Vertices are written in (n, m) row-major order, faces as ``f`` records
over each complete elementary quad in cyclic corner order.  All floats
use %.17g with '.' decimals and LF line endings, so identical surfaces
produce byte-identical files.
"""

from __future__ import annotations

from .lattice import DiscreteSurface, elementary_square


def write_obj(surface: DiscreteSurface, path: str) -> dict:
    """Write the surface as an OBJ quad mesh; returns {vertices, faces} counts."""
    order = surface.positions.indices()
    number = {idx: i + 1 for i, idx in enumerate(order)}  # OBJ indices are 1-based
    lines = []
    for idx in order:
        x, y, z = surface.positions.get(idx)
        lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
    n_faces = 0
    for center in surface.complete_quad_centers():
        corners = elementary_square(center)
        lines.append("f " + " ".join(str(number[c]) for c in corners))
        n_faces += 1
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return {"vertices": len(order), "faces": n_faces}


def write_point_grid_obj(points, mask, path: str) -> dict:
    """Point-cloud OBJ for sampled smooth patches (rows x cols x 3)."""
    lines = []
    count = 0
    for i in range(points.shape[0]):
        for j in range(points.shape[1]):
            if mask is not None and not mask[i, j]:
                continue
            x, y, z = points[i, j]
            lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
            count += 1
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return {"vertices": count, "faces": 0}
