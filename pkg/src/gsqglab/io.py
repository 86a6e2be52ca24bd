"""Diagnostics CSV, curve snapshots, and SVG frame output."""

import os

from .curves import curve_to_json, curve_to_svg_path


def diagnostics_header(n_patches):
    cols = ["t", "Q", "W", "L", "u_inf", "min_pair_delta", "min_self_delta", "growth_ratio"]
    for lam in range(n_patches):
        cols.append(f"area_{lam}")
        cols.append(f"h2_{lam}")
    return ",".join(cols)


def diagnostics_row(rec):
    vals = [rec.t, rec.Q, rec.W, rec.L, rec.u_inf, rec.min_pair_delta, rec.min_self_delta, rec.growth_ratio]
    for a, h in zip(rec.areas, rec.h2):
        vals.append(a)
        vals.append(h)
    return ",".join(repr(float(v)) for v in vals)


def write_diagnostics_csv(records, n_patches, path):
    lines = [diagnostics_header(n_patches)]
    lines.extend(diagnostics_row(r) for r in records)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def frame_viewport(family, margin=1.5):
    """Fixed viewport: initial bounding box scaled by `margin`."""
    import numpy as np

    all_nodes = np.vstack([c.nodes for c in family.curves])
    lo = all_nodes.min(axis=0)
    hi = all_nodes.max(axis=0)
    center = (lo + hi) / 2.0
    half = (hi - lo) / 2.0 * margin
    half = np.maximum(half, 1e-9)
    return (center[0] - half[0], center[1] - half[1], 2 * half[0], 2 * half[1])


def write_svg_frame(family, viewport, path, stroke="black", width_px=640):
    x0, y0, w, h = viewport
    height_px = max(1, int(round(width_px * h / w)))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{height_px}" '
        f'viewBox="{x0:.6g} {y0:.6g} {w:.6g} {h:.6g}">',
        # flip the y axis so the plane's orientation is preserved on screen
        f'<g transform="translate(0 {2 * y0 + h:.6g}) scale(1 -1)">',
    ]
    stroke_w = w / width_px * 1.5
    for cur in family.curves:
        parts.append(
            f'<path d="{curve_to_svg_path(cur)}" fill="none" stroke="{stroke}" '
            f'stroke-width="{stroke_w:.6g}"/>'
        )
    parts.append("</g></svg>")
    with open(path, "w") as f:
        f.write("\n".join(parts) + "\n")


def write_snapshots(family, frame_index, t, out_dir):
    for lam, cur in enumerate(family.curves):
        name = f"snapshot_{frame_index:04d}_p{lam}.json"
        with open(os.path.join(out_dir, name), "w") as f:
            f.write(curve_to_json(cur) + "\n")
