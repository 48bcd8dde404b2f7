"""Finite-depth expansion of GIFS pieces, point clouds, distances and figures.

Maps are numeric here: a list of complex pairs (a, b) for z -> a z + b,
indexed by the 1-based labels used in the equations.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .gifsbuild import GifsSystem

__all__ = ["Piece", "PointCloud", "ifs_system", "expand_pieces", "piece_counts", "point_cloud",
           "hausdorff_distance", "convex_hull", "emit_svg", "emit_dot", "cloud_csv", "cloud_json",
           "PALETTE"]

PALETTE = (
    "#1f5fd6", "#f2c12e", "#d62f2f", "#21b3b3", "#3aa845", "#8e44ad", "#e67e22", "#7f8c8d",
    "#c0392b", "#2c3e50", "#16a085", "#d35400", "#9b59b6", "#27ae60", "#f39c12", "#34495e",
)
HULL_SAMPLE = 32


@dataclass(frozen=True)
class Piece:
    a: complex
    b: complex
    type: int  # 0-based attractor index
    depth: int

    def __call__(self, z):
        return self.a * z + self.b


@dataclass
class PointCloud:
    points: np.ndarray  # complex
    types: np.ndarray  # int, 0-based attractor index

    def __len__(self) -> int:
        return len(self.points)

    def diameter(self) -> float:
        if len(self.points) < 2:
            return 0.0
        from scipy.spatial.distance import pdist
        return float(pdist(np.column_stack([self.points.real, self.points.imag])).max())


def ifs_system(m: int) -> GifsSystem:
    """The IFS itself as a one-attractor system A = f_1(A) u ... u f_m(A)."""
    return GifsSystem(m, [[(i, 0) for i in range(1, m + 1)]], [frozenset()])


def _numeric(maps) -> list:
    out = []
    for f in maps:
        if hasattr(f, "a") and hasattr(f, "b"):
            out.append((complex(f.a.embed()), complex(f.b.embed())))
        else:
            a, b = f
            out.append((complex(a), complex(b)))
    return out


def expand_pieces(system: GifsSystem, maps, k: int = 0, depth: int = 1) -> list:
    """All depth-level pieces f_{i1}...f_{id}(B_t) of B_k, in lexicographic order."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if not 0 <= k < system.n:
        raise ValueError(f"attractor index {k} out of range")
    fm = _numeric(maps)
    level = [Piece(1 + 0j, 0j, k, 0)]
    for d in range(1, depth + 1):
        nxt = []
        for p in level:
            for i, t in system.equations[p.type]:
                a, b = fm[i - 1]
                nxt.append(Piece(p.a * a, p.a * b + p.b, t, d))
        level = nxt
    return level


def piece_counts(system: GifsSystem, k: int, depth: int) -> list:
    """Number of pieces of B_k at each depth 0..depth, without expanding maps."""
    vec = np.zeros(system.n, dtype=object)
    vec[k] = 1
    counts = [1]
    for _ in range(depth):
        nxt = np.zeros(system.n, dtype=object)
        for s in range(system.n):
            if vec[s]:
                for _, t in system.equations[s]:
                    nxt[t] += vec[s]
        vec = nxt
        counts.append(int(sum(vec)))
    return counts


def _vector_expand(system: GifsSystem, fm, k: int, depth: int):
    # arrays of (a, b, type) per level; much faster than Piece objects
    A = np.array([1 + 0j])
    B = np.array([0j])
    T = np.array([k])
    terms = [[(i, t) for i, t in eq] for eq in system.equations]
    for _ in range(depth):
        na, nb, nt = [], [], []
        for s in range(system.n):
            sel = T == s
            if not sel.any() or not terms[s]:
                continue
            a_s, b_s = A[sel], B[sel]
            for i, t in terms[s]:
                a, b = fm[i - 1]
                na.append(a_s * a)
                nb.append(a_s * b + b_s)
                nt.append(np.full(len(a_s), t))
        if not na:
            return np.array([], complex), np.array([], complex), np.array([], int)
        A, B, T = np.concatenate(na), np.concatenate(nb), np.concatenate(nt)
    return A, B, T


def point_cloud(system: GifsSystem, maps, k: int = 0, depth: int = 6,
                seeds: Sequence[complex] | None = None) -> PointCloud:
    """Images of the seeds under every depth-level piece of B_k.

    The default seed is the fixed point b/(1-a) of the first map, which lies in A.
    """
    fm = _numeric(maps)
    if seeds is None:
        a, b = fm[0]
        seeds = [b / (1 - a)]
    seeds = np.asarray(list(seeds), dtype=complex)
    if seeds.size == 0:
        raise ValueError("at least one seed is needed")
    A, B, T = _vector_expand(system, fm, k, depth)
    pts = (A[:, None] * seeds[None, :] + B[:, None]).ravel()
    types = np.repeat(T, len(seeds))
    return PointCloud(pts, types)


def _directed(P: np.ndarray, Q: np.ndarray) -> float:
    """max over p in P of min over q in Q of |p - q|, exactly as brute force would."""
    tree = cKDTree(np.column_stack([Q.real, Q.imag]))
    xy = np.column_stack([P.real, P.imag])
    d, _ = tree.query(xy)
    # re-evaluate the candidates near the tree's answer with np.abs so the
    # value is bit-identical to the O(n^2) computation
    worst = 0.0
    order = np.argsort(-d)
    for idx in order:
        if d[idx] * (1 + 1e-9) + 1e-300 < worst:
            break
        cand = tree.query_ball_point(xy[idx], d[idx] * (1 + 1e-9) + 1e-300)
        val = float(np.min(np.abs(P[idx] - Q[cand]))) if cand else float(d[idx])
        worst = max(worst, val)
    return worst


def hausdorff_distance(P, Q) -> float:
    """Hausdorff distance between two finite point sets (complex arrays or clouds)."""
    P = np.asarray(P.points if isinstance(P, PointCloud) else P, dtype=complex).ravel()
    Q = np.asarray(Q.points if isinstance(Q, PointCloud) else Q, dtype=complex).ravel()
    if P.size == 0 or Q.size == 0:
        raise ValueError("point sets must be nonempty")
    return max(_directed(P, Q), _directed(Q, P))


def convex_hull(points) -> list:
    """Monotone-chain hull of complex points, counterclockwise, no repeats."""
    pts = sorted({(round(z.real, 12), round(z.imag, 12)) for z in np.asarray(points, complex)})
    if len(pts) <= 2:
        return [complex(x, y) for x, y in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return [complex(x, y) for x, y in lower[:-1] + upper[:-1]]


def _type_hulls(system: GifsSystem, maps, sample_depth: int) -> dict:
    hulls = {}
    for t in range(system.n):
        cloud = point_cloud(system, maps, t, sample_depth)
        if len(cloud) == 0:
            hulls[t] = []
            continue
        idx = np.linspace(0, len(cloud) - 1, min(HULL_SAMPLE, len(cloud))).round().astype(int)
        hulls[t] = convex_hull(cloud.points[idx])
    return hulls


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def emit_svg(pieces: Sequence[Piece] | PointCloud, path=None, system: GifsSystem | None = None,
             maps=None, palette: Sequence[str] = PALETTE, size: int = 600,
             sample_depth: int = 4) -> str:
    """Write an SVG of pieces (filled hulls, colored by type) or of a point cloud.

    Pieces need ``system`` and ``maps`` to sample each attractor type.
    Returns the SVG text; writes it to ``path`` when given.
    """
    shapes = []  # (type, list of complex points, is_polygon)
    if isinstance(pieces, PointCloud):
        for z, t in zip(pieces.points, pieces.types):
            shapes.append((int(t), [complex(z)], False))
    elif len(pieces):
        if system is None or maps is None:
            raise ValueError("rendering pieces needs the system and its maps")
        hulls = _type_hulls(system, maps, sample_depth)
        for p in pieces:
            poly = [p(z) for z in hulls.get(p.type, [])]
            if poly:
                shapes.append((p.type, poly, True))
    allpts = [z for _, poly, _ in shapes for z in poly]
    if allpts:
        xs = [z.real for z in allpts]
        ys = [z.imag for z in allpts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    span = max(x1 - x0, y1 - y0) or 1.0
    pad = 0.02 * span
    scale = size / (span + 2 * pad)

    def xy(z):
        return _fmt((z.real - x0 + pad) * scale), _fmt((y1 + pad - z.imag) * scale)

    width = _fmt((x1 - x0 + 2 * pad) * scale)
    height = _fmt((y1 - y0 + 2 * pad) * scale)
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
              f'height="{height}" viewBox="0 0 {width} {height}">\n')
    r = _fmt(max(0.5, size / 800))
    for t, poly, is_poly in shapes:
        color = palette[t % len(palette)]
        if is_poly and len(poly) >= 3:
            pts = " ".join(",".join(xy(z)) for z in poly)
            out.write(f'<polygon points="{pts}" fill="{color}" stroke="none" data-type="{t + 1}"/>\n')
        elif is_poly:
            pts = " ".join(",".join(xy(z)) for z in poly)
            out.write(f'<polyline points="{pts}" fill="none" stroke="{color}" data-type="{t + 1}"/>\n')
        else:
            cx, cy = xy(poly[0])
            out.write(f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="{color}"/>\n')
    out.write("</svg>\n")
    text = out.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def emit_dot(graph, path=None, title: str = "G") -> str:
    text = graph.to_dot(title)
    if path is not None:
        Path(path).write_text(text)
    return text


def cloud_csv(cloud: PointCloud) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "type"])
    for z, t in zip(cloud.points, cloud.types):
        w.writerow([repr(float(z.real)), repr(float(z.imag)), int(t) + 1])
    return buf.getvalue()


def cloud_json(cloud: PointCloud) -> str:
    data = {"points": [[float(z.real), float(z.imag)] for z in cloud.points],
            "types": [int(t) + 1 for t in cloud.types]}
    return json.dumps(data, separators=(",", ":"))
