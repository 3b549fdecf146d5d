"""Desk-scale example geometries: ambient point cloud, target set, weights.

Each builder returns a Geometry bundle: a validated metric space, the index
set S of the distinguished subset, an ambient reference measure (uniform
atoms), and a boundary measure supported on S (uniform on S).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams
from .measure import Measure
from .space import FiniteMetricSpace, build_space


@dataclass(frozen=True)
class Geometry:
    name: str
    space: FiniteMetricSpace
    S: np.ndarray
    mu: Measure                  # ambient reference measure
    sigma: Measure               # boundary measure on S
    theta: float
    params: dict = field(default_factory=dict)


def _bundle(name, coords, S_idx, theta, params, validate=True):
    coords = np.asarray(coords, dtype=float)
    space = build_space(coords, validate=validate)
    n = space.n
    S_idx = np.asarray(sorted(set(int(i) for i in S_idx)), dtype=np.intp)
    mu = Measure(np.full(n, 1.0 / n))
    sw = np.zeros(n)
    sw[S_idx] = 1.0 / len(S_idx)
    return Geometry(name=name, space=space, S=S_idx, mu=mu, sigma=Measure(sw),
                    theta=theta, params=params)


def line(n: int = 60) -> Geometry:
    """n evenly spaced points on the unit interval; S is everything."""
    if n < 2:
        raise BadParams("need n >= 2")
    t = np.linspace(0.0, 1.0, n)
    coords = np.column_stack([t, np.zeros(n)])
    return _bundle("line", coords, range(n), theta=0.0, params={"n": n},
                   validate=False)


def grid2d(nx: int = 10, ny: int = 10) -> Geometry:
    """nx-by-ny grid on the unit square; S is everything."""
    if nx < 2 or ny < 2:
        raise BadParams("need nx, ny >= 2")
    xs, ys = np.meshgrid(np.linspace(0, 1, nx), np.linspace(0, 1, ny))
    coords = np.column_stack([xs.ravel(), ys.ravel()])
    return _bundle("grid2d", coords, range(nx * ny), theta=0.0,
                   params={"nx": nx, "ny": ny}, validate=False)


def segment_in_square(n_side: int = 9, n_seg: int = 17) -> Geometry:
    """Grid over the unit square plus a horizontal mid-line segment; S is the
    segment (codimension 1)."""
    if n_side < 2 or n_seg < 2:
        raise BadParams("need n_side, n_seg >= 2")
    xs, ys = np.meshgrid(np.linspace(0, 1, n_side), np.linspace(0, 1, n_side))
    grid = np.column_stack([xs.ravel(), ys.ravel()])
    seg = np.column_stack([np.linspace(0, 1, n_seg), np.full(n_seg, 0.5)])
    coords, idx = _merge(grid, seg)
    return _bundle("segment", coords, idx, theta=1.0,
                   params={"n_side": n_side, "n_seg": n_seg})


def ball_in_square(n_side: int = 11, radius: float = 0.3) -> Geometry:
    """Grid over the unit square; S is the sub-grid inside a centered disk
    (codimension 0)."""
    if n_side < 2 or not (0 < radius < 0.5):
        raise BadParams("need n_side >= 2 and radius in (0, 0.5)")
    xs, ys = np.meshgrid(np.linspace(0, 1, n_side), np.linspace(0, 1, n_side))
    coords = np.column_stack([xs.ravel(), ys.ravel()])
    inside = ((coords - 0.5) ** 2).sum(axis=1) <= radius ** 2 + 1e-12
    return _bundle("ball", coords, np.flatnonzero(inside), theta=0.0,
                   params={"n_side": n_side, "radius": radius}, validate=False)


def composite(n_side: int = 9, n_disk: int = 12, n_seg: int = 11) -> Geometry:
    """Disk boundary-and-interior sample joined to a segment at one junction
    point; S is their union, the two pieces share exactly that point."""
    if n_side < 2 or n_disk < 4 or n_seg < 2:
        raise BadParams("need n_side >= 2, n_disk >= 4, n_seg >= 2")
    xs, ys = np.meshgrid(np.linspace(0, 1, n_side), np.linspace(0, 1, n_side))
    grid = np.column_stack([xs.ravel(), ys.ravel()])
    # disk: center (0.3, 0.5), radius 0.2, rings of samples + junction on its rim
    center = np.array([0.3, 0.5])
    pts = [center]
    for frac, cnt in ((0.5, n_disk // 2), (1.0, n_disk)):
        ang = 2 * np.pi * np.arange(cnt) / cnt
        ring = center + 0.2 * frac * np.column_stack([np.cos(ang), np.sin(ang)])
        pts.append(ring)
    disk = np.vstack(pts)
    seg = np.column_stack([np.linspace(0.5, 1.0, n_seg), np.full(n_seg, 0.5)])
    s_pts = np.vstack([disk, seg])   # (0.5, 0.5) appears in both pieces
    coords, idx = _merge(grid, s_pts)
    g = _bundle("composite", coords, idx, theta=1.0,
                params={"n_side": n_side, "n_disk": n_disk, "n_seg": n_seg})
    return g


def composite_pieces(g: Geometry) -> tuple[np.ndarray, np.ndarray, int]:
    """Split a composite geometry's S into (disk part, segment part, junction)."""
    coords = g.space.coords
    in_disk = np.linalg.norm(coords[g.S] - np.array([0.3, 0.5]), axis=1) <= 0.2 + 1e-9
    on_seg = (np.abs(coords[g.S, 1] - 0.5) <= 1e-9) & (coords[g.S, 0] >= 0.5 - 1e-9)
    disk_part, seg_part = g.S[in_disk], g.S[on_seg]
    junction = int(np.intersect1d(disk_part, seg_part)[0])
    return disk_part, seg_part, junction


def _merge(base: np.ndarray, extra: np.ndarray, tol: float = 1e-9):
    """Append extra points to base, deduplicating; return coords and the
    indices of the extra points in the merged array."""
    coords = list(map(tuple, np.round(base / tol) * tol))
    index = {c: i for i, c in enumerate(coords)}
    idx = []
    for p in extra:
        key = tuple(np.round(p / tol) * tol)
        if key not in index:
            index[key] = len(coords)
            coords.append(key)
        idx.append(index[key])
    return np.array(coords), np.array(sorted(set(idx)), dtype=np.intp)


_BUILDERS = {
    "line": line,
    "grid2d": grid2d,
    "segment": segment_in_square,
    "ball": ball_in_square,
    "composite": composite,
}


def make(name: str, **params) -> Geometry:
    if name not in _BUILDERS:
        raise BadParams(f"unknown geometry {name!r}; choose from {sorted(_BUILDERS)}")
    return _BUILDERS[name](**params)
