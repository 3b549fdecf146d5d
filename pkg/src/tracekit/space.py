"""Finite metric spaces, balls, net hierarchies and doubling diagnostics.

Everything downstream works on a point cloud with an exact pairwise distance
table.  Suprema over radii are taken over "critical" radii only: ball
membership can change only at one of the finitely many pairwise distances, so
sweeps over those values are exact for the discrete space.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricTable,
    EmptyTargetSet,
    EpsOutOfRange,
    NegativeDistance,
    TriangleViolation,
    ZeroMassEverywhere,
)

#: absolute tolerance for floating comparisons (ball membership etc.)
TOL = 1e-9


def as_points(members) -> np.ndarray:
    """Normalize a point-set argument to a sorted unique int array."""
    a = np.unique(np.asarray(members, dtype=np.intp))
    return a


@dataclass(frozen=True)
class FiniteMetricSpace:
    dist: np.ndarray                      # (n, n) symmetric, zero diagonal
    labels: list[str] | None = None
    coords: np.ndarray | None = None      # optional embedding, I/O only

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def ball(self, center: int, r: float) -> np.ndarray:
        """Closed ball B_r(center) as a sorted index array."""
        return np.flatnonzero(self.dist[center] <= r + TOL)

    def dist_to_set(self, members) -> np.ndarray:
        """dist(x, S) for every point x; S given as an index collection."""
        members = as_points(members)
        if members.size == 0:
            raise EmptyTargetSet("distance to the empty set is undefined")
        return self.dist[:, members].min(axis=1)

    def diam(self, members) -> float:
        members = as_points(members)
        if members.size <= 1:
            return 0.0
        sub = self.dist[np.ix_(members, members)]
        return float(sub.max())


def _pairwise(points: np.ndarray, metric: str) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    if metric == "euclidean":
        return np.sqrt((diff ** 2).sum(axis=-1))
    if metric == "chebyshev":
        return np.abs(diff).max(axis=-1)
    raise ValueError(f"unknown metric {metric!r}")


def _check_triangle(d: np.ndarray, rng: np.random.Generator) -> None:
    n = d.shape[0]
    if n <= 300:
        for k in range(n):
            slack = d - (d[:, k][:, None] + d[k, :][None, :])
            bad = np.argwhere(slack > TOL)
            if bad.size:
                i, j = bad[0]
                raise TriangleViolation(int(i), int(j), k, float(slack[i, j]))
    else:
        m = 10 * n * n
        i = rng.integers(0, n, size=m)
        j = rng.integers(0, n, size=m)
        k = rng.integers(0, n, size=m)
        slack = d[i, j] - (d[i, k] + d[k, j])
        bad = np.flatnonzero(slack > TOL)
        if bad.size:
            b = bad[0]
            raise TriangleViolation(int(i[b]), int(j[b]), int(k[b]), float(slack[b]))


def build_space(
    points=None,
    metric: str = "euclidean",
    dist=None,
    labels=None,
    validate: bool = True,
    seed: int = 0,
) -> FiniteMetricSpace:
    """Build a validated space from coordinates or an explicit distance table."""
    coords = None
    if dist is None:
        coords = np.atleast_2d(np.asarray(points, dtype=float))
        if coords.shape[0] == 1 and coords.shape[1] > 1 and np.ndim(points) == 1:
            coords = coords.T
        d = _pairwise(coords, metric)
    else:
        d = np.asarray(dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise AsymmetricTable("distance table must be square")
        if np.abs(d - d.T).max() > TOL:
            raise AsymmetricTable("distance table is not symmetric")
    if d.shape[0] < 1:
        raise ValueError("need at least one point")
    if (d < -TOL).any():
        raise NegativeDistance("negative entry in distance table")
    d = np.maximum(d, 0.0)
    np.fill_diagonal(d, 0.0)
    d = 0.5 * (d + d.T)  # enforce exact symmetry against float noise
    if validate:
        _check_triangle(d, np.random.default_rng(seed))
    d.setflags(write=False)
    return FiniteMetricSpace(dist=d, labels=labels, coords=coords)


@dataclass(frozen=True)
class NetHierarchy:
    eps: float
    k_min: int
    k_max: int
    levels: dict[int, np.ndarray] = field(default_factory=dict)

    def level(self, k: int) -> np.ndarray:
        return self.levels[k]


def _greedy_net(space: FiniteMetricSpace, sep: float, order: np.ndarray) -> np.ndarray:
    """Maximal sep-separated subset, greedy in the given order.

    A point joins iff it is at distance > sep from every point already chosen;
    greedy insertion makes the result maximal automatically.
    """
    chosen: list[int] = []
    mind = np.full(space.n, np.inf)
    for p in order:
        if mind[p] > sep + TOL:
            chosen.append(int(p))
            np.minimum(mind, space.dist[p], out=mind)
    return np.array(chosen, dtype=np.intp)


def build_nets(
    space: FiniteMetricSpace,
    eps: float,
    k_min: int,
    k_max: int,
    seed_order=None,
) -> NetHierarchy:
    if not (0.0 < eps <= 0.1):
        raise EpsOutOfRange(f"eps must lie in (0, 1/10], got {eps}")
    if k_min > k_max:
        raise ValueError("k_min must be <= k_max")
    order = np.arange(space.n) if seed_order is None else np.asarray(seed_order, dtype=np.intp)
    levels = {k: _greedy_net(space, eps ** k, order) for k in range(k_min, k_max + 1)}
    return NetHierarchy(eps=eps, k_min=k_min, k_max=k_max, levels=levels)


def doubling_constant(space: FiniteMetricSpace, mu, R: float) -> float:
    """max over x and critical radii r <= R of mu(B_2r(x)) / mu(B_r(x)).

    Candidate radii per center are the pairwise distances and their halves
    (so both B_r and B_2r hit every membership configuration).
    """
    w = np.asarray(getattr(mu, "weights", mu), dtype=float)
    if w.sum() <= 0:
        raise ZeroMassEverywhere("measure has no mass")
    if R <= 0:
        raise ValueError("R must be positive")
    best = 1.0
    for x in range(space.n):
        row = space.dist[x]
        idx = np.argsort(row, kind="stable")
        ds = row[idx]
        cum = np.cumsum(w[idx])
        cand = np.concatenate([row, 0.5 * row])
        cand = np.unique(cand[(cand > 0) & (cand <= R + TOL)])
        if cand.size == 0:
            continue
        m_r = cum[np.searchsorted(ds, cand + TOL) - 1]
        m_2r = cum[np.searchsorted(ds, 2.0 * cand + TOL) - 1]
        ok = m_r > 0
        if ok.any():
            best = max(best, float((m_2r[ok] / m_r[ok]).max()))
    return best


def packing_bound(c_mu: float, c: float) -> int:
    """Max number of disjoint radius-R balls inside a ball of radius c*R,
    derived from the doubling constant at scale (c+1)R."""
    return int(np.floor(c_mu ** (np.log2(2.0 * c) + 1.0))) + 1


def neighborhood_and_layer(
    space: FiniteMetricSpace, S, eps: float, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """U_k = {x : dist(x,S) < 5 eps^k} and the layer V_k = U_{k-1} \\ U_k."""
    S = as_points(S)
    if S.size == 0:
        raise EmptyTargetSet("S must be nonempty")
    dS = space.dist_to_set(S)
    u_k = np.flatnonzero(dS < 5.0 * eps ** k)
    u_prev = np.flatnonzero(dS < 5.0 * eps ** (k - 1))
    v_k = np.setdiff1d(u_prev, u_k, assume_unique=True)
    return u_k, v_k


def neighborhood(space: FiniteMetricSpace, S, radius: float) -> np.ndarray:
    """Plain open neighborhood {x : dist(x,S) < radius}."""
    return np.flatnonzero(space.dist_to_set(S) < radius)
