"""Admissible partial orders on net hierarchies and nested cube systems.

Three systems are built on the same machinery: partition cubes over the whole
point cloud, cubes over a distinguished subset only ("quasicubes"), and
enlarged cubes (unions of same-level neighbours within 5 eps^k of a center).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OrphanPoint
from .space import TOL, FiniteMetricSpace, NetHierarchy, as_points


def k_of_r(r: float, eps: float) -> int:
    """max{k integer : r <= eps^k}; exact log with integer correction."""
    if r <= 0:
        raise ValueError("r must be positive")
    k = int(np.floor(np.log(r) / np.log(eps) + 1e-12))
    while r <= eps ** (k + 1) + TOL:
        k += 1
    while r > eps ** k + TOL:
        k -= 1
    return k


@dataclass(frozen=True)
class PartialOrder:
    """parent[k][i] = position (in level k-1's net list) of the parent of the
    i-th net point of level k."""
    eps: float
    parent: dict[int, np.ndarray] = field(default_factory=dict)


def build_order(nets: NetHierarchy, space: FiniteMetricSpace) -> PartialOrder:
    """Parent = nearest coarser net point, ties broken by net-list position.

    A net point within eps^{k-1}/2 of a coarser point has that point as its
    unique nearest coarser point (separation), so the forced-parenthood rule
    is automatic for the nearest-point choice.
    """
    parent: dict[int, np.ndarray] = {}
    for k in range(nets.k_min + 1, nets.k_max + 1):
        fine, coarse = nets.level(k), nets.level(k - 1)
        d = space.dist[np.ix_(fine, coarse)]
        idx = np.argmin(d, axis=1)  # argmin returns the first (lowest) index on ties
        sep = nets.eps ** (k - 1)
        if (d[np.arange(len(fine)), idx] > sep + TOL).any():
            raise OrphanPoint(f"level {k-1} net does not cover level {k} net")
        parent[k] = idx.astype(np.intp)
    return PartialOrder(eps=nets.eps, parent=parent)


@dataclass(frozen=True)
class Cube:
    center: int                 # net point index (a space point)
    members: np.ndarray         # sorted space point indices
    parent: int | None          # position of the parent cube one level up


@dataclass(frozen=True)
class DyadicCubeSystem:
    eps: float
    a_param: float
    k_min: int
    k_max: int
    n: int                      # ambient point count
    levels: dict[int, list[Cube]] = field(default_factory=dict)
    domain: np.ndarray = None   # the point set partitioned by each level

    def cube_of(self, k: int) -> np.ndarray:
        """Map point index -> cube position at level k (-1 off the domain)."""
        out = np.full(self.n, -1, dtype=np.intp)
        for pos, cube in enumerate(self.levels[k]):
            out[cube.members] = pos
        return out


def build_cubes(
    nets: NetHierarchy,
    order: PartialOrder,
    space: FiniteMetricSpace,
    a_param: float = 0.125,
    domain=None,
) -> DyadicCubeSystem:
    """Nested partitions seeded at net points.

    Each domain point is assigned to its nearest finest-level net point (ties
    by index); coarser cubes are unions of their children, following the
    admissible order.  ``domain`` defaults to every point of the space; pass a
    subset to build the system over that subset only (quasicubes).
    """
    if not (0.0 < a_param <= 0.125):
        raise ValueError("a_param must lie in (0, 1/8]")
    domain = np.arange(space.n, dtype=np.intp) if domain is None else as_points(domain)
    k0, k1 = nets.k_min, nets.k_max
    finest = nets.level(k1)
    assign = finest[np.argmin(space.dist[np.ix_(domain, finest)], axis=1)]

    levels: dict[int, list[Cube]] = {}
    # finest level: one cube per net point
    group: dict[int, list[int]] = {pos: [] for pos in range(len(finest))}
    pos_of = {int(z): i for i, z in enumerate(finest)}
    for pt, z in zip(domain, assign):
        group[pos_of[int(z)]].append(int(pt))
    prev_membership = group
    for k in range(k1, k0 - 1, -1):
        net = nets.level(k)
        if k == k1:
            membership = prev_membership
        else:
            membership = {pos: [] for pos in range(len(net))}
            par = order.parent[k + 1]
            for child_pos, pts in prev_membership.items():
                membership[int(par[child_pos])].extend(pts)
        par_up = order.parent.get(k)
        cubes = [
            Cube(
                center=int(net[pos]),
                members=np.array(sorted(membership[pos]), dtype=np.intp),
                parent=int(par_up[pos]) if par_up is not None else None,
            )
            for pos in range(len(net))
        ]
        levels[k] = cubes
        prev_membership = membership
    return DyadicCubeSystem(
        eps=nets.eps, a_param=a_param, k_min=k0, k_max=k1, n=space.n,
        levels=levels, domain=domain,
    )


def build_quasicubes(
    nets_on_S: NetHierarchy,
    order_on_S: PartialOrder,
    space: FiniteMetricSpace,
    S,
    a_param: float = 0.125,
) -> DyadicCubeSystem:
    """Cube system over the points of S only, seeded at S-restricted nets."""
    return build_cubes(nets_on_S, order_on_S, space, a_param=a_param, domain=S)


def build_hat_cubes(
    cubes: DyadicCubeSystem, space: FiniteMetricSpace
) -> dict[tuple[int, int], np.ndarray]:
    """Enlarged cubes: union of same-level cubes meeting B_{5 eps^k}(center)."""
    hats: dict[tuple[int, int], np.ndarray] = {}
    for k, level in cubes.levels.items():
        rad = 5.0 * cubes.eps ** k
        for pos, cube in enumerate(level):
            parts = [
                other.members
                for other in level
                if other.members.size
                and space.dist[cube.center, other.members].min() <= rad + TOL
            ]
            hats[(k, pos)] = (
                np.unique(np.concatenate(parts)) if parts else np.array([], dtype=np.intp)
            )
    return hats
