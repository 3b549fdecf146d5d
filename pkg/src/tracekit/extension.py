"""Stepwise extension of a function off a target set, plus energy diagnostics.

The extension is assembled scale by scale: at each level a partition of unity
subordinate to the net balls blends local averages of the boundary data, and
the telescoping corrections stabilize pointwise (tent weights give exact
zeros, so supports and stabilization indices are exact, not approximate).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UncoveredPoint
from .measure import Measure, average
from .sequences import MeasureSequence
from .space import TOL, FiniteMetricSpace, NetHierarchy, as_points


def partition_of_unity(nets: NetHierarchy, space: FiniteMetricSpace, k: int) -> np.ndarray:
    """Row-stochastic weights phi[alpha, x] subordinate to B_{2 eps^k}(z_alpha).

    Tent profile max(0, 1 - d/(2 eps^k)) per net point, normalized over the
    level-k net.  Covering gives every point a tent value >= 1/2 somewhere, so
    the normalization is well defined everywhere.
    """
    net = nets.level(k)
    r = 2.0 * nets.eps ** k
    bump = np.maximum(0.0, 1.0 - space.dist[net, :] / r)
    tot = bump.sum(axis=0)
    if (tot <= 0).any():
        raise UncoveredPoint(f"level-{k} net does not cover the space")
    return bump / tot


def active_mask(nets: NetHierarchy, space: FiniteMetricSpace, S, k: int) -> np.ndarray:
    """Net points at level k whose double ball meets the 5 eps^{k-1}
    neighborhood of S."""
    S = as_points(S)
    net = nets.level(k)
    dS = space.dist_to_set(S)
    near = dS < 5.0 * nets.eps ** (k - 1)
    reach = space.dist[net, :] <= 2.0 * nets.eps ** k + TOL
    return (reach & near[None, :]).any(axis=1)


def cell_averages(
    f, seq: MeasureSequence, nets: NetHierarchy, space: FiniteMetricSpace, S, k: int
) -> np.ndarray:
    """Per-net-point averages of f over B_{6 eps^{k-1}}(z_alpha) under the
    level-k measure; inactive net points get coefficient 0."""
    f = np.asarray(f, dtype=float)
    net = nets.level(k)
    act = active_mask(nets, space, S, k)
    m_k = seq.measures[k]
    r = 6.0 * nets.eps ** (k - 1)
    out = np.zeros(len(net))
    for a, z in enumerate(net):
        if act[a]:
            out[a] = average(f, space.ball(int(z), r), m_k)
    return out


@dataclass(frozen=True)
class ExtensionResult:
    values: np.ndarray                       # the extended function
    steps: dict[int, np.ndarray] = field(default_factory=dict)
    smoothed: dict[int, np.ndarray] = field(default_factory=dict)
    j_star: np.ndarray = None                # last level contributing per point


def build_extension(
    f, seq: MeasureSequence, nets: NetHierarchy, space: FiniteMetricSpace, S
) -> ExtensionResult:
    """Telescoping multiscale extension: boundary data on S, stabilized
    correction sum elsewhere."""
    f = np.asarray(f, dtype=float)
    S = as_points(S)
    steps: dict[int, np.ndarray] = {}
    smoothed: dict[int, np.ndarray] = {}
    prev = np.zeros(space.n)
    acc = np.zeros(space.n)
    j_star = np.full(space.n, nets.k_min - 1, dtype=int)
    for k in range(nets.k_min, nets.k_max + 1):
        phi = partition_of_unity(nets, space, k)
        coef = cell_averages(f, seq, nets, space, S, k)
        act = active_mask(nets, space, S, k)
        f_k = coef @ phi                       # inactive coefficients are 0
        st = np.zeros(space.n)
        for a in np.flatnonzero(act):
            st += phi[a] * (coef[a] - prev)
        steps[k] = st
        smoothed[k] = f_k
        nz = np.abs(st) > 0.0
        j_star[nz] = k
        acc = acc + st
        prev = f_k
    values = acc.copy()
    values[S] = f[S]
    return ExtensionResult(values=values, steps=steps, smoothed=smoothed, j_star=j_star)


# ---------------------------------------------------------------------------
# energy and residual diagnostics
# ---------------------------------------------------------------------------

def lip(space: FiniteMetricSpace, g, h: float) -> np.ndarray:
    """Local slope: max over 0 < d(x,y) <= h of |g(x)-g(y)| / d(x,y)."""
    g = np.asarray(g, dtype=float)
    d = space.dist
    with np.errstate(divide="ignore", invalid="ignore"):
        quot = np.abs(g[:, None] - g[None, :]) / d
    quot[(d <= 0) | (d > h + TOL)] = 0.0
    return quot.max(axis=1)


def cheeger_energy(space: FiniteMetricSpace, mu: Measure, g, p: float, h: float) -> float:
    """Sum of the p-th power of the h-local slope against mu."""
    return float(((lip(space, g, h) ** p) * mu.weights).sum())


def fractional_maximal(
    space: FiniteMetricSpace, m: Measure, g, alpha: float, q: float, R: float
) -> np.ndarray:
    """sup over r <= R of r^alpha (avg_{B_r} |g|^q)^{1/q}, per point.

    The sup is attained at a critical radius (a pairwise distance) or at R.
    """
    g = np.abs(np.asarray(g, dtype=float)) ** q
    w = m.weights
    out = np.zeros(space.n)
    for x in range(space.n):
        row = space.dist[x]
        idx = np.argsort(row, kind="stable")
        ds = row[idx]
        cum_w = np.cumsum(w[idx])
        cum_gw = np.cumsum((g * w)[idx])
        cand = np.unique(np.append(row[(row > 0) & (row <= R + TOL)], R))
        pos = np.searchsorted(ds, cand + TOL) - 1
        mass = cum_w[pos]
        ok = mass > 0
        if ok.any():
            avg = cum_gw[pos[ok]] / mass[ok]
            out[x] = float((cand[ok] ** alpha * avg ** (1.0 / q)).max())
    return out


def trace_residual(
    f, ext_values, space: FiniteMetricSpace, mu: Measure, S, r: float
) -> np.ndarray:
    """Per point of S: average over B_r(x) under mu of |f(x) - extension|."""
    f = np.asarray(f, dtype=float)
    ext_values = np.asarray(ext_values, dtype=float)
    S = as_points(S)
    out = np.zeros(S.size)
    for i, x in enumerate(S):
        ball = space.ball(int(x), r)
        out[i] = average(np.abs(f[x] - ext_values), ball, mu)
    return out


def gluing(
    f, space: FiniteMetricSpace, S1, m1: Measure, S2, m2: Measure, center: int, r: float
) -> float:
    """Double average of |f(y) - f(z)| over (B_r & S1, m1) x (B_r & S2, m2);
    zero if either factor carries no mass on the ball."""
    f = np.asarray(f, dtype=float)
    ball = space.ball(int(center), r)
    g1 = np.intersect1d(ball, as_points(S1))
    g2 = np.intersect1d(ball, as_points(S2))
    w1 = m1.weights[g1]
    w2 = m2.weights[g2]
    t1, t2 = w1.sum(), w2.sum()
    if t1 <= 0 or t2 <= 0:
        return 0.0
    diff = np.abs(f[g1][:, None] - f[g2][None, :])
    return float((w1[:, None] * w2[None, :] * diff).sum() / (t1 * t2))
