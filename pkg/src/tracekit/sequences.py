"""Scale-indexed measure sequences: condition checks and three constructions.

A sequence {m_k} on a set S comes with a scale ratio eps and a codimension
parameter theta.  verify() sweeps the defining two-sided ball-mass bounds and
density-ratio bounds over critical radii and reports the achieved extremal
constants; the three constructions are the geometric-scaling recipe on a
regular set, the fat-Cantor counterexample with explicit gap weights, and the
cap-and-rescale mass redistribution over a quasicube system.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cubes import DyadicCubeSystem
from .errors import (
    BadParams,
    GridTooCoarse,
    SupportMismatch,
    ThetaOrder,
    ThetaOutOfRange,
)
from .measure import Measure
from .space import TOL, FiniteMetricSpace, as_points, build_space


@dataclass(frozen=True)
class MeasureSequence:
    eps: float
    theta: float
    measures: list[Measure]
    provenance: str = ""

    def __post_init__(self):
        supports = [tuple(m.support.tolist()) for m in self.measures]
        if len(set(supports)) > 1:
            raise SupportMismatch("all measures in a sequence must share one support")

    @property
    def depth(self) -> int:
        return len(self.measures) - 1

    @property
    def support(self) -> np.ndarray:
        return self.measures[0].support

    def densities(self) -> np.ndarray:
        """w_k relative to m_0 on the common support; shape (K+1, |supp|)."""
        supp = self.support
        base = self.measures[0].weights[supp]
        return np.array([m.weights[supp] / base for m in self.measures])


@dataclass(frozen=True)
class SequenceReport:
    C1: float
    C2: float
    C3: float
    m5_min_density: float
    #: per test set: {k: (min over x in E, max over x in E) of the density ratio}
    m5_by_k: list[dict[int, tuple[float, float]]] = field(default_factory=list)
    passes: dict[str, bool] = field(default_factory=dict)


def _row_cums(space, x, weight_arrays):
    row = space.dist[x]
    idx = np.argsort(row, kind="stable")
    ds = row[idx]
    cums = [np.cumsum(w[idx]) for w in weight_arrays]
    return ds, cums


def verify(
    seq: MeasureSequence,
    space: FiniteMetricSpace,
    mu: Measure,
    S,
    k_range=None,
    test_sets=(),
    thresholds: dict | None = None,
) -> SequenceReport:
    """Sweep the sequence conditions over critical radii and report constants.

    C1: max over all x, k in k_range, critical r <= eps^k of
        m_k(B_r(x)) r^theta / mu(B_r(x))          (upper mass bound)
    C2: min over x in S, k, critical r in [eps^k, 1] of the same ratio
                                                  (lower mass bound)
    C3: smallest constant with eps^{theta j}/C3 <= w_k/w_{k+j} <= C3
    m5: per test set E and depth k, the density m_k(B_{eps^k}(x) & E) /
        m_k(B_{eps^k}(x)) over x in E.
    """
    eps, theta = seq.eps, seq.theta
    ks = list(range(seq.depth + 1)) if k_range is None else list(k_range)
    if max(ks) > seq.depth:
        raise BadParams("k_range exceeds the sequence depth")
    S = as_points(S)
    mw = [m.weights for m in seq.measures]
    c1 = 0.0
    c2 = np.inf
    s_mask = np.zeros(space.n, dtype=bool)
    s_mask[S] = True
    for x in range(space.n):
        ds, cums = _row_cums(space, x, [mu.weights] + [mw[k] for k in ks])
        mu_cum, m_cums = cums[0], cums[1:]
        for pos, k in enumerate(ks):
            rk = eps ** k
            # upper bound sweep: r in (0, eps^k]
            r_up = np.unique(np.append(ds[(ds > 0) & (ds <= rk + TOL)], rk))
            loc = np.searchsorted(ds, r_up + TOL) - 1
            mu_b = mu_cum[loc]
            m_b = m_cums[pos][loc]
            ok = mu_b > 0
            if ok.any():
                c1 = max(c1, float((m_b[ok] * r_up[ok] ** theta / mu_b[ok]).max()))
            # lower bound sweep: r in [eps^k, 1], centers in S only
            if s_mask[x] and rk <= 1.0 + TOL:
                r_lo = np.unique(np.concatenate(
                    [ds[(ds >= rk - TOL) & (ds <= 1.0 + TOL)], [rk, 1.0]]
                ))
                loc = np.searchsorted(ds, r_lo + TOL) - 1
                mu_b = mu_cum[loc]
                m_b = m_cums[pos][loc]
                ok = mu_b > 0
                if ok.any():
                    c2 = min(c2, float((m_b[ok] * r_lo[ok] ** theta / mu_b[ok]).min()))

    # density-ratio constant over all level pairs on the common support
    w = seq.densities()[ks, :]
    c3 = 1.0
    for a in range(len(ks)):
        for b in range(a + 1, len(ks)):
            j = ks[b] - ks[a]
            ratio = w[a] / w[b]
            c3 = max(c3, float(ratio.max()), float((eps ** (theta * j) / ratio).max()))

    # test-set density profiles
    m5_by_k: list[dict[int, tuple[float, float]]] = []
    m5_min = np.inf
    for E in test_sets:
        E = as_points(E)
        e_mask = np.zeros(space.n, dtype=bool)
        e_mask[E] = True
        prof: dict[int, tuple[float, float]] = {}
        best_over_k = np.full(E.size, 0.0)
        for k in ks:
            rk = eps ** k
            ratios = []
            for i, x in enumerate(E):
                ball = space.ball(int(x), rk)
                den = float(mw[k][ball].sum())
                if den <= 0:
                    continue
                num = float(mw[k][ball[e_mask[ball]]].sum())
                val = num / den
                ratios.append(val)
                best_over_k[i] = max(best_over_k[i], val)
            if ratios:
                prof[k] = (float(min(ratios)), float(max(ratios)))
        m5_by_k.append(prof)
        if E.size:
            m5_min = min(m5_min, float(best_over_k.min()))
    m5_min = float(m5_min) if test_sets else float("nan")

    passes = {}
    for name, (lo, hi) in (thresholds or {}).items():
        val = {"C1": c1, "C2": c2, "C3": c3, "m5": m5_min}[name]
        passes[name] = (lo is None or val >= lo) and (hi is None or val <= hi)
    return SequenceReport(C1=c1, C2=float(c2), C3=c3, m5_min_density=m5_min,
                          m5_by_k=m5_by_k, passes=passes)


def adr_sequence(bases, theta: float, eps: float = 0.5, K: int = 6) -> MeasureSequence:
    """Geometric-scaling sequence m_k = sum_i (1/eps)^{k(theta-theta_i)} base_i.

    ``bases`` is one (Measure, theta_base) pair or a list of them (the summed
    variant glues components of different codimensions).
    """
    if isinstance(bases, tuple):
        bases = [bases]
    for _, tb in bases:
        if theta < tb:
            raise ThetaOrder("theta must be >= every component theta_base")
    measures = []
    for k in range(K + 1):
        w = np.zeros_like(bases[0][0].weights)
        for base, tb in bases:
            w = w + (1.0 / eps) ** (k * (theta - tb)) * base.weights
        measures.append(Measure(w))
    return MeasureSequence(eps=eps, theta=theta, measures=measures, provenance="adr")


# ---------------------------------------------------------------------------
# fat-Cantor counterexample
# ---------------------------------------------------------------------------

def slow_zeta(theta: float, n_terms: int = 100_000) -> float:
    """sum_{k>=1} k^-theta via partial sums with an integral tail correction
    (relative error well below 1e-9 for theta > 1)."""
    k = np.arange(1, n_terms + 1, dtype=float)
    partial = float((k ** -theta).sum())
    n = float(n_terms)
    tail = n ** (1 - theta) / (theta - 1) - 0.5 * n ** -theta + theta * n ** (-theta - 1) / 12.0
    return partial + tail


def c1_theta(theta: float) -> float:
    return 2.0 * slow_zeta(theta)


def c2_theta(theta: float, j_max: int = 200) -> float:
    j = np.arange(0, j_max + 1, dtype=float)
    return float((2.0 ** j / (1.0 + j) ** (theta - 1.0)).min())


@dataclass(frozen=True)
class CantorResult:
    space: FiniteMetricSpace
    mu: Measure
    E: np.ndarray                 # grid points standing in for the limit set
    U_list: list[np.ndarray]      # grid points of each deleted-gap generation
    seq: MeasureSequence
    c1: float
    c2: float
    gap_lengths: list[float]      # per-gap length at each generation


def cantor_sequence(
    theta: float, K: int, grid: int = 900, extra_depth: int = 2
) -> CantorResult:
    """Fat-Cantor set on [0,1] x {0} with gap-generation weights.

    Generation i deletes, from the middle of each of the 2^{i-1} surviving
    intervals, an open interval of length 1/(c1 2^{i-1} i^theta), so each
    generation removes total length 1/(c1 i^theta).  Gaps are built down to
    generation K + extra_depth so that the depth-K measures see a faithful
    portion of the deeper gap mass; measures are built for k <= K only.

    ``grid`` is the nominal number of cells per unit length; cells are
    allocated per elementary interval (at least one each), so every gap is
    resolved by construction.
    """
    if not (1.0 < theta < 2.0):
        raise ThetaOutOfRange("theta must lie in (1, 2)")
    if K < 1:
        raise BadParams("K must be >= 1")
    k_build = K + extra_depth
    if grid < 2 ** (k_build + 1) - 1:
        raise GridTooCoarse(
            f"grid={grid} cannot represent the {2 ** (k_build + 1) - 1} elementary intervals"
        )
    c1 = c1_theta(theta)
    c2 = c2_theta(theta)
    e_intervals = [(0.0, 1.0)]
    gaps: list[tuple[float, float, int]] = []
    gap_lengths = []
    for i in range(1, k_build + 1):
        gap_len = 1.0 / (c1 * 2 ** (i - 1) * i ** theta)
        gap_lengths.append(gap_len)
        nxt = []
        for a, b in e_intervals:
            if b - a <= gap_len:
                raise GridTooCoarse("deleted interval exceeds its parent; K too large")
            c = 0.5 * (a + b)
            gaps.append((c - gap_len / 2.0, c + gap_len / 2.0, i))
            nxt.append((a, c - gap_len / 2.0))
            nxt.append((c + gap_len / 2.0, b))
        e_intervals = nxt

    # adaptive cells: each elementary interval gets >= 1 cell
    pts, cell_len, kind = [], [], []   # kind: 0 = surviving set, i >= 1 = gap gen
    for (a, b), tag in [((a, b), 0) for a, b in e_intervals] + [
        ((a, b), i) for a, b, i in gaps
    ]:
        ncells = max(1, int(round((b - a) * grid)))
        edges = np.linspace(a, b, ncells + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            pts.append(0.5 * (lo + hi))
            cell_len.append(hi - lo)
            kind.append(tag)
    order = np.argsort(pts, kind="stable")
    pts = np.asarray(pts)[order]
    cell_len = np.asarray(cell_len)[order]
    kind = np.asarray(kind)[order]

    coords = np.column_stack([pts, np.zeros_like(pts)])
    space = build_space(points=coords, metric="euclidean", validate=False)
    mu = Measure(cell_len)
    E = np.flatnonzero(kind == 0)
    U_list = [np.flatnonzero(kind == i) for i in range(1, k_build + 1)]

    measures = []
    for k in range(K + 1):
        omega = np.ones_like(pts)
        for i in range(1, k_build + 1):
            if i <= k:
                coef = 2.0 ** ((theta - 1.0) * i) * i ** (theta - 1.0)
            else:
                coef = 2.0 ** ((theta - 1.0) * k) * (k + 1) ** (theta - 1.0)
            omega[kind == i] = coef
        measures.append(Measure(omega * cell_len))
    seq = MeasureSequence(eps=0.5, theta=theta, measures=measures, provenance="cantor")
    return CantorResult(space=space, mu=mu, E=E, U_list=U_list, seq=seq,
                        c1=c1, c2=c2, gap_lengths=gap_lengths)


# ---------------------------------------------------------------------------
# cap-and-rescale mass redistribution
# ---------------------------------------------------------------------------

def redistribute(
    qcubes: DyadicCubeSystem,
    mu: Measure,
    theta: float,
    j: int,
    k: int,
) -> tuple[Measure, dict[int, float]]:
    """Distribute mass over the level-j cube centers, then cap it level by
    level down to k.

    Start from atoms h_{j,beta} = mu(Qtilde_{j,beta}) / eps^{j theta} at the
    level-j centers.  For each level i from j-1 down to k, any level-i cube
    whose atom group exceeds its own cap h_{i,alpha} has the whole group
    scaled down uniformly to meet the cap.  Returns the final measure and the
    per-atom cumulative scaling factors (keyed by center point index).
    """
    if not (qcubes.k_min <= k <= j <= qcubes.k_max):
        raise BadParams("need k_min <= k <= j <= k_max of the cube system")
    eps = qcubes.eps
    n = qcubes.n
    w = np.zeros(n)
    scale: dict[int, float] = {}
    for cube in qcubes.levels[j]:
        h = mu.mass(cube.members) / eps ** (j * theta)
        w[cube.center] += h
        scale[cube.center] = 1.0
    for i in range(j - 1, k - 1, -1):
        for cube in qcubes.levels[i]:
            cap = mu.mass(cube.members) / eps ** (i * theta)
            group = cube.members
            mass = float(w[group].sum())
            if mass > cap and mass > 0:
                factor = cap / mass
                w[group] *= factor
                for z in group:
                    if z in scale:
                        scale[int(z)] *= factor
    return Measure(w), scale
