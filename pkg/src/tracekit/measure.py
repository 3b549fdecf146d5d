"""Atomic measures, best-constant L1 averages and codimension-type contents."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, NoFeasibleCover, ZeroMass
from .space import TOL, FiniteMetricSpace, as_points


@dataclass(frozen=True)
class Measure:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if (w < 0).any():
            raise ValueError("measure weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def mass(self, members=None) -> float:
        if members is None:
            return float(self.weights.sum())
        return float(self.weights[as_points(members)].sum())

    def restrict(self, members) -> "Measure":
        w = np.zeros_like(self.weights)
        m = as_points(members)
        w[m] = self.weights[m]
        return Measure(w)

    def scaled(self, factor: float) -> "Measure":
        return Measure(self.weights * factor)

    def __add__(self, other: "Measure") -> "Measure":
        return Measure(self.weights + other.weights)


def average(f, G, m: Measure) -> float:
    """Mean of f over G under m, with the 0-mass convention (empty -> 0)."""
    G = as_points(G)
    f = np.asarray(f, dtype=float)
    w = m.weights[G]
    tot = w.sum()
    if tot <= 0:
        return 0.0
    return float((f[G] * w).sum() / tot)


def best_l1_constant(f, G, m: Measure) -> tuple[float, float]:
    """Best constant approximation in L1(m) on G.

    Returns (E, c_star): E = min_c avg_G |f - c|, attained at a weighted
    median c_star.  Tie-break: the smallest attaining value of f on G.
    """
    G = as_points(G)
    f = np.asarray(f, dtype=float)
    w = m.weights[G]
    tot = w.sum()
    if tot <= 0:
        raise ZeroMass("best_l1_constant needs m(G) > 0")
    v = f[G]
    order = np.argsort(v, kind="stable")
    vs, ws = v[order], w[order]
    cum = np.cumsum(ws)
    # smallest v with cumulative weight >= half the total is the smallest
    # weighted median, hence the smallest minimizer of the L1 objective
    i = int(np.searchsorted(cum, 0.5 * tot - TOL * tot))
    c_star = float(vs[i])
    e_val = float((ws * np.abs(vs - c_star)).sum() / tot)
    return e_val, c_star


def tilde_E(f, space: FiniteMetricSpace, center: int, r: float, m: Measure, supp_test) -> float:
    """Oscillation at scale r: 0 if B_r(center) misses supp_test, otherwise
    the best-L1-constant error of f over B_{2r}(center) under m."""
    if r <= 0:
        raise ValueError("r must be positive")
    supp_test = as_points(supp_test)
    hit = (space.dist[center, supp_test] <= r + TOL).any()
    if not hit:
        return 0.0
    ball2 = space.ball(center, 2.0 * r)
    e_val, _ = best_l1_constant(f, ball2, m)
    return e_val


# ---------------------------------------------------------------------------
# codimension-theta Hausdorff content
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContentResult:
    value: float
    cover: list = field(default_factory=list)  # (center, radius) pairs
    exact: bool = False


def _candidate_balls(space, mu, E, theta, delta):
    """Candidate cover balls: centers at points of E, radii at the critical
    distances within E plus midpoints between consecutive critical values."""
    E = as_points(E)
    cands = []  # (cost, center, radius, covered_mask)
    for x in E:
        d_in_E = np.unique(space.dist[x, E])
        radii = set()
        prev = 0.0
        for d in d_in_E:
            if d > 0:
                radii.add(0.5 * (prev + d))
                radii.add(float(d))
                prev = d
        if not radii:  # singleton E: shrink below the nearest space point
            others = np.delete(space.dist[x], x)
            r0 = 0.5 * float(others.min()) if others.size else 0.5 * delta
            radii.add(min(r0, 0.5 * delta))
        for r in sorted(radii):
            if r >= delta - TOL or r <= 0:
                continue
            ball = space.ball(x, r)
            cost = mu.mass(ball) / r ** theta
            covered = frozenset(np.intersect1d(ball, E).tolist())
            cands.append((cost, int(x), float(r), covered))
    # keep the cheapest candidate per covered subset, then drop dominated ones
    best_by_set = {}
    for cost, x, r, cov in cands:
        cur = best_by_set.get(cov)
        if cur is None or cost < cur[0] - TOL:
            best_by_set[cov] = (cost, x, r)
    items = [(cost, x, r, cov) for cov, (cost, x, r) in best_by_set.items()]
    keep = []
    for i, (ci, xi, ri, covi) in enumerate(items):
        dominated = any(
            j != i and covj >= covi and cj <= ci + TOL and (covj > covi or cj < ci - TOL)
            for j, (cj, xj, rj, covj) in enumerate(items)
        )
        if not dominated:
            keep.append((ci, xi, ri, covi))
    keep.sort(key=lambda t: (t[0], t[1], t[2]))
    return keep


def _exact_cover(cands, universe):
    """Branch-and-bound min-cost set cover over the candidate balls."""
    best = [np.inf, None]
    # admissible bound: each uncovered element costs at least the cheapest
    # per-element rate among candidates containing it
    rate = {}
    for cost, _, _, cov in cands:
        per = cost / len(cov)
        for e in cov:
            if per < rate.get(e, np.inf):
                rate[e] = per

    def bound(uncovered):
        return sum(rate.get(e, np.inf) for e in uncovered)

    def rec(uncovered, cost, chosen):
        if cost + bound(uncovered) >= best[0] - TOL * (1 + abs(best[0])):
            return
        if not uncovered:
            best[0] = cost
            best[1] = list(chosen)
            return
        # branch on the element with the fewest covering candidates
        pivot = min(uncovered, key=lambda e: sum(1 for _, _, _, cov in cands if e in cov))
        for ci, (c, x, r, cov) in enumerate(cands):
            if pivot in cov:
                chosen.append(ci)
                rec(uncovered - cov, cost + c, chosen)
                chosen.pop()

    rec(frozenset(universe), 0.0, [])
    return best


def _greedy_cover(cands, universe):
    uncovered = set(universe)
    total, chosen = 0.0, []
    while uncovered:
        # cheapest cost per newly covered point; deterministic tie-break
        pick = min(
            (c for c in cands if c[3] & uncovered),
            key=lambda c: (c[0] / len(c[3] & uncovered), c[1], c[2]),
        )
        total += pick[0]
        chosen.append(pick)
        uncovered -= pick[3]
    return total, chosen


def hausdorff_content(
    space: FiniteMetricSpace,
    mu: Measure,
    E,
    theta: float,
    delta: float,
    mode: str = "auto",
    exact_cap: int = 24,
) -> ContentResult:
    """Infimal sum of mu(B_i)/r_i^theta over candidate-ball covers of E with
    radii < delta.  Exact (branch-and-bound) when the candidate pool is small,
    greedy-density upper bound otherwise."""
    E = as_points(E)
    if E.size == 0:
        raise BadParams("E must be nonempty")
    if delta <= 0 or theta < 0:
        raise BadParams("need delta > 0 and theta >= 0")
    cands = _candidate_balls(space, mu, E, theta, delta)
    coverable = set()
    for _, _, _, cov in cands:
        coverable |= cov
    if coverable != set(E.tolist()):
        raise NoFeasibleCover(
            f"{len(E) - len(coverable)} point(s) of E admit no candidate ball of radius < {delta}"
        )
    universe = set(E.tolist())
    run_exact = mode == "exact" or (mode == "auto" and len(cands) <= exact_cap)
    if mode == "exact" and len(cands) > exact_cap:
        run_exact = False
    if run_exact:
        value, chosen_idx = _exact_cover(cands, universe)
        cover = [(cands[i][1], cands[i][2]) for i in chosen_idx]
        return ContentResult(value=float(value), cover=cover, exact=True)
    value, chosen = _greedy_cover(cands, universe)
    return ContentResult(value=float(value), cover=[(x, r) for _, x, r, _ in chosen], exact=False)


def lcr_lambda(space: FiniteMetricSpace, mu: Measure, S, theta: float, r_grid) -> float:
    """Empirical lower-content-regularity constant of S:
    min over x in S and r in r_grid of H_{theta,r}(B_r(x) & S) r^theta / mu(B_r(x))."""
    S = as_points(S)
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size == 0:
        raise BadParams("r_grid must be nonempty")
    lam = np.inf
    for x in S:
        for r in r_grid:
            ball = space.ball(int(x), float(r))
            cap = np.intersect1d(ball, S)
            res = hausdorff_content(space, mu, cap, theta, float(r))
            denom = mu.mass(ball)
            if denom > 0:
                lam = min(lam, res.value * r ** theta / denom)
    return float(lam)


def adr_constants(
    space: FiniteMetricSpace, mu: Measure, S, theta: float, r_grid, delta_floor: float
) -> tuple[float, float]:
    """Empirical Ahlfors-David-regularity constants of S at a fixed content
    scale delta_floor (the discrete stand-in for the delta -> 0 limit)."""
    S = as_points(S)
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size == 0 or delta_floor <= 0:
        raise BadParams("need a nonempty r_grid and delta_floor > 0")
    ratios = []
    for x in S:
        for r in r_grid:
            ball = space.ball(int(x), float(r))
            cap = np.intersect1d(ball, S)
            res = hausdorff_content(space, mu, cap, theta, delta_floor)
            denom = mu.mass(ball)
            if denom > 0:
                ratios.append(res.value * r ** theta / denom)
    return float(min(ratios)), float(max(ratios))
