"""The four trace functionals and ball-family machinery.

All radius suprema are taken over critical radii (attained values on the
finite space).  Family suprema are searched over a finite candidate pool of
(center, radius) balls; the reported value is a certified lower bound of the
discrete supremum: exact when the pool fits the branch-and-bound budget,
greedy-with-swaps otherwise.  Callers may seed known-feasible families to
force monotonicity across nested pools.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cubes import k_of_r
from .errors import BadParams, SequenceDepthExceeded
from .measure import Measure, best_l1_constant
from .sequences import MeasureSequence
from .space import TOL, FiniteMetricSpace, as_points


@dataclass(frozen=True)
class BallFamily:
    balls: list                  # (center, radius) pairs
    kind: str = "nice"           # "nice" | "whitney"
    c: float = 1.0
    delta: float = 1.0


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    witness: dict = field(default_factory=dict)
    exact: bool = True


def lp_norm(f, m: Measure, p: float, members=None) -> float:
    f = np.asarray(f, dtype=float)
    w = m.weights if members is None else m.weights[as_points(members)]
    v = f if members is None else f[as_points(members)]
    return float(((np.abs(v) ** p) * w).sum() ** (1.0 / p))


def sharp_maximal(f, seq: MeasureSequence, space: FiniteMetricSpace, S, r_max: float = 1.0):
    """Pointwise sup over scales r <= r_max of oscillation(f at scale r) / r.

    The oscillation at scale r is 0 if B_r(x) misses S, otherwise the best-L1
    constant error of f over B_{2r}(x) under the measure of the band of r.
    Scales finer than the sequence depth are not represented and raise.
    """
    f = np.asarray(f, dtype=float)
    S = as_points(S)
    eps, K = seq.eps, seq.depth
    mw = [m.weights for m in seq.measures]
    out = np.zeros(space.n)
    band_tops = eps ** np.arange(0, K + 1)
    for x in range(space.n):
        row = space.dist[x]
        idx = np.argsort(row, kind="stable")
        ds = row[idx]
        cand = np.concatenate([row, 0.5 * row, band_tops])
        cand = np.unique(cand[(cand > 0) & (cand <= r_max + TOL)])
        if cand.size and cand.min() < eps ** (K + 1) - TOL:
            raise SequenceDepthExceeded(
                "critical radii reach below the finest band of the sequence"
            )
        s_dist = row[S].min()
        best = 0.0
        seen = set()
        for r in cand:
            k = k_of_r(float(r), eps)
            k = min(max(k, 0), K)
            key = (k, int(np.searchsorted(ds, r + TOL)), int(np.searchsorted(ds, 2 * r + TOL)))
            if key in seen:
                continue  # same memberships and band at a larger r can't win
            seen.add(key)
            if s_dist > r + TOL:
                continue  # zero branch
            ball2 = idx[: key[2]]
            m = Measure(mw[k])
            if m.weights[ball2].sum() <= 0:
                continue
            e_val, _ = best_l1_constant(f, ball2, m)
            best = max(best, e_val / float(r))
        out[x] = best
    return out


def CN(f, seq, space, mu: Measure, S, p: float) -> FunctionalValue:
    """L_p(m_0) norm of f plus the L_p(mu) norm of its sharp maximal field."""
    if not p > 1:
        raise BadParams("p must exceed 1")
    sharp = sharp_maximal(f, seq, space, S)
    lp = lp_norm(f, seq.measures[0], p)
    sh = lp_norm(sharp, mu, p)
    return FunctionalValue(value=lp + sh, witness={"lp": lp, "sharp": sh, "field": sharp})


def porous_points(space: FiniteMetricSpace, S, r: float, sigma: float) -> np.ndarray:
    """Points x whose ball B_r(x) contains a ball of radius sigma*r missing S.

    x qualifies iff some candidate center y has d(x,y) + sigma*r <= r and
    dist(y, S) > sigma*r (smaller sub-ball radii only tighten both
    constraints, so checking rho = sigma*r is exact).
    """
    if not (0 < sigma <= 1) or r <= 0:
        raise BadParams("need sigma in (0,1] and r > 0")
    dS = space.dist_to_set(S)
    ok_center = dS > sigma * r + TOL
    reach = space.dist <= (1.0 - sigma) * r + TOL
    return np.flatnonzero((reach & ok_center[None, :]).any(axis=1))


def BN(f, seq, space, mu: Measure, S, p: float, sigma: float) -> FunctionalValue:
    """L_p(m_0) norm + sharp field on S + scale-weighted oscillation sum over
    porous points."""
    if not p > 1:
        raise BadParams("p must exceed 1")
    f = np.asarray(f, dtype=float)
    S = as_points(S)
    eps, theta, K = seq.eps, seq.theta, seq.depth
    lp = lp_norm(f, seq.measures[0], p)
    sharp = sharp_maximal(f, seq, space, S)
    sh = lp_norm(sharp, mu, p, members=S)
    total = 0.0
    per_k = {}
    for k in range(1, K + 1):
        rk = eps ** k
        m_k = seq.measures[k]
        por = porous_points(space, S, rk, sigma)
        pts = np.intersect1d(por, m_k.support)
        acc = 0.0
        for x in pts:
            e_val, _ = best_l1_constant(f, space.ball(int(x), rk), m_k)
            acc += (e_val ** p) * m_k.weights[x]
        contrib = eps ** (k * (theta - p)) * acc
        per_k[k] = contrib
        total += contrib
    besov = total ** (1.0 / p)
    return FunctionalValue(
        value=lp + sh + besov,
        witness={"lp": lp, "sharp": sh, "besov": besov, "per_k": per_k},
    )


# ---------------------------------------------------------------------------
# family-supremum functionals
# ---------------------------------------------------------------------------

def validate_family(family: BallFamily, space: FiniteMetricSpace, S) -> list:
    S = as_points(S)
    v = []
    balls = family.balls
    for i, (x, r) in enumerate(balls):
        for jj in range(i + 1, len(balls)):
            y, s = balls[jj]
            if space.dist[x, y] <= r + s + TOL:
                v.append(("B1", i, jj))
        if r > family.delta + TOL:
            v.append(("B2", i))
        if space.dist[x, S].min() > family.c * r + TOL:
            v.append(("B3", i))
        if family.kind == "whitney" and space.dist[x, S].min() <= r + TOL:
            v.append(("B4", i))
    return v


def _candidates(f, seq, space, mu, S, p, c, delta, whitney=False):
    """Candidate balls with their p-th-power contributions.

    Radii per center are the left endpoints of the segments on which both the
    ball and its 2c-dilation have constant membership; the contribution is
    nonincreasing in r on each segment, so these radii are exact maximizers.
    """
    f = np.asarray(f, dtype=float)
    S = as_points(S)
    eps, K = seq.eps, seq.depth
    supp = seq.support
    cands = []
    for x in range(space.n):
        row = space.dist[x]
        dS = row[S].min()
        radii = np.concatenate([row, row / (2.0 * c)])
        radii = np.unique(radii[(radii > 0) & (radii <= delta + TOL)])
        radii = radii[radii >= eps ** (K + 1) - TOL]  # bands present in the sequence
        pareto_r, pareto_w = [], []
        for r in radii:
            r = float(r)
            if dS > c * r + TOL:
                continue  # c-dilation must reach S
            if whitney and dS <= r + TOL:
                continue  # the ball itself must avoid S
            k = min(max(k_of_r(r, eps), 0), K)
            ball_c = np.flatnonzero(row <= c * r + TOL)
            if seq.measures[k].weights[np.intersect1d(ball_c, supp, assume_unique=False)].sum() <= 0:
                continue
            ball2c = np.flatnonzero(row <= 2.0 * c * r + TOL)
            m_k = seq.measures[k]
            if m_k.weights[ball2c].sum() <= 0:
                continue
            e_val, _ = best_l1_constant(f, ball2c, m_k)
            if e_val <= 0:
                continue
            w = mu.mass(np.flatnonzero(row <= r + TOL)) / r ** p * e_val ** p
            # per-center Pareto filter: radii ascend, keep strictly rising weights
            if pareto_w and w <= pareto_w[-1] + TOL * (1 + abs(pareto_w[-1])):
                continue
            pareto_r.append(r)
            pareto_w.append(w)
        cands.extend((x, r, w) for r, w in zip(pareto_r, pareto_w))
    return cands


def _conflicts(cands, space):
    m = len(cands)
    adj = [set() for _ in range(m)]
    for i in range(m):
        xi, ri, _ = cands[i]
        for j in range(i + 1, m):
            xj, rj, _ = cands[j]
            if space.dist[xi, xj] <= ri + rj + TOL:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def _search_exact(cands, adj):
    order = sorted(range(len(cands)), key=lambda i: (-cands[i][2], cands[i][0], cands[i][1]))
    best = [0.0, []]
    suffix = [0.0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + cands[order[i]][2]

    def rec(pos, blocked, total, chosen):
        if total > best[0]:
            best[0], best[1] = total, list(chosen)
        if pos == len(order) or total + suffix[pos] <= best[0]:
            return
        i = order[pos]
        if i not in blocked:
            chosen.append(i)
            rec(pos + 1, blocked | adj[i], total + cands[i][2], chosen)
            chosen.pop()
        rec(pos + 1, blocked, total, chosen)

    rec(0, frozenset(), 0.0, [])
    return best[0], best[1]


def _search_greedy(cands, adj):
    def fill(fixed):
        chosen = list(fixed)
        used = set(chosen)
        blocked = set().union(*(adj[i] for i in chosen)) if chosen else set()
        order = sorted(range(len(cands)), key=lambda i: (-cands[i][2], cands[i][0], cands[i][1]))
        for i in order:
            if i in used or i in blocked:
                continue
            chosen.append(i)
            used.add(i)
            blocked |= adj[i]
        return chosen, sum(cands[i][2] for i in chosen)

    chosen, total = fill([])
    improved = True
    while improved:
        improved = False
        for drop in list(chosen):
            alt, alt_total = fill([i for i in chosen if i != drop])
            if alt_total > total + TOL * (1 + total):
                chosen, total = alt, alt_total
                improved = True
                break
    return total, chosen


def _family_sup(f, seq, space, mu, S, p, c, delta, budget, whitney=False, seeds=()):
    cands = _candidates(f, seq, space, mu, S, p, c, delta, whitney=whitney)
    adj = _conflicts(cands, space)
    if len(cands) <= budget:
        total, chosen = _search_exact(cands, adj)
        exact = True
    else:
        total, chosen = _search_greedy(cands, adj)
        exact = False
    balls = [(cands[i][0], cands[i][1]) for i in chosen]
    # seeded families are known feasible; take the best certificate found
    for seed in seeds:
        seed_total = _eval_family(f, seq, space, mu, p, c, seed)
        if seed_total > total:
            total, balls = seed_total, list(seed.balls)
    kind = "whitney" if whitney else "nice"
    fam = BallFamily(balls=balls, kind=kind, c=c, delta=delta)
    return total, fam, exact


def _eval_family(f, seq, space, mu, p, c, family: BallFamily) -> float:
    f = np.asarray(f, dtype=float)
    eps, K = seq.eps, seq.depth
    total = 0.0
    for x, r in family.balls:
        k = min(max(k_of_r(float(r), eps), 0), K)
        m_k = seq.measures[k]
        ball2c = space.ball(int(x), 2.0 * c * float(r))
        if m_k.weights[ball2c].sum() <= 0:
            continue
        e_val, _ = best_l1_constant(f, ball2c, m_k)
        total += mu.mass(space.ball(int(x), float(r))) / float(r) ** p * e_val ** p
    return total


def BSN(
    f, seq, space, mu: Measure, S, p: float, c: float, delta: float = 1.0,
    budget: int = 22, seeds=(),
) -> FunctionalValue:
    """L_p(m_0) norm + supremum over disjoint ball families (radii <= delta,
    c-dilations meeting S) of the scale-weighted oscillation sum."""
    if not (c > 1) or not (0 < delta <= 1):
        raise BadParams("need c > 1 and delta in (0, 1]")
    lp = lp_norm(f, seq.measures[0], p)
    total, fam, exact = _family_sup(f, seq, space, mu, S, p, c, delta, budget, seeds=seeds)
    return FunctionalValue(
        value=lp + total ** (1.0 / p),
        witness={"lp": lp, "sup_p": total, "family": fam},
        exact=exact,
    )


def N_functional(
    f, seq, space, mu: Measure, S, p: float, c: float, delta_grid=None,
    budget: int = 22,
) -> FunctionalValue:
    """min over the delta grid of the delta-capped family functional, plus the
    supremum over S-avoiding (Whitney) families."""
    if c < 3.0 / seq.eps:
        raise BadParams("c must be at least 3/eps")
    if delta_grid is None:
        delta_grid = [seq.eps, seq.eps ** 2, seq.eps ** 3]
    bsns = {d: BSN(f, seq, space, mu, S, p, c, delta=d, budget=budget) for d in delta_grid}
    d_best = min(bsns, key=lambda d: (bsns[d].value, -d))
    w_total, w_fam, w_exact = _family_sup(
        f, seq, space, mu, S, p, c, 1.0, budget, whitney=True
    )
    value = bsns[d_best].value + w_total ** (1.0 / p)
    return FunctionalValue(
        value=value,
        witness={
            "delta": d_best,
            "bsn_delta": {d: v.value for d, v in bsns.items()},
            "bsn_witnesses": {d: v.witness["family"] for d, v in bsns.items()},
            "whitney_sup_p": w_total,
            "whitney_family": w_fam,
        },
        exact=all(v.exact for v in bsns.values()) and w_exact,
    )
