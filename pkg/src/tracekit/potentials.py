"""Scale-restricted potential fields, their energies, and inequality checks.

A potential at x sums, over the geometric scales eps^k up to a cap R, a
mass-ratio term of the ball (or enlarged cube) around x.  All sums are finite
and exact on the point cloud.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cubes import DyadicCubeSystem, k_of_r
from .errors import BadParams, RhsZeroWithPositiveLhs, ZeroMuBall
from .measure import Measure
from .space import TOL, FiniteMetricSpace, as_points


@dataclass(frozen=True)
class PotentialField:
    values: np.ndarray
    R: float
    kind: str                 # "riesz" | "dyadic_riesz" | "wolff"
    p: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if (v < -TOL).any():
            raise ValueError("potential values must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def k_low(R: float, eps: float) -> int:
    """Smallest integer k with eps^k <= R."""
    k = k_of_r(R, eps)
    return k if eps ** k <= R + TOL else k + 1


def a_ratio(space: FiniteMetricSpace, mu: Measure, m: Measure, members) -> float:
    """(m(E)/mu(E)) * diam(E); 0 when m(E)=0 (even on mu-null sets)."""
    members = as_points(members)
    m_mass = m.mass(members)
    if m_mass <= 0:
        return 0.0
    mu_mass = mu.mass(members)
    if mu_mass <= 0:
        raise ZeroMuBall("reference measure vanishes on a set charged by m")
    return m_mass / mu_mass * space.diam(members)


def riesz(
    space: FiniteMetricSpace, mu: Measure, m: Measure, eps: float, R: float,
    k_max: int = 8,
) -> PotentialField:
    """Scale sum of ball mass-ratio terms: sum over eps^k <= R of
    (m(B)/mu(B)) * diam(B) at B = B_{eps^k}(x)."""
    if R <= 0:
        raise BadParams("R must be positive")
    vals = np.zeros(space.n)
    for k in range(k_low(R, eps), k_max + 1):
        r = eps ** k
        for x in range(space.n):
            vals[x] += a_ratio(space, mu, m, space.ball(x, r))
    return PotentialField(values=vals, R=R, kind="riesz")


def dyadic_riesz(
    cubes: DyadicCubeSystem,
    hat_map: dict,
    space: FiniteMetricSpace,
    mu: Measure,
    m: Measure,
    k_range,
) -> PotentialField:
    """Cube-based analogue: at x, sum the mass-ratio term of the enlarged cube
    containing x at each level of k_range; 0 off the cube domain."""
    k_range = sorted(int(k) for k in k_range)
    vals = np.zeros(cubes.n)
    for k in k_range:
        pos_of = cubes.cube_of(k)
        a_of_pos = {
            pos: a_ratio(space, mu, m, hat_map[(k, pos)])
            for pos in range(len(cubes.levels[k]))
            if hat_map[(k, pos)].size
        }
        for x in range(cubes.n):
            if pos_of[x] >= 0:
                vals[x] += a_of_pos.get(int(pos_of[x]), 0.0)
    return PotentialField(values=vals, R=cubes.eps ** min(k_range), kind="dyadic_riesz")


def comparison_constant(
    field_a: PotentialField, field_b: PotentialField, members
) -> float:
    """Smallest C with field_a <= C * field_b on the given points (inf if
    field_b vanishes where field_a does not)."""
    members = as_points(members)
    a = field_a.values[members]
    b = field_b.values[members]
    out = 1.0
    for av, bv in zip(a, b):
        if av <= TOL:
            continue
        out = max(out, np.inf if bv <= 0 else av / bv)
    return float(out)


def energy(
    space: FiniteMetricSpace, mu: Measure, field: PotentialField, E, p: float
) -> float:
    """Integral over E of the field to the conjugate power p' = p/(p-1)."""
    if not (1 < p < np.inf):
        raise BadParams("p must lie in (1, inf)")
    E = as_points(E)
    pp = p / (p - 1.0)
    return float(((field.values[E] ** pp) * mu.weights[E]).sum())


def wolff(
    space: FiniteMetricSpace, mu: Measure, m: Measure, eps: float, R: float,
    p: float, k_max: int = 8,
) -> PotentialField:
    """Scale sum of (eps^{kp} m(B)/mu(B))^{p'-1} at B = B_{eps^k}(x)."""
    if not (1 < p < np.inf):
        raise BadParams("p must lie in (1, inf)")
    if R <= 0:
        raise BadParams("R must be positive")
    s = p / (p - 1.0) - 1.0
    vals = np.zeros(space.n)
    for k in range(k_low(R, eps), k_max + 1):
        r = eps ** k
        for x in range(space.n):
            ball = space.ball(x, r)
            m_mass = m.mass(ball)
            if m_mass <= 0:
                continue
            mu_mass = mu.mass(ball)
            if mu_mass <= 0:
                raise ZeroMuBall("reference measure vanishes on a charged ball")
            vals[x] += (r ** p * m_mass / mu_mass) ** s
    return PotentialField(values=vals, R=R, kind="wolff", p=p)


def hedberg_wolff_check(
    space: FiniteMetricSpace, mu: Measure, m: Measure, E, p: float,
    eps: float, R: float, k_max: int = 8,
):
    """Riesz energy of E against the integral of the dilated-scale Wolff field
    over a neighborhood of E; returns (lhs, rhs, ratio)."""
    E = as_points(E)
    k = k_of_r(R, eps)
    c1 = 18.0 * eps ** k / R
    c2 = 11.0 * eps ** k / R
    lhs = energy(space, mu, riesz(space, mu, m, eps, R, k_max=k_max), E, p)
    w_field = wolff(space, mu, m, eps, c1 * R, p, k_max=k_max)
    near = np.flatnonzero(space.dist_to_set(E) < c2 * R)
    rhs = float((w_field.values[near] * m.weights[near]).sum())
    if rhs <= 0:
        if lhs > TOL:
            raise RhsZeroWithPositiveLhs(f"lhs={lhs} with zero rhs")
        return lhs, rhs, 0.0
    return lhs, rhs, lhs / rhs


def cube_energy_bound(
    space: FiniteMetricSpace, mu: Measure, m: Measure,
    cubes: DyadicCubeSystem, hat_map: dict, E, p: float, R: float,
):
    """Cube-energy bound: energy of the cube potential over E against
    p' * sum over levels and cubes of a(hat cube) * int over cube & E of the
    single-level cube potential to the power p'-1.  Returns (lhs, rhs)."""
    if not (1 < p < np.inf):
        raise BadParams("p must lie in (1, inf)")
    E = as_points(E)
    pp = p / (p - 1.0)
    ks = [k for k in cubes.levels if cubes.eps ** k <= R + TOL]
    full = dyadic_riesz(cubes, hat_map, space, mu, m, ks)
    lhs = energy(space, mu, full, E, p)
    rhs = 0.0
    for k in ks:
        # single-level potential capped at scale eps^k (levels k..k_max)
        sub = dyadic_riesz(cubes, hat_map, space, mu, m,
                           [j for j in ks if j >= k])
        for pos, cube in enumerate(cubes.levels[k]):
            hat = hat_map[(k, pos)]
            if not hat.size:
                continue
            a = a_ratio(space, mu, m, hat)
            if a <= 0:
                continue
            cap = np.intersect1d(cube.members, E)
            if not cap.size:
                continue
            rhs += a * float(((sub.values[cap] ** (pp - 1.0)) * mu.weights[cap]).sum())
    return lhs, pp * rhs


def _descendants(cubes: DyadicCubeSystem, k: int, alpha: int, j: int):
    """Positions of level-j cubes contained in cube (k, alpha), j >= k."""
    pos = [alpha]
    for lvl in range(k + 1, j + 1):
        keep = set(pos)
        pos = [q for q, cube in enumerate(cubes.levels[lvl]) if cube.parent in keep]
    return pos


def cube_energy_tail_bound(
    space: FiniteMetricSpace, mu: Measure, m: Measure,
    cubes: DyadicCubeSystem, hat_map: dict, k: int, alpha: int, p: float,
):
    """Cube-energy of a single cube against the discrete tail sum over its
    descendants; returns (lhs, rhs, ratio certificate)."""
    if not (1 < p < np.inf):
        raise BadParams("p must lie in (1, inf)")
    pp = p / (p - 1.0)
    ks = [j for j in cubes.levels if j >= k]
    field = dyadic_riesz(cubes, hat_map, space, mu, m, ks)
    cube = cubes.levels[k][alpha]
    lhs = energy(space, mu, field, cube.members, p) if cube.members.size else 0.0
    rhs = 0.0
    for j in ks:
        for beta in _descendants(cubes, k, alpha, j):
            hat = hat_map[(j, beta)]
            if not hat.size:
                continue
            a = a_ratio(space, mu, m, hat)
            rhs += cubes.eps ** j * m.mass(hat) * a ** (pp - 1.0)
    ratio = 0.0 if lhs <= 0 else (np.inf if rhs <= 0 else lhs / rhs)
    return lhs, rhs, ratio


def duality_gap(
    space: FiniteMetricSpace, nu: Measure, sigma: Measure, p_tilde: float,
    eps: float, R: float, k_max: int = 8,
):
    """Operator-norm identity for the positive scale-sum kernel.

    T g (x) = sum_y K(x, y) g(y) nu_y maps L_{p~}(nu) to L_1(sigma); for a
    nonnegative kernel its norm equals the L_{p~'}(nu) norm of the adjoint
    applied to the constant 1.  The primal value is recomputed from the
    Hoelder-extremal function; both numbers are returned and must agree.
    """
    if not (1 < p_tilde < np.inf):
        raise BadParams("p_tilde must lie in (1, inf)")
    q = p_tilde / (p_tilde - 1.0)
    K = np.zeros((space.n, space.n))
    for k in range(k_low(R, eps), k_max + 1):
        r = eps ** k
        for x in range(space.n):
            ball = space.ball(x, r)
            nb = nu.mass(ball)
            if nb <= 0:
                continue
            K[x, ball] += space.diam(ball) / nb
    adj = K.T @ sigma.weights                      # adjoint applied to 1
    dual = float(((adj ** q) * nu.weights).sum() ** (1.0 / q))
    g_star = adj ** (q - 1.0)
    g_norm = float(((g_star ** p_tilde) * nu.weights).sum() ** (1.0 / p_tilde))
    if g_norm <= 0:
        return 0.0, dual
    tg = K @ (g_star * nu.weights)
    primal = float((tg * sigma.weights).sum() / g_norm)
    return primal, dual
