import numpy as np
import pytest

import tracekit as tk
from tracekit.cubes import build_cubes, build_hat_cubes, build_order
from tracekit.errors import ZeroMuBall
from tracekit.potentials import (
    a_ratio,
    comparison_constant,
    duality_gap,
    dyadic_riesz,
    energy,
    hedberg_wolff_check,
    k_low,
    cube_energy_bound,
    riesz,
    cube_energy_tail_bound,
    wolff,
)

EPS = 0.1


@pytest.fixture(scope="module")
def cube_setup(segment):
    nets = tk.build_nets(segment.space, EPS, 0, 2)
    order = build_order(nets, segment.space)
    cubes = build_cubes(nets, order, segment.space)
    hats = build_hat_cubes(cubes, segment.space)
    return cubes, hats


def test_k_low():
    assert k_low(1.0, EPS) == 0
    assert k_low(0.5, EPS) == 1
    assert k_low(0.1, EPS) == 1
    assert k_low(0.09, EPS) == 2


def test_zero_mass_gives_zero_field(segment):
    g = segment
    zero = tk.Measure(np.zeros(g.space.n))
    fld = riesz(g.space, g.mu, zero, EPS, 1.0, k_max=2)
    assert np.all(fld.values == 0.0)
    wf = wolff(g.space, g.mu, zero, EPS, 1.0, 2.0, k_max=2)
    assert np.all(wf.values == 0.0)


def test_two_atom_hand_values():
    sp = tk.build_space([[0.0, 0.0], [1.0, 0.0]], validate=False)
    mu = tk.Measure(np.array([1.0, 1.0]))
    m = tk.Measure(np.array([1.0, 0.0]))  # atom at point 0
    # single scale k=0 (r=1): both balls contain both points, a = (1/2)*1
    fld = riesz(sp, mu, m, EPS, 1.0, k_max=0)
    assert fld.values.tolist() == [0.5, 0.5]
    # k up to 1 adds r=0.1 balls: singletons, diam 0 -> no extra mass
    fld2 = riesz(sp, mu, m, EPS, 1.0, k_max=1)
    assert fld2.values.tolist() == [0.5, 0.5]
    # energy with p=2 (p'=2): sum of field^2 * mu
    assert energy(sp, mu, fld, [0, 1], 2.0) == pytest.approx(0.25 + 0.25)
    # wolff, p=2: (r^2 m(B)/mu(B))^{1} at r=1: 1*(1/2)=0.5 each; at r=0.1:
    # x=0 gets 0.01*(1/1)=0.01, x=1 ball has no m-mass
    wf = wolff(sp, mu, m, EPS, 1.0, 2.0, k_max=1)
    assert wf.values.tolist() == pytest.approx([0.51, 0.5])


def test_riesz_additive_in_m(segment):
    g = segment
    rng = np.random.default_rng(3)
    m1 = tk.Measure(rng.uniform(0, 1, g.space.n))
    m2 = tk.Measure(rng.uniform(0, 1, g.space.n))
    f1 = riesz(g.space, g.mu, m1, EPS, 1.0, k_max=2).values
    f2 = riesz(g.space, g.mu, m2, EPS, 1.0, k_max=2).values
    f12 = riesz(g.space, g.mu, m1 + m2, EPS, 1.0, k_max=2).values
    assert np.allclose(f12, f1 + f2)  # exactly additive
    w1 = wolff(g.space, g.mu, m1, EPS, 1.0, 2.0, k_max=2).values
    w12 = wolff(g.space, g.mu, m1 + m2, EPS, 1.0, 2.0, k_max=2).values
    assert np.all(w12 >= w1 - 1e-12)  # monotone in m


def test_a_ratio_zero_mu_raises():
    sp = tk.build_space([[0.0, 0.0], [1.0, 0.0]], validate=False)
    mu = tk.Measure(np.array([0.0, 1.0]))
    m = tk.Measure(np.array([1.0, 0.0]))
    with pytest.raises(ZeroMuBall):
        a_ratio(sp, mu, m, [0])


def test_pointwise_comparison(segment, cube_setup):
    g = segment
    cubes, hats = cube_setup
    fi = riesz(g.space, g.mu, g.sigma, EPS, 1.0, k_max=2)
    fh = dyadic_riesz(cubes, hats, g.space, g.mu, g.sigma, [0, 1, 2])
    C = comparison_constant(fi, fh, np.arange(g.space.n))
    assert np.isfinite(C)
    assert np.all(fi.values <= C * fh.values + 1e-9)


def test_cube_energy_bounds(segment, cube_setup):
    g = segment
    cubes, hats = cube_setup
    lhs, rhs = cube_energy_bound(g.space, g.mu, g.sigma, cubes, hats, g.S, 2.0, 1.0)
    assert lhs <= rhs + 1e-12
    lhs_t, rhs_t, ratio = cube_energy_tail_bound(g.space, g.mu, g.sigma, cubes, hats, 0, 0, 2.0)
    assert np.isfinite(ratio)


def test_hedberg_ratio_finite(segment):
    g = segment
    lhs, rhs, ratio = hedberg_wolff_check(g.space, g.mu, g.sigma, g.S, 2.0, EPS, 1.0,
                                          k_max=2)
    assert lhs > 0 and rhs > 0 and np.isfinite(ratio)


def test_duality_gap_random_instances(rng):
    for _ in range(50):
        n = int(rng.integers(1, 9))
        sp = tk.build_space(rng.uniform(size=(n, 2)), validate=False)
        nu = tk.Measure(rng.uniform(0.0, 1.0, n))
        sg = tk.Measure(rng.uniform(0.0, 1.0, n))
        p_t = float(rng.uniform(1.2, 4.0))
        primal, dual = duality_gap(sp, nu, sg, p_t, EPS, 1.0, k_max=3)
        assert abs(primal - dual) <= 1e-9 * max(1.0, dual)


def test_duality_zero_measure():
    sp = tk.build_space([[0.0, 0.0], [1.0, 0.0]], validate=False)
    nu = tk.Measure(np.zeros(2))
    sg = tk.Measure(np.ones(2))
    assert duality_gap(sp, nu, sg, 2.0, EPS, 1.0) == (0.0, 0.0)
