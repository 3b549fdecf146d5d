import numpy as np
import pytest

import tracekit as tk
from tracekit.errors import (
    GridTooCoarse,
    SupportMismatch,
    ThetaOrder,
    ThetaOutOfRange,
)
from tracekit.sequences import (
    c1_theta,
    c2_theta,
    cantor_sequence,
    redistribute,
    slow_zeta,
)

EPS = 0.1


def test_zeta_reference_values():
    # zeta(2) = pi^2/6, zeta(1.5) = 2.612375348685...
    assert slow_zeta(2.0) == pytest.approx(np.pi ** 2 / 6, rel=1e-6)
    assert slow_zeta(1.5) == pytest.approx(2.6123753486854883, rel=1e-4)


def test_c1_c2_closed_forms():
    assert c1_theta(1.5) == pytest.approx(2 * 2.6123753486854883, rel=1e-4)
    # for exponents in (1, 2] the minimum in c2 is at j = 0
    assert c2_theta(1.5) == pytest.approx(1.0)
    assert c2_theta(2.0) == pytest.approx(1.0)


def test_adr_sequence_constant_for_matching_exponent(segment, segment_seq):
    rep = tk.verify(segment_seq, segment.space, segment.mu, segment.S,
                    k_range=range(0, 3), test_sets=[segment.S])
    assert rep.C3 == pytest.approx(1.0)
    for k in range(1, segment_seq.depth + 1):
        assert np.allclose(segment_seq.measures[k].weights,
                           segment_seq.measures[0].weights)


def test_adr_sequence_rejects_bad_exponent_order(segment):
    with pytest.raises(ThetaOrder):
        tk.adr_sequence([(segment.sigma, 1.0)], theta=0.5, eps=EPS, K=2)


def test_sequence_rejects_support_mismatch(segment):
    w1 = segment.sigma.weights.copy()
    w2 = w1.copy()
    w2[int(segment.S[0])] = 0.0
    with pytest.raises(SupportMismatch):
        tk.MeasureSequence(eps=EPS, theta=1.0,
                           measures=[tk.Measure(w1), tk.Measure(w2)])


def test_cantor_parameter_validation():
    with pytest.raises(ThetaOutOfRange):
        cantor_sequence(2.5, 4)
    with pytest.raises(GridTooCoarse):
        cantor_sequence(1.5, 6, grid=10)


def test_cantor_gap_lengths():
    res = cantor_sequence(1.5, 4)
    c1 = res.c1
    for i, length in enumerate(res.gap_lengths, start=1):
        assert length == pytest.approx(1.0 / (c1 * 2 ** (i - 1) * i ** 1.5), rel=1e-12)
    # total removed per generation
    gaps_total = [length * 2 ** (i - 1) for i, length in enumerate(res.gap_lengths, 1)]
    for i, tot in enumerate(gaps_total, start=1):
        assert tot == pytest.approx(1.0 / (c1 * i ** 1.5), rel=1e-12)


def test_cantor_mass_decay_on_E():
    # density of E inside its own balls fades as the depth grows
    res = cantor_sequence(1.5, 6)
    ratios = []
    for k in range(2, 7):
        r = 2.0 ** -k
        mk = res.seq.measures[k].weights
        vals = []
        for x in res.E:
            ball = res.space.ball(int(x), r)
            vals.append(mk[np.intersect1d(ball, res.E)].sum() / mk[ball].sum())
        ratios.append(max(vals))
    assert all(a >= b - 1e-12 for a, b in zip(ratios, ratios[1:]))


def _quasi(segment):
    g = segment
    netsS = tk.build_nets(g.space, EPS, 0, 2, seed_order=g.S)
    orderS = tk.build_order(netsS, g.space)
    return tk.build_quasicubes(netsS, orderS, g.space, g.S)


def test_redistribute_cap_property(segment):
    g = segment
    qc = _quasi(segment)
    m, _ = redistribute(qc, g.mu, theta=1.0, j=2, k=0)
    for i in range(0, 3):
        for cube in qc.levels[i]:
            cap = g.mu.mass(cube.members) / EPS ** i
            assert m.mass(cube.members) <= cap + 1e-9


def test_redistribute_scaling_sandwich(segment):
    g = segment
    qc = _quasi(segment)
    theta = 1.0
    _, scale_full = redistribute(qc, g.mu, theta=theta, j=2, k=0)
    _, scale_part = redistribute(qc, g.mu, theta=theta, j=2, k=1)
    for z, c_full in scale_full.items():
        c_part = scale_part[z]
        assert EPS ** theta * c_part <= c_full + 1e-12
        assert c_full <= c_part + 1e-12
