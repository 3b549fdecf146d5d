import numpy as np
import pytest

import tracekit as tk
from tracekit import geometry as geo

EPS = 0.1


@pytest.fixture(scope="session")
def segment():
    return geo.make("segment")


@pytest.fixture(scope="session")
def small_segment():
    return geo.make("segment", n_side=7, n_seg=11)


@pytest.fixture(scope="session")
def segment_seq(segment):
    return tk.adr_sequence([(segment.sigma, segment.theta)],
                           theta=segment.theta, eps=EPS, K=3)


@pytest.fixture(scope="session")
def small_seq(small_segment):
    g = small_segment
    return tk.adr_sequence([(g.sigma, g.theta)], theta=g.theta, eps=EPS, K=3)


@pytest.fixture(scope="session")
def all_geometries():
    return [geo.make(name) for name in ("line", "grid2d", "segment", "ball", "composite")]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
