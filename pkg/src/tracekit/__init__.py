"""Toolkit for trace-space constructions on finite metric measure spaces."""

from .space import (
    TOL,
    FiniteMetricSpace,
    NetHierarchy,
    build_nets,
    build_space,
    doubling_constant,
    packing_bound,
)
from .measure import (
    Measure,
    average,
    best_l1_constant,
    hausdorff_content,
    tilde_E,
)
from .cubes import (
    DyadicCubeSystem,
    build_cubes,
    build_hat_cubes,
    build_order,
    build_quasicubes,
    k_of_r,
)
from .sequences import (
    MeasureSequence,
    adr_sequence,
    cantor_sequence,
    redistribute,
    verify,
)
from .functionals import BN, BSN, CN, BallFamily, N_functional, sharp_maximal
from .extension import build_extension, partition_of_unity, trace_residual
from .potentials import duality_gap, dyadic_riesz, riesz, wolff

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "FiniteMetricSpace",
    "NetHierarchy",
    "build_nets",
    "build_space",
    "doubling_constant",
    "packing_bound",
    "Measure",
    "average",
    "best_l1_constant",
    "hausdorff_content",
    "tilde_E",
    "DyadicCubeSystem",
    "build_cubes",
    "build_hat_cubes",
    "build_order",
    "build_quasicubes",
    "k_of_r",
    "MeasureSequence",
    "adr_sequence",
    "cantor_sequence",
    "redistribute",
    "verify",
    "BN",
    "BSN",
    "CN",
    "BallFamily",
    "N_functional",
    "sharp_maximal",
    "build_extension",
    "partition_of_unity",
    "trace_residual",
    "duality_gap",
    "dyadic_riesz",
    "riesz",
    "wolff",
]
