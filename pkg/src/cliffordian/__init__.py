"""Holomorphic Cliffordian functions in the Clifford algebra R(0,3).

Paravector algebra, the polynomial and singular bases ``P_alpha`` and
``S_beta``, trigonometric lifts, and Weierstrass-type lattice functions
``zeta_N``, ``eta_N``, ``Z_N`` and the ``P`` family with rigorous tail bounds.
"""

from __future__ import annotations

from .algebra import MultiIndex, Multivector, Paravector, geometric_product, inverse
from .errors import (
    AxisSingularity,
    BadIndex,
    CliffordianError,
    ConfigError,
    EmptyIndex,
    GradeLeak,
    NearPole,
    NotInvertible,
    PoleOfCotan,
    RadiusTooLarge,
    Unconverged,
    ZeroNorm,
)
from .lattice import Lattice, SumConfig, default_config, default_lattice, tail_bound
from .polynomials import eval_P, eval_S, p_table
from .trig import cos_cl, cotan_cl, exp_cl, sin_cl
from .weierstrass import (
    SeriesResult,
    Z,
    ZetaTermForm,
    d0_p0,
    eta,
    p_alpha,
    p_alpha_direct,
    zero_scan,
    zeta,
    zeta_dir_deriv,
)

__version__ = "0.1.0"

__all__ = [
    "MultiIndex", "Multivector", "Paravector", "geometric_product", "inverse",
    "AxisSingularity", "BadIndex", "CliffordianError", "ConfigError", "EmptyIndex", "GradeLeak",
    "NearPole", "NotInvertible", "PoleOfCotan", "RadiusTooLarge", "Unconverged", "ZeroNorm",
    "Lattice", "SumConfig", "default_config", "default_lattice", "tail_bound",
    "eval_P", "eval_S", "p_table",
    "cos_cl", "cotan_cl", "exp_cl", "sin_cl",
    "SeriesResult", "Z", "ZetaTermForm", "d0_p0", "eta", "p_alpha", "p_alpha_direct",
    "zero_scan", "zeta", "zeta_dir_deriv",
]
