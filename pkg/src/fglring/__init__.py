"""Exact computations with the Buchstaber and Krichever formal group laws.

Integer and rational arithmetic only; every identity is checked as an
equality of polynomials or as membership in a graded slice of the
associativity ideal.
"""

from .exact_arith import Lattice, QuotientGroup, gcd_extended, hnf, snf
from .fgl import (
    FglSpec,
    associativity_defect,
    buchstaber_expand,
    exponential,
    krichever_expand,
    logarithm,
)
from .genus import OdeFit, krichever_ode_check, ode_fit
from .iso import ab_from_c, ab_from_chi, c_from_ab, m_series, s_family, verify_report
from .poly import GeneratorSet, GradedPoly, parse_poly
from .series import TruncSeries, compose, reversion
from .universal import UniversalRing, d_of, expected_rho, rho, torsion_scan

__version__ = "0.1.0"

__all__ = [
    "FglSpec",
    "GeneratorSet",
    "GradedPoly",
    "Lattice",
    "OdeFit",
    "QuotientGroup",
    "TruncSeries",
    "UniversalRing",
    "ab_from_c",
    "ab_from_chi",
    "associativity_defect",
    "buchstaber_expand",
    "c_from_ab",
    "compose",
    "d_of",
    "expected_rho",
    "exponential",
    "gcd_extended",
    "hnf",
    "krichever_expand",
    "krichever_ode_check",
    "logarithm",
    "m_series",
    "ode_fit",
    "parse_poly",
    "reversion",
    "rho",
    "s_family",
    "snf",
    "torsion_scan",
    "verify_report",
]
