"""Compute and certify m(k), the least m with m*x a Z-combination of k-th powers in Z[x]."""

__version__ = "0.1.0"

from .formula import FactorProfile, alpha, beta, factor, profile
from .subgroup import m_k_R, span_J, span_K

__all__ = ["FactorProfile", "alpha", "beta", "factor", "profile", "m_k_R", "span_J", "span_K"]
