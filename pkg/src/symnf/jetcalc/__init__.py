"""
Graded truncated polynomial algebra in 2n phase-space variables.
"""

from __future__ import annotations

from .hjet import HJet, layer_trunc, power_series
from .jet import Jet, hamilton_field, poisson
from .mapjet import MapJet, compose, flow_jet, lie_operator, linear_pullback, substitute
from .operators import GradedOperator, HJetBasis, JetBasis, bernoulli

__all__ = [
    "GradedOperator",
    "HJet",
    "HJetBasis",
    "Jet",
    "JetBasis",
    "MapJet",
    "bernoulli",
    "compose",
    "flow_jet",
    "hamilton_field",
    "layer_trunc",
    "lie_operator",
    "linear_pullback",
    "poisson",
    "power_series",
    "substitute",
]
