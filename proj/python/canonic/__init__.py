"""Determinant identities, canonical-curve relations, theta and metric formulas."""

from ._canonic import (
    BudgetError,
    BudgetExceeded,
    ConditioningError,
    constant,
    curve_relations,
    g_xi,
    sample_curve,
    siegel_metric,
    spin_census,
    theorem_main_sum,
    theta,
)

__all__ = [
    "BudgetError",
    "BudgetExceeded",
    "ConditioningError",
    "constant",
    "curve_relations",
    "g_xi",
    "sample_curve",
    "siegel_metric",
    "spin_census",
    "theorem_main_sum",
    "theta",
]
