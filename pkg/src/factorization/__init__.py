"""Regularized alternating least squares and its closed-form row solutions."""

from .als import FactorModel, als_fit, initial_item_factors
from .solvers import (
    design_matrix,
    item_design_matrix,
    objective,
    penalty_weights,
    solve_item_row,
    solve_items,
    solve_user_row,
    solve_users,
    user_design_matrix,
)

__all__ = [
    "FactorModel",
    "als_fit",
    "design_matrix",
    "initial_item_factors",
    "item_design_matrix",
    "objective",
    "penalty_weights",
    "solve_item_row",
    "solve_items",
    "solve_user_row",
    "solve_users",
    "user_design_matrix",
]
