"""Bound semantics shared by estimates and checks."""
from __future__ import annotations

from enum import Enum

__all__ = ["BoundKind", "CLOSED_FORM_RTOL", "OPTIMIZER_RTOL", "DIFFERENTIATION_RTOL", "can_certify_leq"]

CLOSED_FORM_RTOL = 1e-9
OPTIMIZER_RTOL = 1e-3
# quantities obtained from finite-difference Hessians of closed-form densities
DIFFERENTIATION_RTOL = 1e-6


class BoundKind(str, Enum):
    """How an estimate relates to the true extremal quantity."""

    EXACT = "exact"
    LOWER = "lower"
    UPPER = "upper"

    def scaled(self, factor: float) -> "BoundKind":
        if factor < 0:
            return {BoundKind.LOWER: BoundKind.UPPER, BoundKind.UPPER: BoundKind.LOWER}.get(self, self)
        return self


def can_certify_leq(lhs: BoundKind, rhs: BoundKind) -> bool:
    """Whether ``lhs <= rhs`` between estimates can refute the true inequality.

    A violation lhs_est > rhs_est refutes true_lhs <= true_rhs only when
    true_lhs >= lhs_est and rhs_est >= true_rhs, i.e. the left side is exact or
    a lower bound and the right side exact or an upper bound.
    """
    return lhs in (BoundKind.EXACT, BoundKind.LOWER) and rhs in (BoundKind.EXACT, BoundKind.UPPER)
