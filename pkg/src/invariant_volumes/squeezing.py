"""Uniform squeezing constants over a sample of base points.

For each sample point x the domain, translated so x sits at the origin,
satisfies B_{r_x} ⊂ D - x ⊂ B_{R_x} with r_x, R_x the nearest and farthest
boundary distances.  Over the sample, a = min r_x and b = max R_x.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .domains import _require_domain
from .forms import as_point

__all__ = [
    "SqueezingConstants",
    "squeezing_constants",
    "volume_comparison_constant",
    "MetricComparisonConstants",
    "metric_comparison_constants",
]


@dataclass(frozen=True)
class SqueezingConstants:
    a: float
    b: float
    sample: tuple = ()
    table: tuple = ()  # (x, r_x, R_x) per sample point
    exact: bool = True

    def __post_init__(self):
        if not (0 < self.a <= self.b < np.inf):
            raise ValueError(f"invalid squeezing constants a={self.a}, b={self.b}")


def squeezing_constants(D, sample) -> SqueezingConstants:
    D = _require_domain(D)
    points = [as_point(x, D.dim) for x in sample]
    if not points:
        raise ValueError("sample must contain at least one point")
    table, exact = [], True
    for x in points:
        ext = D.boundary_extremes(x)
        table.append((tuple(x), ext.inner, ext.outer))
        exact &= ext.exact
    a = min(r for _, r, _ in table)
    b = max(R for _, _, R in table)
    return SqueezingConstants(a, b, tuple(tuple(x) for x in points), tuple(table), exact)


def volume_comparison_constant(c: SqueezingConstants, m: int) -> float:
    """(b/a)^(2m): the factor relating Kobayashi to Carathéodory volume in dimension m."""
    if m < 1:
        raise ValueError("dimension must be positive")
    return (c.b / c.a) ** (2 * m)


@dataclass(frozen=True)
class MetricComparisonConstants:
    kobayashi: float  # g^K <= kobayashi * g^C
    bergman: float  # g^B <= bergman * g^K
    ke_lower: float  # ke_lower * g^K <= g^KE
    ke_upper: float  # g^KE <= ke_upper * g^K


def metric_comparison_constants(c: SqueezingConstants, n: int) -> MetricComparisonConstants:
    if n < 1:
        raise ValueError("dimension must be positive")
    a, b = c.a, c.b
    return MetricComparisonConstants(
        kobayashi=b ** 2 / a ** 2,
        bergman=((2 * pi / a ** 3) * (2 * b / a) ** n) ** 2,
        ke_lower=a ** 2 / (b ** 2 * n),
        ke_upper=b ** (4 * n - 2) * n ** (n - 1) / a ** (2 * n - 2),
    )
