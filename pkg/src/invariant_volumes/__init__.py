"""Invariant volume forms and metrics on model bounded domains in C^n.

Carathéodory, Kobayashi, Bergman and Kähler-Einstein volume densities and
metrics, with the comparison inequalities between them as numerical checks.
"""
from .bounds import BoundKind, can_certify_leq
from .curvature import KahlerPotential, ball_potential, curvature_at, mixed_hessian
from .domains import AffineImage, Ball, Polydisk, Product, boundary_extremes, contains, parse_domain
from .forms import VolumeDensity, integrate_density, poincare_coefficient
from .maps import (
    Affine,
    BallAutomorphism,
    Composition,
    DiagonalScaling,
    MapSearchConfig,
    PowerMap,
    identity,
    pullback_poincare,
)
from .metrics import (
    MetricValue,
    bergman_metric,
    caratheodory_metric_lower,
    kobayashi_metric_upper,
    poincare_metric_ball,
)
from .squeezing import (
    SqueezingConstants,
    metric_comparison_constants,
    squeezing_constants,
    volume_comparison_constant,
)
from .volumes import (
    LinearSlice,
    VolumeEstimate,
    bergman_density_closed,
    bergman_density_numeric,
    caratheodory_lower,
    ke_density_ball,
    kobayashi_upper,
    poincare_density,
    restricted_caratheodory_lower,
    restricted_kobayashi_upper,
)

__version__ = "0.1.0"
