"""A numerical laboratory for transfer operators of rational maps.

The package evaluates the Ruelle push-forward, the Beltrami pull-back,
and the interpolating L_p family attached to a rational self-map of
the Riemann sphere, integrates singular densities over the plane,
assembles finite transfer matrices on gamma bases of postcritically
finite maps, and probes ergodic behavior (Cesaro traces, dissipative
sums, mixing) with reproducible Monte Carlo estimates.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, CriticalFiberWarning, CriticalOrbit,
                     DegenerateFixedPoints, DegenerateLattice, EmptyBasis,
                     ExpansionResidual, HigherOrderCritical, InvalidExponent,
                     MassEstimateFailure, NoConvergence, NonIntegrable,
                     NoRepellingFixedPoint, NotEscaped, NotPCF, OnBoundary,
                     ResidueMismatch, RootSolveFailure, RuelleLabError,
                     TreeTooLarge, UnknownExperiment, ZeroFieldWarning)
from .fields import Field, RationalField, gamma, gamma_field
from .julia import (PointSet, bottcher_field, julia_sample,
                    postcritical_approx, quasihyperbolic_weight)
from .lattes import (LattesParams, lattes_invariants, lattes_map,
                     lattes_residuals, normalized_lattes, weierstrass_p)
from .operators import (beltrami_apply, cesaro_average, lp_operator, lp_pull,
                        lp_push, normalized_pullback, ruelle_apply,
                        ruelle_power)
from .quadrature import (Annulus, Complement, Disk, IntegralEstimate,
                         Preimage, Region, WholePlane, duality_residual,
                         integrate, l1_norm, pairing)
from .ratmap import INF, MoebiusTransform, Polynomial, RationalMap, is_inf
from .rng import RandomStream

__all__ = [
    "__version__",
    "Annulus", "Complement", "ConfigError", "CriticalFiberWarning",
    "CriticalOrbit", "DegenerateFixedPoints", "DegenerateLattice", "Disk",
    "EmptyBasis", "ExpansionResidual", "Field", "HigherOrderCritical",
    "INF", "IntegralEstimate", "InvalidExponent", "LattesParams",
    "MassEstimateFailure", "MoebiusTransform", "NoConvergence",
    "NonIntegrable", "NoRepellingFixedPoint", "NotEscaped", "NotPCF",
    "OnBoundary", "PointSet", "Polynomial", "Preimage", "RandomStream",
    "RationalField", "RationalMap", "Region", "ResidueMismatch",
    "RootSolveFailure", "RuelleLabError", "TreeTooLarge",
    "UnknownExperiment", "WholePlane", "ZeroFieldWarning",
    "beltrami_apply", "bottcher_field", "cesaro_average",
    "duality_residual", "gamma", "gamma_field", "integrate", "is_inf",
    "julia_sample", "l1_norm", "lattes_invariants", "lattes_map",
    "lattes_residuals", "lp_operator", "lp_pull", "lp_push",
    "normalized_lattes", "normalized_pullback", "pairing",
    "postcritical_approx", "quasihyperbolic_weight", "ruelle_apply",
    "ruelle_power", "weierstrass_p",
]
