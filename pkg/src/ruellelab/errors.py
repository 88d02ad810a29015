"""Exception and warning types shared across the package."""


class RuelleLabError(Exception):
    """Base class for all package errors."""


class RootSolveFailure(RuelleLabError):
    """Simultaneous root iteration failed to converge."""


class DegenerateFixedPoints(RuelleLabError):
    """Fewer than three distinct fixed points available for normalization."""


class DegenerateLattice(RuelleLabError):
    """Weierstrass invariants with (numerically) vanishing discriminant."""


class TreeTooLarge(RuelleLabError):
    """Requested backward tree exceeds the configured node cap."""


class NonIntegrable(RuelleLabError):
    """Integrand decays too slowly for an unbounded region."""


class NotEscaped(RuelleLabError):
    """Orbit failed to reach the escape radius within the iteration cap."""


class NoRepellingFixedPoint(RuelleLabError):
    """All fixed points have multiplier of modulus at most one."""


class NotPCF(RuelleLabError):
    """Map is not (numerically) postcritically finite."""


class EmptyBasis(NotPCF):
    """Every candidate basis element degenerates to the zero function."""


class ExpansionResidual(RuelleLabError):
    """Reconstruction of a pushed-forward field from its expansion failed."""


class HigherOrderCritical(RuelleLabError):
    """Critical point of local degree greater than two."""


class ResidueMismatch(RuelleLabError):
    """Analytic and contour residue extractions disagree."""


class NoConvergence(RuelleLabError):
    """Iterative eigensolve did not converge."""


class InvalidExponent(RuelleLabError):
    """L_p operator requested with p <= 1."""


class OnBoundary(RuelleLabError):
    """Query point is (numerically) on the reference point set."""


class CriticalOrbit(RuelleLabError):
    """Forward orbit hits a critical point."""


class MassEstimateFailure(RuelleLabError):
    """Normalizing-constant estimate too noisy to trust."""


class UnknownExperiment(RuelleLabError):
    """Experiment name not present in the registry."""


class ConfigError(RuelleLabError):
    """Malformed or unknown keys in an experiment configuration."""


class CriticalFiberWarning(UserWarning):
    """Fiber base point is close to a critical value; roots may collide."""


class ZeroFieldWarning(UserWarning):
    """Constructed field is identically zero."""
