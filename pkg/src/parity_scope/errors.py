"""Exception types shared across the package."""


class ParityScopeError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ParityScopeError):
    """Scenario configuration is missing fields or holds invalid values."""


class DegenerateDenominator(ParityScopeError):
    """A dispersive denominator sits on (or too close to) a resonance."""


class ParityConditionUnsatisfiable(ParityScopeError):
    """chi1*chi2 - chi12^2 <= 0: the parity detunings would be complex."""


class NegativeDiscriminant(ParityScopeError):
    """Target shift sign is incompatible with the branch's denominator sign."""


class SingularCapacitanceMatrix(ParityScopeError):
    """The capacitance-matrix Schur complement is non-positive."""


class ConvergenceFailure(ParityScopeError):
    """A truncation/cutoff convergence probe failed at the configured ceiling."""


class LevelIdentificationFailure(ParityScopeError):
    """Eigenstate overlap with the expected product-state label fell below 0.5."""


class StepTooLarge(ParityScopeError):
    """Integrator step violates the stability margin or the half-step probe."""


class SingularResponseMatrix(ParityScopeError):
    """The 2x2 steady-state response matrix is singular (kappa = 0 edge case)."""


class DegenerateResponse(ParityScopeError):
    """Reflection-coefficient denominator is numerically zero."""


class GridTooCoarse(ParityScopeError):
    """A quadrature/finite-difference grid failed its refinement check."""


class QuadratureNonconvergent(ParityScopeError):
    """Doubling the quadrature resolution moved the result beyond tolerance."""
