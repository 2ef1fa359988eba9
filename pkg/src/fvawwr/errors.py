"""Exception types shared across the engine.

Grouped here so that curve, model, simulation and scenario modules can
raise them without importing each other.
"""


class FvawwrError(Exception):
    """Base class for all engine errors."""


class NonMonotoneTimes(FvawwrError):
    """Curve pillar times are not strictly increasing."""


class NonPositiveFactor(FvawwrError):
    """A discount/survival factor is zero or negative."""


class OutOfRange(FvawwrError):
    """Time query outside the supported range of a curve."""


class TimeOrder(FvawwrError):
    """Bond maturity precedes the valuation time."""


class NoRoot(FvawwrError):
    """A calibration root-find failed to bracket a solution."""


class PositivityViolation(FvawwrError):
    """Initial intensity state exceeds the market short-end forward."""


class NotSPD(FvawwrError):
    """Correlation matrix is not symmetric positive definite."""


class FellerViolation(FvawwrError):
    """Square-root diffusion parameters violate 2*a*theta > sigma^2."""


class GridMismatch(FvawwrError):
    """Swap payment dates are not a subset of the exposure grid."""


class ShapeMismatch(FvawwrError):
    """Path/date arrays passed to a reduction do not line up."""


class MissingFixing(FvawwrError):
    """Swap valuation inside a period whose start fixing is unknown."""


class UnknownScenario(FvawwrError):
    """Scenario reference does not resolve to a catalog entry or file."""


class ParseError(FvawwrError):
    """Scenario or curve file could not be parsed."""


class SimulationNan(FvawwrError):
    """A simulated state turned NaN; carries path/date indices in args."""
