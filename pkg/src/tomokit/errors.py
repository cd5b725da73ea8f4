"""Exception types shared across the toolkit.

Every numerical failure mode raises a named subclass of ToolkitError so
callers (and the CLI) can map them to diagnostics without string matching.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class GridTooCoarse(ToolkitError):
    """A quadrature or interpolation grid cannot resolve the integrand."""


class GridTooNarrow(ToolkitError):
    """A grid does not span the support required by the requested state."""


class DegenerateFrame(ToolkitError):
    """Frame parameters fall in the excluded band around nu = 0."""


class InsufficientAngles(ToolkitError):
    """Too few projection angles for a stable inversion."""


class RingingDetected(ToolkitError):
    """Back-projection output oscillates beyond the admissible bound."""


class NegativityDetected(ToolkitError):
    """A classical inversion produced significantly negative values."""


class NonHermitianResult(ToolkitError):
    """A reconstructed kernel is measurably non-Hermitian."""


class ComplexResidue(ToolkitError):
    """An analytically real quantity came out with a large imaginary part."""


class NotNormalized(ToolkitError):
    """A distribution integrates too far from one."""


class IntegrationDiverged(ToolkitError):
    """A truncated integral has an unacceptably large tail estimate."""


class SymplecticityLost(ToolkitError):
    """det(Lambda) drifted from one during integration; step too large."""


class TimeMismatch(ToolkitError):
    """Propagator composition with incompatible time intervals."""


class BoundaryOutflow(ToolkitError):
    """Too much probability mass left the grid during evolution."""


class NearNode(ToolkitError):
    """A sample point sits on a node of the distribution being divided by."""


class QuadratureTooCoarse(ToolkitError):
    """Angle grids are below the exactness threshold for reconstruction."""


class IndexOutOfRange(ToolkitError):
    """Angular momentum projection outside [-j, j]."""


class UnknownState(ToolkitError):
    """State descriptor does not name a library state."""
