"""Exception hierarchy.

Input/configuration problems derive from :class:`ConfigError` (CLI exit code 2);
everything that signals a violated numerical precondition derives from
:class:`NumericalError` (CLI exit code 3).
"""


class QdispError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(QdispError, ValueError):
    """Invalid parameters or malformed configuration."""


class TooFewSamples(ConfigError):
    pass


class NumericalError(QdispError):
    """A numerical precondition does not hold for the given input."""


class DegenerateInput(NumericalError):
    """Direction-dependent quantity requested where it is undefined (massless Dirac at k = 0)."""


class OffShell(NumericalError):
    """Matrix under a square root has a significantly negative eigenvalue."""


class SingularMatrix(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    """Packet bandwidth exceeds what the grid can represent."""


class AliasRisk(NumericalError):
    """Field carries spectral mass too close to the Nyquist limit."""


class NotNormalized(NumericalError):
    pass


class NormalizationFailure(NumericalError):
    pass


class DegenerateState(NumericalError):
    """Exchange (anti)symmetrization annihilated the two-particle state."""
