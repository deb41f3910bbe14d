"""Exception types shared across the package."""


class BjlabError(Exception):
    """Base class for all bjlab errors."""


class ShapeMismatch(BjlabError):
    """Array shapes do not match the space they are used with."""


class ZeroVector(BjlabError):
    """A nonzero vector was required."""


class ZeroElement(BjlabError):
    """A nonzero space element was required."""


class NotSmooth(BjlabError):
    """Operation needs a Frechet-differentiable inner norm (1 < q < inf)."""


class UnsupportedExponent(BjlabError):
    """Exponent outside the range the operation is defined for."""


class NonFiniteValue(BjlabError):
    """An evaluation produced nan or inf."""


class BadSpec(BjlabError):
    """Construction arguments violate the operator's preconditions."""


class DegenerateDraw(BjlabError):
    """Random draw repeatedly produced a degenerate element."""


class ConfigError(BjlabError):
    """Experiment configuration is invalid; message names the field."""
