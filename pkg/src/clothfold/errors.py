"""Exception types shared across the package."""


class ClothfoldError(Exception):
    """Base class for all errors raised by clothfold."""


class ValidationError(ClothfoldError, ValueError):
    """An input violates a documented invariant."""


class ParseError(ClothfoldError, ValueError):
    """Malformed serialized input."""


class FormatError(ClothfoldError, ValueError):
    """A binary heatmap pair is inconsistent with its header."""


class UnresolvableLocationError(ClothfoldError):
    """The pickers agree on neither axis for a pick action."""


class TemplateError(ClothfoldError, ValueError):
    """A template uses a placeholder outside its family's allowed set."""


class ProjectionError(ClothfoldError, ValueError):
    """A point lies at or behind the camera plane."""


class NoValidCameraError(ClothfoldError):
    """No sampled camera kept every annotation point inside the image."""


class NoPeakError(ClothfoldError, ValueError):
    """Argmax requested on an all-zero heatmap."""


class NormalizationError(ClothfoldError, ValueError):
    """A heatmap with zero mass cannot be turned into a distribution."""


class DistanceError(ClothfoldError, ValueError):
    """Distance to an empty mask is undefined."""
