"""Exception types shared across the package."""

from __future__ import annotations


class SlicecutError(Exception):
    """Base class for all package errors."""


class ValidationError(SlicecutError, ValueError):
    """Invalid input data or parameters.

    ``path`` names the offending field for inputs parsed from files
    (e.g. ``"tool.diameter_mm"``).
    """

    def __init__(self, message: str, path: str | None = None):
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path


class GeometryError(SlicecutError, RuntimeError):
    """A geometric operation failed in a way snap-rounding could not resolve.

    ``coords`` carries coordinates useful for reproducing the failure,
    ``segment_index`` the toolpath segment being processed, if any.
    """

    def __init__(self, message: str, coords=None, segment_index: int | None = None):
        if segment_index is not None:
            message = f"segment {segment_index}: {message}"
        super().__init__(message)
        self.coords = coords
        self.segment_index = segment_index


class DegenerateInputError(SlicecutError, ValueError):
    """Inputs are degenerate for the requested computation (e.g. coincident circles)."""


class UnsupportedSceneError(SlicecutError, ValueError):
    """The analytical oracle cannot handle this configuration."""
