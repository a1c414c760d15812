"""Exception and warning types shared across the package."""
from __future__ import annotations


class NearfocusError(Exception):
    """Base class for all package-specific errors."""


class PointOnAperture(NearfocusError):
    """An evaluation point coincides with an array element (distance < 1e-9 m)."""


class LengthMismatch(NearfocusError):
    """Two steering vectors of different element counts were combined."""


class DuplicateFocalPoint(NearfocusError):
    """Two focal points of a multi-focal design coincide within 1e-6 m."""


class GridTooSmall(NearfocusError):
    """A grid axis has fewer than 3 samples, too few for peak detection."""


class NoCrossing(NearfocusError):
    """A power profile never falls below half its peak on one side."""

    def __init__(self, side: str) -> None:
        super().__init__(f"no half-power crossing: {side}")
        self.side = side


class IndivisibleTiling(NearfocusError):
    """Tile dimensions do not divide the array dimensions."""


class ShapeMismatch(NearfocusError):
    """A warm start came from an incompatible partition shape."""


class CalibrationDiverged(NearfocusError):
    """The power calibration fixed point failed to converge."""


class ScenarioError(NearfocusError):
    """A scenario file failed validation.

    Carries the source path and a best-effort line number so the CLI can
    print `path:line: message`.
    """

    def __init__(self, message: str, path: str = "<scenario>", line: int = 0) -> None:
        super().__init__(message)
        self.path = path
        self.line = line

    def locate(self) -> str:
        return f"{self.path}:{self.line}: {self}"


class MultiplePeaks(UserWarning):
    """More than one local maximum above 0.9 of the profile peak."""


class WindowWarning(UserWarning):
    """More than 10% of window power sits on boundary cells (truncated plane)."""
