"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
numerical/fit/geometry failures exit 3.
"""

from __future__ import annotations


class NanogratingError(Exception):
    """Base class for all package-specific errors."""


class DomainError(NanogratingError, ValueError):
    """A physical quantity is outside its valid domain (e.g. v <= 0)."""


class ConfigurationError(NanogratingError):
    """Missing or invalid configuration: unknown preset, bad key, absent density."""


class ResolutionError(NanogratingError):
    """A detector grid is too coarse to resolve the requested structure."""


class GeometryError(NanogratingError):
    """Degenerate beamline geometry (e.g. free-fall inversion with a
    non-negative denominator)."""


class FitError(NanogratingError):
    """An inverse problem cannot be solved on the given data
    (flat trace, non-overlapping grids, empty search bracket)."""
