"""Gravitational velocity dispersion: free-fall row placement, velocity
inversion from fall height, 2D interferogram synthesis, and the stripe-wise
velocity profile of a synthesized or measured image.

Vertical coordinates are heights in a common frame, positive up. A molecule
of forward speed v passing through the source (height y0, distance 0) and the
grating (height y1, distance L1) lands on the detector (distance L) at

    y2 = y0 + (y1 - y0) * (L / L1) + A / v^2,   A = g (L L1 - L^2) / 2 < 0,

i.e. on the extrapolated source-grating line, lowered by the free-fall term.
Inverting this relation for v is exactly the velocity fit used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diffraction import (
    DetectorGrid,
    Trace,
    coherence,
    gaussian_kernel,
    kirchhoff_pattern,
    symmetric_convolve,
    wave_number,
)
from .domain import CONSTANTS, BeamlineGeometry, Grating, Molecule, PhysicalConstants, SourceModel
from .domain import de_broglie_wavelength
from .errors import DomainError, GeometryError

__all__ = [
    "ImageGrid",
    "Interferogram",
    "StripeProfile",
    "StripeVelocity",
    "SynthesisResult",
    "VelocityDistribution",
    "fall_position",
    "fit_velocity",
    "stripe_velocity_profile",
    "synthesize_image",
]

DISTRIBUTION_KINDS = ("maxwell-boltzmann-beam", "uniform-band", "discrete")

# velocity range over which image synthesis is validated
VELOCITY_SUPPORT = (50.0, 1000.0)


def _ballistic_coefficient(geometry: BeamlineGeometry) -> float:
    return geometry.g * (geometry.L * geometry.L1 - geometry.L**2) / 2.0


@dataclass(frozen=True)
class VelocityDistribution:
    """A forward-speed ensemble discretized into weighted classes.

    ``weights`` are normalized to unit sum. Use the classmethod constructors;
    the generic constructor validates whatever classes it is given.
    """

    kind: str
    velocities: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in DISTRIBUTION_KINDS:
            raise DomainError(
                f"unknown distribution kind {self.kind!r}; expected one of {DISTRIBUTION_KINDS}"
            )
        v = np.asarray(self.velocities, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if v.ndim != 1 or w.ndim != 1 or v.size != w.size or v.size == 0:
            raise DomainError("velocities and weights must be 1D arrays of equal, non-zero length")
        if np.any(v <= 0.0):
            raise DomainError("all velocity classes must be positive")
        if np.any(w < 0.0):
            raise DomainError("weights must be non-negative")
        total = float(w.sum())
        if total <= 0.0:
            raise DomainError("at least one weight must be positive")
        v_arr = np.array(v, copy=True)
        w_arr = np.array(w / total, copy=True)
        v_arr.flags.writeable = False
        w_arr.flags.writeable = False
        object.__setattr__(self, "velocities", v_arr)
        object.__setattr__(self, "weights", w_arr)

    def __len__(self) -> int:
        return int(self.velocities.size)

    @classmethod
    def maxwell_beam(
        cls,
        most_probable_velocity: float,
        n_classes: int = 200,
        v_min: float | None = None,
        v_max: float | None = None,
    ) -> "VelocityDistribution":
        """Effusive-beam weighting w(v) ~ v^3 exp(-v^2 / v_p^2).

        v_p is the thermal scale parameter; the beam-flux mode sits at
        sqrt(3/2) v_p. Classes are uniform over [v_p/3, 3 v_p] unless
        other bounds are given.
        """
        if most_probable_velocity <= 0.0:
            raise DomainError("most probable velocity must be positive")
        if n_classes < 1:
            raise DomainError("need at least one velocity class")
        lo = most_probable_velocity / 3.0 if v_min is None else v_min
        hi = 3.0 * most_probable_velocity if v_max is None else v_max
        if not 0.0 < lo < hi:
            raise DomainError(f"need 0 < v_min < v_max, got [{lo!r}, {hi!r}]")
        v = np.linspace(lo, hi, n_classes) if n_classes > 1 else np.array([(lo + hi) / 2.0])
        w = v**3 * np.exp(-((v / most_probable_velocity) ** 2))
        return cls("maxwell-boltzmann-beam", v, w)

    @classmethod
    def uniform_band(cls, center: float, half_width: float, n_classes: int = 5) -> "VelocityDistribution":
        """Equal-weight classes spread uniformly over center +- half_width."""
        if center <= 0.0:
            raise DomainError("band center must be positive")
        if half_width < 0.0 or half_width >= center:
            raise DomainError("band half-width must satisfy 0 <= half_width < center")
        if n_classes < 1:
            raise DomainError("need at least one velocity class")
        if half_width == 0.0 or n_classes == 1:
            v = np.array([center])
        else:
            v = np.linspace(center - half_width, center + half_width, n_classes)
        return cls("uniform-band", v, np.ones_like(v))

    @classmethod
    def discrete(cls, velocities, weights=None) -> "VelocityDistribution":
        v = np.asarray(velocities, dtype=float)
        w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float)
        return cls("discrete", v, w)


@dataclass(frozen=True)
class ImageGrid:
    """Uniform 2D pixel grid for interferogram synthesis, y positive up."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    pixel_pitch_x: float
    pixel_pitch_y: float
    psf_sigma: float = 3.5e-6

    def __post_init__(self) -> None:
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise DomainError("image grid needs x_max > x_min and y_max > y_min")
        if self.pixel_pitch_x <= 0.0 or self.pixel_pitch_y <= 0.0:
            raise DomainError("pixel pitches must be positive")
        if self.psf_sigma < 0.0:
            raise DomainError("psf sigma must be non-negative")

    @property
    def nx(self) -> int:
        return int(math.floor((self.x_max - self.x_min) / self.pixel_pitch_x + 1e-9)) + 1

    @property
    def ny(self) -> int:
        return int(math.floor((self.y_max - self.y_min) / self.pixel_pitch_y + 1e-9)) + 1

    @property
    def x_positions(self) -> np.ndarray:
        return self.x_min + self.pixel_pitch_x * np.arange(self.nx)

    @property
    def y_positions(self) -> np.ndarray:
        return self.y_min + self.pixel_pitch_y * np.arange(self.ny)

    def detector_grid(self) -> DetectorGrid:
        return DetectorGrid(self.x_min, self.x_max, self.pixel_pitch_x, self.psf_sigma)


@dataclass(frozen=True)
class Interferogram:
    """A 2D intensity image. Row index increases with height: values[iy, ix]
    sits at (x_min + ix * pitch_x, y_min + iy * pitch_y); the orientation tag
    records this up-positive convention."""

    values: np.ndarray
    pixel_pitch_x: float
    pixel_pitch_y: float
    x_min: float
    y_min: float
    orientation: str = "up-positive"

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError("interferogram values must be a non-empty 2D array")
        if self.pixel_pitch_x <= 0.0 or self.pixel_pitch_y <= 0.0:
            raise DomainError("pixel pitches must be positive")
        if self.orientation != "up-positive":
            raise DomainError(f"unsupported orientation {self.orientation!r}")
        if np.any(arr < 0.0):
            raise DomainError("interferogram intensities must be non-negative")
        frozen = np.array(arr, copy=True)
        frozen.flags.writeable = False
        object.__setattr__(self, "values", frozen)

    @property
    def ny(self) -> int:
        return int(self.values.shape[0])

    @property
    def nx(self) -> int:
        return int(self.values.shape[1])

    @property
    def x_positions(self) -> np.ndarray:
        return self.x_min + self.pixel_pitch_x * np.arange(self.nx)

    @property
    def y_positions(self) -> np.ndarray:
        return self.y_min + self.pixel_pitch_y * np.arange(self.ny)

    @property
    def total(self) -> float:
        return float(self.values.sum())


def fall_position(velocity: float, geometry: BeamlineGeometry) -> float:
    """Detector height of a molecule that passed through source and grating.

    Strictly increasing in velocity; approaches the extrapolated
    source-grating line as v -> infinity (equal to y0 for a level beamline).
    """
    if not (velocity > 0.0 and math.isfinite(velocity)):
        raise DomainError(f"velocity must be positive and finite, got {velocity!r}")
    line = geometry.y0 + (geometry.y1 - geometry.y0) * (geometry.L / geometry.L1)
    return line + _ballistic_coefficient(geometry) / velocity**2


def fit_velocity(y2: float, y0: float, y1: float, geometry: BeamlineGeometry) -> float:
    """Forward speed from the measured fall height y2 given source and
    grating heights y0, y1.

        v = sqrt[ g (L L1 - L^2) / 2 / (y2 - y0 - (y1 - y0) L / L1) ]

    The denominator must be strictly negative (the molecule lands *below* the
    extrapolated source-grating line); anything else is a degenerate geometry.
    Invariant under a common offset of y0, y1, y2.
    """
    coefficient = _ballistic_coefficient(geometry)
    denominator = y2 - y0 - (y1 - y0) * (geometry.L / geometry.L1)
    if denominator >= 0.0:
        raise GeometryError(
            "fall-height denominator must be strictly negative "
            f"(got {denominator!r}); the detection point must lie below the "
            "extrapolated source-grating line"
        )
    return math.sqrt(coefficient / denominator)


@dataclass(frozen=True)
class SynthesisResult:
    """Synthesized interferogram plus the clipping report: velocity classes
    whose rows fell outside the grid, and how much weight they carried."""

    image: Interferogram
    clipped_velocities: tuple[float, ...]
    clipped_weight: float
    n_classes: int


def _blur_2d(values: np.ndarray, sigma_x_px: float, sigma_y_px: float) -> np.ndarray:
    # separable Gaussian with edge-mirrored boundaries: conserves total mass
    out = values
    if sigma_x_px > 0.0:
        kx = gaussian_kernel(sigma_x_px, 1.0)
        if kx.size > 1:
            out = np.apply_along_axis(symmetric_convolve, 1, out, kx)
    if sigma_y_px > 0.0:
        ky = gaussian_kernel(sigma_y_px, 1.0)
        if ky.size > 1:
            out = np.apply_along_axis(symmetric_convolve, 0, out, ky)
    return out


def synthesize_image(
    distribution: VelocityDistribution,
    grating: Grating,
    source: SourceModel,
    geometry: BeamlineGeometry,
    grid: ImageGrid,
    molecule: Molecule,
    *,
    coherence_prefactor: float = 1.5,
    phase_step: float = 0.2,
    window: str = "hard",
    constants: PhysicalConstants = CONSTANTS,
) -> SynthesisResult:
    """Incoherent sum of per-velocity-class diffraction rows under gravity.

    Each class contributes its Kirchhoff pattern (normalized to unit pixel
    sum, then scaled by the class weight) at the fall height of its velocity,
    split linearly between the two adjacent pixel rows. Classes whose rows
    fall outside the grid are clipped and reported. The accumulated image is
    finally blurred with the detection Gaussian along both axes.
    """
    v_lo = float(distribution.velocities.min())
    v_hi = float(distribution.velocities.max())
    if v_lo < VELOCITY_SUPPORT[0] or v_hi > VELOCITY_SUPPORT[1]:
        raise DomainError(
            f"velocity support [{v_lo!r}, {v_hi!r}] m/s outside the validated "
            f"synthesis range {VELOCITY_SUPPORT}"
        )

    x_grid = grid.detector_grid()
    values = np.zeros((grid.ny, grid.nx))
    clipped_v: list[float] = []
    clipped_w = 0.0

    for v, w in zip(distribution.velocities, distribution.weights):
        if w == 0.0:
            continue
        wavelength = de_broglie_wavelength(molecule, float(v), constants)
        k = 2.0 * math.pi / wavelength
        coh = coherence(source, geometry, wavelength, grating.period, coherence_prefactor)
        trace = kirchhoff_pattern(
            grating, k, geometry.L2, coh.n_coherent_slits, x_grid,
            window=window, phase_step=phase_step,
        )
        row = trace.intensities / trace.intensities.sum()

        y2 = fall_position(float(v), geometry)
        f = (y2 - grid.y_min) / grid.pixel_pitch_y
        i0 = math.floor(f)
        frac = f - i0
        placed = 0.0
        for idx, share in ((i0, 1.0 - frac), (i0 + 1, frac)):
            if share <= 0.0:
                continue
            if 0 <= idx < grid.ny:
                values[idx] += w * share * row
                placed += share
        if placed < 1.0 - 1e-12:
            clipped_v.append(float(v))
            clipped_w += w * (1.0 - placed)

    values = _blur_2d(
        values,
        grid.psf_sigma / grid.pixel_pitch_x,
        grid.psf_sigma / grid.pixel_pitch_y,
    )
    image = Interferogram(values, grid.pixel_pitch_x, grid.pixel_pitch_y, grid.x_min, grid.y_min)
    return SynthesisResult(
        image=image,
        clipped_velocities=tuple(clipped_v),
        clipped_weight=clipped_w,
        n_classes=len(distribution),
    )


@dataclass(frozen=True)
class StripeVelocity:
    y: float          # stripe center height, m
    velocity: float   # m/s from the first-order fringe offset
    residual: float   # m/s against the global fall-curve fit


@dataclass(frozen=True)
class StripeProfile:
    """Stripe-wise velocity profile with the global fall-curve fit.

    ``intercept`` is the fitted height of the extrapolated source-grating
    line at the detector (the single identifiable combination of y0 and y1);
    ``rms_relative`` is the rms of residual/velocity over the used stripes.
    Stripes without a detectable fringe pair are listed in ``skipped``.
    """

    stripes: tuple[StripeVelocity, ...]
    skipped: tuple[int, ...]
    intercept: float
    rms_relative: float
    underdetermined: bool


def _parabolic_peak(x: np.ndarray, y: np.ndarray, i: int) -> float:
    """Vertex position of the parabola through points i-1, i, i+1 (clamped to
    the center pixel's neighborhood)."""
    if i <= 0 or i >= y.size - 1:
        return float(x[i])
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom >= 0.0:
        return float(x[i])
    shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
    shift = max(-0.5, min(0.5, shift))
    return float(x[i] + shift * (x[1] - x[0]))


def _local_maxima(y: np.ndarray) -> np.ndarray:
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    return np.nonzero(interior)[0] + 1


def stripe_velocity_profile(
    image: Interferogram,
    geometry: BeamlineGeometry,
    period: float,
    molecule: Molecule,
    *,
    n_stripes: int = 20,
    min_peak_fraction: float = 0.02,
    min_stripe_signal: float = 1e-3,
    psf_sigma: float = 3.5e-6,
    constants: PhysicalConstants = CONSTANTS,
) -> StripeProfile:
    """Velocity vs height from the first-order fringe spacing of horizontal
    stripes, followed by a global fall-curve fit.

    The image is cut into ``n_stripes`` equal row bands. Per stripe, columns
    are summed into a trace; the zeroth-order peak is its maximum, the
    first-order peak the strongest local maximum beyond the zeroth-order
    exclusion zone (2.5 detection sigmas, at least 3 pixels). The offset
    x1 - x0 gives the diffraction angle, hence the wavelength and velocity.
    Stripes with too little signal or no detectable first-order peak are
    skipped and reported.
    """
    if period <= 0.0:
        raise DomainError(f"period must be positive, got {period!r}")
    if n_stripes < 1:
        raise DomainError(f"need at least one stripe, got {n_stripes!r}")
    if image.ny < n_stripes:
        raise DomainError(f"image has {image.ny} rows, fewer than {n_stripes} stripes")

    x = image.x_positions
    y_rows = image.y_positions
    pitch = image.pixel_pitch_x
    exclusion = max(2.5 * psf_sigma, 3.0 * pitch)
    image_peak = float(image.values.max())

    bounds = np.linspace(0, image.ny, n_stripes + 1).astype(int)
    stripes: list[StripeVelocity] = []
    raw: list[tuple[float, float]] = []
    skipped: list[int] = []

    for idx in range(n_stripes):
        lo, hi = bounds[idx], bounds[idx + 1]
        if hi <= lo:
            skipped.append(idx)
            continue
        profile = image.values[lo:hi].sum(axis=0)
        if profile.max() <= min_stripe_signal * image_peak or profile.max() <= 0.0:
            skipped.append(idx)
            continue
        i0 = int(np.argmax(profile))
        x0 = _parabolic_peak(x, profile, i0)
        peaks = _local_maxima(profile)
        peaks = peaks[(x[peaks] > x0 + exclusion)]
        peaks = peaks[profile[peaks] >= min_peak_fraction * profile[i0]]
        if peaks.size == 0:
            skipped.append(idx)
            continue
        i1 = int(peaks[np.argmax(profile[peaks])])
        x1 = _parabolic_peak(x, profile, i1)
        angle = math.atan2(x1 - x0, geometry.L2)
        wavelength = period * math.sin(angle)
        if wavelength <= 0.0:
            skipped.append(idx)
            continue
        velocity = constants.h / (molecule.mass * wavelength)
        y_center = float(y_rows[lo : hi].mean())
        raw.append((y_center, velocity))

    coefficient = _ballistic_coefficient(geometry)
    distinct_heights = len({round(yv[0], 12) for yv in raw})
    underdetermined = distinct_heights < 2

    if raw and not underdetermined:
        ys = np.array([p[0] for p in raw])
        vs = np.array([p[1] for p in raw])
        # exact least squares of y = intercept + A / v^2
        intercept = float(np.mean(ys - coefficient / vs**2))
        with np.errstate(invalid="ignore", divide="ignore"):
            denom = ys - intercept
            v_fit = np.where(denom < 0.0, np.sqrt(coefficient / np.where(denom < 0, denom, -1.0)), np.nan)
        residuals = vs - v_fit
        ok = np.isfinite(residuals)
        rms_relative = float(np.sqrt(np.mean((residuals[ok] / vs[ok]) ** 2))) if ok.any() else math.nan
        for (y_c, v), r in zip(raw, residuals):
            stripes.append(StripeVelocity(y=y_c, velocity=v, residual=float(r) if math.isfinite(r) else math.nan))
    else:
        intercept = math.nan
        rms_relative = math.nan
        for y_c, v in raw:
            stripes.append(StripeVelocity(y=y_c, velocity=v, residual=math.nan))

    return StripeProfile(
        stripes=tuple(stripes),
        skipped=tuple(skipped),
        intercept=intercept,
        rms_relative=rms_relative,
        underdetermined=underdetermined,
    )
