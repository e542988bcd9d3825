"""Forward diffraction: scalar Kirchhoff integral over coherently illuminated
slits, closed-form far-field reference, spatial-coherence estimate, and
detector point-spread convolution.

The detector coordinate is the transverse position x' in the detection plane a
distance L2 downstream of the grating; the grating coordinate x runs over the
open slits. Intensities are arbitrary units unless a trace is explicitly
normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import CONSTANTS, BeamlineGeometry, Grating, Molecule, PhysicalConstants, SourceModel
from .domain import de_broglie_wavelength
from .errors import DomainError, ResolutionError

__all__ = [
    "CoherenceResult",
    "DetectorGrid",
    "DiffractionOrder",
    "FarFieldOrders",
    "Trace",
    "coherence",
    "detector_convolve",
    "far_field_orders",
    "fraunhofer_multislit",
    "gaussian_kernel",
    "kirchhoff_pattern",
    "wave_number",
]

NORMALIZATIONS = ("raw", "max-1", "unit-area")


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DetectorGrid:
    """Uniform 1D detector pixel grid.

    ``psf_sigma`` is the Gaussian point-spread sigma of the detection system
    in m (default 3.5 microns).
    """

    x_min: float
    x_max: float
    pixel_pitch: float
    psf_sigma: float = 3.5e-6

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise DomainError(f"need x_max > x_min, got [{self.x_min!r}, {self.x_max!r}]")
        if self.pixel_pitch <= 0.0:
            raise DomainError(f"pixel pitch must be positive, got {self.pixel_pitch!r}")
        if self.psf_sigma < 0.0:
            raise DomainError(f"psf sigma must be non-negative, got {self.psf_sigma!r}")

    @classmethod
    def symmetric(cls, half_span: float, pixel_pitch: float, psf_sigma: float = 3.5e-6) -> "DetectorGrid":
        return cls(-half_span, half_span, pixel_pitch, psf_sigma)

    @property
    def n_pixels(self) -> int:
        span = self.x_max - self.x_min
        return int(math.floor(span / self.pixel_pitch + 1e-9)) + 1

    @property
    def positions(self) -> np.ndarray:
        return self.x_min + self.pixel_pitch * np.arange(self.n_pixels)


@dataclass(frozen=True)
class Trace:
    """A 1D intensity trace on a uniform position grid.

    ``normalization`` records how the intensities are scaled:
    "raw" (engine units), "max-1" (peak scaled to 1), or "unit-area"
    (trapezoid integral scaled to 1).
    """

    positions: np.ndarray
    intensities: np.ndarray
    normalization: str = "raw"

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        inten = np.asarray(self.intensities, dtype=float)
        if pos.ndim != 1 or inten.ndim != 1 or pos.size != inten.size:
            raise DomainError("positions and intensities must be 1D arrays of equal length")
        if pos.size < 2:
            raise DomainError("a trace needs at least two samples")
        if self.normalization not in NORMALIZATIONS:
            raise DomainError(
                f"unknown normalization {self.normalization!r}; expected one of {NORMALIZATIONS}"
            )
        steps = np.diff(pos)
        if np.any(steps <= 0.0):
            raise DomainError("positions must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
            raise DomainError("positions must form a uniform grid")
        # clamp float fuzz, reject genuinely negative data
        floor = -1e-12 * max(float(inten.max(initial=0.0)), 1.0)
        if np.any(inten < floor):
            raise DomainError("intensities must be non-negative")
        inten = np.maximum(inten, 0.0)
        object.__setattr__(self, "positions", _frozen_array(pos))
        object.__setattr__(self, "intensities", _frozen_array(inten))

    def __len__(self) -> int:
        return int(self.positions.size)

    @property
    def pixel_pitch(self) -> float:
        return float(self.positions[1] - self.positions[0])

    def integral(self) -> float:
        """Trapezoid integral of intensity over position."""
        trapezoid = getattr(np, "trapezoid", None) or np.trapz
        return float(trapezoid(self.intensities, self.positions))

    def normalized_to_max(self) -> "Trace":
        peak = float(self.intensities.max())
        if peak <= 0.0:
            raise DomainError("cannot max-normalize an all-zero trace")
        return Trace(self.positions, self.intensities / peak, "max-1")

    def normalized_to_area(self) -> "Trace":
        area = self.integral()
        if area <= 0.0:
            raise DomainError("cannot area-normalize a zero-integral trace")
        return Trace(self.positions, self.intensities / area, "unit-area")


@dataclass(frozen=True)
class CoherenceResult:
    """Transverse coherence at the grating plane."""

    coherence_angle: float             # rad
    coherence_width_at_grating: float  # m
    n_coherent_slits: int              # >= 1


@dataclass(frozen=True)
class DiffractionOrder:
    n: int
    angle: float      # rad
    position: float   # m, in the detection plane


@dataclass(frozen=True)
class FarFieldOrders:
    """Propagating orders plus the indices that went evanescent (n*lambda >= d)."""

    orders: tuple[DiffractionOrder, ...]
    evanescent: tuple[int, ...] = field(default_factory=tuple)

    def position(self, n: int) -> float:
        for order in self.orders:
            if order.n == n:
                return order.position
        raise DomainError(f"order {n} is not propagating")


def wave_number(molecule: Molecule, velocity: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Matter-wave number 2*pi/lambda in rad/m."""
    return 2.0 * math.pi / de_broglie_wavelength(molecule, velocity, constants)


def coherence(
    source: SourceModel,
    geometry: BeamlineGeometry,
    wavelength: float,
    period: float,
    prefactor: float = 1.5,
) -> CoherenceResult:
    """Transverse coherence estimate at the grating.

    coherence angle = prefactor * lambda / source_width, width = angle * L1,
    slit count = floor(width / period) clamped to at least 1.
    """
    if wavelength <= 0.0:
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    if period <= 0.0:
        raise DomainError(f"period must be positive, got {period!r}")
    if prefactor <= 0.0:
        raise DomainError(f"coherence prefactor must be positive, got {prefactor!r}")
    angle = prefactor * wavelength / source.source_width
    width = angle * geometry.L1
    n = max(1, int(math.floor(width / period)))
    return CoherenceResult(
        coherence_angle=angle, coherence_width_at_grating=width, n_coherent_slits=n
    )


def far_field_orders(wavelength: float, period: float, L2: float, n_max: int) -> FarFieldOrders:
    """Grating-equation order positions x_n = L2 * tan(asin(n lambda / d)).

    Orders with n*lambda >= d do not propagate; they are omitted from
    ``orders`` and reported in ``evanescent``.
    """
    if wavelength <= 0.0 or period <= 0.0 or L2 <= 0.0:
        raise DomainError("wavelength, period, and L2 must all be positive")
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max!r}")
    orders: list[DiffractionOrder] = []
    evanescent: list[int] = []
    for n in range(n_max + 1):
        sine = n * wavelength / period
        if sine >= 1.0:
            evanescent.append(n)
            continue
        angle = math.asin(sine)
        orders.append(DiffractionOrder(n=n, angle=angle, position=L2 * math.tan(angle)))
    return FarFieldOrders(orders=tuple(orders), evanescent=tuple(evanescent))


def _slit_centers(n_slits: int, period: float) -> np.ndarray:
    # symmetric about x = 0: n - (N-1)/2 for n = 0..N-1
    return (np.arange(n_slits) - (n_slits - 1) / 2.0) * period


def kirchhoff_pattern(
    grating: Grating,
    k: float,
    L2: float,
    n_slits: int,
    grid: DetectorGrid,
    *,
    window: str = "hard",
    gaussian_window_sigma: float | None = None,
    phase_step: float = 0.2,
    max_block: int = 4_000_000,
) -> Trace:
    """Scalar Kirchhoff diffraction pattern of ``n_slits`` coherently
    illuminated slits of the grating's *effective* width.

    The per-pixel amplitude is the sum over slits of the open-aperture
    integral of exp(i k R(x, x')) with R the exact point-to-point distance
    sqrt(L2^2 + (x - x')^2). Intensity is its squared modulus; the constant
    phase k*L2 is dropped and the residual path excess is evaluated in the
    cancellation-free difference form u^2 / (L2 + sqrt(L2^2 + u^2)).

    The slit integrals use a fixed-step midpoint rule with the step chosen so
    the integrand phase advances at most ``phase_step`` radians per step at
    the worst-case obliquity. Summation order per pixel is fixed (slit-major,
    ascending node), so the result does not depend on pixel chunking.

    window:
        "hard" illuminates all slits equally; "gaussian" applies an amplitude
        taper exp(-c^2 / (2 sigma_w^2)) over slit centers c, with sigma_w =
        ``gaussian_window_sigma`` (default: one quarter of the illuminated
        span).
    """
    if k <= 0.0 or L2 <= 0.0:
        raise DomainError("wave number and L2 must be positive")
    if n_slits < 1:
        raise DomainError(f"need at least one slit, got {n_slits!r}")
    if phase_step <= 0.0:
        raise DomainError(f"phase step must be positive, got {phase_step!r}")
    if window not in ("hard", "gaussian"):
        raise DomainError(f"unknown window {window!r}; expected 'hard' or 'gaussian'")

    s = grating.effective_slit_width
    d = grating.period
    wavelength = 2.0 * math.pi / k

    # the finest transverse feature the pattern can contain
    feature = wavelength * L2 / d if n_slits > 1 else wavelength * L2 / s
    if grid.pixel_pitch > feature / 2.0:
        raise ResolutionError(
            f"pixel pitch {grid.pixel_pitch:.3e} m cannot resolve the "
            f"{feature:.3e} m fringe period; need pitch <= {feature / 2.0:.3e} m"
        )

    positions = grid.positions
    centers = _slit_centers(n_slits, d)

    # worst-case |x - x'| fixes the integration step via the local phase rate
    u_max = float(np.abs(positions).max()) + float(np.abs(centers).max(initial=0.0)) + s / 2.0
    rate = k * u_max / math.hypot(L2, u_max)
    step_limit = phase_step / rate if rate > 0.0 else s
    n_sub = max(4, int(math.ceil(s / step_limit)))
    h = s / n_sub
    base = -s / 2.0 + (np.arange(n_sub) + 0.5) * h

    if window == "gaussian":
        sigma_w = gaussian_window_sigma
        if sigma_w is None:
            sigma_w = max(n_slits * d / 4.0, d)
        if sigma_w <= 0.0:
            raise DomainError(f"gaussian window sigma must be positive, got {sigma_w!r}")
        slit_amps = np.exp(-0.5 * (centers / sigma_w) ** 2)
    else:
        slit_amps = np.ones_like(centers)

    nodes = (centers[:, None] + base[None, :]).ravel()
    node_amps = np.repeat(slit_amps, n_sub)

    amplitude = np.empty(positions.size, dtype=complex)
    chunk = max(1, max_block // nodes.size)
    for start in range(0, positions.size, chunk):
        xp = positions[start : start + chunk]
        u = nodes[None, :] - xp[:, None]
        # path excess sqrt(L2^2+u^2) - L2 without catastrophic cancellation
        delta = u * u / (L2 + np.sqrt(L2 * L2 + u * u))
        amplitude[start : start + chunk] = (np.exp(1j * k * delta) * node_amps).sum(axis=1)
    amplitude *= h

    return Trace(positions, np.abs(amplitude) ** 2, "raw")


def fraunhofer_multislit(
    positions: np.ndarray,
    wavelength: float,
    period: float,
    slit_width: float,
    n_slits: int,
    L2: float,
) -> np.ndarray:
    """Closed-form far-field intensity of an N-slit grating.

    sinc^2 single-slit envelope times the N-slit interference factor
    [sin(N a)/sin(a)]^2 with a = pi d x' / (lambda L2). Peak value N^2 at
    x' = 0. Serves as the independent far-field reference for the integral
    engine.
    """
    x = np.asarray(positions, dtype=float)
    t = x / (wavelength * L2)
    envelope = np.sinc(slit_width * t) ** 2
    alpha = math.pi * period * t
    # reduce to |beta| <= pi/2 where the sinc ratio is well conditioned;
    # the squared ratio is pi-periodic in alpha
    beta = alpha - math.pi * np.round(alpha / math.pi)
    ratio = n_slits * np.sinc(n_slits * beta / math.pi) / np.sinc(beta / math.pi)
    return envelope * ratio**2


def gaussian_kernel(sigma: float, pitch: float) -> np.ndarray:
    """Unit-sum Gaussian kernel sampled on the pixel pitch, truncated at
    +-5 sigma. Returns a length-1 identity kernel when sigma is too small to
    span a pixel."""
    if sigma < 0.0:
        raise DomainError(f"sigma must be non-negative, got {sigma!r}")
    if pitch <= 0.0:
        raise DomainError(f"pitch must be positive, got {pitch!r}")
    radius = int(math.ceil(5.0 * sigma / pitch))
    if sigma == 0.0 or radius == 0:
        return np.ones(1)
    u = (np.arange(2 * radius + 1) - radius) * pitch
    kernel = np.exp(-0.5 * (u / sigma) ** 2)
    return kernel / kernel.sum()


def symmetric_convolve(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Convolve a 1D signal with a unit-sum symmetric kernel under
    edge-mirrored boundary handling, which conserves the total signal exactly
    (every kernel tap falling off an edge is folded back inside)."""
    if kernel.size == 1:
        return values * kernel[0]
    radius = kernel.size // 2
    padded = np.pad(values, radius, mode="symmetric")
    return np.convolve(padded, kernel, mode="valid")


def detector_convolve(trace: Trace, sigma: float) -> Trace:
    """Convolve a trace with the detector's Gaussian point-spread function.

    The kernel is normalized to unit sum and applied with edge-mirrored
    boundaries, so the total intensity is preserved. ``sigma = 0`` returns
    the trace unchanged; negative sigma raises.
    """
    if sigma < 0.0:
        raise DomainError(f"psf sigma must be non-negative, got {sigma!r}")
    kernel = gaussian_kernel(sigma, trace.pixel_pitch)
    if kernel.size == 1:
        return Trace(trace.positions, trace.intensities, trace.normalization)
    blurred = symmetric_convolve(trace.intensities, kernel)
    return Trace(trace.positions, blurred, trace.normalization)
