"""Flat key=value run configuration.

Format: one ``section.key = value`` per line, ``#`` comments, blank lines
ignored. Keys carry their unit in the suffix (``grating.period_nm = 105``)
and are converted to SI on parse; the key set is closed — unknown keys are
configuration errors, not silent no-ops. Later sources win: defaults, then
the config file, then --preset, then --set overrides.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable, Mapping

from .diffraction import DetectorGrid
from .domain import (
    ATOMIC_MASS_KG,
    BeamlineGeometry,
    Grating,
    Molecule,
    SourceModel,
)
from .errors import ConfigurationError
from .gravity import ImageGrid, VelocityDistribution
from .presets import grating_preset, molecule_preset

__all__ = [
    "DEFAULTS",
    "KNOWN_KEYS",
    "RunConfig",
    "load_run_config",
    "parse_config_text",
]

# key -> (type tag, SI scale). Scale applies to float-valued keys only.
KNOWN_KEYS: dict[str, tuple[str, float]] = {
    "molecule.preset": ("str", 1.0),
    "molecule.name": ("str", 1.0),
    "molecule.mass_kg": ("float", 1.0),
    "molecule.mass_u": ("float", ATOMIC_MASS_KG),
    "grating.preset": ("str", 1.0),
    "grating.period_nm": ("float", 1e-9),
    "grating.slit_width_nm": ("float", 1e-9),
    "grating.effective_slit_width_nm": ("float", 1e-9),
    "grating.bar_length_nm": ("float", 1e-9),
    "grating.bar_width_nm": ("float", 1e-9),
    "grating.ribbon_width_nm": ("float", 1e-9),
    "grating.layers": ("int", 1.0),
    "grating.areal_density_kg_m2": ("float", 1.0),
    "geometry.L1_m": ("float", 1.0),
    "geometry.L2_m": ("float", 1.0),
    "geometry.g_m_s2": ("float", 1.0),
    "geometry.y0_m": ("float", 1.0),
    "geometry.y1_m": ("float", 1.0),
    "source.width_um": ("float", 1e-6),
    "source.most_probable_velocity_m_s": ("float", 1.0),
    "source.coherence_prefactor": ("float", 1.0),
    "velocity.kind": ("str", 1.0),
    "velocity.center_m_s": ("float", 1.0),
    "velocity.half_width_m_s": ("float", 1.0),
    "velocity.n_classes": ("int", 1.0),
    "velocity.most_probable_m_s": ("float", 1.0),
    "velocity.v_min_m_s": ("float", 1.0),
    "velocity.v_max_m_s": ("float", 1.0),
    "velocity.list_m_s": ("float_list", 1.0),
    "detector.x_min_um": ("float", 1e-6),
    "detector.x_max_um": ("float", 1e-6),
    "detector.pixel_pitch_um": ("float", 1e-6),
    "detector.psf_sigma_um": ("float", 1e-6),
    "image.y_min_um": ("float", 1e-6),
    "image.y_max_um": ("float", 1e-6),
    "image.pixel_pitch_y_um": ("float", 1e-6),
    "simulate.velocity_m_s": ("float", 1.0),
    "simulate.band": ("bool", 1.0),
    "simulate.n_slits": ("int", 1.0),
    "simulate.n_max": ("int", 1.0),
    "simulate.window": ("str", 1.0),
    "simulate.phase_step_rad": ("float", 1.0),
    "fit.lower_bound_nm": ("float", 1e-9),
    "fit.coarse_step_nm": ("float", 1e-9),
    "fit.tolerance_nm": ("float", 1e-9),
    "fit.measured_csv": ("str", 1.0),
    "fit.target_s_eff_nm": ("float", 1e-9),
    "fit.noise_fraction": ("float", 1.0),
    "fit.y2_um": ("float", 1e-6),
    "limits.sigma_nm": ("float", 1e-9),
    "limits.temperature_K": ("float", 1.0),
    "limits.beam_length_nm": ("float", 1e-9),
    "limits.beam_diameter_nm": ("float", 1e-9),
    "limits.youngs_modulus_GPa": ("float", 1e9),
    "limits.max_order": ("int", 1.0),
    "limits.lambda_ref_nm": ("float", 1e-9),
    "limits.molecule_count": ("float", 1.0),
    "limits.open_area_um2": ("float", 1e-12),
    "limits.footprint_nm2": ("float", 1e-18),
    "render.vertical_stretch": ("float", 1.0),
    "render.image_path": ("str", 1.0),
    "profile.n_stripes": ("int", 1.0),
    "profile.image_path": ("str", 1.0),
}

DEFAULTS: dict[str, str] = {
    "molecule.preset": "pch2",
    "geometry.L1_m": "1.554",
    "geometry.L2_m": "0.586",
    "geometry.g_m_s2": "9.81",
    "geometry.y0_m": "0",
    "geometry.y1_m": "0",
    "source.width_um": "1.5",
    "source.most_probable_velocity_m_s": "180",
    "source.coherence_prefactor": "1.5",
    "velocity.kind": "uniform-band",
    "velocity.center_m_s": "220",
    "velocity.half_width_m_s": "10",
    "detector.x_min_um": "-230",
    "detector.x_max_um": "230",
    "detector.pixel_pitch_um": "0.5",
    "detector.psf_sigma_um": "3.5",
    "image.y_min_um": "-330",
    "image.y_max_um": "-75",
    "image.pixel_pitch_y_um": "2.5",
    "simulate.velocity_m_s": "220",
    "simulate.band": "true",
    "simulate.n_slits": "0",
    "simulate.n_max": "9",
    "simulate.window": "hard",
    "simulate.phase_step_rad": "0.2",
    "fit.lower_bound_nm": "1",
    "fit.coarse_step_nm": "1",
    "fit.tolerance_nm": "0.1",
    "fit.noise_fraction": "0",
    "limits.temperature_K": "300",
    "limits.youngs_modulus_GPa": "1000",
    "limits.max_order": "9",
    "limits.lambda_ref_nm": "780.241",
    "limits.footprint_nm2": "1.7",
    "render.vertical_stretch": "1.0",
    "profile.n_stripes": "20",
}

# velocity-class counts when velocity.n_classes is not set: band analysis
# needs enough classes for smooth order plateaus; beam synthesis resolves the
# full ensemble
BAND_DEFAULT_CLASSES = 21
BEAM_DEFAULT_CLASSES = 200

_TRUE_WORDS = {"true", "yes", "on", "1"}
_FALSE_WORDS = {"false", "no", "off", "0"}


def _convert(key: str, raw: str) -> Any:
    if key not in KNOWN_KEYS:
        raise ConfigurationError(f"unknown configuration key {key!r}")
    kind, scale = KNOWN_KEYS[key]
    text = raw.strip()
    if kind == "str":
        if not text:
            raise ConfigurationError(f"empty value for {key!r}")
        return text
    if kind == "bool":
        lowered = text.lower()
        if lowered in _TRUE_WORDS:
            return True
        if lowered in _FALSE_WORDS:
            return False
        raise ConfigurationError(f"{key!r} expects true/false, got {raw!r}")
    if kind == "int":
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigurationError(f"{key!r} expects an integer, got {raw!r}") from exc
    if kind == "float_list":
        try:
            items = [float(part) * scale for part in text.split(",") if part.strip()]
        except ValueError as exc:
            raise ConfigurationError(
                f"{key!r} expects comma-separated numbers, got {raw!r}"
            ) from exc
        if not items:
            raise ConfigurationError(f"{key!r} expects at least one number")
        return items
    try:
        value = float(text)
    except ValueError as exc:
        raise ConfigurationError(f"{key!r} expects a number, got {raw!r}") from exc
    if value != value or value in (float("inf"), float("-inf")):
        raise ConfigurationError(f"{key!r} must be finite, got {raw!r}")
    return value * scale


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, str]:
    """Parse flat key=value text into a raw string mapping, rejecting
    unknown keys, malformed lines, and duplicates."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigurationError(
                f"{origin}:{lineno}: expected 'key = value', got {stripped!r}"
            )
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"{origin}:{lineno}: unknown configuration key {key!r}")
        if key in raw:
            raise ConfigurationError(f"{origin}:{lineno}: duplicate key {key!r}")
        raw[key] = value.strip()
    return raw


@dataclass(frozen=True)
class RunConfig:
    """Typed, SI-converted configuration with domain-object builders."""

    values: Mapping[str, Any]

    def get(self, key: str, default: Any = None) -> Any:
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"unknown configuration key {key!r}")
        return self.values.get(key, default)

    def require(self, key: str) -> Any:
        value = self.get(key)
        if value is None:
            raise ConfigurationError(f"missing required configuration key {key!r}")
        return value

    def molecule(self) -> Molecule:
        preset_name = self.get("molecule.preset")
        mass = self.get("molecule.mass_kg")
        if mass is None:
            mass = self.get("molecule.mass_u")
        if preset_name is not None:
            base = molecule_preset(preset_name)
            name = self.get("molecule.name", base.name)
            return replace(base, name=name, mass=base.mass if mass is None else mass)
        if mass is None:
            raise ConfigurationError(
                "molecule is undefined: set molecule.preset or a molecule mass"
            )
        return Molecule(name=self.get("molecule.name", "custom"), mass=mass)

    def grating(self) -> Grating:
        overrides = {
            "period": self.get("grating.period_nm"),
            "slit_width": self.get("grating.slit_width_nm"),
            "effective_slit_width": self.get("grating.effective_slit_width_nm"),
            "bar_length": self.get("grating.bar_length_nm"),
            "bar_width": self.get("grating.bar_width_nm"),
            "ribbon_width": self.get("grating.ribbon_width_nm"),
            "layers": self.get("grating.layers"),
            "areal_density": self.get("grating.areal_density_kg_m2"),
        }
        present = {k: v for k, v in overrides.items() if v is not None}
        preset_name = self.get("grating.preset")
        if preset_name is not None:
            base = grating_preset(preset_name)
            if "bar_width" in present and "ribbon_width" not in present:
                # an explicit bar width overrides the preset's rolled-ribbon note
                present.setdefault("ribbon_width", present["bar_width"])
            return replace(base, **present) if present else base
        for required in ("period", "slit_width", "effective_slit_width"):
            if required not in present:
                raise ConfigurationError(
                    "grating is undefined: set grating.preset or at least "
                    "grating.period_nm, grating.slit_width_nm, and "
                    "grating.effective_slit_width_nm"
                )
        present.setdefault("bar_length", 1e-6)
        return Grating(label="custom", **present)

    def geometry(self) -> BeamlineGeometry:
        return BeamlineGeometry.from_segments(
            L1=self.require("geometry.L1_m"),
            L2=self.require("geometry.L2_m"),
            g=self.require("geometry.g_m_s2"),
            y0=self.require("geometry.y0_m"),
            y1=self.require("geometry.y1_m"),
        )

    def source(self) -> SourceModel:
        return SourceModel(
            source_width=self.require("source.width_um"),
            most_probable_velocity=self.require("source.most_probable_velocity_m_s"),
        )

    def detector_grid(self) -> DetectorGrid:
        return DetectorGrid(
            x_min=self.require("detector.x_min_um"),
            x_max=self.require("detector.x_max_um"),
            pixel_pitch=self.require("detector.pixel_pitch_um"),
            psf_sigma=self.require("detector.psf_sigma_um"),
        )

    def image_grid(self) -> ImageGrid:
        return ImageGrid(
            x_min=self.require("detector.x_min_um"),
            x_max=self.require("detector.x_max_um"),
            y_min=self.require("image.y_min_um"),
            y_max=self.require("image.y_max_um"),
            pixel_pitch_x=self.require("detector.pixel_pitch_um"),
            pixel_pitch_y=self.require("image.pixel_pitch_y_um"),
            psf_sigma=self.require("detector.psf_sigma_um"),
        )

    def velocity_distribution(self) -> VelocityDistribution:
        kind = self.require("velocity.kind")
        n_classes = self.get("velocity.n_classes")
        if kind == "uniform-band":
            return VelocityDistribution.uniform_band(
                center=self.require("velocity.center_m_s"),
                half_width=self.require("velocity.half_width_m_s"),
                n_classes=BAND_DEFAULT_CLASSES if n_classes is None else n_classes,
            )
        if kind == "maxwell-boltzmann-beam":
            v_p = self.get(
                "velocity.most_probable_m_s",
                self.require("source.most_probable_velocity_m_s"),
            )
            return VelocityDistribution.maxwell_beam(
                most_probable_velocity=v_p,
                n_classes=BEAM_DEFAULT_CLASSES if n_classes is None else n_classes,
                v_min=self.get("velocity.v_min_m_s"),
                v_max=self.get("velocity.v_max_m_s"),
            )
        if kind == "discrete":
            velocities = self.get("velocity.list_m_s")
            if velocities is None:
                raise ConfigurationError(
                    "velocity.kind = discrete requires velocity.list_m_s"
                )
            return VelocityDistribution.discrete(velocities)
        raise ConfigurationError(f"unknown velocity.kind {kind!r}")


def load_run_config(
    config_path: str | Path | None = None,
    preset: str | None = None,
    overrides: Iterable[str] = (),
) -> RunConfig:
    """Merge defaults, an optional config file, an optional grating preset
    shorthand, and --set KEY=VALUE overrides into a typed RunConfig."""
    raw = dict(DEFAULTS)
    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise ConfigurationError(f"config file {path} does not exist")
        raw.update(parse_config_text(path.read_text(encoding="utf-8"), str(path)))
    if preset is not None:
        raw["grating.preset"] = preset
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"unknown configuration key {key!r}")
        raw[key] = value.strip()
    return RunConfig(values={key: _convert(key, text) for key, text in raw.items()})
