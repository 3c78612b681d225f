"""Physical constants of the microscope train and their file format.

All lengths are SI meters.  Defaults reproduce the reference oil-immersion
setup: 50 mm objective, 20 mm eyepiece, NA 1.45, 632.8 nm illumination,
oil/coverslip at n = 1.515 and a deionized-water sample at n = 1.33.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class OpticalConfig:
    """Immutable bundle of every physical constant the simulator needs.

    Slab thicknesses are not published for the reference setup; the defaults
    (standard #1.5 coverslip, ~100 um oil film, ~20 um sample chamber) are
    plausible bench values and only enter through the thickness-scaled slab
    phases, which are weak.  ``kappa`` is a dimensionless calibration factor
    on the oil/sample slab phases.  ``coverslip_scale`` optionally rescales
    the coverslip phase, which is otherwise applied exactly as stated
    (numerically in SI units; the printed form carries a unit caveat).
    ``lambda_eff_eye``/``lambda_eff_obj`` override the effective wavelength
    seen by each lens; by default the eyepiece faces air and the objective
    faces immersion oil.
    """

    f_obj: float = 50e-3
    f_eye: float = 20e-3
    na: float = 1.45
    lambda_vac: float = 632.8e-9
    n_oil: float = 1.515
    n_coverslip: float = 1.515
    n_sample: float = 1.33
    t_coverslip: float = 170e-6
    t_oil: float = 100e-6
    t_sample: float = 20e-6
    kappa: float = 1.0
    coverslip_scale: float = 1.0
    lambda_eff_eye: float | None = None
    lambda_eff_obj: float | None = None

    def __post_init__(self) -> None:
        for name in ("f_obj", "f_eye", "lambda_vac", "t_coverslip", "t_oil", "t_sample"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.na <= 0:
            raise ValueError(f"na must be positive, got {self.na}")
        for name in ("n_oil", "n_coverslip", "n_sample"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    @property
    def lam_eye(self) -> float:
        """Effective wavelength at the eyepiece (air side unless overridden)."""
        return self.lambda_eff_eye if self.lambda_eff_eye is not None else self.lambda_vac

    @property
    def lam_obj(self) -> float:
        """Effective wavelength at the objective (immersion-oil side unless overridden)."""
        if self.lambda_eff_obj is not None:
            return self.lambda_eff_obj
        return self.lambda_vac / self.n_oil

    @property
    def lam_sample(self) -> float:
        """Wavelength inside the sample medium; used for depth propagation."""
        return self.lambda_vac / self.n_sample


_FIELD_NAMES = {f.name for f in dataclasses.fields(OpticalConfig)}


def load_optical_config(path: str | Path) -> OpticalConfig:
    """Read an OpticalConfig from a ``key = value`` text file.

    One assignment per line, SI units, ``#`` starts a comment.  Unknown keys
    are rejected so silent typos cannot change the physics.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(text.strip())
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: cannot parse value for {key!r}") from exc
    return OpticalConfig(**values)


def save_optical_config(config: OpticalConfig, path: str | Path) -> None:
    lines = [f"{f.name} = {getattr(config, f.name)!r}"
             for f in dataclasses.fields(OpticalConfig)
             if getattr(config, f.name) is not None]
    Path(path).write_text("\n".join(lines) + "\n")
