"""Frequency grids, per-element optical transfer functions, and the system OTF.

Every optical element is a pure-phase multiplier on a 2-D spatial-frequency
grid.  The system OTF is the element-wise product of the lens and slab
factors, band-limited by the numerical-aperture cutoff and optionally
carrying a primary-spherical-aberration phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import OpticalConfig
from .errors import DimensionError

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class FrequencyGrid:
    """Spatial-frequency coordinates of a width x height DFT grid.

    ``u`` and ``v`` are per-pixel frequency maps of shape (height, width) in
    standard DFT ordering: DC in cell (0, 0), positive frequencies first,
    then the negative branch.  Units are cycles/meter for grids built by
    :func:`make_frequency_grid`.
    """

    width: int
    height: int
    pixel_pitch: float
    u: np.ndarray
    v: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def radius(self) -> np.ndarray:
        """Radial frequency sqrt(u^2 + v^2) per cell."""
        return np.hypot(self.u, self.v)


@dataclass(frozen=True)
class SpectrumField:
    """A complex-valued field sampled on a frequency grid."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise DimensionError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrum field contains non-finite values")


def make_frequency_grid(width: int, height: int, pixel_pitch: float) -> FrequencyGrid:
    """Build the DFT frequency grid for a width x height image.

    The frequency step is 1/(N * pixel_pitch) per axis and the extreme
    frequency magnitude is the Nyquist rate 1/(2 * pixel_pitch).
    """
    if width < 2 or height < 2:
        raise ValueError(f"grid must be at least 2x2, got {width}x{height}")
    if pixel_pitch <= 0:
        raise ValueError(f"pixel_pitch must be positive, got {pixel_pitch}")
    fu = np.fft.fftfreq(width, d=pixel_pitch)
    fv = np.fft.fftfreq(height, d=pixel_pitch)
    u, v = np.meshgrid(fu, fv)
    return FrequencyGrid(width=width, height=height, pixel_pitch=pixel_pitch, u=u, v=v)


def index_frequency_grid(grid: FrequencyGrid) -> FrequencyGrid:
    """Re-express a grid's frequencies in cycles-per-field (DFT index) units.

    The lens/slab phase expressions are dimensionally inhomogeneous when fed
    cycles/meter and alias into noise on realistic grids; evaluated on
    dimensionless index frequencies (u * width * pitch spans -N/2..N/2-1)
    they produce the gentle O(1..10 rad) pupil curvature that actually
    yields depth-faithful images.  The system-OTF assembly uses this view;
    NA masking and depth propagation stay in SI cycles/meter.
    """
    return FrequencyGrid(
        width=grid.width,
        height=grid.height,
        pixel_pitch=grid.pixel_pitch,
        u=grid.u * (grid.width * grid.pixel_pitch),
        v=grid.v * (grid.height * grid.pixel_pitch),
    )


def lens_otf(grid: FrequencyGrid, focal_length: float, lambda_eff: float) -> SpectrumField:
    """Thin-lens transfer factor exp(-i*pi*(u^2+v^2)*lambda_eff/f).

    Pure phase: |value| = 1 everywhere, 1+0i at DC.
    """
    if focal_length <= 0:
        raise ValueError(f"focal_length must be positive, got {focal_length}")
    if lambda_eff <= 0:
        raise ValueError(f"lambda_eff must be positive, got {lambda_eff}")
    phase = -np.pi * (grid.u**2 + grid.v**2) * lambda_eff / focal_length
    return SpectrumField(grid=grid, values=np.exp(1j * phase))


def slab_otf(
    grid: FrequencyGrid, lambda_medium: float, sign: int = 1, scale: float = 1.0
) -> SpectrumField:
    """Slab transfer factor exp(sign * i * 2*pi * lambda_medium * (u^2+v^2) * scale).

    ``sign=+1`` with ``scale=1`` is the coverslip factor exactly as stated
    (the expression is applied numerically in SI units; it is not
    dimensionally homogeneous as printed).  Thickness-scaled slabs (oil,
    sample) pass ``scale = thickness * kappa``.
    """
    if lambda_medium <= 0:
        raise ValueError(f"lambda_medium must be positive, got {lambda_medium}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    phase = sign * 2.0 * np.pi * lambda_medium * (grid.u**2 + grid.v**2) * scale
    return SpectrumField(grid=grid, values=np.exp(1j * phase))


def total_otf(components: list[SpectrumField]) -> SpectrumField:
    """Element-wise product of transfer factors sharing one grid."""
    if not components:
        raise ValueError("total_otf needs at least one component")
    grid = components[0].grid
    values = components[0].values.copy()
    for comp in components[1:]:
        if comp.grid.shape != grid.shape:
            raise DimensionError(
                f"component grid {comp.grid.shape} does not match {grid.shape}"
            )
        values *= comp.values
    return SpectrumField(grid=grid, values=values)


def na_cutoff(config: OpticalConfig) -> float:
    """Highest resolvable spatial frequency NA * n_oil / lambda_vac, cycles/meter."""
    return config.na * config.n_oil / config.lambda_vac


def apply_na_mask(field: SpectrumField, cutoff: float) -> SpectrumField:
    """Zero every cell whose radial frequency exceeds the cutoff."""
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    keep = field.grid.radius() <= cutoff
    return SpectrumField(grid=field.grid, values=np.where(keep, field.values, 0.0 + 0.0j))


def zernike_spherical_phase(grid: FrequencyGrid, cutoff: float) -> np.ndarray:
    """Primary spherical aberration Z4 = sqrt(3)*(2*rho^2 - 1), radians per cell.

    rho is the radial frequency normalized by the NA cutoff and clamped to
    [0, 1]; outside the pupil the phase is pinned at the rim value (those
    cells are zeroed by the NA mask anyway).
    """
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    rho = np.minimum(grid.radius() / cutoff, 1.0)
    return SQRT3 * (2.0 * rho**2 - 1.0)


def apply_aberration(field: SpectrumField, z4: np.ndarray) -> SpectrumField:
    """Multiply a field by the aberration phase exp(i*Z4); magnitudes unchanged."""
    if z4.shape != field.values.shape:
        raise DimensionError(
            f"aberration phase shape {z4.shape} does not match field {field.values.shape}"
        )
    return SpectrumField(grid=field.grid, values=field.values * np.exp(1j * z4))


def assemble_system_otf(
    grid: FrequencyGrid, config: OpticalConfig, aberration: bool = True
) -> SpectrumField:
    """Compose the five-element train, NA-masked and optionally aberrated.

    Train: eyepiece, objective, coverslip, immersion oil, sample medium.
    Lens/slab phases are evaluated on cycles-per-field coordinates (see
    :func:`index_frequency_grid`); the NA cutoff and Z4 use SI frequencies.
    """
    igrid = index_frequency_grid(grid)
    train = [
        lens_otf(igrid, config.f_eye, config.lam_eye),
        lens_otf(igrid, config.f_obj, config.lam_obj),
        slab_otf(igrid, config.lambda_vac / config.n_coverslip, sign=1,
                 scale=config.coverslip_scale),
        slab_otf(igrid, config.lambda_vac / config.n_oil, sign=1,
                 scale=config.t_oil * config.kappa),
        slab_otf(igrid, config.lambda_vac / config.n_sample, sign=1,
                 scale=config.t_sample * config.kappa),
    ]
    h_total = total_otf(train)
    h_total = SpectrumField(grid=grid, values=h_total.values)
    cutoff = na_cutoff(config)
    h_total = apply_na_mask(h_total, cutoff)
    if aberration:
        h_total = apply_aberration(h_total, zernike_spherical_phase(grid, cutoff))
    return h_total
