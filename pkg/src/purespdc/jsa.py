"""Joint spectral amplitudes f(ws, wi) = alpha(ws + wi) * phi(ws, wi).

Frequencies are angular (rad/s); wavenumbers rad/um; crystal length is given
in mm and converted to um where it meets a wavenumber.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dispersion import OMEGA_UM, dk_domega, omega_from_um, um_from_omega, wavenumber
from .gvm import TYPE_II, ProcessConvention, degenerate_poling_period
from .registry import CrystalRecord, WavelengthRangeError

MIN_POINTS = 16
BOUNDARY_FRACTION = 1e-3
# half-width of the pump strip, in pump sigmas
PUMP_SIGMAS = 3.0
# phase-matching strip half-width: 6 full sinc main lobes (each 4*pi/L wide in dk)
PM_LOBES = 6.0
GROW = 1.25
MAX_GROWTH_STEPS = 12


class GridError(ValueError):
    """A frequency grid cannot be built inside the crystal's validity window."""


@dataclass(frozen=True)
class PumpSpec:
    center_nm: float
    fwhm_nm: float  # FWHM of the intensity spectrum
    shape: str = "gaussian"

    def __post_init__(self):
        if not self.fwhm_nm > 0:
            raise ValueError(f"pump bandwidth must be positive, got {self.fwhm_nm}")
        if self.shape != "gaussian":
            raise ValueError(f"unsupported pump shape {self.shape!r}")

    @property
    def omega0(self) -> float:
        return OMEGA_UM / (self.center_nm * 1e-3)

    @property
    def fwhm_omega(self) -> float:
        lam_m = self.center_nm * 1e-9
        return OMEGA_UM * 1e-6 * self.fwhm_nm * 1e-9 / lam_m**2

    @property
    def sigma(self) -> float:
        """Amplitude-envelope sigma in rad/s such that |alpha|^2 has FWHM fwhm_omega."""
        return self.fwhm_omega / (2.0 * math.sqrt(math.log(2.0)))


@dataclass(frozen=True)
class PhaseMatchSpec:
    crystal: CrystalRecord
    length_mm: float
    period_um: float
    convention: ProcessConvention = TYPE_II
    include_pm_phase: bool = True
    qpm_sign: int = 1  # which grating harmonic (+/- 2*pi/period) compensates the mismatch

    def __post_init__(self):
        if not self.length_mm > 0:
            raise ValueError(f"crystal length must be positive, got {self.length_mm}")
        if not self.period_um > 0:
            raise ValueError(f"poling period must be positive, got {self.period_um}")
        if self.qpm_sign not in (-1, 1):
            raise ValueError("qpm_sign must be +1 or -1")

    @classmethod
    def degenerate(cls, crystal: CrystalRecord, lambda_nm: float, length_mm: float,
                   convention: ProcessConvention = TYPE_II, **kw) -> "PhaseMatchSpec":
        """Poling period chosen to phase match degenerate SPDC at ``lambda_nm``."""
        qpm = degenerate_poling_period(crystal, lambda_nm, convention)
        return cls(crystal, length_mm, qpm.period_um, convention,
                   qpm_sign=qpm.mismatch_sign or 1, **kw)

    @property
    def grating_k(self) -> float:
        return self.qpm_sign * 2.0 * np.pi / self.period_um


@dataclass(frozen=True)
class FrequencyGrid:
    signal: np.ndarray  # rad/s, uniform
    idler: np.ndarray

    def __post_init__(self):
        for name in ("signal", "idler"):
            ax = np.asarray(getattr(self, name), dtype=float)
            if ax.ndim != 1 or ax.size < MIN_POINTS:
                raise ValueError(f"{name} axis needs at least {MIN_POINTS} points")
            if not np.all(np.diff(ax) > 0):
                raise ValueError(f"{name} axis must be strictly increasing")
            ax.setflags(write=False)
            object.__setattr__(self, name, ax)

    @classmethod
    def square(cls, center: float, span: float, n: int) -> "FrequencyGrid":
        if n < MIN_POINTS:
            raise ValueError(f"grid needs at least {MIN_POINTS} points per axis, got {n}")
        if not span > 0:
            raise ValueError("grid span must be positive")
        ax = np.linspace(center - span / 2, center + span / 2, n)
        return cls(ax, ax.copy())

    @property
    def n(self) -> int:
        return self.signal.size

    @property
    def step(self) -> tuple[float, float]:
        return (float(self.signal[1] - self.signal[0]), float(self.idler[1] - self.idler[0]))

    @property
    def is_degenerate(self) -> bool:
        return self.signal.shape == self.idler.shape and np.array_equal(self.signal, self.idler)

    def signal_nm(self) -> np.ndarray:
        return um_from_omega(self.signal) * 1e3

    def idler_nm(self) -> np.ndarray:
        return um_from_omega(self.idler) * 1e3

    def meta(self) -> dict:
        return {
            "points": self.n,
            "signal_center_rad_s": float(self.signal.mean()),
            "signal_span_rad_s": float(self.signal[-1] - self.signal[0]),
            "idler_center_rad_s": float(self.idler.mean()),
            "idler_span_rad_s": float(self.idler[-1] - self.idler[0]),
        }


@dataclass(frozen=True)
class JointAmplitude:
    grid: FrequencyGrid
    values: np.ndarray  # values[i, j] = f(signal[i], idler[j]), unit Frobenius norm
    meta: dict = field(default_factory=dict)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def pump_envelope(pump: PumpSpec, omega):
    return np.exp(-np.square(np.asarray(omega, dtype=float) - pump.omega0) / (2.0 * pump.sigma**2))


def sinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)


def phase_mismatch(pm: PhaseMatchSpec, ws, wi):
    """k_p(ws+wi) - k_s(ws) - k_i(wi) - grating, in rad/um."""
    ws = np.asarray(ws, dtype=float)
    wi = np.asarray(wi, dtype=float)
    conv = pm.convention
    rec = pm.crystal
    kp = wavenumber(rec, conv.pump_axis, um_from_omega(ws + wi))
    ks = wavenumber(rec, conv.signal_axis, um_from_omega(ws))
    ki = wavenumber(rec, conv.idler_axis, um_from_omega(wi))
    return kp - ks - ki - pm.grating_k


def phase_matching_function(pm: PhaseMatchSpec, ws, wi):
    x = phase_mismatch(pm, ws, wi) * (pm.length_mm * 1e3) / 2.0
    phi = sinc(x).astype(complex)
    if pm.include_pm_phase:
        phi = phi * np.exp(1j * x)
    return phi


def _fill(pump: PumpSpec, pm: PhaseMatchSpec, grid: FrequencyGrid) -> np.ndarray:
    ws = grid.signal[:, None]
    wi = grid.idler[None, :]
    f = pump_envelope(pump, ws + wi) * phase_matching_function(pm, ws, wi)
    # numpy's pairwise summation keeps the relative error near 1e-16 here
    norm = math.sqrt(float(np.sum(f.real**2 + f.imag**2)))
    if not norm > 0 or not math.isfinite(norm):
        raise GridError("joint amplitude vanishes on the grid")
    return f / norm


def _meta(pump: PumpSpec, pm: PhaseMatchSpec) -> dict:
    return {
        "crystal": pm.crystal.name,
        "length_mm": pm.length_mm,
        "period_um": pm.period_um,
        "qpm_sign": pm.qpm_sign,
        "include_pm_phase": pm.include_pm_phase,
        "pump_center_nm": pump.center_nm,
        "pump_fwhm_nm": pump.fwhm_nm,
    }


def compute_jsa(pump: PumpSpec, pm: PhaseMatchSpec, grid: FrequencyGrid) -> JointAmplitude:
    try:
        values = _fill(pump, pm, grid)
    except WavelengthRangeError as exc:
        raise GridError(f"grid leaves the validity range: {exc}") from exc
    return JointAmplitude(grid, values, _meta(pump, pm))


def _boundary_ratio(values: np.ndarray) -> float:
    jsi = np.abs(values) ** 2
    edge = max(jsi[0].max(), jsi[-1].max(), jsi[:, 0].max(), jsi[:, -1].max())
    return float(edge / jsi.max())


def _check_grid_range(pm: PhaseMatchSpec, center: float, half: float) -> None:
    lo, hi = pm.crystal.validity_range
    # pump spans twice the per-axis offset
    checks = [
        (center - half, center + half),
        (2 * center - 2 * half, 2 * center + 2 * half),
    ]
    for w_lo, w_hi in checks:
        lam_short, lam_long = um_from_omega(w_hi), um_from_omega(w_lo) if w_lo > 0 else np.inf
        if lam_short < lo or lam_long > hi:
            raise GridError(
                f"{pm.crystal.name}: grid needs wavelengths {lam_short:.4f}-{lam_long:.4f} um, "
                f"outside validity [{lo}, {hi}] um"
            )


def initial_half_span(pump: PumpSpec, pm: PhaseMatchSpec, lambda_nm: float) -> float:
    """Per-axis half-span (rad/s) covering the pump strip and the phase-matching strip.

    With a = k_p' - k_s' and b = k_p' - k_i' at degeneracy, the region
    |ds + di| <= U (pump) and |a*ds + b*di| <= V (phase matching) is a
    parallelogram whose extents are (V + |b|U)/|a-b| and (V + |a|U)/|a-b|.
    """
    conv = pm.convention
    w0 = omega_from_um(lambda_nm * 1e-3)
    kp1 = dk_domega(pm.crystal, conv.pump_axis, 2 * w0)
    a = kp1 - dk_domega(pm.crystal, conv.signal_axis, w0)
    b = kp1 - dk_domega(pm.crystal, conv.idler_axis, w0)
    u = PUMP_SIGMAS * pump.sigma
    v = PM_LOBES * 4.0 * np.pi / (pm.length_mm * 1e3)
    half = u
    if abs(a - b) > 1e-12 * max(abs(a), abs(b), 1e-30):
        half = max(half, (v + abs(b) * u) / abs(a - b), (v + abs(a) * u) / abs(a - b))
    return float(half)


def auto_grid(pump: PumpSpec, pm: PhaseMatchSpec, lambda_nm: float, n: int = 512) -> FrequencyGrid:
    """Square grid centered at degeneracy; expanded until the JSI on the boundary
    is below BOUNDARY_FRACTION of its peak."""
    return _auto(pump, pm, lambda_nm, n)[0]


def _auto(pump, pm, lambda_nm, n):
    if n < MIN_POINTS:
        raise ValueError(f"grid needs at least {MIN_POINTS} points per axis, got {n}")
    center = float(omega_from_um(lambda_nm * 1e-3))
    half = initial_half_span(pump, pm, lambda_nm)
    for _ in range(MAX_GROWTH_STEPS):
        _check_grid_range(pm, center, half)
        grid = FrequencyGrid.square(center, 2 * half, n)
        values = _fill(pump, pm, grid)
        if _boundary_ratio(values) < BOUNDARY_FRACTION:
            return grid, values
        half *= GROW
    raise GridError(f"boundary criterion not met after {MAX_GROWTH_STEPS} expansions")


def build_jsa(pump: PumpSpec, pm: PhaseMatchSpec, lambda_nm: float, n: int = 512) -> JointAmplitude:
    """auto_grid + compute_jsa without filling the grid twice."""
    try:
        grid, values = _auto(pump, pm, lambda_nm, n)
    except WavelengthRangeError as exc:
        raise GridError(str(exc)) from exc
    return JointAmplitude(grid, values, _meta(pump, pm))


def degenerate_source(crystal: CrystalRecord, lambda_nm: float, length_mm: float,
                      pump_fwhm_nm: float, *, period_um: float | None = None,
                      n: int = 512, include_pm_phase: bool = True,
                      convention: ProcessConvention = TYPE_II) -> JointAmplitude:
    """JSA for degenerate SPDC at ``lambda_nm`` pumped at ``lambda_nm / 2``."""
    pm = PhaseMatchSpec.degenerate(crystal, lambda_nm, length_mm, convention,
                                   include_pm_phase=include_pm_phase)
    if period_um is not None:
        pm = PhaseMatchSpec(crystal, length_mm, period_um, convention, include_pm_phase, pm.qpm_sign)
    pump = PumpSpec(lambda_nm / 2.0, pump_fwhm_nm)
    return build_jsa(pump, pm, lambda_nm, n)
