"""Group-velocity-matching roots and quasi-phase-matching periods.

All public wavelengths here are in nm (matching how GVM points are quoted);
dispersion calls convert to um internally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .dispersion import inverse_group_velocity, wavenumber
from .registry import CrystalRecord

log = logging.getLogger(__name__)

SYMMETRIC = "symmetric"
PUMP_MATCHES_IDLER = "pump_matches_idler"
PUMP_MATCHES_SIGNAL = "pump_matches_signal"
ASYMMETRIC_BRANCHES = (PUMP_MATCHES_IDLER, PUMP_MATCHES_SIGNAL)

# keeps derivative evaluations strictly inside the validity window
_EDGE_NM = 1e-3


class NoGvmPointError(RuntimeError):
    """The GVM function has no sign change in the search window."""


class EnergyConservationError(ValueError):
    pass


@dataclass(frozen=True)
class ProcessConvention:
    """Collinear type-II SPDC: y-polarized pump and signal, z-polarized idler, along x."""

    propagation: str = "x"
    pump_axis: str = "y"
    signal_axis: str = "y"
    idler_axis: str = "z"
    collinear: bool = True
    degenerate_signal_idler: bool = True

    def swapped(self) -> "ProcessConvention":
        return ProcessConvention(self.propagation, self.pump_axis, self.idler_axis,
                                 self.signal_axis, self.collinear, self.degenerate_signal_idler)


TYPE_II = ProcessConvention()


@dataclass(frozen=True)
class GvmSolution:
    lambda_nm: float
    condition: str
    residual: float  # s/m
    bracket_nm: tuple[float, float]


class QpmPeriod(NamedTuple):
    period_um: float
    mismatch_sign: int  # sign of k_p - k_s - k_i


def default_window_nm(record: CrystalRecord) -> tuple[float, float]:
    lo, hi = record.validity_range
    return (2.0 * lo * 1e3 + _EDGE_NM, hi * 1e3 - _EDGE_NM)


def symmetric_gvm_function(record: CrystalRecord, conv: ProcessConvention = TYPE_II) -> Callable:
    """g(lambda_nm) = 2/V_p(lambda/2) - 1/V_s(lambda) - 1/V_i(lambda)."""

    def g(lam_nm):
        lam = np.asarray(lam_nm, dtype=float) * 1e-3
        return (2.0 * inverse_group_velocity(record, conv.pump_axis, lam / 2)
                - inverse_group_velocity(record, conv.signal_axis, lam)
                - inverse_group_velocity(record, conv.idler_axis, lam))

    return g


def asymmetric_gvm_function(record: CrystalRecord, branch: str,
                            conv: ProcessConvention = TYPE_II) -> Callable:
    """1/V_p(lambda/2) - 1/V_{i or s}(lambda)."""
    if branch not in ASYMMETRIC_BRANCHES:
        raise ValueError(f"branch must be one of {ASYMMETRIC_BRANCHES}, got {branch!r}")
    other = conv.idler_axis if branch == PUMP_MATCHES_IDLER else conv.signal_axis

    def h(lam_nm):
        lam = np.asarray(lam_nm, dtype=float) * 1e-3
        return (inverse_group_velocity(record, conv.pump_axis, lam / 2)
                - inverse_group_velocity(record, other, lam))

    return h


def _brackets(fn, window, step_nm):
    lo, hi = window
    n = max(int(np.ceil((hi - lo) / step_nm)), 1)
    grid = np.linspace(lo, hi, n + 1)
    vals = np.asarray(fn(grid), dtype=float)
    s = np.sign(vals)
    out = []
    for i in range(len(grid) - 1):
        if s[i] * s[i + 1] < 0:
            out.append((grid[i], grid[i + 1]))
        elif s[i + 1] == 0 and 0 < i + 2 < len(grid) and s[i] * s[i + 2] < 0:
            out.append((grid[i], grid[i + 2]))
    return out, vals


def _refine(fn, brackets, condition, tol_nm) -> list[GvmSolution]:
    sols = []
    for a, b in brackets:
        root = brentq(lambda x: float(fn(x)), a, b, xtol=tol_nm, rtol=4 * np.finfo(float).eps)
        sols.append(GvmSolution(float(root), condition, float(fn(root)), (float(a), float(b))))
    return sols


def solve_gvm_symmetric(record: CrystalRecord, conv: ProcessConvention = TYPE_II, *,
                        window_nm=None, step_nm: float = 1.0, tol_nm: float = 1e-4) -> GvmSolution:
    """Degenerate wavelength where twice the pump inverse group velocity equals
    the sum of the signal and idler ones. Returns the lowest root in the window."""
    window = window_nm or default_window_nm(record)
    g = symmetric_gvm_function(record, conv)
    brackets, vals = _brackets(g, window, step_nm)
    if not brackets:
        raise NoGvmPointError(
            f"{record.name}: no GVM point in [{window[0]:.1f}, {window[1]:.1f}] nm; "
            f"g(lo) = {vals[0]:.4e} s/m, g(hi) = {vals[-1]:.4e} s/m"
        )
    sols = _refine(g, brackets, SYMMETRIC, tol_nm)
    if len(sols) > 1:
        log.info("%s: %d symmetric GVM roots, returning the first", record.name, len(sols))
    return sols[0]


def solve_gvm_asymmetric(record: CrystalRecord, conv: ProcessConvention = TYPE_II,
                         branch: str = PUMP_MATCHES_IDLER, *, window_nm=None,
                         step_nm: float = 1.0, tol_nm: float = 1e-4) -> list[GvmSolution]:
    window = window_nm or default_window_nm(record)
    h = asymmetric_gvm_function(record, branch, conv)
    brackets, vals = _brackets(h, window, step_nm)
    if not brackets:
        log.debug("%s/%s: no root; h(lo) = %.4e, h(hi) = %.4e s/m",
                  record.name, branch, vals[0], vals[-1])
    return _refine(h, brackets, branch, tol_nm)


def poling_period(record: CrystalRecord, conv: ProcessConvention,
                  lambda_pump_nm: float, lambda_signal_nm: float,
                  lambda_idler_nm: float) -> QpmPeriod:
    """First-order collinear QPM period 2*pi/|k_p - k_s - k_i| in um."""
    inv_p = 1.0 / lambda_pump_nm
    mismatch = inv_p - 1.0 / lambda_signal_nm - 1.0 / lambda_idler_nm
    if abs(mismatch) > 1e-9 * inv_p:
        raise EnergyConservationError(
            f"1/lp - 1/ls - 1/li = {mismatch:.3e} /nm (pump {lambda_pump_nm} nm, "
            f"signal {lambda_signal_nm} nm, idler {lambda_idler_nm} nm)"
        )
    dk = (wavenumber(record, conv.pump_axis, lambda_pump_nm * 1e-3)
          - wavenumber(record, conv.signal_axis, lambda_signal_nm * 1e-3)
          - wavenumber(record, conv.idler_axis, lambda_idler_nm * 1e-3))
    if dk == 0.0:
        return QpmPeriod(float("inf"), 0)
    return QpmPeriod(2.0 * np.pi / abs(dk), int(np.sign(dk)))


def degenerate_poling_period(record: CrystalRecord, lambda_nm: float,
                             conv: ProcessConvention = TYPE_II) -> QpmPeriod:
    return poling_period(record, conv, lambda_nm / 2.0, lambda_nm, lambda_nm)
