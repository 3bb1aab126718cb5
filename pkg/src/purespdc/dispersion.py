"""Wavenumbers and group velocities from Sellmeier forms.

Wavelengths in um, wavenumbers in rad/um, inverse group velocities in s/m.
Angular frequencies (rad/s) are used at the frequency-grid level.
"""

from __future__ import annotations

import numpy as np

from .registry import CrystalRecord, refractive_index

C_M_PER_S = 299_792_458.0
# 2*pi*c expressed in um/s, so omega [rad/s] = OMEGA_UM / lambda [um]
OMEGA_UM = 2.0 * np.pi * C_M_PER_S * 1e6


def omega_from_um(lam):
    return OMEGA_UM / np.asarray(lam, dtype=float)


def um_from_omega(omega):
    return OMEGA_UM / np.asarray(omega, dtype=float)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def wavenumber(record: CrystalRecord, axis: str, lam):
    """k = 2*pi*n/lambda in rad/um."""
    lam = np.asarray(lam, dtype=float)
    return _scalar(2.0 * np.pi * refractive_index(record, axis, lam) / lam)


def dn_dlambda(record: CrystalRecord, axis: str, lam):
    """Analytic dn/dlambda (per um)."""
    record.check_range(lam, strict=True)
    lam = np.asarray(lam, dtype=float)
    form = record.form(axis)
    n = np.sqrt(form.n_squared(lam))
    return _scalar(form.dn_squared(lam) / (2.0 * n))


def group_index(record: CrystalRecord, axis: str, lam):
    """n_g = n - lambda*dn/dlambda."""
    lam = np.asarray(lam, dtype=float)
    return _scalar(refractive_index(record, axis, lam) - lam * dn_dlambda(record, axis, lam))


def inverse_group_velocity(record: CrystalRecord, axis: str, lam):
    """1/V_g = n_g/c in s/m."""
    return _scalar(np.asarray(group_index(record, axis, lam)) / C_M_PER_S)


def dk_domega(record: CrystalRecord, axis: str, omega):
    """dk/domega in (rad/um)/(rad/s), i.e. the inverse group velocity in s/um."""
    return _scalar(np.asarray(group_index(record, axis, um_from_omega(omega))) / (C_M_PER_S * 1e6))


def wavenumber_at_omega(record: CrystalRecord, axis: str, omega):
    return wavenumber(record, axis, um_from_omega(omega))
