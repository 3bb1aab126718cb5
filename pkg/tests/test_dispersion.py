import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purespdc.dispersion import (C_M_PER_S, dk_domega, dn_dlambda, group_index,
                                 inverse_group_velocity, omega_from_um, um_from_omega, wavenumber)
from purespdc.registry import refractive_index

from conftest import make_record, single_pole

CRYSTALS = ["PPKTP", "PPRTP", "PPKTA", "PPRTA", "PPCTA"]


def fd_derivative(fn, x, h):
    # fourth-order central difference
    return (-fn(x + 2 * h) + 8 * fn(x + h) - 8 * fn(x - h) + fn(x - 2 * h)) / (12 * h)


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(CRYSTALS), axis=st.sampled_from("xyz"),
       lam=st.floats(min_value=0.45, max_value=2.9))
def test_dn_dlambda_matches_finite_difference(registry, name, axis, lam):
    rec = registry.get(name)
    analytic = dn_dlambda(rec, axis, lam)
    numeric = fd_derivative(lambda x: refractive_index(rec, axis, x), lam, 1e-3)
    assert analytic == pytest.approx(numeric, rel=1e-6)


def test_single_pole_derivative_symbolic():
    # n^2 = A + B l^2/(l^2 - C)  =>  d(n^2)/dl = -2 B C l/(l^2 - C)^2
    a, b, c = 2.1, 0.9, 0.05
    rec = make_record({"y": single_pole(a, b, c)})
    for lam in (0.6, 1.0, 1.9):
        n = math.sqrt(a + b * lam**2 / (lam**2 - c))
        expected = -2 * b * c * lam / (lam**2 - c) ** 2 / (2 * n)
        assert dn_dlambda(rec, "y", lam) == pytest.approx(expected, rel=1e-13)


def test_const_style_term_derivative():
    # n^2 = A + B/(l^2 - C)  =>  d(n^2)/dl = -2 B l/(l^2 - C)^2
    a, b, c = 3.3, 0.04, 0.04
    rec = make_record({"x": single_pole(a, b, c, style="const")})
    lam = 1.3
    n = math.sqrt(a + b / (lam**2 - c))
    assert dn_dlambda(rec, "x", lam) == pytest.approx(-2 * b * lam / (lam**2 - c) ** 2 / (2 * n), rel=1e-13)


def test_constant_index_group_velocity():
    rec = make_record()
    assert dn_dlambda(rec, "z", 1.2) == 0.0
    assert group_index(rec, "z", 1.2) == 2.0
    assert inverse_group_velocity(rec, "z", 1.2) == pytest.approx(2.0 / C_M_PER_S, rel=1e-15)


def test_wavenumber_of_constant_index():
    rec = make_record()
    assert wavenumber(rec, "x", 1.0) == pytest.approx(4 * math.pi, rel=1e-15)


def test_wavenumber_golden(registry):
    # 40-digit decimal evaluation of 2 pi n / lambda for KTP y at 0.792 um
    assert wavenumber(registry.get("PPKTP"), "y", 0.792) == pytest.approx(13.94016880183632298, rel=1e-14)


def test_group_index_exceeds_phase_index(registry):
    lam = np.linspace(0.5, 2.5, 30)
    for name in CRYSTALS:
        rec = registry.get(name)
        for axis in "yz":
            assert np.all(group_index(rec, axis, lam) > refractive_index(rec, axis, lam))


def test_dk_domega_is_inverse_group_velocity_per_um(registry):
    rec = registry.get("PPCTA")
    lam = 1.5
    assert dk_domega(rec, "y", omega_from_um(lam)) == pytest.approx(
        inverse_group_velocity(rec, "y", lam) * 1e-6, rel=1e-12)


def test_dk_domega_matches_finite_difference(registry):
    rec = registry.get("PPKTP")
    w = float(omega_from_um(1.55))
    numeric = fd_derivative(lambda x: wavenumber(rec, "z", um_from_omega(x)), w, w * 1e-4)
    assert dk_domega(rec, "z", w) == pytest.approx(numeric, rel=1e-7)


def test_omega_round_trip():
    lam = np.array([0.4, 1.0, 2.9])
    assert np.allclose(um_from_omega(omega_from_um(lam)), lam, rtol=1e-15)


def test_derivative_strictly_inside_range(registry):
    rec = registry.get("PPKTP")
    with pytest.raises(ValueError):
        dn_dlambda(rec, "y", rec.validity_range[1])
