import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purespdc.schmidt import (golden_section_max, optimize_pump_bandwidth, purity, purity_oracle,
                              purity_scan, schmidt_decompose, wavelength_range)


def random_complex(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def test_svd_purity_matches_trace_oracle_on_200_matrices():
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(200):
        r, c = rng.integers(2, 48, size=2)
        f = random_complex(rng, r, c)
        worst = max(worst, abs(purity(f) - purity_oracle(f)))
    assert worst <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 24))
def test_schmidt_invariants(seed, n):
    rng = np.random.default_rng(seed)
    res = schmidt_decompose(random_complex(rng, n, n), want_modes=True)
    assert math.fsum(res.coefficients**2) == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(res.coefficients) <= 0)
    assert 0 < res.purity <= 1 + 1e-12
    assert res.schmidt_number >= 1 - 1e-12
    u, v = res.signal_modes, res.idler_modes
    assert np.allclose(u.conj().T @ u, np.eye(n), atol=1e-8)
    assert np.allclose(v.T @ v.conj(), np.eye(n), atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), phase=st.floats(0, 2 * math.pi))
def test_purity_invariant_under_relabelling_and_phase(seed, phase):
    rng = np.random.default_rng(seed)
    f = random_complex(rng, 12, 12)
    p = purity(f)
    assert purity(f.T) == pytest.approx(p, abs=1e-12)
    assert purity(f[rng.permutation(12)][:, rng.permutation(12)]) == pytest.approx(p, abs=1e-12)
    assert purity(np.exp(1j * phase) * f) == pytest.approx(p, abs=1e-9)


def test_rank_one_is_pure():
    rng = np.random.default_rng(1)
    a, b = random_complex(rng, 30, 1), random_complex(rng, 1, 30)
    assert purity(a @ b) == pytest.approx(1.0, abs=1e-12)


def test_rank_two_equal_weights():
    f = np.zeros((8, 8))
    f[0, 0] = f[1, 1] = 1.0
    assert purity(f) == pytest.approx(0.5, abs=1e-14)


def test_maximally_entangled():
    for n in (4, 17, 64):
        assert purity(np.eye(n) / math.sqrt(n)) == pytest.approx(1.0 / n, rel=1e-12)


def test_non_finite_rejected():
    f = np.ones((4, 4))
    f[1, 2] = np.nan
    with pytest.raises(ValueError):
        purity(f)


def test_oracle_size_limit():
    with pytest.raises(ValueError):
        purity_oracle(np.ones((129, 4)))


def test_golden_section_on_known_peak():
    x, y, evals = golden_section_max(lambda t: -(math.log(t) - math.log(0.7)) ** 2, 0.1, 5.0, rel_tol=1e-6)
    assert x == pytest.approx(0.7, rel=1e-5)
    assert y == max(e[1] for e in evals)


def test_optimizer_flags_edge_maximum(registry):
    # purity keeps rising with bandwidth below the optimum, so the top edge wins
    opt = optimize_pump_bandwidth(registry.get("PPCTA"), 1864.6, 30.0, (0.05, 0.2), n=64, coarse_points=5)
    assert not opt.bracketed
    assert opt.fwhm_nm == pytest.approx(0.2)


def test_optimizer_warm_start_agrees_with_cold(registry):
    rec = registry.get("PPCTA")
    cold = optimize_pump_bandwidth(rec, 1864.6, 30.0, n=128, rel_tol=1e-2)
    warm = optimize_pump_bandwidth(rec, 1864.6, 30.0, n=128, rel_tol=1e-2, guess_nm=0.6)
    assert cold.bracketed and warm.bracketed
    assert warm.purity == pytest.approx(cold.purity, abs=1e-4)
    assert len(warm.trace) < len(cold.trace)
    fwhm, p = warm
    assert (fwhm, p) == (warm.fwhm_nm, warm.purity)


def test_scan_records_errors_and_continues(registry):
    rows = purity_scan(registry.get("PPKTP"), [780.0, 1584.0], 30.0, pump_fwhm_nm=0.4, n=64)
    assert rows[0].error and math.isnan(rows[0].purity)
    assert not rows[1].error and 0 < rows[1].purity <= 1


def test_scan_is_sorted_and_repoled(registry):
    rows = purity_scan(registry.get("PPKTP"), [1600.0, 1500.0], 30.0, pump_fwhm_nm=0.4, n=64)
    assert [r.lambda_nm for r in rows] == [1500.0, 1600.0]
    assert rows[0].period_um != rows[1].period_um


def test_wavelength_range():
    assert wavelength_range(1300, 1400, 50) == [1300, 1350, 1400]
    assert len(wavelength_range(1300, 1800, 50)) == 11
    with pytest.raises(ValueError):
        wavelength_range(1800, 1300, 50)
    with pytest.raises(ValueError):
        wavelength_range(1300, 1800, 0)
