"""Schmidt decomposition, spectral purity, pump-bandwidth optimisation and scans."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .gvm import TYPE_II, ProcessConvention, degenerate_poling_period
from .jsa import JointAmplitude, degenerate_source
from .registry import CrystalRecord

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SchmidtResult:
    coefficients: np.ndarray  # descending, sum of squares = 1
    purity: float
    schmidt_number: float
    signal_modes: np.ndarray | None = None  # columns are modes
    idler_modes: np.ndarray | None = None


@dataclass(frozen=True)
class PurityScanRow:
    lambda_nm: float
    period_um: float
    pump_fwhm_nm: float
    purity: float
    error: str = ""


@dataclass
class BandwidthOptimum:
    fwhm_nm: float
    purity: float
    bracketed: bool
    trace: list[tuple[float, float]] = field(default_factory=list)  # (fwhm_nm, purity), in evaluation order

    def __iter__(self):
        yield self.fwhm_nm
        yield self.purity


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError("joint amplitude contains non-finite entries")


def schmidt_decompose(jsa, want_modes: bool = False) -> SchmidtResult:
    """Singular values of the JSA matrix, renormalised so sum(c_j^2) = 1."""
    f = jsa.values if isinstance(jsa, JointAmplitude) else np.asarray(jsa)
    _check_finite(f)
    if want_modes:
        u, s, vh = np.linalg.svd(f, full_matrices=False)
    else:
        s = np.linalg.svd(f, compute_uv=False)
        u = vh = None
    s = s / math.sqrt(math.fsum(s**2))
    purity = math.fsum(s**4)
    return SchmidtResult(
        coefficients=s,
        purity=purity,
        schmidt_number=1.0 / purity,
        signal_modes=u,
        idler_modes=None if vh is None else vh.T,
    )


def purity(jsa) -> float:
    return schmidt_decompose(jsa).purity


def purity_oracle(jsa) -> float:
    """Tr(rho^2) with rho = F F^dagger, independent of the SVD path."""
    f = jsa.values if isinstance(jsa, JointAmplitude) else np.asarray(jsa)
    if f.shape[0] > 128 or f.shape[1] > 128:
        raise ValueError("purity_oracle is for matrices up to 128 x 128")
    rho = f @ f.conj().T
    rho = rho / np.trace(rho).real
    return float(np.real(np.trace(rho @ rho)))


def golden_section_max(fn, lo: float, hi: float, *, rel_tol: float = 1e-3, max_iter: int = 100):
    """Maximise a unimodal ``fn`` on [lo, hi] in log space.

    Returns (x_best, f_best, evaluations) where evaluations is a list of
    (x, f(x)) pairs in call order.
    """
    a, b = math.log(lo), math.log(hi)
    evals = []

    def f(t):
        x = math.exp(t)
        y = fn(x)
        evals.append((x, y))
        return y

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= math.log1p(rel_tol):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x, y = max(evals, key=lambda e: e[1])
    return x, y, evals


def optimize_pump_bandwidth(crystal: CrystalRecord, lambda_nm: float, length_mm: float,
                            fwhm_range_nm: tuple[float, float] = (0.05, 20.0), *,
                            n: int = 512, coarse_points: int = 15, rel_tol: float = 1e-3,
                            guess_nm: float | None = None,
                            period_um: float | None = None, include_pm_phase: bool = True,
                            convention: ProcessConvention = TYPE_II) -> BandwidthOptimum:
    """Pump FWHM (nm) that maximises purity: log-spaced coarse scan, then golden section.

    If the coarse scan is not single-peaked the best scan point is returned;
    if the best point sits on the range edge the result is flagged as not bracketed.
    A ``guess_nm`` replaces the coarse scan with five points over [guess/2, 2*guess],
    falling back to the full range when the peak is not inside that bracket.
    """

    def p_of(bw):
        jsa = degenerate_source(crystal, lambda_nm, length_mm, bw, period_um=period_um,
                                n=n, include_pm_phase=include_pm_phase, convention=convention)
        return purity(jsa)

    lo, hi = fwhm_range_nm
    trace = []
    if guess_nm is not None:
        xs = np.geomspace(max(lo, guess_nm / 2.0), min(hi, guess_nm * 2.0), 5)
        ps = [p_of(float(x)) for x in xs]
        trace += [(float(x), p) for x, p in zip(xs, ps)]
        k = int(np.argmax(ps))
        if 0 < k < len(xs) - 1:
            x, p, evals = golden_section_max(p_of, float(xs[k - 1]), float(xs[k + 1]), rel_tol=rel_tol)
            trace.extend(evals)
            return BandwidthOptimum(x, p, True, trace)
    xs = np.geomspace(lo, hi, coarse_points)
    ps = [p_of(float(x)) for x in xs]
    trace += [(float(x), p) for x, p in zip(xs, ps)]
    k = int(np.argmax(ps))
    if k == 0 or k == len(xs) - 1:
        log.warning("%s @ %.1f nm: purity maximum at the edge of the bandwidth range", crystal.name, lambda_nm)
        return BandwidthOptimum(float(xs[k]), ps[k], False, trace)
    diffs = np.sign(np.diff(ps))
    unimodal = np.all(diffs[:k] >= 0) and np.all(diffs[k:] <= 0)
    if not unimodal:
        log.warning("%s @ %.1f nm: coarse purity scan is not single-peaked", crystal.name, lambda_nm)
        return BandwidthOptimum(float(xs[k]), ps[k], True, trace)
    x, p, evals = golden_section_max(p_of, float(xs[k - 1]), float(xs[k + 1]), rel_tol=rel_tol)
    trace.extend(evals)
    return BandwidthOptimum(x, p, True, trace)


def purity_scan(crystal: CrystalRecord, lambdas_nm, length_mm: float, *,
                pump_fwhm_nm: float | None = None, n: int = 512,
                fwhm_range_nm: tuple[float, float] = (0.05, 20.0),
                rel_tol: float = 1e-2, include_pm_phase: bool = True,
                convention: ProcessConvention = TYPE_II) -> list[PurityScanRow]:
    """Purity at each degenerate wavelength, re-poled for that wavelength.

    ``pump_fwhm_nm=None`` optimises the pump bandwidth per row, seeding each
    search with the previous row's optimum.
    """
    rows = []
    guess = None
    for lam in sorted(float(x) for x in lambdas_nm):
        try:
            period = degenerate_poling_period(crystal, lam, convention).period_um
            if pump_fwhm_nm is None:
                opt = optimize_pump_bandwidth(crystal, lam, length_mm, fwhm_range_nm, n=n,
                                              rel_tol=rel_tol, guess_nm=guess,
                                              include_pm_phase=include_pm_phase, convention=convention)
                bw, p = opt.fwhm_nm, opt.purity
                guess = bw if opt.bracketed else None
            else:
                bw = pump_fwhm_nm
                p = purity(degenerate_source(crystal, lam, length_mm, bw, n=n,
                                             include_pm_phase=include_pm_phase, convention=convention))
            rows.append(PurityScanRow(lam, period, bw, p))
        except (ValueError, RuntimeError) as exc:
            rows.append(PurityScanRow(lam, float("nan"), pump_fwhm_nm or float("nan"), float("nan"), str(exc)))
    return rows


def wavelength_range(start_nm: float, stop_nm: float, step_nm: float) -> list[float]:
    if step_nm <= 0:
        raise ValueError("step must be positive")
    if start_nm > stop_nm:
        raise ValueError(f"start {start_nm} nm is above stop {stop_nm} nm")
    count = int(math.floor((stop_nm - start_nm) / step_nm + 1e-9)) + 1
    return [start_nm + i * step_nm for i in range(count)]
