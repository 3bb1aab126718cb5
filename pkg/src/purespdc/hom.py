"""Hong-Ou-Mandel interference of heralded SPDC photons.

Coincidence probability at a 50:50 beamsplitter for delay tau:

    heralded:      P = 1/2 (1 - Re sum rho1(w, w') rho2(w', w) e^{i(w - w')tau})
    signal-idler:  P = 1/2 (1 - Re sum f(w, w') f*(w', w) e^{i(w - w')tau})

On a uniform grid the double sum collapses to diagonal sums of the summand
matrix followed by a one-dimensional Fourier sum over index offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jsa import JointAmplitude

DEFAULT_POINTS = 201
WIDTHS_EACH_SIDE = 5.0
BASELINE_TOL = 1e-3
MAX_WIDENINGS = 8


class GridMismatchError(ValueError):
    pass


class UndefinedWidthError(ValueError):
    pass


@dataclass(frozen=True)
class HomTrace:
    delays_ps: np.ndarray
    probability: np.ndarray
    baseline: float
    visibility: float
    width_ps: float | None  # None when the trace has no dip

    def rows(self):
        return zip(self.delays_ps.tolist(), self.probability.tolist())


def reduced_state(jsa: JointAmplitude, keep: str = "signal") -> np.ndarray:
    """rho(w, w') of the kept photon, tracing out the other."""
    f = jsa.values
    if keep == "signal":
        return f @ f.conj().T
    if keep == "idler":
        return f.T @ f.conj()
    raise ValueError(f"keep must be 'signal' or 'idler', got {keep!r}")


def _offset_sums(m: np.ndarray) -> np.ndarray:
    """s[k + N - 1] = sum of m[a, b] over a - b = k, k = -(N-1)..(N-1)."""
    n = m.shape[0]
    return np.array([np.trace(m, offset=-k) for k in range(-(n - 1), n)])


def _probability(sums: np.ndarray, step: float, delays_ps: np.ndarray) -> np.ndarray:
    n = (sums.size + 1) // 2
    k = np.arange(-(n - 1), n)
    phase = np.outer(delays_ps * 1e-12, k * step)
    return 0.5 * (1.0 - np.real(np.exp(1j * phase) @ sums))


def _expected_width_ps(axis: np.ndarray, marginal: np.ndarray) -> float:
    w = marginal / marginal.sum()
    mean = float(np.dot(w, axis))
    rms = math.sqrt(max(float(np.dot(w, (axis - mean) ** 2)), 0.0))
    if rms == 0:
        rms = float(axis[1] - axis[0])
    # FWHM of exp(-rms^2 tau^2), the dip shape for a Gaussian spectrum
    return 2.0 * math.sqrt(math.log(2.0)) / rms * 1e12


def _trace(sums, step, expected_ps, delays_ps) -> HomTrace:
    if delays_ps is not None:
        delays = np.asarray(delays_ps, dtype=float)
        return summarize(delays, _probability(sums, step, delays))
    half = WIDTHS_EACH_SIDE * expected_ps
    # aliasing limit of a sum sampled every `step` rad/s
    alias_ps = math.pi / step * 1e12
    for _ in range(MAX_WIDENINGS):
        half = min(half, 0.9 * alias_ps)
        delays = np.linspace(-half, half, DEFAULT_POINTS)
        p = _probability(sums, step, delays)
        if max(abs(p[0] - 0.5), abs(p[-1] - 0.5)) < BASELINE_TOL or half >= 0.9 * alias_ps:
            break
        half *= 2.0
    return summarize(delays, p)


def summarize(delays_ps, probability) -> HomTrace:
    delays_ps = np.asarray(delays_ps, dtype=float)
    probability = np.asarray(probability, dtype=float)
    baseline = 0.5 * (probability[0] + probability[-1])
    vis = (baseline - probability.min()) / baseline
    try:
        width = _dip_width(delays_ps, probability, baseline)
    except UndefinedWidthError:
        width = None
    return HomTrace(delays_ps, probability, float(baseline), float(vis), width)


def _dip_width(delays, p, baseline) -> float:
    i0 = int(np.argmin(p))
    depth = baseline - p[i0]
    if not depth > 1e-9:
        raise UndefinedWidthError("trace has no dip below its baseline")
    half = baseline - depth / 2.0
    left = i0
    while left > 0 and p[left - 1] <= half:
        left -= 1
    right = i0
    while right < len(p) - 1 and p[right + 1] <= half:
        right += 1
    if left == 0 or right == len(p) - 1:
        raise UndefinedWidthError("dip does not return to half depth inside the delay range")

    def cross(i_out, i_in):
        t0, t1, p0, p1 = delays[i_out], delays[i_in], p[i_out], p[i_in]
        return t0 + (half - p0) * (t1 - t0) / (p1 - p0)

    return float(cross(right + 1, right) - cross(left - 1, left))


def dip_width(trace: HomTrace) -> float:
    """Linear-interpolated FWHM (ps) of the dip below the trace baseline."""
    return _dip_width(trace.delays_ps, trace.probability, trace.baseline)


def hom_heralded(jsa_1: JointAmplitude, jsa_2: JointAmplitude, herald: str = "idler",
                 delays_ps=None) -> HomTrace:
    """Interference between the non-herald photons of two independent sources."""
    if herald not in ("idler", "signal"):
        raise ValueError(f"herald must be 'idler' or 'signal', got {herald!r}")
    keep = "signal" if herald == "idler" else "idler"
    ax1 = getattr(jsa_1.grid, keep)
    ax2 = getattr(jsa_2.grid, keep)
    if ax1.shape != ax2.shape or not np.array_equal(ax1, ax2):
        raise GridMismatchError(f"the two sources use different {keep} grids")
    rho1 = reduced_state(jsa_1, keep)
    rho2 = reduced_state(jsa_2, keep)
    sums = _offset_sums(rho1 * rho2.T)
    marginal = 0.5 * (np.real(np.diag(rho1)) + np.real(np.diag(rho2)))
    step = float(ax1[1] - ax1[0])
    return _trace(sums, step, _expected_width_ps(ax1, marginal), delays_ps)


def hom_signal_idler(jsa: JointAmplitude, delays_ps=None) -> HomTrace:
    """Interference between the signal and idler of one source."""
    if not jsa.grid.is_degenerate:
        raise GridMismatchError("signal-idler interference needs identical signal and idler grids")
    f = jsa.values
    sums = _offset_sums(f * f.T.conj())
    marginal = 0.5 * (np.sum(np.abs(f) ** 2, axis=1) + np.sum(np.abs(f) ** 2, axis=0))
    ax = jsa.grid.signal
    return _trace(sums, float(ax[1] - ax[0]), _expected_width_ps(ax, marginal), delays_ps)
