"""Spectrally pure photon pairs from periodically poled KTP-family crystals."""

from .registry import load_registry, refractive_index, list_crystals
from .gvm import TYPE_II, poling_period, solve_gvm_asymmetric, solve_gvm_symmetric
from .jsa import PhaseMatchSpec, PumpSpec, auto_grid, compute_jsa, degenerate_source
from .schmidt import optimize_pump_bandwidth, purity, purity_scan, schmidt_decompose
from .hom import hom_heralded, hom_signal_idler

__version__ = "0.1.0"
