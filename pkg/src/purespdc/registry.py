"""Crystal dispersion registry.

Sellmeier coefficient sets are data: they live in a YAML file shipped with the
package (``data/crystals.yaml``) and are validated when loaded. Wavelengths are
vacuum wavelengths in micrometres everywhere in this module.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np
import yaml

AXES = ("x", "y", "z")
TRANSPARENCY_UM = (0.35, 3.0)
TERM_STYLES = ("lambda2", "const")
REGISTRY_ENV = "PURESPDC_REGISTRY"


class RegistryError(Exception):
    """Base class for registry problems."""


class RegistryParseError(RegistryError):
    """The registry file is missing, empty or not in the expected format."""


class RegistryValidationError(RegistryError):
    """A record parsed but violates a physical or schema invariant."""

    def __init__(self, record: str, field_name: str, message: str):
        self.record = record
        self.field = field_name
        super().__init__(f"{record}: {field_name}: {message}")


class WavelengthRangeError(ValueError):
    """Wavelength outside the validity window of a dispersion formula."""


@dataclass(frozen=True)
class ResonanceTerm:
    style: str  # "lambda2": num*l^2/(l^2-pole); "const": num/(l^2-pole)
    num: float
    pole: float  # um^2


@dataclass(frozen=True)
class SellmeierForm:
    """n^2 = A + sum(resonance terms) - F*lambda^2."""

    constant_term: float
    resonance_terms: tuple[ResonanceTerm, ...] = ()
    infrared_term: float = 0.0

    def n_squared(self, lam):
        l2 = np.square(lam)
        total = self.constant_term - self.infrared_term * l2
        for t in self.resonance_terms:
            if t.style == "lambda2":
                total = total + t.num * l2 / (l2 - t.pole)
            else:
                total = total + t.num / (l2 - t.pole)
        return total

    def dn_squared(self, lam):
        """d(n^2)/d(lambda), analytic."""
        l2 = np.square(lam)
        total = -2.0 * self.infrared_term * lam
        for t in self.resonance_terms:
            denom = np.square(l2 - t.pole)
            if t.style == "lambda2":
                total = total - 2.0 * t.num * t.pole * lam / denom
            else:
                total = total - 2.0 * t.num * lam / denom
        return total


@dataclass(frozen=True)
class CrystalRecord:
    name: str
    composition: str
    axes: Mapping[str, SellmeierForm]
    validity_range: tuple[float, float]
    d_eff: float  # pm/V, metadata only
    source: str
    verified: bool = True

    def form(self, axis: str) -> SellmeierForm:
        try:
            return self.axes[axis]
        except KeyError:
            raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}") from None

    def check_range(self, lam, *, strict: bool = False) -> None:
        lo, hi = self.validity_range
        arr = np.asarray(lam, dtype=float)
        if strict:
            bad = (arr <= lo) | (arr >= hi)
        else:
            bad = (arr < lo) | (arr > hi)
        if np.any(bad) or not np.all(np.isfinite(arr)):
            worst = float(arr[bad].flat[0]) if np.any(bad) else float("nan")
            raise WavelengthRangeError(
                f"{self.name}: wavelength {worst:.6g} um outside validity range "
                f"[{lo}, {hi}] um"
            )


@dataclass(frozen=True)
class Registry:
    records: Mapping[str, CrystalRecord] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "records", MappingProxyType(dict(self.records)))

    def get(self, name: str) -> CrystalRecord:
        for key, rec in self.records.items():
            if key.lower() == name.lower():
                return rec
        raise KeyError(f"unknown crystal {name!r}; available: {', '.join(self.names())}")

    def names(self) -> list[str]:
        return sorted(self.records)

    def __contains__(self, name: str) -> bool:
        return any(k.lower() == name.lower() for k in self.records)

    def __len__(self) -> int:
        return len(self.records)


def default_registry_path() -> Path:
    env = os.environ.get(REGISTRY_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("purespdc") / "data" / "crystals.yaml"))


def alternate_registry_path() -> Path:
    return Path(str(resources.files("purespdc") / "data" / "crystals_alt.yaml"))


def _number(rec: str, fld: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RegistryValidationError(rec, fld, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise RegistryValidationError(rec, fld, "not finite")
    return float(value)


def _parse_form(rec: str, axis: str, raw) -> SellmeierForm:
    where = f"axes.{axis}"
    if not isinstance(raw, dict):
        raise RegistryValidationError(rec, where, "expected a mapping")
    if "A" not in raw:
        raise RegistryValidationError(rec, f"{where}.A", "missing")
    terms = []
    for i, t in enumerate(raw.get("terms") or []):
        tw = f"{where}.terms[{i}]"
        if not isinstance(t, dict):
            raise RegistryValidationError(rec, tw, "expected a mapping")
        style = t.get("style")
        if style not in TERM_STYLES:
            raise RegistryValidationError(rec, f"{tw}.style", f"must be one of {TERM_STYLES}, got {style!r}")
        terms.append(ResonanceTerm(style, _number(rec, f"{tw}.num", t.get("num")),
                                   _number(rec, f"{tw}.pole", t.get("pole"))))
    return SellmeierForm(
        constant_term=_number(rec, f"{where}.A", raw["A"]),
        resonance_terms=tuple(terms),
        infrared_term=_number(rec, f"{where}.F", raw.get("F", 0.0)),
    )


def validate_record(rec: CrystalRecord, *, samples: int = 512) -> None:
    """Check the physical invariants of one record; raise on the first violation."""
    lo, hi = rec.validity_range
    if not lo < hi:
        raise RegistryValidationError(rec.name, "validity_um", f"empty range [{lo}, {hi}]")
    if lo < TRANSPARENCY_UM[0] or hi > TRANSPARENCY_UM[1]:
        raise RegistryValidationError(
            rec.name, "validity_um",
            f"[{lo}, {hi}] um leaves the {TRANSPARENCY_UM[0]}-{TRANSPARENCY_UM[1]} um transparency window",
        )
    for axis in AXES:
        if axis not in rec.axes:
            raise RegistryValidationError(rec.name, f"axes.{axis}", "missing axis")
        form = rec.axes[axis]
        for i, t in enumerate(form.resonance_terms):
            if lo * lo <= t.pole <= hi * hi:
                raise RegistryValidationError(
                    rec.name, f"axes.{axis}.terms[{i}].pole",
                    f"pole {t.pole} um^2 lies inside the validity range [{lo}, {hi}] um",
                )
        lam = np.linspace(lo, hi, samples)
        n2 = form.n_squared(lam)
        if not np.all(np.isfinite(n2)) or np.any(n2 <= 1.0):
            raise RegistryValidationError(rec.name, f"axes.{axis}", "n^2 <= 1 inside the validity range")


def _parse_record(raw, index: int) -> CrystalRecord:
    if not isinstance(raw, dict):
        raise RegistryParseError(f"crystals[{index}]: expected a mapping")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise RegistryValidationError(f"crystals[{index}]", "name", "missing")
    for key in ("composition", "source"):
        if not isinstance(raw.get(key), str):
            raise RegistryValidationError(name, key, "missing or not a string")
    validity = raw.get("validity_um")
    if not isinstance(validity, list) or len(validity) != 2:
        raise RegistryValidationError(name, "validity_um", "expected [lo, hi]")
    axes_raw = raw.get("axes")
    if not isinstance(axes_raw, dict):
        raise RegistryValidationError(name, "axes", "missing")
    for axis in AXES:
        if axis not in axes_raw:
            raise RegistryValidationError(name, f"axes.{axis}", "missing axis")
    extra = set(axes_raw) - set(AXES)
    if extra:
        raise RegistryValidationError(name, "axes", f"unexpected axes {sorted(extra)}")
    return CrystalRecord(
        name=name,
        composition=raw["composition"],
        axes=MappingProxyType({a: _parse_form(name, a, axes_raw[a]) for a in AXES}),
        validity_range=(_number(name, "validity_um[0]", validity[0]),
                        _number(name, "validity_um[1]", validity[1])),
        d_eff=_number(name, "d_eff_pm_per_V", raw.get("d_eff_pm_per_V")),
        source=raw["source"].strip(),
        verified=bool(raw.get("verified", True)),
    )


def parse_registry(text: str, origin: str = "<string>") -> Registry:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise RegistryParseError(f"{origin}: malformed YAML: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("crystals"), list):
        raise RegistryParseError(f"{origin}: expected a mapping with a 'crystals' list")
    records: dict[str, CrystalRecord] = {}
    for i, raw in enumerate(doc["crystals"]):
        rec = _parse_record(raw, i)
        if rec.name.lower() in (k.lower() for k in records):
            raise RegistryValidationError(rec.name, "name", "duplicate name")
        validate_record(rec)
        records[rec.name] = rec
    return Registry(records)


def load_registry(path=None) -> Registry:
    """Load and validate a registry file (defaults to the shipped data)."""
    path = Path(path) if path is not None else default_registry_path()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RegistryParseError(f"{path}: cannot read registry: {exc}") from exc
    return parse_registry(text, origin=str(path))


def refractive_index(record: CrystalRecord, axis: str, lam):
    """Refractive index on ``axis`` at vacuum wavelength ``lam`` (um).

    Accepts scalars or arrays; raises WavelengthRangeError rather than
    extrapolating outside the record's validity window.
    """
    record.check_range(lam)
    n = np.sqrt(record.form(axis).n_squared(np.asarray(lam, dtype=float)))
    return float(n) if np.ndim(n) == 0 else n


def list_crystals(registry: Registry) -> list[tuple[str, str, float, tuple[float, float]]]:
    return [
        (r.name, r.composition, r.d_eff, r.validity_range)
        for r in (registry.records[k] for k in registry.names())
    ]
