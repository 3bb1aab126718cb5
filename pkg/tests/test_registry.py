import math

import numpy as np
import pytest

from purespdc.registry import (RegistryParseError, RegistryValidationError, WavelengthRangeError,
                               alternate_registry_path, default_registry_path, list_crystals,
                               load_registry, parse_registry, refractive_index)

from conftest import make_record

RECORD = """
crystals:
  - name: TOY
    composition: Toy
    d_eff_pm_per_V: 1.0
    validity_um: [0.5, 2.0]
    source: test
    axes:
      x: {A: 4.0, F: 0.0}
      y: {A: 4.0, F: 0.0}
      z: {A: 4.0, terms: [{style: lambda2, num: 1.0, pole: POLE}], F: 0.0}
"""


def test_shipped_registry_schema(registry):
    assert len(registry) == 5
    assert registry.names() == ["PPCTA", "PPKTA", "PPKTP", "PPRTA", "PPRTP"]
    for name in registry.names():
        rec = registry.get(name)
        assert set(rec.axes) == {"x", "y", "z"}
        lo, hi = rec.validity_range
        assert 0.35 <= lo < hi <= 3.0
        assert rec.source


def test_d_eff_metadata(registry):
    d = {n: registry.get(n).d_eff for n in ("PPKTP", "PPRTP", "PPKTA", "PPRTA", "PPCTA")}
    assert d == {"PPKTP": 2.4, "PPRTP": 2.4, "PPKTA": 2.3, "PPRTA": 2.4, "PPCTA": 2.1}


def test_alternate_registry_loads():
    alt = load_registry(alternate_registry_path())
    assert alt.names() == ["PPKTP-Kato2002"]


def test_index_golden_value(registry):
    # 40-digit decimal evaluation of the KTP y-axis formula at 1.584 um
    n = refractive_index(registry.get("PPKTP"), "y", 1.584)
    assert n == pytest.approx(1.733430532130411682, rel=1e-14)


def test_constant_form_gives_constant_index():
    rec = make_record()
    lam = np.linspace(0.5, 2.5, 7)
    assert np.allclose(refractive_index(rec, "x", lam), 2.0, rtol=0, atol=1e-15)


def test_out_of_range_raises(registry):
    rec = registry.get("PPKTP")
    with pytest.raises(WavelengthRangeError):
        refractive_index(rec, "y", 5.0)
    with pytest.raises(WavelengthRangeError):
        refractive_index(rec, "y", np.array([1.0, 0.1]))


def test_refractive_index_positive_monotone_normal_dispersion(registry):
    for name in registry.names():
        rec = registry.get(name)
        lam = np.linspace(0.5, 2.5, 50)
        for axis in "xyz":
            n = refractive_index(rec, axis, lam)
            assert np.all(n > 1)
            assert np.all(np.diff(n) < 0)


def test_empty_file_is_parse_error():
    with pytest.raises(RegistryParseError):
        parse_registry("")


def test_malformed_yaml_is_parse_error():
    with pytest.raises(RegistryParseError):
        parse_registry("crystals: [ {name: ")


def test_pole_inside_range_names_record_and_field():
    with pytest.raises(RegistryValidationError) as info:
        parse_registry(RECORD.replace("POLE", "1.0"))
    assert info.value.record == "TOY"
    assert "axes.z.terms[0].pole" in str(info.value)


def test_valid_pole_outside_range_loads():
    reg = parse_registry(RECORD.replace("POLE", "0.04"))
    assert "toy" in reg


def test_missing_axis_is_validation_error():
    text = RECORD.replace("POLE", "0.04").replace("      x: {A: 4.0, F: 0.0}\n", "")
    with pytest.raises(RegistryValidationError, match="axes.x"):
        parse_registry(text)


def test_unknown_name_lists_available(registry):
    with pytest.raises(KeyError, match="PPCTA"):
        registry.get("LiNbO3")


def test_lookup_is_case_insensitive(registry):
    assert registry.get("ppktp") is registry.get("PPKTP")


def test_list_crystals_sorted(registry):
    rows = list_crystals(registry)
    assert [r[0] for r in rows] == sorted(r[0] for r in rows)
    assert all(len(r) == 4 for r in rows)


def test_reload_is_identical(registry):
    again = load_registry()
    for name in registry.names():
        assert registry.get(name) == again.get(name)


def test_env_override(tmp_path, monkeypatch):
    p = tmp_path / "reg.yaml"
    p.write_text(RECORD.replace("POLE", "0.04"))
    monkeypatch.setenv("PURESPDC_REGISTRY", str(p))
    assert default_registry_path() == p
    assert load_registry().names() == ["TOY"]


def test_missing_file_raises(tmp_path):
    with pytest.raises(RegistryParseError):
        load_registry(tmp_path / "absent.yaml")


def test_records_are_immutable(registry):
    rec = registry.get("PPKTP")
    with pytest.raises(Exception):
        rec.name = "x"
    with pytest.raises(TypeError):
        rec.axes["x"] = None
    assert math.isfinite(rec.d_eff)
