import sys
from types import MappingProxyType

import pytest

from purespdc.registry import AXES, CrystalRecord, ResonanceTerm, SellmeierForm, load_registry


@pytest.fixture(scope="session")
def registry():
    return load_registry()


def make_record(forms=None, name="TOY", validity=(0.4, 3.0), **kw):
    """Record with per-axis SellmeierForm; missing axes default to constant n = 2."""
    forms = dict(forms or {})
    axes = {a: forms.get(a, SellmeierForm(4.0, (), 0.0)) for a in AXES}
    return CrystalRecord(name, "Toy", MappingProxyType(axes), validity, 1.0, "test", **kw)


def single_pole(a, num, pole, f=0.0, style="lambda2"):
    return SellmeierForm(a, (ResonanceTerm(style, num, pole),), f)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
