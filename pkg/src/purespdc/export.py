"""Deterministic CSV/JSON/PNG writers for JSAs, scans and HOM traces.

Floats are written with ``repr`` so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .hom import HomTrace
from .jsa import JointAmplitude
from .schmidt import PurityScanRow

SCAN_HEADER = ("lambda_nm", "period_um", "pump_fwhm_nm", "purity")
HOM_HEADER = ("tau_ps", "coincidence_probability")


def _num(x) -> str:
    x = float(x)
    return repr(x) if np.isfinite(x) else "nan"


def _comments(meta: dict | None) -> str:
    if not meta:
        return ""
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def _rows_csv(header, rows, meta=None) -> str:
    buf = io.StringIO()
    buf.write(_comments(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else _num(c) for c in row])
    return buf.getvalue()


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def jsi_csv(jsa: JointAmplitude, meta: dict | None = None) -> str:
    """|f|^2 matrix; rows follow the signal axis, columns the idler axis."""
    jsi = jsa.intensity
    buf = io.StringIO()
    buf.write(_comments(meta))
    for row in jsi:
        buf.write(",".join(_num(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def jsa_metadata(jsa: JointAmplitude, purity: float | None = None) -> dict:
    meta = dict(jsa.meta)
    meta["signal_nm"] = [float(v) for v in jsa.grid.signal_nm()]
    meta["idler_nm"] = [float(v) for v in jsa.grid.idler_nm()]
    meta["grid"] = jsa.grid.meta()
    meta["rows"] = "signal"
    meta["columns"] = "idler"
    if purity is not None:
        meta["purity"] = float(purity)
    return meta


def jsi_png(jsa: JointAmplitude, path: Path) -> None:
    """8-bit grayscale heatmap, signal frequency increasing upward, idler to the right."""
    from PIL import Image

    jsi = jsa.intensity
    img = np.round(255.0 * jsi / jsi.max()).astype(np.uint8)
    # image rows run top to bottom, so flip to put high signal frequency on top
    Image.fromarray(np.flipud(img)).save(path, format="PNG", optimize=False)


def write_jsa(jsa: JointAmplitude, out_dir: Path, stem: str = "jsa", *,
              purity: float | None = None, heatmap: bool = False) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}_jsi.csv"
    meta_path = out_dir / f"{stem}_meta.json"
    header = {k: jsa.meta[k] for k in sorted(jsa.meta)}
    csv_path.write_text(jsi_csv(jsa, header))
    meta_path.write_text(dumps_json(jsa_metadata(jsa, purity)))
    paths = [csv_path, meta_path]
    if heatmap:
        png = out_dir / f"{stem}_jsi.png"
        jsi_png(jsa, png)
        paths.append(png)
    return paths


def scan_csv(rows: list[PurityScanRow], meta: dict | None = None) -> str:
    body = [(r.lambda_nm, r.period_um, r.pump_fwhm_nm, r.purity) for r in rows]
    text = _rows_csv(SCAN_HEADER, body, meta)
    errors = [f"# error at {r.lambda_nm!r} nm: {r.error}\n" for r in rows if r.error]
    return text + "".join(errors)


def hom_summary(trace: HomTrace) -> dict:
    return {
        "visibility": float(trace.visibility),
        "width_ps": None if trace.width_ps is None else float(trace.width_ps),
        "baseline": float(trace.baseline),
    }


def hom_csv(trace: HomTrace, meta: dict | None = None) -> str:
    s = hom_summary(trace)
    width = "undefined" if s["width_ps"] is None else _num(s["width_ps"])
    summary = f"# summary: visibility={_num(s['visibility'])} width_ps={width} baseline={_num(s['baseline'])}\n"
    return _rows_csv(HOM_HEADER, trace.rows(), meta) + summary
