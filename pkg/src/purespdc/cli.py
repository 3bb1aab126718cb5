"""Command-line front end.

Units on the command line: wavelengths and bandwidths in nm, lengths in mm,
poling periods in um. Exit codes: 0 success, 1 computation failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import difflib
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__, export
from .gvm import ASYMMETRIC_BRANCHES, NoGvmPointError, degenerate_poling_period
from .gvm import solve_gvm_asymmetric, solve_gvm_symmetric
from .hom import hom_heralded, hom_signal_idler
from .jsa import MIN_POINTS, GridError, degenerate_source
from .registry import (REGISTRY_ENV, RegistryError, WavelengthRangeError, list_crystals,
                       load_registry)
from .reproduce import FIGURES, format_checks, reproduce
from .schmidt import optimize_pump_bandwidth, purity_scan, schmidt_decompose, wavelength_range

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_USAGE = 2

log = logging.getLogger("purespdc")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    registry: Path | None
    out_dir: Path
    n: int
    include_pm_phase: bool
    fmt: str

    def __post_init__(self):
        if self.n < MIN_POINTS:
            raise UsageError(f"grid size must be at least {MIN_POINTS}, got {self.n}")


def _config(args) -> RunConfig:
    return RunConfig(
        registry=Path(args.registry) if args.registry else None,
        out_dir=Path(args.out_dir),
        n=args.points,
        include_pm_phase=not args.no_pm_phase,
        fmt=args.format,
    )


def _registry(cfg: RunConfig):
    try:
        return load_registry(cfg.registry)
    except FileNotFoundError as exc:
        raise UsageError(f"registry file not found: {exc.filename}") from None
    except RegistryError as exc:
        raise UsageError(f"cannot load registry: {exc}") from None


def _crystal(registry, name: str):
    if name in registry:
        return registry.get(name)
    close = difflib.get_close_matches(name.upper(), registry.names(), n=3, cutoff=0.4)
    hint = f" Did you mean: {', '.join(close)}?" if close else ""
    raise UsageError(f"unknown crystal {name!r}. Available: {', '.join(registry.names())}.{hint}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_crystals(args, cfg: RunConfig) -> int:
    rows = list_crystals(_registry(cfg))
    if cfg.fmt == "json":
        data = [{"name": n, "composition": c, "d_eff_pm_per_V": d, "validity_um": list(v)}
                for n, c, d, v in rows]
        sys.stdout.write(export.dumps_json(data))
        return EXIT_OK
    print(f"{'name':<8} {'composition':<12} {'d_eff (pm/V)':>12}  validity (um)")
    for n, c, d, (lo, hi) in rows:
        print(f"{n:<8} {c:<12} {d:>12.1f}  {lo:g}-{hi:g}")
    return EXIT_OK


def cmd_gvm(args, cfg: RunConfig) -> int:
    rec = _crystal(_registry(cfg), args.crystal)
    if args.condition == "symmetric":
        sols = [solve_gvm_symmetric(rec)]
    else:
        sols = [s for b in ASYMMETRIC_BRANCHES for s in solve_gvm_asymmetric(rec, branch=b)]
        if not sols:
            raise NoGvmPointError(f"{rec.name}: no asymmetric GVM point in the validity range")
        sols.sort(key=lambda s: s.lambda_nm)
    out = []
    for s in sols:
        period = degenerate_poling_period(rec, s.lambda_nm).period_um
        out.append({"crystal": rec.name, "condition": s.condition,
                    "lambda_nm": s.lambda_nm, "period_um": period})
    if cfg.fmt == "json":
        sys.stdout.write(export.dumps_json(out))
    else:
        for r in out:
            print(f"{r['crystal']}  {r['condition']:<20} lambda = {r['lambda_nm']:.2f} nm  "
                  f"period = {r['period_um']:.2f} um")
    return EXIT_OK


def cmd_jsa(args, cfg: RunConfig) -> int:
    rec = _crystal(_registry(cfg), args.crystal)
    bw = args.pump_bw
    if args.optimize_bw:
        bw = optimize_pump_bandwidth(rec, args.lam, args.length, n=cfg.n, period_um=args.period,
                                     include_pm_phase=cfg.include_pm_phase).fwhm_nm
    jsa = degenerate_source(rec, args.lam, args.length, bw, period_um=args.period, n=cfg.n,
                            include_pm_phase=cfg.include_pm_phase)
    sch = schmidt_decompose(jsa)
    files = export.write_jsa(jsa, cfg.out_dir, f"{rec.name}_{args.lam:g}nm", purity=sch.purity,
                             heatmap=args.heatmap)
    summary = {
        "crystal": rec.name,
        "lambda_nm": args.lam,
        "length_mm": args.length,
        "period_um": jsa.meta["period_um"],
        "pump_fwhm_nm": bw,
        "purity": sch.purity,
        "schmidt_number": sch.schmidt_number,
        "files": [str(p) for p in files],
    }
    if cfg.fmt == "json":
        sys.stdout.write(export.dumps_json(summary))
    else:
        for k, v in summary.items():
            print(f"{k}: {', '.join(v) if isinstance(v, list) else v}")
    return EXIT_OK


def cmd_scan(args, cfg: RunConfig) -> int:
    rec = _crystal(_registry(cfg), args.crystal)
    try:
        lams = wavelength_range(args.start, args.stop, args.step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = purity_scan(rec, lams, args.length, pump_fwhm_nm=args.pump_bw, n=cfg.n,
                       include_pm_phase=cfg.include_pm_phase)
    if cfg.fmt == "json":
        text = export.dumps_json([{"lambda_nm": r.lambda_nm, "period_um": r.period_um,
                                   "pump_fwhm_nm": r.pump_fwhm_nm, "purity": r.purity,
                                   "error": r.error} for r in rows])
    else:
        policy = "optimized" if args.pump_bw is None else f"fixed {args.pump_bw:g} nm"
        text = export.scan_csv(rows, {"crystal": rec.name, "length_mm": args.length, "pump_policy": policy})
    _emit(text, args.out)
    return EXIT_COMPUTE if any(r.error for r in rows) else EXIT_OK


def cmd_hom(args, cfg: RunConfig) -> int:
    rec = _crystal(_registry(cfg), args.crystal)
    jsa = degenerate_source(rec, args.lam, args.length, args.pump_bw, period_um=args.period,
                            n=cfg.n, include_pm_phase=cfg.include_pm_phase)
    if args.signal_idler:
        trace, mode = hom_signal_idler(jsa), "signal-idler"
    else:
        trace, mode = hom_heralded(jsa, jsa, args.herald), f"herald {args.herald}"
    if cfg.fmt == "json":
        text = export.dumps_json({"mode": mode, **export.hom_summary(trace),
                                  "tau_ps": trace.delays_ps.tolist(),
                                  "coincidence_probability": trace.probability.tolist()})
    else:
        text = export.hom_csv(trace, {"crystal": rec.name, "lambda_nm": args.lam,
                                      "pump_fwhm_nm": args.pump_bw, "mode": mode})
    _emit(text, args.out)
    return EXIT_OK


def cmd_reproduce(args, cfg: RunConfig) -> int:
    if args.figure not in FIGURES:
        raise UsageError(f"unknown figure {args.figure!r}; choose from {', '.join(FIGURES)}")
    checks = reproduce(args.figure, _registry(cfg), cfg.out_dir / args.figure, cfg.n)
    sys.stdout.write(format_checks(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_COMPUTE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--registry", default=None,
                        help=f"crystal registry file (default: shipped file, or ${REGISTRY_ENV})")
    common.add_argument("--out-dir", default="purespdc_out", help="directory for written artifacts")
    common.add_argument("-N", "--points", type=int, default=512, help="grid points per frequency axis")
    common.add_argument("--no-pm-phase", action="store_true",
                        help="drop the exp(i dk L/2) factor from the phase-matching function")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="purespdc", description="Spectrally pure SPDC in KTP-family crystals.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("crystals", parents=[common], help="list the crystal registry")

    g = sub.add_parser("gvm", parents=[common], help="solve a group-velocity-matching condition")
    g.add_argument("--crystal", required=True)
    g.add_argument("--condition", choices=("symmetric", "asymmetric"), default="symmetric")

    def source_args(sp, pump_required=True):
        sp.add_argument("--crystal", required=True)
        sp.add_argument("--lambda", dest="lam", type=float, required=True, help="degenerate wavelength (nm)")
        sp.add_argument("--length", type=float, default=30.0, help="crystal length (mm)")
        sp.add_argument("--period", type=float, default=None, help="poling period (um); default phase matches")
        if pump_required:
            sp.add_argument("--pump-bw", type=float, required=True, help="pump FWHM (nm)")

    j = sub.add_parser("jsa", parents=[common], help="compute a joint spectral amplitude")
    source_args(j, pump_required=False)
    bw = j.add_mutually_exclusive_group(required=True)
    bw.add_argument("--pump-bw", type=float, help="pump FWHM (nm)")
    bw.add_argument("--optimize-bw", action="store_true", help="choose the purity-maximising pump FWHM")
    j.add_argument("--heatmap", action="store_true", help="also write a PNG of the JSI")

    s = sub.add_parser("scan", parents=[common], help="purity across degenerate wavelengths")
    s.add_argument("--crystal", required=True)
    s.add_argument("--from", dest="start", type=float, required=True)
    s.add_argument("--to", dest="stop", type=float, required=True)
    s.add_argument("--step", type=float, default=50.0)
    s.add_argument("--length", type=float, default=30.0)
    s.add_argument("--pump-bw", type=float, default=None, help="fixed pump FWHM (nm); default optimizes per row")
    s.add_argument("--out", default=None, help="write to this file instead of stdout")

    h = sub.add_parser("hom", parents=[common], help="Hong-Ou-Mandel trace for two identical sources")
    source_args(h)
    mode = h.add_mutually_exclusive_group()
    mode.add_argument("--herald", choices=("idler", "signal"), default="idler")
    mode.add_argument("--signal-idler", action="store_true")
    h.add_argument("--out", default=None, help="write to this file instead of stdout")

    r = sub.add_parser("reproduce", parents=[common], help="recompute a published table or figure")
    r.add_argument("figure", help=f"one of {', '.join(FIGURES)}")
    return p


COMMANDS = {"crystals": cmd_crystals, "gvm": cmd_gvm, "jsa": cmd_jsa, "scan": cmd_scan,
            "hom": cmd_hom, "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, _config(args))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoGvmPointError, GridError, WavelengthRangeError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
