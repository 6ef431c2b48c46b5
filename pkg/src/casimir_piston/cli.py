"""Command-line entry point: ``casimir-piston single|scan|contours``.

Exit codes: 0 success, 2 configuration/input error, 3 physically
inadmissible configuration, 4 requested tolerance not met.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .boundary import classify_extension
from .config import build_piston, build_spectrum, read_config
from .errors import (CasimirError, ConfigError, MissingZetaData, ParseError, PhysicsError,
                     ToleranceNotMet)
from .scan import read_csv, run_scan, write_csv, write_jsonl, zero_force_curves
from .zeta_force import ZetaNData, casimir_energy_report, casimir_force

__all__ = ["main", "run_single", "build_parser"]

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_TOLERANCE = 0, 2, 3, 4


def _override(rc, args):
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("must be positive", "--tol")
        rc.tol = args.tol
    if args.lambda_max is not None:
        if not args.lambda_max > 0:
            raise ConfigError("must be positive", "--lambda-max")
        rc.lambda_max = args.lambda_max
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("must be >= 1", "--threads")
        rc.threads = args.threads
    if args.out is not None:
        rc.out_path = args.out
    return rc


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def run_single(rc) -> dict:
    """Force (and energy when transverse zeta data are available) for one configuration."""
    cfg, norms = build_piston(rc.values, rc.diagnostic)
    spectrum = build_spectrum(rc)
    ext = classify_extension(cfg.wall)
    report = {
        "version": __version__,
        "command": "single",
        "input": rc.echo(),
        "axis_norms": norms,
        "wall": {"bound_states": ext.kind.value, "zero_mode": ext.zero_mode,
                 "momenta": list(ext.momenta)},
    }
    res = casimir_force(cfg, spectrum, rc.tol)
    report["force"] = {"force": res.force, "quadrature_error": res.quadrature_error,
                       "tail_bound": res.tail_bound, "modes_used": res.modes_used,
                       "lambda_cut": res.lambda_cut,
                       "zero_modes_included": res.zero_modes_included}
    zn = rc.zeta_n
    if zn is None and spectrum.manifold_tag == "point":
        zn = ZetaNData.trivial(1)
    if zn is None:
        report["energy"] = None
    else:
        try:
            e = casimir_energy_report(cfg, spectrum, zn, tol=min(rc.tol, 1e-8))
        except MissingZetaData as exc:
            raise ConfigError(str(exc), "zeta_n") from None
        report["energy"] = {
            "pole_coefficient": e.pole_coefficient, "finite_part": e.finite_part,
            "z_at_minus_half": e.z_at_minus_half,
            "scale_dependent": bool(e.ambiguity_note),
            "drivers": list(e.ambiguity_note.drivers),
            "lambda_zero_policy": e.ambiguity_note.lambda_zero_policy,
            "components": {k: _jsonable(v) for k, v in e.components.items()}}
    return report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="casimir-piston",
                                description="Casimir force on a piston with general point interactions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float, help="absolute error target for the force")
        sp.add_argument("--lambda-max", type=float, dest="lambda_max",
                        help="initial transverse eigenvalue cutoff")
        sp.add_argument("--threads", type=int, help="worker processes (scan only)")
        sp.add_argument("--out", help="output path")

    s = sub.add_parser("single", help="force and energy for one configuration")
    s.add_argument("config")
    common(s)
    s = sub.add_parser("scan", help="force on a two-parameter grid")
    s.add_argument("config")
    common(s)
    s = sub.add_parser("contours", help="zero-force curves from a scan CSV")
    s.add_argument("csv")
    s.add_argument("--out", help="output path for the JSON curves")
    return p


def _emit(doc, path):
    text = json.dumps(doc, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _fail(code, exc):
    print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "contours":
            x, y, f, ok, err = read_csv(args.csv)
            ztol = float(np.max(err[ok])) if ok.any() else 0.0
            doc = {"version": __version__, "source": args.csv, "zero_tol": ztol,
                   **zero_force_curves(x, y, f, ok, ztol).to_dict()}
            _emit(doc, args.out)
            return EXIT_OK
        rc = _override(read_config(args.config, scan=args.command == "scan"), args)
        if args.command == "single":
            _emit(run_single(rc), rc.out_path)
            return EXIT_OK
        result = run_scan(rc)
        out = rc.out_path or "scan.csv"
        (write_jsonl if rc.out_format == "jsonl" else write_csv)(result, out)
        bad = [c for c in result.cells if c.exit_code]
        if bad:
            print(f"{len(bad)} of {len(result.cells)} cells failed; see error records",
                  file=sys.stderr)
        return result.exit_code
    except (ConfigError, ParseError, MissingZetaData) as exc:
        return _fail(EXIT_CONFIG, exc)
    except OSError as exc:
        return _fail(EXIT_CONFIG, exc)
    except ToleranceNotMet as exc:
        return _fail(EXIT_TOLERANCE, exc)
    except PhysicsError as exc:
        return _fail(EXIT_PHYSICS, f"{type(exc).__name__}: {exc}")
    except CasimirError as exc:
        return _fail(EXIT_TOLERANCE, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
