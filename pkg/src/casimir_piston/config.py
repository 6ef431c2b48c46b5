"""INI-style configuration files for the command-line tool."""
from __future__ import annotations

import ast
import configparser
import math
import operator
from dataclasses import dataclass, field
from typing import Optional

from .boundary import BoundaryUnitary, PistonConfig
from .errors import ConfigError
from .spectra import (TransverseSpectrum, disk_spectrum, load_spectrum, point_spectrum,
                      sphere_spectrum)
from .zeta_force import ZetaNData

__all__ = ["RunConfig", "parse_value", "read_config", "build_piston", "build_spectrum",
           "PARAMETERS"]

# scan-able parameter -> (section, key)
PARAMETERS = {
    "a": ("geometry", "a"), "L": ("geometry", "L"),
    "alpha": ("outer", "alpha"), "beta": ("outer", "beta"),
    "n1": ("outer", "n1"), "n2": ("outer", "n2"), "n3": ("outer", "n3"),
    "theta": ("wall", "theta"), "gamma": ("wall", "gamma"),
    "q1": ("wall", "q1"), "q2": ("wall", "q2"), "q3": ("wall", "q3"),
}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow,
        ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_value(text: str, key: str = None) -> float:
    """Parse a number or a small arithmetic expression in ``pi`` (e.g. ``-pi/2``)."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError
    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError):
        raise ConfigError(f"cannot parse numeric value {text!r}", key) from None


@dataclass
class RunConfig:
    """Parsed configuration file.

    ``values`` maps scan-able parameter names to floats; the remaining
    fields carry manifold, numerics, scan and output settings.
    """

    values: dict
    manifold: str = "point"
    d: Optional[int] = None
    spectrum_file: Optional[str] = None
    tol: float = 1e-8
    lambda_max: float = 40.0
    threads: int = 1
    diagnostic: bool = False
    axes: list = field(default_factory=list)
    out_path: Optional[str] = None
    out_format: str = "csv"
    zeta_n: Optional[ZetaNData] = None

    def echo(self) -> dict:
        """Sections/keys that reproduce this configuration."""
        sec = {"geometry": {"manifold": self.manifold},
               "outer": {}, "wall": {},
               "numerics": {"tol": repr(self.tol), "lambda_max": repr(self.lambda_max),
                            "threads": str(self.threads),
                            "diagnostic": str(self.diagnostic).lower()}}
        if self.d is not None:
            sec["geometry"]["d"] = str(self.d)
        if self.spectrum_file:
            sec["geometry"]["spectrum_file"] = self.spectrum_file
        for name, (s, k) in PARAMETERS.items():
            if name in self.values:
                sec[s][k] = repr(self.values[name])
        if self.axes:
            sec["scan"] = {f"axis{i + 1}": f"{n} {lo!r} {hi!r} {st}"
                           for i, (n, lo, hi, st) in enumerate(self.axes)}
        if self.out_path:
            sec["output"] = {"path": self.out_path, "format": self.out_format}
        if self.zeta_n is not None:
            z = self.zeta_n
            zs = {"zeta_minus1": repr(z.zeta_minus1), "zeta_prime_minus1": repr(z.zeta_prime_minus1),
                  "zeta_0": repr(z.zeta_0), "zeta_prime_0": repr(z.zeta_prime_0)}
            for i, (r, f) in sorted(z.half_points.items()):
                zs[f"res_{i}"] = repr(r)
                zs[f"fp_{i}"] = repr(f)
            sec["zeta_n"] = zs
        return sec


def _get(cp, section, key, required=True, default=None):
    if cp.has_option(section, key):
        return cp.get(section, key)
    if required:
        raise ConfigError("missing required key", f"{section}.{key}")
    return default


def read_config(path, scan: bool = False) -> RunConfig:
    """Read and validate a configuration file.

    Raises
    ------
    ConfigError
        Missing keys, malformed values, unknown manifold or scan axes.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    axes = []
    if scan:
        for i in (1, 2):
            raw = _get(cp, "scan", f"axis{i}")
            parts = raw.split()
            if len(parts) != 4:
                raise ConfigError("expected 'name lo hi steps'", f"scan.axis{i}")
            name = parts[0]
            if name not in PARAMETERS:
                raise ConfigError(f"unknown scan parameter {name!r}", f"scan.axis{i}")
            lo = parse_value(parts[1], f"scan.axis{i}")
            hi = parse_value(parts[2], f"scan.axis{i}")
            try:
                steps = int(parts[3])
            except ValueError:
                raise ConfigError("steps must be an integer", f"scan.axis{i}") from None
            if steps < 2:
                raise ConfigError("steps must be >= 2", f"scan.axis{i}")
            axes.append((name, lo, hi, steps))
        if axes[0][0] == axes[1][0]:
            raise ConfigError("the two scan axes must differ", "scan.axis2")
    scanned = {n for n, *_ in axes}

    values = {}
    for name, (sec, key) in PARAMETERS.items():
        optional = name in scanned or name.startswith(("n", "q"))
        raw = _get(cp, sec, key, required=not optional)
        if raw is not None:
            values[name] = parse_value(raw, f"{sec}.{key}")
    for name in ("n1", "n2", "n3", "q1", "q2", "q3"):
        values.setdefault(name, 0.0)

    rc = RunConfig(values, axes=axes)
    rc.manifold = _get(cp, "geometry", "manifold", required=False, default="point").strip().lower()
    if rc.manifold not in ("point", "sphere", "disk", "file"):
        raise ConfigError(f"unknown manifold {rc.manifold!r}", "geometry.manifold")
    if rc.manifold == "sphere":
        try:
            rc.d = int(_get(cp, "geometry", "d"))
        except ValueError:
            raise ConfigError("must be an integer", "geometry.d") from None
        if rc.d < 1:
            raise ConfigError("must be >= 1", "geometry.d")
    if rc.manifold == "file":
        rc.spectrum_file = _get(cp, "geometry", "spectrum_file")
        d = _get(cp, "geometry", "d", required=False)
        rc.d = int(d) if d is not None else None
    rc.tol = parse_value(_get(cp, "numerics", "tol", False, "1e-8"), "numerics.tol")
    rc.lambda_max = parse_value(_get(cp, "numerics", "lambda_max", False, "40"),
                                "numerics.lambda_max")
    try:
        rc.threads = int(_get(cp, "numerics", "threads", False, "1"))
        rc.diagnostic = cp.getboolean("numerics", "diagnostic", fallback=False)
    except ValueError as exc:
        raise ConfigError(str(exc), "numerics") from None
    if not rc.tol > 0:
        raise ConfigError("must be positive", "numerics.tol")
    if not rc.lambda_max > 0:
        raise ConfigError("must be positive", "numerics.lambda_max")
    if rc.threads < 1:
        raise ConfigError("must be >= 1", "numerics.threads")
    rc.out_path = _get(cp, "output", "path", required=False)
    rc.out_format = _get(cp, "output", "format", False, "csv").strip().lower()
    if rc.out_format not in ("csv", "jsonl", "json-lines"):
        raise ConfigError(f"unknown format {rc.out_format!r}", "output.format")
    if rc.out_format == "json-lines":
        rc.out_format = "jsonl"
    if cp.has_section("zeta_n"):
        z = {k: parse_value(v, f"zeta_n.{k}") for k, v in cp.items("zeta_n")}
        hp = {}
        for k in z:
            if k.startswith(("res_", "fp_")):
                try:
                    i = int(k.split("_", 1)[1])
                except ValueError:
                    raise ConfigError("bad index", f"zeta_n.{k}") from None
                hp[i] = (z.get(f"res_{i}", 0.0), z.get(f"fp_{i}", 0.0))
        try:
            rc.zeta_n = ZetaNData(z.get("zeta_minus1", 0.0), z.get("zeta_prime_minus1", 0.0),
                                  z.get("zeta_0", 0.0), z.get("zeta_prime_0", 0.0), hp)
        except ValueError as exc:
            raise ConfigError(str(exc), "zeta_n") from None
    return rc


def build_piston(values: dict, diagnostic: bool = False):
    """PistonConfig from parameter values; also returns the raw axis norms.

    Raises
    ------
    ConfigError
        Zero axis with nonzero mixing angle, or invalid geometry.
    """
    try:
        outer, n_norm = BoundaryUnitary.from_raw(values["alpha"], values["beta"],
                                                 (values["n1"], values["n2"], values["n3"]))
    except ValueError as exc:
        raise ConfigError(str(exc), "outer.n") from None
    try:
        wall, q_norm = BoundaryUnitary.from_raw(values["theta"], values["gamma"],
                                                (values["q1"], values["q2"], values["q3"]))
    except ValueError as exc:
        raise ConfigError(str(exc), "wall.q") from None
    try:
        cfg = PistonConfig(outer, wall, values["L"], values["a"], diagnostic)
    except ValueError as exc:
        raise ConfigError(str(exc), "geometry") from None
    return cfg, {"outer_axis_norm": n_norm, "wall_axis_norm": q_norm}


def build_spectrum(rc: RunConfig) -> TransverseSpectrum:
    """Transverse spectrum selected by the configuration."""
    if rc.manifold == "point":
        return point_spectrum()
    if rc.manifold == "sphere":
        return sphere_spectrum(rc.d, rc.lambda_max)
    if rc.manifold == "disk":
        return disk_spectrum(rc.lambda_max)
    try:
        return load_spectrum(rc.spectrum_file, rc.d)
    except OSError as exc:
        raise ConfigError(f"cannot read spectrum file: {exc}", "geometry.spectrum_file") from None
