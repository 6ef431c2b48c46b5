"""Two-parameter force scans and zero-force contours."""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import RunConfig, build_piston, build_spectrum
from .errors import (CasimirError, ConfigError, DegenerateWall, InadmissibleConfig, ParseError,
                     PhysicsError, ToleranceNotMet, ZeroCrossing, ZeroModeError)
from .zeta_force import casimir_force

__all__ = ["CSV_HEADER", "ScanCell", "ScanResult", "ContourResult", "grid_axes", "evaluate_cell",
           "run_scan", "write_csv", "write_jsonl", "read_csv", "zero_force_curves"]

CSV_HEADER = ("axis1", "axis2", "force", "quad_err", "tail_bound", "admissible")


@dataclass
class ScanCell:
    axis1: float
    axis2: float
    force: float = math.nan
    quad_err: float = math.nan
    tail_bound: float = math.nan
    admissible: bool = False
    status: str = "ok"          # ok | inadmissible | tolerance | error
    error: Optional[str] = None
    exit_code: int = 0
    norms: dict = field(default_factory=dict)


@dataclass
class ScanResult:
    axes: list
    cells: list

    @property
    def exit_code(self) -> int:
        return max((c.exit_code for c in self.cells), default=0)

    def grid(self):
        """(axis1 values, axis2 values, force array, admissible mask)."""
        x, y = grid_axes(self.axes)
        f = np.array([c.force for c in self.cells], dtype=float).reshape(len(x), len(y))
        ok = np.array([c.admissible and c.status == "ok" for c in self.cells]).reshape(f.shape)
        return x, y, f, ok


def grid_axes(axes):
    return tuple(np.linspace(lo, hi, steps) for _, lo, hi, steps in axes)


# worker state: spectra are built once per process
_STATE = {}


def _init_worker(rc: RunConfig):
    _STATE["rc"] = rc
    _STATE["spectrum"] = build_spectrum(rc)


def evaluate_cell(point) -> ScanCell:
    """Force at one grid point ``(x1, x2)``; failures become cell records."""
    rc, spectrum = _STATE["rc"], _STATE["spectrum"]
    x1, x2 = point
    cell = ScanCell(float(x1), float(x2))
    vals = dict(rc.values)
    vals[rc.axes[0][0]] = cell.axis1
    vals[rc.axes[1][0]] = cell.axis2
    try:
        cfg, cell.norms = build_piston(vals, rc.diagnostic)
        res = casimir_force(cfg, spectrum, rc.tol)
    except (InadmissibleConfig, ZeroCrossing, ZeroModeError) as exc:
        cell.status, cell.error = "inadmissible", str(exc)
        return cell
    except ToleranceNotMet as exc:
        b = exc.best
        cell.force, cell.quad_err, cell.tail_bound = b.force, b.quadrature_error, b.tail_bound
        cell.admissible, cell.status, cell.error, cell.exit_code = True, "tolerance", str(exc), 4
        return cell
    except ConfigError as exc:
        cell.status, cell.error, cell.exit_code = "error", str(exc), 2
        return cell
    except (PhysicsError, DegenerateWall, CasimirError) as exc:
        cell.status, cell.error, cell.exit_code = "error", f"{type(exc).__name__}: {exc}", 3
        return cell
    cell.force, cell.quad_err, cell.tail_bound = res.force, res.quadrature_error, res.tail_bound
    cell.admissible = True
    return cell


def run_scan(rc: RunConfig, threads: Optional[int] = None) -> ScanResult:
    """Evaluate the force on the configured grid (axis1-major order).

    Output order and values do not depend on ``threads``.
    """
    if len(rc.axes) != 2:
        raise ConfigError("two scan axes required", "scan")
    threads = rc.threads if threads is None else threads
    x, y = grid_axes(rc.axes)
    points = [(a, b) for a in x for b in y]
    if threads <= 1:
        _init_worker(rc)
        cells = [evaluate_cell(p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker,
                                 initargs=(rc,)) as ex:
            cells = list(ex.map(evaluate_cell, points, chunksize=max(1, len(points) // (4 * threads))))
    return ScanResult(list(rc.axes), cells)


def write_csv(result: ScanResult, path):
    """CSV with header ``axis1,axis2,force,quad_err,tail_bound,admissible``.

    Floats are written with ``repr`` so they round-trip exactly.  Per-cell
    error records go to ``<path>.errors.jsonl`` when there are any.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in result.cells:
            w.writerow([repr(c.axis1), repr(c.axis2), repr(float(c.force)), repr(float(c.quad_err)),
                        repr(float(c.tail_bound)), "1" if c.admissible else "0"])
    errs = [c for c in result.cells if c.exit_code]
    if errs:
        with open(f"{path}.errors.jsonl", "w") as fh:
            for c in errs:
                fh.write(json.dumps(_record(c)) + "\n")


def _record(c: ScanCell) -> dict:
    def num(v):
        return v if math.isfinite(v) else None
    return {"axis1": c.axis1, "axis2": c.axis2, "force": num(c.force),
            "quad_err": num(c.quad_err), "tail_bound": num(c.tail_bound),
            "admissible": c.admissible, "status": c.status, "error": c.error, **c.norms}


def write_jsonl(result: ScanResult, path):
    with open(path, "w") as fh:
        for c in result.cells:
            fh.write(json.dumps(_record(c)) + "\n")


def read_csv(path):
    """Read a scan CSV back into ``(x, y, force, admissible, error_bound)`` grids.

    Raises
    ------
    ParseError
        Wrong header, malformed rows, or points not on a full grid.
    """
    rows = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ParseError(f"expected header {','.join(CSV_HEADER)}", 1)
        for lineno, row in enumerate(r, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise ParseError(f"expected 6 fields, got {len(row)}", lineno)
            try:
                vals = [float(v) for v in row[:5]]
                adm = bool(int(row[5]))
            except ValueError:
                raise ParseError("malformed number", lineno) from None
            rows.append((*vals, adm))
    if not rows:
        raise ParseError("no data rows", 2)
    x = np.unique([p[0] for p in rows])
    y = np.unique([p[1] for p in rows])
    if len(x) * len(y) != len(rows) or len(x) < 2 or len(y) < 2:
        raise ParseError("points do not form a complete grid", len(rows) + 1)
    f = np.full((len(x), len(y)), np.nan)
    err = np.full(f.shape, np.nan)
    ok = np.zeros(f.shape, dtype=bool)
    for a, b, force, qe, tb, adm in rows:
        i, j = np.searchsorted(x, a), np.searchsorted(y, b)
        f[i, j] = force
        err[i, j] = qe + tb
        ok[i, j] = adm and math.isfinite(force)
    return x, y, f, ok, err


@dataclass
class ContourResult:
    """Zero-force polylines in (axis1, axis2) coordinates.

    ``identically_zero`` is set when every admissible sample vanishes, in
    which case no curves are reported.
    """

    curves: list
    identically_zero: bool = False

    def to_dict(self):
        return {"identically_zero": self.identically_zero,
                "curves": [c.tolist() for c in self.curves]}


def zero_force_curves(x, y, f, admissible=None, zero_tol: float = 0.0) -> ContourResult:
    """Marching-squares zero level set of ``f[i, j] = F(x[i], y[j])``.

    Only cells whose four corners are admissible contribute.  Samples with
    ``|f| <= zero_tol`` (e.g. the largest error bound of the scan) are set
    to exactly zero; a zero corner counts as non-negative and a crossing at
    a zero corner is placed on that grid point.  Saddle cells are resolved
    with the cell-centre average.  A crossing on an admissible edge that
    touches no admissible cell is returned as a one-point curve.
    """
    x, y, f = np.asarray(x, float), np.asarray(y, float), np.array(f, float)
    ok = np.isfinite(f) if admissible is None else (np.asarray(admissible) & np.isfinite(f))
    if not ok.any():
        return ContourResult([])
    f[ok & (np.abs(f) <= zero_tol)] = 0.0
    if np.all(f[ok] == 0.0):
        return ContourResult([], identically_zero=True)
    pos = f >= 0.0

    def node(kind, i, j):
        # crossing on an edge; collapse onto the grid point when it sits on one
        i1, j1 = (i + 1, j) if kind == "h" else (i, j + 1)
        if f[i, j] == 0.0:
            return ("p", i, j)
        if f[i1, j1] == 0.0:
            return ("p", i1, j1)
        return (kind, i, j)

    def point(key):
        kind, i, j = key
        if kind == "p":
            return (x[i], y[j])
        if kind == "h":   # edge (i, j) - (i+1, j)
            f0, f1 = f[i, j], f[i + 1, j]
            t = f0 / (f0 - f1)
            return (x[i] + t * (x[i + 1] - x[i]), y[j])
        f0, f1 = f[i, j], f[i, j + 1]
        t = f0 / (f0 - f1)
        return (x[i], y[j] + t * (y[j + 1] - y[j]))

    adj = {}

    def link(k1, k2):
        adj.setdefault(k1, []).append(k2)
        adj.setdefault(k2, []).append(k1)

    for i in range(len(x) - 1):
        for j in range(len(y) - 1):
            if not (ok[i, j] and ok[i + 1, j] and ok[i, j + 1] and ok[i + 1, j + 1]):
                continue
            # corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
            c = [pos[i, j], pos[i + 1, j], pos[i + 1, j + 1], pos[i, j + 1]]
            edges = [node("h", i, j), node("v", i + 1, j), node("h", i, j + 1), node("v", i, j)]
            cut = [e for k, e in enumerate(edges) if c[k] != c[(k + 1) % 4]]
            if len(cut) == 2:
                if cut[0] != cut[1]:
                    link(*cut)
            elif len(cut) == 4:
                centre = 0.25 * (f[i, j] + f[i + 1, j] + f[i + 1, j + 1] + f[i, j + 1])
                if (centre >= 0.0) == c[0]:
                    link(edges[0], edges[1])
                    link(edges[2], edges[3])
                else:
                    link(edges[3], edges[0])
                    link(edges[1], edges[2])

    # sign changes on admissible edges that belong to no admissible cell
    # (e.g. an isolated admissible column) become single-point components
    for i in range(len(x)):
        for j in range(len(y)):
            for kind, i1, j1 in (("h", i + 1, j), ("v", i, j + 1)):
                if i1 >= len(x) or j1 >= len(y) or not (ok[i, j] and ok[i1, j1]):
                    continue
                if pos[i, j] == pos[i1, j1]:
                    continue
                key = node(kind, i, j)
                if key not in adj:
                    adj[key] = []

    curves, seen = [], set()
    # open chains first (start at degree-1 nodes), then closed loops
    starts = [k for k, v in adj.items() if len(v) <= 1] + list(adj)
    for s in starts:
        if s in seen:
            continue
        chain, prev, cur = [s], None, s
        seen.add(s)
        while True:
            nxt = [n for n in adj[cur] if n != prev and n not in seen]
            if not nxt:
                if prev is not None and s in adj[cur] and len(chain) > 2:
                    chain.append(s)   # close the loop
                break
            prev, cur = cur, nxt[0]
            seen.add(cur)
            chain.append(cur)
        curves.append(np.array([point(k) for k in chain]))
    return ContourResult(curves)
