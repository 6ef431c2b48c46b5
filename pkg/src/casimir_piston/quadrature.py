"""Batched adaptive Gauss-Legendre quadrature.

Many integrands that share one evaluation routine (one per transverse mode)
are refined together: every round evaluates all pending panels in a single
vectorized call.  A panel is accepted once its Gauss value agrees with the
sum of its two halves to within its share of the tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["BatchResult", "integrate_batch"]

_NODES = {}


def _rule(order):
    if order not in _NODES:
        _NODES[order] = np.polynomial.legendre.leggauss(order)
    return _NODES[order]


@dataclass(frozen=True)
class BatchResult:
    """Integrals of a batch of integrands.

    Attributes
    ----------
    values, errors : ndarray
        Per-integrand estimate and absolute error estimate.
    converged : bool
        False if refinement stopped at ``max_rounds``.
    evaluations : int
    """

    values: np.ndarray
    errors: np.ndarray
    converged: bool
    evaluations: int


def integrate_batch(f, n, lo=0.0, hi=1.0, tol=1e-10, order=16, init_panels=4,
                    max_rounds=40, rel_floor=1e-14, dtype=float) -> BatchResult:
    """Integrate ``f(i, x)`` over ``[lo, hi]`` for ``i = 0..n-1``.

    Parameters
    ----------
    f : callable
        ``f(idx, x)`` with integer array ``idx`` and point array ``x`` of the
        same shape; returns integrand values elementwise.
    n : int
        Number of integrands.
    tol : float
        Absolute tolerance for the *sum* of all ``n`` integrals; each
        integrand receives an equal share, distributed over its panels in
        proportion to their width.
    rel_floor : float
        Panels whose disagreement is below ``rel_floor`` times their magnitude
        are accepted (round-off floor).
    """
    xg, wg = _rule(order)
    width0 = (hi - lo) / init_panels
    p_idx = np.repeat(np.arange(n), init_panels)
    p_lo = lo + width0 * np.tile(np.arange(init_panels), n)
    p_hi = p_lo + width0
    density = tol / (n * (hi - lo))
    nevals = 0

    def panel(idx, a, b):
        nonlocal nevals
        half = 0.5 * (b - a)
        x = (0.5 * (a + b))[:, None] + half[:, None] * xg[None, :]
        ii = np.broadcast_to(idx[:, None], x.shape)
        fx = np.asarray(f(ii.ravel(), x.ravel()), dtype=dtype).reshape(x.shape)
        nevals += fx.size
        return half * (fx @ wg)

    parent = panel(p_idx, p_lo, p_hi)
    acc_vals = [[] for _ in range(n)]
    acc_errs = [[] for _ in range(n)]
    converged = True
    for rnd in range(max_rounds):
        if p_idx.size == 0:
            break
        mid = 0.5 * (p_lo + p_hi)
        both_idx = np.concatenate((p_idx, p_idx))
        both = panel(both_idx, np.concatenate((p_lo, mid)), np.concatenate((mid, p_hi)))
        m = p_idx.size
        left, right = both[:m], both[m:]
        refined = left + right
        err = np.abs(refined - parent)
        allowed = np.maximum(density * (p_hi - p_lo),
                             rel_floor * (np.abs(left) + np.abs(right)))
        ok = err <= allowed
        if rnd == max_rounds - 1:
            ok[:] = True
            converged = bool(np.all(err <= allowed))
        for i, v, e in zip(p_idx[ok], refined[ok], err[ok]):
            acc_vals[i].append(v)
            acc_errs[i].append(e)
        keep = ~ok
        p_idx = np.concatenate((p_idx[keep], p_idx[keep]))
        p_lo, p_hi = (np.concatenate((p_lo[keep], mid[keep])),
                      np.concatenate((mid[keep], p_hi[keep])))
        parent = np.concatenate((left[keep], right[keep]))
    if np.dtype(dtype).kind == "c":
        vals = np.array([complex(math.fsum(np.real(v)), math.fsum(np.imag(v)))
                         for v in acc_vals])
    else:
        vals = np.array([math.fsum(v) for v in acc_vals])
    errs = np.array([math.fsum(e) for e in acc_errs])
    return BatchResult(vals, errs, converged, nevals)
