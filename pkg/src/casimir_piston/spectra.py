"""Transverse spectra {(lambda, degeneracy)} of -Laplacian on the cross-section."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy.special import jv
from scipy.special import zeta as hurwitz_zeta

from .errors import ConvergenceFailure, OrderingError, ParseError

__all__ = [
    "TransverseMode", "TransverseSpectrum", "sphere_spectrum", "disk_spectrum",
    "point_spectrum", "load_spectrum", "save_spectrum", "bessel_zeros",
    "sphere_degeneracy",
]


@dataclass(frozen=True)
class TransverseMode:
    lam: float
    degeneracy: int

    def __post_init__(self):
        if not self.lam >= 0.0:
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")
        if int(self.degeneracy) != self.degeneracy or self.degeneracy < 1:
            raise ValueError(f"degeneracy must be a positive integer, got {self.degeneracy!r}")


@dataclass(frozen=True)
class TransverseSpectrum:
    """Ordered transverse modes, complete up to ``lambda_max``.

    Attributes
    ----------
    modes : tuple of TransverseMode
        Nondecreasing in ``lam``.
    manifold_tag : str
        Human-readable descriptor, e.g. ``"sphere(d=2)"``.
    dimension : int or None
        Dimension ``d`` of the cross-section (None if unknown).
    lambda_max : float
        Completeness cutoff; ``inf`` for finite spectra.
    """

    modes: tuple
    manifold_tag: str
    dimension: Optional[int]
    lambda_max: float
    extend_fn: Optional[Callable] = field(default=None, repr=False, compare=False)
    power_tail_fn: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        lams = [m.lam for m in self.modes]
        if any(b < a for a, b in zip(lams, lams[1:])):
            raise OrderingError("modes are not sorted by lambda")

    @property
    def lambdas(self):
        return np.array([m.lam for m in self.modes], dtype=float)

    @property
    def degeneracies(self):
        return np.array([m.degeneracy for m in self.modes], dtype=np.int64)

    @property
    def extensible(self):
        return self.extend_fn is not None

    def extended(self, lambda_max: float) -> "TransverseSpectrum":
        """Spectrum complete up to at least ``lambda_max`` (self if already)."""
        if lambda_max <= self.lambda_max or self.extend_fn is None:
            return self
        return self.extend_fn(lambda_max)

    def power_tail(self, p: float, cut: float):
        """sum_{lambda > cut} d(lambda) lambda^-p, or None if unavailable."""
        if self.power_tail_fn is None:
            return None
        return self.power_tail_fn(p, cut)

    def counting(self, lam: float) -> int:
        """Number of modes with lambda <= lam, counted with multiplicity."""
        return int(sum(m.degeneracy for m in self.modes if m.lam <= lam))


# ---------------------------------------------------------------- sphere

def sphere_degeneracy(l: int, d: int) -> int:
    """Multiplicity of the l-th eigenvalue on the d-sphere (exact integer)."""
    if l == 0:
        return 1
    # (2l+d-1) (l+d-2)! / (l! (d-1)!) = (2l+d-1) C(l+d-2, d-1) / l
    return (2 * l + d - 1) * math.comb(l + d - 2, d - 1) // l


def _degeneracy_poly(d):
    # coefficients a_j of sphere_degeneracy(l, d) = sum_j a_j x^j, x = l + (d-1)/2  (l >= 1)
    c = 0.5 * (d - 1)
    with mpmath.workdps(40):
        A = mpmath.matrix([[mpmath.mpf(l + c) ** j for j in range(d)] for l in range(1, d + 1)])
        b = mpmath.matrix([sphere_degeneracy(l, d) for l in range(1, d + 1)])
        return [float(v) for v in mpmath.lu_solve(A, b)]


def _sphere_tail(d, p, cut):
    """sum over l with l(l+d-1) > cut^2 of deg(l) (l(l+d-1))^(-p/2), for p > d.

    With x = l + c, c = (d-1)/2, the summand is poly(x) (x^2 - c^2)^(-p/2);
    expanding the binomial gives a fast series of Hurwitz zeta values.
    """
    if not p > d:
        raise ValueError(f"power tail diverges for p={p} <= d={d}")
    l0 = int(math.floor(0.5 * (-(d - 1) + math.sqrt((d - 1) ** 2 + 4.0 * cut * cut))))
    while l0 * (l0 + d - 1) > cut * cut:
        l0 -= 1
    while (l0 + 1) * (l0 + d) <= cut * cut:
        l0 += 1
    l1 = max(l0 + 1, 1)
    c = 0.5 * (d - 1)
    x1 = l1 + c
    coeffs = _degeneracy_poly(d)
    terms = []
    binom = 1.0          # binom(p/2 + k - 1, k) c^(2k)
    for k in range(400):
        part = sum(a * hurwitz_zeta(p + 2 * k - j, x1) for j, a in enumerate(coeffs) if a != 0.0)
        terms.append(binom * part)
        if abs(terms[-1]) <= 1e-18 * abs(math.fsum(terms)) and k > 2:
            break
        binom *= (0.5 * p + k) / (k + 1) * c * c
        if binom == 0.0:
            break
    return math.fsum(terms)


def sphere_spectrum(d: int, lambda_max: float) -> TransverseSpectrum:
    """Spectrum of the round unit d-sphere: lambda^2 = l(l + d - 1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not lambda_max > 0:
        raise ValueError("lambda_max must be positive")
    modes = []
    l = 0
    while True:
        lam2 = l * (l + d - 1)
        if lam2 > lambda_max * lambda_max:
            break
        modes.append(TransverseMode(math.sqrt(lam2), sphere_degeneracy(l, d)))
        l += 1
    return TransverseSpectrum(tuple(modes), f"sphere(d={d})", d, float(lambda_max),
                              lambda lm: sphere_spectrum(d, lm),
                              lambda p, cut: _sphere_tail(d, p, cut))


# ---------------------------------------------------------------- disk

def _mcmahon(n, k):
    b = (k + 0.5 * n - 0.25) * math.pi
    mu = 4.0 * n * n
    return b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)


def _polish(n, lo, hi, x0, maxiter=200):
    """Safeguarded Newton for J_n on brackets [lo, hi] (vectorized)."""
    lo, hi = lo.copy(), hi.copy()
    flo = jv(n, lo)
    x = np.where((x0 > lo) & (x0 < hi), x0, 0.5 * (lo + hi))
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(maxiter):
        f = jv(n, x)
        fp = 0.5 * (jv(n - 1, x) - jv(n + 1, x))
        same = np.sign(f) == np.sign(flo)
        lo = np.where(same, x, lo)
        flo = np.where(same, f, flo)
        hi = np.where(same, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - f / fp
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        conv = (np.abs(xn - x) <= 4e-16 * np.abs(x)) | (f == 0.0)
        x = np.where(done, x, xn)
        done |= conv
        if done.all():
            return x
    raise ConvergenceFailure(f"Bessel zero polishing failed for order {n}")


def bessel_zeros(lambda_max: float, extra: int = 1):
    """Positive zeros of J_n below ``lambda_max`` for all contributing orders.

    Zeros of J_{n+1} are bracketed by consecutive zeros of J_n (strict
    interlacing), so each order's zeros are located with certainty once the
    previous order is known.  ``extra`` zeros beyond the cutoff are kept for
    every order.

    Returns
    -------
    list of ndarray
        ``out[n]`` holds the zeros of J_n that are <= lambda_max.
    """
    n_est = int(math.ceil(lambda_max)) + 2
    count = int(lambda_max / math.pi) + n_est + extra + 3
    k = np.arange(1, count + 1, dtype=float)
    lo, hi = (k - 0.5) * math.pi, k * math.pi
    guess = np.array([_mcmahon(0, kk) for kk in k])
    z = _polish(0, lo, hi, guess)
    out = []
    n = 0
    while z.size and z[0] <= lambda_max:
        out.append(z[z <= lambda_max])
        n += 1
        lo, hi = z[:-1], z[1:]
        guess = np.array([_mcmahon(n, kk) for kk in range(1, lo.size + 1)])
        z = _polish(n, lo, hi, guess)
        if np.count_nonzero(z > lambda_max) < extra:
            raise ConvergenceFailure("ran out of bracketing zeros")
    return out


def disk_spectrum(lambda_max: float) -> TransverseSpectrum:
    """Dirichlet spectrum of the unit disk: zeros of J_n, degeneracy 1 (n=0) or 2."""
    if not lambda_max > 0:
        raise ValueError("lambda_max must be positive")
    pairs = []
    for n, zs in enumerate(bessel_zeros(lambda_max)):
        pairs.extend((float(v), 1 if n == 0 else 2) for v in zs)
    pairs.sort()
    return TransverseSpectrum(tuple(TransverseMode(l, g) for l, g in pairs), "disk", 2,
                              float(lambda_max), disk_spectrum, None)


# ---------------------------------------------------------------- point / file

def point_spectrum() -> TransverseSpectrum:
    """Degenerate cross-section: a single lambda = 0 mode."""
    return TransverseSpectrum((TransverseMode(0.0, 1),), "point", 0, math.inf,
                              None, lambda p, cut: 0.0)


def load_spectrum(path, dimension: Optional[int] = None) -> TransverseSpectrum:
    """Read a ``lambda degeneracy`` text file.

    Blank lines and ``#`` comments are skipped.  A comment of the form
    ``# dimension: d`` sets the manifold dimension unless ``dimension`` is
    given.  The spectrum is taken as complete up to its last lambda.
    """
    modes = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            body, _, comment = line.partition("#")
            c = comment.strip().lower()
            if c.startswith("dimension") and dimension is None:
                try:
                    dimension = int(c.split(":", 1)[1] if ":" in c else c.split("=", 1)[1])
                except (IndexError, ValueError):
                    raise ParseError(f"bad dimension directive {comment.strip()!r}", lineno)
            parts = body.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ParseError(f"expected 'lambda degeneracy', got {body.strip()!r}", lineno)
            try:
                lam = float(parts[0])
                deg = int(parts[1])
            except ValueError:
                raise ParseError(f"cannot parse {body.strip()!r}", lineno)
            if not (math.isfinite(lam) and lam >= 0.0):
                raise ParseError(f"lambda must be finite and >= 0, got {parts[0]}", lineno)
            if deg < 1:
                raise ParseError(f"degeneracy must be a positive integer, got {parts[1]}", lineno)
            if modes and lam < modes[-1].lam:
                raise OrderingError(f"lambda {lam!r} after {modes[-1].lam!r}", lineno)
            modes.append(TransverseMode(lam, deg))
    if not modes:
        raise ParseError("spectrum file contains no modes")
    return TransverseSpectrum(tuple(modes), f"file({path})", dimension, modes[-1].lam)


def save_spectrum(spectrum: TransverseSpectrum, path) -> None:
    """Write ``spectrum`` in the text format read by :func:`load_spectrum`."""
    with open(path, "w") as fh:
        fh.write(f"# {spectrum.manifold_tag}\n")
        if spectrum.dimension is not None:
            fh.write(f"# dimension: {spectrum.dimension}\n")
        for m in spectrum.modes:
            fh.write(f"{m.lam!r} {m.degeneracy}\n")
