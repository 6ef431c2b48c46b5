"""Zeta-regularized Casimir energy and force of the piston.

Every transverse mode ``lambda`` contributes a one-dimensional tower of
eigenvalues ``k^2 + lambda^2`` where ``h(k) = 0``.  Its zeta function is
represented on the imaginary axis as

    (sin(pi s)/pi) int_lambda^inf (z^2 - lambda^2)^-s d/dz ln[h(iz)/z^2] dz,

continued to ``s = -1/2`` by subtracting the large-z expansion.  The force
needs only the a-derivative, which is exponentially convergent and free of
any ambiguity.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.special import digamma, gamma

from .asymptotics import AsymptoticData, asymptotic_data, pair_exponent, pair_roots
from .boundary import PistonConfig
from .errors import MissingZetaData, OutOfStrip, ToleranceNotMet
from .quadrature import integrate_batch
from .secular import (check_admissible, d_lna_log_h, dz_log_reduced, split_terms)
from .spectra import TransverseSpectrum

__all__ = [
    "ZetaNData", "ForceResult", "EnergyReport", "AmbiguityNote", "BigZResult",
    "Equilibrium", "zeta_lambda_strip", "big_z", "big_z_details", "a_i_terms",
    "zero_mode_laurent", "casimir_energy_report", "casimir_force",
    "classify_equilibria", "force_profile", "remainder_dz",
]

LN2 = math.log(2.0)
EULER = 0.57721566490153286061
_U_MAX = 200.0


# ---------------------------------------------------------------- data types

@dataclass(frozen=True)
class ZetaNData:
    """Meromorphic data of the transverse zeta function (lambda > 0 only).

    Attributes
    ----------
    zeta_minus1, zeta_prime_minus1, zeta_0, zeta_prime_0 : float
        Values of zeta_N and its derivative at -1 and 0.
    half_points : mapping
        ``i -> (residue, finite_part)`` of zeta_N at ``(i - 1)/2``; entry
        ``i = 1`` (the point 0) is not used.
    """

    zeta_minus1: float = 0.0
    zeta_prime_minus1: float = 0.0
    zeta_0: float = 0.0
    zeta_prime_0: float = 0.0
    half_points: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        vals = [self.zeta_minus1, self.zeta_prime_minus1, self.zeta_0, self.zeta_prime_0]
        for i, pair in self.half_points.items():
            if int(i) != i or i < 0:
                raise ValueError(f"half-point index must be a nonnegative integer, got {i!r}")
            if len(pair) != 2:
                raise ValueError(f"half-point entry {i} must be (residue, finite_part)")
            vals.extend(pair)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("transverse zeta data must be finite")

    @classmethod
    def trivial(cls, D: int) -> "ZetaNData":
        """All-zero data (cross-section with no positive modes)."""
        return cls(half_points={i: (0.0, 0.0) for i in range(D + 1)})

    def half_point(self, i):
        try:
            return self.half_points[i]
        except KeyError:
            raise MissingZetaData(i) from None


@dataclass(frozen=True)
class ForceResult:
    """Casimir force on the piston (positive pushes towards x = L).

    ``per_mode`` (optional) lists ``(lambda, degeneracy, contribution)``.
    """

    force: float
    quadrature_error: float
    modes_used: int
    tail_bound: float
    per_mode: Optional[tuple] = None
    lambda_cut: float = 0.0
    zero_modes_included: int = 0

    @property
    def error_bound(self):
        return self.quadrature_error + self.tail_bound


@dataclass(frozen=True)
class AmbiguityNote:
    """Which inputs make the energy depend on the regularization scale.

    ``drivers`` names the nonzero transverse-zeta inputs (and the
    lambda = 0 channel) that feed the 1/eps pole and hence ln(mu^2).
    """

    drivers: tuple
    zero_mode_count: int
    lambda_zero_policy: str = "lambda=0 modes summed separately via a 1D continuation; excluded from zeta_N"

    def __bool__(self):
        return bool(self.drivers)


@dataclass(frozen=True)
class EnergyReport:
    """Casimir energy as ``pole_coefficient * (1/eps + ln mu^2) + finite_part``.

    Attributes
    ----------
    pole_coefficient : float
        Coefficient of 1/eps (and of ln mu^2); independent of ``a``.
    finite_part : float
        Finite remainder at mu = 1.
    z_at_minus_half : float
        Z(-1/2, a), the subtracted mode sum over lambda > 0.
    ambiguity_note : AmbiguityNote
    components : dict
        Individual pole/finite contributions for bookkeeping.
    """

    pole_coefficient: float
    finite_part: float
    z_at_minus_half: float
    ambiguity_note: AmbiguityNote
    components: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BigZResult:
    value: float
    quadrature_error: float
    tail_correction: Optional[float]
    modes_used: int
    lambda_cut: float


class Equilibrium(enum.Enum):
    Stable = "stable"
    Unstable = "unstable"


# ---------------------------------------------------------------- integrands

def _roots(cfg):
    w, o = cfg.wall, cfg.outer
    return np.concatenate((pair_roots(w.phase, w.mix), pair_roots(o.phase, o.mix)))


def remainder_dz(z, cfg: PistonConfig, data: AsymptoticData):
    """d/dz of ln[h(iz)/z^2] minus its first ``data.N`` asymptotic terms.

    For large z the remainder is assembled from closed forms, avoiding the
    cancellation between ln h and the subtracted series.
    """
    z = np.asarray(z, dtype=float)
    roots = _roots(cfg)
    rmax = float(np.max(np.abs(roots))) if roots.size else 0.0
    zc = 2.0 * rmax + 2.0 / cfg.L
    N = data.N
    out = np.empty_like(z)
    hi = z >= zc
    if np.any(hi):
        zh = z[hi]
        P, dP, R, dR = split_terms(zh, cfg)
        val = (dR * P - R * dP) / (P * (P + R))
        for r in roots:
            x = r / zh
            val = val + np.real(x ** (N + 1) / (1.0 - x)) / zh
        out[hi] = val
    lo = ~hi
    if np.any(lo):
        zl = z[lo]
        val = dz_log_reduced(zl, cfg) - data.chi / zl
        p = 1.0 / (zl * zl)
        for n, w in enumerate(data.omega, 1):
            val = val + n * w * p
            p = p / zl
        out[lo] = val
    return out[()] if out.ndim == 0 else out


def _full_dz(z, cfg):
    return cfg.L + dz_log_reduced(z, cfg)


def _tower_integrals(s, lams, weights, G, tol, dtype=float):
    """int_lambda^inf (z^2-lambda^2)^-s G(z) dz for each lambda (> 0), weighted.

    Uses z = lambda cosh u, with u = v^(1/(2-2s)) on [0, 1] and
    u = 1 - ln t beyond.
    """
    lams = np.asarray(lams, dtype=float)
    weights = np.asarray(weights)
    e = 1.0 - 2.0 * s
    p = 1.0 / (2.0 - 2.0 * s)
    scale = weights * lams ** e

    def near(i, v):
        u = v ** np.real(p) if np.isrealobj(p) else v ** p
        u = np.real(u)
        shu = np.where(u > 0, np.sinh(u) / np.where(u > 0, u, 1.0), 1.0)
        return scale[i] * p * shu ** e * G(lams[i] * np.cosh(u))

    def far(i, t):
        u = 1.0 - np.log(t)
        live = u < _U_MAX
        uu = np.where(live, u, 1.0)
        val = scale[i] * np.sinh(uu) ** e * G(lams[i] * np.cosh(uu)) / t
        return np.where(live, val, 0.0)

    if np.iscomplexobj(np.asarray(s)):
        # u = v^p with complex p is not a real map; use the real part of p
        p = 1.0 / (2.0 - 2.0 * np.real(s))
        e_re = 1.0 - 2.0 * np.real(s)

        def near(i, v):  # noqa: F811
            u = v ** p
            shu = np.where(u > 0, np.sinh(u) / np.where(u > 0, u, 1.0), 1.0)
            # sinh(u)^e * du/dv = shu^e * u^(e - e_re) * p
            return scale[i] * p * shu ** e * u ** (e - e_re) * G(lams[i] * np.cosh(u))

    r1 = integrate_batch(near, len(lams), 0.0, 1.0, tol=0.5 * tol, dtype=dtype)
    r2 = integrate_batch(far, len(lams), 0.0, 1.0, tol=0.5 * tol, dtype=dtype)
    return r1.values + r2.values, r1.errors + r2.errors, r1.converged and r2.converged


def _half_beta(s, m):
    # int_lambda^inf (z^2 - lambda^2)^-s z^-m dz = lambda^(1-2s-m) * this
    a, b = 1.0 - s, s + 0.5 * (m - 1)
    return 0.5 * gamma(a) * gamma(b) / gamma(a + b)


# ---------------------------------------------------------------- zeta pieces

def zeta_lambda_strip(s, lam: float, cfg: PistonConfig, N: int = 4, tol: float = 1e-12):
    """Zeta function of one transverse tower for 1/2 < Re s < 1.

    The z-integral is split into analytically integrated large-z terms and
    a rapidly decaying remainder handled by quadrature.

    Raises
    ------
    OutOfStrip
        If ``Re s`` is not in (1/2, 1).
    """
    sr = float(np.real(s))
    if not 0.5 < sr < 1.0:
        raise OutOfStrip(f"Re s = {sr} outside (1/2, 1)")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    cplx = np.iscomplexobj(np.asarray(s)) and np.imag(s) != 0
    s = complex(s) if cplx else sr
    data = asymptotic_data(cfg, N)
    G = lambda z: remainder_dz(z, cfg, data)
    val, _, _ = _tower_integrals(s, [lam], [1.0], G, tol, complex if cplx else float)
    total = val[0]
    total += cfg.L * lam ** (1 - 2 * s) * _half_beta(s, 0)
    total += data.chi * lam ** (-2 * s) * _half_beta(s, 1)
    for n, w in enumerate(data.omega, 1):
        total -= n * w * lam ** (-2 * s - n) * _half_beta(s, n + 1)
    out = np.sin(np.pi * s) / np.pi * total
    return complex(out) if cplx else float(out)


def _exp_cut(cfg, tol):
    m = min(cfg.a, cfg.L - cfg.a)
    return (math.log(1.0 / tol) + 12.0) / (2.0 * m)


def big_z_details(s: float, cfg: PistonConfig, spectrum: TransverseSpectrum, N: int,
                  tol: float = 1e-10, lambda_cut: Optional[float] = None,
                  tail_terms: int = 8) -> BigZResult:
    """Subtracted mode sum Z(s, a) over the lambda > 0 modes, with diagnostics.

    Modes up to ``lambda_cut`` are integrated numerically; beyond it each
    mode is replaced by its power-law large-lambda expansion, summed with the
    spectrum's power tail when available (``tail_correction`` is None
    otherwise).
    """
    if not -1.0 < s < 1.0:
        raise OutOfStrip(f"s = {s} outside (-1, 1)")
    check_admissible(cfg)
    data = asymptotic_data(cfg, N)
    full = asymptotic_data(cfg, N + tail_terms)
    roots = _roots(cfg)
    rmax = float(np.max(np.abs(roots))) if roots.size else 0.0
    if lambda_cut is None:
        lambda_cut = max(_exp_cut(cfg, tol), 4.0 * rmax, 10.0)
    spec = spectrum.extended(lambda_cut)
    lams, degs = spec.lambdas, spec.degeneracies
    sel = (lams > 0) & (lams <= lambda_cut)
    pref = math.sin(math.pi * s) / math.pi
    G = lambda z: remainder_dz(z, cfg, data)
    if np.any(sel):
        vals, errs, _ = _tower_integrals(s, lams[sel], degs[sel] * pref, G, tol)
        body = math.fsum(vals)
        qerr = float(np.sum(errs))
    else:
        body, qerr = 0.0, 0.0
    tail = None
    if spec.power_tail_fn is not None:
        terms = []
        for n in range(N + 1, N + tail_terms + 1):
            w = full.omega_at(n)
            if w == 0.0:
                continue
            pt = spec.power_tail(2 * s + n, lambda_cut)
            terms.append(pref * (-n) * w * _half_beta(s, n + 1) * pt)
        tail = math.fsum(terms)
    elif spec.lambda_max < math.inf and spec.extend_fn is None:
        # finite file spectrum: everything beyond the cut within the file is integrated too
        rest = lams > lambda_cut
        if np.any(rest):
            vals, errs, _ = _tower_integrals(s, lams[rest], degs[rest] * pref, G, tol)
            body += math.fsum(vals)
            qerr += float(np.sum(errs))
            tail = 0.0
    value = body + (tail or 0.0)
    return BigZResult(value, qerr, tail, int(np.count_nonzero(sel)), float(lambda_cut))


def big_z(s: float, cfg: PistonConfig, spectrum: TransverseSpectrum, N: int, **kw) -> float:
    """Z(s, a): the asymptotically subtracted sum over lambda > 0 modes."""
    return big_z_details(s, cfg, spectrum, N, **kw).value


def zero_mode_laurent(cfg: PistonConfig, N: int = 3, tol: float = 1e-12, z0: Optional[float] = None):
    """Laurent data at s = -1/2 of the zeta function of one lambda = 0 tower.

    Returns
    -------
    (pole, finite) : tuple of float
        ``zeta_0(-1/2 + eps) = pole/eps + finite + O(eps)``; the pole is
        ``omega_1 / (2 pi)``.
    """
    N = max(N, 2)
    check_admissible(cfg, require_nonzero_c=True)
    data = asymptotic_data(cfg, N)
    if z0 is None:
        roots = _roots(cfg)
        z0 = 2.0 * (float(np.max(np.abs(roots))) if roots.size else 0.0) + 1.0 / cfg.L
    # int_0^z0 z G_full dz  (G_full = d/dz ln(h/z^2) is O(z) at 0)
    lower = integrate_batch(lambda i, x: z0 * (z0 * x) * _full_dz(z0 * x, cfg), 1,
                            0.0, 1.0, tol=0.25 * tol)
    # int_z0^inf z G_N dz with z = z0 / t
    upper = integrate_batch(
        lambda i, t: (z0 / t) * remainder_dz(z0 / t, cfg, data) * z0 / (t * t), 1,
        0.0, 1.0, tol=0.25 * tol)
    w1 = data.omega_at(1)
    acc = [lower.values[0], upper.values[0], -0.5 * cfg.L * z0 * z0, -data.chi * z0,
           w1 * math.log(z0)]
    for n in range(2, N + 1):
        acc.append(-n * data.omega_at(n) * z0 ** (1 - n) / (n - 1))
    finite = -math.fsum(acc) / math.pi
    return w1 / (2.0 * math.pi), finite


def a_i_terms(data: AsymptoticData, zn: ZetaNData, L: float, D: Optional[int] = None):
    """Pole and finite parts at s = -1/2 of the added-back terms A_-1..A_D.

    Returns
    -------
    (pole, finite) : tuple of float
        Contribution ``pole/eps + finite`` to zeta(-1/2 + eps).
    """
    D = data.N if D is None else D
    res0, fp0 = zn.half_point(0)
    pole = [L * zn.zeta_minus1 / (4 * math.pi), 0.5 * data.chi * res0]
    fin = [L / (4 * math.pi) * (zn.zeta_prime_minus1 + (2 * LN2 - 1) * zn.zeta_minus1),
           0.5 * data.chi * fp0]
    if D >= 1:
        w1 = data.omega_at(1)
        pole.append(w1 * zn.zeta_0 / (2 * math.pi))
        fin.append(w1 / (2 * math.pi) * (zn.zeta_prime_0 + 2 * (LN2 - 1) * zn.zeta_0))
    for i in range(2, D + 1):
        res, fp = zn.half_point(i)
        c = data.omega_at(i) * gamma(0.5 * (i - 1)) / (2 * math.sqrt(math.pi) * gamma(0.5 * i))
        pole.append(c * res)
        fin.append(c * (fp + (digamma(0.5 * (i - 1)) - 2.0 + EULER + 2 * LN2) * res))
    return math.fsum(pole), math.fsum(fin)


def _drivers(zn, D, n0, w1):
    out = []
    if zn.zeta_minus1 != 0.0:
        out.append("zeta_N(-1)")
    if zn.half_points.get(0, (0.0, 0.0))[0] != 0.0:
        out.append("Res zeta_N(-1/2)")
    if zn.zeta_0 != 0.0:
        out.append("zeta_N(0)")
    for i in range(2, D + 1):
        if zn.half_points.get(i, (0.0, 0.0))[0] != 0.0:
            out.append(f"Res zeta_N({i - 1}/2)")
    if n0 and w1 != 0.0:
        out.append("lambda=0 modes (omega_1)")
    return tuple(out)


def casimir_energy_report(cfg: PistonConfig, spectrum: TransverseSpectrum, zn: ZetaNData,
                          N: Optional[int] = None, tol: float = 1e-10) -> EnergyReport:
    """Energy decomposition ``E = pole (1/eps + ln mu^2) + finite``.

    ``N`` defaults to ``D = d + 1``.  Transverse zero modes are continued
    separately (one-dimensional tower) and reported in ``components``.
    """
    d = spectrum.dimension
    if N is None:
        if d is None:
            raise ValueError("spectrum dimension unknown; pass N explicitly")
        N = d + 1
    data = asymptotic_data(cfg, N)
    bz = big_z_details(-0.5, cfg, spectrum, N, tol=tol)
    ap, af = a_i_terms(data, zn, cfg.L, N)
    lams, degs = spectrum.lambdas, spectrum.degeneracies
    n0 = int(degs[lams == 0.0].sum())
    zp, zf = zero_mode_laurent(cfg, N, tol) if n0 else (0.0, 0.0)
    res = math.fsum([ap, n0 * zp])
    fp = math.fsum([bz.value, af, n0 * zf])
    note = AmbiguityNote(_drivers(zn, N, n0, data.omega_at(1)), n0)
    comps = {"a_terms_pole": ap, "a_terms_finite": af, "zero_mode_pole": zp,
             "zero_mode_finite": zf, "zero_mode_count": n0,
             "big_z_quadrature_error": bz.quadrature_error,
             "big_z_tail_correction": bz.tail_correction, "N": N}
    return EnergyReport(0.5 * res, 0.5 * fp, bz.value, note, comps)


# ---------------------------------------------------------------- force

def casimir_force(cfg: PistonConfig, spectrum: TransverseSpectrum, tol: float = 1e-8,
                  keep_per_mode: bool = False, max_extend: int = 20,
                  lambda_cut: Optional[float] = None) -> ForceResult:
    """Casimir force ``F = -(1/2pi) sum_lambda d(lambda) int_0^inf d_a ln h(i sqrt(w^2+lambda^2)) dw``.

    Half of ``tol`` goes to quadrature, half to truncation of the mode sum.
    ``lambda_cut`` forces all modes up to that value to be integrated even
    when the truncation estimate would stop earlier.

    Raises
    ------
    ZeroCrossing
        Inadmissible configuration (negative longitudinal mode).
    ZeroModeError
        Longitudinal zero mode while the spectrum has a lambda = 0 mode.
    ToleranceNotMet
        ``quadrature_error + tail_bound > tol``; ``best`` holds the result.
    """
    lams_all = spectrum.lambdas
    has_zero = bool(np.any(lams_all == 0.0))
    check_admissible(cfg, require_nonzero_c=has_zero)
    m = min(cfg.a, cfg.L - cfg.a)

    def integrand(lams, weights):
        def f(i, u):
            w = -np.log(u) / m
            z = np.sqrt(w * w + lams[i] * lams[i])
            return weights[i] * d_lna_log_h(z, cfg) / (m * u)
        return f

    def run(lams, degs):
        wts = -degs / (2.0 * math.pi)
        r = integrate_batch(integrand(lams, wts), len(lams), 0.0, 1.0, tol=0.5 * tol)
        return r.values, r.errors

    cut = max(_exp_cut(cfg, tol), lambda_cut or 0.0)
    reach = 25.0 / m  # envelope beyond lambda + reach is below exp(-50)
    spec = spectrum.extended(cut + reach)
    lams, degs = spec.lambdas, spec.degeneracies
    n = max(int(np.searchsorted(lams, cut, side="right")), 1)
    vals, errs = run(lams[:n], degs[:n])
    tail = 0.0
    for _ in range(max_extend):
        if n >= len(lams) or lams[n - 1] == 0.0 and len(lams) == 1:
            break
        # envelope |contribution| <= K d lambda^(3/2) exp(-2 m lambda), K from the last modes
        k = max(n - 3, 0)
        lref = np.maximum(lams[k:n], 1e-300)
        kk = 10.0 * float(np.max(np.abs(vals[k:n]) / degs[k:n]
                                 / (lref ** 1.5 * np.exp(-2 * m * lref))))
        rest = slice(n, None)
        tail = float(np.sum(kk * degs[rest] * lams[rest] ** 1.5 * np.exp(-2 * m * lams[rest])))
        if tail <= 0.5 * tol:
            break
        n_new = int(np.searchsorted(lams, lams[n - 1] + 2.0 / m, side="right"))
        v2, e2 = run(lams[n:n_new], degs[n:n_new])
        vals = np.concatenate((vals, v2))
        errs = np.concatenate((errs, e2))
        n = n_new
        if spec.extensible and lams[-1] < lams[n - 1] + reach:
            spec = spec.extended(lams[n - 1] + reach)
            lams, degs = spec.lambdas, spec.degeneracies
    force = math.fsum(vals)
    qerr = float(math.fsum(errs))
    per = tuple((float(l), int(g), float(v)) for l, g, v in zip(lams[:n], degs[:n], vals)) \
        if keep_per_mode else None
    res = ForceResult(force, qerr, n, tail, per, float(lams[n - 1]),
                      int(degs[:n][lams[:n] == 0.0].sum()))
    if qerr + tail > tol:
        raise ToleranceNotMet(f"error bound {qerr + tail:.3g} exceeds tol {tol:.3g}", res)
    return res


def force_profile(cfg: PistonConfig, spectrum: TransverseSpectrum, a_values, tol: float = 1e-8):
    """Forces at several piston positions; returns a list of (a, force)."""
    return [(float(a), casimir_force(cfg.with_position(a), spectrum, tol).force)
            for a in a_values]


def classify_equilibria(profile, force_fn=None, xtol: float = 1e-10):
    """Zero-force positions and their stability.

    Parameters
    ----------
    profile : sequence of (a, force)
        Sorted in ``a``.
    force_fn : callable, optional
        ``a -> force``; if given, each bracketed sign change is refined by
        bisection, otherwise by linear interpolation.

    Returns
    -------
    list of (float, Equilibrium)
        A + to - crossing is Stable (restoring), - to + Unstable.
    """
    pts = [(float(a), float(f)) for a, f in profile]
    out = []
    i = 0
    while i < len(pts) - 1:
        (a0, f0), (a1, f1) = pts[i], pts[i + 1]
        if f0 == 0.0:
            # exact zero on a sample: classify from neighbours
            prev = pts[i - 1][1] if i > 0 else None
            if prev is not None and prev != 0.0 and f1 != 0.0 and (prev > 0) != (f1 > 0):
                out.append((a0, Equilibrium.Stable if prev > 0 else Equilibrium.Unstable))
            i += 1
            continue
        if f1 != 0.0 and (f0 > 0) != (f1 > 0):
            kind = Equilibrium.Stable if f0 > 0 else Equilibrium.Unstable
            if force_fn is None:
                root = a0 - f0 * (a1 - a0) / (f1 - f0)
            else:
                lo, hi, flo = a0, a1, f0
                while hi - lo > xtol:
                    mid = 0.5 * (lo + hi)
                    fm = force_fn(mid)
                    if fm == 0.0:
                        lo = hi = mid
                        break
                    if (fm > 0) == (flo > 0):
                        lo, flo = mid, fm
                    else:
                        hi = mid
                root = 0.5 * (lo + hi)
            out.append((root, kind))
        i += 1
    if pts and pts[-1][1] == 0.0 and len(pts) > 1:
        pass
    return out
