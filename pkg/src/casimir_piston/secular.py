"""Secular function h(k) of the piston and its imaginary-axis evaluation.

On the imaginary axis ``k = iz`` the function is real and grows like
``exp(zL)``.  We work with the scaled quantity

    H(z) = h(iz) exp(-zL) = sum_j P_j(z) exp(-b_j z)

where the ``P_j`` are polynomials of degree <= 4 and the rates are
``0, 2L, 2a, 2(L-a), L``.  Only the two middle rates depend on ``a``.
Near ``z = 0`` the terms cancel down to ``c z^2``; there a Taylor series
computed once per configuration in extended precision is used instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly

from .boundary import PistonConfig, unitary_matrix
from .errors import ZeroCrossing, ZeroModeError
from .scattering import numerators

__all__ = [
    "SecularValue", "SecularCoefficients", "secular_coefficients", "h_function",
    "det4_oracle", "log_h_imag", "d_lna_log_h", "dz_log_reduced", "scaled_h",
    "small_k_coefficient", "small_k_coefficient_da", "check_admissible",
    "split_terms", "asymptotic_sign",
]

_TAYLOR_DEGREE = 32
_SMALL_ZL = 0.25


@dataclass(frozen=True)
class SecularValue:
    """Signed-log value of h(iz) with exp(zL) removed."""

    log_magnitude: float
    sign: int
    raw: float | None


def _psi_poly(u):
    # D-type quadratic at k = iz: (cx - cy) - 2 z sx - z^2 (cx + cy)
    return np.array([u.cos_diff, -2.0 * u.sin_phase, -u.cos_sum])


@dataclass(frozen=True, eq=False)
class SecularCoefficients:
    """Per-configuration record of the scaled secular function.

    Attributes
    ----------
    polys : tuple of ndarray
        Ascending polynomial coefficients of the five terms.
    rates : ndarray
        Exponential decay rates of the five terms.
    da_rates : ndarray
        Derivative of each rate with respect to ``a``.
    taylor, taylor_da : ndarray
        Series of ``H/z^2`` and ``dH/da / z^2`` around ``z = 0``.
    z_small : float
        Below this the series branch is used.
    """

    polys: tuple
    rates: np.ndarray
    da_rates: np.ndarray
    taylor: np.ndarray
    taylor_da: np.ndarray
    z_small: float
    L: float

    @property
    def c(self):
        return float(self.taylor[0])


def _term_polys(cfg):
    o, w = cfg.outer, cfg.wall
    ca, sa, cb, sb = o.cos_phase, o.sin_phase, o.cos_mix, o.sin_mix
    ct, st, cg, sg = w.cos_phase, w.sin_phase, w.cos_mix, w.sin_mix
    n1, n2, n3 = o.axis
    q1, q2, q3 = w.axis
    pw, po = _psi_poly(w), _psi_poly(o)
    flip = np.array([1.0, -1.0, 1.0])
    rho_r = np.array([-w.cos_diff, -2.0 * q3 * sg, -w.cos_sum])
    rho_l = np.array([-w.cos_diff, 2.0 * q3 * sg, -w.cos_sum])
    qq = np.array([o.cos_diff, 0.0, o.cos_sum])
    tilt = np.array([0.0, 2.0 * n3 * sb, 0.0])
    return (
        npoly.polymul(pw, po),
        npoly.polymul(pw * flip, po * flip),
        npoly.polymul(rho_l, npoly.polysub(qq, tilt)),
        npoly.polymul(rho_r, npoly.polyadd(qq, tilt)),
        np.array([0.0, 0.0, -8.0 * sb * sg * (n1 * q1 + n2 * q2)]),
    )


def _taylor(polys, rates, weights, degree):
    # series of sum_j w_j P_j(z) exp(-b_j z), divided by z^2, in extended precision
    with mpmath.workdps(50):
        acc = [mpmath.mpf(0)] * (degree + 3)
        for p, b, wt in zip(polys, rates, weights):
            if wt == 0.0:
                continue
            b = mpmath.mpf(float(b))
            ex = [(-b) ** m / mpmath.factorial(m) for m in range(degree + 3)]
            for i, pc in enumerate(p):
                pc = mpmath.mpf(float(pc)) * wt
                if pc == 0:
                    continue
                for m in range(degree + 3 - i):
                    acc[i + m] += pc * ex[m]
        # the z^0 and z^1 coefficients vanish identically
        return np.array([float(v) for v in acc[2:]])


@lru_cache(maxsize=512)
def secular_coefficients(cfg: PistonConfig) -> SecularCoefficients:
    """Build (and cache) the immutable coefficient record for ``cfg``."""
    L, a = cfg.L, cfg.a
    polys = _term_polys(cfg)
    rates = np.array([0.0, 2.0 * L, 2.0 * a, 2.0 * (L - a), L])
    da_rates = np.array([0.0, 0.0, 2.0, -2.0, 0.0])
    taylor = _taylor(polys, rates, [1.0] * 5, _TAYLOR_DEGREE)
    # d/da [P exp(-b z)] = -(db/da) z P exp(-b z)
    da_polys = [npoly.polymulx(p) * (-db) for p, db in zip(polys, da_rates)]
    taylor_da = _taylor(da_polys, rates, [1.0] * 5, _TAYLOR_DEGREE)
    return SecularCoefficients(polys, rates, da_rates, taylor, taylor_da,
                               _SMALL_ZL / L, L)


def _direct(z, co, deriv):
    """H (deriv=None), dH/dz ('z') or dH/da ('a') by direct summation."""
    out = np.zeros_like(z)
    for p, b, db in zip(co.polys, co.rates, co.da_rates):
        e = np.exp(-b * z)
        if deriv is None:
            out += npoly.polyval(z, p) * e
        elif deriv == "z":
            out += (npoly.polyval(z, npoly.polyder(p)) - b * npoly.polyval(z, p)) * e
        elif db != 0.0:
            out += -db * z * npoly.polyval(z, p) * e
    return out


def _series(z, coeffs):
    return npoly.polyval(z, coeffs)


def scaled_h(z, cfg: PistonConfig):
    """H(z) = h(iz) exp(-zL) for real ``z >= 0`` (vectorized)."""
    co = secular_coefficients(cfg)
    z = np.asarray(z, dtype=float)
    small = z < co.z_small
    out = _direct(np.where(small, 1.0, z), co, None)
    zs = np.where(small, z, 0.0)
    out = np.where(small, zs * zs * _series(zs, co.taylor), out)
    return out[()] if out.ndim == 0 else out


def _ratio(z, cfg, kind):
    co = secular_coefficients(cfg)
    z = np.asarray(z, dtype=float)
    small = z < co.z_small
    zb = np.where(small, 1.0, z)
    h = _direct(zb, co, None)
    if kind == "a":
        num = _direct(zb, co, "a")
        big = num / h
        zs = np.where(small, z, 0.0)
        sm = _series(zs, co.taylor_da) / _series(zs, co.taylor)
    else:
        num = _direct(zb, co, "z")
        big = num / h - 2.0 / zb
        zs = np.where(small, z, 0.0)
        sm = (_series(zs, npoly.polyder(co.taylor)) / _series(zs, co.taylor))
    out = np.where(small, sm, big)
    return out[()] if out.ndim == 0 else out


def d_lna_log_h(z, cfg: PistonConfig):
    """d/da ln h(iz) for real ``z >= 0`` (vectorized); finite at z = 0."""
    return _ratio(z, cfg, "a")


def dz_log_reduced(z, cfg: PistonConfig):
    """d/dz ln[h(iz) exp(-zL) / z^2], i.e. H'/H - 2/z, cancellation-free near 0."""
    return _ratio(z, cfg, "z")


def log_h_imag(z: float, cfg: PistonConfig) -> SecularValue:
    """Signed log of h(iz) exp(-zL).

    ``raw`` holds the unscaled h(iz) when ``zL < 700`` and None otherwise.
    """
    if z < 0:
        raise ValueError("z must be nonnegative")
    hv = float(scaled_h(z, cfg))
    if hv == 0.0:
        return SecularValue(-math.inf, 0, 0.0)
    zl = z * cfg.L
    raw = hv * math.exp(zl) if zl < 700.0 else None
    return SecularValue(math.log(abs(hv)), 1 if hv > 0 else -1, raw)


def small_k_coefficient(cfg: PistonConfig) -> float:
    """Closed-form ``c`` in ``h(iz) = c z^2 + O(z^4)`` as ``z -> 0``.

    With this normalization Dirichlet conditions everywhere give
    ``c = 16 a (L - a)``.  A vanishing ``c`` signals a longitudinal zero mode.
    """
    o, w = cfg.outer, cfg.wall
    ca, sa, cb, sb = o.cos_phase, o.sin_phase, o.cos_mix, o.sin_mix
    ct, st, cg, sg = w.cos_phase, w.sin_phase, w.cos_mix, w.sin_mix
    n, q = o.axis, w.axis
    L, a = cfg.L, cfg.a
    dm, dw = o.cos_diff, -w.cos_diff
    return (-8.0 * ct * ca + 8.0 * cg * cb
            - 4.0 * st * (L * dm - 2.0 * sa)
            + 4.0 * dw * (a * (a - L) * dm + L * sa)
            - 4.0 * (2.0 * a - L) * (dm * q[2] * sg - dw * n[2] * sb)
            - 8.0 * sb * sg * (n[0] * q[0] + n[1] * q[1] + n[2] * q[2]))


def small_k_coefficient_da(cfg: PistonConfig) -> float:
    """d c / d a for the small-k coefficient."""
    o, w = cfg.outer, cfg.wall
    dm = o.cos_diff
    dw = -w.cos_diff
    return (4.0 * dw * (2.0 * cfg.a - cfg.L) * dm
            - 8.0 * (dm * w.axis[2] * w.sin_mix - dw * o.axis[2] * o.sin_mix))


def h_function(k, cfg: PistonConfig):
    """Secular function h(k) for complex ``k`` (vectorized, entire in k)."""
    k = np.asarray(k, dtype=complex)
    o = cfg.outer
    ca, sa, cb, sb = o.cos_phase, o.sin_phase, o.cos_mix, o.sin_mix
    n1, n2, n3 = o.axis
    L, a = cfg.L, cfg.a
    d, rho_r, rho_l, tau_r, tau_l = numerators(k, cfg.wall)
    d_m = numerators(-k, cfg.wall)[0]
    k2 = k * k
    p_plus = o.cos_diff + k2 * o.cos_sum + 2j * k * sa
    p_minus = o.cos_diff + k2 * o.cos_sum - 2j * k * sa
    qq = o.cos_diff - k2 * o.cos_sum
    e = np.exp(1j * k * (2.0 * a - L))
    eb = np.exp(-1j * k * (2.0 * a - L))
    out = (d * np.exp(-1j * k * L) * p_plus + d_m * np.exp(1j * k * L) * p_minus
           + (rho_l * e + rho_r * eb) * qq
           + 2j * k * n3 * sb * (rho_l * e - rho_r * eb)
           + 2j * k * sb * (complex(n1, n2) * tau_r + complex(n1, -n2) * tau_l))
    return out[()] if out.ndim == 0 else out


def det4_oracle(k, cfg: PistonConfig):
    """det(M_- - W M_+) assembled from the 4x4 boundary-value problem.

    Independent of :func:`h_function`; the two agree up to the constant
    factor ``4 exp(i(alpha + theta))``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    L, a = cfg.L, cfg.a
    u1, u2 = unitary_matrix(cfg.outer), unitary_matrix(cfg.wall)
    w = np.zeros((4, 4), dtype=complex)
    w[0, 0], w[0, 3], w[3, 0], w[3, 3] = u1[0, 0], u1[0, 1], u1[1, 0], u1[1, 1]
    w[1:3, 1:3] = u2
    ea, eL = np.exp(1j * a * k), np.exp(1j * L * k)
    out = np.empty(k.shape, dtype=complex)
    for idx, kk in enumerate(k):
        mats = []
        for sgn in (1.0, -1.0):
            p, m = 1.0 + sgn * kk, 1.0 - sgn * kk
            mats.append(np.array([
                [p, m, 0, 0],
                [ea[idx] * m, p / ea[idx], 0, 0],
                [0, 0, ea[idx] * p, m / ea[idx]],
                [0, 0, eL[idx] * m, p / eL[idx]],
            ], dtype=complex))
        m_plus, m_minus = mats
        out[idx] = np.linalg.det(m_minus - w @ m_plus)
    return out[0] if out.size == 1 and np.ndim(k) <= 1 and len(k) == 1 else out


def asymptotic_sign(cfg: PistonConfig) -> int:
    """Sign of H(z) as z -> infinity (sign of the leading wall x outer product)."""
    co = secular_coefficients(cfg)
    p = np.trim_zeros(co.polys[0], "b")
    if p.size == 0:
        return 0
    return 1 if p[-1] > 0 else -1


def check_admissible(cfg: PistonConfig, samples: int = 600, require_nonzero_c: bool = False):
    """Verify that h(iz) keeps one sign on z > 0.

    Returns
    -------
    int
        The constant sign.

    Raises
    ------
    ZeroCrossing
        If a sign change is detected (negative longitudinal mode).
    ZeroModeError
        If ``require_nonzero_c`` and the small-k coefficient vanishes.
    """
    co = secular_coefficients(cfg)
    c = co.c
    scale = max(1.0, float(np.max(np.abs(co.taylor[:3]))))
    if require_nonzero_c and abs(c) <= 1e-12 * scale:
        raise ZeroModeError("small-k coefficient vanishes: longitudinal zero mode")
    # asymptotic regime: leading polynomial dominates beyond a few inverse lengths
    zmax = 50.0 / min(cfg.a, cfg.L - cfg.a) + 50.0
    z = np.geomspace(1e-3 * co.z_small, zmax, samples)
    hv = scaled_h(z, cfg)
    if c != 0.0:
        hv = np.concatenate(([c], hv))
        z = np.concatenate(([0.0], z))
    nz = hv != 0.0
    sg = np.sign(hv[nz])
    zz = z[nz]
    flips = np.nonzero(sg[1:] != sg[:-1])[0]
    if flips.size:
        i = flips[0]
        raise ZeroCrossing(f"h(iz) changes sign between z={zz[i]:.6g} and z={zz[i + 1]:.6g}: "
                           "inadmissible (negative mode)", zz[i], zz[i + 1])
    s_inf = asymptotic_sign(cfg)
    if sg.size and s_inf and sg[-1] != s_inf:
        raise ZeroCrossing(f"h(iz) changes sign beyond z={zz[-1]:.6g}", zz[-1], math.inf)
    return int(sg[-1]) if sg.size else s_inf


def split_terms(z, cfg: PistonConfig):
    """Leading product and exponentially small rest of H(z), with z-derivatives.

    Returns ``(P, dP, R, dR)`` where ``H = P + R``, ``P`` is the product of the
    wall and outer quadratics and ``R`` collects the decaying terms.
    """
    co = secular_coefficients(cfg)
    z = np.asarray(z, dtype=float)
    p0 = co.polys[0]
    P = npoly.polyval(z, p0)
    dP = npoly.polyval(z, npoly.polyder(p0))
    R = np.zeros_like(z)
    dR = np.zeros_like(z)
    for p, b in zip(co.polys[1:], co.rates[1:]):
        e = np.exp(-b * z)
        pv = npoly.polyval(z, p)
        R += pv * e
        dR += (npoly.polyval(z, npoly.polyder(p)) - b * pv) * e
    return P, dP, R, dR
