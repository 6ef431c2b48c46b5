"""Large-z expansion of ln[z^-2 h(iz)].

Each of the wall pair ``(theta, gamma)`` and the outer pair ``(alpha, beta)``
contributes a factor

    Psi(z; x, y) = m_- - 2 z sin x - z^2 m_+,   m_+- = cos x +- cos y,

whose logarithm expands as ``e ln z + tau + sum_n omega_n z^-n``.  Everything
else in h(iz) is exponentially small relative to exp(zL).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import PistonConfig, trig

__all__ = [
    "AsymptoticData", "m_pm", "omega_n", "chi_exponent", "pair_exponent",
    "tau_constant", "asymptotic_data", "subtraction_term", "omega_decay_radius",
    "pair_roots",
]


def m_pm(x: float, y: float) -> tuple:
    """(cos x + cos y, cos x - cos y), as half-angle products.

    The product form keeps exact zeros exact (e.g. y = pi - x) instead of
    leaving rounding residue that would select the wrong branch.
    """
    cu, su = trig(0.5 * (x + y))
    cv, sv = trig(0.5 * (x - y))
    return 2.0 * cu * cv, -2.0 * su * sv


def _branch(x, y):
    # 0: generic, 1: m_+ = 0 only, 2: m_+ = 0 and sin x = 0
    mp, _ = m_pm(x, y)
    if mp != 0.0:
        return 0
    return 2 if trig(x)[1] == 0.0 else 1


def omega_n(n: int, x: float, y: float) -> float:
    """Coefficient of z^-n in the expansion of ln Psi(z; x, y).

    Generic branch (m_+ != 0) uses the closed double-factorial sum; with
    m_+ = 0 and sin x != 0 the coefficient is ``-cot(x)^n / n``; with
    m_+ = sin x = 0 it vanishes.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    br = _branch(x, y)
    cx, sx = trig(x)
    if br == 2:
        return 0.0
    if br == 1:
        return 0.0 - (cx / sx) ** n / n
    mp, mm = m_pm(x, y)
    total = 0.0
    for j in range(n // 2 + 1):
        coef = 2.0 ** (n - 2 * j) * math.factorial(n - j - 1) / (
            math.factorial(j) * math.factorial(n - 2 * j))
        total += coef * sx ** (n - 2 * j) * mm ** j / mp ** (n - j)
    return (-1) ** (n + 1) * total


def pair_exponent(x: float, y: float) -> int:
    """Power of z in the leading behaviour of Psi(z; x, y): 2, 1 or 0."""
    return 2 - _branch(x, y)


def chi_exponent(wall_pair, outer_pair) -> int:
    """Exponent of ln z in ln[z^-2 h(iz)] at large z."""
    return pair_exponent(*wall_pair) + pair_exponent(*outer_pair) - 2


def tau_constant(x: float, y: float) -> float:
    """Constant term of ln|Psi(z; x, y)| at large z.

    Stored as a log of an absolute value; it never enters forces or
    z-derivatives.
    """
    br = _branch(x, y)
    mp, mm = m_pm(x, y)
    if br == 0:
        return math.log(abs(mp))
    if br == 1:
        return math.log(abs(2.0 * trig(x)[1]))
    return math.log(abs(mm)) if mm != 0.0 else -math.inf


@dataclass(frozen=True)
class AsymptoticData:
    """Large-z data of ln[z^-2 h(iz)].

    Attributes
    ----------
    chi : int
        Coefficient of ln z.
    omega : tuple of float
        ``omega[n-1]`` is the summed wall + outer coefficient of z^-n.
    tau_sum : float
        Constant term (informational only).
    N : int
        Truncation order.
    """

    chi: int
    omega: tuple
    tau_sum: float
    N: int

    def omega_at(self, n):
        return self.omega[n - 1] if 1 <= n <= len(self.omega) else 0.0


def asymptotic_data(cfg: PistonConfig, N: int) -> AsymptoticData:
    """Collect chi, omega_1..omega_N and tau for a configuration."""
    w, o = cfg.wall, cfg.outer
    wp, op = (w.phase, w.mix), (o.phase, o.mix)
    om = tuple(omega_n(n, *wp) + omega_n(n, *op) for n in range(1, N + 1))
    return AsymptoticData(chi_exponent(wp, op), om,
                          tau_constant(*wp) + tau_constant(*op), int(N))


def subtraction_term(z, data: AsymptoticData, L: float):
    """zL + chi ln z + sum_{n<=N} omega_n z^-n (constants dropped)."""
    z = np.asarray(z, dtype=float)
    out = z * L + data.chi * np.log(z)
    inv = 1.0 / z
    p = inv.copy()
    for w in data.omega:
        out = out + w * p
        p = p * inv
    return out[()] if out.ndim == 0 else out


def omega_decay_radius(data: AsymptoticData) -> float:
    """Smallest z beyond which successive omega terms shrink.

    Returns ``max |omega_n / omega_{n-1}|`` over the stored orders (0 when
    the coefficients vanish).
    """
    r = 0.0
    for n in range(2, len(data.omega) + 1):
        prev, cur = data.omega[n - 2], data.omega[n - 1]
        if prev != 0.0:
            r = max(r, abs(cur / prev))
        elif cur != 0.0:
            r = math.inf
    return r


def pair_roots(x: float, y: float) -> np.ndarray:
    """Zeros of Psi(z; x, y) (0, 1 or 2 of them, possibly complex).

    ``ln Psi = const + e ln z + sum_r ln(1 - r/z)``, hence
    ``omega_n = -sum_r r^n / n``.
    """
    br = _branch(x, y)
    mp, mm = m_pm(x, y)
    sx = trig(x)[1]
    if br == 2:
        return np.zeros(0, dtype=complex)
    if br == 1:
        return np.array([mm / (2.0 * sx)], dtype=complex)
    # m_+ z^2 + 2 sin x z - m_- = 0
    disc = complex(sx * sx + mp * mm)
    sq = disc ** 0.5
    b = sx
    # numerically stable pair
    q = -(b + (sq if (b * sq.real) >= 0 else -sq))
    if q == 0:
        return np.array([0.0, 0.0], dtype=complex)
    return np.array([q / mp, -mm / q], dtype=complex)
