"""Scattering data of the piston wall viewed as a point interaction on the line."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryUnitary
from .errors import DegenerateWall

__all__ = ["ScatteringData", "d_function", "numerators", "amplitudes", "s_matrix_det"]

_TINY = 1e-300


def d_function(k, wall: BoundaryUnitary):
    """Amplitude denominator D(k) = (k^2+1)cos(theta) + (k^2-1)cos(gamma) + 2ik sin(theta).

    Works elementwise on arrays.
    """
    k = np.asarray(k, dtype=complex)
    k2 = k * k
    out = k2 * wall.cos_sum + wall.cos_diff + 2j * k * wall.sin_phase
    return out[()] if out.ndim == 0 else out


def numerators(k, wall: BoundaryUnitary):
    """``(D, rho_R, rho_L, tau_R, tau_L)`` at wavenumber(s) ``k``.

    The reflection/transmission numerators satisfy ``r = rho / D`` and
    ``t = tau / D``.  All five are polynomials in ``k``.
    """
    k = np.asarray(k, dtype=complex)
    st, sg = wall.sin_phase, wall.sin_mix
    q1, q2, q3 = wall.axis
    k2 = k * k
    even = k2 * wall.cos_sum - wall.cos_diff
    odd = 2j * k * q3 * sg
    d = k2 * wall.cos_sum + wall.cos_diff + 2j * k * st
    tau_r = -2j * k * complex(q1, -q2) * sg
    tau_l = -2j * k * complex(q1, q2) * sg
    return d, even + odd, even - odd, tau_r, tau_l


@dataclass(frozen=True)
class ScatteringData:
    """Wall scattering amplitudes at one wavenumber.

    ``shift_right = exp(2ika)`` and ``shift_left = exp(-2ika)`` are the
    factors that move the wall from the origin to ``x = a``; they are kept
    apart from ``r`` so callers can control overflow on the imaginary axis.
    """

    k: complex
    d_value: complex
    t_right: complex
    r_right: complex
    t_left: complex
    r_left: complex
    rho_right: complex
    rho_left: complex
    tau_right: complex
    tau_left: complex
    shift_right: complex = 1.0
    shift_left: complex = 1.0

    @property
    def r_right_shifted(self):
        return self.shift_right * self.r_right

    @property
    def r_left_shifted(self):
        return self.shift_left * self.r_left


def amplitudes(k: complex, wall: BoundaryUnitary, a: float = 0.0) -> ScatteringData:
    """Reflection and transmission amplitudes of the wall.

    Raises
    ------
    DegenerateWall
        If ``|D(k)| < 1e-300`` (evaluation at a bound-state momentum).
    """
    k = complex(k)
    d, rr, rl, tr, tl = (complex(v) for v in numerators(k, wall))
    if abs(d) < _TINY:
        raise DegenerateWall(f"D(k) vanishes at k={k!r}")
    inv = 1.0 / d
    return ScatteringData(k, d, tr * inv, rr * inv, tl * inv, rl * inv, rr, rl, tr, tl,
                          complex(np.exp(2j * k * a)), complex(np.exp(-2j * k * a)))


def s_matrix_det(k: complex, wall: BoundaryUnitary) -> complex:
    """det S(k) = -D(-k)/D(k)."""
    dp = complex(d_function(k, wall))
    if abs(dp) < _TINY:
        raise DegenerateWall(f"D(k) vanishes at k={k!r}")
    return -complex(d_function(-k, wall)) / dp
