"""U(2) boundary unitaries in Euler coordinates and wall admissibility.

A boundary unitary is written as

    U = exp(i*phase) * [cos(mix) I + i sin(mix) (v . sigma)]

with ``sigma`` the Pauli matrices and ``v`` a unit 3-vector.  The outer
matrix of a piston carries ``(alpha, beta, n)`` and the wall matrix
``(theta, gamma, q)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InadmissibleConfig

__all__ = [
    "BoundaryUnitary", "PistonConfig", "BoundStateClass", "ExtensionInfo",
    "unitary_matrix", "bound_state_momenta", "classify_extension",
    "dirichlet", "neumann",
]

HALF_PI = 0.5 * math.pi
_SNAP = 1e-14
# exact (cos, sin) at multiples of pi/2
_QUARTER = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))

_PAULI = np.array([[[0, 1], [1, 0]],
                   [[0, -1j], [1j, 0]],
                   [[1, 0], [0, -1]]], dtype=complex)


def snap_angle(x):
    """Return ``x`` snapped onto the nearest multiple of pi/2 if within 1e-14."""
    q = round(x / HALF_PI)
    if abs(x - q * HALF_PI) <= _SNAP * max(1.0, abs(x)):
        return q * HALF_PI
    return x


def trig(x):
    """(cos x, sin x), exact at multiples of pi/2.

    Structural switches (degenerate asymptotic branches, transparent walls,
    vanishing a-dependence) rely on these being exact zeros.
    """
    q = round(x / HALF_PI)
    if abs(x - q * HALF_PI) <= _SNAP * max(1.0, abs(x)):
        return _QUARTER[q % 4]
    return math.cos(x), math.sin(x)


def _canonical(phase, mix):
    # (phase, mix) ~ (phase + k pi, mix - k pi): both flip the overall sign
    k = round(mix / math.pi)
    mix = mix - k * math.pi
    phase = phase + k * math.pi
    phase = math.remainder(phase, 2.0 * math.pi)
    if phase == -math.pi:
        phase = math.pi
    return snap_angle(phase), snap_angle(mix)


@dataclass(frozen=True)
class BoundaryUnitary:
    """Euler-angle description of a U(2) element.

    Parameters
    ----------
    phase : float
        Global phase angle, reduced to (-pi, pi].
    mix : float
        Mixing angle, reduced to [-pi/2, pi/2].
    axis : tuple of float
        Unit 3-vector multiplying the Pauli matrices.

    Notes
    -----
    Angles outside the canonical ranges are reduced at construction using
    ``(phase, mix) -> (phase + pi, mix - pi)``, which leaves ``U`` unchanged.
    """

    phase: float
    mix: float
    axis: tuple = (0.0, 0.0, 1.0)
    cos_phase: float = field(init=False, repr=False, compare=False)
    sin_phase: float = field(init=False, repr=False, compare=False)
    cos_mix: float = field(init=False, repr=False, compare=False)
    sin_mix: float = field(init=False, repr=False, compare=False)
    cos_sum: float = field(init=False, repr=False, compare=False)
    cos_diff: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        phase, mix = _canonical(float(self.phase), float(self.mix))
        axis = tuple(float(c) for c in self.axis)
        if len(axis) != 3:
            raise ValueError("axis must have three components")
        norm = math.sqrt(sum(c * c for c in axis))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"axis must be a unit vector (norm={norm!r})")
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "mix", mix)
        object.__setattr__(self, "axis", axis)
        cp, sp = trig(phase)
        cm, sm = trig(mix)
        object.__setattr__(self, "cos_phase", cp)
        object.__setattr__(self, "sin_phase", sp)
        object.__setattr__(self, "cos_mix", cm)
        object.__setattr__(self, "sin_mix", sm)
        # cos(phase) +- cos(mix) as half-angle products: no cancellation near phase = +-mix
        cu, su = trig(0.5 * (phase + mix))
        cv, sv = trig(0.5 * (phase - mix))
        object.__setattr__(self, "cos_sum", 2.0 * cu * cv)
        object.__setattr__(self, "cos_diff", -2.0 * su * sv)

    @classmethod
    def from_raw(cls, phase, mix, axis):
        """Build from an unnormalized axis.

        Returns
        -------
        (BoundaryUnitary, float)
            The unitary and the norm of the supplied axis.  A zero axis is
            accepted only when ``sin(mix) == 0`` and is replaced by (0, 0, 1).
        """
        axis = np.asarray(axis, dtype=float)
        norm = float(np.linalg.norm(axis))
        if norm == 0.0:
            _, m = _canonical(float(phase), float(mix))
            if trig(m)[1] != 0.0:
                raise ValueError("zero axis with nonzero sin(mix)")
            return cls(phase, mix, (0.0, 0.0, 1.0)), norm
        return cls(phase, mix, tuple(axis / norm)), norm


def unitary_matrix(u: BoundaryUnitary) -> np.ndarray:
    """The 2x2 complex matrix represented by ``u``."""
    vs = np.tensordot(np.asarray(u.axis), _PAULI, axes=1)
    return complex(u.cos_phase, u.sin_phase) * (
        u.cos_mix * np.eye(2) + 1j * u.sin_mix * vs)


class BoundStateClass(enum.Enum):
    NoBoundStates = 0
    OneBoundState = 1
    TwoBoundStates = 2


@dataclass(frozen=True)
class ExtensionInfo:
    """Bound-state classification of a wall."""

    kind: BoundStateClass
    zero_mode: bool
    momenta: tuple

    @property
    def admissible(self):
        return self.kind is BoundStateClass.NoBoundStates


def _kappas(wall):
    """Candidate kappa values; None marks a tan pole (kappa infinite)."""
    out = []
    for sgn in (1.0, -1.0):
        c, s = trig(0.5 * (wall.phase + sgn * wall.mix))
        out.append(None if c == 0.0 or abs(c) < 1e-300 else -s / c)
    return out


def _zero_mode(wall):
    return any(k is not None and k == 0.0 for k in _kappas(wall))


def bound_state_momenta(wall: BoundaryUnitary) -> list:
    """Strictly positive, finite bound-state momenta of the wall, sorted.

    The candidates are ``kappa = -tan((theta +- gamma)/2)``; at tangent poles
    the one-sided limit is infinite and no bound state is produced.  A zero
    value is not listed (see :func:`classify_extension` for the flag).
    """
    ks = [k for k in _kappas(wall) if k is not None and k > 0.0 and math.isfinite(k)]
    return sorted(ks)


def classify_extension(wall: BoundaryUnitary) -> ExtensionInfo:
    """Count bound states and flag a kappa = 0 zero mode."""
    ks = bound_state_momenta(wall)
    return ExtensionInfo(BoundStateClass(len(ks)), _zero_mode(wall), tuple(ks))


@dataclass(frozen=True)
class PistonConfig:
    """Complete longitudinal problem: two unitaries, length and position.

    Parameters
    ----------
    outer : BoundaryUnitary
        Couples the ends x = 0 and x = L (angles alpha, beta, axis n).
    wall : BoundaryUnitary
        Couples the two faces of the piston (angles theta, gamma, axis q).
    L : float
        Total length.
    a : float
        Piston position, 0 < a < L.
    diagnostic : bool
        Skip the bound-state admissibility check.
    """

    outer: BoundaryUnitary
    wall: BoundaryUnitary
    L: float
    a: float
    diagnostic: bool = False

    def __post_init__(self):
        L, a = float(self.L), float(self.a)
        if not (L > 0.0 and math.isfinite(L)):
            raise ValueError(f"L must be positive, got {L!r}")
        if not 0.0 < a < L:
            raise ValueError(f"piston position must satisfy 0 < a < L, got a={a!r}, L={L!r}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "a", a)
        if not self.diagnostic:
            ks = bound_state_momenta(self.wall)
            if ks:
                n = len(ks)
                raise InadmissibleConfig(
                    f"inadmissible: {n} bound state{'s' if n > 1 else ''} "
                    f"(kappa={', '.join(f'{k:.6g}' for k in ks)})")

    @classmethod
    def from_angles(cls, alpha, beta, n, theta, gamma, q, L=1.0, a=0.5, diagnostic=False):
        return cls(BoundaryUnitary(alpha, beta, tuple(n)),
                   BoundaryUnitary(theta, gamma, tuple(q)), L, a, diagnostic)

    def with_position(self, a):
        return PistonConfig(self.outer, self.wall, self.L, a, self.diagnostic)


def dirichlet(L=1.0, a=0.5) -> PistonConfig:
    """Dirichlet conditions at both ends and on both faces of the wall."""
    d = BoundaryUnitary(math.pi, 0.0)
    return PistonConfig(d, d, L, a)


def neumann(L=1.0, a=0.5) -> PistonConfig:
    """Neumann conditions everywhere."""
    n = BoundaryUnitary(0.0, 0.0)
    return PistonConfig(n, n, L, a)
