import math

import mpmath
import numpy as np
import pytest

from casimir_piston import (Equilibrium, MissingZetaData, OutOfStrip, PistonConfig,
                            ToleranceNotMet, ZeroModeError, ZetaNData, big_z, big_z_details,
                            casimir_energy_report, casimir_force, classify_equilibria,
                            dirichlet, force_profile, load_spectrum, point_spectrum,
                            save_spectrum, sphere_spectrum, zero_mode_laurent, zeta_lambda_strip)
from oracles import abel_force_extrapolated

GENERIC = [
    (2.8, 0.2, (1, 0, 0), 1.0, 0.3, (0.6, 0, 0.8)),
    (3.0, -0.1, (0, 0.6, 0.8), 0.5, -0.2, (0, 1, 0)),
    (1.0, 0.4, (0.8, 0, 0.6), 2.0, 1.0, (0.6, 0.8, 0)),
]


def dirichlet_force(a, L=1.0):
    return -math.pi / 24 * (a ** -2 - (L - a) ** -2)


@pytest.mark.parametrize("a", [0.1, 0.2, 0.25, 0.4, 0.5, 0.77])
def test_dirichlet_point(a):
    r = casimir_force(dirichlet(1.0, a), point_spectrum(), tol=1e-12)
    assert r.force == pytest.approx(dirichlet_force(a), rel=1e-12, abs=1e-12)
    assert r.error_bound <= 1e-12


def test_dirichlet_neumann_wall():
    # Dirichlet outer ends; the wall is Dirichlet on one face and Neumann on the other,
    # so one chamber is DD (E = -pi/24w) and the other DN (E = +pi/48w)
    for a in (0.2, 0.6):
        cfg = PistonConfig.from_angles(math.pi, 0, (0, 0, 1), math.pi / 2, math.pi / 2, (0, 0, 1),
                                       1.0, a)
        F = casimir_force(cfg, point_spectrum(), tol=1e-12).force
        assert F == pytest.approx(-math.pi / (24 * a * a) - math.pi / (48 * (1 - a) ** 2), rel=1e-10)


@pytest.mark.parametrize("angles,a", [(GENERIC[0], 0.3), (GENERIC[1], 0.6), (GENERIC[2], 0.45)])
def test_force_matches_regularized_mode_sum(angles, a):
    cfg = PistonConfig.from_angles(*angles, L=1.0, a=a)
    F = casimir_force(cfg, point_spectrum(), tol=1e-12).force
    assert F == pytest.approx(abel_force_extrapolated(cfg), rel=1e-4)


def test_null_force_transparent_wall():
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), math.pi / 2, -math.pi / 2, (1, 0, 0), 1.0, 0.3)
    assert casimir_force(cfg, sphere_spectrum(2, 20.0), tol=1e-10).force == 0.0


def test_odd_parity_sphere():
    spec = sphere_spectrum(2, 40.0)
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.3)
    f1 = casimir_force(cfg, spec, tol=1e-9).force
    f2 = casimir_force(cfg.with_position(0.7), spec, tol=1e-9).force
    assert f1 == pytest.approx(-f2, abs=2e-9)


def test_cutoff_independence():
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.3)
    f1 = casimir_force(cfg, sphere_spectrum(2, 3.0), tol=1e-9).force
    f2 = casimir_force(cfg, sphere_spectrum(2, 80.0), tol=1e-9).force
    assert f1 == pytest.approx(f2, abs=2e-9)


def test_file_spectrum_equals_builtin(tmp_path):
    spec = sphere_spectrum(2, 60.0)
    save_spectrum(spec, tmp_path / "s2.txt")
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.35)
    f1 = casimir_force(cfg, spec, tol=1e-9).force
    f2 = casimir_force(cfg, load_spectrum(tmp_path / "s2.txt"), tol=1e-9).force
    assert f1 == pytest.approx(f2, abs=2e-9)


def test_edge_divergence():
    # a^2 F -> -pi/24 near the outer end for Dirichlet chambers
    vals = [a * a * casimir_force(dirichlet(1.0, a), point_spectrum(), 1e-10).force
            for a in (0.01, 0.001)]
    assert vals[1] == pytest.approx(-math.pi / 24, rel=1e-5)
    F = [abs(casimir_force(dirichlet(1.0, a), sphere_spectrum(2, 10.0), 1e-6).force)
         for a in (0.2, 0.1, 0.05)]
    assert F[0] < F[1] < F[2]


def test_tolerance_not_met_carries_best():
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.3)
    with pytest.raises(ToleranceNotMet) as info:
        casimir_force(cfg, sphere_spectrum(2, 40.0), tol=1e-20)
    best = info.value.best
    assert best is not None and math.isfinite(best.force)
    ref = casimir_force(cfg, sphere_spectrum(2, 40.0), tol=1e-9).force
    assert best.force == pytest.approx(ref, abs=2e-9)


def test_zero_mode_rejected_with_zero_lambda():
    cfg = PistonConfig.from_angles(0.0, 0.0, (1, 0, 0), math.pi / 2, math.pi / 2, (0, 0, 1), 1.0, 0.3)
    with pytest.raises(ZeroModeError):
        casimir_force(cfg, sphere_spectrum(2, 10.0))


# ---------------------------------------------------------------- zeta function

def dirichlet_tower(s, lam, a, L=1.0, M=60):
    """Sum over k = n pi/a and n pi/(L-a) of (k^2 + lam^2)^-s with an Euler-Maclaurin tail."""
    with mpmath.workdps(30):
        s, lam = mpmath.mpf(s), mpmath.mpf(lam)
        total = mpmath.mpf(0)
        for w in (a, L - a):
            c = mpmath.pi / w
            f = lambda n: (c * c * n * n + lam * lam) ** (-s)
            total += mpmath.fsum(f(n) for n in range(1, M))
            # int_M^inf f: binomial series in (lam / c n)^2 (quadrature is unreliable here)
            total += mpmath.fsum(mpmath.binomial(-s, k) * lam ** (2 * k) * c ** (-2 * s - 2 * k)
                                 * mpmath.mpf(M) ** (1 - 2 * s - 2 * k) / (2 * s + 2 * k - 1)
                                 for k in range(40))
            total += f(M) / 2
            for j, b in ((1, mpmath.bernoulli(2)), (2, mpmath.bernoulli(4)), (3, mpmath.bernoulli(6))):
                total -= b / mpmath.factorial(2 * j) * mpmath.diff(f, M, 2 * j - 1)
        return float(total)


@pytest.mark.parametrize("s,lam", [(0.75, 1.3), (0.9, 4.0), (0.6, 0.5)])
def test_strip_against_direct_sum(s, lam):
    got = zeta_lambda_strip(s, lam, dirichlet(1.0, 0.3), N=4, tol=1e-13)
    assert got == pytest.approx(dirichlet_tower(s, lam, 0.3), rel=1e-9)


def test_strip_generic_N_independent():
    cfg = PistonConfig.from_angles(*GENERIC[0], L=1.0, a=0.3)
    v = [zeta_lambda_strip(0.8, 2.0, cfg, N=N, tol=1e-13) for N in (2, 4, 6)]
    assert v[0] == pytest.approx(v[1], rel=1e-9) and v[1] == pytest.approx(v[2], rel=1e-9)


def test_strip_complex_s_conjugation():
    cfg = PistonConfig.from_angles(*GENERIC[0], L=1.0, a=0.3)
    z1 = zeta_lambda_strip(0.8 + 0.5j, 2.0, cfg)
    z2 = zeta_lambda_strip(0.8 - 0.5j, 2.0, cfg)
    assert z1 == pytest.approx(z2.conjugate(), abs=1e-10)
    assert zeta_lambda_strip(0.8 + 0j, 2.0, cfg) == pytest.approx(zeta_lambda_strip(0.8, 2.0, cfg))


@pytest.mark.parametrize("s", [0.5, 1.0, 1.5, 0.2 + 1j])
def test_out_of_strip(s):
    with pytest.raises(OutOfStrip):
        zeta_lambda_strip(s, 1.0, dirichlet())


def test_zero_mode_laurent_dirichlet():
    pole, fin = zero_mode_laurent(dirichlet(1.0, 0.5), N=3)
    assert pole == 0.0
    assert fin == pytest.approx(-math.pi / 3, rel=1e-10)


def test_zero_mode_laurent_independent_of_split():
    cfg = PistonConfig.from_angles(*GENERIC[0], L=1.0, a=0.3)
    ref = zero_mode_laurent(cfg, N=3)
    for z0, N in ((5.0, 3), (40.0, 5), (100.0, 4)):
        p, f = zero_mode_laurent(cfg, N=N, z0=z0)
        assert p == pytest.approx(ref[0], rel=1e-12)
        assert f == pytest.approx(ref[1], rel=1e-8)


def test_energy_derivative_is_force():
    cfg = PistonConfig.from_angles(*GENERIC[0], L=1.0, a=0.3)
    zn = ZetaNData.trivial(1)
    h = 1e-4
    e1 = casimir_energy_report(cfg.with_position(0.3 + h), point_spectrum(), zn, tol=1e-12)
    e0 = casimir_energy_report(cfg.with_position(0.3 - h), point_spectrum(), zn, tol=1e-12)
    F = casimir_force(cfg, point_spectrum(), tol=1e-12).force
    assert e1.pole_coefficient == e0.pole_coefficient
    assert -(e1.finite_part - e0.finite_part) / (2 * h) == pytest.approx(F, rel=1e-6)


def test_dirichlet_energy():
    for a in (0.25, 0.5):
        e = casimir_energy_report(dirichlet(1.0, a), point_spectrum(), ZetaNData.trivial(1))
        assert e.finite_part == pytest.approx(-math.pi / 24 * (1 / a + 1 / (1 - a)), rel=1e-9)
        assert not e.ambiguity_note


def probe_data(D):
    return ZetaNData(1.0, 1.0, 1.0, 1.0, {i: (1.0, 1.0) for i in range(D + 1)})


def test_energy_pole_position_independent_sphere():
    spec = sphere_spectrum(2, 30.0)
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.3)
    r1 = casimir_energy_report(cfg, spec, probe_data(3), tol=1e-8)
    r2 = casimir_energy_report(cfg.with_position(0.45), spec, probe_data(3), tol=1e-8)
    assert r1.pole_coefficient == pytest.approx(r2.pole_coefficient, abs=1e-8)
    assert r1.ambiguity_note
    assert "zeta_N(-1)" in r1.ambiguity_note.drivers


def test_missing_zeta_data():
    spec = sphere_spectrum(2, 10.0)
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.3)
    with pytest.raises(MissingZetaData) as info:
        casimir_energy_report(cfg, spec, ZetaNData(half_points={0: (0.0, 0.0)}))
    assert info.value.index == 2


def test_big_z_self_convergence():
    spec = sphere_spectrum(2, 30.0)
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.3)
    a = big_z_details(-0.5, cfg, spec, 3, tol=1e-9)
    b = big_z_details(-0.5, cfg, spec, 3, tol=1e-11, lambda_cut=2 * a.lambda_cut)
    assert a.value == pytest.approx(b.value, rel=1e-7)
    assert big_z(-0.5, cfg, point_spectrum(), 3) == 0.0


# ---------------------------------------------------------------- equilibria

def test_classify_equilibria_synthetic():
    a = np.linspace(0.05, 0.95, 19)
    f = lambda x: math.cos(2 * math.pi * x)   # zeros at 0.25 (+ to -) and 0.75 (- to +)
    prof = [(x, f(x)) for x in a]
    eq = classify_equilibria(prof, force_fn=f)
    assert [e for _, e in eq] == [Equilibrium.Stable, Equilibrium.Unstable]
    assert eq[0][0] == pytest.approx(0.25, abs=1e-9)
    assert eq[1][0] == pytest.approx(0.75, abs=1e-9)
    lin = classify_equilibria(prof)
    assert lin[0][0] == pytest.approx(0.25, abs=1e-2)


def test_force_profile_equilibrium_at_centre():
    cfg = PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (1, 0, 0), 1.0, 0.5)
    spec = sphere_spectrum(2, 20.0)
    prof = force_profile(cfg, spec, [0.3, 0.45, 0.55, 0.7], tol=1e-8)
    eq = classify_equilibria(prof, force_fn=lambda x: casimir_force(cfg.with_position(x), spec, 1e-8).force,
                             xtol=1e-6)
    assert any(abs(x - 0.5) < 1e-5 for x, _ in eq)
