import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_piston import (PistonConfig, ZeroCrossing, ZeroModeError, asymptotic_sign,
                            check_admissible, d_lna_log_h, det4_oracle, dirichlet,
                            dz_log_reduced, h_function, log_h_imag, scaled_h,
                            secular_coefficients, small_k_coefficient, small_k_coefficient_da)
from conftest import random_unitary, unitaries

positions = st.floats(0.05, 0.95)


def generic(a=0.3):
    return PistonConfig.from_angles(2.8, 0.2, (1, 0, 0), 1.0, 0.3, (0.6, 0, 0.8), 1.0, a)


@settings(max_examples=200)
@given(unitaries(), unitaries(), positions, st.complex_numbers(max_magnitude=20))
def test_det4_identity(outer, wall, a, k):
    cfg = PistonConfig(outer, wall, 1.0, a, diagnostic=True)
    lhs = det4_oracle(k, cfg)
    rhs = 4 * np.exp(1j * (outer.phase + wall.phase)) * h_function(k, cfg)
    scale = max(1.0, abs(lhs)) * math.exp(abs(k.imag))
    assert abs(lhs - rhs) <= 1e-9 * scale


@pytest.mark.parametrize("a", [0.2, 0.37])
def test_dirichlet_roots(a):
    cfg = dirichlet(1.0, a)
    n = np.arange(1, 6)
    for k in np.concatenate((n * math.pi / a, n * math.pi / (1 - a))):
        assert abs(h_function(k, cfg)) < 1e-10 * k ** 2


@given(unitaries(), unitaries(), positions, st.floats(0.01, 30))
def test_h_even_on_imaginary_axis(outer, wall, a, z):
    cfg = PistonConfig(outer, wall, 1.0, a, diagnostic=True)
    hp, hm = h_function(1j * z, cfg), h_function(-1j * z, cfg)
    assert abs(hp - hm) <= 1e-10 * max(1.0, abs(hp))


@settings(max_examples=50)
@given(unitaries(), unitaries(), positions, st.floats(0.01, 40))
def test_scaled_form_matches_complex_form(outer, wall, a, z):
    cfg = PistonConfig(outer, wall, 1.0, a, diagnostic=True)
    ref = (h_function(1j * z, cfg) * math.exp(-z)).real
    # the scaled form evaluates the same function without overflow
    scale = (1 + z) ** 4
    assert scaled_h(z, cfg) == pytest.approx(ref, abs=1e-11 * scale)


def test_small_k_dirichlet_exact():
    for a in (0.1, 0.25, 0.5, 0.8):
        assert small_k_coefficient(dirichlet(1.0, a)) == pytest.approx(16 * a * (1 - a), rel=1e-15)


def richardson_c(cfg, z=2e-3):
    f = lambda t: (h_function(1j * t, cfg) / t ** 2).real
    return (4 * f(z / 2) - f(z)) / 3


def test_small_k_matches_numeric_limit(rng):
    for _ in range(30):
        cfg = PistonConfig(random_unitary(rng), random_unitary(rng), 1.0, rng.uniform(0.05, 0.95),
                           diagnostic=True)
        c = small_k_coefficient(cfg)
        assert c == pytest.approx(richardson_c(cfg), rel=1e-6, abs=1e-8)
        assert c == pytest.approx(secular_coefficients(cfg).c, rel=1e-10, abs=1e-12)


def test_small_k_derivative(rng):
    for _ in range(10):
        cfg = PistonConfig(random_unitary(rng), random_unitary(rng), 1.0, rng.uniform(0.1, 0.9),
                           diagnostic=True)
        h = 1e-5
        fd = (small_k_coefficient(cfg.with_position(cfg.a + h))
              - small_k_coefficient(cfg.with_position(cfg.a - h))) / (2 * h)
        assert small_k_coefficient_da(cfg) == pytest.approx(fd, rel=1e-7, abs=1e-7)


@pytest.mark.parametrize("z", [1e-4, 0.05, 0.7, 3.0, 40.0])
def test_log_derivatives_by_finite_differences(z):
    cfg = generic()
    h = 1e-6 * max(z, 1e-2)
    fz = (log_h_imag(z + h, cfg).log_magnitude - log_h_imag(z - h, cfg).log_magnitude) / (2 * h)
    assert dz_log_reduced(z, cfg) + 2 / z == pytest.approx(fz, rel=1e-6, abs=1e-6)
    ha = 1e-6
    fa = (log_h_imag(z, cfg.with_position(cfg.a + ha)).log_magnitude
          - log_h_imag(z, cfg.with_position(cfg.a - ha)).log_magnitude) / (2 * ha)
    assert d_lna_log_h(z, cfg) == pytest.approx(fa, rel=1e-6, abs=1e-6)


def test_log_h_sign_and_raw():
    cfg = generic()
    v = log_h_imag(1.5, cfg)
    ref = h_function(1.5j, cfg).real
    assert v.sign == np.sign(ref)
    assert v.log_magnitude == pytest.approx(math.log(abs(ref)) - 1.5 * cfg.L, rel=1e-12)
    assert v.raw == pytest.approx(ref, rel=1e-12)


def test_asymptotic_sign():
    cfg = generic()
    assert asymptotic_sign(cfg) == np.sign(scaled_h(500.0, cfg))


def test_admissible_config_passes():
    assert check_admissible(generic()) == 1


def test_outer_bound_state_detected():
    # this outer condition alone supports a negative mode
    cfg = PistonConfig.from_angles(2.8, 0.8, (1, 0, 0), 1.0, 0.3, (0.6, 0, 0.8), 1.0, 0.3)
    with pytest.raises(ZeroCrossing) as info:
        check_admissible(cfg)
    lo, hi = info.value.z_lo, info.value.z_hi
    assert lo < hi
    assert np.sign(scaled_h(lo, cfg)) != np.sign(scaled_h(hi, cfg))


def test_zero_mode_detected():
    cfg = PistonConfig.from_angles(0.0, 0.0, (1, 0, 0), math.pi / 2, math.pi / 2, (0, 0, 1), 1.0, 0.3)
    assert small_k_coefficient(cfg) == 0.0
    with pytest.raises(ZeroModeError):
        check_admissible(cfg, require_nonzero_c=True)
