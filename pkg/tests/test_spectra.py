import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_piston import (OrderingError, ParseError, TransverseMode, TransverseSpectrum,
                            bessel_zeros, disk_spectrum, load_spectrum, point_spectrum,
                            save_spectrum, sphere_degeneracy, sphere_spectrum)


def bisect_zero(n, lo, hi, iters=200):
    with mpmath.workdps(40):
        a, b = mpmath.mpf(lo), mpmath.mpf(hi)
        fa = mpmath.besselj(n, a)
        for _ in range(iters):
            m = (a + b) / 2
            fm = mpmath.besselj(n, m)
            if fm == 0:
                return float(m)
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        return float((a + b) / 2)


def scan_zeros(n, lmax, step=0.05):
    """Zeros of J_n below lmax by exhaustive sign-change scan plus bisection."""
    x = np.arange(step, lmax + step, step)
    f = np.array([float(mpmath.besselj(n, v)) for v in x])
    idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    return [bisect_zero(n, x[i], x[i + 1]) for i in idx if bisect_zero(n, x[i], x[i + 1]) <= lmax]


@pytest.mark.parametrize("n", [0, 1])
def test_first_bessel_zeros(n):
    zs = bessel_zeros(20.0)[n][:5]
    ref = scan_zeros(n, 17.0)[:5]
    assert len(zs) == 5
    assert np.allclose(zs, ref, rtol=0, atol=1e-12)


def test_bessel_zeros_against_mpmath_table():
    zs = bessel_zeros(30.0)
    for n in (0, 3, 10):
        for k, z in enumerate(zs[n][:4], 1):
            assert z == pytest.approx(float(mpmath.besseljzero(n, k)), abs=1e-12)


def test_interlacing():
    zs = bessel_zeros(60.0)
    for n in range(min(20, len(zs) - 1)):
        a, b = zs[n], zs[n + 1]
        # j_{n,k} < j_{n+1,k} < j_{n,k+1}
        for k in range(len(b)):
            assert a[k] < b[k]
            if k + 1 < len(a):
                assert b[k] < a[k + 1]


def test_disk_count_matches_scan():
    spec = disk_spectrum(20.0)
    count = 0
    for n in range(0, 21):
        c = len(scan_zeros(n, 20.0, step=0.1))
        count += c * (1 if n == 0 else 2)
    assert spec.counting(20.0) == count
    # Weyl law for the unit disk: N(lambda) ~ lambda^2/4 - lambda/2
    assert abs(count - (400 / 4 - 20 / 2)) < 10


def test_disk_extension_consistent():
    small, big = disk_spectrum(10.0), disk_spectrum(10.0).extended(15.0)
    assert big.lambda_max >= 15.0
    n = len(small.modes)
    assert np.allclose(big.lambdas[:n], small.lambdas)


@given(st.integers(0, 60), st.integers(1, 6))
def test_sphere_degeneracy_formula(l, d):
    ref = math.comb(l + d, d) - math.comb(l + d - 2, d) if l >= 2 else (1 if l == 0 else d + 1)
    assert sphere_degeneracy(l, d) == ref


def test_sphere_spectrum_values():
    s = sphere_spectrum(2, 5.0)
    assert np.allclose(s.lambdas, [math.sqrt(l * (l + 1)) for l in range(len(s.modes))])
    assert list(s.degeneracies) == [2 * l + 1 for l in range(len(s.modes))]
    assert s.lambdas[-1] <= 5.0 < math.sqrt(len(s.modes) * (len(s.modes) + 1))


def test_sphere_power_tail():
    s = sphere_spectrum(2, 10.0)
    p, cut = 5.5, 10.0
    ref = sum((2 * l + 1) * (l * (l + 1)) ** (-p / 2) for l in range(10, 200000)
              if math.sqrt(l * (l + 1)) > cut)
    assert s.power_tail(p, cut) == pytest.approx(ref, rel=1e-8)


def test_point_spectrum():
    s = point_spectrum()
    assert s.lambdas.tolist() == [0.0] and s.dimension == 0


def test_roundtrip(tmp_path):
    s = sphere_spectrum(3, 6.0)
    path = tmp_path / "s.txt"
    save_spectrum(s, path)
    t = load_spectrum(path)
    assert t.dimension == 3
    assert t.lambdas.tolist() == s.lambdas.tolist()
    assert t.degeneracies.tolist() == s.degeneracies.tolist()


@pytest.mark.parametrize("text,lineno,exc", [
    ("1.0 2\n2.0\n", 2, ParseError),
    ("# c\n1.0 x\n", 2, ParseError),
    ("1.0 0\n", 1, ParseError),
    ("-1 1\n", 1, ParseError),
    ("1 1\n2 1\n1.5 1\n", 3, OrderingError),
])
def test_parse_errors(tmp_path, text, lineno, exc):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(exc) as info:
        load_spectrum(path)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_mode_validation():
    with pytest.raises(ValueError):
        TransverseMode(-1.0, 1)
    with pytest.raises(ValueError):
        TransverseMode(1.0, 0)
    with pytest.raises(OrderingError):
        TransverseSpectrum((TransverseMode(2.0, 1), TransverseMode(1.0, 1)), "x", 1, 2.0)
