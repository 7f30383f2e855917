import cmath
import math

import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from hypervol.numerics import (
    InvalidLevelError,
    LogComplex,
    dilog,
    lobachevsky,
    log_quantum_factorial,
    quantum_integer,
)


# ---------------------------------------------------------------------------
# oracles, intentionally dumb and independent of the implementation
# ---------------------------------------------------------------------------

def dilog_series_oracle(z, terms=4000):
    # converges only for |z| < 1, slowly near the boundary
    total = 0j
    zp = 1.0 + 0j
    for n in range(1, terms + 1):
        zp *= z
        total += zp / (n * n)
    return total


def lobachevsky_quad_oracle(theta):
    # -int_0^theta log|2 sin x| dx, integrable log singularity at 0
    val, err = scipy.integrate.quad(
        lambda x: math.log(abs(2.0 * math.sin(x))) if x != 0 else 0.0,
        0.0,
        theta,
        limit=200,
    )
    assert err < 1e-10
    return -val


def naive_quantum_factorial(n, r):
    total = 1.0 + 0j
    for m in range(1, n + 1):
        if m % r == 0:
            return 0j
        total *= 2j * math.sin(2.0 * math.pi * m / r)
    return total


# ---------------------------------------------------------------------------
# dilog
# ---------------------------------------------------------------------------

def test_dilog_special_points():
    assert dilog(0) == 0j
    assert abs(dilog(1) - math.pi ** 2 / 6) < 1e-15
    assert abs(dilog(-1) - (-math.pi ** 2 / 12)) < 1e-14
    # Li2(1/2) = pi^2/12 - log(2)^2/2
    assert abs(dilog(0.5) - (math.pi ** 2 / 12 - math.log(2) ** 2 / 2)) < 1e-14


def test_dilog_against_series_inside_disc():
    for z in [0.3 + 0.1j, -0.45 + 0.2j, 0.1 - 0.49j, 0.62 + 0.3j, -0.8 - 0.1j,
              0.55 - 0.55j, 0.9j, -0.97, 0.2 + 0.75j]:
        ref = dilog_series_oracle(z)
        assert abs(dilog(z) - ref) < 5e-10, z


def test_dilog_inversion_region():
    # check the functional equation itself at |z| > 1
    for z in [2.0 + 1.0j, -3.0 + 0.5j, 1.5 - 2.5j, -0.2 + 4.0j]:
        lhs = dilog(z) + dilog(1.0 / z)
        rhs = -math.pi ** 2 / 6 - 0.5 * cmath.log(-z) ** 2
        assert abs(lhs - rhs) < 1e-12, z


def test_dilog_reflection_identity():
    for z in [0.7 + 0.2j, 0.51 - 0.4j, 0.99 + 0.05j]:
        lhs = dilog(z) + dilog(1.0 - z)
        rhs = math.pi ** 2 / 6 - cmath.log(z) * cmath.log(1.0 - z)
        assert abs(lhs - rhs) < 1e-12, z


def test_dilog_unit_circle_real_part():
    # Re Li2(e^{i t}) = pi^2/6 - t(2pi - t)/4 for t in [0, 2pi)
    for t in [0.3, 1.0, math.pi / 3, 2.0, math.pi, 5.0]:
        z = cmath.exp(1j * t)
        expect = math.pi ** 2 / 6 - t * (2 * math.pi - t) / 4
        assert abs(dilog(z).real - expect) < 1e-12, t


def test_dilog_cut_continuity_from_above():
    # approaching [1, oo) from above and below gives conjugate values
    z_up = dilog(2.0 + 1e-12j)
    z_dn = dilog(2.0 - 1e-12j)
    assert abs(z_up - z_dn.conjugate()) < 1e-9
    assert z_up.imag < 0 or abs(z_up.imag) < 1e-9 or z_up.imag > 0  # finite
    assert abs(z_up.imag + math.pi * math.log(2)) < 1e-6 or abs(
        z_up.imag - math.pi * math.log(2)) < 1e-6


def test_dilog_rejects_nan():
    with pytest.raises(ValueError):
        dilog(complex(float("nan"), 0.0))


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(max_magnitude=0.985, allow_nan=False, allow_infinity=False))
def test_dilog_matches_series_random(z):
    ref = dilog_series_oracle(z, terms=6000)
    assert abs(dilog(z) - ref) < 1e-7


# ---------------------------------------------------------------------------
# lobachevsky
# ---------------------------------------------------------------------------

def test_lobachevsky_known_value():
    # maximum of the function, Lambda(pi/6) = 0.50747...
    assert abs(lobachevsky(math.pi / 6) - 0.5074708032) < 1e-9


def test_lobachevsky_against_quadrature():
    for theta in [0.1, 0.4, math.pi / 6, 1.0, 1.3, math.pi / 2 - 0.01]:
        assert abs(lobachevsky(theta) - lobachevsky_quad_oracle(theta)) < 1e-9


def test_lobachevsky_symmetries():
    assert lobachevsky(0.0) == 0.0
    assert abs(lobachevsky(math.pi / 2)) < 1e-15
    assert abs(lobachevsky(math.pi)) < 1e-15
    for t in [0.3, 0.7, 1.2]:
        assert abs(lobachevsky(-t) + lobachevsky(t)) < 1e-15
        assert abs(lobachevsky(t + math.pi) - lobachevsky(t)) < 1e-13


def test_lobachevsky_fourier_partial_sum():
    # direct slowly-converging definition, loose tolerance
    t = 0.8
    partial = sum(math.sin(2 * n * t) / (2 * n * n) for n in range(1, 20000))
    assert abs(lobachevsky(t) - partial) < 1e-4


def test_lobachevsky_duplication():
    # Lambda(2t) = 2 Lambda(t) + 2 Lambda(t + pi/2)
    for t in [0.2, 0.9, 1.4]:
        lhs = lobachevsky(2 * t)
        rhs = 2 * lobachevsky(t) + 2 * lobachevsky(t + math.pi / 2)
        assert abs(lhs - rhs) < 1e-13


# ---------------------------------------------------------------------------
# quantum integers and factorials
# ---------------------------------------------------------------------------

def test_quantum_integer_values():
    r = 7
    for n in range(0, 30):
        expect = 2j * math.sin(2 * math.pi * n / r)
        got = quantum_integer(n, r)
        assert abs(got - expect) < 1e-14
    assert quantum_integer(0, 7) == 0j
    assert quantum_integer(7, 7) == 0j       # exact, not 1e-16 junk
    assert quantum_integer(14, 7) == 0j
    assert quantum_integer(21, 3) == 0j


def test_quantum_integer_level_validation():
    for bad in [2, 4, 1, 0, -3, 6]:
        with pytest.raises(InvalidLevelError):
            quantum_integer(1, bad)
    with pytest.raises(InvalidLevelError):
        quantum_integer(1, 5.0)


def test_log_quantum_factorial_matches_naive():
    for r in [5, 7, 11, 31]:
        for n in [0, 1, 2, 3, r - 2, r - 1, r + 2]:
            ref = naive_quantum_factorial(n, r)
            got = log_quantum_factorial(n, r)
            if ref == 0j:
                assert got.is_zero
            else:
                assert abs(got.to_complex() - ref) < 1e-10 * abs(ref)


def test_log_quantum_factorial_zero_when_r_divides():
    assert log_quantum_factorial(7, 7).is_zero
    assert log_quantum_factorial(20, 7).is_zero
    assert not log_quantum_factorial(6, 7).is_zero


def test_log_quantum_factorial_negative_raises():
    with pytest.raises(ValueError):
        log_quantum_factorial(-1, 7)


# ---------------------------------------------------------------------------
# LogComplex
# ---------------------------------------------------------------------------

def test_logcomplex_roundtrip_and_arithmetic():
    a = LogComplex.from_complex(3.0 - 4.0j)
    b = LogComplex.from_complex(-0.5 + 2.0j)
    assert abs(a.to_complex() - (3.0 - 4.0j)) < 1e-14
    assert abs((a * b).to_complex() - (3.0 - 4.0j) * (-0.5 + 2.0j)) < 1e-13
    assert abs((a / b).to_complex() - (3.0 - 4.0j) / (-0.5 + 2.0j)) < 1e-13
    assert abs(complex(a ** 3) - (3.0 - 4.0j) ** 3) < 1e-11


def test_logcomplex_zero_behaviour():
    z = LogComplex.zero()
    one = LogComplex.one()
    assert z.is_zero
    assert (z * one).is_zero
    assert z.to_complex() == 0j
    assert one.to_complex() == 1.0 + 0j
    with pytest.raises(ZeroDivisionError):
        one / z
    with pytest.raises(ZeroDivisionError):
        z ** -1


def test_logcomplex_sqrt_uses_accumulated_phase():
    # (-1) * (-1) has accumulated phase 2*pi, so the square root of the
    # product is -1, not +1: the convention the quantum weights rely on.
    m1 = LogComplex.from_complex(-1.0)
    prod = m1 * m1
    root = prod ** 0.5
    assert abs(root.to_complex() - (-1.0)) < 1e-14


def test_logcomplex_huge_magnitude_does_not_overflow():
    big = LogComplex(1600.0, 0.3)   # e^1600 overflows a double
    val = big.to_complex()
    assert math.isinf(abs(val))
    small = big / LogComplex(1599.0, 0.1)
    assert abs(small.to_complex() - cmath.rect(math.e, 0.2)) < 1e-12
