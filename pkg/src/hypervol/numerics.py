"""Special functions and overflow-safe complex arithmetic.

The geometric half of the package needs a complex dilogarithm with a fixed
branch convention and the Lobachevsky function; the quantum half needs
products of thousands of quantum integers {n} = q^n - q^{-n} at
q = exp(4*pi*i/r), which are kept in log-magnitude/phase form so they never
overflow a double.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import scipy.special

__all__ = [
    "InvalidLevelError",
    "LogComplex",
    "dilog",
    "lobachevsky",
    "quantum_integer",
    "log_quantum_factorial",
]

PI = math.pi
PI2_OVER_6 = math.pi ** 2 / 6.0


class InvalidLevelError(ValueError):
    """Quantum level r must be an odd integer >= 3."""


def _check_level(r):
    if not isinstance(r, int) or r < 3 or r % 2 == 0:
        raise InvalidLevelError("level must be an odd integer >= 3, got %r" % (r,))


# ---------------------------------------------------------------------------
# complex dilogarithm
# ---------------------------------------------------------------------------

# Coefficients B_n / (n+1)! for the expansion of Li2 in u = -log(1-z).
_BERNOULLI = scipy.special.bernoulli(60)
_U_COEF = [float(_BERNOULLI[n]) / math.factorial(n + 1) for n in range(61)]


def _dilog_power_series(z):
    # plain sum z^n / n^2, good for |z| <= 0.5
    total = 0j
    zp = 1.0 + 0j
    for n in range(1, 120):
        zp *= z
        term = zp / (n * n)
        total += term
        if abs(term) < 1e-18 * (1.0 + abs(total)):
            break
    return total

def _dilog_u_series(z):
    # Li2(z) = sum_n B_n u^(n+1)/(n+1)!  with u = -log(1-z).
    # Used on {0.5 < |z| <= 1, Re z <= 1/2}, where |u| <= ~1.8 << 2*pi.
    u = -cmath.log(1.0 - z)
    total = 0j
    up = 1.0 + 0j
    for n in range(0, 60):
        up *= u
        cn = _U_COEF[n]
        if cn != 0.0:
            term = cn * up
            total += term
            if n > 2 and abs(term) < 1e-18 * (1.0 + abs(total)):
                break
    return total

def dilog(z):
    """Complex dilogarithm Li2(z), principal branch, cut along [1, oo).

    Accurate to about 1e-14 relative over the tested range; values on the
    cut follow the sign of the (possibly signed-zero) imaginary part.
    """
    z = complex(z)
    if z != z:
        raise ValueError("dilog: NaN argument")
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_OVER_6)
    az = abs(z)
    if az <= 0.5:
        return _dilog_power_series(z)
    if az > 1.0:
        # inversion: Li2(z) + Li2(1/z) = -pi^2/6 - log(-z)^2 / 2
        lz = cmath.log(-z)
        return -PI2_OVER_6 - 0.5 * lz * lz - dilog(1.0 / z)
    if z.real > 0.5:
        # reflection: Li2(z) + Li2(1-z) = pi^2/6 - log(z) log(1-z)
        return PI2_OVER_6 - cmath.log(z) * cmath.log(1.0 - z) - dilog(1.0 - z)
    return _dilog_u_series(z)


# ---------------------------------------------------------------------------
# Lobachevsky function
# ---------------------------------------------------------------------------

# zeta(2m) / (m (2m+1) (2 pi)^(2m)) for the accelerated Clausen series
_CL2_COEF = [
    float(scipy.special.zeta(2 * m)) / (m * (2 * m + 1) * (2.0 * math.pi) ** (2 * m))
    for m in range(1, 44)
]

def lobachevsky(theta):
    """Lobachevsky function  Lambda(t) = sum_{n>=1} sin(2nt)/(2n^2).

    Equals -integral_0^t log|2 sin x| dx; odd and pi-periodic.  The series
    is summed in closed accelerated form (through the Clausen function), so
    the result is accurate to ~1e-15 absolute.
    """
    t = math.remainder(theta, math.pi)  # fold into [-pi/2, pi/2]: exact symmetry
    x = 2.0 * t
    if x == 0.0:
        return 0.0
    s = x - x * math.log(abs(x))
    xx = x * x
    p = x
    for c in _CL2_COEF:
        p *= xx
        term = c * p
        s += term
        if abs(term) < 1e-18 * abs(s):
            break
    return 0.5 * s


# ---------------------------------------------------------------------------
# quantum integers at q = exp(4 pi i / r)
# ---------------------------------------------------------------------------

def quantum_integer(n, r):
    """{n} = q^{n/2} - q^{-n/2} = 2i sin(2 pi n / r) at q = exp(4 pi i / r).

    Exactly zero when r divides n; for odd r there is no other zero, which
    is what keeps the 6j-symbol sums free of interior null factors.
    """
    _check_level(r)
    if n % r == 0:
        return 0j
    return complex(0.0, 2.0 * math.sin(2.0 * math.pi * n / r))


@dataclass(frozen=True)
class LogComplex:
    """A nonzero complex number stored as (log magnitude, accumulated phase).

    The phase is deliberately not normalised: products and quotients add and
    subtract phases exactly, so a half-power (square root) of a product of
    known factors is well defined.  Zero is encoded as log_mag = -inf.
    """

    log_mag: float
    phase: float

    @staticmethod
    def from_complex(z):
        z = complex(z)
        if z == 0:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(math.log(abs(z)), cmath.phase(z))

    @staticmethod
    def one():
        return LogComplex(0.0, 0.0)

    @staticmethod
    def zero():
        return LogComplex(-math.inf, 0.0)

    @property
    def is_zero(self):
        return self.log_mag == -math.inf

    def to_complex(self):
        if self.is_zero:
            return 0j
        try:
            return cmath.rect(math.exp(self.log_mag), self.phase)
        except OverflowError:
            return cmath.rect(math.inf, self.phase)

    def __complex__(self):
        return self.to_complex()

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_mag + other.log_mag, self.phase + other.phase)

    def __truediv__(self, other):
        if other.is_zero:
            raise ZeroDivisionError("division by zero LogComplex")
        if self.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_mag - other.log_mag, self.phase - other.phase)

    def __pow__(self, exponent):
        if self.is_zero:
            if exponent <= 0:
                raise ZeroDivisionError("zero LogComplex to a non-positive power")
            return LogComplex.zero()
        return LogComplex(self.log_mag * exponent, self.phase * exponent)


def log_quantum_factorial(n, r):
    """{n}! = prod_{m=1..n} {m} as a LogComplex.

    Each factor 2i sin(2 pi m / r) contributes log|2 sin(2 pi m / r)| to the
    magnitude and pi/2 + {0 or pi, by the sign of the sine} to the phase.
    A vanishing factor (r divides m) makes the whole factorial zero.
    """
    _check_level(r)
    if n < 0:
        raise ValueError("quantum factorial of negative n")
    mag = 0.0
    phase = 0.0
    for m in range(1, n + 1):
        if m % r == 0:
            return LogComplex.zero()
        s = 2.0 * math.sin(2.0 * math.pi * m / r)
        mag += math.log(abs(s))
        phase += 0.5 * math.pi + (math.pi if s < 0.0 else 0.0)
    return LogComplex(mag, phase)
