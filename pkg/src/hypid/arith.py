"""Complex arithmetic kernels: Pochhammer symbols, gamma, Stirling numbers.

All scalars are Python ``complex`` (IEEE double).  Parameter vectors are
plain tuples of complex numbers.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import PoleError

ParamVec = tuple  # tuple[complex, ...]

#: Above this length Pochhammer symbols switch to the log-gamma form.
POCHHAMMER_CROSSOVER = 64
#: Snap tolerance used when deciding whether a float is an integer.
INT_TOL = 1e-9

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def as_cx(z) -> complex:
    return complex(z)


def as_vec(values: Iterable) -> ParamVec:
    return tuple(complex(v) for v in values)


def nearest_int(z: complex, tol: float = INT_TOL) -> int | None:
    """Return the integer ``z`` is within ``tol`` of, or None."""
    z = complex(z)
    if abs(z.imag) > tol:
        return None
    k = round(z.real)
    if abs(z.real - k) <= tol * max(1.0, abs(z.real)):
        return int(k)
    return None


def is_nonpositive_int(z: complex, tol: float = INT_TOL) -> bool:
    k = nearest_int(z, tol)
    return k is not None and k <= 0


def distance_to_set(z: complex, integers: Iterable[int]) -> float:
    """Distance from ``z`` to the nearest member of a finite integer set."""
    return min((abs(complex(z) - k) for k in integers), default=math.inf)


@dataclass(frozen=True)
class IpdSpec:
    """Integral parameter differences: pairs ``(f_j + m_j, f_j)``.

    Parameters
    ----------
    f : tuple of complex
        Bottom parameters of the IPD pairs.
    m : tuple of int
        Positive integer shifts, one per entry of ``f``.
    """

    f: ParamVec
    m: tuple
    m_total: int = field(init=False)

    def __post_init__(self):
        f = as_vec(self.f)
        m = tuple(int(v) for v in self.m)
        if len(f) != len(m) or not f:
            raise ValueError("f and m must be non-empty and of equal length")
        if any(v < 1 for v in m):
            raise ValueError("every m_j must be a positive integer")
        if any(is_nonpositive_int(v) for v in f):
            raise ValueError("f_j must not be a non-positive integer")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "m_total", sum(m))

    @property
    def r(self) -> int:
        return len(self.f)

    @property
    def top(self) -> ParamVec:
        """The shifted parameters ``f + m``."""
        return tuple(fj + mj for fj, mj in zip(self.f, self.m))

    def shifted(self, shift: complex) -> "IpdSpec":
        return IpdSpec(tuple(fj + shift for fj in self.f), self.m)


def pochhammer(a: complex, n: int) -> complex:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    a = complex(a)
    if n <= POCHHAMMER_CROSSOVER:
        out = 1.0 + 0.0j
        for i in range(n):
            out *= a + i
        return out
    k = nearest_int(a, 0.0)
    if k is not None and k <= 0:
        # a + i hits zero inside the product
        return 0j if -k < n else pochhammer_product(a, n)
    if is_nonpositive_int(a + n, 0.0):
        return pochhammer_product(a, n)
    return cmath.exp(lgamma_cx(a + n) - lgamma_cx(a))


def pochhammer_product(a: complex, n: int) -> complex:
    out = 1.0 + 0.0j
    for i in range(n):
        out *= a + i
    return out


def pochhammer_vec(v: Sequence[complex], n: int) -> complex:
    """Product of scalar Pochhammer symbols over a parameter vector."""
    out = 1.0 + 0.0j
    for a in v:
        out *= pochhammer(a, n)
    return out


def pochhammer_ipd(spec: IpdSpec, shift: complex = 0.0) -> complex:
    """Mixed-length product ``prod_j (f_j + shift)_{m_j}``."""
    out = 1.0 + 0.0j
    for fj, mj in zip(spec.f, spec.m):
        out *= pochhammer(fj + shift, mj)
    return out


def falling(x, k: int):
    out = 1
    for i in range(k):
        out *= x - i
    return out


@lru_cache(maxsize=None)
def stirling2(j: int, k: int) -> int:
    """Stirling number of the second kind (exact Python integer)."""
    if j < 0 or k < 0:
        raise ValueError("arguments must be non-negative")
    if j == k:
        return 1
    if k == 0 or k > j:
        return 0
    return k * stirling2(j - 1, k) + stirling2(j - 1, k - 1)


def sigma_coeffs(spec: IpdSpec) -> list[complex]:
    """Coefficients of ``prod_j (f_j + x)_{m_j}`` in ascending powers of x."""
    coeffs = np.array([1.0 + 0.0j])
    for fj, mj in zip(spec.f, spec.m):
        for i in range(mj):
            coeffs = np.polynomial.polynomial.polymul(coeffs, [fj + i, 1.0])
    return [complex(c) for c in coeffs]


def binom(n: int, k: int) -> int:
    return math.comb(n, k)


def _lanczos_log(z: complex) -> complex:
    # valid for Re(z) >= 0.5; principal branch of log Gamma there
    z = z - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def lgamma_cx(z) -> complex:
    """A logarithm of the gamma function.

    For ``Re(z) >= 0.5`` this is the principal branch (continuous, real on
    the positive axis).  For ``Re(z) < 0.5`` the reflection formula is used
    and the imaginary part is only defined modulo ``2*pi``, so
    ``exp(lgamma_cx(z)) == gamma_cx(z)`` but the branch may differ from the
    principal log-gamma.
    """
    z = complex(z)
    if is_nonpositive_int(z, 0.0):
        raise PoleError(f"log-gamma pole at {z}")
    if z.real >= 0.5:
        return _lanczos_log(z)
    return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _lanczos_log(1.0 - z)


def gamma_cx(z) -> complex:
    """Complex gamma function via Lanczos with reflection for ``Re(z) < 0.5``."""
    z = complex(z)
    if is_nonpositive_int(z, 0.0):
        raise PoleError(f"gamma pole at {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma_cx(1.0 - z))
    return cmath.exp(_lanczos_log(z))


def gamma_ratio(num: Sequence[complex], den: Sequence[complex]) -> complex:
    """``prod Gamma(num) / prod Gamma(den)`` through log-gamma differences."""
    s = sum((lgamma_cx(z) for z in num), 0j) - sum((lgamma_cx(z) for z in den), 0j)
    return cmath.exp(s)


def prod(values: Iterable[complex]) -> complex:
    out = 1.0 + 0.0j
    for v in values:
        out *= v
    return out
