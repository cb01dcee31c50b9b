"""Angular-momentum algebra: Wigner 3-j / 6-j symbols, rotation matrices, Lande g.

All symbols accept integer or half-integer arguments (floats like 2.5).
Internally everything is converted to doubled integers so that the
factorial arguments stay exact.  Selection-rule violations return an
exact 0.0, never a small float.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def _twice(j: float) -> int:
    """Doubled angular momentum as an exact integer."""
    j2 = round(2 * j)
    if abs(j2 - 2 * j) > 1e-9:
        raise ValueError(f"angular momentum {j} is not integer or half-integer")
    return j2


def _triangle_ok(a2: int, b2: int, c2: int) -> bool:
    return abs(a2 - b2) <= c2 <= a2 + b2 and (a2 + b2 + c2) % 2 == 0


def _delta(a2: int, b2: int, c2: int) -> float:
    """Triangle coefficient sqrt(Delta(a,b,c)) for doubled arguments."""
    return math.sqrt(
        math.factorial((a2 + b2 - c2) // 2)
        * math.factorial((a2 - b2 + c2) // 2)
        * math.factorial((-a2 + b2 + c2) // 2)
        / math.factorial((a2 + b2 + c2) // 2 + 1)
    )


@lru_cache(maxsize=None)
def _wigner3j_cached(j1_2, j2_2, j3_2, m1_2, m2_2, m3_2) -> float:
    if m1_2 + m2_2 + m3_2 != 0:
        return 0.0
    if not _triangle_ok(j1_2, j2_2, j3_2):
        return 0.0
    if abs(m1_2) > j1_2 or abs(m2_2) > j2_2 or abs(m3_2) > j3_2:
        return 0.0
    if (j1_2 + m1_2) % 2 or (j2_2 + m2_2) % 2 or (j3_2 + m3_2) % 2:
        return 0.0

    # Racah sum; all factorial arguments below are integers.
    f = math.factorial
    kmin = max(0, (j2_2 - j3_2 - m1_2) // 2, (j1_2 - j3_2 + m2_2) // 2)
    kmax = min(
        (j1_2 + j2_2 - j3_2) // 2,
        (j1_2 - m1_2) // 2,
        (j2_2 + m2_2) // 2,
    )
    if kmin > kmax:
        return 0.0
    total = 0.0
    for k in range(kmin, kmax + 1):
        term = (
            f(k)
            * f((j1_2 + j2_2 - j3_2) // 2 - k)
            * f((j1_2 - m1_2) // 2 - k)
            * f((j2_2 + m2_2) // 2 - k)
            * f((j3_2 - j2_2 + m1_2) // 2 + k)
            * f((j3_2 - j1_2 - m2_2) // 2 + k)
        )
        total += (-1.0) ** k / term
    norm = _delta(j1_2, j2_2, j3_2) * math.sqrt(
        f((j1_2 + m1_2) // 2)
        * f((j1_2 - m1_2) // 2)
        * f((j2_2 + m2_2) // 2)
        * f((j2_2 - m2_2) // 2)
        * f((j3_2 + m3_2) // 2)
        * f((j3_2 - m3_2) // 2)
    )
    sign = (-1.0) ** ((j1_2 - j2_2 - m3_2) // 2)
    return sign * norm * total


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3-j symbol (j1 j2 j3; m1 m2 m3)."""
    return _wigner3j_cached(
        _twice(j1), _twice(j2), _twice(j3), _twice(m1), _twice(m2), _twice(m3)
    )


@lru_cache(maxsize=None)
def _wigner6j_cached(j1_2, j2_2, j3_2, j4_2, j5_2, j6_2) -> float:
    triads = (
        (j1_2, j2_2, j3_2),
        (j1_2, j5_2, j6_2),
        (j4_2, j2_2, j6_2),
        (j4_2, j5_2, j3_2),
    )
    for t in triads:
        if not _triangle_ok(*t):
            return 0.0
    f = math.factorial
    prefactor = 1.0
    for t in triads:
        prefactor *= _delta(*t)

    a = (j1_2 + j2_2 + j3_2) // 2
    b = (j1_2 + j5_2 + j6_2) // 2
    c = (j4_2 + j2_2 + j6_2) // 2
    d = (j4_2 + j5_2 + j3_2) // 2
    e = (j1_2 + j2_2 + j4_2 + j5_2) // 2
    g = (j2_2 + j3_2 + j5_2 + j6_2) // 2
    h = (j3_2 + j1_2 + j6_2 + j4_2) // 2

    total = 0.0
    for t in range(max(a, b, c, d), min(e, g, h) + 1):
        term = (
            f(t - a) * f(t - b) * f(t - c) * f(t - d)
            * f(e - t) * f(g - t) * f(h - t)
        )
        total += (-1.0) ** t * f(t + 1) / term
    return prefactor * total


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}."""
    return _wigner6j_cached(
        _twice(j1), _twice(j2), _twice(j3), _twice(j4), _twice(j5), _twice(j6)
    )


def clebsch_gordan(j1, m1, j2, m2, j, m) -> float:
    """Clebsch-Gordan coefficient <j1 m1 j2 m2 | j m>."""
    if _twice(m1) + _twice(m2) != _twice(m):
        return 0.0
    sign = (-1.0) ** ((_twice(j1) - _twice(j2) + _twice(m)) // 2)
    return sign * math.sqrt(_twice(j) + 1.0) * wigner_3j(j1, j2, j, m1, m2, -m)


def wigner_d_small(j, beta: float) -> np.ndarray:
    """Wigner small-d matrix d^j_{m'm}(beta), indexed [m', m] with m = -j..j.

    Row/column index k maps to m = k - j.
    """
    j2 = _twice(j)
    dim = j2 + 1
    f = math.factorial
    cb, sb = math.cos(beta / 2.0), math.sin(beta / 2.0)
    d = np.zeros((dim, dim))
    for i_mp in range(dim):
        mp2 = 2 * i_mp - j2
        for i_m in range(dim):
            m2 = 2 * i_m - j2
            kmin = max(0, (m2 - mp2) // 2)
            kmax = min((j2 + m2) // 2, (j2 - mp2) // 2)
            total = 0.0
            for k in range(kmin, kmax + 1):
                # exponents: cos^(2j + m - m' - 2k), sin^(m' - m + 2k)
                pc = (2 * j2 + m2 - mp2) // 2 - 2 * k
                ps = (mp2 - m2) // 2 + 2 * k
                total += (
                    (-1.0) ** k
                    * (cb ** pc)
                    * (sb ** ps)
                    / (
                        f((j2 + m2) // 2 - k)
                        * f(k)
                        * f((j2 - mp2) // 2 - k)
                        * f((mp2 - m2) // 2 + k)
                    )
                )
            norm = math.sqrt(
                f((j2 + mp2) // 2)
                * f((j2 - mp2) // 2)
                * f((j2 + m2) // 2)
                * f((j2 - m2) // 2)
            )
            d[i_mp, i_m] = (-1.0) ** ((mp2 - m2) // 2) * norm * total
    return d


def lande_g(l: int, j: float, s: float = 0.5) -> float:
    """Lande g-factor with g_s = 2 exactly."""
    jj = j * (j + 1.0)
    return 1.0 + (jj + s * (s + 1.0) - l * (l + 1.0)) / (2.0 * jj)
