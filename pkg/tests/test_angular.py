import math

import numpy as np
import pytest
from sympy.physics.wigner import wigner_3j as sym_3j
from sympy.physics.wigner import wigner_6j as sym_6j

from rydbell.angular import (
    clebsch_gordan,
    lande_g,
    wigner_3j,
    wigner_6j,
    wigner_d_small,
)


def half_range(j):
    return [m / 2.0 for m in range(-round(2 * j), round(2 * j) + 1, 2)]


@pytest.mark.parametrize(
    "args",
    [
        (1, 1, 2, 0, 0, 0),
        (1.5, 1, 2.5, 1.5, -1, -0.5),
        (2.5, 1, 3.5, 2.5, 1, -3.5),
        (3.5, 2, 2.5, 0.5, -2, 1.5),
        (0.5, 0.5, 1, 0.5, 0.5, -1),
        (5, 4, 3, 2, -1, -1),
    ],
)
def test_wigner_3j_against_sympy(args):
    ours = wigner_3j(*args)
    import sympy

    theirs = float(sym_3j(*[sympy.Rational(2 * a, 2) for a in args]))
    assert ours == pytest.approx(theirs, abs=1e-12)


@pytest.mark.parametrize(
    "args",
    [
        (1, 1, 2, 1, 1, 2),
        (2.5, 1, 1.5, 2, 1.5, 3),
        (1.5, 1, 2.5, 3, 3.5, 2),
        (0.5, 0.5, 1, 0.5, 0.5, 1),
        (3, 2, 1, 2, 3, 4),
    ],
)
def test_wigner_6j_against_sympy(args):
    import sympy

    ours = wigner_6j(*args)
    theirs = float(sym_6j(*[sympy.Rational(2 * a, 2) for a in args]))
    assert ours == pytest.approx(theirs, abs=1e-12)


def test_3j_selection_rules_exact_zero():
    assert wigner_3j(1, 1, 2, 1, 1, -1) == 0.0  # m-sum nonzero
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle violated
    assert wigner_3j(0.5, 0.5, 0.5, 0.5, -0.5, 0) == 0.0  # perimeter parity


def test_3j_orthogonality():
    # for fixed (j3, m3): sum_{m1} (2j3+1) 3j(j1 j2 j3; m1, m3-m1... )^2 = 1
    j1, j2 = 1.5, 1.0
    for j3, m3 in [(0.5, 0.5), (1.5, -0.5), (2.5, 1.5)]:
        total = 0.0
        for m1 in half_range(j1):
            m2 = -m3 - m1
            if abs(m2) > j2:
                continue
            total += (2 * j3 + 1) * wigner_3j(j1, j2, j3, m1, m2, m3) ** 2
        assert total == pytest.approx(1.0, abs=1e-12)


def test_clebsch_gordan_known_value():
    # <1 0 1 0 | 2 0> = sqrt(2/3)
    assert clebsch_gordan(1, 0, 1, 0, 2, 0) == pytest.approx(math.sqrt(2.0 / 3.0))


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2.5])
def test_wigner_d_matches_matrix_exponential(j):
    """Independent oracle: d^j(beta) = exp(-i beta Jy) in the |j m> basis."""
    from scipy.linalg import expm

    dim = round(2 * j) + 1
    m = np.array(half_range(j))
    jp = np.zeros((dim, dim))
    for k in range(dim - 1):
        jp[k + 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jy = (jp - jp.T) / 2j
    for beta in (0.3, 1.1, 2.5):
        expected = expm(-1j * beta * jy).real
        assert np.allclose(wigner_d_small(j, beta), expected, atol=1e-12)


def test_wigner_d_unitary():
    d = wigner_d_small(2.5, 0.77)
    assert np.allclose(d @ d.T, np.eye(6), atol=1e-12)


@pytest.mark.parametrize(
    "l,j,expected",
    [
        (2, 2.5, 6.0 / 5.0),
        (1, 1.5, 4.0 / 3.0),
        (1, 0.5, 2.0 / 3.0),
        (3, 2.5, 6.0 / 7.0),
        (3, 3.5, 8.0 / 7.0),
        (0, 0.5, 2.0),
    ],
)
def test_lande_g(l, j, expected):
    assert lande_g(l, j) == pytest.approx(expected, rel=1e-12)
