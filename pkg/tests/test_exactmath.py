from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from probhopf.exactmath import (DEFAULTS, common_eigenbasis, format_number, override_defaults,
                                perron_root, snap_int, snap_rational)
from probhopf.errors import NonCommutingError


@pytest.mark.parametrize("M, expected", [
    (np.eye(3), 1.0),
    # left multiplication by chi3 in the S3 character ring
    (np.array([[0, 0, 1], [0, 0, 1], [1, 1, 1]]), 2.0),
    (np.array([[5]]), 5.0),
])
def test_perron_root_oracles(M, expected):
    assert perron_root(M) == pytest.approx(expected, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=16, max_size=16))
def test_perron_root_dominates_spectrum(entries):
    M = np.array(entries, dtype=float).reshape(4, 4)
    r = perron_root(M)
    assert r >= np.abs(np.linalg.eigvals(M)).max() - 1e-7


def test_common_eigenbasis_diagonal():
    basis, lam = common_eigenbasis([np.diag([1, 2]), np.diag([3, 4])])
    assert np.allclose(np.abs(basis), np.eye(2))
    assert np.allclose(lam, [[1, 2], [3, 4]])


def test_common_eigenbasis_swap():
    _, lam = common_eigenbasis([np.array([[0, 1], [1, 0]])])
    assert sorted(lam[0].real) == pytest.approx([-1, 1])


def test_common_eigenbasis_s3_class_matrices():
    from probhopf.classdata import class_constants
    from probhopf.groups import symmetric
    a = class_constants(symmetric(3))
    Ms = [a[i].astype(float) for i in range(3)]
    basis, lam = common_eigenbasis(Ms)
    for i, M in enumerate(Ms):
        for j in range(3):
            v = basis[:, j]
            assert np.linalg.norm(M @ v - lam[i, j] * v) <= 1e-9 * np.linalg.norm(v)
    # central characters of S3: omega(C2) in {3, -3, 0}, omega(C3) in {2, 2, -1}
    assert sorted(np.round(lam[1].real, 9)) == [-3, 0, 3]
    assert sorted(np.round(lam[2].real, 9)) == [-1, 2, 2]


def test_common_eigenbasis_rejects_noncommuting():
    with pytest.raises(NonCommutingError):
        common_eigenbasis([np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])])


@pytest.mark.parametrize("x, kw, expected", [
    (0.4999999999, {"tol": 1e-6}, Fraction(1, 2)),
    (3.14159265358979, {"tol": 1e-12, "max_den": 10**6}, None),
    (-0.5, {}, Fraction(-1, 2)),
    (2.0, {}, Fraction(2)),
])
def test_snap_rational_oracles(x, kw, expected):
    assert snap_rational(x, **kw) == expected


@given(st.integers(-10**4, 10**4), st.integers(1, 10**3))
def test_snap_rational_recovers_small_fractions(num, den):
    q = Fraction(num, den)
    assert snap_rational(float(q)) == q
    assert snap_rational(snap_rational(float(q))) == q


def test_snap_int():
    assert snap_int(2.9999999999) == 3
    assert snap_int(2.5) is None


def test_format_number():
    assert format_number(0.5) == "1/2"
    assert format_number(-1.0) == "-1"


def test_override_defaults_is_scoped():
    before = DEFAULTS.tol
    with override_defaults(tol=1e-3):
        assert DEFAULTS.tol == 1e-3
    assert DEFAULTS.tol == before
