from fractions import Fraction

import numpy as np
import pytest

from probhopf.classdata import (character_multiplicities, class_constants, class_data, class_probgroup,
                                classsums_from_E, closed_form_inverse, conjugacy_classes,
                                degree_divisibility_failures, divisibility_failures, e_matrix,
                                fusion_from_E, orthogonality_check, verify_factorizations)
from probhopf.groups import builtin_group, random_relabel, symmetric

from conftest import ABELIAN, BUILTINS

CLASS_SIZES = {
    "S3": [1, 2, 3], "S4": [1, 3, 6, 6, 8], "A4": [1, 3, 4, 4],
    "D4": [1, 1, 2, 2, 2], "Q8": [1, 1, 2, 2, 2], "D5": [1, 2, 2, 5],
}
DEGREES = {
    "S3": (1, 1, 2), "S4": (1, 1, 2, 3, 3), "A4": (1, 1, 1, 3),
    "D4": (1, 1, 1, 1, 2), "Q8": (1, 1, 1, 1, 2), "D5": (1, 1, 2, 2),
}


def test_s3_classes():
    cl = conjugacy_classes(symmetric(3))
    assert cl.sizes == (1, 3, 2)
    assert cl.inverse_class == (0, 1, 2)


def test_z3_inverse_classes():
    cl = conjugacy_classes(builtin_group("Z3"))
    assert cl.sizes == (1, 1, 1)
    assert cl.inverse_class == (0, 2, 1)


@pytest.mark.parametrize("name", list(CLASS_SIZES))
def test_class_sizes_and_degrees(name, class_cache):
    cd = class_cache(name)
    assert sorted(cd.class_sizes) == CLASS_SIZES[name]
    assert cd.degrees == DEGREES[name]
    assert sum(d * d for d in cd.degrees) == cd.order


def test_s3_class_constants():
    a = class_constants(symmetric(3))
    assert list(a[1, 1]) == [3, 0, 3]           # C2 C2 = 3 C1 + 3 C3
    assert (a[0] == np.eye(3, dtype=int)).all()  # C1 Cj = Cj
    z2 = class_constants(builtin_group("Z2"))
    assert list(z2[1, 1]) == [1, 0]


def test_s3_character_table(class_cache):
    cd = class_cache("S3")
    assert cd.exact_chars == [[1, 1, 1], [1, -1, 1], [2, 0, -1]]


def test_s3_e_matrix(class_cache):
    E, Einv = e_matrix(class_cache("S3"))
    assert np.allclose(E, [[1, 1, 1], [1, -1, 0], [1, 1, -0.5]], atol=1e-12)
    assert np.allclose(E[0], 1)


@pytest.mark.parametrize("name", BUILTINS)
def test_closed_form_inverse(name, class_cache):
    cd = class_cache(name)
    assert np.abs(closed_form_inverse(cd).T - np.linalg.inv(cd.E)).max() <= 1e-9


@pytest.mark.parametrize("name", BUILTINS)
def test_orthogonality(name, class_cache):
    res = orthogonality_check(class_cache(name))
    assert max(res.values()) <= 1e-9


@pytest.mark.parametrize("name", BUILTINS)
def test_factorizations(name, class_cache):
    res = verify_factorizations(class_cache(name))
    assert max(res.values()) <= 1e-9


@pytest.mark.parametrize("name", BUILTINS)
def test_E_reconstructs_both_tensors(name, class_cache):
    cd = class_cache(name)
    assert (classsums_from_E(cd) == cd.constants).all()
    assert (fusion_from_E(cd) == character_multiplicities(cd)).all()
    assert divisibility_failures(cd) == []
    assert degree_divisibility_failures(cd) == []


def test_s3_oracle_values(class_cache):
    cd = class_cache("S3")
    assert classsums_from_E(cd)[1, 1, 0] == 3
    assert classsums_from_E(cd)[1, 1, 1] == 0
    assert character_multiplicities(cd)[2, 2, 2] == 1
    # second relation at i = j = C2: |C2| * sum deg^2 E^2 = 3 * (1 + 1 + 0) = 6
    E = cd.E.real
    assert 3 * sum(d * d * E[1, al] ** 2 for al, d in enumerate(cd.degrees)) == pytest.approx(6)


@pytest.mark.parametrize("name", ABELIAN)
def test_abelian_tables_are_unitary(name, class_cache):
    cd = class_cache(name)
    X = cd.chars
    assert np.allclose(X @ X.conj().T, cd.order * np.eye(cd.order))
    assert cd.degrees == (1,) * cd.order


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("name", ["S4", "D5", "Q8"])
def test_relabel_invariance(name, seed, class_cache):
    cd = class_data(random_relabel(builtin_group(name), seed))
    ref = class_cache(name)
    assert cd.degrees == ref.degrees
    assert sorted(cd.class_sizes) == sorted(ref.class_sizes)


def test_class_probgroup_s3(class_cache):
    A = class_probgroup(class_cache("S3"))
    # C2 C2 = 3 C1 + 3 C3, normalized: p(c2.c2=c1) = 3/9, p(c2.c2=c3) = 3*2/9
    assert A.prob(1, 1, 0) == Fraction(1, 3)
    assert A.prob(1, 1, 2) == Fraction(2, 3)
