import numpy as np
import pytest

from probhopf.errors import InputError
from probhopf.fusion import fpdims, to_probgroup, validate
from probhopf.groups import builtin_group, cyclic, random_relabel
from probhopf.probgroup import check_axioms, derived_identities
from probhopf.qdouble import (build_double, check_dual_iso, check_E_symmetry, class_dims,
                              class_sum_constants, classsum_integrality, degree_divisibility,
                              orthogonality_double, restriction_and_Ai, validate_double, verlinde)

SUITE = ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "S3", "D4", "Q8", "A4", "D5"]
_cache = {}


def double(name):
    if name not in _cache:
        _cache[name] = build_double(builtin_group(name))
    return _cache[name]


def test_s3_double_shape():
    dd = double("S3")
    assert dd.rank == 8
    assert sorted(dd.dims) == [1, 1, 2, 2, 2, 2, 3, 3]
    assert sum(d * d for d in dd.dims) == 36
    assert dd.dim == 36 and dd.D == 6


def test_trivial_double():
    dd = double("Z1")
    assert dd.rank == 1
    assert np.allclose(dd.s_tilde, [[1]])
    assert orthogonality_double(dd) == pytest.approx(0, abs=1e-12)


def test_z2_double_is_klein_four():
    dd = double("Z2")
    assert dd.dims == (1, 1, 1, 1)
    N = verlinde(dd)
    assert (N.sum(axis=2) == 1).all()          # pointed: every product is a single simple
    assert all(N[j, j, 0] == 1 for j in range(4))  # every simple is self-dual


@pytest.mark.parametrize("name", SUITE)
def test_double_checks(name):
    dd = double(name)
    N = dd.fusion
    assert (N >= 0).all()
    assert (N[0] == np.eye(dd.rank, dtype=int)).all()
    d = np.array(dd.dims, dtype=float)
    assert np.allclose(np.einsum("ijk,k->ij", N, d), np.outer(d, d))
    assert check_E_symmetry(dd) <= 1e-9
    assert orthogonality_double(dd) <= 1e-9
    iso = check_dual_iso(dd)
    assert iso.ok and iso.size_realization
    assert sorted(np.round(iso.class_dims, 9)) == sorted(x * x for x in dd.dims)
    assert classsum_integrality(dd).ok
    assert degree_divisibility(dd) == {"double": [], "group": []}
    v = validate_double(dd)
    assert v["fusion-axioms"].ok and v["E-reconstruction"] <= 1e-9


@pytest.mark.parametrize("name", ["S3", "D4", "Q8", "A4", "Z4", "D5"])
def test_restriction(name):
    dd = double(name)
    rep = restriction_and_Ai(dd)
    assert rep.ok
    assert rep.is_partition
    assert all(rep.beta[i] in rep.A[i] for i in range(len(rep.A)))


def test_s3_restriction_sets():
    rep = restriction_and_Ai(double("S3"))
    assert rep.A == ((0, 1, 2), (3, 4), (5, 6, 7))
    assert rep.beta == (0, 3, 5)


def test_double_fusion_ring_is_a_probability_group():
    F = double("S3").fusion_ring()
    assert validate(F).ok
    assert sorted(fpdims(F).values) == [1, 1, 2, 2, 2, 2, 3, 3]
    A = to_probgroup(F)
    assert check_axioms(A).ok and derived_identities(A).ok


def test_class_sum_constants_scale_to_integers():
    dd = double("S3")
    scaled = 36 * class_sum_constants(dd)
    assert np.allclose(scaled, np.rint(scaled), atol=1e-6)
    assert (np.rint(scaled) >= 0).all()
    assert np.allclose(class_dims(dd), np.array(dd.dims) ** 2)


@pytest.mark.parametrize("seed", [1, 2])
def test_relabel_invariance(seed):
    dd = build_double(random_relabel(builtin_group("D4"), seed))
    assert sorted(dd.dims) == sorted(double("D4").dims)
    assert check_E_symmetry(dd) <= 1e-9


def test_size_guard():
    with pytest.raises(InputError):
        build_double(cyclic(12), max_order=10)
