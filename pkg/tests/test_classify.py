from fractions import Fraction

import numpy as np
import pytest

from probhopf.classify import (SearchLimitError, SearchPoint, canonical_form, enumerate_structures,
                               involutions, lemma_filters)
from probhopf.errors import InputError
from probhopf.fusion import s3_character_ring, to_probgroup
from probhopf.probgroup import R_INTEGRAL, check_axioms, derived_identities, integrality_class, sizes


def test_involutions():
    assert list(involutions(2)) == [(0, 1)]
    assert sorted(involutions(3)) == [(0, 1, 2), (0, 2, 1)]
    assert len(list(involutions(4))) == 4


def test_order_two_is_only_z2():
    res = enumerate_structures(2, 50)
    assert len(res) == 1
    A = res.groups[0]
    assert sizes(A) == [1, 1]
    assert A.prob(1, 1, 0) == 1


def test_order_three_has_two_structures():
    res = enumerate_structures(3, 12)
    assert len(res) == 2
    by_size = {tuple(sizes(A)): A for A in res.groups}
    assert set(by_size) == {(1, 1, 1), (1, 1, 4)}
    z3 = by_size[(1, 1, 1)]
    assert z3.inverse == (0, 2, 1)
    s3 = by_size[(1, 1, 4)]
    assert s3.prob(2, 2, 2) == Fraction(1, 2)
    assert s3.prob(2, 2, 0) == s3.prob(2, 2, 1) == Fraction(1, 4)
    ref = to_probgroup(s3_character_ring())
    assert s3.p == ref.p


@pytest.mark.parametrize("order", [2, 3])
@pytest.mark.parametrize("max_size", range(1, 7))
def test_pruning_never_changes_the_answer(order, max_size):
    pruned = enumerate_structures(order, max_size, prune=True)
    full = enumerate_structures(order, max_size, prune=False)
    key = lambda r: [canonical_form(sp) for sp in r.structures]
    assert key(pruned) == key(full)


def test_every_structure_is_certified():
    for A in enumerate_structures(3, 8).groups:
        assert check_axioms(A).ok
        assert derived_identities(A).ok
        assert integrality_class(A, 2).verdict == R_INTEGRAL


def test_filters_accept_known_structure():
    res = enumerate_structures(3, 4)
    assert all(lemma_filters(sp) for sp in res.structures)


def test_canonical_form_ignores_labels():
    sp = enumerate_structures(3, 2).structures[-1]
    swapped = sp.k[np.ix_([0, 2, 1], [0, 2, 1], [0, 2, 1])]
    other = SearchPoint((sp.n[0], sp.n[2], sp.n[1]), tuple([0, 2, 1][sp.inverse[i]] for i in (0, 2, 1)), swapped)
    assert canonical_form(other) == canonical_form(sp)


def test_order_four_is_experimental():
    with pytest.raises(InputError):
        enumerate_structures(4, 2)
    res = enumerate_structures(4, 2, experimental=True)
    # Z4, Z2 x Z2 and the character ring of D5 (degrees 1, 1, 2, 2)
    assert sorted(tuple(sizes(A)) for A in res.groups) == [(1, 1, 1, 1), (1, 1, 1, 1), (1, 1, 4, 4)]
    assert all(check_axioms(A).ok for A in res.groups)


def test_search_guard():
    with pytest.raises(SearchLimitError):
        enumerate_structures(3, 12, limit=5)
