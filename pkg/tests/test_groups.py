import numpy as np
import pytest

from probhopf.errors import InputError, MalformedError, ParseError
from probhopf.groups import (builtin_group, cyclic, dihedral, dumps, loads, quaternion, random_relabel,
                             symmetric)

from conftest import BUILTINS

ORDERS = {"S3": 6, "S4": 24, "A4": 12, "D4": 8, "D5": 10, "Q8": 8}
ORDERS.update({f"Z{n}": n for n in range(1, 13)})


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_orders(name):
    G = builtin_group(name)
    assert G.order == ORDERS[name]
    assert G.is_abelian() == name.startswith("Z")


@pytest.mark.parametrize("name", BUILTINS)
def test_round_trip(name):
    G = builtin_group(name)
    H = loads(dumps(G))
    assert (H.table == G.table).all()


def test_unknown_builtin():
    with pytest.raises(InputError):
        builtin_group("Z99")


def test_rejects_non_latin_square():
    with pytest.raises(MalformedError):
        loads_table([[0, 1], [1, 1]])


def test_rejects_non_associative():
    # a Latin square with identity 0 that is not associative (order-5 loop)
    T = [[0, 1, 2, 3, 4],
         [1, 0, 3, 4, 2],
         [2, 4, 0, 1, 3],
         [3, 2, 4, 0, 1],
         [4, 3, 1, 2, 0]]
    with pytest.raises(MalformedError, match="associative"):
        loads_table(T)


def loads_table(T):
    from probhopf.groups import FiniteGroup
    return FiniteGroup(np.array(T))


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        loads("group v1\norder 2\n1 2\n2 x\n", source="g.txt")
    assert str(exc.value).startswith("g.txt:4:")


def test_group_operations():
    G = quaternion()
    assert all(G.mul(g, G.inverse[g]) == 0 for g in range(8))
    assert len(G.centralizer(0)) == 8
    assert sorted(len(G.centralizer(g)) for g in range(8)) == [4] * 6 + [8] * 2
    D = dihedral(4)
    assert not D.is_abelian()
    assert symmetric(3).subgroup([0, 3, 4]).order == 3


def test_random_relabel_preserves_structure():
    G = symmetric(4)
    H = random_relabel(G, seed=3)
    assert H.order == G.order
    assert sorted(len(H.centralizer(g)) for g in range(24)) == sorted(
        len(G.centralizer(g)) for g in range(24))
    assert cyclic(5).is_abelian()
