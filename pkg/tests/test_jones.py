import pytest

from knightmove.errors import BudgetExceeded
from knightmove.grading import Laurent1
from knightmove.jones import kauffman_bracket, kauffman_jones
from knightmove.knotio import catalog_get, from_braid


def test_reference_values():
    assert kauffman_jones(catalog_get("unknot")) == Laurent1({1: 1, -1: 1})
    assert kauffman_jones(catalog_get("trefoil_r")) == Laurent1({1: 1, 3: 1, 5: 1, 9: -1})
    assert kauffman_jones(catalog_get("figure8")) == Laurent1({5: 1, -5: 1})


def test_reidemeister_moves_do_not_change_jones():
    j = kauffman_jones(catalog_get("unknot"))
    assert kauffman_jones(catalog_get("unknot_r1")) == j
    assert kauffman_jones(catalog_get("unknot_r2")) == j
    assert kauffman_jones(catalog_get("trefoil_r_braid")) == kauffman_jones(catalog_get("trefoil_r"))


def test_jones_at_one_is_two():
    # V(1) = 1 for every knot, so the unnormalised version gives 2 at q = 1
    for name in ("5_2", "8_19", "10_132"):
        assert kauffman_jones(catalog_get(name))(1) == 2


def test_bracket_of_crossingless_loop():
    assert kauffman_bracket(catalog_get("unknot")) == Laurent1({2: -1, -2: -1})


def test_budget():
    big = from_braid([1, 2] * 12, 3)
    with pytest.raises(BudgetExceeded):
        kauffman_bracket(big, max_crossings=20)
