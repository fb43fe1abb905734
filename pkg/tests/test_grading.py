import pytest
from hypothesis import given
from hypothesis import strategies as st

from knightmove.grading import DimTable, Laurent1, Laurent2, graded_euler, poincare_series

cells = st.dictionaries(
    st.tuples(st.integers(-6, 6), st.integers(-10, 10).map(lambda j: 2 * j + 1)),
    st.integers(1, 5),
    max_size=12,
)


@given(cells)
def test_json_round_trip(d):
    t = DimTable(d)
    assert DimTable.from_json(t.to_json()) == t


@given(cells)
def test_csv_round_trip(d):
    t = DimTable(d)
    text = t.to_csv()
    assert text.splitlines()[0] == "i,j,dim"
    assert DimTable.from_csv(text) == t


@given(cells)
def test_grid_round_trip(d):
    t = DimTable(d)
    if not t:
        return
    grid = t.render_grid()
    assert DimTable.from_grid(grid) == t
    # rendering what was parsed is idempotent
    assert DimTable.from_grid(grid).render_grid() == grid


@given(cells)
def test_mirror_is_an_involution_and_reflects_euler(d):
    t = DimTable(d)
    assert t.mirrored().mirrored() == t
    assert graded_euler(t.mirrored()) == graded_euler(t).reflect()


def test_grid_layout():
    t = DimTable({(0, 1): 1, (0, 3): 1, (2, 5): 1, (3, 9): 1})
    lines = t.render_grid().splitlines()
    assert lines[0].split("|")[1:] == ["  0", "  1", "  2", "  3"]
    # j runs downward from the top degree in steps of two
    assert [int(l.split("|")[0]) for l in lines[2:]] == [9, 7, 5, 3, 1]


def test_rejects_negative_dimensions():
    with pytest.raises(ValueError):
        DimTable({(0, 1): -1})


def test_trefoil_euler_is_its_jones():
    t = DimTable({(0, 1): 1, (0, 3): 1, (2, 5): 1, (3, 9): 1})
    assert graded_euler(t) == Laurent1({1: 1, 3: 1, 5: 1, 9: -1})
    assert poincare_series(t) == Laurent2({(0, 1): 1, (0, 3): 1, (2, 5): 1, (3, 9): 1})


def test_laurent_arithmetic():
    a = Laurent1({1: 1, -1: 1})
    assert a * a == Laurent1({2: 1, 0: 2, -2: 1})
    assert a - a == Laurent1()
    assert not Laurent1()
    assert a.shift(2) == Laurent1({3: 1, 1: 1})
    assert a.substitute_power(3) == Laurent1({3: 1, -3: 1})
    assert a(2) == 2 + 0.5
    assert str(Laurent1({-1: -3, 0: 7, 1: -3})) == "-3*q^-1 + 7 - 3*q"
    b = Laurent2({(0, 0): 1, (1, 4): 1})
    assert (b * b).coeff(1, 4) == 2
    with pytest.raises(ValueError):
        Laurent2({(0, 1): -1}).to_table()


def test_add_and_shift():
    t = DimTable({(0, 1): 1})
    assert (t + t)[(0, 1)] == 2
    assert t.shifted(1, 4) == {(1, 5): 1}
    assert t.total() == 1
