from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from knightmove.errors import BudgetExceeded, ValidationError
from knightmove.grading import graded_euler
from knightmove.jones import kauffman_jones
from knightmove.khcomplex import khovanov_homology
from knightmove.knotio import catalog_get, from_braid
from knightmove.scan import Budget, PartialComplex, reduced_kh, scan, scan_order

from conftest import small_catalog
from strategies import braid_knots


def _blank(name="trefoil_r"):
    d = catalog_get(name)
    return PartialComplex(d, list(range(d.n)))


@pytest.mark.parametrize("name", small_catalog(10))
def test_scan_matches_the_cube(name):
    d = catalog_get(name)
    assert reduced_kh(d) == khovanov_homology(d)


@given(braid_knots(max_len=7), st.randoms(use_true_random=False))
def test_any_order_gives_the_same_answer(d, rnd):
    order = list(range(d.n))
    rnd.shuffle(order)
    assert reduced_kh(d, order=order, check=True) == khovanov_homology(d)


@given(braid_knots(max_len=9))
def test_scan_euler_characteristic_is_jones(d):
    assert graded_euler(reduced_kh(d)) == kauffman_jones(d)


def test_unknot_without_crossings():
    assert reduced_kh(catalog_get("unknot")) == {(0, -1): 1, (0, 1): 1}


def test_order_is_a_permutation():
    d = catalog_get("7_4")
    assert sorted(scan_order(d)) == list(range(d.n))
    with pytest.raises(ValidationError):
        PartialComplex.start(d, [0, 0, 1, 2, 3, 4, 5])


def test_identity_two_term_complex_cancels():
    pc = _blank()
    a = pc.add_object(0, 0, ())
    b = pc.add_object(1, 0, ())
    pc.set_entry(a, b, {0: 1})
    assert pc.simplify() == 1
    assert pc.n_objects == 0


def _square(pc):
    # sources a, c in degree 0; targets b, e in degree 1; matrix [[1, 1], [2, 3]]
    a, c = pc.add_object(0, 0, ()), pc.add_object(0, 0, ())
    b, e = pc.add_object(1, 0, ()), pc.add_object(1, 0, ())
    pc.set_entry(a, b, {0: 1})
    pc.set_entry(a, e, {0: 1})
    pc.set_entry(c, b, {0: 2})
    pc.set_entry(c, e, {0: 3})
    return a, b, c, e


def test_elimination_updates_the_complement():
    pc = _blank()
    a, b, c, e = _square(pc)
    pc.eliminate(a, b)
    assert pc.entry(c, e) == {0: 1}


def test_elimination_order_does_not_matter():
    first = _blank()
    a, b, c, e = _square(first)
    first.eliminate(a, b)
    first.eliminate(c, e)
    second = _blank()
    a, b, c, e = _square(second)
    second.eliminate(c, e)
    assert second.entry(a, b) == {0: Fraction(1, 3)}
    second.eliminate(a, b)
    assert first.n_objects == second.n_objects == 0


def test_singular_block_leaves_a_zero_map():
    pc = _blank()
    a, c = pc.add_object(0, 0, ()), pc.add_object(0, 0, ())
    b, e = pc.add_object(1, 0, ()), pc.add_object(1, 0, ())
    for x in (a, c):
        for y in (b, e):
            pc.set_entry(x, y, {0: 1})
    pc.simplify()
    assert pc.n_objects == 2 and pc.n_entries == 0


def test_only_invertible_entries_are_eliminated():
    pc = _blank()
    a = pc.add_object(0, 0, ())
    b = pc.add_object(1, 2, ())
    pc.set_entry(a, b, {0: 1})
    with pytest.raises(ValidationError):
        pc.eliminate(a, b)


def test_deloop_one_circle():
    pc = _blank()
    sbit = 1 << (pc.M + 1)
    x = pc.add_object(0, 0, (), closed=(1,))
    y = pc.add_object(1, 0, ())
    pc.set_entry(x, y, {sbit: 5, 0: 7})
    plus, minus = pc.deloop(x)
    assert (pc.objects[plus].q, pc.objects[minus].q) == (1, -1)
    assert pc.entry(plus, y) == {0: 5}
    assert pc.entry(minus, y) == {0: 7}


def test_deloop_incoming_circle():
    pc = _blank()
    tbit = 1 << (2 * pc.M + 1)
    x = pc.add_object(0, 0, ())
    y = pc.add_object(1, 0, (), closed=(1,))
    pc.set_entry(x, y, {tbit: 2, 0: 3})
    plus, minus = pc.deloop(y)
    assert pc.entry(x, plus) == {0: 3}
    assert pc.entry(x, minus) == {0: 2}


def test_deloop_two_circles():
    pc = _blank()
    pc.add_object(0, 0, (), closed=(1, 3))
    pc.deloop_all()
    assert sorted(o.q for o in pc.objects.values()) == [-2, 0, 0, 2]
    assert not any(o.closed for o in pc.objects.values())


def test_deloop_needs_a_circle():
    pc = _blank()
    x = pc.add_object(0, 0, ())
    with pytest.raises(ValidationError):
        pc.deloop(x)


def test_unsimplified_scan_still_squares_to_zero():
    d = catalog_get("figure8")
    pc = PartialComplex.start(d)
    while not pc.done:
        pc.add_crossing(simplify=False)
        pc.deloop_all()
        pc.check_composition_zero()
    assert pc.homology() == khovanov_homology(d)


def test_checkpoint_round_trip(tmp_path):
    d = catalog_get("7_4")
    pc = PartialComplex.start(d)
    for _ in range(4):
        pc.add_crossing()
    path = tmp_path / "state.json.gz"
    pc.save(path)
    back = PartialComplex.load(path)
    assert back.to_json() == pc.to_json()
    while not back.done:
        back.add_crossing()
    assert back.homology() == khovanov_homology(d)


def test_budget_then_resume(tmp_path):
    d = catalog_get("7_7")
    path = tmp_path / "state.json.gz"
    with pytest.raises(BudgetExceeded, match="step"):
        scan(d, Budget(max_objects=5), checkpoint=path)
    assert path.exists()
    assert scan(d, checkpoint=path).homology() == khovanov_homology(d)


def test_checkpoint_for_another_diagram(tmp_path):
    path = tmp_path / "state.json.gz"
    scan(catalog_get("trefoil_r"), checkpoint=path)
    with pytest.raises(ValidationError, match="different diagram"):
        scan(catalog_get("figure8"), checkpoint=path)


def test_budget_must_be_positive():
    with pytest.raises(ValidationError):
        Budget(seconds=0)


@pytest.mark.parametrize("name", small_catalog(12))
def test_peak_stays_small(name):
    d = catalog_get(name)
    if d.free_loops:
        pytest.skip("no crossings to scan")
    assert scan(d).peak_objects < 256


def test_large_torus_knot_euler_characteristic():
    word = [1, 2, 3] * 7  # T(4, 7)
    d = from_braid(word, 4)
    assert graded_euler(reduced_kh(d)) == kauffman_jones(d)
