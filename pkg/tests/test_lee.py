import pytest
from hypothesis import given

from knightmove.errors import InvariantViolation, ValidationError
from knightmove.grading import Laurent2, poincare_series
from knightmove.khcomplex import build_complex, khovanov_homology
from knightmove.knotio import catalog_get
from knightmove.lee import compute_pages, lee, pages_from_pairs, s_invariant
from knightmove.grading import DimTable

from strategies import braid_knots

S_VALUES = {
    "unknot_r1": 0, "trefoil_r": 2, "trefoil_l": -2, "figure8": 0, "5_2": 2,
    "8_19": 6, "9_42": 0, "10_124": 8, "10_132": -2,
}


@pytest.mark.parametrize("name,s", sorted(S_VALUES.items()))
def test_s_invariant(name, s):
    assert lee(catalog_get(name)).s == s


def test_trefoil_pages():
    res = lee(catalog_get("trefoil_r"))
    assert res.pages.nonzero_differentials() == [1]
    assert res.pages.page(1).diff_ranks == {(2, 5): 1}
    assert res.pages.e_inf == {(0, 1): 1, (0, 3): 1}
    assert res.decomposition.f[1] == Laurent2({(2, 5): 1})
    assert res.pages.page(7).dims == res.pages.e_inf


def test_first_page_is_khovanov_homology():
    d = catalog_get("8_19")
    assert lee(d).pages.page(1).dims == khovanov_homology(d)


def test_plain_complex_is_refused():
    with pytest.raises(ValidationError):
        compute_pages(build_complex(catalog_get("trefoil_r"), "plain"))


def test_inconsistent_pairs_are_caught():
    with pytest.raises(InvariantViolation):
        pages_from_pairs([((0, 1), (1, 3))], DimTable({(0, 1): 1, (0, 3): 1}))


def test_s_needs_a_pawn_pair():
    pages = pages_from_pairs([], DimTable({(0, 1): 1, (1, 3): 1}))
    with pytest.raises(ValidationError):
        s_invariant(pages)


@given(braid_knots(max_len=6))
def test_page_properties(d):
    res = lee(d)
    pages = res.pages
    for p in pages.pages:
        for (i, j) in p.diff_ranks:
            # d_n has bidegree (1, 4n): its target cell is populated on the same page
            assert p.dims[(i + 1, j + 4 * p.index)] >= p.diff_ranks[(i, j)]
    for a, b in zip(pages.pages, pages.pages[1:]):
        assert b.dims.total() == a.dims.total() - 2 * a.rank()
    assert pages.e_inf.total() == 2
    assert res.s % 2 == 0
    # exact decomposition with nonnegative f_{2l}
    kh = poincare_series(pages.page(1).dims)
    rebuilt = Laurent2({(0, res.s - 1): 1, (0, res.s + 1): 1})
    for l, f in res.decomposition.f.items():
        assert f.nonnegative()
        rebuilt = rebuilt + f * Laurent2({(0, 0): 1, (1, 4 * l): 1})
    assert rebuilt == kh


@given(braid_knots(max_len=5))
def test_s_changes_sign_under_mirror(d):
    assert lee(d.mirror()).s == -lee(d).s


def test_render_marks_cancelled_cells():
    text = lee(catalog_get("trefoil_r")).pages.render()
    assert "E_1" in text and "E_inf" in text and "*" in text
