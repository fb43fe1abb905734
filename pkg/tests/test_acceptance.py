"""Acceptance suite: one test per criterion, tolerances pinned.

Run alone with ``pytest tests/test_acceptance.py -v``.  Criterion 4 scans
the bundled 38-crossing diagram ``K_paper`` (a few minutes) and leaves a
finished checkpoint that the command-line tests reuse.
"""
import time

from knightmove.audit import (
    alexander,
    fox_milnor,
    higher_diff_certificate,
    knight_move_solve,
    max_knight_matching,
    unknotting_lower_bound,
)
from knightmove.grading import DimTable, Laurent1, graded_euler
from knightmove.jones import kauffman_jones
from knightmove.khcomplex import build_complex, khovanov_homology
from knightmove.knotio import catalog_get
from knightmove.lee import compute_pages, lee
from knightmove.scan import reduced_kh

from conftest import ALTERNATING, small_catalog

UNKNOT_KH = {(0, -1): 1, (0, 1): 1}
# per-criterion wall-clock limits in seconds
LIMIT_UNKNOT = 1.0
LIMIT_SMALL = 60.0
LIMIT_ALTERNATING = 120.0
LIMIT_K_SCAN = 30 * 60.0
LIMIT_TABLE_AUDIT = 1.0
K_SCAN_MEMORY_MB = 8 * 1024


def test_criterion_1_unknot_suite():
    t0 = time.perf_counter()
    for name in ("unknot", "unknot_r1", "unknot_r2"):
        d = catalog_get(name)
        assert khovanov_homology(d) == UNKNOT_KH
        res = lee(d)
        assert res.pages.e_inf == UNKNOT_KH
        assert res.s == 0
        assert res.pages.nonzero_differentials() == []
        rep = knight_move_solve(khovanov_homology(d), res.s)
        assert rep.holds and not rep.f2
    assert time.perf_counter() - t0 < LIMIT_UNKNOT


def test_criterion_2_scan_and_jones_agree_with_the_cube():
    t0 = time.perf_counter()
    names = small_catalog(10)
    assert len(names) >= 20
    for name in names:
        d = catalog_get(name)
        direct = khovanov_homology(d)
        assert reduced_kh(d) == direct, name
        assert graded_euler(direct) == kauffman_jones(d), name
    assert time.perf_counter() - t0 < LIMIT_SMALL


def test_criterion_3_alternating_knots_degenerate():
    t0 = time.perf_counter()
    for name in ALTERNATING:
        res = lee(catalog_get(name))
        assert all(n == 1 for n in res.pages.nonzero_differentials()), name
        assert knight_move_solve(res.pages.pages[0].dims, res.s).holds, name
    assert time.perf_counter() - t0 < LIMIT_ALTERNATING


def test_criterion_4_scan_reproduces_the_published_table(table1, scan_checkpoints):
    import resource

    k = catalog_get("K_paper")
    assert k.n == 38
    t0 = time.perf_counter()
    tbl = reduced_kh(k, checkpoint=scan_checkpoints / "K_paper.scan.gz")
    elapsed = time.perf_counter() - t0
    assert tbl == table1
    assert len(table1) == 79 and table1.total() == 264
    assert (tbl[(1, 1)], tbl[(0, 7)], tbl[(-18, -25)]) == (1, 3, 1)
    assert elapsed < LIMIT_K_SCAN
    assert resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024 < K_SCAN_MEMORY_MB


def test_criterion_5_table_audit_forces_d2(table1):
    t0 = time.perf_counter()
    rep = knight_move_solve(table1, 0)
    assert rep.verdict == "fails"
    assert rep.witness == (1, 1)
    certs = higher_diff_certificate(table1, 0)
    assert [(c.n, c.source, c.target) for c in certs] == [(2, (1, 1), (2, 9))]
    # nothing of bidegree (1, 4n), n >= 3, touches the stranded class
    for n in range(3, 20):
        assert not table1[(2, 1 + 4 * n)] and not table1[(0, 1 - 4 * n)]
    assert time.perf_counter() - t0 < LIMIT_TABLE_AUDIT


def test_criterion_6_four_survivors_on_the_second_page(table1):
    leftover = max_knight_matching(table1, 0)
    survivors = dict(leftover.items())
    for pawn in ((0, -1), (0, 1)):
        survivors[pawn] = survivors.get(pawn, 0) + 1
    assert survivors == {(0, -1): 1, (0, 1): 1, (1, 1): 1, (2, 9): 1}


def test_criterion_7_alexander_fox_milnor_and_unknotting(table1):
    target = Laurent1({-1: -3, 0: 7, 1: -3})
    assert fox_milnor(target).status == "fails"
    certs = higher_diff_certificate(table1, 0)
    assert unknotting_lower_bound(c.n for c in certs) == 3
    res = alexander(catalog_get("K_paper"))
    assert res.delta == target
    assert res.fox_milnor.status == "fails"


def test_criterion_8_property_suites():
    for name in small_catalog(8):
        d = catalog_get(name)
        if d.free_loops:
            continue
        c = build_complex(d, "lee")
        c.check()
        pages = compute_pages(c)
        for p, nxt in zip(pages.pages, pages.pages[1:]):
            assert nxt.dims.total() == p.dims.total() - 2 * p.rank()
            for (i, j) in p.diff_ranks:
                assert p.dims[(i + 1, j + 4 * p.index)] > 0
        kh = khovanov_homology(d)
        assert all(j % 2 for _, j in kh)
        assert khovanov_homology(d.mirror()) == kh.mirrored()
        res = lee(d)
        assert all(poly.nonnegative() for poly in res.decomposition.f.values())
    same = [khovanov_homology(catalog_get(n)) for n in ("trefoil_r", "trefoil_r_braid")]
    assert same[0] == same[1]
    assert khovanov_homology(catalog_get("unknot_r2")) == UNKNOT_KH
    assert isinstance(same[0], DimTable)
