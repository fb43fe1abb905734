"""The Lee spectral sequence, the s-invariant and the knight-move family ``f_{2l}``.

The Lee complex is filtered by the quantum grading ``j``.  Ordering the
generators by decreasing ``j`` (higher homological degree first on ties)
makes every initial segment a subcomplex, so the usual column reduction of
persistent homology applies: reducing each column against earlier ones
pairs a source ``x`` at ``(i, j)`` with the leading term ``y`` of ``Dx`` at
``(i + 1, j + 4n)``.  A pair with gap ``4n`` is cancelled by ``d_n``; pairs
with gap 0 are the ``d_0`` cancellations that produce Khovanov homology.
Pages are numbered so that ``E_1`` is Khovanov homology and ``d_n`` has
bidegree ``(1, 4n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .errors import InvariantViolation, ValidationError
from .exactla import check_d_squared
from .grading import DimTable, Laurent2
from .khcomplex import DEFAULT_MAX_DIRECT, FilteredComplex, build_complex
from .knotio import Diagram

__all__ = [
    "Page",
    "PageSet",
    "LeeResult",
    "DecompositionFamily",
    "filtered_pairs",
    "compute_pages",
    "pages_from_pairs",
    "s_invariant",
    "decomposition_from_pages",
    "lee",
]


@dataclass(frozen=True)
class Page:
    index: int
    dims: DimTable
    diff_ranks: dict[tuple[int, int], int] = field(default_factory=dict)

    def rank(self) -> int:
        return sum(self.diff_ranks.values())


@dataclass(frozen=True)
class PageSet:
    pages: tuple[Page, ...]
    e_inf: DimTable

    def page(self, n: int) -> Page:
        for p in self.pages:
            if p.index == n:
                return p
        # past stabilisation every page equals E_infinity
        if n > self.pages[-1].index:
            return Page(n, self.e_inf, {})
        raise KeyError(n)

    def nonzero_differentials(self) -> list[int]:
        return [p.index for p in self.pages if p.diff_ranks]

    def to_dict(self) -> dict:
        return {
            "pages": [
                {
                    "n": p.index,
                    "dims": [{"i": i, "j": j, "dim": v} for (i, j), v in p.dims.items()],
                    "diff_ranks": [
                        {"i": i, "j": j, "rank": r} for (i, j), r in sorted(p.diff_ranks.items())
                    ],
                }
                for p in self.pages
            ],
            "e_inf": [{"i": i, "j": j, "dim": v} for (i, j), v in self.e_inf.items()],
        }

    def render(self) -> str:
        out = []
        for p in self.pages:
            marks = {src for src in p.diff_ranks} | {(i + 1, j + 4 * p.index) for (i, j) in p.diff_ranks}
            out.append(f"E_{p.index}  (cells marked * are cancelled by d_{p.index})")
            out.append(p.dims.render_grid(marks))
        out.append("E_inf")
        out.append(self.e_inf.render_grid())
        return "\n".join(out)


@dataclass(frozen=True)
class DecompositionFamily:
    s: int
    f: dict[int, Laurent2]  # l -> f_{2l}

    def higher_terms_vanish(self) -> bool:
        return all(not poly for l, poly in self.f.items() if l >= 2)

    def to_dict(self) -> dict:
        return {"s": self.s, "f": {f"f_{2 * l}": str(p) for l, p in sorted(self.f.items())}}


@dataclass(frozen=True)
class LeeResult:
    s: int
    pages: PageSet
    decomposition: DecompositionFamily | None = None


def filtered_pairs(c: FilteredComplex) -> tuple[list[tuple[tuple[int, int], tuple[int, int]]], DimTable]:
    """Persistence pairing of the filtered complex.

    Returns ``(pairs, essential)`` where each pair is ``(source (i, j), target (i+1, j'))``.
    Columns are reduced with integer (fraction-free) updates.  A generator
    already paired as the target of the previous degree reduces to zero
    (``D^2 = 0``), so its column is skipped.
    """
    pairs = []
    paired: dict[int, set[int]] = {i: set() for i in c.degrees}
    for i in c.degrees:
        if i + 1 not in c.gens:
            continue
        src_j = c.jgrades[i]
        tgt_j = c.jgrades[i + 1]
        # row position: later in the filtration order = larger number
        order_rows = sorted(range(len(tgt_j)), key=lambda r: (-tgt_j[r], r))
        pos = [0] * len(tgt_j)
        for p, r in enumerate(order_rows):
            pos[r] = p
        cols: dict[int, dict[int, int]] = {}
        for mats in (c.d0, c.phi):
            m = mats.get(i)
            if m is None:
                continue
            for r, row in m.rows.items():
                pr = pos[r]
                for col, v in row.items():
                    cc = cols.setdefault(col, {})
                    nv = cc.get(pr, 0) + v
                    if nv:
                        cc[pr] = nv
                    else:
                        del cc[pr]
        pivot_of: dict[int, dict[int, int]] = {}
        skip = paired[i]
        for k in sorted(range(len(src_j)), key=lambda k: (-src_j[k], k)):
            col = cols.get(k)
            if not col or k in skip:
                continue
            while col:
                low = max(col)
                other = pivot_of.get(low)
                if other is None:
                    pivot_of[low] = col
                    tgt = order_rows[low]
                    pairs.append(((i, src_j[k]), (i + 1, tgt_j[tgt])))
                    paired[i].add(k)
                    paired[i + 1].add(tgt)
                    break
                a, b = col[low], other[low]
                if b == 1 or b == -1:
                    f = a * b
                else:
                    g = gcd(a, b)
                    sa, f = b // g, a // g
                    col = {r: v * sa for r, v in col.items()}
                    f = f if b > 0 else -f
                    if b < 0:
                        col = {r: -v for r, v in col.items()}
                for r, v in other.items():
                    nv = col.get(r, 0) - f * v
                    if nv:
                        col[r] = nv
                    else:
                        col.pop(r, None)
    ess: dict[tuple[int, int], int] = {}
    for i in c.degrees:
        for k, j in enumerate(c.jgrades[i]):
            if k not in paired[i]:
                ess[(i, j)] = ess.get((i, j), 0) + 1
    return pairs, DimTable(ess)


def pages_from_pairs(pairs, essential: DimTable) -> PageSet:
    gaps = []
    for (i, j), (i2, j2) in pairs:
        gap, rem = divmod(j2 - j, 4)
        if i2 != i + 1 or rem or gap < 0:
            raise InvariantViolation(f"pair {(i, j)} -> {(i2, j2)} has the wrong bidegree")
        gaps.append(((i, j), gap))
    top = max((g for _, g in gaps), default=0)
    pages = []
    for n in range(1, max(top, 1) + 1):
        dims = dict(essential.items())
        ranks: dict[tuple[int, int], int] = {}
        for (src, gap) in gaps:
            if gap >= n:
                tgt = (src[0] + 1, src[1] + 4 * gap)
                dims[src] = dims.get(src, 0) + 1
                dims[tgt] = dims.get(tgt, 0) + 1
            if gap == n:
                ranks[src] = ranks.get(src, 0) + 1
        pages.append(Page(n, DimTable(dims), ranks))
    out = PageSet(tuple(pages), essential)
    _check_pages(out)
    return out


def _check_pages(p: PageSet) -> None:
    for a, b in zip(p.pages, p.pages[1:]):
        if b.dims.total() != a.dims.total() - 2 * a.rank():
            raise InvariantViolation(f"|E_{b.index}| != |E_{a.index}| - 2 rank d_{a.index}")
    last = p.pages[-1]
    if last.dims.total() - 2 * last.rank() != p.e_inf.total():
        raise InvariantViolation("E_infinity does not match the last page")


def compute_pages(c: FilteredComplex, check: bool = True) -> PageSet:
    if c.theory != "lee":
        raise ValidationError("Lee pages need a complex built with theory='lee'")
    if check:
        check_d_squared(c)
    pairs, ess = filtered_pairs(c)
    p = pages_from_pairs(pairs, ess)
    if p.e_inf.total() != 2:
        raise InvariantViolation(f"E_infinity has total dimension {p.e_inf.total()}, expected 2")
    return p


def s_invariant(p: PageSet) -> int:
    cells = sorted(p.e_inf.items())
    if len(cells) != 2 or any(v != 1 for _, v in cells):
        raise ValidationError(f"malformed E_infinity {dict(p.e_inf.items())}")
    (i1, j1), (i2, j2) = cells[0][0], cells[1][0]
    if i1 != 0 or i2 != 0 or j2 - j1 != 2:
        raise ValidationError(f"E_infinity survivors {cells} are not a pawn pair at i = 0")
    return (j1 + j2) // 2


def decomposition_from_pages(p: PageSet, kh: Laurent2) -> DecompositionFamily:
    s = s_invariant(p)
    f = {}
    for page in p.pages:
        f[page.index] = Laurent2(page.diff_ranks)
    rebuilt = Laurent2({(0, s - 1): 1, (0, s + 1): 1})
    for l, poly in f.items():
        rebuilt = rebuilt + poly * Laurent2({(0, 0): 1, (1, 4 * l): 1})
    if rebuilt != kh:
        raise InvariantViolation("decomposition identity fails")
    if not all(poly.nonnegative() for poly in f.values()):
        raise InvariantViolation("negative coefficient in f_{2l}")
    return DecompositionFamily(s, f)


def lee(d: Diagram, max_direct: int = DEFAULT_MAX_DIRECT) -> LeeResult:
    """Full pipeline for a diagram within the direct budget."""
    from .grading import poincare_series

    c = build_complex(d, "lee", max_direct)
    pages = compute_pages(c)
    kh = pages.pages[0].dims
    dec = decomposition_from_pages(pages, poincare_series(kh))
    return LeeResult(s_invariant(pages), pages, dec)
