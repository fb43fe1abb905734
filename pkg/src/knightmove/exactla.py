"""Exact sparse linear algebra over the rationals.

Entries are Python ``int`` while they stay integral and become
:class:`fractions.Fraction` only after a non-exact division, so the common
``+-1`` matrices of Khovanov complexes never leave integer arithmetic.
There are no tolerances anywhere in this module.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import InvariantViolation

__all__ = [
    "SparseMat",
    "rank",
    "kernel_basis",
    "homology_dims",
    "check_d_squared",
]


def exact_div(a, b):
    if type(a) is int and type(b) is int and a % b == 0:
        return a // b
    r = Fraction(a) / b
    return r.numerator if r.denominator == 1 else r


class SparseMat:
    """Row-major dict-of-dicts sparse matrix; zeros are never stored."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, entries: Mapping | Iterable = ()):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, object]] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for key, v in items:
            r, c = key
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry {(r, c)} outside a {nrows}x{ncols} matrix")
            if v:
                row = self.rows.setdefault(r, {})
                nv = row.get(c, 0) + v
                if nv:
                    row[c] = nv
                else:
                    del row[c]
                    if not row:
                        del self.rows[r]

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMat":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        return cls(nr, nc, {(r, c): v for r, row in enumerate(rows) for c, v in enumerate(row) if v})

    @classmethod
    def identity(cls, n: int) -> "SparseMat":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def triplets(self):
        for r in sorted(self.rows):
            row = self.rows[r]
            for c in sorted(row):
                yield r, c, row[c]

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def transpose(self) -> "SparseMat":
        return SparseMat(self.ncols, self.nrows, {(c, r): v for r, c, v in self.triplets()})

    def to_dense(self) -> list[list]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.triplets():
            out[r][c] = v
        return out

    def __matmul__(self, other: "SparseMat") -> "SparseMat":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out: dict[tuple[int, int], object] = {}
        for r, row in self.rows.items():
            acc: dict[int, object] = {}
            for k, v in row.items():
                orow = other.rows.get(k)
                if orow:
                    for c, w in orow.items():
                        acc[c] = acc.get(c, 0) + v * w
            for c, v in acc.items():
                if v:
                    out[(r, c)] = v
        return SparseMat(self.nrows, other.ncols, out)

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMat)
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.rows == other.rows
        )

    def __repr__(self) -> str:
        return f"SparseMat({self.nrows}x{self.ncols}, nnz={self.nnz})"

    def dump(self) -> str:
        """Text triplet dump shared with the complex debug format."""
        lines = [f"# {self.nrows} {self.ncols}"]
        lines += [f"{r} {c} {v}" for r, c, v in self.triplets()]
        return "\n".join(lines) + "\n"


def _eliminate(m: SparseMat, fraction_free: bool = False, col_order=None):
    """Markowitz-style elimination; returns the list of (row, col) pivots.

    The next pivot column is one with fewest remaining entries and, within
    it, the shortest row; ties go to the smallest column, then row index.
    ``col_order`` overrides the tie-break with an explicit column priority.
    """
    rows = {r: dict(v) for r, v in m.rows.items()}
    cols: dict[int, set[int]] = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)
    prio = (lambda c: c) if col_order is None else {c: i for i, c in enumerate(col_order)}.__getitem__
    heap = [(len(s), prio(c), c) for c, s in cols.items()]
    heapq.heapify(heap)
    pivots = []
    while heap:
        cnt, _, c = heapq.heappop(heap)
        s = cols.get(c)
        if not s:
            continue
        if len(s) != cnt:
            heapq.heappush(heap, (len(s), prio(c), c))
            continue
        pr = min(s, key=lambda r: (len(rows[r]), r))
        prow = rows.pop(pr)
        for cc in prow:
            cols[cc].discard(pr)
        del cols[c]
        pivots.append((pr, c))
        pv = prow[c]
        for r in sorted(s - {pr}):
            row = rows[r]
            f = row[c]
            if fraction_free:
                # row <- pv*row - f*prow, then strip the content
                for cc in list(row):
                    row[cc] = row[cc] * pv
                for cc, v in prow.items():
                    nv = row.get(cc, 0) - f * v
                    if nv:
                        if cc not in row:
                            cols[cc].add(r)
                        row[cc] = nv
                    elif cc in row:
                        del row[cc]
                        if cc != c:
                            cols[cc].discard(r)
                g = 0
                for v in row.values():
                    g = gcd(g, int(v))
                if g > 1:
                    for cc in row:
                        row[cc] //= g
            else:
                q = exact_div(f, pv)
                for cc, v in prow.items():
                    nv = row.get(cc, 0) - q * v
                    if nv:
                        if cc not in row:
                            cols[cc].add(r)
                        row[cc] = nv
                    elif cc in row:
                        del row[cc]
                        if cc != c:
                            cols[cc].discard(r)
            row.pop(c, None)
            if not row:
                del rows[r]
        for cc in prow:
            if cc in cols:
                heapq.heappush(heap, (len(cols[cc]), prio(cc), cc))
    return pivots


def rank(m: SparseMat, fraction_free: bool = False, col_order=None) -> int:
    """Exact rank over Q."""
    if fraction_free and any(
        not isinstance(v, int) for row in m.rows.values() for v in row.values()
    ):
        raise ValueError("fraction-free elimination needs an integer matrix")
    return len(_eliminate(m, fraction_free=fraction_free, col_order=col_order))


def rref(m: SparseMat) -> tuple[dict[int, dict[int, object]], list[int]]:
    """Reduced row echelon form: ({pivot col: row dict}, pivot columns)."""
    piv_rows: dict[int, dict[int, object]] = {}
    for r in sorted(m.rows):
        row = dict(m.rows[r])
        # reduce against existing pivots
        changed = True
        while changed:
            changed = False
            for c in sorted(row):
                if c in piv_rows:
                    f = row[c]
                    for cc, v in piv_rows[c].items():
                        nv = row.get(cc, 0) - f * v
                        if nv:
                            row[cc] = nv
                        else:
                            row.pop(cc, None)
                    changed = True
                    break
        if not row:
            continue
        c0 = min(row)
        pv = row[c0]
        row = {cc: exact_div(v, pv) for cc, v in row.items()}
        # clear the new pivot column from earlier pivot rows
        for c, prow in piv_rows.items():
            f = prow.get(c0)
            if f:
                for cc, v in row.items():
                    nv = prow.get(cc, 0) - f * v
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        piv_rows[c0] = row
    return piv_rows, sorted(piv_rows)


def kernel_basis(m: SparseMat) -> list[list]:
    """Basis of the right kernel, one dense vector per free column."""
    piv_rows, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = [0] * m.ncols
        v[f] = 1
        for c, row in piv_rows.items():
            x = row.get(f)
            if x:
                v[c] = -x
        basis.append(v)
    return basis


def check_d_squared(complex_) -> None:
    """Raise unless every composite ``D_{i+1} D_i`` vanishes exactly."""
    for i in complex_.degrees:
        if i + 1 not in complex_.degrees:
            continue
        prod = complex_.D(i + 1) @ complex_.D(i)
        if not prod.is_zero():
            raise InvariantViolation(f"D^2 != 0 from degree {i} (nnz {prod.nnz})")


def homology_dims(complex_, check: bool = True):
    """Bigraded dimensions of the cohomology of the degree-preserving part ``d0``.

    For the plain theory this is Khovanov homology; for the Lee complex it is
    the homology of the associated graded, i.e. the same thing.
    """
    from .grading import DimTable

    if check:
        check_d_squared(complex_)
    ranks: dict[tuple[int, int], int] = {}
    for i in complex_.degrees:
        for j, block in complex_.d0_blocks(i).items():
            ranks[(i, j)] = rank(block)
    out = {}
    for i in complex_.degrees:
        for j, size in complex_.graded_sizes(i).items():
            h = size - ranks.get((i, j), 0) - ranks.get((i - 1, j), 0)
            if h < 0:
                raise InvariantViolation("negative homology dimension")
            if h:
                out[(i, j)] = h
    return DimTable(out)
