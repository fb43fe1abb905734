"""Table-level audits: the knight-move decomposition, forced higher Lee
differentials, the Alexander polynomial and the Fox-Milnor condition.

Everything here works from a bigraded table (plus ``s``), so it applies to
knots too large for the filtered complex, as long as their Khovanov homology
is known.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt

from .errors import InvariantViolation, ValidationError
from .grading import DimTable, Laurent1, Laurent2, poincare_series
from .knotio import Diagram

__all__ = [
    "KnightMoveReport",
    "AlexanderResult",
    "FoxMilnorResult",
    "Certificate",
    "knight_move_solve",
    "max_knight_matching",
    "knight_leftover_bounds",
    "higher_diff_certificate",
    "alexander",
    "alexander_polynomial",
    "fox_milnor",
    "unknotting_lower_bound",
    "audit_report",
    "summary",
]


# ---------------------------------------------------------------- knight-move decomposition


@dataclass(frozen=True)
class Certificate:
    """A higher Lee differential ``d_n`` that must be nonzero from ``source`` to ``target``."""

    n: int
    source: tuple[int, int]
    target: tuple[int, int]

    def to_dict(self) -> dict:
        return {"n": self.n, "source": list(self.source), "target": list(self.target),
                "bidegree": [1, 4 * self.n]}


@dataclass(frozen=True)
class KnightMoveReport:
    verdict: str  # "holds" or "fails"
    s: int
    f2: Laurent2 | None = None
    witness: tuple[int, int] | None = None
    reason: str | None = None
    certificates: tuple[Certificate, ...] = ()

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "s": self.s}
        if self.holds:
            out["f2"] = str(self.f2)
            out["f2_terms"] = [{"i": i, "j": j, "coeff": v} for (i, j), v in self.f2.items()]
        else:
            out["witness"] = list(self.witness)
            out["reason"] = self.reason
        out["certificates"] = [c.to_dict() for c in self.certificates]
        return out


def _as_series(kh) -> Laurent2:
    return kh if isinstance(kh, Laurent2) else poincare_series(kh)


def _check_table_series(p: Laurent2, s: int) -> None:
    if s % 2:
        raise ValidationError(f"s must be even, got {s}")
    for (i, j), v in p.c.items():
        if v < 0:
            raise ValidationError(f"negative coefficient {v} at {(i, j)}")
        if j % 2 == 0:
            raise ValidationError(f"even quantum degree at {(i, j)}: knot tables live in odd q")


def knight_move_solve(kh, s: int) -> KnightMoveReport:
    """Solve ``Kh = q^s (q + q^-1) + f2 (1 + t q^4)`` for ``f2`` with nonnegative coefficients.

    The solution of the linear equation is unique and is found by the
    recurrence ``f(i, j) = R(i, j) - f(i - 1, j - 4)`` with ``i`` ascending.
    The witness on failure is the uncancellable class: the source cell of the
    first negative coefficient, or that cell itself when nothing feeds it.
    """
    p = _as_series(kh)
    _check_table_series(p, s)
    R = dict((p - Laurent2({(0, s - 1): 1, (0, s + 1): 1})).c)
    if not R:
        return KnightMoveReport("holds", s, Laurent2())
    i_lo = min(i for i, _ in R)
    i_hi = max(i for i, _ in R)
    f: dict[tuple[int, int], int] = {}
    for i in range(i_lo, i_hi + 2):
        js = sorted({j for (a, j) in R if a == i} | {j + 4 for (a, j) in f if a == i - 1})
        for j in js:
            v = R.get((i, j), 0) - f.get((i - 1, j - 4), 0)
            if v < 0:
                prev = (i - 1, j - 4)
                if f.get(prev, 0) > 0:
                    reason = (f"class at {prev} has no knight-move partner: "
                              f"f2 would need coefficient {v} at {(i, j)}")
                    return KnightMoveReport("fails", s, witness=prev, reason=reason)
                reason = f"negative remainder {v} at {(i, j)} (pawn pair missing from the table?)"
                return KnightMoveReport("fails", s, witness=(i, j), reason=reason)
            if v:
                f[(i, j)] = v
    # every coefficient of f at i_hi + 1 would have to be cancelled by absent terms
    stray = sorted(k for k in f if k[0] > i_hi)
    if stray:  # pragma: no cover - excluded by the sweep above
        return KnightMoveReport("fails", s, witness=stray[0], reason="sweep does not terminate")
    f2 = Laurent2(f)
    if f2 * Laurent2({(0, 0): 1, (1, 4): 1}) + Laurent2({(0, s - 1): 1, (0, s + 1): 1}) != p:
        raise InvariantViolation("knight-move recurrence does not reproduce the table")
    return KnightMoveReport("holds", s, f2)


def _remove_pawn(tbl: DimTable, s: int) -> dict[tuple[int, int], int]:
    d = dict(tbl.items())
    for key in ((0, s - 1), (0, s + 1)):
        if d.get(key, 0) < 1:
            raise ValidationError(f"pawn pair at (0, {s - 1}), (0, {s + 1}) is absent from the table")
        d[key] -= 1
    return {k: v for k, v in d.items() if v}


def _diagonals(cells: dict[tuple[int, int], int]):
    """Maximal runs of cells linked by the shift ``(1, 4)``; each run is a weighted path."""
    runs = []
    for key in sorted(cells, key=lambda c: (c[1] - 4 * c[0], c[0])):
        prev = (key[0] - 1, key[1] - 4)
        if runs and runs[-1][-1] == prev:
            runs[-1].append(key)
        else:
            runs.append([key])
    return runs


def _path_best(w: list[int], focus: int | None = None):
    """Best edge flows on a weighted path.

    Maximises the matched total and then, among maximum matchings, the units
    of node ``focus`` that get matched.  Returns the flows ``x[k]`` on edge ``(k, k+1)``.
    """
    m = len(w)
    if m < 2:
        return []
    # DP over edges; state = flow on the previous edge
    best: dict[int, tuple[tuple[int, int], list[int]]] = {0: ((0, 0), [])}
    for k in range(m - 1):
        nxt: dict[int, tuple[tuple[int, int], list[int]]] = {}
        for prev, (score, flows) in best.items():
            for x in range(0, min(w[k] - prev, w[k + 1]) + 1):
                use = (x if focus in (k, k + 1) else 0)
                sc = (score[0] + x, score[1] + use)
                if x not in nxt or sc > nxt[x][0]:
                    nxt[x] = (sc, flows + [x])
        best = nxt
    return max(best.values(), key=lambda t: (t[0], [-v for v in t[1]]))[1]


def max_knight_matching(kh, s: int) -> DimTable:
    """Units left unmatched by a maximum matching along ``(i, j) -> (i + 1, j + 4)``.

    The pawn pair at ``(0, s +- 1)`` is removed first.  The shift graph is a
    disjoint union of paths, so the maximum is exact; ties are broken toward
    matching earlier edges of each path.
    """
    tbl = kh if isinstance(kh, DimTable) else _as_series(kh).to_table()
    cells = _remove_pawn(tbl, s)
    left: dict[tuple[int, int], int] = {}
    for run in _diagonals(cells):
        w = [cells[c] for c in run]
        x = _path_best(w)
        for k, c in enumerate(run):
            used = (x[k - 1] if k > 0 else 0) + (x[k] if k < len(x) else 0)
            if w[k] - used:
                left[c] = w[k] - used
    return DimTable(left)


def knight_leftover_bounds(kh, s: int) -> DimTable:
    """Per cell, the fewest units left unmatched over all maximum knight matchings.

    A positive entry means that cell keeps a class that ``d_1`` cannot cancel,
    whichever maximum matching is chosen.
    """
    tbl = kh if isinstance(kh, DimTable) else _as_series(kh).to_table()
    cells = _remove_pawn(tbl, s)
    out: dict[tuple[int, int], int] = {}
    for run in _diagonals(cells):
        w = [cells[c] for c in run]
        for k, c in enumerate(run):
            x = _path_best(w, focus=k)
            used = (x[k - 1] if k > 0 else 0) + (x[k] if k < len(x) else 0)
            if w[k] - used:
                out[c] = w[k] - used
    return DimTable(out)


def higher_diff_certificate(kh, s: int) -> list[Certificate]:
    """Higher differentials ``d_n`` (``n >= 2``) forced by the shape of the table.

    For every class that survives every maximum knight matching, list the
    cells it could reach or be reached from by a map of bidegree ``(1, 4n)``
    with ``n >= 2``.  When there is exactly one such option, that ``d_n`` must
    be nonzero.
    """
    tbl = kh if isinstance(kh, DimTable) else _as_series(kh).to_table()
    forced = knight_leftover_bounds(tbl, s)
    if not forced:
        return []
    span = max(j for _, j in tbl) - min(j for _, j in tbl)
    certs: list[Certificate] = []
    for (i, j) in forced:
        opts = []
        for n in range(2, span // 4 + 2):
            if tbl[(i + 1, j + 4 * n)]:
                opts.append(Certificate(n, (i, j), (i + 1, j + 4 * n)))
            if tbl[(i - 1, j - 4 * n)]:
                opts.append(Certificate(n, (i - 1, j - 4 * n), (i, j)))
        if len(opts) == 1 and opts[0] not in certs:
            certs.append(opts[0])
    return sorted(certs, key=lambda c: (c.n, c.source))


def unknotting_lower_bound(pages) -> int:
    """``2N - 1`` for the largest ``N`` with ``d_N != 0``; 0 when every differential vanishes.

    Accepts a :class:`~knightmove.lee.PageSet` or an iterable of page indices with nonzero differentials.
    """
    ns = pages.nonzero_differentials() if hasattr(pages, "nonzero_differentials") else list(pages)
    N = max(ns, default=0)
    return 2 * N - 1 if N >= 1 else 0


# ---------------------------------------------------------------- Alexander polynomial


@dataclass(frozen=True)
class FoxMilnorResult:
    status: str  # "passes", "fails" or "undecided"
    factor: Laurent1 | None = None
    bound: int = 8
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"status": self.status, "span_bound": self.bound, "detail": self.detail}
        if self.factor is not None:
            out["factor"] = _tstr(self.factor)
        return out


@dataclass(frozen=True)
class AlexanderResult:
    delta: Laurent1  # symmetric, in the variable t
    value_at_one: int
    fox_milnor: FoxMilnorResult = field(default=None)

    def to_dict(self) -> dict:
        return {
            "alexander": _tstr(self.delta),
            "coefficients": {str(k): v for k, v in self.delta.items()},
            "determinant": int(abs(self.delta(-1))),
            "value_at_one": self.value_at_one,
            "fox_milnor": self.fox_milnor.to_dict() if self.fox_milnor else None,
        }


def _tstr(p: Laurent1) -> str:
    return str(p).replace("q", "t")


def _det_int(rows: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (Bareiss)."""
    n = len(rows)
    if n == 0:
        return 1
    a = [r[:] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for r in range(k + 1, n):
            ar = a[r]
            ark = ar[k]
            for c in range(k + 1, n):
                ar[c] = (ar[c] * akk - ark * a[k][c]) // prev
            ar[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _wirtinger_rows(d: Diagram):
    """Arc indices per crossing: ``(over, incoming under, outgoing under, sign)``."""
    parent = {e: e for e in d.edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in d.crossings:
        _, b, _, dd = c.edges
        rb, rd = find(b), find(dd)
        if rb != rd:
            parent[max(rb, rd)] = min(rb, rd)
    roots = sorted({find(e) for e in d.edges})
    idx = {r: k for k, r in enumerate(roots)}
    rows = []
    for c in d.crossings:
        a, b, cc, _ = c.edges
        rows.append((idx[find(b)], idx[find(a)], idx[find(cc)], c.sign))
    return len(roots), rows


def alexander_polynomial(d: Diagram) -> Laurent1:
    """Symmetric Alexander polynomial with ``Δ(1) = 1`` from the Fox matrix of the Wirtinger presentation.

    Each crossing contributes the relation row ``(1 - t)`` on the over-arc,
    ``t`` on the incoming and ``-1`` on the outgoing under-arc (the two under
    entries swap for negative crossings).  The last relation and the column of
    the highest-numbered arc are deleted; the minor is evaluated at ``n`` integer
    points and interpolated exactly.
    """
    d.require_knot()
    if d.n == 0:
        return Laurent1.const(1)
    narcs, rows = _wirtinger_rows(d)
    if narcs != d.n:
        raise InvariantViolation(f"{narcs} Wirtinger arcs for {d.n} crossings")
    m = d.n - 1

    def minor_at(t: int) -> int:
        mat = [[0] * d.n for _ in range(d.n)]
        for r, (o, i_in, i_out, sg) in enumerate(rows):
            mat[r][o] += 1 - t
            if sg > 0:
                mat[r][i_in] += t
                mat[r][i_out] -= 1
            else:
                mat[r][i_in] -= 1
                mat[r][i_out] += t
        return _det_int([row[:m] for row in mat[:m]])

    xs = list(range(m + 1))
    ys = [Fraction(minor_at(x)) for x in xs]
    coeffs = _interpolate(xs, ys)
    poly = Laurent1({k: int(c) for k, c in enumerate(coeffs) if c})
    return _normalize_alexander(poly)


def _interpolate(xs, ys) -> list[Fraction]:
    """Coefficients (constant first) of the interpolating polynomial, via Newton form."""
    n = len(xs)
    dd = list(ys)
    for k in range(1, n):
        for i in range(n - 1, k - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k])
    coeffs = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        # coeffs <- coeffs * (t - xs[k]) + dd[k]
        new = [Fraction(0)] * n
        for e, c in enumerate(coeffs):
            if c:
                if e + 1 < n:
                    new[e + 1] += c
                new[e] -= c * xs[k]
        new[0] += dd[k]
        coeffs = new
    for c in coeffs:
        if c.denominator != 1:
            raise InvariantViolation("Alexander minor interpolated to a non-integer polynomial")
    return coeffs


def _normalize_alexander(p: Laurent1) -> Laurent1:
    if not p:
        raise InvariantViolation("Alexander minor vanishes identically")
    lo, hi = p.min_degree(), p.max_degree()
    if (lo + hi) % 2:
        raise InvariantViolation("Alexander polynomial has odd span")
    q = p.shift(-(lo + hi) // 2)
    if q(1) < 0:
        q = -q
    if q != q.reflect():
        raise InvariantViolation(f"Alexander polynomial {q} is not symmetric")
    if any(Fraction(v).denominator != 1 for _, v in q.items()):
        raise InvariantViolation(f"Alexander polynomial {q} has non-integer coefficients")
    return Laurent1({k: int(v) for k, v in q.items()})


def alexander(d: Diagram, span_bound: int = 8) -> AlexanderResult:
    delta = alexander_polynomial(d)
    v1 = int(delta(1))
    if v1 not in (1, -1):
        raise InvariantViolation(f"Alexander polynomial has value {v1} at t = 1")
    return AlexanderResult(delta, v1, fox_milnor(delta, span_bound))


def fox_milnor(delta: Laurent1, span_bound: int = 8) -> FoxMilnorResult:
    """Decide whether ``Δ ≐ ±f(t) f(t^-1)`` for an integer polynomial ``f``.

    The search is exhaustive: if ``Δ = ±f f̄`` then ``deg f`` is half the span
    and the squares of ``f``'s coefficients sum to ``|Δ_0|``, which bounds every
    coefficient.  Beyond ``span_bound`` the answer is "undecided".
    """
    if not delta:
        return FoxMilnorResult("fails", None, span_bound, "zero polynomial")
    lo, hi = delta.min_degree(), delta.max_degree()
    delta = delta.shift(-(lo + hi) // 2) if (lo + hi) % 2 == 0 else delta
    if delta != delta.reflect():
        raise ValidationError("Fox-Milnor needs a symmetric polynomial")
    span = delta.span()
    if span > span_bound:
        return FoxMilnorResult("undecided", None, span_bound, f"span {span} exceeds the search bound")
    m = span // 2
    c0 = delta.c.get(0, 0)
    norm = abs(c0)
    if norm == 0:
        return FoxMilnorResult("fails", None, span_bound, "zero middle coefficient")
    sign = 1 if c0 > 0 else -1
    target = delta * sign
    r = isqrt(norm)
    rng = range(-r, r + 1)
    for coeffs in product(rng, repeat=m + 1):
        if coeffs[0] <= 0 or coeffs[-1] == 0:
            continue  # f is only determined up to sign
        if sum(c * c for c in coeffs) != norm:
            continue
        f = Laurent1({k: c for k, c in enumerate(coeffs) if c})
        if f * f.reflect() == target:
            return FoxMilnorResult("passes", f, span_bound,
                                   f"Δ = {'+' if sign > 0 else '-'}f(t)f(1/t)")
    return FoxMilnorResult(
        "fails", None, span_bound,
        f"no integer f of degree {m} with coefficient squares summing to {norm}",
    )


# ---------------------------------------------------------------- reports


def audit_report(kh, s: int, alexander_result: AlexanderResult | None = None,
                 pages=None, name: str | None = None) -> dict:
    """JSON-ready audit of a Khovanov table."""
    tbl = kh if isinstance(kh, DimTable) else _as_series(kh).to_table()
    km = knight_move_solve(tbl, s)
    certs = tuple(higher_diff_certificate(tbl, s))
    km = KnightMoveReport(km.verdict, km.s, km.f2, km.witness, km.reason, certs)
    out = {"knot": name, "s": s, "total_rank": tbl.total(), "knight_move": km.to_dict()}
    try:
        out["knight_leftover"] = [{"i": i, "j": j, "dim": v} for (i, j), v in max_knight_matching(tbl, s).items()]
    except ValidationError as exc:
        out["knight_leftover"] = str(exc)
    if pages is not None:
        out["nonzero_differentials"] = pages.nonzero_differentials()
        out["unknotting_lower_bound"] = unknotting_lower_bound(pages)
    elif certs:
        out["unknotting_lower_bound"] = unknotting_lower_bound(c.n for c in certs)
    if alexander_result is not None:
        out["alexander"] = alexander_result.to_dict()
    out["summary"] = summary(out)
    return out


def summary(report: dict) -> str:
    name = report.get("knot") or "The knot"
    km = report["knight_move"]
    lines = []
    if km["verdict"] == "holds":
        lines.append(f"{name} satisfies the Knight Move Conjecture with s = {report['s']}.")
    else:
        w = tuple(km["witness"])
        lines.append(f"{name} does not satisfy the Knight Move Conjecture (s = {report['s']}): "
                     f"{km['reason']}.")
        for c in km["certificates"]:
            lines.append(f"The Lee differential d_{c['n']} of bidegree (1,{4 * c['n']}) is non-vanishing, "
                         f"from {tuple(c['source'])} to {tuple(c['target'])}.")
        if not km["certificates"]:
            lines.append(f"No single higher differential is forced by the class at {w}.")
    if "unknotting_lower_bound" in report:
        lines.append(f"Unknotting number is at least {report['unknotting_lower_bound']}.")
    alex = report.get("alexander")
    if alex:
        fm = alex["fox_milnor"]["status"]
        verdict = {"passes": "satisfies", "fails": "does not satisfy", "undecided": "is undecided for"}[fm]
        lines.append(f"Alexander polynomial {alex['alexander']}; it {verdict} the Fox-Milnor condition.")
    return "\n".join(lines)


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)
