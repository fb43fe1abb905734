"""Khovanov homology of large diagrams by scanning crossings one at a time.

The diagram is assembled as a growing tangle.  After each crossing the
partial complex is simplified: closed loops are delooped and every
isomorphism in the differential is removed by Gaussian elimination, so the
complex never gets near the ``2^n`` size of the full cube.

Objects are crossingless matchings of the current boundary points with a
homological degree ``h`` (number of 1-smoothings so far) and a quantum shift
``q``.  A morphism between two matchings is stored in neck-cut normal form:
every component of the cobordism is replaced by one disk per loop of
``source ∪ target``, each loop carrying 0 or 1 dot.  So a morphism is a dict
``{dot_mask: coefficient}``, where bit ``b`` of ``dot_mask`` is the loop whose
smallest point label is ``b``.  The local relations used to reach the normal
form are those of ``A = Q[x]/x^2``: a sphere with one dot is 1, a sphere
with no dots or two dots is 0, and a handle equals twice a dot.  Cutting a
genus ``g`` component with ``d`` dots and ``k`` boundary loops therefore
gives zero when ``d + g >= 2``.  When ``d + g = 1`` it gives ``2^g`` times all
loops dotted.  When ``d + g = 0`` it gives ``2^g`` times the sum over the ways
to leave exactly one loop undotted.

While a crossing is being glued on, closed loops get extra bits so source and
target copies stay apart.  The bit is ``M + p`` for a source loop and
``2M + p`` for a target loop, where ``p`` is the loop's smallest label and
``M`` exceeds every label.  Delooping reads those bits off and removes them.
"""
from __future__ import annotations

import gzip
import json
import logging
import resource
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import BudgetExceeded, InvariantViolation, ValidationError
from .grading import DimTable
from .knotio import Diagram, parse_pd

__all__ = [
    "Budget",
    "PartialComplex",
    "scan_order",
    "scan",
    "reduced_kh",
    "CHECKPOINT_VERSION",
]

log = logging.getLogger("knightmove.scan")

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Budget:
    """Resource limits for a scan; ``None`` means unlimited."""

    seconds: float | None = None
    memory_mb: float | None = None
    max_objects: int | None = None

    def __post_init__(self):
        for name in ("seconds", "memory_mb", "max_objects"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValidationError(f"budget {name} must be positive")


def scan_order(d: Diagram) -> list[int]:
    """Greedy order keeping the open boundary small; ties to the lowest crossing index."""
    remaining = set(range(d.n))
    boundary: set[int] = set()
    order = []
    while remaining:
        best = None
        for ci in sorted(remaining):
            edges = d.crossings[ci].edges
            new = set(boundary)
            for e in edges:
                new ^= {e}
            key = (len(new), -len(boundary & set(edges)), ci)
            if best is None or key < best[0]:
                best = (key, ci, new)
        _, ci, boundary = best
        remaining.discard(ci)
        order.append(ci)
    return order


# ---------------------------------------------------------------- helpers


class _UF:
    __slots__ = ("p",)

    def __init__(self):
        self.p = {}

    def find(self, x):
        p = self.p
        p.setdefault(x, x)
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[ra] = rb


def _loop_ids(pairs_a, pairs_b) -> dict[int, int]:
    """Point -> id (smallest point) of its loop in the union of two matchings."""
    uf = _UF()
    for a, b in pairs_a:
        uf.union(a, b)
    for a, b in pairs_b:
        uf.union(a, b)
    groups: dict = {}
    for a, b in pairs_a:
        for p in (a, b):
            groups.setdefault(uf.find(p), []).append(p)
    out = {}
    for pts in groups.values():
        m = min(pts)
        for p in pts:
            out[p] = m
    return out


def _expand(plan, dots, coef, out):
    """Add the normal form of ``coef`` times a glued cobordism to ``out``.

    ``plan`` lists components as ``(input masks, genus, final loop bits, mask of those bits)``;
    ``dots`` holds the input dot masks in the same order as each component's input masks.
    """
    terms = {0: coef}
    for inmasks, g, fbits, fmask in plan:
        d = 0
        for D, m in zip(dots, inmasks):
            d += (D & m).bit_count()
        e = d + g
        if e >= 2:
            return
        c = 1 << g
        if e == 1:
            terms = {t | fmask: v * c for t, v in terms.items()}
        else:
            if not fbits:
                return
            terms = {t | (fmask ^ b): v * c for t, v in terms.items() for b in fbits}
    for t, v in terms.items():
        nv = out.get(t, 0) + v
        if nv:
            out[t] = nv
        else:
            out.pop(t, None)


def _finish_plan(pieces, glues, uf, loops, loop_piece, inmask_of):
    """Group final loops and glue counts by component and compute each genus."""
    comp: dict = {}
    for pc in pieces:
        r = uf.find(pc)
        rec = comp.setdefault(r, [0, 0, [], [0] * len(inmask_of)])
        rec[0] += 1
        for k, fn in enumerate(inmask_of):
            rec[3][k] |= fn(pc)
    for a in glues:
        comp[uf.find(a)][1] += 1
    for bit, pc in zip(loops, loop_piece):
        comp[uf.find(pc)][2].append(bit)
    plan = []
    for npieces, nglue, bits, masks in comp.values():
        chi = npieces - nglue
        twice_g = 2 - chi - len(bits)
        if twice_g < 0 or twice_g % 2:
            raise InvariantViolation(f"glued surface has non-integral genus (chi {chi}, {len(bits)} loops)")
        fmask = 0
        for b in bits:
            fmask |= 1 << b
        plan.append((tuple(masks), twice_g // 2, tuple(1 << b for b in bits), fmask))
    return tuple(plan)


def _final_loops(src_arcs, tgt_arcs, node_src, node_tgt):
    """Loops of ``source ∪ target`` after gluing; arcs are ``(a, b, piece)``.

    Returns ``(bits, pieces)``: the id (smallest node) of each loop and a piece it runs through.
    """
    uf = _UF()
    tagged = []
    for a, b, pc in src_arcs:
        na, nb = node_src(a), node_src(b)
        uf.union(na, nb)
        tagged.append((na, nb, pc))
    for a, b, pc in tgt_arcs:
        na, nb = node_tgt(a), node_tgt(b)
        uf.union(na, nb)
        tagged.append((na, nb, pc))
    lo: dict = {}
    piece: dict = {}
    for na, nb, pc in tagged:
        r = uf.find(na)
        m = min(na, nb)
        if r not in lo or m < lo[r]:
            lo[r] = m
        piece.setdefault(r, pc)
    roots = sorted(lo, key=lo.__getitem__)
    return [lo[r] for r in roots], [piece[r] for r in roots]


def _scale(coef, lam):
    # -coef / lam, staying in int when possible
    if lam == 1:
        return -coef
    if lam == -1:
        return coef
    r = Fraction(-coef) / lam
    return r.numerator if r.denominator == 1 else r


# ---------------------------------------------------------------- partial complex


@dataclass
class _Obj:
    h: int
    q: int
    mid: int
    closed: tuple[int, ...] = ()


@dataclass
class _Step:
    crossing: int
    edges: tuple[int, ...]
    arcs: tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]
    shared: frozenset
    kinks: frozenset
    old_boundary: frozenset
    new_boundary: frozenset


@dataclass
class PartialComplex:
    """Complex of crossingless tangles over the scanned part of a diagram."""

    diagram: Diagram
    order: list[int]
    step: int = 0
    boundary: tuple[int, ...] = ()
    n_plus: int = 0
    n_minus: int = 0
    objects: dict[int, _Obj] = field(default_factory=dict)
    out: dict[int, dict[int, dict[int, object]]] = field(default_factory=dict)
    inn: dict[int, dict[int, dict[int, object]]] = field(default_factory=dict)
    peak_objects: int = 0
    _matchings: list = field(default_factory=list, repr=False)
    _mindex: dict = field(default_factory=dict, repr=False)
    _next_id: int = 0
    _loops_cache: dict = field(default_factory=dict, repr=False)
    _compose_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.M = 2 * max(self.diagram.edges, default=0) + 2

    # ---- construction

    @classmethod
    def start(cls, d: Diagram, order: list[int] | None = None) -> "PartialComplex":
        d.require_knot()
        if d.free_loops:
            raise ValidationError("the scan needs a diagram without crossingless loops")
        order = list(scan_order(d) if order is None else order)
        if sorted(order) != list(range(d.n)):
            raise ValidationError("scan order must be a permutation of the crossings")
        pc = cls(d, order)
        pc.add_object(0, 0, ())
        return pc

    def matching(self, mid: int) -> tuple[tuple[int, int], ...]:
        return self._matchings[mid]

    def _intern(self, pairs) -> int:
        key = tuple(sorted(tuple(sorted(p)) for p in pairs))
        mid = self._mindex.get(key)
        if mid is None:
            mid = len(self._matchings)
            self._matchings.append(key)
            self._mindex[key] = mid
        return mid

    def add_object(self, h: int, q: int, pairs, closed=()) -> int:
        oid = self._next_id
        self._next_id += 1
        self.objects[oid] = _Obj(h, q, self._intern(pairs), tuple(closed))
        self.out[oid] = {}
        self.inn[oid] = {}
        return oid

    def set_entry(self, src: int, tgt: int, morph: dict) -> None:
        morph = {m: c for m, c in morph.items() if c}
        if not morph:
            self.out[src].pop(tgt, None)
            self.inn[tgt].pop(src, None)
            return
        self.out[src][tgt] = morph
        self.inn[tgt][src] = morph

    def entry(self, src: int, tgt: int) -> dict:
        return self.out[src].get(tgt, {})

    def _remove(self, oid: int) -> None:
        for y in self.out.pop(oid):
            del self.inn[y][oid]
        for x in self.inn.pop(oid):
            del self.out[x][oid]
        del self.objects[oid]

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_entries(self) -> int:
        return sum(len(v) for v in self.out.values())

    @property
    def done(self) -> bool:
        return self.step == len(self.order)

    # ---- loops and composition

    def _loops(self, ma: int, mb: int) -> dict[int, int]:
        key = (ma, mb)
        got = self._loops_cache.get(key)
        if got is None:
            got = _loop_ids(self._matchings[ma], self._matchings[mb])
            self._loops_cache[key] = got
        return got

    def _compose_plan(self, ma: int, mb: int, mc: int):
        key = (ma, mb, mc)
        plan = self._compose_cache.get(key)
        if plan is not None:
            return plan
        L1 = self._loops(ma, mb)
        L2 = self._loops(mb, mc)
        uf = _UF()
        pieces = [("1", l) for l in set(L1.values())] + [("2", l) for l in set(L2.values())]
        glues = []
        for a, _ in self._matchings[mb]:
            uf.union(("1", L1[a]), ("2", L2[a]))
            glues.append(("1", L1[a]))
        loops, loop_piece = _final_loops(
            [(a, b, ("1", L1[a])) for a, b in self._matchings[ma]],
            [(a, b, ("2", L2[a])) for a, b in self._matchings[mc]],
            int, int,
        )
        plan = _finish_plan(
            pieces, glues, uf, loops, loop_piece,
            (lambda pc: (1 << pc[1]) if pc[0] == "1" else 0,
             lambda pc: (1 << pc[1]) if pc[0] == "2" else 0),
        )
        self._compose_cache[key] = plan
        return plan

    def compose(self, ma: int, mb: int, mc: int, f: dict, g: dict) -> dict:
        """``g ∘ f`` for ``f: ma -> mb`` and ``g: mb -> mc`` on the current boundary."""
        plan = self._compose_plan(ma, mb, mc)
        out: dict = {}
        for D1, c1 in f.items():
            for D2, c2 in g.items():
                _expand(plan, (D1, D2), c1 * c2, out)
        return out

    def check_composition_zero(self) -> None:
        """Raise unless every composite of consecutive differential entries vanishes."""
        for x, outs in self.out.items():
            if self.objects[x].closed:
                raise ValidationError("deloop every object before checking compositions")
            acc: dict[int, dict] = {}
            for y, f in outs.items():
                for z, g in self.out[y].items():
                    part = self.compose(self.objects[x].mid, self.objects[y].mid, self.objects[z].mid, f, g)
                    tgt = acc.setdefault(z, {})
                    for m, c in part.items():
                        nv = tgt.get(m, 0) + c
                        if nv:
                            tgt[m] = nv
                        else:
                            tgt.pop(m, None)
            for z, v in acc.items():
                if v:
                    raise InvariantViolation(f"d^2 != 0 between objects {x} and {z} at step {self.step}")

    # ---- delooping

    def deloop(self, oid: int, loop: int | None = None) -> tuple[int, int]:
        """Split a closed loop off object ``oid``; returns the ids for shifts +1 and -1."""
        o = self.objects.get(oid)
        if o is None:
            raise ValidationError(f"no object {oid}")
        if not o.closed:
            raise ValidationError(f"object {oid} has no closed loop")
        loop = o.closed[0] if loop is None else loop
        if loop not in o.closed:
            raise ValidationError(f"object {oid} has no closed loop {loop}")
        rest = tuple(c for c in o.closed if c != loop)
        plus = self._new_like(o, o.q + 1, rest)
        minus = self._new_like(o, o.q - 1, rest)
        sbit = 1 << (self.M + loop)
        tbit = 1 << (2 * self.M + loop)
        for y, f in list(self.out[oid].items()):
            fp, fm = {}, {}
            for m, c in f.items():
                if m & sbit:
                    fp[m ^ sbit] = c
                else:
                    fm[m] = c
            self.set_entry(plus, y, fp)
            self.set_entry(minus, y, fm)
        for x, f in list(self.inn[oid].items()):
            fp, fm = {}, {}
            for m, c in f.items():
                if m & tbit:
                    fm[m ^ tbit] = c
                else:
                    fp[m] = c
            self.set_entry(x, plus, fp)
            self.set_entry(x, minus, fm)
        self._remove(oid)
        return plus, minus

    def _new_like(self, o: _Obj, q: int, closed) -> int:
        oid = self._next_id
        self._next_id += 1
        self.objects[oid] = _Obj(o.h, q, o.mid, tuple(closed))
        self.out[oid] = {}
        self.inn[oid] = {}
        return oid

    def deloop_all(self) -> None:
        todo = [oid for oid, o in self.objects.items() if o.closed]
        while todo:
            oid = todo.pop()
            for new in self.deloop(oid):
                if self.objects[new].closed:
                    todo.append(new)

    # ---- elimination

    def is_isomorphism(self, src: int, tgt: int) -> bool:
        f = self.out.get(src, {}).get(tgt)
        if not f:
            return False
        a, b = self.objects[src], self.objects[tgt]
        if a.closed or b.closed or a.mid != b.mid or a.q != b.q:
            return False
        if set(f) != {0}:
            raise InvariantViolation(f"degree-zero endomorphism with dots between {src} and {tgt}")
        return True

    def eliminate(self, src: int, tgt: int) -> None:
        """Gaussian elimination of the isomorphism entry ``src -> tgt``."""
        if not self.is_isomorphism(src, tgt):
            raise ValidationError(f"entry {src} -> {tgt} is not invertible")
        lam = self.out[src][tgt][0]
        mb = self.objects[src].mid
        ins = [(x, f) for x, f in self.inn[tgt].items() if x != src]
        outs = [(y, g) for y, g in self.out[src].items() if y != tgt]
        for x, f in ins:
            mx = self.objects[x].mid
            for y, g in outs:
                corr = self.compose(mx, mb, self.objects[y].mid, f, g)
                if not corr:
                    continue
                cur = dict(self.out[x].get(y, {}))
                for m, c in corr.items():
                    nv = cur.get(m, 0) + _scale(c, lam)
                    if nv:
                        cur[m] = nv
                    else:
                        cur.pop(m, None)
                self.set_entry(x, y, cur)
        self._remove(src)
        self._remove(tgt)

    def simplify(self) -> int:
        """Eliminate isomorphisms until none remain; returns the number removed."""
        count = 0
        while True:
            cands = []
            for x, outs in self.out.items():
                ox = self.objects[x]
                if ox.closed:
                    continue
                for y in outs:
                    oy = self.objects[y]
                    if oy.mid == ox.mid and oy.q == ox.q and not oy.closed:
                        cands.append(((len(self.inn[y]) - 1) * (len(outs) - 1), x, y))
            if not cands:
                return count
            cands.sort()
            for _, x, y in cands:
                if x in self.objects and y in self.objects and self.is_isomorphism(x, y):
                    self.eliminate(x, y)
                    count += 1

    # ---- adding a crossing

    def _step_info(self) -> _Step:
        ci = self.order[self.step]
        c = self.diagram.crossings[ci]
        edges = tuple(c.edges)
        arcs = tuple(tuple((edges[s], edges[t]) for s, t in c.smoothing(bit)) for bit in (0, 1))
        old = frozenset(self.boundary)
        counts: dict[int, int] = {}
        for e in edges:
            counts[e] = counts.get(e, 0) + 1
        kinks = frozenset(e for e, k in counts.items() if k == 2)
        shared = frozenset(e for e in counts if e in old)
        new = frozenset((old - shared) | {e for e, k in counts.items() if k == 1 and e not in old})
        return _Step(ci, edges, arcs, shared, kinks, old, new)

    def _glue_object(self, st: _Step, mid: int, r: int):
        """New matching and closed loops (by smallest label) of ``matching ∪ smoothing``."""
        uf = _UF()
        for a, b in self._matchings[mid]:
            uf.union(a, b)
        for a, b in st.arcs[r]:
            uf.union(a, b)
        ends: dict = {}
        pts: dict = {}
        for a, b in list(self._matchings[mid]) + list(st.arcs[r]):
            for p in (a, b):
                root = uf.find(p)
                pts.setdefault(root, set()).add(p)
        pairs = []
        closed = []
        for root, s in pts.items():
            bd = sorted(p for p in s if p in st.new_boundary)
            if bd:
                if len(bd) != 2:
                    raise InvariantViolation("open component with other than two ends")
                pairs.append(tuple(bd))
            else:
                closed.append(min(s))
        del ends
        return self._intern(pairs), tuple(sorted(closed))

    def _node_maps(self, st: _Step):
        M = self.M
        nb = st.new_boundary
        return (lambda p: p if p in nb else p + M), (lambda p: p if p in nb else p + 2 * M)

    def _tensor_plan(self, st: _Step, ma: int, mb: int, r: int):
        """Plan for ``f ⊗ id`` on the smoothing ``r`` of the new crossing."""
        L1 = self._loops(ma, mb)
        arcs = st.arcs[r]
        uf = _UF()
        pieces = [("f", l) for l in set(L1.values())] + [("r", k) for k in range(len(arcs))]
        strip_at: dict[int, list[int]] = {}
        for k, (a, b) in enumerate(arcs):
            strip_at.setdefault(a, []).append(k)
            strip_at.setdefault(b, []).append(k)
        glues = []
        for s in st.shared:
            uf.union(("f", L1[s]), ("r", strip_at[s][0]))
            glues.append(("f", L1[s]))
        for e in st.kinks:
            k1, k2 = strip_at[e]
            uf.union(("r", k1), ("r", k2))
            glues.append(("r", k1))
        for pc in pieces:
            uf.find(pc)
        src = [(a, b, ("f", L1[a])) for a, b in self._matchings[ma]]
        src += [(a, b, ("r", k)) for k, (a, b) in enumerate(arcs)]
        tgt = [(a, b, ("f", L1[a])) for a, b in self._matchings[mb]]
        tgt += [(a, b, ("r", k)) for k, (a, b) in enumerate(arcs)]
        loops, loop_piece = _final_loops(src, tgt, *self._node_maps(st))
        return _finish_plan(
            pieces, glues, uf, loops, loop_piece,
            (lambda pc: (1 << pc[1]) if pc[0] == "f" else 0,),
        )

    def _saddle_plan(self, st: _Step, ma: int):
        """Plan for ``id ⊗ saddle`` from the 0- to the 1-smoothing of the new crossing."""
        pairs = self._matchings[ma]
        uf = _UF()
        pieces = [("s", k) for k in range(len(pairs))] + [("x", 0)]
        glues = []
        strip_of = {}
        for k, (a, b) in enumerate(pairs):
            strip_of[a] = k
            strip_of[b] = k
        for s in st.shared:
            uf.union(("s", strip_of[s]), ("x", 0))
            glues.append(("x", 0))
        for _ in st.kinks:
            glues.append(("x", 0))
        for pc in pieces:
            uf.find(pc)
        src = [(a, b, ("s", k)) for k, (a, b) in enumerate(pairs)] + [(a, b, ("x", 0)) for a, b in st.arcs[0]]
        tgt = [(a, b, ("s", k)) for k, (a, b) in enumerate(pairs)] + [(a, b, ("x", 0)) for a, b in st.arcs[1]]
        loops, loop_piece = _final_loops(src, tgt, *self._node_maps(st))
        return _finish_plan(pieces, glues, uf, loops, loop_piece, ())

    def add_crossing(self, simplify: bool = True) -> None:
        """Tensor on the next crossing in the scan order, then deloop and (optionally) eliminate."""
        if self.done:
            raise ValidationError("every crossing has already been scanned")
        if any(o.closed for o in self.objects.values()):
            self.deloop_all()
        st = self._step_info()
        new_objects: dict[int, _Obj] = {}
        ids: dict[tuple[int, int], int] = {}
        glue_cache: dict = {}
        for oid, o in self.objects.items():
            for r in (0, 1):
                key = (o.mid, r)
                if key not in glue_cache:
                    glue_cache[key] = self._glue_object(st, o.mid, r)
                nmid, closed = glue_cache[key]
                ids[(oid, r)] = self._next_id
                new_objects[self._next_id] = _Obj(o.h + r, o.q + r, nmid, closed)
                self._next_id += 1
        new_out: dict[int, dict] = {k: {} for k in new_objects}
        new_inn: dict[int, dict] = {k: {} for k in new_objects}

        def put(x, y, morph):
            if morph:
                new_out[x][y] = morph
                new_inn[y][x] = morph

        tplans: dict = {}
        for x, outs in self.out.items():
            mx = self.objects[x].mid
            for y, f in outs.items():
                my = self.objects[y].mid
                for r in (0, 1):
                    key = (mx, my, r)
                    plan = tplans.get(key)
                    if plan is None:
                        plan = tplans[key] = self._tensor_plan(st, mx, my, r)
                    morph: dict = {}
                    for D, c in f.items():
                        _expand(plan, (D,), c, morph)
                    put(ids[(x, r)], ids[(y, r)], morph)
        splans: dict = {}
        for oid, o in self.objects.items():
            plan = splans.get(o.mid)
            if plan is None:
                plan = splans[o.mid] = self._saddle_plan(st, o.mid)
            morph = {}
            _expand(plan, (), -1 if o.h % 2 else 1, morph)
            put(ids[(oid, 0)], ids[(oid, 1)], morph)

        self.objects = new_objects
        self.out = new_out
        self.inn = new_inn
        self.boundary = tuple(sorted(st.new_boundary))
        if self.diagram.crossings[st.crossing].sign > 0:
            self.n_plus += 1
        else:
            self.n_minus += 1
        self.step += 1
        self._loops_cache.clear()
        self._compose_cache.clear()
        self.peak_objects = max(self.peak_objects, len(self.objects))
        self.deloop_all()
        self.peak_objects = max(self.peak_objects, len(self.objects))
        if simplify:
            self.simplify()

    # ---- result

    def homology(self) -> DimTable:
        """Bigraded dimensions once the scan is complete and fully simplified."""
        if not self.done:
            raise ValidationError(f"scan stopped at step {self.step} of {len(self.order)}")
        self.deloop_all()
        self.simplify()
        if self.n_entries:
            raise InvariantViolation("differential entries survive the final elimination")
        d = self.diagram
        out: dict[tuple[int, int], int] = {}
        for o in self.objects.values():
            key = (o.h - d.n_minus, o.q + d.n_plus - 2 * d.n_minus)
            out[key] = out.get(key, 0) + 1
        return DimTable(out)

    # ---- checkpoints

    def to_json(self) -> dict:
        def coef(c):
            return c if isinstance(c, int) else str(c)

        return {
            "format": "knightmove-scan",
            "version": CHECKPOINT_VERSION,
            "pd": self.diagram.to_pd(),
            "order": self.order,
            "step": self.step,
            "boundary": list(self.boundary),
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "peak_objects": self.peak_objects,
            "objects": [
                [oid, o.h, o.q, [list(p) for p in self._matchings[o.mid]], list(o.closed)]
                for oid, o in sorted(self.objects.items())
            ],
            "entries": [
                [x, y, [[m, coef(c)] for m, c in sorted(f.items())]]
                for x, outs in sorted(self.out.items())
                for y, f in sorted(outs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PartialComplex":
        if data.get("format") != "knightmove-scan":
            raise ValidationError("not a scan checkpoint")
        if data.get("version") != CHECKPOINT_VERSION:
            raise ValidationError(f"checkpoint version {data.get('version')} is not {CHECKPOINT_VERSION}")
        d = parse_pd(data["pd"])
        pc = cls(d, list(data["order"]), step=data["step"], boundary=tuple(data["boundary"]),
                 n_plus=data["n_plus"], n_minus=data["n_minus"], peak_objects=data["peak_objects"])
        for oid, h, q, pairs, closed in data["objects"]:
            pc.objects[oid] = _Obj(h, q, pc._intern(pairs), tuple(closed))
            pc.out[oid] = {}
            pc.inn[oid] = {}
            pc._next_id = max(pc._next_id, oid + 1)

        def coef(c):
            if isinstance(c, int):
                return c
            r = Fraction(c)
            return r.numerator if r.denominator == 1 else r

        for x, y, terms in data["entries"]:
            pc.set_entry(x, y, {int(m): coef(c) for m, c in terms})
        return pc

    def save(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with gzip.open(tmp, "wt", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh)
        tmp.replace(path)

    @classmethod
    def load(cls, path) -> "PartialComplex":
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _rss_mb() -> float:
    # ru_maxrss is in kilobytes on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def scan(
    d: Diagram,
    budget: Budget | None = None,
    order: list[int] | None = None,
    checkpoint: str | Path | None = None,
    checkpoint_every: float = 60.0,
    check: bool = False,
) -> PartialComplex:
    """Run the scan to completion and return the fully simplified partial complex.

    With ``checkpoint`` set, an existing checkpoint for the same diagram is resumed
    and the state is saved periodically and whenever the budget runs out.
    ``check`` verifies ``d^2 = 0`` after every step (slow; for tests).
    """
    budget = budget or Budget()
    pc = None
    if checkpoint is not None and Path(checkpoint).exists():
        pc = PartialComplex.load(checkpoint)
        if pc.diagram.pd_tuples() != d.pd_tuples():
            raise ValidationError(f"checkpoint {checkpoint} belongs to a different diagram")
        if order is not None and list(order) != pc.order:
            raise ValidationError("checkpoint was written with a different scan order")
        log.info("resumed %s at step %d/%d with %d objects", checkpoint, pc.step, len(pc.order), pc.n_objects)
    if pc is None:
        pc = PartialComplex.start(d, order)
    t0 = time.monotonic()
    last_save = t0
    while not pc.done:
        pc.add_crossing()
        if check:
            pc.check_composition_zero()
        log.info(
            "step %d/%d crossing %d boundary %d objects %d entries %d",
            pc.step, len(pc.order), pc.order[pc.step - 1], len(pc.boundary), pc.n_objects, pc.n_entries,
        )
        now = time.monotonic()
        reason = None
        if budget.seconds is not None and now - t0 > budget.seconds:
            reason = f"time budget of {budget.seconds} s"
        elif budget.memory_mb is not None and _rss_mb() > budget.memory_mb:
            reason = f"memory budget of {budget.memory_mb} MB"
        elif budget.max_objects is not None and pc.peak_objects > budget.max_objects:
            reason = f"object budget of {budget.max_objects}"
        if checkpoint is not None and (reason or now - last_save > checkpoint_every):
            pc.save(checkpoint)
            last_save = now
        if reason and not pc.done:
            saved = f"; state saved to {checkpoint}" if checkpoint is not None else ""
            raise BudgetExceeded(
                f"scan exceeded the {reason} at step {pc.step}/{len(pc.order)} "
                f"with {pc.n_objects} objects{saved}"
            )
    if checkpoint is not None:
        pc.save(checkpoint)
    return pc


def reduced_kh(d: Diagram, budget: Budget | None = None, **kwargs) -> DimTable:
    """Rational Khovanov homology by scanning; same answer as the direct cube."""
    if d.n == 0:
        d.require_knot()
        return DimTable({(0, -1): 1, (0, 1): 1})
    return scan(d, budget, **kwargs).homology()
