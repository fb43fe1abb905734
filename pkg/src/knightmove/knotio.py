"""Oriented planar diagrams: parsing, braid closures, full twists and the bundled catalog.

PD convention: each crossing ``X[a,b,c,d]`` lists its four edge labels
counterclockwise, starting from the incoming under-strand.  The under-strand
therefore runs ``a -> c``; the over-strand runs ``d -> b`` (positive crossing)
or ``b -> d`` (negative crossing).  The 0-smoothing joins ``a-b`` and ``c-d``,
the 1-smoothing joins ``a-d`` and ``b-c``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Iterable, Sequence

from .errors import NotAKnotError, PDParseError, ValidationError

__all__ = [
    "Crossing",
    "Diagram",
    "TwistSpec",
    "parse_pd",
    "from_pd_tuples",
    "from_braid",
    "insert_full_twist",
    "catalog_names",
    "catalog_get",
]

_TOKEN = re.compile(r"X\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


@dataclass(frozen=True)
class Crossing:
    edges: tuple[int, int, int, int]
    sign: int

    def smoothing(self, bit: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """Pairs of edge *slots* (0..3) joined by the 0- or 1-smoothing."""
        return ((0, 1), (2, 3)) if bit == 0 else ((0, 3), (1, 2))


@dataclass(frozen=True)
class Diagram:
    """A validated, immutable oriented link diagram.

    ``free_loops`` counts crossingless closed components (the ``UNKNOT``
    keyword gives one).  ``components`` includes them.
    """

    crossings: tuple[Crossing, ...]
    free_loops: int = 0
    components: int = 1
    name: str | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for c in self.crossings if c.sign > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for c in self.crossings if c.sign < 0)

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def is_knot(self) -> bool:
        return self.components == 1

    def require_knot(self) -> "Diagram":
        if not self.is_knot:
            raise NotAKnotError(
                f"diagram has {self.components} components; a knot is required"
            )
        return self

    @cached_property
    def edges(self) -> tuple[int, ...]:
        return tuple(sorted({e for c in self.crossings for e in c.edges}))

    @cached_property
    def slots(self) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
        """edge -> ((crossing, slot), (crossing, slot)) ordered tail, head."""
        return _oriented_slots(self.crossings)

    def pd_tuples(self) -> list[tuple[int, int, int, int]]:
        return [c.edges for c in self.crossings]

    def to_pd(self) -> str:
        if not self.crossings:
            return "UNKNOT" if self.free_loops == 1 else " ".join(["UNKNOT"] * self.free_loops)
        body = " ".join("X[%d,%d,%d,%d]" % c.edges for c in self.crossings)
        if self.free_loops:
            body += " " + " ".join(["UNKNOT"] * self.free_loops)
        return body

    def mirror(self) -> "Diagram":
        flipped = []
        for c in self.crossings:
            a, b, cc, d = c.edges
            # the old over-strand becomes the under-strand; keep counterclockwise order
            flipped.append((d, a, b, cc) if c.sign > 0 else (b, cc, d, a))
        name = None if self.name is None else f"mirror({self.name})"
        return from_pd_tuples(flipped, free_loops=self.free_loops, name=name)

    def relabel(self) -> "Diagram":
        """Renumber edges 1..2n consecutively along the orientation of each component."""
        if not self.crossings:
            return self
        slots = self.slots
        where = {}
        for ci, c in enumerate(self.crossings):
            for pos, e in enumerate(c.edges):
                where[(ci, pos)] = e
        new: dict[int, int] = {}
        label = 1
        for start in self.edges:
            if start in new:
                continue
            e = start
            while e not in new:
                new[e] = label
                label += 1
                ci, pos = slots[e][1]
                e = where[(ci, (pos + 2) % 4)]
        tuples = [tuple(new[e] for e in c.edges) for c in self.crossings]
        return from_pd_tuples(tuples, free_loops=self.free_loops, name=self.name)

    def faces(self) -> list[list[tuple[int, int]]]:
        """Boundary cycles of the planar map, as lists of (crossing, slot) darts."""
        other = {}
        for e, (s, t) in self.slots.items():
            other[s] = t
            other[t] = s
        seen = set()
        out = []
        for ci in range(self.n):
            for pos in range(4):
                dart = (ci, pos)
                if dart in seen:
                    continue
                cyc = []
                while dart not in seen:
                    seen.add(dart)
                    cyc.append(dart)
                    cj, q = other[dart]
                    dart = (cj, (q - 1) % 4)
                out.append(cyc)
        return out

    def is_planar(self) -> bool:
        """Euler characteristic check of each connected piece of the underlying map."""
        if not self.crossings:
            return True
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for s, t in self.slots.values():
            parent[find(s[0])] = find(t[0])
        pieces = len({find(i) for i in range(self.n)})
        # V - E + F = 2 per connected piece, E = 2V
        return len(self.faces()) == self.n + 2 * pieces

    def __repr__(self) -> str:  # keeps test output readable for 38-crossing diagrams
        tag = f" {self.name!r}" if self.name else ""
        return f"<Diagram{tag} n={self.n} writhe={self.writhe} components={self.components}>"


def _edge_slots(tuples: Sequence[Sequence[int]]) -> dict[int, list[tuple[int, int]]]:
    found: dict[int, list[tuple[int, int]]] = {}
    for ci, t in enumerate(tuples):
        for pos, e in enumerate(t):
            found.setdefault(e, []).append((ci, pos))
    bad = sorted(e for e, occ in found.items() if len(occ) != 2)
    if bad:
        raise PDParseError(
            f"edge incidence: labels {bad} do not occur exactly twice"
        )
    return found


def _oriented_slots(crossings):
    tuples = [c.edges if isinstance(c, Crossing) else c for c in crossings]
    raw = _edge_slots(tuples)
    oriented, _ = _orient(tuples, raw)
    return oriented


def _orient(tuples, raw):
    """Orient every strand component.

    Returns ``edge -> (tail slot, head slot)`` and the number of components.
    Each component is traversed from its lowest edge; the direction is forced
    by any under-pass (which must enter at slot 0).  Components passing over
    everywhere run in the direction whose second edge has the smaller label.
    """
    at = {(ci, pos): e for ci, t in enumerate(tuples) for pos, e in enumerate(t)}
    oriented: dict[int, tuple[tuple[int, int], tuple[int, int]]] = {}
    components = 0
    for start in sorted(raw):
        if start in oriented:
            continue
        components += 1

        def walk(first_tail):
            seq = []
            e = start
            tail = first_tail
            visited = set()
            while e not in visited:
                visited.add(e)
                s0, s1 = raw[e]
                head = s1 if tail == s0 else s0
                seq.append((e, tail, head))
                ci, pos = head
                nxt_slot = (ci, (pos + 2) % 4)
                e = at[nxt_slot]
                tail = nxt_slot
            return seq

        fwd = walk(raw[start][0])
        enters = [head[1] for _, _, head in fwd if head[1] in (0, 2)]
        if enters and all(p == 2 for p in enters):
            seq = walk(raw[start][1])
        elif enters and not all(p == 0 for p in enters):
            raise PDParseError(
                f"orientation inconsistency on the strand through edge {start}"
            )
        elif not enters and len(fwd) > 1:
            bwd = walk(raw[start][1])
            seq = fwd if fwd[1][0] <= bwd[1][0] else bwd
        else:
            seq = fwd
        for e, tail, head in seq:
            oriented[e] = (tail, head)
    return oriented, components


def from_pd_tuples(
    tuples: Iterable[Sequence[int]], free_loops: int = 0, name: str | None = None
) -> Diagram:
    tuples = [tuple(int(x) for x in t) for t in tuples]
    for t in tuples:
        if len(t) != 4:
            raise PDParseError(f"malformed token: crossing {t} does not have 4 edges")
    if not tuples:
        return Diagram((), free_loops=free_loops, components=free_loops, name=name)
    raw = _edge_slots(tuples)
    oriented, comps = _orient(tuples, raw)
    crossings = []
    for ci, t in enumerate(tuples):
        # over strand: slots 1 and 3; positive when it enters at slot 3
        e_d = t[3]
        head = oriented[e_d][1]
        tail = oriented[e_d][0]
        if head == (ci, 3):
            sign = 1
        elif tail == (ci, 3):
            sign = -1
        else:  # pragma: no cover - slots are consistent by construction
            raise PDParseError(f"orientation inconsistency at crossing {t}")
        crossings.append(Crossing(t, sign))
    return Diagram(tuple(crossings), free_loops=free_loops,
                   components=comps + free_loops, name=name)


def parse_pd(text: str, name: str | None = None) -> Diagram:
    """Parse PD text: ``X[a,b,c,d]`` tokens, ``UNKNOT`` keywords, ``#`` comments."""
    tuples = []
    free = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        pos = 0
        line = line.strip()
        while pos < len(line):
            if line[pos] in " \t,;":
                pos += 1
                continue
            if line.startswith("UNKNOT", pos):
                free += 1
                pos += len("UNKNOT")
                continue
            m = _TOKEN.match(line, pos)
            if not m:
                raise PDParseError(
                    f"malformed token at line {lineno}: {line[pos:pos + 20]!r}"
                )
            tuples.append(tuple(int(g) for g in m.groups()))
            pos = m.end()
    if not tuples and not free:
        raise PDParseError("malformed token: empty PD text")
    return from_pd_tuples(tuples, free_loops=free, name=name)


def from_braid(word: Sequence[int], strands: int, name: str | None = None) -> Diagram:
    """Diagram of the closure of a braid word.

    Generators are 1-based signed indices; ``+i`` is a positive crossing of
    strands ``i`` and ``i+1`` (strands run upward, numbered left to right).
    Strands untouched by the word become crossingless components.
    """
    if strands < 1:
        raise ValidationError("a braid needs at least one strand")
    for g in word:
        if g == 0 or abs(g) >= strands:
            raise ValidationError(f"generator {g} out of range for {strands} strands")
    current = list(range(strands))  # edge label currently at each position
    nxt = strands
    tuples = []
    for g in word:
        i = abs(g)  # positions i-1 (left) and i (right)
        left, right = current[i - 1], current[i]
        tl, tr = nxt, nxt + 1
        nxt += 2
        if g > 0:
            # under strand bottom-right -> top-left, over bottom-left -> top-right
            tuples.append([right, tr, tl, left])
        else:
            # under strand bottom-left -> top-right, over bottom-right -> top-left
            tuples.append([left, right, tr, tl])
        current[i - 1], current[i] = tl, tr
    # close up: top label at each position is identified with the bottom label
    ident = {current[p]: p for p in range(strands) if current[p] != p}
    tuples = [[ident.get(e, e) for e in t] for t in tuples]
    touched = {p for g in word for p in (abs(g) - 1, abs(g))}
    free = strands - len(touched)
    if not tuples:
        return Diagram((), free_loops=free, components=free, name=name)
    return from_pd_tuples(tuples, free_loops=free, name=name).relabel()


@dataclass(frozen=True)
class TwistSpec:
    """A full twist on ``k`` strands crossing a disk.

    ``attachment`` lists the edges in the order the disk's core arc meets
    them.  ``directions[p]`` is +1 if that edge runs across the disk from the
    right-hand side of the core arc to its left-hand side (upward in the twist
    box) and -1 otherwise.  ``sign`` +1 is a right-handed (positive) twist.
    """

    attachment: tuple[int, ...]
    sign: int = 1
    directions: tuple[int, ...] | None = None

    @property
    def k(self) -> int:
        return len(self.attachment)

    def dirs(self) -> tuple[int, ...]:
        return self.directions if self.directions is not None else (1,) * self.k


def full_twist_word(k: int, sign: int = 1) -> list[int]:
    """(s_1 ... s_{k-1})^k, the square of the half twist."""
    return [sign * i for _ in range(k) for i in range(1, k)]


def insert_full_twist(d: Diagram, spec: TwistSpec) -> Diagram:
    """Insert a full twist box across the attachment edges of ``d``."""
    k = spec.k
    if k == 0:
        raise ValidationError("a twist needs at least one strand")
    if spec.sign not in (1, -1):
        raise ValidationError("twist sign must be +1 or -1")
    dirs = spec.dirs()
    if len(dirs) != k or any(x not in (1, -1) for x in dirs):
        raise ValidationError("one direction (+1/-1) is needed per attachment edge")
    if len(set(spec.attachment)) != k:
        raise ValidationError("attachment edges must be pairwise distinct")
    if k == 1:
        if d.crossings and spec.attachment[0] not in d.slots:
            raise ValidationError(f"attachment edge {spec.attachment[0]} missing")
        return d

    if not d.crossings:
        return _twist_free_loop(d, spec)
    for e in spec.attachment:
        if e not in d.slots:
            raise ValidationError(f"attachment edge {e} missing")

    tuples = [list(c.edges) for c in d.crossings]
    nxt = max(d.edges) + 1
    # bottom[p] / top[p]: label of the edge piece entering the box at position p
    bottom, top = [], []
    for e, dr in zip(spec.attachment, dirs):
        (tci, tpos), (hci, hpos) = d.slots[e]
        head_piece = nxt
        nxt += 1
        tuples[hci][hpos] = head_piece  # tail side keeps the old label
        if dr > 0:
            bottom.append(e)
            top.append(head_piece)
        else:
            top.append(e)
            bottom.append(head_piece)

    current = list(bottom)
    for g in full_twist_word(k, spec.sign):
        i = abs(g)
        l, r = i - 1, i
        bl, br = current[l], current[r]
        tl, tr = nxt, nxt + 1
        nxt += 2
        # geometric slots counterclockwise from bottom-right
        ccw = [br, tr, tl, bl]
        # under-strand diagonal: BR-TL for positive, BL-TR for negative
        under = (0, 2) if g > 0 else (3, 1)
        # strand moving through BR->TL carries the right strand's direction, etc.
        if g > 0:
            under_dir = dirs[r]
        else:
            under_dir = dirs[l]
        start = under[0] if under_dir > 0 else under[1]
        tuples.append([ccw[(start + j) % 4] for j in range(4)])
        current[l], current[r] = tl, tr
        dirs = list(dirs)
        dirs[l], dirs[r] = dirs[r], dirs[l]
    # the full twist is a pure braid: position p on top is the same strand
    ident = {current[p]: top[p] for p in range(k)}
    tuples = [[ident.get(e, e) for e in t] for t in tuples]
    out = from_pd_tuples(tuples, free_loops=d.free_loops, name=None).relabel()
    if not out.is_planar():
        raise ValidationError("twist attachment is not realizable by a disk in the plane")
    return out


def _twist_free_loop(d: Diagram, spec: TwistSpec) -> Diagram:
    # A crossingless loop meeting the disk k times as a closed zigzag:
    # strands alternate up/down; caps on top join (0,1),(2,3)..., cups below
    # join (1,2),(3,4)... and the outer arc joins k-1 back to 0.
    k = spec.k
    if d.free_loops != 1 or k % 2:
        raise ValidationError("a crossingless unknot meets a disk an even number of times")
    dirs = tuple(1 if p % 2 == 0 else -1 for p in range(k))
    bottom = list(range(100, 100 + k))
    top = list(range(200, 200 + k))
    # edges outside the box are glued afterwards through ident
    glue = {}
    for p in range(0, k, 2):
        glue[top[p + 1]] = top[p]  # strand p goes up then over to p+1
    for p in range(1, k - 1, 2):
        glue[bottom[p + 1]] = bottom[p]
    glue[bottom[0]] = bottom[k - 1]
    nxt = 1000
    current = list(bottom)
    tuples = []
    dd = list(dirs)
    for g in full_twist_word(k, spec.sign):
        i = abs(g)
        l, r = i - 1, i
        bl, br = current[l], current[r]
        tl, tr = nxt, nxt + 1
        nxt += 2
        ccw = [br, tr, tl, bl]
        under = (0, 2) if g > 0 else (3, 1)
        under_dir = dd[r] if g > 0 else dd[l]
        start = under[0] if under_dir > 0 else under[1]
        tuples.append([ccw[(start + j) % 4] for j in range(4)])
        current[l], current[r] = tl, tr
        dd[l], dd[r] = dd[r], dd[l]
    ident = {current[p]: top[p] for p in range(k)}

    def canon(e):
        e = ident.get(e, e)
        while e in glue:
            e = glue[e]
        return e

    tuples = [[canon(e) for e in t] for t in tuples]
    out = from_pd_tuples(tuples).relabel()
    if not out.is_planar():  # pragma: no cover
        raise ValidationError("twist attachment is not realizable by a disk in the plane")
    return out


# ---------------------------------------------------------------- catalog

def catalog_names() -> list[str]:
    root = resources.files(__package__) / "data"
    return sorted(p.name[:-3] for p in root.iterdir() if p.name.endswith(".pd"))


def catalog_text(name: str) -> str:
    path = resources.files(__package__) / "data" / f"{name}.pd"
    if not path.is_file():
        raise ValidationError(f"unknown catalog entry {name!r}; known: {catalog_names()}")
    return path.read_text()


def catalog_get(name: str) -> Diagram:
    return parse_pd(catalog_text(name), name=name)


def catalog_meta(name: str) -> dict[str, str]:
    """``# key: value`` header lines of a catalog file."""
    meta = {}
    for line in catalog_text(name).splitlines():
        m = re.match(r"#\s*([\w-]+)\s*:\s*(.*)$", line)
        if m:
            meta[m.group(1)] = m.group(2).strip()
    return meta
