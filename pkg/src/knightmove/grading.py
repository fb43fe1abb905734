"""Bigraded dimension tables and the Laurent polynomials they determine.

A :class:`DimTable` maps bigradings ``(i, j)`` (homological, quantum) to
positive dimensions.  Its Poincare series is a two-variable Laurent
polynomial in ``t`` (tracking ``i``) and ``q`` (tracking ``j``); the graded
Euler characteristic is the single-variable specialisation ``t = -1``.
All arithmetic is over the integers.
"""
from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from typing import Iterable, Iterator, Mapping

__all__ = [
    "DimTable",
    "Laurent1",
    "Laurent2",
    "poincare_series",
    "graded_euler",
    "mul",
]


class DimTable(Mapping):
    """Finite map ``(i, j) -> dimension`` with zeros omitted."""

    __slots__ = ("_d",)

    def __init__(self, data: Mapping[tuple[int, int], int] | Iterable = ()):
        d = {}
        items = data.items() if isinstance(data, Mapping) else data
        for (i, j), v in items:
            v = int(v)
            if v < 0:
                raise ValueError(f"negative dimension {v} at {(i, j)}")
            if v:
                d[(int(i), int(j))] = d.get((int(i), int(j)), 0) + v
        self._d = d

    def __getitem__(self, key):
        return self._d.get(tuple(key), 0)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self._d))

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, key) -> bool:
        return tuple(key) in self._d

    def __eq__(self, other) -> bool:
        if isinstance(other, DimTable):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def __repr__(self) -> str:
        return "DimTable({%s})" % ", ".join(f"{k}: {v}" for k, v in self.items())

    def total(self) -> int:
        return sum(self._d.values())

    def __add__(self, other: "DimTable") -> "DimTable":
        out = dict(self._d)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return DimTable(out)

    def shifted(self, di: int, dj: int) -> "DimTable":
        return DimTable({(i + di, j + dj): v for (i, j), v in self.items()})

    def mirrored(self) -> "DimTable":
        return DimTable({(-i, -j): v for (i, j), v in self.items()})

    # ---- serialisation

    def to_json(self) -> str:
        return json.dumps([{"i": i, "j": j, "dim": v} for (i, j), v in self.items()])

    @classmethod
    def from_json(cls, text: str) -> "DimTable":
        rows = json.loads(text)
        if isinstance(rows, dict) and "table" in rows:
            rows = rows["table"]
        return cls({(r["i"], r["j"]): r["dim"] for r in rows})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "dim"])
        for (i, j), v in self.items():
            w.writerow([i, j, v])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DimTable":
        reader = csv.DictReader(io.StringIO(text))
        return cls({(int(r["i"]), int(r["j"])): int(r["dim"]) for r in reader})

    def render_grid(self, marks: Iterable[tuple[int, int]] = ()) -> str:
        """Text grid: ``i`` across (ascending), ``j`` down (descending, odd steps)."""
        if not self._d:
            return "(empty)\n"
        marks = set(marks)
        i_vals = range(min(i for i, _ in self._d), max(i for i, _ in self._d) + 1)
        j_lo = min(j for _, j in self._d)
        j_hi = max(j for _, j in self._d)
        j_vals = range(j_hi, j_lo - 1, -2)
        width = max(3, max(len(str(v)) for v in self._d.values()) + 1, *(len(str(i)) for i in i_vals))
        head = " " * 5 + "|" + "|".join(f"{i:>{width}}" for i in i_vals)
        lines = [head, "=" * len(head)]
        for j in j_vals:
            cells = []
            for i in i_vals:
                v = self._d.get((i, j))
                s = "" if v is None else str(v)
                if (i, j) in marks:
                    s += "*"
                cells.append(f"{s:>{width}}")
            lines.append(f"{j:>4} |" + "|".join(cells))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_grid(cls, text: str) -> "DimTable":
        lines = [l for l in text.splitlines() if l.strip() and not set(l.strip()) <= {"="}]
        header = [h.strip() for h in lines[0].split("|")[1:]]
        i_vals = [int(h) for h in header]
        d = {}
        for line in lines[1:]:
            parts = line.split("|")
            j = int(parts[0])
            for i, cell in zip(i_vals, parts[1:]):
                cell = cell.strip().rstrip("*")
                if cell:
                    d[(i, j)] = int(cell)
        return cls(d)


class _Laurent:
    """Shared machinery: sparse exponent -> integer coefficient maps."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, v in (coeffs.items() if isinstance(coeffs, Mapping) else coeffs):
                if v:
                    c[k] = c.get(k, 0) + v
                    if not c[k]:
                        del c[k]
        self.c = c

    def __eq__(self, other):
        if isinstance(other, int):
            other = type(self).const(other)
        return type(self) is type(other) and self.c == other.c

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self.c.items())))

    def __bool__(self):
        return bool(self.c)

    def __add__(self, other):
        if isinstance(other, int):
            other = type(self).const(other)
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) + v
        return type(self)(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return type(self)({k: v * other for k, v in self.c.items()})
        out: dict = defaultdict(int)
        for k1, v1 in self.c.items():
            for k2, v2 in other.c.items():
                out[self._addexp(k1, k2)] += v1 * v2
        return type(self)(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are only defined for monomials")
        out = type(self).const(1)
        for _ in range(n):
            out = out * self
        return out

    def items(self):
        return sorted(self.c.items())

    def nonnegative(self) -> bool:
        return all(v >= 0 for v in self.c.values())


class Laurent1(_Laurent):
    """Integer Laurent polynomial in one variable (``q`` or ``t``)."""

    var = "q"

    @staticmethod
    def _addexp(a, b):
        return a + b

    @classmethod
    def const(cls, v: int) -> "Laurent1":
        return cls({0: v})

    @classmethod
    def mono(cls, e: int, v: int = 1) -> "Laurent1":
        return cls({e: v})

    def __call__(self, x):
        """Evaluate at a number (Fractions welcome for negative exponents)."""
        from fractions import Fraction

        total = 0
        for e, v in self.c.items():
            total += v * (Fraction(x) ** e)
        return total

    def shift(self, e: int) -> "Laurent1":
        return Laurent1({k + e: v for k, v in self.c.items()})

    def substitute_power(self, m: int) -> "Laurent1":
        """``p(x) -> p(x**m)``."""
        return Laurent1({k * m: v for k, v in self.c.items()})

    def reflect(self) -> "Laurent1":
        return Laurent1({-k: v for k, v in self.c.items()})

    def min_degree(self) -> int:
        return min(self.c)

    def max_degree(self) -> int:
        return max(self.c)

    def span(self) -> int:
        return self.max_degree() - self.min_degree() if self.c else 0

    def __repr__(self) -> str:
        return f"Laurent1({self})"

    def __str__(self) -> str:
        if not self.c:
            return "0"
        terms = []
        for e, v in sorted(self.c.items()):
            mono = "" if e == 0 else (self.var if e == 1 else f"{self.var}^{e}")
            coef = str(abs(v)) if (abs(v) != 1 or not mono) else ""
            sep = "*" if coef and mono else ""
            terms.append(("-" if v < 0 else "+", coef + sep + mono))
        s = "".join(f" {sg} {body}" for sg, body in terms).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


class Laurent2(_Laurent):
    """Integer Laurent polynomial in ``t`` and ``q``; keys are ``(i, j)`` exponent pairs."""

    @staticmethod
    def _addexp(a, b):
        return (a[0] + b[0], a[1] + b[1])

    @classmethod
    def const(cls, v: int) -> "Laurent2":
        return cls({(0, 0): v})

    @classmethod
    def mono(cls, i: int, j: int, v: int = 1) -> "Laurent2":
        return cls({(i, j): v})

    def coeff(self, i: int, j: int) -> int:
        return self.c.get((i, j), 0)

    def to_table(self) -> DimTable:
        if not self.nonnegative():
            raise ValueError("a dimension table needs nonnegative coefficients")
        return DimTable(self.c)

    def __repr__(self) -> str:
        return f"Laurent2({self})"

    def __str__(self) -> str:
        if not self.c:
            return "0"
        out = []
        for (i, j), v in sorted(self.c.items()):
            mono = []
            if i:
                mono.append("t" if i == 1 else f"t^{i}")
            if j:
                mono.append("q" if j == 1 else f"q^{j}")
            body = "*".join(mono)
            coef = str(abs(v)) if (abs(v) != 1 or not body) else ""
            sep = "*" if coef and body else ""
            out.append(("-" if v < 0 else "+", coef + sep + body))
        s = "".join(f" {sg} {b}" for sg, b in out).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def poincare_series(tbl: Mapping[tuple[int, int], int]) -> Laurent2:
    return Laurent2({(i, j): v for (i, j), v in tbl.items()})


def graded_euler(tbl: Mapping[tuple[int, int], int]) -> Laurent1:
    """Sum of ``(-1)^i dim(i, j) q^j``: the unnormalised Jones polynomial."""
    out: dict[int, int] = defaultdict(int)
    for (i, j), v in tbl.items():
        out[j] += v if i % 2 == 0 else -v
    return Laurent1(out)


def mul(a: Laurent2, b: Laurent2) -> Laurent2:
    return a * b
