"""Audit the transcribed 38-crossing table without recomputing it.

The table alone, with s = 0, shows that the knight-move decomposition fails
and that a d_2 differential has to be nonzero.
"""
from pathlib import Path

from knightmove.audit import (
    audit_report,
    fox_milnor,
    higher_diff_certificate,
    knight_move_solve,
    max_knight_matching,
)
from knightmove.grading import DimTable, Laurent1

table = DimTable.from_json((Path(__file__).parent.parent / "tests" / "data" / "table1.json").read_text())
print(table.render_grid())
print("total rank", table.total(), "in", len(table), "cells")

rep = knight_move_solve(table, 0)
print("\nknight move:", rep.verdict, "witness", rep.witness)
print(rep.reason)

print("left after a maximum d_1 matching:", dict(max_knight_matching(table, 0).items()))
for c in higher_diff_certificate(table, 0):
    print(f"forced: d_{c.n} from {c.source} to {c.target}")

delta = Laurent1({-1: -3, 0: 7, 1: -3})
print("\nFox-Milnor on -3/t + 7 - 3t:", fox_milnor(delta).status)

print()
print(audit_report(table, 0, name="K")["summary"])
