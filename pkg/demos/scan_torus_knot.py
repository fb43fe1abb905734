"""Scan a 24-crossing torus knot and watch the complex stay small."""
import logging
import time

from knightmove.grading import graded_euler
from knightmove.jones import kauffman_jones
from knightmove.knotio import from_braid
from knightmove.scan import scan

logging.basicConfig(level=logging.INFO, format="%(message)s")

d = from_braid([1, 2, 3, 4] * 6, 5)  # T(5, 6)
t0 = time.perf_counter()
pc = scan(d)
kh = pc.homology()
print(f"\n{d.n} crossings, peak {pc.peak_objects} objects, {time.perf_counter() - t0:.1f} s")
print(kh.render_grid())
print("Euler characteristic matches Jones:", graded_euler(kh) == kauffman_jones(d))
