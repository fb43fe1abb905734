"""Khovanov homology of the right-handed trefoil, three ways."""
from knightmove.grading import graded_euler
from knightmove.jones import kauffman_jones
from knightmove.khcomplex import khovanov_homology
from knightmove.knotio import catalog_get, from_braid
from knightmove.scan import reduced_kh

d = catalog_get("trefoil_r")
print("PD:", d.to_pd())
print("writhe", d.writhe, "n+", d.n_plus, "n-", d.n_minus)

cube = khovanov_homology(d)
print("\nfrom the cube of resolutions:")
print(cube.render_grid())

scanned = reduced_kh(d)
print("\nscan agrees:", scanned == cube)

# the same knot as the closure of s1^3
print("braid closure agrees:", khovanov_homology(from_braid((1, 1, 1), 2)) == cube)

print("\nEuler characteristic:", graded_euler(cube))
print("Kauffman bracket Jones:", kauffman_jones(d))
