"""Lee spectral sequence pages for a few knots, and where they stop."""
from knightmove.knotio import catalog_get
from knightmove.lee import lee

for name in ("trefoil_r", "figure8", "8_19", "10_132"):
    res = lee(catalog_get(name))
    diffs = res.pages.nonzero_differentials()
    print(f"{name}: s = {res.s}, nonzero differentials {diffs}")
    for l, poly in sorted(res.decomposition.f.items()):
        print(f"    f_{2 * l} = {poly}")

print()
print(lee(catalog_get("figure8")).pages.render())
