"""
A retraction pair in the plane
==============================

Two opposite quarter-planes M = cone{e1, e2} and N = cone{u1, u2} split the
plane into four sectors. Points of M and N are projected onto themselves;
points in the mixed sectors are split along the edges that bound them.
"""

import numpy as np

from coneretract import SectorCone2D, build_2d, eval_2d
from coneretract import svg

M = SectorCone2D.from_vectors([1, 1], [-1, 1])
N = SectorCone2D.from_vectors([-1, -1], [1, -1])
pair = build_2d(M, N)

# x = (2, 0) lies between u2 and e1, so Qx is a multiple of e1 and Rx of u2
for x in ([2.0, 0.0], [0.5, 3.0], [-1.0, -4.0], [-3.0, 0.5]):
    q, r = eval_2d(pair, np.array(x))
    print(f"x = {x}  Qx = {np.round(q, 6)}  Rx = {np.round(r, 6)}")

# the pair is mutually polar: Q + R = I and each kills the other's range
rng = np.random.default_rng(0)
worst = 0.0
for x in rng.standard_normal((1000, 2)):
    q, r = eval_2d(pair, x)
    worst = max(worst, np.linalg.norm(q + r - x), np.linalg.norm(pair.Q(r)), np.linalg.norm(pair.R(q)))
print("largest polarity residual over 1000 points:", worst)

# shrink N to a single ray: three sectors remain
ray_pair = build_2d(M, SectorCone2D.from_vectors([0, -1]))
print("with N a ray, Q(1, -2) =", eval_2d(ray_pair, np.array([1.0, -2.0]))[0])

with open("planar_pair.svg", "w") as fh:
    fh.write(svg.render(pair, grid=9, title="quarter planes"))
print("wrote planar_pair.svg")
