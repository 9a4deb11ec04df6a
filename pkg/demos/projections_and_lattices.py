"""
Projections, lattices and a counterexample
==========================================

The metric projection onto a cone and onto its polar add up to the
identity. On the orthant the pair is also subadditive and isotone; on an
ice-cream cone it is not, and the witness search finds a pair of points
showing it. The positive part of a simplicial cone is the lattice version of
the same story.
"""

import math

import numpy as np

from coneretract import PolyhedralCone
from coneretract.analysis import SampleSpec, find_halo_witness, find_mprj_witness
from coneretract.lattice import SimplicialCone
from coneretract.moreau import CircularCone, decompose

K = PolyhedralCone(generators=[[1, 0, 0], [1, 1, 0], [0, 1, 1], [0, 0, 1]])
dec = decompose(K, [0.3, -2.0, 1.0])
print("p =", dec.p.round(6), " q =", dec.q.round(6), " <p,q> =", dec.inner)

print(find_mprj_witness(PolyhedralCone.orthant(3), SampleSpec(3), max_pairs=5000).summary_line())
rep = find_mprj_witness(CircularCone([0, 0, 1], math.pi / 4), SampleSpec(3), max_pairs=20_000)
print(rep.summary_line())
print("witness:", rep.witness["check"], [np.round(v, 4) for v in rep.witness["inputs"]],
      "residual", rep.witness["residual"])

S = SimplicialCone(np.array([[1.0, 0.5], [0.0, 1.0]]))
x = np.array([1.0, -1.0])
print("x+ =", S.positive_part(x), " x- =", S.negative_part(x), " |x| =", S.abs(x))

# a cone over a square is not simplicial, so its mutually polar pair
# cannot be subadditive
square = PolyhedralCone(generators=[[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]])
print(find_halo_witness(square, SampleSpec(3), max_pairs=20_000).summary_line())
