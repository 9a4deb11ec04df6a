"""
One-range retractions
=====================

When N is a single ray {t u}, R x = q(x) u with q an asymmetric norm built
from the gauge of a cross-section of M. In R^3 the same pair also comes out
of the slice-by-slice transversal construction, and the two agree.
"""

import numpy as np

from coneretract import PolyhedralCone, build_one_range, build_transversal, is_transversal
from coneretract.analysis import SampleSpec, check_kernel_identity, check_subadditive

# cone over a square, N = the downward vertical ray
M = PolyhedralCone(generators=[[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]])
r = build_one_range(M, [0, 0, -1])

x = np.array([0.5, -0.2, -1.0])
print("q(x) =", r.q(x), " Qx =", r.Q(x), " Rx =", r.R(x))
print("q(u) =", r.q(r.u))

# cross-check against the transversal construction
N = PolyhedralCone.ray([0, 0, -1])
tr = build_transversal(M, N, is_transversal(M, N))
X = np.random.default_rng(1).standard_normal((500, 3))
print("max |Q_one - Q_transversal|:", max(np.abs(r.Q(v) - tr.Q(v)).max() for v in X))

spec = SampleSpec(3, n=5000)
print(check_kernel_identity(r.q, r.u, spec).summary_line())
print(check_subadditive(r.Q, r.range_Q, spec, name="subadditive_Q").summary_line())
print(check_subadditive(r.R, r.range_R, spec, name="subadditive_R").summary_line())
