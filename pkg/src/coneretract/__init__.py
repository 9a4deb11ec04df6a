"""Mutually polar retraction pairs, cone projections and cone-lattice operations.

Polyhedral cones are held in both representations (:mod:`.cones`); pairs of
mutually polar retractions are built by the planar, transversal and
one-range constructions (:mod:`.retractions`); metric projection lives in
:mod:`.moreau`, simplicial-cone lattice operations in :mod:`.lattice`, and
the property checkers and witness searches in :mod:`.analysis`.
"""

from .config import ToleranceConfig
from .errors import (
    BudgetExhausted,
    ConeRetractError,
    DegeneratePlane,
    HypothesisNotMet,
    NotTransversal2D,
)
from .geometry import Plane2D, plane_coords, plane_through, solve2x2
from .cones import (
    PolyhedralCone,
    PolytopeInHyperplane,
    SectorCone2D,
    TransversalCertificate,
    basis_on_hyperplane,
    contains,
    hrep_to_vrep,
    intersect_with_plane,
    is_transversal,
    polar,
    vrep_to_hrep,
)
from .retractions import (
    MapPair,
    OneRangeRetraction,
    RetractionPair2D,
    TransversalRetractionPair,
    build_2d,
    build_one_range,
    build_transversal,
    eval_2d,
    eval_transversal,
    gauge_eval,
)
from .moreau import CircularCone, MoreauDecomposition, decompose, project_circular, project_polyhedral
from .lattice import SimplicialCone, positive_part_pair
from .analysis import (
    PropertyReport,
    SampleSpec,
    check_asymmetric_norm,
    check_generator_continuity,
    check_isotone,
    check_kernel_identity,
    check_mutual_polarity,
    check_retraction_axioms,
    check_subadditive,
    find_halo_witness,
    find_mprj_witness,
)

__version__ = "0.1.0"
