"""Restricted normal cones, CQ-numbers and linear convergence of alternating projections."""

__version__ = "0.1.0"

from .cones import (
    ConeSampleSet,
    closed_form_cone,
    cone_membership,
    prox_normal_samples,
    restricted_normal_samples,
    superset_samples,
)
from .cq import (
    NEG_INF,
    CqReport,
    cq_condition_holds,
    cq_number,
    delta_for_epsilon,
    exact_cq_number,
    exact_cq_subspaces,
    exact_cq_two_lines,
    exact_cq_two_spheres,
    joint_cq_number,
    limiting_cq_number,
)
from .linalg import OrthonormalBasis, angles, orthonormalize, subspace_intersection
from .map_engine import (
    ConvergenceCertificate,
    GeoBoundParams,
    MapTrace,
    certificate_verify,
    contraction_step_check,
    estimate_rate,
    gap_monotonicity_check,
    geo_bound_verify,
    issue_certificate,
    run_map,
)
from .regularity import RegularityVerdict, joint_regularity_check, regularity_check, sphere_delta, superregularity_scan
from .restrictors import RestrictorChoice
from .sampling import SamplingConfig
from .sets import SetDescriptor, from_dict
