"""Hilbert metric dynamics on bounded convex domains.

Distances, nonexpansive self-maps, drift invariants, horofunction
certificates and limit-set reports for orbits of semicontractions.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import (ConvexBody, Ellipsoid, ExposedPoint, HPolytope, Intersection, Location,  # noqa: F401
                       PolytopeFace, StandardSimplex, boundary_point, chord, contains, face_contains,
                       minimal_face, sample_interior, segment_in_boundary)
from .metric import (HALF, ONE, MetricConvention, gromov_product, hilbert_distance,  # noqa: F401
                     hilbert_distances, poincare_distance, simplex_distance, simplex_distances)
from .maps import (Composition, Identity, KleinProjective, ProjectiveLinear, Semicontraction,  # noqa: F401
                   Topical, affine_contraction, banach_fixed_point, barycentric_diagonal,
                   beardon_approximant, birkhoff_coefficient, birkhoff_diameter, certify_nonexpansive,
                   klein_boost, rotation_2d)
from .dynamics import (DriftEstimates, Orbit, StopReason, classify_orbit, drift_estimates,  # noqa: F401
                       gv_gap, is_monotone_escape, iterate, minimal_displacement_search, tau_bounds)
from .horo import (HorofunctionApproximant, busemann_along, geodesic_ray, horoball_contains,  # noqa: F401
                   karlsson_certificate, poincare_busemann, poincare_phi, select_records)
from .conjecture import (ConjectureReport, LimitSetReport, ReportConfig, attractor_face,  # noqa: F401
                         conjecture_report, limit_set, report_to_dict, star_witness)
