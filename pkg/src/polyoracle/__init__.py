"""Polytope membership and ray shooting through nearest-neighbour search.

The anchor point of a polytope together with its reflections across every
facet hyperplane forms a site set whose Voronoi cell around the anchor is
the polytope itself, so membership becomes "is the anchor a nearest site"
and ray shooting becomes a short walk over facet hyperplanes.
"""

from .ann import ExactIndex, LshIndex, Neighbor, build_exact, build_lsh, lsh_defaults, query_exact, query_lsh
from .datagen import GenSpec, Variant, brute_ray_shoot, gen_polytope, hit_and_run, make_outside
from .errors import (DegenerateError, DimensionError, FileFormatError, InfeasibleError,
                     NotInteriorError, NumericalError, ParameterError, PolyOracleError,
                     UnboundedError)
from .fileio import read_points, read_polytope, read_rays, write_points, write_polytope, write_rays
from .geom import (Box, HPolytope, Hyperplane, Membership, Ray, membership_direct,
                   project_onto_hyperplane, ray_box_exit, ray_hyperplane_intersect,
                   reflect_across_hyperplane, slack)
from .lp import ChebyshevBall, LPOutcome, LPStatus, bounding_box, chebyshev_center, solve_lp
from .oracle import (BoundaryResult, BoundaryStatus, OracleConfig, approx_boundary,
                     approx_membership, epsilon_prime, exact_boundary, exact_membership)
from .sites import SiteSet, anchor_from_chebyshev, build_sites

__version__ = "0.1.0"
