"""Geometric bounds on variances and recentered moments of measures on compact sets."""

from ._kernel import available_kernels, kernel_name
from .bounds import (AtomicMeasure, DualityReport, EqualityCase, bd_1d,
                     bhatia_davis_bound, duality_gap, equality_case,
                     max_variance, mean, popoviciu, primal_lp_value,
                     read_measure_json, variance, write_measure_json,
                     zero_mean_dual_center)
from .conjugate import (biconjugate_at, conjugate_at, phi,
                        translated_biconjugate_zero)
from .errors import (DegenerateSupportError, DomainError, GeoMomentError,
                     NoConvergenceError, ParseError)
from .genvar import (GenVarResult, RadialCost, SaddleReport, chebyshev_level,
                     generalized_variance, sup_genvar, verify_saddle)
from .geometry import (Ball, PointCloud, Shape, SimplexSpec, circumball,
                       diameter, jung_radius, meb_support, min_enclosing_ball,
                       read_cloud_csv, regular_simplex, shape_sample,
                       write_cloud_csv)
from .isodiametric import (JungReport, SearchConfig, SearchResult,
                           TensionReport, isodiametric_bound, jung_verify,
                           search_max, simplex_maximizer, tension_check,
                           verify_simplex_optimality)
from .lp import LpProblem, LpSolution, LpStatus, hull_membership, solve_lp

__version__ = "0.1.0"
