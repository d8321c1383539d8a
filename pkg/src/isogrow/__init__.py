"""Discrete isothermic surfaces: growth from curve data, staggered
quantities, Christoffel/Darboux transforms, and convergence measurement."""

from .bjorling import (BjorlingData, CauchyData, builtin_bjorling,
                       derive_cauchy_data, sample_initial_strip)
from .geometry import (PlaneChart, QuadCheckReport, check_quad,
                       complete_conformal_square, cross_ratio, plane_chart)
from .growth import GrowthResult, degeneracy_scan, grow
from .harness import ConvergenceReport, emit_report, run_convergence
from .lattice import (DiscreteSurface, DomainSpec, StaggeredField,
                      elementary_square, shift, slot_of)
from .quantities import (DiscreteQuantities, extract, frame_relation_residuals,
                         gc_residuals, mixed_pair_solve, star, tilde_from_vw,
                         vw_from_tilde)
from .smooth import (GCHistory, GCState, ReconstructedPatch, SmoothSurface,
                     builtin_surface, reconstruct_surface, solve_gc_cauchy)
from .transforms import (christoffel_discrete, christoffel_smooth,
                         darboux_discrete, darboux_smooth)

__version__ = "0.1.0"
