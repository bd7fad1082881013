"""Steady-sliding frictional contact on the elastic half-plane."""

__version__ = "0.1.0"

from .carleman import (AccuracyError, carleman_residual, flat_punch_explicit,
                       solve_nonhomogeneous, t0, t0_exponents,
                       t0_weighted_integral, tau)
from .contact import (ContactError, ContactSolution, IndentorShape,
                      PhysicalParams, SolverOptions, gamma_coupling,
                      lewy_stampacchia_check, po_pa_roundtrip,
                      reduce_physical, solve_convex,
                      solve_convex_interval_oracle, solve_flat, tau_bar)
from .grids import QuadGrid, SampledField
from .homogenize import (HomogReport, PeriodProfile, effective_coefficient,
                         effective_physical, homogenize_convex,
                         homogenize_flat, oscillate)
from .profiles import FrictionProfile, ProfileError
from .singular import hilbert_line

__all__ = [
    "AccuracyError", "ContactError", "ContactSolution", "FrictionProfile",
    "HomogReport", "IndentorShape", "PeriodProfile", "PhysicalParams",
    "ProfileError", "QuadGrid", "SampledField", "SolverOptions",
    "carleman_residual", "effective_coefficient", "effective_physical",
    "flat_punch_explicit", "gamma_coupling", "hilbert_line",
    "homogenize_convex", "homogenize_flat", "lewy_stampacchia_check",
    "oscillate", "po_pa_roundtrip", "reduce_physical",
    "solve_convex", "solve_convex_interval_oracle", "solve_flat",
    "solve_nonhomogeneous", "t0", "t0_exponents", "t0_weighted_integral",
    "tau", "tau_bar",
]
