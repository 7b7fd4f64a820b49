"""Relativistic hydrodynamics with the ultra-relativistic equation of state.

Exact Riemann solver with tangential velocities, an HLL finite-volume code
and a convergence harness comparing the two.
"""

from .core import (
    ConservedState,
    EosParams,
    PrimitiveState,
    UnphysicalStateError,
    cons_to_prim,
    eigenvalues,
    flux,
    prim_to_cons,
    sound_speed,
)
from .exact import RiemannSolution, RiemannState, VacuumError, sample, sample_profile, solve
from .fv import Grid, SchemeConfig, compute_dt, evolve, hll_flux, minmod
from .harness import ErrorRow, TestSpec, convergence_sweep, l1_error, shock_tube_spec

__version__ = "0.1.0"
