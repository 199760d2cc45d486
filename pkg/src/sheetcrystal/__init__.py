"""Charged-sheet electrostatics, its exponential map onto 1D bound states,
closed forms for the alternating crystal, and an independent solver that
cross-checks all of it."""

from .closedform import (
    CrystalParams,
    expectation_kinetic,
    expectation_potential,
    ground_energy,
    identity_abs_sum,
    identity_alternating_exp,
    identity_sinh_parity,
    normalization_constant,
    psi,
    segment_integral_closed,
)
from .duality import (
    DeltaPotentialProblem,
    GroundStateSolution,
    NormalizabilityReport,
    SchrodingerResidualReport,
    check_normalizable,
    ground_state_from_electrostatics,
    schrodinger_residuals,
    to_quantum,
    verify_schrodinger_residual,
)
from .electrostatics import (
    BoundaryField,
    CanonicalCrystal,
    ElectrostaticSolution,
    SheetArray,
    field_at,
    potential_at,
    solve_sheets,
    uniform_field_magnitude,
)
from .errors import (
    AsymmetricAsymptoticFieldError,
    BreakpointMismatchError,
    DivergentTailError,
    NoBoundStatesError,
    NotNormalizableError,
    SheetCrystalError,
)
from .oracle import (
    BoundState,
    BoundStateList,
    ScanMetadata,
    expectation_kinetic_numeric,
    expectation_potential_numeric,
    find_bound_states,
    ground_state,
    norm_squared,
)
from .units import UnitSystem, alpha_from_sigma, atomic_units, sigma_from_alpha
from .wavefunction import PiecewiseExpWavefunction, Segment

__version__ = "0.1.0"

__all__ = [
    "AsymmetricAsymptoticFieldError",
    "BoundState",
    "BoundStateList",
    "BoundaryField",
    "BreakpointMismatchError",
    "CanonicalCrystal",
    "CrystalParams",
    "DeltaPotentialProblem",
    "DivergentTailError",
    "ElectrostaticSolution",
    "GroundStateSolution",
    "NoBoundStatesError",
    "NormalizabilityReport",
    "NotNormalizableError",
    "PiecewiseExpWavefunction",
    "ScanMetadata",
    "SchrodingerResidualReport",
    "Segment",
    "SheetArray",
    "SheetCrystalError",
    "UnitSystem",
    "alpha_from_sigma",
    "atomic_units",
    "check_normalizable",
    "expectation_kinetic",
    "expectation_kinetic_numeric",
    "expectation_potential",
    "expectation_potential_numeric",
    "field_at",
    "find_bound_states",
    "ground_energy",
    "ground_state",
    "ground_state_from_electrostatics",
    "identity_abs_sum",
    "identity_alternating_exp",
    "identity_sinh_parity",
    "norm_squared",
    "normalization_constant",
    "potential_at",
    "psi",
    "schrodinger_residuals",
    "segment_integral_closed",
    "sigma_from_alpha",
    "solve_sheets",
    "to_quantum",
    "uniform_field_magnitude",
    "verify_schrodinger_residual",
]
