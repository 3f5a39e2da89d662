"""Partial-wave scattering and photoabsorption toolkit for central model potentials."""

from .potential import (
    EffectiveCurve,
    HardSphere,
    PotentialSpec,
    SquareWell,
    Tabulated,
    Yukawa,
    Zero,
    classical_turning_point,
    effective_curve,
    eval_potential,
)
from .radial import (
    BoundState,
    RadialGrid,
    RadialSolution,
    find_bound_states,
    integrate_regular,
)
from .scattering import (
    CrossSection,
    PhaseShiftCurve,
    SMatrixPoint,
    cross_section,
    phase_scan,
    phase_shift,
    s_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BoundState",
    "CrossSection",
    "EffectiveCurve",
    "HardSphere",
    "PhaseShiftCurve",
    "PotentialSpec",
    "RadialGrid",
    "RadialSolution",
    "SMatrixPoint",
    "SquareWell",
    "Tabulated",
    "Yukawa",
    "Zero",
    "classical_turning_point",
    "cross_section",
    "effective_curve",
    "eval_potential",
    "find_bound_states",
    "integrate_regular",
    "phase_scan",
    "phase_shift",
    "s_matrix",
]
