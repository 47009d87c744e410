"""Charge-qubit quantum-dot simulator for dynamical, geometric and
topological two-qubit phase gates."""

__version__ = "0.1.0"

from .analysis import (GateReport, QubitEncoding, TargetGate, compare_to_target, entangling_phase,
                       gate_report, project_computational)
from .errors import (AdiabaticityError, ArgumentError, DegenerateError, DegenerateGateError,
                     DegenerateGeometryError, NumericalContractError, QDotError)
from .evolution import PulseSchedule, Segment, propagator, run_schedule
from .fock import FockBasis, enumerate_basis, hopping_matrix, number_matrix
from .hamiltonian import (CoulombPair, DotArraySpec, Link, LinkActivation, build_hamiltonian,
                          gauge_transform, loop_flux, wrap_phase)
from .protocols import (Deformation, TriangleScenario, blockade_leakage, build_triangle_schedule,
                        dynamical_gate_scenario, timing_robustness_sweep, triangle_ab_scenario)
from .trap import (FieldSpec, TrapModel, Trajectory, ab_phase, adiabatic_trajectory,
                   enclosed_area, equilibrium_displacement, geometric_gate_report, winding_number)
