"""Exact dynamics of two exchange-coupled qubits sharing a coherent cavity field.

Public surface: model construction (:mod:`tcxy.model`), the closed-form
propagator (:mod:`tcxy.analytic`), independent numeric references
(:mod:`tcxy.oracle`), observables (:mod:`tcxy.observables`), and the
trajectory/sweep drivers (:mod:`tcxy.runner`).
"""

__version__ = "0.1.0"

from .analytic import (AnalyticPropagator, BlockCouplings, ManifoldSolution,
                       block_deltas, block_deltas_explicit, evolve_block,
                       evolve_state, solve_manifold)
from .backend import BACKEND_NAME, available_backends
from .cubic import CubicRoots, block_roots, companion_roots
from .errors import (BranchSelectionError, ConfigError, DegenerateRootsError,
                     NumericalDegradationError, OracleIntegrationError,
                     ShapeMismatchError, TcxyError)
from .model import (CoherentField, FrozenSector, ModelParams, QubitInitState,
                    StateVector, coherent_weights, initial_state, preset)
from .observables import (EntanglementResult, TwoQubitDensity, concurrence,
                          concurrence_series, dense_qubits_rdm, eof, inversion,
                          qubits_rdm, single_rdm)
from .oracle import (BlockHamiltonian, EigBlock, StateDiscrepancy,
                     block_hamiltonian, compare_states, eig_block,
                     evolve_block_exact, evolve_state_exact, integrate_block)
from .runner import (RevivalReport, RunConfig, SweepResult, TrajectoryResult,
                     VerifyReport, detect_revival, run_sweep, run_trajectory,
                     verify_grid)

__all__ = [
    "__version__",
    "AnalyticPropagator", "BlockCouplings", "ManifoldSolution",
    "block_deltas", "block_deltas_explicit", "evolve_block", "evolve_state",
    "solve_manifold",
    "BACKEND_NAME", "available_backends",
    "CubicRoots", "block_roots", "companion_roots",
    "BranchSelectionError", "ConfigError", "DegenerateRootsError",
    "NumericalDegradationError", "OracleIntegrationError",
    "ShapeMismatchError", "TcxyError",
    "CoherentField", "FrozenSector", "ModelParams", "QubitInitState",
    "StateVector", "coherent_weights", "initial_state", "preset",
    "EntanglementResult", "TwoQubitDensity", "concurrence",
    "concurrence_series", "dense_qubits_rdm", "eof", "inversion",
    "qubits_rdm", "single_rdm",
    "BlockHamiltonian", "EigBlock", "StateDiscrepancy", "block_hamiltonian",
    "compare_states", "eig_block", "evolve_block_exact", "evolve_state_exact",
    "integrate_block",
    "RevivalReport", "RunConfig", "SweepResult", "TrajectoryResult",
    "VerifyReport", "detect_revival", "run_sweep", "run_trajectory",
    "verify_grid",
]
