"""Quantum-logic-gate model of measurement on dense state vectors."""
from .branched import (
    BranchedState,
    JointDistribution,
    average_over_gammas,
    conditional,
    marginal,
    psi_e,
    psi_e1e2,
    sample,
    substitute,
)
from .gates import (
    PermutationGate,
    TruthTable,
    complete_reversible,
    measurement_gate,
    table_I,
    to_gate,
    von_neumann_gate,
)
from .harness import ExperimentConfig, FrequencyReport, emit_report, run_trials
from .models import (
    ContinuousParams,
    Preparation1Q,
    SingletPreparation,
    continuous_state,
    joint_distribution_10,
    rho_q_t,
    scaling_operator_S,
    singlet,
    transition_1,
    transition_4,
    transition_5,
    transition_11,
)
from .state import DensityMatrix, Ket, QubitLabel, apply, basis_ket, partial_trace, tensor

__version__ = "0.1.0"
