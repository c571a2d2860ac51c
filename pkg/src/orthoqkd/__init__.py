"""Exact small-system simulator for orthogonal-state quantum key distribution.

Implements the four-state two-qubit protocol that reaches one secret bit per
qubit without a classical channel, the ancilla-parity (double-CNOT)
eavesdropping attack that partitions its alphabet undetected, and an auditor
for the reduced-density-matrix no-cloning criterion for orthogonal entangled
pairs.
"""

from .quantum import (
    DensityMatrix,
    InternalInvariantError,
    MeasurementOutcome,
    QubitId,
    StateVector,
    apply_cnot,
    basis_state,
    collapse_qubit,
    fidelity_to,
    measure_qubit,
    measurement_probabilities,
    overlap,
    project_onto_basis,
    reduced_density,
    tensor_product,
    trace_product,
)
from .protocol import (
    ChannelPhase,
    ChannelView,
    PhaseViolationError,
    RoundBranch,
    RoundTranscript,
    StateEnsemble,
    bob_decode,
    cabello_ensemble,
    encode,
    efficiency,
    enumerate_round_branches,
    nonmax_ensemble,
    run_round,
)
from .eavesdrop import (
    ATTACK_NAMES,
    AttackStrategy,
    EveKnowledge,
    attack_by_name,
    double_cnot_attack,
    eve_mutual_information,
    intercept_resend_attack,
    mutual_information_bits,
    no_attack,
    perfectly_distinguishes,
)
from .mor import MorReport, make_nonmax_pair, mor_check
from .cli import SimulationConfig, SimulationReport, simulate

__version__ = "0.1.0"

__all__ = [
    "ATTACK_NAMES",
    "AttackStrategy",
    "ChannelPhase",
    "ChannelView",
    "DensityMatrix",
    "EveKnowledge",
    "InternalInvariantError",
    "MeasurementOutcome",
    "MorReport",
    "PhaseViolationError",
    "QubitId",
    "RoundBranch",
    "RoundTranscript",
    "SimulationConfig",
    "SimulationReport",
    "StateEnsemble",
    "StateVector",
    "apply_cnot",
    "attack_by_name",
    "basis_state",
    "bob_decode",
    "cabello_ensemble",
    "collapse_qubit",
    "double_cnot_attack",
    "efficiency",
    "encode",
    "enumerate_round_branches",
    "eve_mutual_information",
    "fidelity_to",
    "intercept_resend_attack",
    "make_nonmax_pair",
    "measure_qubit",
    "measurement_probabilities",
    "mor_check",
    "mutual_information_bits",
    "no_attack",
    "nonmax_ensemble",
    "overlap",
    "perfectly_distinguishes",
    "project_onto_basis",
    "reduced_density",
    "run_round",
    "simulate",
    "tensor_product",
    "trace_product",
]
