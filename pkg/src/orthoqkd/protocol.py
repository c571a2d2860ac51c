"""Round machinery for the orthogonal-two-qubit-state key protocol.

Alice encodes a symbol into one of the ensemble's orthogonal two-qubit
states and sends the qubits one at a time: an adversary never holds both
flying qubits at once. The timing model is structural, not audited: during
each transmission phase the attack only receives a view of the qubits it may
legally touch.

A round can run two ways. :func:`run_round` samples measurement outcomes
from a random stream; :func:`enumerate_round_branches` explores every
measurement branch with its exact Born probability, for closed-form checks
that need no sampling at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .quantum import (
    QubitId,
    StateVector,
    apply_cnot,
    collapse_qubit,
    fidelity_to,
    measurement_probabilities,
    project_onto_basis,
    reduced_density,
    tensor_product,
)

if TYPE_CHECKING:
    from .eavesdrop import AttackStrategy, EveKnowledge

ENSEMBLE_CABELLO = "cabello"
ENSEMBLE_NONMAX = "nonmax"

# Strict inequalities on the non-maximally-entangled angles are enforced
# with this slack; exact float equality would be meaningless.
ANGLE_SLACK = 1e-9

# Probability below which an enumeration branch is dropped as unreachable.
BRANCH_EPS = 1e-12

_CHANNEL_QUBITS = (QubitId.QUBIT1, QubitId.QUBIT2)


class ChannelPhase(Enum):
    """Progression of one round; qubit 2 is only exposed after qubit 1 lands."""

    QUBIT1_IN_FLIGHT = "qubit1-in-flight"
    QUBIT1_DELIVERED = "qubit1-delivered"
    QUBIT2_IN_FLIGHT = "qubit2-in-flight"
    BOTH_DELIVERED = "both-delivered"


class PhaseViolationError(ValueError):
    """An attack touched a qubit outside its current phase's view."""


@dataclass(frozen=True, eq=False)
class StateEnsemble:
    """The public signal alphabet: a tuple of orthogonal two-qubit states."""

    kind: str
    states: tuple[StateVector, ...]
    alpha: float | None = None
    beta: float | None = None

    @property
    def num_symbols(self) -> int:
        return len(self.states)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(len(self.states)))


def cabello_ensemble() -> StateEnsemble:
    """The four orthogonal signal states spanning the full two-qubit space.

    Symbol 0 is |00>, symbol 3 is |11>, and symbols 1 and 2 are the
    symmetric and antisymmetric superpositions of |10> and |01>.
    """
    s = 1.0 / np.sqrt(2.0)
    rows = [
        [1, 0, 0, 0],
        [0, s, s, 0],
        [0, -s, s, 0],
        [0, 0, 0, 1],
    ]
    states = tuple(StateVector(_CHANNEL_QUBITS, np.array(row, dtype=complex)) for row in rows)
    return StateEnsemble(ENSEMBLE_CABELLO, states)


def nonmax_ensemble(alpha: float, beta: float) -> StateEnsemble:
    """Two orthogonal non-maximally entangled signal states.

    Symbol 0 is cos(alpha)|01> + sin(alpha)|10>; symbol 1 is
    cos(beta)|00> + sin(beta)|11>. Both angles must lie strictly inside
    (0, pi/2), differ from each other, and differ from pi/4 (where the
    states would be maximally entangled); each strict inequality carries
    slack ANGLE_SLACK.
    """
    for name, angle in (("alpha", alpha), ("beta", beta)):
        if not np.isfinite(angle):
            raise ValueError(f"{name} must be a finite angle in radians")
        if angle < ANGLE_SLACK:
            raise ValueError(f"violated inequality: 0 < {name} (got {angle!r})")
        if angle > np.pi / 2 - ANGLE_SLACK:
            raise ValueError(f"violated inequality: {name} < pi/2 (got {angle!r})")
        if abs(angle - np.pi / 4) < ANGLE_SLACK:
            raise ValueError(f"violated inequality: {name} != pi/4 (got {angle!r})")
    if abs(alpha - beta) < ANGLE_SLACK:
        raise ValueError(f"violated inequality: alpha != beta (both {alpha!r})")
    psi = np.zeros(4, dtype=complex)
    psi[1] = np.cos(alpha)
    psi[2] = np.sin(alpha)
    phi = np.zeros(4, dtype=complex)
    phi[0] = np.cos(beta)
    phi[3] = np.sin(beta)
    states = (StateVector(_CHANNEL_QUBITS, psi), StateVector(_CHANNEL_QUBITS, phi))
    return StateEnsemble(ENSEMBLE_NONMAX, states, alpha=alpha, beta=beta)


def encode(ensemble: StateEnsemble, symbol: int) -> StateVector:
    """Alice's signal state for ``symbol``."""
    if not isinstance(symbol, (int, np.integer)) or isinstance(symbol, bool):
        raise ValueError(f"symbol must be an integer, got {symbol!r}")
    if not 0 <= symbol < ensemble.num_symbols:
        raise ValueError(
            f"symbol {symbol} out of range for the {ensemble.kind} ensemble "
            f"(0..{ensemble.num_symbols - 1})"
        )
    return ensemble.states[symbol]


class SampledOutcomes:
    """Branch chooser backed by a random stream: one uniform draw per pick."""

    def __init__(self, rng: np.random.Generator):
        self._rng = rng

    def pick(self, weights: Sequence[float]) -> int:
        total = float(sum(weights))
        u = self._rng.random() * total
        acc = 0.0
        for k, w in enumerate(weights):
            acc += w
            if u < acc:
                return k
        return len(weights) - 1


class ScriptExhausted(Exception):
    """A scripted run needs one more choice than the script provides."""

    def __init__(self, num_options: int):
        super().__init__(f"script exhausted with {num_options} options pending")
        self.num_options = num_options


class DeadBranch(Exception):
    """The scripted choice has (numerically) zero probability."""


class ScriptedOutcomes:
    """Branch chooser that forces a fixed outcome sequence.

    Accumulates the exact probability of the forced path; raising
    ScriptExhausted when the script runs out lets a driver grow the script
    breadth-first until every reachable branch has been walked.
    """

    def __init__(self, script: Sequence[int]):
        self._script = tuple(script)
        self._cursor = 0
        self.probability = 1.0

    def pick(self, weights: Sequence[float]) -> int:
        if self._cursor == len(self._script):
            raise ScriptExhausted(len(weights))
        k = self._script[self._cursor]
        self._cursor += 1
        p = float(weights[k]) / float(sum(weights))
        if p <= BRANCH_EPS:
            raise DeadBranch
        self.probability *= p
        return k


class ChannelView:
    """Restricted handle on the global state during one channel phase.

    Only the qubits the phase exposes may be operated on; anything else
    raises PhaseViolationError naming the phase. Views are immutable: every
    operation returns a fresh view sharing the same phase and branch source.
    """

    def __init__(self, state: StateVector, allowed: frozenset[QubitId],
                 phase: ChannelPhase, source) -> None:
        self._state = state
        self._allowed = allowed
        self._phase = phase
        self._source = source

    @property
    def phase(self) -> ChannelPhase:
        return self._phase

    def _check_access(self, *qubits: QubitId) -> None:
        for q in qubits:
            if q not in self._allowed:
                raise PhaseViolationError(
                    f"{q.name} is not accessible during phase {self._phase.value}"
                )

    def apply_cnot(self, control: QubitId, target: QubitId) -> "ChannelView":
        self._check_access(control, target)
        return ChannelView(apply_cnot(self._state, control, target),
                           self._allowed, self._phase, self._source)

    def measure(self, qubit: QubitId) -> tuple[int, "ChannelView"]:
        """Computational-basis measurement of a visible qubit."""
        self._check_access(qubit)
        probs = measurement_probabilities(self._state, qubit)
        result = self._source.pick(probs)
        post = collapse_qubit(self._state, qubit, result, probs[result])
        return result, ChannelView(post, self._allowed, self._phase, self._source)

    def pick(self, weights: Sequence[float]) -> int:
        """Classical randomness drawn from the round's branch source."""
        return self._source.pick(weights)


@dataclass(frozen=True, eq=False)
class RoundTranscript:
    """Everything observable about one protocol round."""

    alice_symbol: int
    bob_symbol: int
    eve_knowledge: "EveKnowledge"
    bob_fidelity: float
    qubits_used: int
    classical_bits_used: int


@dataclass(frozen=True, eq=False)
class RoundBranch:
    """One measurement branch of a round, with its exact probability."""

    probability: float
    eve_knowledge: "EveKnowledge"
    delivered: StateVector
    bob_fidelity: float
    decode_probs: tuple[float, ...]


def _run_attack_phases(ensemble: StateEnsemble, attack: "AttackStrategy",
                       symbol: int, source) -> tuple[StateVector, "EveKnowledge"]:
    """Drive the two transmission phases and return (global state, knowledge)."""
    state = tensor_product(encode(ensemble, symbol), attack.prepare_ancilla())
    view = ChannelView(state, frozenset({QubitId.QUBIT1, QubitId.EVE_ANCILLA}),
                       ChannelPhase.QUBIT1_IN_FLIGHT, source)
    view = attack.on_qubit1(view, ensemble)
    view = ChannelView(view._state, frozenset({QubitId.QUBIT2, QubitId.EVE_ANCILLA}),
                       ChannelPhase.QUBIT2_IN_FLIGHT, source)
    view, knowledge = attack.on_qubit2(view, ensemble)
    return view._state, knowledge


def bob_decode(received: StateVector, ensemble: StateEnsemble,
               rng: np.random.Generator) -> int:
    """Bob's projective measurement in the ensemble basis.

    ``received`` may still carry an ancilla; the projectors act as the
    identity there, which reproduces what Bob physically sees.
    """
    probs = project_onto_basis(received, ensemble.states)
    return SampledOutcomes(rng).pick(probs)


def run_round(ensemble: StateEnsemble, attack: "AttackStrategy", symbol: int,
              rng: np.random.Generator) -> RoundTranscript:
    """One full protocol round with sampled measurement outcomes."""
    delivered, knowledge = _run_attack_phases(ensemble, attack, symbol,
                                              SampledOutcomes(rng))
    encoded = ensemble.states[symbol]
    received = reduced_density(delivered, _CHANNEL_QUBITS)
    fid = fidelity_to(received, encoded)
    bob_symbol = bob_decode(delivered, ensemble, rng)
    return RoundTranscript(alice_symbol=symbol, bob_symbol=bob_symbol,
                           eve_knowledge=knowledge, bob_fidelity=fid,
                           qubits_used=2, classical_bits_used=0)


def enumerate_round_branches(ensemble: StateEnsemble, attack: "AttackStrategy",
                             symbol: int) -> list[RoundBranch]:
    """All reachable measurement branches of a round, exactly weighted.

    Re-runs the attack under growing forced-outcome scripts until every
    script completes, pruning branches of zero probability. Bob's decode
    distribution is computed analytically per branch, never sampled.
    """
    encoded = ensemble.states[symbol]
    branches: list[RoundBranch] = []
    pending: list[tuple[int, ...]] = [()]
    while pending:
        script = pending.pop()
        source = ScriptedOutcomes(script)
        try:
            delivered, knowledge = _run_attack_phases(ensemble, attack, symbol, source)
        except ScriptExhausted as stop:
            pending.extend(script + (k,) for k in range(stop.num_options))
            continue
        except DeadBranch:
            continue
        received = reduced_density(delivered, _CHANNEL_QUBITS)
        fid = fidelity_to(received, encoded)
        decode_probs = tuple(float(p) for p in project_onto_basis(delivered, ensemble.states))
        branches.append(RoundBranch(probability=source.probability,
                                    eve_knowledge=knowledge, delivered=delivered,
                                    bob_fidelity=fid, decode_probs=decode_probs))
    return branches


def efficiency(secret_bits: float, qubits: int, classical_bits: int) -> float:
    """Secret bits delivered per channel use: b_s / (q_t + b_t)."""
    for name, count in (("secret_bits", secret_bits), ("qubits", qubits),
                        ("classical_bits", classical_bits)):
        if count < 0:
            raise ValueError(f"{name} must be non-negative, got {count!r}")
    denominator = qubits + classical_bits
    if denominator <= 0:
        raise ValueError("qubits + classical_bits must be positive")
    return secret_bits / denominator
