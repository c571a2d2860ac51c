"""Pluggable attacks on the two-phase qubit channel.

Three strategies ship: a null baseline, the ancilla-parity (double-CNOT)
attack that reads the signal's bit parity without disturbing it, and a
naive intercept-resend baseline that is detectable through the errors it
induces. Leakage is quantified exactly by enumerating every measurement
branch; nothing here relies on sampling.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Mapping, Protocol

import math

from .quantum import QubitId, StateVector, basis_state
from .protocol import (
    ENSEMBLE_CABELLO,
    ENSEMBLE_NONMAX,
    ChannelView,
    StateEnsemble,
    enumerate_round_branches,
)

KNOWLEDGE_NONE = "none"
KNOWLEDGE_PARTITION = "partition"
KNOWLEDGE_EXACT = "exact"

ATTACK_NAMES = ("none", "double-cnot", "intercept-resend")


@dataclass(frozen=True)
class EveKnowledge:
    """What Eve claims to have learned about Alice's symbol in one round.

    Either nothing, the exact symbol, or the cell of a partition of the
    symbol alphabet (at least two symbols, fewer than all of them; the
    strict-subset side is checked against the ensemble by the round tests).
    """

    kind: str
    symbols: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", frozenset(self.symbols))
        if self.kind == KNOWLEDGE_NONE:
            if self.symbols:
                raise ValueError("knowledge 'none' carries no symbols")
        elif self.kind == KNOWLEDGE_EXACT:
            if len(self.symbols) != 1:
                raise ValueError("exact knowledge names exactly one symbol")
        elif self.kind == KNOWLEDGE_PARTITION:
            if len(self.symbols) < 2:
                raise ValueError("a partition cell needs at least two symbols")
        else:
            raise ValueError(f"unknown knowledge kind {self.kind!r}")
        if any(s < 0 for s in self.symbols):
            raise ValueError("symbols must be non-negative")

    @classmethod
    def none(cls) -> "EveKnowledge":
        return cls(KNOWLEDGE_NONE, frozenset())

    @classmethod
    def exact(cls, symbol: int) -> "EveKnowledge":
        return cls(KNOWLEDGE_EXACT, frozenset({symbol}))

    @classmethod
    def partition(cls, symbols) -> "EveKnowledge":
        return cls(KNOWLEDGE_PARTITION, frozenset(symbols))

    @property
    def exact_symbol(self) -> int:
        if self.kind != KNOWLEDGE_EXACT:
            raise ValueError("not exact knowledge")
        return next(iter(self.symbols))

    def consistent_with(self, symbol: int) -> bool:
        """True when this claim does not contradict the encoded symbol."""
        if self.kind == KNOWLEDGE_NONE:
            return True
        return symbol in self.symbols

    def label(self) -> str:
        if self.kind == KNOWLEDGE_NONE:
            return "none"
        return f"{self.kind}:" + ",".join(str(s) for s in sorted(self.symbols))


class AttackStrategy(Protocol):
    """Per-phase hooks an eavesdropping strategy implements.

    Strategies hold no per-round state: everything a round needs lives in
    the round's quantum state and branch source, so one instance may serve
    many rounds in parallel.
    """

    name: str

    def prepare_ancilla(self) -> StateVector: ...

    def on_qubit1(self, view: ChannelView, ensemble: StateEnsemble) -> ChannelView: ...

    def on_qubit2(self, view: ChannelView,
                  ensemble: StateEnsemble) -> tuple[ChannelView, EveKnowledge]: ...


def _fresh_ancilla() -> StateVector:
    return basis_state((QubitId.EVE_ANCILLA,), 0)


class NoAttack:
    """Control condition: the channel is untouched and Eve learns nothing."""

    name = "none"

    def prepare_ancilla(self) -> StateVector:
        return _fresh_ancilla()

    def on_qubit1(self, view: ChannelView, ensemble: StateEnsemble) -> ChannelView:
        return view

    def on_qubit2(self, view: ChannelView,
                  ensemble: StateEnsemble) -> tuple[ChannelView, EveKnowledge]:
        return view, EveKnowledge.none()


class DoubleCnotAttack:
    """Parity wiretap: CNOT each flying qubit onto a fresh |0> ancilla.

    After both CNOTs the ancilla holds the XOR of the signal's two bits, so
    reading it partitions the alphabet by parity while leaving every signal
    state exactly intact. For the four-state ensemble the even-parity cell
    {|00>, |11>} is then split for free by a computational measurement of
    qubit 2, which cannot disturb those product states. For the two-state
    ensemble each parity cell is a single symbol, so the ancilla readout
    alone identifies the signal with certainty and zero disturbance.
    """

    name = "double-cnot"

    def prepare_ancilla(self) -> StateVector:
        return _fresh_ancilla()

    def on_qubit1(self, view: ChannelView, ensemble: StateEnsemble) -> ChannelView:
        return view.apply_cnot(QubitId.QUBIT1, QubitId.EVE_ANCILLA)

    def on_qubit2(self, view: ChannelView,
                  ensemble: StateEnsemble) -> tuple[ChannelView, EveKnowledge]:
        view = view.apply_cnot(QubitId.QUBIT2, QubitId.EVE_ANCILLA)
        parity, view = view.measure(QubitId.EVE_ANCILLA)
        if ensemble.kind == ENSEMBLE_NONMAX:
            # parity 1 is the |01>/|10> signal (symbol 0), parity 0 the other
            return view, EveKnowledge.exact(0 if parity == 1 else 1)
        if ensemble.kind == ENSEMBLE_CABELLO:
            if parity == 1:
                return view, EveKnowledge.partition({1, 2})
            bit, view = view.measure(QubitId.QUBIT2)
            return view, EveKnowledge.exact(0 if bit == 0 else 3)
        raise ValueError(f"unsupported ensemble kind {ensemble.kind!r}")


class InterceptResendAttack:
    """Measure both flying qubits in the computational basis and resend.

    The qubit-1 reading is parked in the ancilla (a CNOT copies the
    collapsed classical bit) so the strategy object itself stays stateless
    between phases. Readings 00 and 11 identify their symbols; 10 and 01
    leave a uniform guess between the two superposition symbols.
    """

    name = "intercept-resend"

    def prepare_ancilla(self) -> StateVector:
        return _fresh_ancilla()

    def on_qubit1(self, view: ChannelView, ensemble: StateEnsemble) -> ChannelView:
        if ensemble.kind != ENSEMBLE_CABELLO:
            raise ValueError("intercept-resend is only defined for the cabello ensemble")
        _, view = view.measure(QubitId.QUBIT1)
        return view.apply_cnot(QubitId.QUBIT1, QubitId.EVE_ANCILLA)

    def on_qubit2(self, view: ChannelView,
                  ensemble: StateEnsemble) -> tuple[ChannelView, EveKnowledge]:
        bit1, view = view.measure(QubitId.EVE_ANCILLA)
        bit2, view = view.measure(QubitId.QUBIT2)
        if (bit1, bit2) == (0, 0):
            return view, EveKnowledge.exact(0)
        if (bit1, bit2) == (1, 1):
            return view, EveKnowledge.exact(3)
        return view, EveKnowledge.exact(1 + view.pick((0.5, 0.5)))


def no_attack() -> NoAttack:
    return NoAttack()


def double_cnot_attack() -> DoubleCnotAttack:
    return DoubleCnotAttack()


def intercept_resend_attack() -> InterceptResendAttack:
    return InterceptResendAttack()


def attack_by_name(name: str) -> AttackStrategy:
    """Strategy registry used by the command-line driver."""
    factories = {
        "none": no_attack,
        "double-cnot": double_cnot_attack,
        "intercept-resend": intercept_resend_attack,
    }
    try:
        return factories[name]()
    except KeyError:
        raise ValueError(
            f"unknown attack {name!r}; expected one of {', '.join(ATTACK_NAMES)}"
        ) from None


def mutual_information_bits(joint: Mapping[tuple[Hashable, Hashable], float]) -> float:
    """Plug-in mutual information of a finite joint distribution, in bits.

    Accepts unnormalized weights (e.g. counts); zero-mass cells are skipped.
    """
    total = float(sum(joint.values()))
    if total <= 0:
        raise ValueError("joint distribution has no mass")
    pa: dict[Hashable, float] = defaultdict(float)
    pe: dict[Hashable, float] = defaultdict(float)
    for (a, e), w in joint.items():
        pa[a] += w / total
        pe[e] += w / total
    info = 0.0
    for (a, e), w in joint.items():
        p = w / total
        if p > 0:
            info += p * math.log2(p / (pa[a] * pe[e]))
    return info


def eve_mutual_information(ensemble: StateEnsemble, attack: AttackStrategy) -> float:
    """I(symbol; knowledge) in bits for uniform symbols, computed exactly.

    Every measurement branch of every symbol is enumerated with its exact
    probability; no sampling is involved.
    """
    joint: dict[tuple[int, EveKnowledge], float] = defaultdict(float)
    prior = 1.0 / ensemble.num_symbols
    for symbol in range(ensemble.num_symbols):
        for branch in enumerate_round_branches(ensemble, attack, symbol):
            joint[(symbol, branch.eve_knowledge)] += prior * branch.probability
    return mutual_information_bits(joint)


def perfectly_distinguishes(ensemble: StateEnsemble, attack: AttackStrategy,
                            tol: float = 1e-12) -> bool:
    """True when the attack names every symbol exactly, with certainty and
    without disturbing the delivered state (all branches, fidelity 1)."""
    for symbol in range(ensemble.num_symbols):
        mass = 0.0
        for branch in enumerate_round_branches(ensemble, attack, symbol):
            knowledge = branch.eve_knowledge
            if knowledge.kind != KNOWLEDGE_EXACT or knowledge.exact_symbol != symbol:
                return False
            if branch.bob_fidelity < 1.0 - tol:
                return False
            mass += branch.probability
        if abs(mass - 1.0) > 1e-9:
            return False
    return True
