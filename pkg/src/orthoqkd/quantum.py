"""Dense state-vector and density-matrix math for small labeled-qubit systems.

Everything is exact double-precision linear algebra over at most four qubits.
States are immutable; gates return new states. Amplitude indexing is
big-endian: the first qubit in a state's qubit order is the most significant
bit of the basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
ORTHO_TOL = 1e-10
PSD_TOL = 1e-10
MAX_QUBITS = 4

# A measurement branch this small signals a bookkeeping bug, not physics:
# callers never collapse onto a branch whose Born probability is zero.
DEGENERATE_BRANCH_NORM = 1e-9


class InternalInvariantError(RuntimeError):
    """A quantity the library guarantees by construction came out wrong."""


class QubitId(Enum):
    """Labels for the tensor-factor slots a state can carry."""

    QUBIT1 = "qubit1"
    QUBIT2 = "qubit2"
    EVE_ANCILLA = "eve_ancilla"
    AUX = "aux"

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over an ordered tuple of labeled qubits.

    ``amplitudes[i]`` is the coefficient of the computational basis state
    whose bits, read from the most significant down, follow ``qubits``.
    Construction validates shape, finiteness, label uniqueness, and
    normalization; the amplitude array is frozen after validation.
    """

    qubits: tuple[QubitId, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        qubits = tuple(self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if not qubits:
            raise ValueError("a state needs at least one qubit")
        if len(qubits) > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits are supported, got {len(qubits)}")
        for q in qubits:
            if qubits.count(q) > 1:
                raise ValueError(f"duplicate qubit label {q.name}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != 2 ** len(qubits):
            raise ValueError(
                f"expected {2 ** len(qubits)} amplitudes for {len(qubits)} qubit(s), "
                f"got shape {amps.shape}"
            )
        if not np.isfinite(amps).all():
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum of |amplitude|^2 = {norm_sq!r}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def position(self, qubit: QubitId) -> int:
        """Tensor-factor position of ``qubit``, or ValueError if absent."""
        try:
            return self.qubits.index(qubit)
        except ValueError:
            raise ValueError(f"unknown qubit label {qubit.name} for state over "
                             f"{tuple(q.name for q in self.qubits)}") from None

    def bit(self, index: int, qubit: QubitId) -> int:
        """Value of ``qubit`` in the computational basis state ``index``."""
        shift = self.num_qubits - 1 - self.position(qubit)
        return (index >> shift) & 1

    def dirac(self, precision: int = 6) -> str:
        """Human-readable ket expansion, e.g. ``0.707107|01> + 0.707107|10>``."""
        terms = []
        for i, amp in enumerate(self.amplitudes):
            if abs(amp) <= 10 ** (-precision - 3):
                continue
            label = format(i, f"0{self.num_qubits}b")
            if abs(amp.imag) <= 10 ** (-precision - 3):
                coeff = f"{amp.real:.{precision}g}"
            else:
                coeff = f"({amp.real:.{precision}g}{amp.imag:+.{precision}g}j)"
            terms.append(f"{coeff}|{label}>")
        return " + ".join(terms) if terms else "0"


def basis_state(qubits: Sequence[QubitId], index: int) -> StateVector:
    """Computational basis state |index> over the given qubits."""
    dim = 2 ** len(qubits)
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {len(qubits)} qubit(s)")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(tuple(qubits), amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, trace-one, positive-semidefinite matrix over labeled qubits."""

    matrix: np.ndarray
    qubits: tuple[QubitId, ...]

    def __post_init__(self) -> None:
        qubits = tuple(self.qubits)
        object.__setattr__(self, "qubits", qubits)
        mat = np.asarray(self.matrix, dtype=complex)
        dim = 2 ** len(qubits)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > NORM_TOL:
            raise ValueError("matrix is not Hermitian")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > NORM_TOL:
            raise ValueError(f"trace must be 1, got {trace!r}")
        if float(np.linalg.eigvalsh(mat).min()) < -PSD_TOL:
            raise ValueError("matrix has a negative eigenvalue beyond tolerance")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """Result bit of a single-qubit measurement plus the collapsed state."""

    result: int
    post_state: StateVector


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Composite state with a's qubits (most significant) followed by b's."""
    for q in b.qubits:
        if q in a.qubits:
            raise ValueError(f"duplicate qubit label {q.name}")
    return StateVector(a.qubits + b.qubits, np.kron(a.amplitudes, b.amplitudes))


def apply_cnot(state: StateVector, control: QubitId, target: QubitId) -> StateVector:
    """Flip ``target`` on every basis index where ``control`` is 1.

    A pure amplitude permutation, so the norm is preserved exactly.
    """
    if control == target:
        raise ValueError("control and target must be different qubits")
    n = state.num_qubits
    cshift = n - 1 - state.position(control)
    tshift = n - 1 - state.position(target)
    indices = np.arange(state.dim)
    permuted = np.where((indices >> cshift) & 1 == 1, indices ^ (1 << tshift), indices)
    out = np.empty_like(state.amplitudes)
    out[permuted] = state.amplitudes
    return StateVector(state.qubits, out)


def measurement_probabilities(state: StateVector, qubit: QubitId) -> tuple[float, float]:
    """Born probabilities (P(0), P(1)) for a computational-basis measurement."""
    shift = state.num_qubits - 1 - state.position(qubit)
    ones = ((np.arange(state.dim) >> shift) & 1).astype(bool)
    weights = np.abs(state.amplitudes) ** 2
    p1 = float(weights[ones].sum())
    p0 = float(weights[~ones].sum())
    if abs(p0 + p1 - 1.0) > NORM_TOL:
        raise InternalInvariantError(f"branch probabilities sum to {p0 + p1!r}, not 1")
    return p0, p1


def collapse_qubit(state: StateVector, qubit: QubitId, result: int,
                   branch_probability: float | None = None) -> StateVector:
    """Project onto the ``result`` branch of ``qubit`` and renormalize.

    The branch probability is computed before the projection, so the
    renormalization never divides by a catastrophically cancelled norm.
    Callers that already hold the Born probabilities may pass the selected
    one in to skip recomputing them.
    """
    if result not in (0, 1):
        raise ValueError(f"measurement result must be 0 or 1, got {result}")
    if branch_probability is None:
        branch_probability = measurement_probabilities(state, qubit)[result]
    if branch_probability < DEGENERATE_BRANCH_NORM ** 2:
        raise InternalInvariantError(
            f"collapse onto a branch of probability {branch_probability!r}; "
            "the sampled outcome should never land here"
        )
    shift = state.num_qubits - 1 - state.position(qubit)
    keep = ((np.arange(state.dim) >> shift) & 1) == result
    post = np.where(keep, state.amplitudes, 0.0) / np.sqrt(branch_probability)
    return StateVector(state.qubits, post)


def measure_qubit(state: StateVector, qubit: QubitId,
                  rng: np.random.Generator) -> MeasurementOutcome:
    """Sample a {|0>, |1>} measurement of ``qubit`` and collapse the state."""
    probs = measurement_probabilities(state, qubit)
    result = 0 if rng.random() < probs[0] else 1
    return MeasurementOutcome(result, collapse_qubit(state, qubit, result, probs[result]))


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b> of two states over identical qubit orders."""
    if a.qubits != b.qubits:
        raise ValueError(
            f"mismatched subsystems: {tuple(q.name for q in a.qubits)} vs "
            f"{tuple(q.name for q in b.qubits)}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _subsystem_matrix(state: StateVector, front: Sequence[QubitId]) -> np.ndarray:
    """Amplitudes reshaped to (2^len(front), rest) with ``front`` qubits leading."""
    n = state.num_qubits
    positions = [state.position(q) for q in front]
    rest = [k for k in range(n) if k not in positions]
    tensor = state.amplitudes.reshape([2] * n)
    tensor = np.moveaxis(tensor, positions + rest, range(n))
    return tensor.reshape(2 ** len(positions), -1)


def project_onto_basis(state: StateVector, basis: Sequence[StateVector]) -> np.ndarray:
    """Outcome distribution of a projective measurement in ``basis``.

    The basis vectors live on a subset of the state's qubits (in the state's
    own order) and must be pairwise orthonormal; the projector acts as the
    identity on any remaining qubits. Returns one probability per basis
    vector; they must account for all of the state's weight, i.e. the basis
    spans the subspace the state occupies.
    """
    if not basis:
        raise ValueError("basis must contain at least one state")
    sub = basis[0].qubits
    for vec in basis:
        if vec.qubits != sub:
            raise ValueError("all basis states must share one qubit order")
    positions = [state.position(q) for q in sub]
    if positions != sorted(positions):
        raise ValueError("basis qubit order must follow the state's qubit order")

    mat = np.stack([vec.amplitudes for vec in basis])
    gram = mat @ mat.conj().T
    mismatch = np.abs(gram - np.eye(len(basis)))
    if mismatch.max() > ORTHO_TOL:
        i, j = np.unravel_index(int(mismatch.argmax()), gram.shape)
        raise ValueError(
            f"basis is not orthonormal: |<b{i}|b{j}> - {int(i == j)}| = {mismatch[i, j]:.3e}"
        )

    components = mat.conj() @ _subsystem_matrix(state, sub)
    probs = (np.abs(components) ** 2).sum(axis=1)
    total = float(probs.sum())
    if abs(total - 1.0) > ORTHO_TOL:
        raise ValueError(
            f"basis does not span the state's support: probabilities sum to {total!r}"
        )
    return probs


def reduced_density(state: StateVector, keep: Iterable[QubitId]) -> DensityMatrix:
    """Partial trace of |state><state| down to the ``keep`` qubits.

    Row/column order follows the state's qubit order restricted to ``keep``.
    """
    keep_set = set(keep)
    kept = tuple(q for q in state.qubits if q in keep_set)
    missing = keep_set - set(state.qubits)
    if missing:
        raise ValueError(f"unknown qubit label {sorted(missing, key=lambda q: q.name)[0].name}")
    if not kept:
        raise ValueError("keep must name at least one qubit")
    if len(kept) == state.num_qubits:
        raise ValueError("keep must be a proper subset of the state's qubits")
    mat = _subsystem_matrix(state, kept)
    return DensityMatrix(mat @ mat.conj().T, kept)


def trace_product(a: DensityMatrix, b: DensityMatrix) -> float:
    """tr(a b), the standard overlap witness for two density matrices.

    Zero exactly when the supports are orthogonal; 1 for identical pure states.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    value = complex(np.trace(a.matrix @ b.matrix))
    if abs(value.imag) > NORM_TOL:
        raise InternalInvariantError(f"tr(ab) has imaginary part {value.imag!r}")
    result = value.real
    if result < -NORM_TOL or result > 1.0 + NORM_TOL:
        raise InternalInvariantError(f"tr(ab) = {result!r} outside [0, 1]")
    return min(result, 1.0)


def fidelity_to(state: StateVector | DensityMatrix, reference: StateVector) -> float:
    """Overlap fidelity with a pure reference state.

    |<reference|state>|^2 for a pure state, <reference|rho|reference> for a
    density matrix. Both arguments must cover the same qubits in the same
    order.
    """
    if isinstance(state, DensityMatrix):
        if state.qubits != reference.qubits:
            raise ValueError(
                f"mismatched subsystems: {tuple(q.name for q in state.qubits)} vs "
                f"{tuple(q.name for q in reference.qubits)}"
            )
        value = complex(reference.amplitudes.conj() @ state.matrix @ reference.amplitudes)
        if abs(value.imag) > NORM_TOL:
            raise InternalInvariantError(f"<ref|rho|ref> has imaginary part {value.imag!r}")
        fid = value.real
    else:
        fid = abs(overlap(reference, state)) ** 2
    if fid < -NORM_TOL or fid > 1.0 + NORM_TOL:
        raise InternalInvariantError(f"fidelity {fid!r} outside [0, 1]")
    return min(max(fid, 0.0), 1.0)
