"""Dense statevector engine: the exact oracle for every other module.

States are immutable values over labelled qubits. Bit convention: the first
entry of ``labels`` is the most significant bit of the basis index. All
operations are label-aware; comparisons across modules never rely on raw
index order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ImpossibleOutcomeError, SizeLimitError, UnknownLabelError

DEFAULT_MAX_QUBITS = 20
PROB_FLOOR = 1e-14  # below this a projection is treated as impossible
DEFAULT_SCHMIDT_TOL = 1e-9

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Named single-qubit gates accepted at the public surface.
GATES: dict[str, np.ndarray] = {
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "S_dagger": np.array([[1, 0], [0, -1j]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
}


class PauliBasis(str, Enum):
    Z = "Z"
    X = "X"
    Y = "Y"

    @property
    def eigenvectors(self) -> tuple[np.ndarray, np.ndarray]:
        """(first, second) eigenvector pair; Plus maps to the first."""
        return _EIGENVECTORS[self]


_EIGENVECTORS: dict[PauliBasis, tuple[np.ndarray, np.ndarray]] = {
    PauliBasis.Z: (
        np.array([1, 0], dtype=complex),
        np.array([0, 1], dtype=complex),
    ),
    PauliBasis.X: (
        np.array([1, 1], dtype=complex) * _INV_SQRT2,
        np.array([1, -1], dtype=complex) * _INV_SQRT2,
    ),
    # |+i> = (|0> + i|1>)/sqrt(2), |-i> = (|0> - i|1>)/sqrt(2)
    PauliBasis.Y: (
        np.array([1, 1j], dtype=complex) * _INV_SQRT2,
        np.array([1, -1j], dtype=complex) * _INV_SQRT2,
    ),
}


class Outcome(str, Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def index(self) -> int:
        return 0 if self is Outcome.PLUS else 1

    def flipped(self) -> "Outcome":
        return Outcome.MINUS if self is Outcome.PLUS else Outcome.PLUS


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over an ordered tuple of qubit labels."""

    labels: tuple[int, ...]
    vector: np.ndarray

    def __post_init__(self):
        labels = tuple(int(q) for q in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels: {labels}")
        if any(q < 1 for q in labels):
            raise ValueError(f"qubit labels must be positive integers: {labels}")
        vec = np.asarray(self.vector, dtype=complex).reshape(-1)
        if vec.shape != (2 ** len(labels),):
            raise ValueError(
                f"amplitude vector of length {vec.shape[0]} does not match "
                f"{len(labels)} qubits"
            )
        if not np.all(np.isfinite(vec.view(float))):
            raise ValueError("amplitudes must be finite")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-12")
        vec = vec.copy()
        vec.flags.writeable = False
        object.__setattr__(self, "vector", vec)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def axis_of(self, q: int) -> int:
        try:
            return self.labels.index(q)
        except ValueError:
            raise UnknownLabelError(q) from None

    def amplitude(self, bits: Sequence[int]) -> complex:
        """Amplitude of the computational basis state with the given bits."""
        if len(bits) != self.n_qubits:
            raise ValueError("bit count does not match register size")
        idx = 0
        for b in bits:
            idx = (idx << 1) | (int(b) & 1)
        return complex(self.vector[idx])

    def tensor_view(self) -> np.ndarray:
        return self.vector.reshape([2] * self.n_qubits) if self.n_qubits else self.vector

    def to_debug_json(self) -> dict:
        """Amplitude dump: {"labels": [...], "amplitudes": [[re, im], ...]}."""
        return {
            "labels": list(self.labels),
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.vector],
        }


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending Schmidt coefficients with the rank at a stated tolerance."""

    coefficients: tuple[float, ...]
    rank: int
    tolerance: float


def empty_state() -> PureState:
    """Zero-qubit state: a unit scalar."""
    return PureState((), np.array([1.0], dtype=complex))


def basis_state(labels: Sequence[int], bits: Sequence[int]) -> PureState:
    labels = tuple(labels)
    if len(bits) != len(labels):
        raise ValueError("bit count does not match label count")
    vec = np.zeros(2 ** len(labels), dtype=complex)
    idx = 0
    for b in bits:
        idx = (idx << 1) | (int(b) & 1)
    vec[idx] = 1.0
    return PureState(labels, vec)


def all_plus(labels: Sequence[int]) -> PureState:
    labels = tuple(labels)
    n = len(labels)
    vec = np.full(2 ** n, 2.0 ** (-n / 2.0), dtype=complex)
    return PureState(labels, vec)


def _check_size(n: int, max_qubits: int) -> None:
    if n > max_qubits:
        raise SizeLimitError(n, max_qubits)


def path_cluster(labels: Sequence[int], max_qubits: int = DEFAULT_MAX_QUBITS) -> PureState:
    """Cluster state with edges along consecutive entries of ``labels``.

    Amplitude at bits (x_1..x_n) is 2^(-n/2) * (-1)^(sum x_i x_{i+1}).
    """
    labels = tuple(labels)
    n = len(labels)
    if n < 1:
        raise ValueError("a cluster needs at least one qubit")
    _check_size(n, max_qubits)
    idx = np.arange(2 ** n, dtype=np.int64)
    sign_exp = np.zeros_like(idx)
    for i in range(n - 1):
        sign_exp += ((idx >> (n - 1 - i)) & 1) * ((idx >> (n - 2 - i)) & 1)
    vec = np.where(sign_exp % 2 == 0, 1.0, -1.0).astype(complex) * 2.0 ** (-n / 2.0)
    return PureState(labels, vec)


def build_cluster(n: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> PureState:
    """Linear cluster on qubits 1..n; equals a CZ chain applied to all-plus."""
    if n < 1:
        raise ValueError("cluster size must be at least 1")
    return path_cluster(range(1, n + 1), max_qubits=max_qubits)


def tensor(a: PureState, b: PureState) -> PureState:
    """Tensor product; a's labels stay more significant."""
    if set(a.labels) & set(b.labels):
        raise ValueError("tensor factors share qubit labels")
    return PureState(a.labels + b.labels, np.kron(a.vector, b.vector))


def reorder(state: PureState, new_labels: Sequence[int]) -> PureState:
    """Same state with the register axes permuted into ``new_labels`` order."""
    new_labels = tuple(new_labels)
    if set(new_labels) != set(state.labels) or len(new_labels) != state.n_qubits:
        raise ValueError("reorder must use exactly the existing labels")
    if new_labels == state.labels:
        return state
    perm = [state.axis_of(q) for q in new_labels]
    vec = np.transpose(state.tensor_view(), perm).reshape(-1)
    return PureState(new_labels, vec)


def apply_cz(state: PureState, a: int, b: int) -> PureState:
    """Controlled-phase between labels a and b: negates amplitudes with both bits 1."""
    if a == b:
        raise ValueError("CZ needs two distinct qubits")
    ax_a, ax_b = state.axis_of(a), state.axis_of(b)
    n = state.n_qubits
    idx = np.arange(2 ** n, dtype=np.int64)
    mask = ((idx >> (n - 1 - ax_a)) & (idx >> (n - 1 - ax_b)) & 1).astype(bool)
    vec = state.vector.copy()
    vec[mask] *= -1.0
    return PureState(state.labels, vec)


def apply_local(state: PureState, q: int, gate: str) -> PureState:
    """Apply one of the named single-qubit gates to label q."""
    if gate not in GATES:
        raise ValueError(f"unknown gate {gate!r}; expected one of {sorted(GATES)}")
    return _apply_matrix(state, q, GATES[gate])


def _apply_matrix(state: PureState, q: int, matrix: np.ndarray) -> PureState:
    ax = state.axis_of(q)
    n = state.n_qubits
    tens = np.moveaxis(state.tensor_view(), ax, -1)
    tens = tens @ matrix.T
    vec = np.moveaxis(tens, -1, ax).reshape(-1)
    return PureState(state.labels, vec)


def _project_raw(state: PureState, q: int, basis: PauliBasis, outcome: Outcome) -> np.ndarray:
    """Unnormalized residual tensor after projecting label q onto the eigenvector."""
    ax = state.axis_of(q)
    eig = basis.eigenvectors[outcome.index]
    tens = state.tensor_view()
    psi0 = np.take(tens, 0, axis=ax)
    psi1 = np.take(tens, 1, axis=ax)
    return np.conj(eig[0]) * psi0 + np.conj(eig[1]) * psi1


def outcome_probability(state: PureState, q: int, basis: PauliBasis, outcome: Outcome) -> float:
    """Born-rule probability of the stated outcome for a measurement at q."""
    raw = _project_raw(state, q, basis, outcome)
    p = float(np.real(np.vdot(raw, raw)))
    return min(max(p, 0.0), 1.0)


def project_measure(
    state: PureState, q: int, basis: PauliBasis, outcome: Outcome
) -> tuple[float, PureState]:
    """Project label q onto the outcome and drop it from the register.

    Returns (probability, renormalized residual on the remaining labels).
    The residual of a single-qubit register is the empty state.
    """
    raw = _project_raw(state, q, basis, outcome)
    p = float(np.real(np.vdot(raw, raw)))
    if p < PROB_FLOOR:
        raise ImpossibleOutcomeError(
            f"outcome {outcome.value} in basis {basis.value} at qubit {q} has "
            f"probability {p:.3e} below {PROB_FLOOR}"
        )
    rest = tuple(l for l in state.labels if l != q)
    residual = PureState(rest, (raw / math.sqrt(p)).reshape(-1))
    return min(p, 1.0), residual


def sample_measure(
    state: PureState,
    q: int,
    basis: PauliBasis,
    rng: np.random.Generator | int | None,
) -> tuple[Outcome, float, PureState]:
    """Draw an outcome by the Born rule from a seeded generator, then project."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    p_plus = outcome_probability(state, q, basis, Outcome.PLUS)
    outcome = Outcome.PLUS if rng.random() < p_plus else Outcome.MINUS
    p, residual = project_measure(state, q, basis, outcome)
    return outcome, p, residual


def schmidt_spectrum(
    state: PureState,
    left: Iterable[int],
    tolerance: float = DEFAULT_SCHMIDT_TOL,
) -> SchmidtSpectrum:
    """Schmidt coefficients across the (left | rest) bipartition.

    Eigenvalues are taken from the Gram matrix of the reshaped amplitude
    grid, built on the smaller side.
    """
    left_set = set(left)
    if not left_set or not left_set < set(state.labels):
        raise ValueError("left part must be a nonempty proper subset of the labels")
    left_axes = [i for i, q in enumerate(state.labels) if q in left_set]
    right_axes = [i for i, q in enumerate(state.labels) if q not in left_set]
    grid = np.transpose(state.tensor_view(), left_axes + right_axes).reshape(
        2 ** len(left_axes), 2 ** len(right_axes)
    )
    if grid.shape[0] <= grid.shape[1]:
        gram = grid @ grid.conj().T
    else:
        gram = grid.conj().T @ grid
    lams = np.linalg.eigvalsh(gram)
    lams = np.clip(lams.real, 0.0, None)[::-1]
    rank = int(np.sum(lams > tolerance))
    return SchmidtSpectrum(tuple(float(l) for l in lams), rank, tolerance)


def fidelity_mod_phase(a: PureState, b: PureState) -> float:
    """|<a|b>| with label-aware alignment; insensitive to global phase."""
    if set(a.labels) != set(b.labels):
        raise ValueError(f"label sets differ: {a.labels} vs {b.labels}")
    if b.labels != a.labels:
        b = reorder(b, a.labels)
    return min(1.0, float(abs(np.vdot(a.vector, b.vector))))
