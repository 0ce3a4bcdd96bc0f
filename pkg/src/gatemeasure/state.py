"""Dense kets and density matrices over labelled qubit registers.

Basis convention is big-endian: the first label in a register is the most
significant bit of the basis index, so on register ``(e, p, q, a)`` the word
``1010`` is index 10.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDensityMatrixError,
    LabelCollisionError,
    NormalizationError,
    UnknownLabelError,
)

ATOL = 1e-12
PSD_ATOL = 1e-10

#: Labels used by the measurement scenarios; registers may use any string.
SCENARIO_LABELS = ("e", "p", "q", "a", "e1", "e2", "p1", "p2", "q1", "q2", "a1", "a2")


@dataclass(frozen=True)
class QubitLabel:
    name: str
    position: int


def _check_register(register: Sequence[str]) -> tuple[str, ...]:
    register = tuple(register)
    if len(set(register)) != len(register):
        seen = [r for r in register if register.count(r) > 1]
        raise LabelCollisionError(f"duplicate qubit labels: {sorted(set(seen))}")
    return register


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def basis_permutation(src: Sequence[str], dst: Sequence[str]) -> np.ndarray:
    """Index map ``P`` with ``vec_dst = vec_src[P]`` for the same qubits reordered."""
    src, dst = tuple(src), tuple(dst)
    if sorted(src) != sorted(dst):
        raise UnknownLabelError(f"registers {src} and {dst} hold different qubits")
    n = len(src)
    axes = [src.index(label) for label in dst]
    idx = np.arange(2**n).reshape((2,) * n) if n else np.arange(1)
    return idx.transpose(axes).reshape(-1)


@dataclass(frozen=True)
class Ket:
    """Amplitude vector on an ordered register of named qubits.

    ``normalized=False`` marks an intermediate that is allowed to have a norm
    other than one; otherwise the norm is checked on construction.
    """

    register: tuple[str, ...]
    amplitudes: np.ndarray = field(repr=False)
    normalized: bool = True

    def __post_init__(self):
        register = _check_register(self.register)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape[0] != 2 ** len(register):
            raise DimensionMismatchError(
                f"{amps.shape[0]} amplitudes for a {len(register)}-qubit register"
            )
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm() - 1.0) > ATOL:
            raise NormalizationError(f"ket flagged normalized has norm {self.norm()!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.register)

    @property
    def labels(self) -> tuple[QubitLabel, ...]:
        return tuple(QubitLabel(name, i) for i, name in enumerate(self.register))

    def position(self, label: str) -> int:
        try:
            return self.register.index(label)
        except ValueError:
            raise UnknownLabelError(f"{label!r} not in register {self.register}") from None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "Ket") -> complex:
        """``<self|other>``; registers must match in order."""
        if self.register != other.register:
            raise DimensionMismatchError(f"{self.register} vs {other.register}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def amplitude(self, word: str) -> complex:
        if len(word) != self.n_qubits:
            raise DimensionMismatchError(f"word {word!r} for {self.n_qubits} qubits")
        return complex(self.amplitudes[int(word, 2)])

    def reorder(self, register: Sequence[str]) -> "Ket":
        perm = basis_permutation(self.register, register)
        return Ket(tuple(register), self.amplitudes[perm], self.normalized)

    def allclose(self, other: "Ket", atol: float = ATOL) -> bool:
        if self.register != other.register:
            other = other.reorder(self.register)
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes), initial=0.0) <= atol)

    def __repr__(self):
        terms = [
            f"({a.real:+.6g}{a.imag:+.6g}j)|{i:0{self.n_qubits}b}>"
            for i, a in enumerate(self.amplitudes)
            if abs(a) > ATOL
        ]
        return f"Ket[{','.join(self.register)}]({' '.join(terms) or '0'})"


def basis_ket(register: Sequence[str], word: str | int) -> Ket:
    register = tuple(register)
    index = int(word, 2) if isinstance(word, str) else int(word)
    if not 0 <= index < 2 ** len(register):
        raise DimensionMismatchError(f"basis word {word!r} out of range")
    amps = np.zeros(2 ** len(register), dtype=complex)
    amps[index] = 1.0
    return Ket(register, amps)


def qubit(label: str, alpha: complex, beta: complex) -> Ket:
    """Single-qubit ket ``alpha|0> + beta|1>``."""
    return Ket((label,), [alpha, beta])


def tensor(*kets: Ket) -> Ket:
    """Kronecker product; earlier kets occupy the more significant bits."""
    if not kets:
        raise ValueError("tensor() needs at least one ket")

    def pair(lhs: Ket, rhs: Ket) -> Ket:
        clash = set(lhs.register) & set(rhs.register)
        if clash:
            raise LabelCollisionError(f"labels on both sides: {sorted(clash)}")
        return Ket(
            lhs.register + rhs.register,
            np.kron(lhs.amplitudes, rhs.amplitudes),
            lhs.normalized and rhs.normalized,
        )

    return reduce(pair, kets)


def as_matrix(op) -> np.ndarray:
    """Dense matrix of a complex operator or of anything exposing ``matrix()``."""
    if hasattr(op, "matrix"):
        return op.matrix()
    return np.asarray(op, dtype=complex)


def apply(op, state: Ket) -> Ket:
    """Apply a permutation gate or a dense operator to ``state``.

    The result is flagged normalized when its norm is one within ``ATOL``,
    so non-unitary operators yield explicitly unnormalized kets.
    """
    dim = 2**state.n_qubits
    perm = getattr(op, "permutation", None)
    if perm is not None:
        perm = np.asarray(perm)
        if perm.shape[0] != dim:
            raise DimensionMismatchError(f"gate of size {perm.shape[0]} on dimension {dim}")
        out = np.empty_like(state.amplitudes)
        out[perm] = state.amplitudes
    else:
        mat = as_matrix(op)
        if mat.shape != (dim, dim):
            raise DimensionMismatchError(f"operator {mat.shape} on dimension {dim}")
        out = mat @ state.amplitudes
    return Ket(state.register, out, abs(np.linalg.norm(out) - 1.0) <= ATOL)


def expand_operator(op, targets: Sequence[str], register: Sequence[str]) -> np.ndarray:
    """Embed an operator on ``targets`` into the full ``register`` (identity elsewhere)."""
    targets, register = tuple(targets), _check_register(register)
    _check_register(targets)
    missing = set(targets) - set(register)
    if missing:
        raise UnknownLabelError(f"labels not in register: {sorted(missing)}")
    mat = as_matrix(op)
    if mat.shape != (2 ** len(targets),) * 2:
        raise DimensionMismatchError(f"operator {mat.shape} on {len(targets)} qubits")
    rest = tuple(r for r in register if r not in targets)
    full = np.kron(mat, np.eye(2 ** len(rest), dtype=complex))
    perm = basis_permutation(targets + rest, register)
    return full[np.ix_(perm, perm)]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one, positive semidefinite matrix on a register."""

    register: tuple[str, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        register = _check_register(self.register)
        mat = _frozen(self.matrix)
        dim = 2 ** len(register)
        if mat.shape != (dim, dim):
            raise DimensionMismatchError(f"matrix {mat.shape} for {len(register)} qubits")
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "matrix", mat)
        if np.max(np.abs(mat - mat.conj().T)) > ATOL:
            raise InvalidDensityMatrixError("matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > ATOL:
            raise InvalidDensityMatrixError(f"trace is {np.trace(mat)!r}")
        if np.linalg.eigvalsh(mat).min() < -PSD_ATOL:
            raise InvalidDensityMatrixError("matrix has a negative eigenvalue")

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityMatrix":
        return cls(ket.register, np.outer(ket.amplitudes, ket.amplitudes.conj()))

    def allclose(self, other, atol: float = ATOL) -> bool:
        other = other.matrix if isinstance(other, DensityMatrix) else np.asarray(other)
        return bool(np.max(np.abs(self.matrix - other)) <= atol)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def partial_trace(state: Ket | DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Reduced density matrix on ``keep``, ordered as in the original register."""
    keep = set(keep)
    if not keep:
        raise UnknownLabelError("keep set is empty")
    unknown = keep - set(state.register)
    if unknown:
        raise UnknownLabelError(f"labels not in register: {sorted(unknown)}")
    kept = tuple(r for r in state.register if r in keep)
    traced = tuple(r for r in state.register if r not in keep)
    k, n = len(kept), len(state.register)

    if isinstance(state, Ket):
        psi = state.amplitudes[basis_permutation(state.register, kept + traced)]
        psi = psi.reshape(2**k, 2 ** (n - k))
        rho = psi @ psi.conj().T
    else:
        perm = basis_permutation(state.register, kept + traced)
        full = state.matrix[np.ix_(perm, perm)].reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
        rho = np.einsum("ajbj->ab", full)
    return DensityMatrix(kept, rho)
