"""Measurement scenarios assembled from gates, kets and branched states.

Register orders are fixed: ``(p, q)`` for the bare pointer model,
``(e, p, q, a)`` for the single-qubit gate model and
``(e1, e2, p1, p2, q1, q2, a1, a2)`` for the two-qubit singlet model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .branched import (
    BranchedState,
    JointDistribution,
    assignment_bits,
    psi_e,
    psi_e1e2,
)
from .errors import ConfigError, NormalizationError, SingularScalingError
from .gates import (
    MEASUREMENT_REGISTER,
    PermutationGate,
    gate_tensor,
    measurement_gate,
    permute_wires,
    von_neumann_gate,
)
from .state import (
    ATOL,
    DensityMatrix,
    Ket,
    apply,
    basis_ket,
    expand_operator,
    partial_trace,
    qubit,
    tensor,
)

REGISTER_4 = MEASUREMENT_REGISTER
REGISTER_8 = ("e1", "e2", "p1", "p2", "q1", "q2", "a1", "a2")
GAMMA = ("gamma",)
GAMMA_PAIR = ("gamma1", "gamma2")


@dataclass(frozen=True)
class Preparation1Q:
    """Pre-measurement state ``alpha|0> + beta|1>``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm2 - 1.0) > ATOL:
            raise NormalizationError(f"|alpha|^2 + |beta|^2 = {norm2!r}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Preparation1Q":
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z /= np.linalg.norm(z)
        return cls(z[0], z[1])

    def ket(self, label: str = "q") -> Ket:
        return qubit(label, self.alpha, self.beta)

    def gamma_distribution(self) -> JointDistribution:
        """Born-rule distribution of the outcome variable."""
        return JointDistribution(GAMMA, {(0,): abs(self.alpha) ** 2, (1,): abs(self.beta) ** 2})


@dataclass(frozen=True)
class SingletPreparation:
    phi: float

    def ket(self, labels: tuple[str, str] = ("q1", "q2")) -> Ket:
        return singlet(self.phi, labels)


@dataclass(frozen=True)
class ContinuousParams:
    """Dimensionless phase ``s = omega * t`` in ``[0, pi/2]``."""

    s: float

    def __post_init__(self):
        s = float(self.s)
        if not 0.0 <= s <= math.pi / 2:
            raise ConfigError(f"phase s={s!r} outside [0, pi/2]")
        object.__setattr__(self, "s", s)


def _params(params: ContinuousParams | float) -> ContinuousParams:
    return params if isinstance(params, ContinuousParams) else ContinuousParams(params)


def _resolve_gate(completion: str | PermutationGate) -> PermutationGate:
    if isinstance(completion, PermutationGate):
        return completion
    return measurement_gate(completion)


def transition_1(prep: Preparation1Q) -> Ket:
    """Bare pointer coupling on ``(p, q)``."""
    return apply(von_neumann_gate(), tensor(basis_ket(("p",), 0), prep.ket("q")))


def input_4(prep: Preparation1Q) -> BranchedState:
    rest = tensor(basis_ket(("p",), 0), prep.ket("q"), basis_ket(("a",), 0))
    return psi_e(prep.gamma_distribution()).map(lambda e: tensor(e, rest))


def transition_4(
    prep: Preparation1Q, completion: str | PermutationGate = "e-block"
) -> BranchedState:
    """Measurement gate applied branch-wise to the outcome-constrained input.

    ``completion`` names a completion strategy of the partial truth table or
    supplies an already completed gate.
    """
    gate = _resolve_gate(completion)
    return input_4(prep).map(lambda k: apply(gate, k))


def input_5(prep: Preparation1Q) -> Ket:
    return tensor(prep.ket("e"), basis_ket(("p",), 0), prep.ket("q"), basis_ket(("a",), 0))


def transition_5(prep: Preparation1Q, completion: str | PermutationGate = "e-block") -> Ket:
    """Same gate with ``e`` prepared like ``q`` instead of constrained."""
    return apply(_resolve_gate(completion), input_5(prep))


def scaling_operator_S(prep: Preparation1Q, gamma: int) -> np.ndarray:
    """2x2 operator on ``e`` for one branch value of the outcome variable.

    For ``gamma=0`` it is ``|0><0| / alpha``, for ``gamma=1`` it is
    ``|1><1| / beta``.
    """
    op = np.zeros((2, 2), dtype=complex)
    if gamma == 0:
        if prep.alpha == 0:
            raise SingularScalingError("alpha = 0 on the active branch gamma=0")
        op[0, 0] = 1.0 / prep.alpha
    elif gamma == 1:
        if prep.beta == 0:
            raise SingularScalingError("beta = 0 on the active branch gamma=1")
        op[1, 1] = 1.0 / prep.beta
    else:
        raise ConfigError(f"gamma must be 0 or 1, got {gamma!r}")
    return op


def scaling_operator_full(prep: Preparation1Q, gamma: int) -> np.ndarray:
    """``S ⊗ I`` on the ``(e, p, q, a)`` register."""
    return expand_operator(scaling_operator_S(prep, gamma), ("e",), REGISTER_4)


def apply_S(prep: Preparation1Q, gamma: int, ket: Ket) -> Ket:
    return apply(expand_operator(scaling_operator_S(prep, gamma), ("e",), ket.register), ket)


def continuous_state(prep: Preparation1Q, params: ContinuousParams | float) -> BranchedState:
    """Interpolating ket family; ``s=0`` is the gate input, ``s=pi/2`` its output."""
    s = _params(params).s
    a, b = prep.alpha, prep.beta
    c, sn = math.cos(s), math.sin(s)

    def pqa(terms: dict[str, complex]) -> np.ndarray:
        amps = np.zeros(8, dtype=complex)
        for word, amp in terms.items():
            amps[int(word, 2)] += amp
        return amps

    zero = pqa({"000": a, "010": b * c, "001": b * sn})
    one = pqa({"000": a * c, "010": b * c, "110": a * sn, "111": b * sn})
    branches = {
        (0,): Ket(REGISTER_4, np.concatenate([zero, np.zeros(8)])),
        (1,): Ket(REGISTER_4, np.concatenate([np.zeros(8), one])),
    }
    return BranchedState(prep.gamma_distribution(), branches)


def rho_q_t(prep: Preparation1Q, params: ContinuousParams | float, gamma: int) -> DensityMatrix:
    """Reduced state of ``q`` on one branch of the continuous model, in closed form."""
    s = _params(params).s
    a, b = prep.alpha, prep.beta
    c2, s2, c = math.cos(s) ** 2, math.sin(s) ** 2, math.cos(s)
    if gamma == 0:
        mat = [
            [abs(a) ** 2 + abs(b) ** 2 * s2, a * b.conjugate() * c],
            [a.conjugate() * b * c, abs(b) ** 2 * c2],
        ]
    elif gamma == 1:
        mat = [
            [abs(a) ** 2 * c2, a * b.conjugate() * c2],
            [a.conjugate() * b * c2, abs(b) ** 2 * c2 + s2],
        ]
    else:
        raise ConfigError(f"gamma must be 0 or 1, got {gamma!r}")
    return DensityMatrix(("q",), mat)


def rho_q_traced(prep: Preparation1Q, params: ContinuousParams | float, gamma: int) -> DensityMatrix:
    """Same quantity as :func:`rho_q_t`, by tracing ``e, p, a`` out of the branch ket."""
    return partial_trace(continuous_state(prep, params).branches[(gamma,)], {"q"})


def singlet(phi: float, labels: tuple[str, str] = ("q1", "q2")) -> Ket:
    """Singlet with one measurement reference rotated by ``phi``."""
    sn, c = math.sin(phi), math.cos(phi)
    return Ket(tuple(labels), np.array([-sn, c, -c, -sn]) / math.sqrt(2))


def joint_distribution_10(phi: float) -> JointDistribution:
    same = math.sin(phi) ** 2 / 2
    diff = math.cos(phi) ** 2 / 2
    return JointDistribution(
        GAMMA_PAIR, {(0, 0): same, (0, 1): diff, (1, 0): diff, (1, 1): same}
    )


@lru_cache(maxsize=None)
def eight_qubit_gate(completion: str = "e-block") -> PermutationGate:
    """Two independent measurement gates, rewired onto :data:`REGISTER_8`."""
    g = measurement_gate(completion)
    paired = ("e1", "p1", "q1", "a1", "e2", "p2", "q2", "a2")
    return permute_wires(gate_tensor(g, g), paired, REGISTER_8)


def input_11(phi: float) -> BranchedState:
    rest = tensor(
        basis_ket(("p1", "p2"), 0),
        singlet(phi, ("q1", "q2")),
        basis_ket(("a1", "a2"), 0),
    )
    return psi_e1e2(joint_distribution_10(phi)).map(lambda e: tensor(e, rest))


def transition_11(phi: float, completion: str = "e-block") -> BranchedState:
    gate = eight_qubit_gate(completion)
    return input_11(phi).map(lambda k: apply(gate, k))


def _pairs(values) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values).reshape(-1)]


def ket_to_dict(ket: Ket) -> dict:
    return {"register": list(ket.register), "amplitudes": _pairs(ket.amplitudes)}


def density_to_dict(rho: DensityMatrix) -> dict:
    return {"register": list(rho.register), "matrix": [_pairs(row) for row in rho.matrix]}


def scenario_to_dict(state: BranchedState, reduce_to: tuple[str, ...] | None = None) -> dict:
    """JSON-ready description of a branched state, optionally with reduced blocks."""
    branches = []
    for a, ket in state.branches.items():
        entry = {
            "assignment": assignment_bits(a),
            "probability": state.dist.prob(a),
            "amplitudes": _pairs(ket.amplitudes),
        }
        if reduce_to:
            entry["reduced"] = density_to_dict(partial_trace(ket, reduce_to))
        branches.append(entry)
    return {
        "register": list(state.register),
        "distribution": state.dist.to_json_dict(),
        "branches": branches,
    }
