"""Stochastic Boolean variables and the kets they parametrize.

A :class:`BranchedState` keeps one ket per full assignment of its Boolean
variables together with the joint distribution of those variables. Picking
an assignment (``substitute``) turns the a-priori description into the
report of one outcome; averaging (``average_over_gammas``) gives the usual
density matrix and forgets that the branches are mutually exclusive.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AssignmentError,
    DistributionError,
    ZeroProbabilityConditionError,
)
from .state import ATOL, DensityMatrix, Ket, basis_ket, partial_trace

Assignment = tuple[int, ...]


def all_assignments(n_vars: int) -> list[Assignment]:
    return list(itertools.product((0, 1), repeat=n_vars))


def assignment_bits(assignment: Assignment) -> str:
    return "".join(str(b) for b in assignment)


def _check_vars(vars_: Sequence[str]) -> tuple[str, ...]:
    vars_ = tuple(vars_)
    if len(set(vars_)) != len(vars_):
        raise DistributionError(f"duplicate variable names in {vars_}")
    return vars_


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities over all assignments of Boolean variables ``vars``.

    Assignments are tuples of 0/1 in the order of ``vars``; assignments not
    listed in ``probs`` get probability zero.
    """

    vars: tuple[str, ...]
    probs: Mapping[Assignment, float]

    def __post_init__(self):
        vars_ = _check_vars(self.vars)
        full = {a: 0.0 for a in all_assignments(len(vars_))}
        for a, p in dict(self.probs).items():
            a = tuple(int(b) for b in a)
            if a not in full:
                raise DistributionError(f"assignment {a} does not match variables {vars_}")
            if not np.isfinite(p) or p < 0:
                raise DistributionError(f"invalid probability {p!r} for {a}")
            full[a] = float(p)
        total = sum(full.values())
        if abs(total - 1.0) > ATOL:
            raise DistributionError(f"probabilities sum to {total!r}")
        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "probs", MappingProxyType(full))

    @classmethod
    def point_mass(cls, vars_: Sequence[str], assignment: Assignment) -> "JointDistribution":
        return cls(tuple(vars_), {tuple(assignment): 1.0})

    def assignments(self) -> list[Assignment]:
        return list(self.probs)

    def prob(self, assignment: Assignment) -> float:
        return self.probs[tuple(assignment)]

    def probability(self, event: Mapping[str, int]) -> float:
        """Marginal probability that every variable in ``event`` takes its value."""
        idx = self._indices(event)
        return float(
            sum(p for a, p in self.probs.items() if all(a[i] == v for i, v in idx))
        )

    def conditional(self, event: Mapping[str, int], given: Mapping[str, int]) -> float:
        """``P(event | given)``; conditioning on a null event raises."""
        denom = self.probability(given)
        if denom <= 0.0:
            raise ZeroProbabilityConditionError(f"P({dict(given)}) = 0")
        clash = {k for k in event if k in given and event[k] != given[k]}
        if clash:
            return 0.0
        return self.probability({**given, **event}) / denom

    def _indices(self, event: Mapping[str, int]) -> list[tuple[int, int]]:
        out = []
        for name, value in event.items():
            if name not in self.vars:
                raise DistributionError(f"unknown variable {name!r}")
            if value not in (0, 1):
                raise DistributionError(f"{name} must be 0 or 1, got {value!r}")
            out.append((self.vars.index(name), value))
        return out

    def cdf(self) -> np.ndarray:
        return np.cumsum([self.probs[a] for a in self.assignments()])

    def to_json_dict(self) -> dict:
        return {
            "vars": list(self.vars),
            "probs": {assignment_bits(a): p for a, p in self.probs.items()},
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "JointDistribution":
        vars_ = tuple(data["vars"])
        probs = {}
        for bits, p in data["probs"].items():
            if len(bits) != len(vars_):
                raise DistributionError(f"assignment {bits!r} for {len(vars_)} variables")
            probs[tuple(int(b) for b in bits)] = p
        return cls(vars_, probs)


def marginal(dist: JointDistribution, event: Mapping[str, int]) -> float:
    return dist.probability(event)


def conditional(
    dist: JointDistribution, event: Mapping[str, int], given: Mapping[str, int]
) -> float:
    return dist.conditional(event, given)


def assignment_indices(dist: JointDistribution, uniforms: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to indices into ``dist.assignments()`` by inversion.

    Zero-probability assignments are never selected.
    """
    cdf = dist.cdf()
    idx = np.searchsorted(cdf, uniforms, side="right")
    # cdf[-1] may fall a few ulps short of 1; fold overflow into the last
    # assignment that actually carries probability.
    probs = np.array([dist.probs[a] for a in dist.assignments()])
    last = int(np.flatnonzero(probs > 0)[-1])
    return np.minimum(idx, last)


def sample(dist: JointDistribution, rng: np.random.Generator) -> Assignment:
    """Draw one full assignment from ``dist`` using the caller's stream."""
    i = assignment_indices(dist, np.array([rng.random()]))[0]
    return dist.assignments()[i]


@dataclass(frozen=True)
class BranchedState:
    """One unit ket per assignment plus the distribution over assignments."""

    dist: JointDistribution
    branches: Mapping[Assignment, Ket] = field(repr=False)

    def __post_init__(self):
        branches = {tuple(a): k for a, k in dict(self.branches).items()}
        expected = set(self.dist.assignments())
        if set(branches) != expected:
            raise AssignmentError(
                f"branches {sorted(branches)} do not cover assignments {sorted(expected)}"
            )
        registers = {k.register for k in branches.values()}
        if len(registers) != 1:
            raise AssignmentError(f"branches live on different registers: {registers}")
        for a, k in branches.items():
            if abs(k.norm() - 1.0) > ATOL:
                raise AssignmentError(f"branch {a} has norm {k.norm()!r}")
        ordered = {a: branches[a] for a in self.dist.assignments()}
        object.__setattr__(self, "branches", MappingProxyType(ordered))

    @property
    def vars(self) -> tuple[str, ...]:
        return self.dist.vars

    @property
    def register(self) -> tuple[str, ...]:
        return next(iter(self.branches.values())).register

    def active(self) -> list[Assignment]:
        """Assignments with nonzero probability."""
        return [a for a in self.dist.assignments() if self.dist.prob(a) > 0]

    def map(self, fn: Callable[[Ket], Ket]) -> "BranchedState":
        return BranchedState(self.dist, {a: fn(k) for a, k in self.branches.items()})

    def map_branches(self, fn: Callable[[Assignment, Ket], Ket]) -> "BranchedState":
        return BranchedState(self.dist, {a: fn(a, k) for a, k in self.branches.items()})


def _coerce_assignment(vars_: tuple[str, ...], assignment) -> Assignment:
    if isinstance(assignment, Mapping):
        missing = set(vars_) - set(assignment)
        extra = set(assignment) - set(vars_)
        if missing or extra:
            raise AssignmentError(f"assignment keys {sorted(assignment)} vs variables {vars_}")
        assignment = tuple(assignment[v] for v in vars_)
    assignment = tuple(int(b) for b in assignment)
    if len(assignment) != len(vars_) or any(b not in (0, 1) for b in assignment):
        raise AssignmentError(f"assignment {assignment} does not cover variables {vars_}")
    return assignment


def substitute(s: BranchedState, assignment) -> Ket:
    """The ket selected by a full assignment (tuple in ``vars`` order, or dict)."""
    return s.branches[_coerce_assignment(s.vars, assignment)]


def average_over_gammas(s: BranchedState, keep: Iterable[str]) -> DensityMatrix:
    keep = list(keep)
    total = None
    register = None
    for a, ket in s.branches.items():
        p = s.dist.prob(a)
        if p == 0.0:
            continue
        rho = partial_trace(ket, keep)
        register = rho.register
        total = p * rho.matrix if total is None else total + p * rho.matrix
    return DensityMatrix(register, total)


def psi_e(dist: JointDistribution, label: str = "e", phase: float = 0.0) -> BranchedState:
    """Branch value ``x`` carries ``|x>`` on ``label``; ``phase`` multiplies the 1-branch."""
    if len(dist.vars) != 1:
        raise DistributionError(f"psi_e needs one variable, got {dist.vars}")
    one = basis_ket((label,), 1)
    if phase:
        one = Ket(one.register, one.amplitudes * np.exp(1j * phase))
    return BranchedState(dist, {(0,): basis_ket((label,), 0), (1,): one})


def psi_e1e2(dist: JointDistribution, labels: tuple[str, str] = ("e1", "e2")) -> BranchedState:
    if len(dist.vars) != 2:
        raise DistributionError(f"psi_e1e2 needs two variables, got {dist.vars}")
    return BranchedState(
        dist, {(x, y): basis_ket(labels, f"{x}{y}") for x, y in all_assignments(2)}
    )
