"""Partial truth tables, reversible completion and permutation gates."""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import CompletionError, DimensionMismatchError, TruthTableError
from .state import basis_permutation

MEASUREMENT_REGISTER = ("e", "p", "q", "a")
VON_NEUMANN_REGISTER = ("p", "q")

COMPLETIONS = ("e-block", "plain")


def bit_at(word: int, position: int, width: int) -> int:
    """Bit of ``word`` at register ``position`` (0 is the most significant)."""
    return (word >> (width - 1 - position)) & 1


def format_word(word: int, width: int) -> str:
    return format(word, f"0{width}b") if width else ""


@dataclass(frozen=True)
class TruthTable:
    """Injective, possibly partial, map between ``width``-bit words."""

    width: int
    rows: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.width < 0:
            raise TruthTableError(f"negative width {self.width}")
        size = 2**self.width
        rows = {int(k): int(v) for k, v in dict(self.rows).items()}
        for k, v in rows.items():
            if not (0 <= k < size and 0 <= v < size):
                raise TruthTableError(f"row {k} -> {v} outside {self.width}-bit words")
        if len(set(rows.values())) != len(rows):
            raise TruthTableError("table is not injective")
        object.__setattr__(self, "rows", MappingProxyType(dict(sorted(rows.items()))))

    @classmethod
    def from_bits(cls, width: int, rows: Mapping[str, str]) -> "TruthTable":
        return cls(width, {int(k, 2): int(v, 2) for k, v in rows.items()})

    @property
    def is_total(self) -> bool:
        return len(self.rows) == 2**self.width

    def lookup(self, word: str | int) -> str | None:
        """Output word for ``word``, or ``None`` when the row is unspecified."""
        key = int(word, 2) if isinstance(word, str) else word
        out = self.rows.get(key)
        return None if out is None else format_word(out, self.width)

    def to_text(self) -> str:
        lines = [f"width: {self.width}"]
        lines += [
            f"{format_word(k, self.width)} -> {format_word(v, self.width)}"
            for k, v in self.rows.items()
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TruthTable":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("width:"):
            raise TruthTableError("missing 'width: n' header")
        width = int(lines[0].split(":", 1)[1])
        rows = {}
        for ln in lines[1:]:
            src, sep, dst = ln.partition("->")
            src, dst = src.strip(), dst.strip()
            if not sep or len(src) != width or len(dst) != width:
                raise TruthTableError(f"malformed row {ln!r}")
            if int(src, 2) in rows:
                raise TruthTableError(f"duplicate input {src}")
            rows[int(src, 2)] = int(dst, 2)
        return cls(width, rows)


def table_I() -> TruthTable:
    """The four specified rows of the measurement gate, bit order ``e p q a``."""
    return TruthTable.from_bits(
        4,
        {
            "0000": "0000",
            "0010": "0001",
            "1000": "1110",
            "1010": "1111",
        },
    )


def complete_reversible(t: TruthTable, preserve_bit: int | None = None) -> TruthTable:
    """Extend ``t`` to a bijection by matching unused inputs to unused outputs.

    Both lists are walked in ascending order. With ``preserve_bit`` the
    matching is done separately inside each value-block of that bit, so the
    completed gate never flips it.
    """
    size = 2**t.width
    if preserve_bit is None:
        blocks = {0: range(size)}

        def key(w):
            return 0

    else:
        if not 0 <= preserve_bit < t.width:
            raise CompletionError(f"bit position {preserve_bit} outside width {t.width}")
        for k, v in t.rows.items():
            if bit_at(k, preserve_bit, t.width) != bit_at(v, preserve_bit, t.width):
                raise CompletionError(
                    f"row {format_word(k, t.width)} -> {format_word(v, t.width)} "
                    f"flips bit {preserve_bit}"
                )

        def key(w):
            return bit_at(w, preserve_bit, t.width)

        blocks = {b: [w for w in range(size) if key(w) == b] for b in (0, 1)}

    used_out = set(t.rows.values())
    rows = dict(t.rows)
    for b, words in blocks.items():
        free_in = [w for w in words if w not in t.rows]
        free_out = [w for w in words if w not in used_out]
        if len(free_in) != len(free_out):
            raise CompletionError(
                f"block {b}: {len(free_in)} unused inputs vs {len(free_out)} unused outputs"
            )
        rows.update(zip(free_in, free_out))
    return TruthTable(t.width, rows)


@dataclass(frozen=True)
class PermutationGate:
    """Bijection on ``2**width`` basis states, i.e. a 0/1 unitary."""

    width: int
    permutation: np.ndarray = field(repr=False)

    def __post_init__(self):
        perm = np.array(self.permutation, dtype=np.int64).reshape(-1)
        if perm.shape[0] != 2**self.width:
            raise DimensionMismatchError(f"{perm.shape[0]} entries for width {self.width}")
        if not np.array_equal(np.sort(perm), np.arange(perm.shape[0])):
            raise TruthTableError("permutation is not a bijection")
        perm.setflags(write=False)
        object.__setattr__(self, "permutation", perm)

    def matrix(self) -> np.ndarray:
        """Dense unitary with ``U[pi(i), i] = 1``."""
        n = self.permutation.shape[0]
        mat = np.zeros((n, n), dtype=complex)
        mat[self.permutation, np.arange(n)] = 1.0
        return mat

    def inverse(self) -> "PermutationGate":
        inv = np.empty_like(self.permutation)
        inv[self.permutation] = np.arange(self.permutation.shape[0])
        return PermutationGate(self.width, inv)

    def to_table(self) -> TruthTable:
        return TruthTable(self.width, dict(enumerate(self.permutation.tolist())))

    def __eq__(self, other):
        if not isinstance(other, PermutationGate):
            return NotImplemented
        return self.width == other.width and np.array_equal(self.permutation, other.permutation)

    def __hash__(self):
        return hash((self.width, self.permutation.tobytes()))


def to_gate(t: TruthTable) -> PermutationGate:
    if not t.is_total:
        raise TruthTableError(f"table has {len(t.rows)} of {2**t.width} rows; complete it first")
    return PermutationGate(t.width, [t.rows[i] for i in range(2**t.width)])


def gate_tensor(first: PermutationGate, second: PermutationGate) -> PermutationGate:
    """``first ⊗ second``, with ``first`` on the more significant bits."""
    hi = first.permutation[:, None] * 2**second.width
    return PermutationGate(first.width + second.width, (hi + second.permutation[None, :]).reshape(-1))


def permute_wires(
    gate: PermutationGate, src: Sequence[str], dst: Sequence[str]
) -> PermutationGate:
    """Same gate, re-expressed on register order ``dst`` instead of ``src``."""
    if len(src) != gate.width:
        raise DimensionMismatchError(f"{len(src)} labels for width {gate.width}")
    to_src = basis_permutation(src, dst)
    to_dst = np.empty_like(to_src)
    to_dst[to_src] = np.arange(to_src.shape[0])
    return PermutationGate(gate.width, to_dst[gate.permutation[to_src]])


def measurement_gate(completion: str = "e-block") -> PermutationGate:
    """Completed Table-I gate on ``(e, p, q, a)``."""
    if completion == "e-block":
        table = complete_reversible(table_I(), preserve_bit=MEASUREMENT_REGISTER.index("e"))
    elif completion == "plain":
        table = complete_reversible(table_I())
    else:
        raise ValueError(f"unknown completion {completion!r}; expected one of {COMPLETIONS}")
    return to_gate(table)


def von_neumann_gate() -> PermutationGate:
    """Pointer-copy gate on ``(p, q)``: ``|0>|x> -> |x>|x>``, q left untouched."""
    rows = TruthTable.from_bits(2, {"00": "00", "01": "11"})
    return to_gate(complete_reversible(rows, preserve_bit=VON_NEUMANN_REGISTER.index("q")))
