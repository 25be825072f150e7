"""Bit <-> Pauli encoding tables and the GF(2) decoder.

Alice (party 0) encodes two bits per group with one of I, X, iY, Z; every
other party encodes one bit with I or iY. Given the announced initial and
measured GHZ labels, any party can strip its own toggle and solve for the
other parties' operations.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Mapping, Sequence

from .quantum import GhzIndex, IndexDelta, PauliOp, pauli_delta

DIBIT_TO_OP = {"00": PauliOp.I, "01": PauliOp.X, "10": PauliOp.IY, "11": PauliOp.Z}
OP_TO_DIBIT = {op: bits for bits, op in DIBIT_TO_OP.items()}
BIT_TO_OP = {"0": PauliOp.I, "1": PauliOp.IY}
OP_TO_BIT = {op: bit for bit, op in BIT_TO_OP.items()}

ALICE = 0


class DecodeError(ValueError):
    """Announcements admit no (or more than one) assignment of the unknown operations."""


def _bitstr(bits) -> str:
    if isinstance(bits, str):
        return bits
    if isinstance(bits, (int,)):
        return str(bits)
    return "".join(str(int(b)) for b in bits)


def encode_bit(bit) -> PauliOp:
    try:
        return BIT_TO_OP[_bitstr(bit)]
    except KeyError:
        raise ValueError(f"not a bit: {bit!r}") from None


def encode_dibit(*bits) -> PauliOp:
    """``encode_dibit("01")``, ``encode_dibit(0, 1)`` and ``encode_dibit((0, 1))`` agree."""
    key = _bitstr(bits[0]) if len(bits) == 1 else _bitstr(bits)
    try:
        return DIBIT_TO_OP[key]
    except KeyError:
        raise ValueError(f"not a two-bit string: {bits!r}") from None


def decode_bit(op: PauliOp) -> str:
    try:
        return OP_TO_BIT[op]
    except KeyError:
        raise ValueError(f"{op} is not a one-bit encoding") from None


def decode_dibit(op: PauliOp) -> str:
    return OP_TO_DIBIT[op]


def allowed_ops(party: int) -> tuple[PauliOp, ...]:
    return tuple(DIBIT_TO_OP.values()) if party == ALICE else tuple(BIT_TO_OP.values())


def encode_symbol(party: int, bits: str) -> PauliOp:
    return encode_dibit(bits) if party == ALICE else encode_bit(bits)


def decode_symbol(party: int, op: PauliOp) -> str:
    return decode_dibit(op) if party == ALICE else decode_bit(op)


def symbol_width(party: int) -> int:
    return 2 if party == ALICE else 1


@lru_cache(maxsize=None)
def _solution_table(n: int, unknown: tuple[int, ...]) -> dict[int, list[tuple[PauliOp, ...]]]:
    table: dict[int, list[tuple[PauliOp, ...]]] = {}
    for combo in itertools.product(*(allowed_ops(p) for p in unknown)):
        delta = IndexDelta.zero(n)
        for party, op in zip(unknown, combo):
            delta = delta ^ pauli_delta(op, party, n)
        table.setdefault(delta.code, []).append(combo)
    return table


def solve_ops(n: int, remainder: IndexDelta, unknown: Sequence[int]) -> dict[int, PauliOp]:
    """The unique allowed-op assignment of ``unknown`` parties whose toggles sum to ``remainder``."""
    unknown = tuple(sorted(unknown))
    hits = _solution_table(n, unknown).get(remainder.code, [])
    if not hits:
        raise DecodeError(f"no operations of parties {list(unknown)} produce toggle {remainder.display_label()}")
    if len(hits) > 1:
        raise DecodeError(f"toggle {remainder.display_label()} is ambiguous for parties {list(unknown)}")
    return dict(zip(unknown, hits[0]))


def decode_with_known(
    initial: GhzIndex, measured: GhzIndex, known: Mapping[int, PauliOp]
) -> dict[int, str]:
    """Bits of every party not in ``known``, given the ops of those that are."""
    n = initial.n
    remainder = initial ^ measured
    for party, op in known.items():
        remainder = remainder ^ pauli_delta(op, party, n)
    unknown = [p for p in range(n) if p not in known]
    ops = solve_ops(n, remainder, unknown)
    return {p: decode_symbol(p, op) for p, op in ops.items()}


def decode_others(self_party: int, own_op: PauliOp, initial: GhzIndex, measured: GhzIndex) -> dict[int, str]:
    """What party ``self_party`` reads from one group's announcement."""
    if not 0 <= self_party < initial.n:
        raise ValueError(f"party {self_party} out of range")
    if own_op not in allowed_ops(self_party):
        raise ValueError(f"party {self_party} cannot apply {own_op}")
    return decode_with_known(initial, measured, {self_party: own_op})
