"""
Dense state-vector simulation of labelled qubits.

Covers GHZ state construction, single-qubit Pauli action, Z/X measurement,
projective GHZ-basis measurement and the GF(2) bookkeeping of how a
single-qubit Pauli permutes GHZ basis labels.

Amplitude ordering is big-endian: ``labels[0]`` is the most significant bit
of the computational-basis index, so ``|abc>`` reads left to right.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

SQRT1_2 = 1.0 / np.sqrt(2.0)
NORM_TOL = 1e-10


class QuantumError(ValueError):
    """Raised on malformed states, unknown labels or bad index shapes."""


@dataclass(eq=False)
class QubitLabel:
    """Identity of a physical particle; ``holder`` tracks who possesses it."""

    id: str
    holder: str = "alice"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QubitLabel) and other.id == self.id

    def __hash__(self) -> int:
        return hash(self.id)

    def __repr__(self) -> str:
        return f"QubitLabel({self.id!r}@{self.holder})"


def _as_labels(labels: Iterable[QubitLabel | str]) -> list[QubitLabel]:
    out = [lab if isinstance(lab, QubitLabel) else QubitLabel(str(lab)) for lab in labels]
    if len(set(out)) != len(out):
        raise QuantumError(f"duplicate qubit labels: {[lab.id for lab in out]}")
    return out


class PauliOp(enum.Enum):
    """The four single-qubit encoding operations.

    ``IY`` is ``|0><1| - |1><0|`` (real, determinant +1).
    """

    I = "I"
    X = "X"
    IY = "iY"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return _PAULI_MATRICES[self].copy()

    def __str__(self) -> str:
        return self.value


_PAULI_MATRICES = {
    PauliOp.I: np.array([[1, 0], [0, 1]], dtype=complex),
    PauliOp.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliOp.IY: np.array([[0, 1], [-1, 0]], dtype=complex),
    PauliOp.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


class MeasBasis(enum.Enum):
    Z = "Z"
    X = "X"

    def symbol(self, bit: int) -> str:
        """Outcome character: '0'/'1' in Z, '+'/'-' in X."""
        if self is MeasBasis.Z:
            return "01"[bit]
        return "+-"[bit]

    def __str__(self) -> str:
        return self.value


# ---------------------------------------------------------------------------
# GHZ labels and their toggles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexDelta:
    """GF(2) toggle ``(p, s) -> (p ^ dp, s ^ ds)`` on GHZ labels."""

    dp: tuple[int, ...]
    ds: int

    @property
    def n(self) -> int:
        return len(self.dp) + 1

    @classmethod
    def zero(cls, n: int) -> "IndexDelta":
        return cls((0,) * (n - 1), 0)

    def __xor__(self, other: "IndexDelta") -> "IndexDelta":
        if not isinstance(other, IndexDelta):
            return NotImplemented
        if other.n != self.n:
            raise QuantumError("delta size mismatch")
        return IndexDelta(tuple(a ^ b for a, b in zip(self.dp, other.dp)), self.ds ^ other.ds)

    @property
    def code(self) -> int:
        return _code(self.dp, self.ds)

    def display_label(self) -> str:
        return "".join(str(b) for b in reversed(self.dp)) + str(self.ds)


def _code(pattern: Sequence[int], s: int) -> int:
    c = s
    for q, bit in enumerate(pattern):
        c |= bit << (q + 1)
    return c


@dataclass(frozen=True)
class GhzIndex:
    """Label of ``(|p,0> + (-1)^s |~p,1>)/sqrt2``.

    ``pattern[q]`` is qubit q's value in the first term for q = 0..n-2; the
    last qubit is 0 in that term.
    """

    pattern: tuple[int, ...]
    phase: int = 0

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.pattern) or self.phase not in (0, 1):
            raise QuantumError(f"GHZ index bits must be 0/1: {self.pattern}, {self.phase}")
        if len(self.pattern) < 1:
            raise QuantumError("GHZ index needs at least two qubits")

    @property
    def n(self) -> int:
        return len(self.pattern) + 1

    @property
    def code(self) -> int:
        return _code(self.pattern, self.phase)

    @classmethod
    def from_code(cls, n: int, code: int) -> "GhzIndex":
        return cls(tuple((code >> (q + 1)) & 1 for q in range(n - 1)), code & 1)

    @classmethod
    def from_label(cls, label: str) -> "GhzIndex":
        """Inverse of :func:`display_label`, e.g. ``"101"`` -> ``(p=01, s=1)``."""
        if len(label) < 2 or set(label) - {"0", "1"}:
            raise QuantumError(f"bad GHZ label {label!r}")
        bits = [int(c) for c in label]
        return cls(tuple(reversed(bits[:-1])), bits[-1])

    @classmethod
    def all(cls, n: int) -> list["GhzIndex"]:
        """All 2^n labels, in ascending display-label order."""
        return [cls.from_label("".join(bits)) for bits in itertools.product("01", repeat=n)]

    def first_term(self) -> tuple[int, ...]:
        return self.pattern + (0,)

    def second_term(self) -> tuple[int, ...]:
        return tuple(1 - b for b in self.pattern) + (1,)

    def __xor__(self, other):
        if isinstance(other, IndexDelta):
            if other.n != self.n:
                raise QuantumError("delta size mismatch")
            return GhzIndex(tuple(a ^ b for a, b in zip(self.pattern, other.dp)), self.phase ^ other.ds)
        if isinstance(other, GhzIndex):
            if other.n != self.n:
                raise QuantumError("index size mismatch")
            return IndexDelta(tuple(a ^ b for a, b in zip(self.pattern, other.pattern)), self.phase ^ other.phase)
        return NotImplemented

    def __str__(self) -> str:
        return display_label(self)


def display_label(idx: GhzIndex) -> str:
    """Display label: pattern bits in reversed particle order, then the phase.

    For three qubits this is the ``ijk`` subscript of ``|psi_ijk>``:
    ``(|100>+|011>)`` has pattern ``10`` and label ``"010"``.
    """
    return "".join(str(b) for b in reversed(idx.pattern)) + str(idx.phase)


def pauli_delta(op: PauliOp, q: int, n: int) -> IndexDelta:
    """Label toggle produced by ``op`` on qubit ``q`` of any n-qubit GHZ state.

    The result holds up to a global sign, independent of the starting label.
    """
    if n < 2:
        raise QuantumError("need at least two qubits")
    if not 0 <= q < n:
        raise QuantumError(f"qubit position {q} out of range for n={n}")
    return _delta_cached(op, q, n)


@lru_cache(maxsize=None)
def _delta_cached(op: PauliOp, q: int, n: int) -> IndexDelta:
    flip_x = op in (PauliOp.X, PauliOp.IY)
    flip_z = op in (PauliOp.Z, PauliOp.IY)
    if not flip_x:
        dp = (0,) * (n - 1)
    elif q < n - 1:
        dp = tuple(int(i == q) for i in range(n - 1))
    else:
        # flipping the reference qubit swaps the two terms
        dp = (1,) * (n - 1)
    return IndexDelta(dp, int(flip_z))


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass
class StateVector:
    labels: list[QubitLabel]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.labels = _as_labels(self.labels)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != 2 ** len(self.labels):
            raise QuantumError(
                f"{len(self.labels)} labels need {2 ** len(self.labels)} amplitudes, "
                f"got {self.amplitudes.size}"
            )
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise QuantumError(f"state not normalized (norm={norm})")

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def position(self, q: QubitLabel | str) -> int:
        key = q if isinstance(q, QubitLabel) else QubitLabel(str(q))
        try:
            return self.labels.index(key)
        except ValueError:
            raise QuantumError(f"unknown qubit {key.id!r}") from None

    def __contains__(self, q: object) -> bool:
        return q in self.labels

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def copy(self) -> "StateVector":
        return StateVector(list(self.labels), self.amplitudes.copy())

    def kron(self, other: "StateVector") -> "StateVector":
        return StateVector(self.labels + other.labels, np.kron(self.amplitudes, other.amplitudes))

    def reorder(self, labels: Sequence[QubitLabel | str]) -> "StateVector":
        """Same state with qubits permuted into ``labels`` order."""
        labels = _as_labels(labels)
        if set(labels) != set(self.labels) or len(labels) != len(self.labels):
            raise QuantumError("reorder needs the same label set")
        axes = [self.position(lab) for lab in labels]
        amps = np.transpose(self.tensor(), axes).reshape(-1)
        # keep the caller's label objects only where they match ours
        ours = {lab: lab for lab in self.labels}
        return StateVector([ours[lab] for lab in labels], amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, bits: str) -> complex:
        """Amplitude of a Z-basis product term such as ``"010"``."""
        return complex(self.amplitudes[int(bits, 2)])

    def x_amplitudes(self) -> np.ndarray:
        """Amplitudes in the all-X product basis; bit 1 at a qubit means ``|->``."""
        h = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
        t = self.tensor()
        for ax in range(self.num_qubits):
            t = np.moveaxis(np.tensordot(h, t, axes=([1], [ax])), 0, ax)
        return t.reshape(-1)


def basis_state(labels: Sequence[QubitLabel | str], bits: str) -> StateVector:
    """Z-basis product state; ``bits`` may also contain '+' / '-'."""
    labels = _as_labels(labels)
    if len(bits) != len(labels):
        raise QuantumError("bit string length must match labels")
    single = {
        "0": np.array([1, 0], dtype=complex),
        "1": np.array([0, 1], dtype=complex),
        "+": np.array([SQRT1_2, SQRT1_2], dtype=complex),
        "-": np.array([SQRT1_2, -SQRT1_2], dtype=complex),
    }
    amps = np.ones(1, dtype=complex)
    for c in bits:
        amps = np.kron(amps, single[c])
    return StateVector(labels, amps)


def ghz_vector(idx: GhzIndex) -> np.ndarray:
    n = idx.n
    amps = np.zeros(2**n, dtype=complex)
    first = int("".join(map(str, idx.first_term())), 2)
    second = int("".join(map(str, idx.second_term())), 2)
    amps[first] = SQRT1_2
    amps[second] = -SQRT1_2 if idx.phase else SQRT1_2
    return amps


@lru_cache(maxsize=None)
def ghz_basis_matrix(n: int) -> np.ndarray:
    """Rows are GHZ vectors, row ``c`` holding the index with ``code == c``."""
    mat = np.stack([ghz_vector(GhzIndex.from_code(n, c)) for c in range(2**n)])
    mat.setflags(write=False)
    return mat


def ghz_state(n: int, idx: GhzIndex, labels: Sequence[QubitLabel | str] | None = None) -> StateVector:
    if n < 2:
        raise QuantumError("GHZ states need n >= 2")
    if idx.n != n:
        raise QuantumError(f"index pattern has length {len(idx.pattern)}, expected {n - 1}")
    if labels is None:
        labels = [f"q{i}" for i in range(n)]
    if len(labels) != n:
        raise QuantumError(f"need {n} labels, got {len(labels)}")
    return StateVector(list(labels), ghz_vector(idx))


def inner_product(s1: StateVector, s2: StateVector) -> complex:
    """``<s1|s2>``; both states must carry the same labels in the same order."""
    if s1.labels != s2.labels:
        raise QuantumError("inner product needs identical label order")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def _split(state: StateVector, ax: int) -> np.ndarray:
    """View of the amplitudes as (left, 2, right) around qubit ``ax``."""
    return state.amplitudes.reshape(2**ax, 2, -1)


def apply_pauli(state: StateVector, q: QubitLabel | str, op: PauliOp) -> StateVector:
    """Apply ``op`` to qubit ``q`` in place and return the state."""
    ax = state.position(q)
    if op is PauliOp.I:
        return state
    t = _split(state, ax)
    if op is PauliOp.X:
        t[:] = t[:, ::-1, :].copy()
    elif op is PauliOp.Z:
        t[:, 1, :] *= -1
    else:  # iY: |0> -> -|1>, |1> -> |0>
        row0 = t[:, 0, :].copy()
        t[:, 0, :] = t[:, 1, :]
        t[:, 1, :] = -row0
    return state


# ---------------------------------------------------------------------------
# Registry of disjoint subsystems
# ---------------------------------------------------------------------------


@dataclass
class QuantumRegistry:
    """Disjoint product factors that together hold every live qubit of a group."""

    subsystems: list[StateVector] = field(default_factory=list)

    def add(self, state: StateVector) -> StateVector:
        clash = set(state.labels) & set(self.labels)
        if clash:
            raise QuantumError(f"labels already live: {sorted(lab.id for lab in clash)}")
        self.subsystems.append(state)
        return state

    @property
    def labels(self) -> list[QubitLabel]:
        return [lab for sub in self.subsystems for lab in sub.labels]

    def label(self, q: QubitLabel | str) -> QubitLabel:
        """The registry's own label object for ``q``."""
        sub = self.find(q)
        return sub.labels[sub.position(q)]

    def find(self, q: QubitLabel | str) -> StateVector:
        key = q if isinstance(q, QubitLabel) else QubitLabel(str(q))
        for sub in self.subsystems:
            if key in sub.labels:
                return sub
        raise QuantumError(f"unknown qubit {key.id!r}")

    def apply(self, q: QubitLabel | str, op: PauliOp) -> None:
        apply_pauli(self.find(q), q, op)

    def merge(self, qs: Sequence[QubitLabel | str]) -> StateVector:
        """Fuse every subsystem touching ``qs`` into one joint state."""
        subs: list[StateVector] = []
        for q in qs:
            sub = self.find(q)
            if not any(sub is s for s in subs):
                subs.append(sub)
        if len(subs) == 1:
            return subs[0]
        joint = subs[0]
        for sub in subs[1:]:
            joint = joint.kron(sub)
        self.subsystems = [s for s in self.subsystems if not any(s is t for t in subs)]
        self.subsystems.append(joint)
        return joint

    def replace(self, old: StateVector, *new: StateVector) -> None:
        i = next(i for i, s in enumerate(self.subsystems) if s is old)
        self.subsystems[i : i + 1] = list(new)

    def check(self) -> None:
        """Assert label-disjointness and unit norm of every factor."""
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise QuantumError("registry subsystems overlap")
        for sub in self.subsystems:
            if abs(np.linalg.norm(sub.amplitudes) - 1.0) > NORM_TOL:
                raise QuantumError("subsystem lost normalization")


def _coerce_registry(target: QuantumRegistry | StateVector) -> QuantumRegistry:
    if isinstance(target, StateVector):
        return QuantumRegistry([target])
    return target


def _sample(rng: np.random.Generator, probs: np.ndarray) -> int:
    probs = np.clip(np.real(probs), 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise QuantumError(f"outcome probabilities sum to {total}")
    cdf = np.cumsum(probs / total)
    return int(min(np.searchsorted(cdf, rng.random(), side="right"), len(probs) - 1))


def measure_single(
    registry: QuantumRegistry | StateVector,
    q: QubitLabel | str,
    basis: MeasBasis,
    rng: np.random.Generator,
) -> int:
    """Born-rule measurement of one qubit; returns 0 (|0> or |+>) or 1 (|1> or |->).

    The owning subsystem collapses in place and stays normalized.
    """
    registry = _coerce_registry(registry)
    sub = registry.find(q)
    t = _split(sub, sub.position(q))
    if basis is MeasBasis.Z:
        comps = (t[:, 0, :], t[:, 1, :])
    else:
        comps = ((t[:, 0, :] + t[:, 1, :]) * SQRT1_2, (t[:, 0, :] - t[:, 1, :]) * SQRT1_2)
    p0 = float(np.vdot(comps[0], comps[0]).real)
    p1 = float(np.vdot(comps[1], comps[1]).real)
    if abs(p0 + p1 - 1.0) > 1e-8:
        raise QuantumError(f"outcome probabilities sum to {p0 + p1}")
    bit = int(rng.random() * (p0 + p1) >= p0)
    rest = comps[bit] / np.sqrt(p1 if bit else p0)
    new = np.empty_like(t)
    if basis is MeasBasis.Z:
        new[:, bit, :] = rest
        new[:, 1 - bit, :] = 0.0
    else:
        new[:, 0, :] = rest * SQRT1_2
        new[:, 1, :] = (-SQRT1_2 if bit else SQRT1_2) * rest
    sub.amplitudes = new.reshape(-1)
    return bit


def measure_joint(
    registry: QuantumRegistry | StateVector,
    qs: Sequence[QubitLabel | str],
    basis: MeasBasis,
    rng: np.random.Generator,
) -> str:
    """Measure each qubit of ``qs`` in ``basis``, in order; returns e.g. ``"+--"``."""
    registry = _coerce_registry(registry)
    return "".join(basis.symbol(measure_single(registry, q, basis, rng)) for q in qs)


def ghz_measure_probabilities(joint: StateVector, qs: Sequence[QubitLabel | str]) -> tuple[np.ndarray, np.ndarray, list[QubitLabel]]:
    """Outcome probabilities (indexed by label code) of a GHZ-basis measurement on ``qs``.

    Returns ``(probs, projections, rest_labels)`` where ``projections[c]`` is the
    unnormalized post-measurement state of the remaining qubits.
    """
    qs = _as_labels(qs)
    rest = [lab for lab in joint.labels if lab not in qs]
    ordered = joint.reorder(list(qs) + rest)
    n = len(qs)
    m = ordered.amplitudes.reshape(2**n, -1)
    proj = ghz_basis_matrix(n).conj() @ m
    probs = np.einsum("ij,ij->i", proj.conj(), proj).real
    return probs, proj, [ordered.labels[i] for i in range(n, len(ordered.labels))]


def ghz_measure(
    registry: QuantumRegistry | StateVector,
    qs: Sequence[QubitLabel | str],
    rng: np.random.Generator,
) -> GhzIndex:
    """Projective measurement of ``qs`` in the n-qubit GHZ basis.

    Merges every subsystem touching ``qs`` first; afterwards ``qs`` sit in their
    own GHZ factor and the remaining qubits in a separate factor.
    """
    registry = _coerce_registry(registry)
    qs = _as_labels(qs)
    n = len(qs)
    if n < 2:
        raise QuantumError("GHZ measurement needs at least two qubits")
    joint = registry.merge(qs)
    probs, proj, rest = ghz_measure_probabilities(joint, qs)
    code = _sample(rng, probs)
    idx = GhzIndex.from_code(n, code)
    own = [joint.labels[joint.position(q)] for q in qs]
    new = [StateVector(own, ghz_vector(idx))]
    if rest:
        new.append(StateVector(rest, proj[code] / np.sqrt(probs[code])))
    registry.replace(joint, *new)
    return idx


def outcome_is_consistent(idx: GhzIndex, basis: MeasBasis, outcome: str) -> bool:
    """Whether ``outcome`` can occur when measuring ``ghz_state(idx)`` in ``basis``.

    Z: the outcome must equal one of the two terms. X: the number of '-'
    results must have the parity of the phase bit.
    """
    if len(outcome) != idx.n:
        raise QuantumError(f"outcome {outcome!r} has length {len(outcome)}, expected {idx.n}")
    if basis is MeasBasis.Z:
        bits = tuple(int(c) for c in outcome)
        return bits == idx.first_term() or bits == idx.second_term()
    return outcome.count("-") % 2 == idx.phase
