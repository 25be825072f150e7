"""
Simultaneous direct communication among n parties over n-qubit GHZ groups.

Party 0 (Alice) prepares every group, keeps qubit 0 and sends qubit i to
party i. A random subset of groups is sacrificed to an eavesdropping check;
on the rest every party encodes its message with a Pauli, the particles
return to Alice, and her announced GHZ-basis result lets every party read
the others' messages. A final reveal check compares a sample of disclosed
bits against what Alice decoded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as rngmod
from .adversary import Channel, ChannelRefused, EveReport
from .encoding import (
    ALICE,
    DecodeError,
    decode_others,
    encode_symbol,
    symbol_width,
)
from .quantum import (
    GhzIndex,
    MeasBasis,
    PauliOp,
    QuantumRegistry,
    QubitLabel,
    ghz_measure,
    ghz_state,
    measure_single,
    outcome_is_consistent,
    display_label,
)
from .transcript import Transcript, party_name

COMPLETED = "completed"
ABORTED_CHECK = "aborted-check"
ABORTED_REVEAL = "aborted-reveal"
ABORTED_CHANNEL = "aborted-channel"


@dataclass(frozen=True)
class SessionConfig:
    """Parameters of one session.

    ``groups`` is the number of GHZ groups Alice prepares and ``check_count``
    how many of them are spent on the eavesdropping check (``groups // 2``
    when left as None). ``check_count=0`` skips the check entirely and is
    meant for diagnostics only. ``initial_index`` forces every group into the
    GHZ state with that display label instead of a uniform draw.
    """

    n: int = 3
    groups: int = 40
    check_count: int | None = None
    abort_threshold: float = 0.0
    reveal_fraction: float = 0.1
    seed: int = 0
    initial_index: str | None = None

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError("need at least three parties")
        if self.groups < 1:
            raise ValueError("need at least one group")
        if self.check_count is None:
            object.__setattr__(self, "check_count", self.groups // 2)
        if not 0 <= self.check_count < self.groups:
            raise ValueError(f"check_count must satisfy 0 <= M < G (got M={self.check_count}, G={self.groups})")
        if not 0.0 <= self.abort_threshold <= 1.0:
            raise ValueError("abort_threshold must lie in [0, 1]")
        if not 0.0 <= self.reveal_fraction <= 1.0:
            raise ValueError("reveal_fraction must lie in [0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.initial_index is not None:
            if GhzIndex.from_label(self.initial_index).n != self.n:
                raise ValueError(f"initial_index {self.initial_index!r} is not an {self.n}-qubit label")

    @property
    def message_count(self) -> int:
        return self.groups - self.check_count


@dataclass(frozen=True)
class MessagePlan:
    """``messages[p]`` is party p's secret: 2K bits for Alice, K bits for the rest."""

    messages: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", tuple(self.messages))
        for m in self.messages:
            if set(m) - {"0", "1"}:
                raise ValueError(f"message {m!r} is not a bit string")
        if len(self.messages) < 3:
            raise ValueError("a plan covers at least three parties")
        k, rem = divmod(len(self.messages[0]), 2)
        if rem or any(len(m) != k for m in self.messages[1:]):
            raise ValueError("Alice needs 2K bits and every other party K bits")

    @property
    def n(self) -> int:
        return len(self.messages)

    @property
    def k(self) -> int:
        return len(self.messages[1])

    def symbol(self, party: int, position: int) -> str:
        w = symbol_width(party)
        return self.messages[party][w * position : w * (position + 1)]

    @classmethod
    def random(cls, n: int, k: int, rng: np.random.Generator) -> "MessagePlan":
        msgs = ["".join(map(str, rng.integers(2, size=symbol_width(p) * k))) for p in range(n)]
        return cls(tuple(msgs))

    @classmethod
    def zeros(cls, n: int, k: int) -> "MessagePlan":
        return cls(tuple("0" * symbol_width(p) * k for p in range(n)))


@dataclass
class Group:
    gid: int
    initial: GhzIndex  # Alice's private record
    registry: QuantumRegistry
    labels: list[QubitLabel]


@dataclass
class CheckRecord:
    group: int
    basis: MeasBasis
    outcome: str
    consistent: bool


@dataclass
class CheckReport:
    records: list[CheckRecord]
    error_rate: float
    aborted: bool

    def errors_in(self, basis: MeasBasis) -> tuple[int, int]:
        """(failed, total) check groups measured in ``basis``."""
        sel = [r for r in self.records if r.basis is basis]
        return sum(not r.consistent for r in sel), len(sel)


@dataclass
class Announcement:
    group: int
    initial: GhzIndex
    measured: GhzIndex


@dataclass
class RevealReport:
    passed: bool
    mismatches: int
    disclosed: dict[int, list[int]]


@dataclass
class SessionResult:
    config: SessionConfig
    plan: MessagePlan
    status: str
    check_error_rate: float
    check: CheckReport | None
    message_groups: list[int]
    announcements: list[Announcement]
    decoded: dict[int, dict[int, list[str | None]]]
    reveal: RevealReport | None
    transcript: Transcript
    eve_report: EveReport | None = None

    def decoded_message(self, viewer: int, party: int) -> str:
        """Concatenated bits ``viewer`` read for ``party``; '?' marks undecodable groups."""
        w = symbol_width(party)
        return "".join(s if s is not None else "?" * w for s in self.decoded[viewer][party])

    def all_exact(self) -> bool:
        if not self.decoded:
            return False
        return all(
            self.decoded_message(v, p) == self.plan.messages[p]
            for v, view in self.decoded.items()
            for p in view
        )

    def fidelity(self) -> float | None:
        """Fraction of decoded bits, over every viewer and party, that match the plan."""
        right = total = 0
        for v, view in self.decoded.items():
            for p in view:
                got = self.decoded_message(v, p)
                right += sum(a == b for a, b in zip(got, self.plan.messages[p]))
                total += len(got)
        return right / total if total else None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "check_error_rate": self.check_error_rate,
            "message_groups": self.message_groups,
            "announcements": [
                {"group": a.group, "initial": display_label(a.initial), "measured": display_label(a.measured)}
                for a in self.announcements
            ],
            "decoded": {
                party_name(v): {party_name(p): self.decoded_message(v, p) for p in sorted(view)}
                for v, view in sorted(self.decoded.items())
            },
            "reveal": None
            if self.reveal is None
            else {"passed": self.reveal.passed, "mismatches": self.reveal.mismatches},
            "eve": None if self.eve_report is None else self.eve_report.to_dict(),
        }


def _publish(transcript: Transcript, channel: Channel, kind: str, data: dict) -> None:
    ev = transcript.append(kind, data, public=True)
    channel.observe(ev)


# ---------------------------------------------------------------------------
# Phases
# ---------------------------------------------------------------------------


def prepare_groups(config: SessionConfig, transcript: Transcript | None = None) -> list[Group]:
    """Alice prepares ``config.groups`` GHZ groups, each label uniform over all 2^n."""
    n = config.n
    forced = GhzIndex.from_label(config.initial_index) if config.initial_index else None
    groups = []
    for g in range(config.groups):
        if forced is None:
            code = int(rngmod.stream(config.seed, "prepare", g).integers(2**n))
            idx = GhzIndex.from_code(n, code)
        else:
            idx = forced
        labels = [QubitLabel(f"g{g}:{chr(ord('a') + i) if i < 26 else i}", holder="alice") for i in range(n)]
        reg = QuantumRegistry()
        reg.add(ghz_state(n, idx, labels))
        groups.append(Group(g, idx, reg, labels))
        if transcript is not None:
            transcript.append("prepare", {"group": g, "initial": display_label(idx)}, public=False)
    return groups


def distribute(
    groups: Sequence[Group], channel: Channel | None = None, transcript: Transcript | None = None
) -> dict[int, dict[int, QubitLabel]]:
    """Send particle i of every group to party i through the channel's forward leg.

    Returns ``holdings[party][group]``. Raises :class:`ChannelRefused` if the
    channel drops a particle.
    """
    channel = channel or Channel()
    transcript = transcript if transcript is not None else Transcript()
    n = len(groups[0].labels) if groups else 0
    holdings: dict[int, dict[int, QubitLabel]] = {p: {} for p in range(n)}
    for grp in groups:
        holdings[ALICE][grp.gid] = grp.labels[ALICE]
        for p in range(1, n):
            sent = grp.labels[p]
            sent.holder = "channel"
            got = channel.forward(p, grp.gid, sent, grp.registry)
            if got is None:
                raise ChannelRefused(f"particle {p} of group {grp.gid} lost in transit")
            got.holder = party_name(p)
            holdings[p][grp.gid] = got
        # Alice tells each recipient which particle position it now holds
        _publish(transcript, channel, "distribute", {"group": grp.gid, "positions": {party_name(p): p for p in range(1, n)}})
    return holdings


def run_check_phase(
    config: SessionConfig,
    groups: Sequence[Group],
    holdings: dict[int, dict[int, QubitLabel]],
    transcript: Transcript | None = None,
    channel: Channel | None = None,
) -> CheckReport:
    """Bob picks M groups and a basis for each; all parties measure; Alice scores the outcomes."""
    channel = channel or Channel()
    transcript = transcript if transcript is not None else Transcript()
    n = config.n
    m = config.check_count
    if m == 0:
        return CheckReport([], 0.0, False)
    pick = rngmod.stream(config.seed, "check-select")
    positions = sorted(int(g) for g in pick.choice(config.groups, size=m, replace=False))
    bases = [MeasBasis.Z if b == 0 else MeasBasis.X for b in pick.integers(2, size=m)]
    _publish(transcript, channel, "check-select", {"groups": positions, "bases": [str(b) for b in bases]})

    by_gid = {grp.gid: grp for grp in groups}
    order = [1] + [p for p in range(n) if p != 1]
    records = []
    for gid, basis in zip(positions, bases):
        grp = by_gid[gid]
        outcome = [""] * n
        for p in order:
            r = rngmod.stream(config.seed, "check-measure", gid, p)
            outcome[p] = basis.symbol(measure_single(grp.registry, holdings[p][gid], basis, r))
        result = "".join(outcome)
        _publish(transcript, channel, "check-outcome", {"group": gid, "basis": str(basis), "outcome": result})
        records.append(CheckRecord(gid, basis, result, outcome_is_consistent(grp.initial, basis, result)))

    error_rate = sum(not r.consistent for r in records) / m
    aborted = error_rate > config.abort_threshold
    _publish(transcript, channel, "check-result", {"error_rate": error_rate, "aborted": aborted})
    return CheckReport(records, error_rate, aborted)


def encode_phase(
    config: SessionConfig,
    plan: MessagePlan,
    groups: Sequence[Group],
    holdings: dict[int, dict[int, QubitLabel]],
    message_groups: Sequence[int],
    channel: Channel | None = None,
    transcript: Transcript | None = None,
) -> tuple[dict[int, list[QubitLabel]], dict[int, list[PauliOp]]]:
    """Every party encodes its k-th symbol on its particle of the k-th message group.

    Non-Alice particles travel back through the channel's backward leg before
    Alice applies her own operation. Returns the labels Alice now holds per
    group (in party order) and the operations each party applied.
    """
    channel = channel or Channel()
    transcript = transcript if transcript is not None else Transcript()
    n = config.n
    by_gid = {grp.gid: grp for grp in groups}
    returned: dict[int, list[QubitLabel]] = {}
    ops: dict[int, list[PauliOp]] = {}
    for k, gid in enumerate(message_groups):
        grp = by_gid[gid]
        group_ops = [encode_symbol(p, plan.symbol(p, k)) for p in range(n)]
        back = [holdings[ALICE][gid]]
        for p in range(1, n):
            lab = holdings[p][gid]
            grp.registry.apply(lab, group_ops[p])
            lab.holder = "channel"
            got = channel.backward(p, gid, lab, grp.registry)
            if got is None:
                raise ChannelRefused(f"particle {p} of group {gid} lost on the way back")
            got.holder = "alice"
            back.append(got)
        grp.registry.apply(back[ALICE], group_ops[ALICE])
        returned[gid] = back
        ops[gid] = group_ops
        transcript.append("encode", {"group": gid, "ops": [str(o) for o in group_ops]}, public=False)
    _publish(transcript, channel, "returned", {"groups": list(message_groups)})
    return returned, ops


def readout_and_announce(
    config: SessionConfig,
    groups: Sequence[Group],
    returned: dict[int, list[QubitLabel]],
    message_groups: Sequence[int],
    channel: Channel | None = None,
    transcript: Transcript | None = None,
) -> list[Announcement]:
    """Alice GHZ-measures each message group and broadcasts (initial, measured)."""
    channel = channel or Channel()
    transcript = transcript if transcript is not None else Transcript()
    by_gid = {grp.gid: grp for grp in groups}
    out = []
    for gid in message_groups:
        grp = by_gid[gid]
        measured = ghz_measure(grp.registry, returned[gid], rngmod.stream(config.seed, "readout", gid))
        out.append(Announcement(gid, grp.initial, measured))
        _publish(
            transcript,
            channel,
            "announce",
            {"group": gid, "initial": display_label(grp.initial), "measured": display_label(measured)},
        )
    return out


def decode_all(
    n: int, ops: dict[int, list[PauliOp]], announcements: Sequence[Announcement]
) -> dict[int, dict[int, list[str | None]]]:
    """Every party's reading of every other party's symbols.

    A group whose announcement admits no valid assignment for a viewer is
    recorded as None for that viewer.
    """
    decoded: dict[int, dict[int, list[str | None]]] = {
        v: {p: [] for p in range(n) if p != v} for v in range(n)
    }
    for ann in announcements:
        for v in range(n):
            try:
                bits = decode_others(v, ops[ann.group][v], ann.initial, ann.measured)
            except DecodeError:
                bits = {}
            for p in decoded[v]:
                decoded[v][p].append(bits.get(p))
    return decoded


def reveal_check(
    config: SessionConfig,
    plan: MessagePlan,
    decoded: dict[int, dict[int, list[str | None]]],
    transcript: Transcript | None = None,
    channel: Channel | None = None,
) -> RevealReport:
    """Each non-Alice party discloses ceil(reveal_fraction * message_count) random (position, bit) pairs.

    Any disagreement with what Alice decoded fails the check.
    """
    channel = channel or Channel()
    transcript = transcript if transcript is not None else Transcript()
    k = plan.k
    count = min(k, math.ceil(config.reveal_fraction * k))
    mismatches = 0
    disclosed: dict[int, list[int]] = {}
    for p in range(1, config.n):
        r = rngmod.stream(config.seed, "reveal", p)
        positions = sorted(int(i) for i in r.choice(k, size=count, replace=False)) if count else []
        disclosed[p] = positions
        bits = [plan.symbol(p, i) for i in positions]
        _publish(transcript, channel, "reveal", {"party": party_name(p), "positions": positions, "bits": "".join(bits)})
        alice_view = decoded[ALICE][p]
        mismatches += sum(alice_view[i] != b for i, b in zip(positions, bits))
    passed = mismatches == 0
    _publish(transcript, channel, "reveal-result", {"mismatches": mismatches, "passed": passed})
    return RevealReport(passed, mismatches, disclosed)


def run_session(
    config: SessionConfig, plan: MessagePlan | None = None, channel: Channel | None = None
) -> SessionResult:
    """Prepare, distribute, check, encode, read out, decode and reveal-check."""
    channel = channel or Channel()
    n = config.n
    k = config.message_count
    if plan is None:
        plan = MessagePlan.random(n, k, rngmod.stream(config.seed, "plan"))
    if plan.n != n or plan.k != k:
        raise ValueError(f"plan covers {plan.n} parties x {plan.k} groups, session needs {n} x {k}")

    transcript = Transcript()
    groups = prepare_groups(config, transcript)

    def finish(status, check=None, announcements=(), decoded=None, reveal=None, mgroups=()):
        return SessionResult(
            config=config,
            plan=plan,
            status=status,
            check_error_rate=check.error_rate if check else 0.0,
            check=check,
            message_groups=list(mgroups),
            announcements=list(announcements),
            decoded=decoded or {},
            reveal=reveal,
            transcript=transcript,
            eve_report=channel.report,
        )

    try:
        holdings = distribute(groups, channel, transcript)
    except ChannelRefused as exc:
        transcript.append("abort", {"status": ABORTED_CHANNEL, "reason": str(exc)})
        return finish(ABORTED_CHANNEL)

    check = run_check_phase(config, groups, holdings, transcript, channel)
    if check.aborted:
        transcript.append("abort", {"status": ABORTED_CHECK, "error_rate": check.error_rate})
        return finish(ABORTED_CHECK, check)

    checked = {r.group for r in check.records}
    message_groups = [grp.gid for grp in groups if grp.gid not in checked]
    try:
        returned, ops = encode_phase(config, plan, groups, holdings, message_groups, channel, transcript)
    except ChannelRefused as exc:
        transcript.append("abort", {"status": ABORTED_CHANNEL, "reason": str(exc)})
        return finish(ABORTED_CHANNEL, check, mgroups=message_groups)

    announcements = readout_and_announce(config, groups, returned, message_groups, channel, transcript)
    decoded = decode_all(n, ops, announcements)
    reveal = reveal_check(config, plan, decoded, transcript, channel)
    status = COMPLETED if reveal.passed else ABORTED_REVEAL
    if not reveal.passed:
        transcript.append("abort", {"status": ABORTED_REVEAL, "mismatches": reveal.mismatches})
    return finish(status, check, announcements, decoded, reveal, message_groups)
