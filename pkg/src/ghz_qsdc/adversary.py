"""
Quantum channel taps and the eavesdroppers that sit on them.

A channel sees a particle only while it is in transit: the forward leg
(Alice to party i) during distribution and the backward leg (party i to
Alice) after encoding. It also hears every public announcement. It never
receives Alice's preparation record or anyone's message plan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import rng as rngmod
from .encoding import DecodeError, decode_with_known, symbol_width
from .quantum import (
    GhzIndex,
    MeasBasis,
    PauliOp,
    QuantumRegistry,
    QubitLabel,
    apply_pauli,
    basis_state,
    measure_single,
)
from .transcript import Event, party_name

FAKE_STATES = ("0", "1", "+", "-")
RANDOM_FAKE = "random"


class ChannelRefused(RuntimeError):
    """A particle was dropped in transit; the session aborts."""


@dataclass
class EveReport:
    """What the eavesdropper believes she learned.

    ``recovered[party][group]`` holds the bit string Eve attributes to that
    party's encoding of that group. ``guessed`` marks reports made of blind
    guesses rather than measurements.
    """

    recovered: dict[int, dict[int, str]] = field(default_factory=dict)
    actions: list[dict] = field(default_factory=list)
    guessed: bool = False

    def record(self, party: int, group: int, bits: str) -> None:
        self.recovered.setdefault(party, {})[group] = bits

    def to_dict(self) -> dict:
        return {
            "guessed": self.guessed,
            "recovered": {
                party_name(p): {str(g): b for g, b in sorted(groups.items())}
                for p, groups in sorted(self.recovered.items())
            },
            "actions": self.actions,
        }


class Channel:
    """Identity tap on both legs. Subclasses override the legs they attack."""

    kind = "none"

    def __init__(self) -> None:
        self.report: EveReport | None = None

    def forward(self, party: int, group: int, label: QubitLabel, registry: QuantumRegistry) -> QubitLabel:
        return label

    def backward(self, party: int, group: int, label: QubitLabel, registry: QuantumRegistry) -> QubitLabel:
        return label

    def observe(self, event: Event) -> None:
        """Called with every public announcement."""


def null_channel() -> Channel:
    return Channel()


@dataclass(frozen=True)
class InterceptResendConfig:
    """``targets=None`` attacks every non-Alice party.

    ``fakes`` maps a party to one of '0', '1', '+', '-' or 'random'
    (fresh uniform choice of the four per group); a bare string applies to
    every target.
    """

    targets: tuple[int, ...] | None = None
    fakes: str | Mapping[int, str] = RANDOM_FAKE

    def __post_init__(self) -> None:
        if self.targets is not None:
            if not self.targets:
                raise ValueError("intercept-resend needs at least one target")
            if any(t < 1 for t in self.targets):
                raise ValueError("only non-Alice parties can be targeted")
        values = [self.fakes] if isinstance(self.fakes, str) else list(self.fakes.values())
        for v in values:
            if v not in FAKE_STATES + (RANDOM_FAKE,):
                raise ValueError(f"unknown fake state {v!r}")

    def targets_party(self, party: int) -> bool:
        return party >= 1 and (self.targets is None or party in self.targets)

    def fake_for(self, party: int) -> str:
        if isinstance(self.fakes, str):
            return self.fakes
        return self.fakes.get(party, RANDOM_FAKE)


class InterceptResend(Channel):
    """Swap in fake particles on the way out; read and re-encode on the way back."""

    kind = "intercept-resend"

    def __init__(self, cfg: InterceptResendConfig | None = None, seed: int = 0) -> None:
        super().__init__()
        self.cfg = cfg or InterceptResendConfig()
        self.seed = seed
        self.report = EveReport()
        self._stored: dict[tuple[int, int], QubitLabel] = {}
        self._fakes: dict[tuple[int, int], str] = {}

    def forward(self, party, group, label, registry):
        if not self.cfg.targets_party(party):
            return label
        choice = self.cfg.fake_for(party)
        if choice == RANDOM_FAKE:
            r = rngmod.stream(self.seed, "eve-fake", group, party)
            choice = FAKE_STATES[int(r.integers(4))]
        label.holder = "eve"
        self._stored[(group, party)] = label
        fake = QubitLabel(f"g{group}:fake{party}", holder=party_name(party))
        registry.add(basis_state([fake], choice))
        self._fakes[(group, party)] = choice
        self.report.actions.append({"leg": "forward", "group": group, "party": party, "fake": choice})
        return fake

    def backward(self, party, group, label, registry):
        key = (group, party)
        if key not in self._stored:
            return label
        prepared = self._fakes[key]
        basis = MeasBasis.Z if prepared in "01" else MeasBasis.X
        r = rngmod.stream(self.seed, "eve-measure", group, party)
        seen = basis.symbol(measure_single(registry, label, basis, r))
        # iY maps each of the four fakes onto its orthogonal partner
        bit = "0" if seen == prepared else "1"
        self.report.record(party, group, bit)
        genuine = self._stored.pop(key)
        if bit == "1":
            registry.apply(genuine, PauliOp.IY)
        genuine.holder = party_name(party)
        self.report.actions.append(
            {"leg": "backward", "group": group, "party": party, "outcome": seen, "bit": bit}
        )
        return genuine

    def observe(self, event):
        if event.kind != "announce":
            return
        group = event.data["group"]
        known = {
            p: (PauliOp.IY if groups[group] == "1" else PauliOp.I)
            for p, groups in self.report.recovered.items()
            if p >= 1 and group in groups
        }
        if not known:
            return
        initial = GhzIndex.from_label(event.data["initial"])
        measured = GhzIndex.from_label(event.data["measured"])
        try:
            bits = decode_with_known(initial, measured, known)
        except DecodeError:
            self.report.actions.append({"leg": "announce", "group": group, "decoded": None})
            return
        for p, b in bits.items():
            self.report.record(p, group, b)
        self.report.actions.append({"leg": "announce", "group": group, "decoded": dict(sorted((party_name(p), b) for p, b in bits.items()))})


def intercept_resend(cfg: InterceptResendConfig | None = None, seed: int = 0) -> InterceptResend:
    return InterceptResend(cfg, seed)


DISTURB_MODES = ("apply-random-op", "measure-z", "flip")


@dataclass(frozen=True)
class DisturbanceConfig:
    """Backward-leg tampering.

    With probability ``p`` per returning particle Eve applies a uniform
    choice of I / iY (``apply-random-op``), measures in Z (``measure-z``), or
    always applies iY (``flip``).
    """

    mode: str = "apply-random-op"
    p: float = 1.0
    targets: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode not in DISTURB_MODES:
            raise ValueError(f"unknown disturbance mode {self.mode!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("disturbance probability must lie in [0, 1]")


class Disturbance(Channel):
    kind = "disturbance"

    def __init__(self, cfg: DisturbanceConfig | None = None, seed: int = 0) -> None:
        super().__init__()
        self.cfg = cfg or DisturbanceConfig()
        self.seed = seed
        self.report = EveReport(guessed=True)

    def backward(self, party, group, label, registry):
        if party < 1 or (self.cfg.targets is not None and party not in self.cfg.targets):
            return label
        r = rngmod.stream(self.seed, "eve-disturb", group, party)
        action = "pass"
        if r.random() < self.cfg.p:
            if self.cfg.mode == "measure-z":
                action = "measure-z:" + str(measure_single(registry, label, MeasBasis.Z, r))
            else:
                op = PauliOp.IY if self.cfg.mode == "flip" or r.integers(2) else PauliOp.I
                apply_pauli(registry.find(label), label, op)
                action = str(op)
        # nothing she holds is correlated with the message, so her best guess is a coin
        self.report.record(party, group, str(int(r.integers(2))))
        self.report.actions.append({"leg": "backward", "group": group, "party": party, "action": action})
        return label


def disturbance(cfg: DisturbanceConfig | None = None, seed: int = 0) -> Disturbance:
    return Disturbance(cfg, seed)


def eve_information(
    report: EveReport | None, messages: Sequence[str], message_groups: Sequence[int]
) -> dict[int, float]:
    """Per-party fraction of message bits Eve holds correctly.

    ``messages[p]`` is party p's full bit string and ``message_groups[k]`` the
    group carrying its k-th symbol. Parties Eve never touched are absent.
    """
    if report is None:
        return {}
    position = {g: k for k, g in enumerate(message_groups)}
    out: dict[int, float] = {}
    for party, groups in sorted(report.recovered.items()):
        width = symbol_width(party)
        right = total = 0
        for g, bits in groups.items():
            if g not in position:
                continue
            k = position[g]
            truth = messages[party][width * k : width * (k + 1)]
            right += sum(a == b for a, b in zip(bits, truth))
            total += width
        if total:
            out[party] = right / total
    return out
