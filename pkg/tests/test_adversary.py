import itertools
import math

import numpy as np
import pytest

from ghz_qsdc.adversary import (
    DisturbanceConfig,
    EveReport,
    InterceptResend,
    InterceptResendConfig,
    disturbance,
    eve_information,
    intercept_resend,
    null_channel,
)
from ghz_qsdc.encoding import DecodeError, decode_others
from ghz_qsdc.protocol import (
    ABORTED_CHECK,
    ABORTED_REVEAL,
    COMPLETED,
    Group,
    MessagePlan,
    SessionConfig,
    run_session,
)
from ghz_qsdc.quantum import (
    GhzIndex,
    PauliOp,
    QuantumRegistry,
    QubitLabel,
    basis_state,
    display_label,
    pauli_delta,
)
from ghz_qsdc.transcript import Event

from oracles import KET, ghz_ref_from_label, product_ket


def idx(label):
    return GhzIndex.from_label(label)


# --- null channel ----------------------------------------------------------


def test_null_channel_is_identity():
    reg = QuantumRegistry([basis_state(["a"], "+")])
    lab = reg.labels[0]
    ch = null_channel()
    assert ch.forward(1, 0, lab, reg) is lab
    assert ch.backward(1, 0, lab, reg) is lab
    np.testing.assert_allclose(reg.subsystems[0].amplitudes, KET["+"])
    assert ch.report is None


def test_null_channel_transparency():
    cfg = SessionConfig(groups=30, check_count=12, seed=77)
    a = run_session(cfg)
    b = run_session(cfg, channel=null_channel())
    assert a.status == COMPLETED and a.check_error_rate == 0.0
    assert a.transcript.to_jsonl() == b.transcript.to_jsonl()
    assert a.to_dict() == b.to_dict()


# --- intercept and resend ---------------------------------------------------


@pytest.mark.parametrize("fake,op", list(itertools.product("01+-", [PauliOp.I, PauliOp.IY])))
def test_eve_reads_encoding_off_each_fake(fake, op):
    reg = QuantumRegistry([basis_state(["g"], "0")])
    genuine = reg.labels[0]
    eve = InterceptResend(InterceptResendConfig(targets=(1,), fakes=fake), seed=3)
    fake_label = eve.forward(1, 0, genuine, reg)
    reg.apply(fake_label, op)
    back = eve.backward(1, 0, fake_label, reg)
    assert back is genuine
    assert eve.report.recovered[1][0] == ("1" if op is PauliOp.IY else "0")
    # the same op lands on the stored genuine qubit
    expected = (op.matrix @ KET["0"])
    assert abs(np.vdot(expected, reg.find(genuine).amplitudes)) == pytest.approx(1)


def test_intercept_config_validation():
    with pytest.raises(ValueError):
        InterceptResendConfig(targets=())
    with pytest.raises(ValueError):
        InterceptResendConfig(targets=(0,))
    with pytest.raises(ValueError):
        InterceptResendConfig(fakes="2")


def test_leakage_with_checks_disabled():
    for seed in range(5):
        res = run_session(SessionConfig(groups=30, check_count=0, seed=seed), channel=intercept_resend(seed=seed))
        assert res.status == COMPLETED
        assert res.all_exact()  # Eve re-encodes, so the legitimate parties notice nothing
        info = eve_information(res.eve_report, res.plan.messages, res.message_groups)
        assert info == {0: 1.0, 1: 1.0, 2: 1.0}


def test_partial_targeting_still_leaks_everything_for_n3():
    res = run_session(
        SessionConfig(groups=20, check_count=0, seed=8),
        channel=InterceptResend(InterceptResendConfig(targets=(1,)), seed=8),
    )
    info = eve_information(res.eve_report, res.plan.messages, res.message_groups)
    assert info == {0: 1.0, 1: 1.0, 2: 1.0}


def test_intercept_fakes_0_1_fail_every_z_check():
    res = run_session(
        SessionConfig(groups=60, check_count=59, initial_index="000", abort_threshold=1.0, seed=1),
        channel=intercept_resend(InterceptResendConfig(fakes={1: "0", 2: "1"}), seed=1),
    )
    z = [r for r in res.check.records if r.basis.value == "Z"]
    assert z and all(not r.consistent for r in z)
    assert all(r.outcome in ("001", "101") for r in z)


def test_detectability_bound():
    trials = 1000
    for m in (1, 2, 4):
        aborted = sum(
            run_session(SessionConfig(groups=m + 1, check_count=m, seed=s), channel=intercept_resend(seed=s)).status
            == ABORTED_CHECK
            for s in range(trials)
        )
        assert aborted / trials >= 1 - 0.5**m - 0.02


# --- disturbance -----------------------------------------------------------


def test_disturbance_p0_matches_null_channel():
    cfg = SessionConfig(groups=20, check_count=5, seed=21)
    base = run_session(cfg)
    dist = run_session(cfg, channel=disturbance(DisturbanceConfig(p=0.0), seed=4))
    assert dist.transcript.to_jsonl() == base.transcript.to_jsonl()
    assert dist.decoded == base.decoded and dist.status == COMPLETED


def test_disturbance_config_validation():
    with pytest.raises(ValueError):
        DisturbanceConfig(p=1.5)
    with pytest.raises(ValueError):
        DisturbanceConfig(mode="swap")


def test_iy_on_charlie_flips_label_and_bit():
    cfg = SessionConfig(groups=1, check_count=0, initial_index="000", reveal_fraction=1.0)
    res = run_session(
        cfg, MessagePlan(("01", "0", "1")), disturbance(DisturbanceConfig(mode="flip", p=1.0, targets=(2,)))
    )
    ann = res.announcements[0]
    assert ann.measured == idx("101") ^ pauli_delta(PauliOp.IY, 2, 3)
    assert pauli_delta(PauliOp.IY, 2, 3).display_label() == "111"
    assert display_label(ann.measured) == "010"
    assert res.decoded_message(0, 2) == "0"
    assert res.decoded_message(0, 1) == "0"
    assert res.status == ABORTED_REVEAL


def test_random_op_mode_draws_iy_about_half_the_time():
    flips = 0
    for s in range(400):
        res = run_session(
            SessionConfig(groups=1, check_count=0, initial_index="000"),
            MessagePlan(("00", "0", "0")),
            disturbance(DisturbanceConfig(mode="apply-random-op", p=1.0, targets=(2,)), seed=s),
        )
        acted = res.eve_report.actions[0]["action"]
        assert acted in ("I", "iY")
        flips += acted == "iY"
        assert (res.decoded_message(0, 2) == "1") == (acted == "iY")
    assert flips / 400 == pytest.approx(0.5, abs=0.08)


def measure_z_oracle(initial: str, ops: list[str]):
    """Distribution of Alice's GHZ readout when Eve Z-measures particles b and c.

    Dense 8x8 projectors only; no package code.
    """
    mats = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "iY": np.array([[0, 1], [-1, 0]]), "Z": np.diag([1, -1])}
    psi = ghz_ref_from_label(initial)
    psi = np.kron(np.kron(mats[ops[0]], mats[ops[1]]), mats[ops[2]]) @ psi
    dist = {}
    for b, c in itertools.product("01", repeat=2):
        proj = np.kron(np.eye(2), np.outer(product_ket(b + c), product_ket(b + c)))
        post = proj @ psi
        pb = np.vdot(post, post).real
        if pb < 1e-12:
            continue
        post = post / math.sqrt(pb)
        for lab in ("".join(t) for t in itertools.product("01", repeat=3)):
            p = abs(np.vdot(ghz_ref_from_label(lab), post)) ** 2
            if p > 1e-12:
                dist[lab] = dist.get(lab, 0.0) + pb * p
    return dist


def test_measure_z_disturbance_against_projector_oracle():
    dist = measure_z_oracle("000", ["X", "I", "iY"])
    assert dist == pytest.approx({"101": 0.5, "100": 0.5}, abs=1e-12)

    def alice_reads_charlie(measured):
        try:
            return decode_others(0, PauliOp.X, idx("000"), idx(measured)).get(2) == "1"
        except DecodeError:
            return False

    def bob_reads_alice(measured):
        return decode_others(1, PauliOp.I, idx("000"), idx(measured))[0] == "01"

    def bob_reads_charlie(measured):
        return decode_others(1, PauliOp.I, idx("000"), idx(measured))[2] == "1"

    expect = {
        f.__name__: sum(p for lab, p in dist.items() if f(lab))
        for f in (alice_reads_charlie, bob_reads_alice, bob_reads_charlie)
    }
    assert expect == pytest.approx({"alice_reads_charlie": 0.5, "bob_reads_alice": 0.5, "bob_reads_charlie": 1.0})

    k = 20
    plan = MessagePlan(("01" * k, "0" * k, "1" * k))
    hits = {name: 0 for name in expect}
    sessions = 250
    guesses = []
    for s in range(sessions):
        res = run_session(
            SessionConfig(groups=k, check_count=0, initial_index="000", seed=s, reveal_fraction=0.0),
            plan,
            disturbance(DisturbanceConfig(mode="measure-z", p=1.0), seed=s),
        )
        assert res.eve_report.guessed
        hits["alice_reads_charlie"] += res.decoded_message(0, 2).count("1")
        hits["bob_reads_alice"] += sum(a == "01" for a in res.decoded[1][0])
        hits["bob_reads_charlie"] += res.decoded_message(1, 2).count("1")
        guesses.append(eve_information(res.eve_report, plan.messages, res.message_groups))
    for name, p in expect.items():
        assert hits[name] / (sessions * k) == pytest.approx(p, abs=0.02)
    for party in (1, 2):
        assert np.mean([g[party] for g in guesses]) == pytest.approx(0.5, abs=0.02)


def test_reveal_detection_matches_binomial():
    p, k, rho = 0.3, 4, 0.25
    revealed = math.ceil(rho * k)
    expected = 1 - (1 - p) ** (2 * revealed)
    trials = 4000
    aborted = sum(
        run_session(
            SessionConfig(groups=k, check_count=0, reveal_fraction=rho, seed=s),
            channel=disturbance(DisturbanceConfig(mode="flip", p=p), seed=s),
        ).status
        == ABORTED_REVEAL
        for s in range(trials)
    )
    assert aborted / trials == pytest.approx(expected, abs=0.02)


def test_full_flip_every_revealed_bit_mismatches():
    k = 12
    res = run_session(
        SessionConfig(groups=k, check_count=0, reveal_fraction=1.0, seed=5),
        channel=disturbance(DisturbanceConfig(mode="flip", p=1.0), seed=5),
    )
    assert res.status == ABORTED_REVEAL
    assert res.reveal.mismatches == 2 * k


# --- eve information -------------------------------------------------------


def test_eve_information_null_report():
    assert eve_information(None, ("00", "0", "0"), [0]) == {}
    assert eve_information(EveReport(), ("00", "0", "0"), [0]) == {}


def test_eve_information_counts_bits():
    rep = EveReport()
    rep.record(0, 7, "01")
    rep.record(1, 7, "1")
    rep.record(1, 9, "1")
    rep.record(2, 3, "1")  # not a message group
    got = eve_information(rep, ("0111", "01", "11"), [7, 9])
    assert got == {0: 1.0, 1: 0.5}


def test_disturbance_information_is_uniform_baseline():
    bits = right = 0
    s = 0
    while bits < 10_000:
        res = run_session(
            SessionConfig(groups=50, check_count=0, seed=s, reveal_fraction=0.0),
            channel=disturbance(DisturbanceConfig(), seed=s),
        )
        for party in (1, 2):
            for g, guess in res.eve_report.recovered[party].items():
                k = res.message_groups.index(g)
                right += guess == res.plan.symbol(party, k)
                bits += 1
        s += 1
    assert right / bits == pytest.approx(0.5, abs=0.02)


# --- locality --------------------------------------------------------------


class Auditor(InterceptResend):
    """Intercept-resend that records every argument it is handed."""

    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self.seen = []

    def forward(self, party, group, label, registry):
        self.seen.append((party, group, label, registry))
        return super().forward(party, group, label, registry)

    def backward(self, party, group, label, registry):
        self.seen.append((party, group, label, registry))
        return super().backward(party, group, label, registry)

    def observe(self, event):
        self.seen.append(event)
        super().observe(event)


def test_taps_only_see_transit_and_public_data():
    cfg = SessionConfig(groups=16, check_count=0, seed=3)
    eve = Auditor(seed=3)
    res = run_session(cfg, channel=eve)
    allowed = (int, QubitLabel, QuantumRegistry, Event)
    for item in eve.seen:
        parts = item if isinstance(item, tuple) else (item,)
        for part in parts:
            assert isinstance(part, allowed)
            assert not isinstance(part, (Group, MessagePlan, SessionConfig, GhzIndex))
        if isinstance(item, Event):
            assert item.public
            assert item.kind not in ("prepare", "encode")
    for party, group, label, registry in (x for x in eve.seen if isinstance(x, tuple)):
        assert label in registry.labels
        registry.check()
    # private records exist but never reached the tap
    assert res.transcript.of_kind("prepare") and all(not e.public for e in res.transcript.of_kind("prepare"))
