import math
from collections import Counter

import numpy as np
import pytest

from ghz_qsdc import rng as rngmod
from ghz_qsdc.adversary import (
    Channel,
    ChannelRefused,
    InterceptResend,
    InterceptResendConfig,
    null_channel,
)
from ghz_qsdc.encoding import decode_others
from ghz_qsdc.protocol import (
    ABORTED_CHANNEL,
    ABORTED_CHECK,
    COMPLETED,
    MessagePlan,
    SessionConfig,
    distribute,
    encode_phase,
    prepare_groups,
    readout_and_announce,
    reveal_check,
    run_check_phase,
    run_session,
)
from ghz_qsdc.quantum import GhzIndex, MeasBasis, PauliOp, inner_product, ghz_state, display_label, pauli_delta
from ghz_qsdc.transcript import Transcript

from oracles import term_state


def idx(label):
    return GhzIndex.from_label(label)


# --- config and plan -------------------------------------------------------


def test_config_defaults_and_validation():
    cfg = SessionConfig(groups=10)
    assert cfg.check_count == 5 and cfg.message_count == 5
    with pytest.raises(ValueError):
        SessionConfig(groups=10, check_count=10)
    with pytest.raises(ValueError):
        SessionConfig(n=2)
    with pytest.raises(ValueError):
        SessionConfig(reveal_fraction=1.5)
    with pytest.raises(ValueError):
        SessionConfig(n=4, initial_index="000")


def test_message_plan_shapes():
    plan = MessagePlan(("0110", "01", "10"))
    assert plan.k == 2 and plan.symbol(0, 1) == "10" and plan.symbol(2, 0) == "1"
    with pytest.raises(ValueError):
        MessagePlan(("011", "01", "10"))
    with pytest.raises(ValueError):
        MessagePlan(("01", "0", "2"))


# --- preparation and distribution -----------------------------------------


def test_forced_single_group_is_eq1():
    (grp,) = prepare_groups(SessionConfig(groups=1, check_count=0, initial_index="000"))
    np.testing.assert_allclose(grp.registry.subsystems[0].amplitudes, term_state("000"), atol=1e-12)


def test_uniform_preparation_n3():
    cfg = SessionConfig(groups=10_000, seed=3)
    counts = Counter(display_label(g.initial) for g in prepare_groups(cfg))
    assert len(counts) == 8
    for c in counts.values():
        assert c / 10_000 == pytest.approx(1 / 8, abs=0.02)
    # chi-square with 7 dof, 0.1% critical value 24.32
    chi2 = sum((c - 1250) ** 2 / 1250 for c in counts.values())
    assert chi2 < 24.32


def test_four_party_group():
    (grp,) = prepare_groups(SessionConfig(n=4, groups=1, check_count=0, seed=9))
    assert grp.initial.n == 4
    state = grp.registry.subsystems[0]
    assert state.num_qubits == 4
    assert abs(inner_product(ghz_state(4, grp.initial, state.labels), state)) == pytest.approx(1)


def test_distribute_identity_channel():
    groups = prepare_groups(SessionConfig(groups=4))
    holdings = distribute(groups)
    for grp in groups:
        for p in range(3):
            assert holdings[p][grp.gid] is grp.labels[p]
    assert holdings[1][0].holder == "bob" and holdings[2][0].holder == "charlie"


def test_distribute_five_parties():
    groups = prepare_groups(SessionConfig(n=5, groups=3))
    holdings = distribute(groups, null_channel())
    assert sorted(holdings) == [0, 1, 2, 3, 4]
    assert all(len(holdings[p]) == 3 for p in range(1, 5))


def test_distribute_intercept_resend():
    groups = prepare_groups(SessionConfig(groups=2))
    eve = InterceptResend(InterceptResendConfig(targets=(1, 2), fakes="0"))
    holdings = distribute(groups, eve)
    for grp in groups:
        for p in (1, 2):
            held = holdings[p][grp.gid]
            assert held != grp.labels[p] and "fake" in held.id
            assert grp.labels[p].holder == "eve"
        grp.registry.check()


class Dropper(Channel):
    def forward(self, party, group, label, registry):
        return None if group == 1 else label


def test_channel_refusal_surfaces_as_abort():
    groups = prepare_groups(SessionConfig(groups=3))
    with pytest.raises(ChannelRefused):
        distribute(groups, Dropper())
    res = run_session(SessionConfig(groups=3, check_count=1), channel=Dropper())
    assert res.status == ABORTED_CHANNEL


# --- check phase -----------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 5])
def test_check_phase_ideal_channel_error_free(n):
    for seed in range(5):
        cfg = SessionConfig(n=n, groups=30, check_count=20, seed=seed)
        groups = prepare_groups(cfg)
        report = run_check_phase(cfg, groups, distribute(groups))
        assert report.error_rate == 0.0 and not report.aborted
        assert len(report.records) == 20
        assert {r.basis for r in report.records} == {MeasBasis.Z, MeasBasis.X}


def _check_rates(fakes, trials=80, groups=126):
    fails = {MeasBasis.Z: [0, 0], MeasBasis.X: [0, 0]}
    for seed in range(trials):
        cfg = SessionConfig(groups=groups, check_count=groups - 1, initial_index="000", seed=seed, abort_threshold=1.0)
        grps = prepare_groups(cfg)
        eve = InterceptResend(InterceptResendConfig(fakes=fakes), seed=seed)
        rep = run_check_phase(cfg, grps, distribute(grps, eve))
        for b in fails:
            f, t = rep.errors_in(b)
            fails[b][0] += f
            fails[b][1] += t
    return {b: f / t for b, (f, t) in fails.items()}, sum(t for _, t in fails.values())


def test_check_phase_detects_fakes_0_1():
    rates, total = _check_rates({1: "0", 2: "1"})
    assert total >= 10_000
    assert rates[MeasBasis.Z] == 1.0
    assert rates[MeasBasis.X] == pytest.approx(0.5, abs=0.02)


def test_check_phase_detects_fakes_0_0():
    rates, _ = _check_rates({1: "0", 2: "0"})
    assert rates[MeasBasis.Z] == pytest.approx(0.5, abs=0.02)
    assert rates[MeasBasis.X] == pytest.approx(0.5, abs=0.02)


def test_no_check_groups_means_zero_rate():
    cfg = SessionConfig(groups=3, check_count=0)
    groups = prepare_groups(cfg)
    rep = run_check_phase(cfg, groups, distribute(groups))
    assert rep.error_rate == 0.0 and rep.records == []


# --- encoding and readout --------------------------------------------------


def _encode_and_read(plan, initial="000", n=3):
    cfg = SessionConfig(n=n, groups=1, check_count=0, initial_index=initial)
    groups = prepare_groups(cfg)
    holdings = distribute(groups)
    returned, ops = encode_phase(cfg, plan, groups, holdings, [0])
    (ann,) = readout_and_announce(cfg, groups, returned, [0])
    return groups[0], ann, ops[0]


def test_worked_example_encoding():
    cfg = SessionConfig(groups=1, check_count=0, initial_index="000")
    groups = prepare_groups(cfg)
    holdings = distribute(groups)
    returned, ops = encode_phase(cfg, MessagePlan(("01", "0", "1")), groups, holdings, [0])
    assert ops[0] == [PauliOp.X, PauliOp.I, PauliOp.IY]
    state = groups[0].registry.merge(returned[0]).reorder(returned[0])
    assert abs(np.vdot(term_state("101"), state.amplitudes)) == pytest.approx(1, abs=1e-12)
    (ann,) = readout_and_announce(cfg, groups, returned, [0])
    assert (display_label(ann.initial), display_label(ann.measured)) == ("000", "101")


def test_all_zero_messages_leave_state():
    _, ann, _ = _encode_and_read(MessagePlan(("00", "0", "0")), "011")
    assert display_label(ann.measured) == "011"


def test_bob_bit_only():
    _, ann, _ = _encode_and_read(MessagePlan(("00", "1", "0")))
    expected = idx("000") ^ pauli_delta(PauliOp.IY, 1, 3)
    assert ann.measured == expected and display_label(ann.measured) == "101"


def test_readout_after_in_transit_iy():
    class FlipCharlie(Channel):
        def backward(self, party, group, label, registry):
            if party == 2:
                registry.apply(label, PauliOp.IY)
            return label

    cfg = SessionConfig(groups=1, check_count=0, initial_index="000")
    groups = prepare_groups(cfg)
    ch = FlipCharlie()
    holdings = distribute(groups, ch)
    returned, _ = encode_phase(cfg, MessagePlan(("01", "0", "1")), groups, holdings, [0], ch)
    (ann,) = readout_and_announce(cfg, groups, returned, [0], ch)
    assert ann.measured == idx("101") ^ pauli_delta(PauliOp.IY, 2, 3)
    # Charlie's bit now reads flipped from Alice's side
    assert decode_others(0, PauliOp.X, ann.initial, ann.measured) == {1: "0", 2: "0"}


# --- reveal check ----------------------------------------------------------


def test_reveal_passes_without_adversary():
    for rho in (0.0, 0.3, 1.0):
        res = run_session(SessionConfig(groups=20, check_count=5, reveal_fraction=rho, seed=4))
        assert res.status == COMPLETED
        assert res.reveal.mismatches == 0
        assert all(len(v) == math.ceil(rho * 15) for v in res.reveal.disclosed.values())


def test_reveal_counts_mismatches():
    cfg = SessionConfig(groups=4, check_count=0, reveal_fraction=1.0)
    plan = MessagePlan(("00000000", "0101", "1111"))
    decoded = {0: {1: ["0", "1", "1", "1"], 2: ["1", "1", None, "1"]}}
    rep = reveal_check(cfg, plan, decoded)
    assert rep.mismatches == 2 and not rep.passed
    assert rep.disclosed == {1: [0, 1, 2, 3], 2: [0, 1, 2, 3]}


# --- whole sessions --------------------------------------------------------


def test_ideal_three_party_session():
    res = run_session(SessionConfig(n=3, groups=40, check_count=20, seed=12))
    assert res.status == COMPLETED and res.check_error_rate == 0.0
    assert res.all_exact()
    assert len(res.message_groups) == 20


def test_five_party_session():
    res = run_session(SessionConfig(n=5, groups=60, check_count=30, seed=13))
    assert res.status == COMPLETED
    assert len(res.plan.messages[0]) == 60 and all(len(m) == 30 for m in res.plan.messages[1:])
    assert res.all_exact()


def test_intercept_resend_session_aborts_but_eve_learns_fakes():
    res = run_session(SessionConfig(groups=40, check_count=20, seed=2), channel=InterceptResend(seed=2))
    assert res.status == ABORTED_CHECK
    assert res.decoded == {}


@pytest.mark.parametrize("n", [3, 4, 5])
def test_round_trip_random_sessions(n):
    for seed in range(60):
        r = rngmod.stream(seed, "test-config", n)
        g = int(r.integers(2, 14))
        m = int(r.integers(1, g))
        res = run_session(SessionConfig(n=n, groups=g, check_count=m, seed=seed))
        assert res.status == COMPLETED
        for viewer in range(n):
            for party in range(n):
                if party != viewer:
                    assert res.decoded_message(viewer, party) == res.plan.messages[party]


def test_every_group_in_exactly_one_phase():
    res = run_session(SessionConfig(groups=25, check_count=9, seed=5))
    checked = {r.group for r in res.check.records}
    assert checked.isdisjoint(res.message_groups)
    assert checked | set(res.message_groups) == set(range(25))


def test_plan_mismatch_rejected():
    with pytest.raises(ValueError):
        run_session(SessionConfig(groups=4, check_count=2), MessagePlan(("00", "0", "0")))


def test_transcript_determinism():
    cfg = SessionConfig(groups=30, check_count=10, seed=99)
    a = run_session(cfg).transcript.to_jsonl()
    b = run_session(cfg).transcript.to_jsonl()
    assert a == b
    assert run_session(SessionConfig(groups=30, check_count=10, seed=100)).transcript.to_jsonl() != a
    eve_a = run_session(cfg, channel=InterceptResend(seed=1)).transcript.to_jsonl()
    eve_b = run_session(cfg, channel=InterceptResend(seed=1)).transcript.to_jsonl()
    assert eve_a == eve_b


def test_transcript_round_trips_jsonl():
    t = run_session(SessionConfig(groups=6, check_count=2, seed=1)).transcript
    again = Transcript.from_jsonl(t.to_jsonl())
    assert again.to_jsonl() == t.to_jsonl()
    assert [e.seq for e in again] == list(range(len(again)))
    assert {e.kind for e in again if not e.public} == {"prepare", "encode"}


def test_initial_indices_of_message_groups_only_public_at_announcement():
    res = run_session(SessionConfig(groups=10, check_count=4, seed=6))
    public = res.transcript.public_events()
    announce_at = min(e.seq for e in public if e.kind == "announce")
    for e in public:
        if e.seq < announce_at:
            assert "initial" not in e.data
