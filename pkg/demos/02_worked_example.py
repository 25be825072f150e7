#!/usr/bin/env python3
"""The three-party worked example, step by step.

Alice prepares the 000 GHZ state, keeps particle a and sends b to Bob and c to
Charlie. They encode Alice=01 (X), Bob=0 (I), Charlie=1 (iY); Alice measures
in the GHZ basis and announces both labels so everyone can decode.
"""

import numpy as np

from ghz_qsdc import GhzIndex, QuantumRegistry, ghz_measure, ghz_state, display_label
from ghz_qsdc.encoding import decode_others, encode_bit, encode_dibit
from ghz_qsdc.protocol import MessagePlan, SessionConfig, run_session

rng = np.random.default_rng(0)
initial = GhzIndex.from_label("000")
reg = QuantumRegistry([ghz_state(3, initial, ["a", "b", "c"])])

ops = {"a": encode_dibit("01"), "b": encode_bit(0), "c": encode_bit(1)}
for lab, op in ops.items():
    reg.apply(lab, op)
    print(f"{lab}: apply {op.value}")

measured = ghz_measure(reg, ["a", "b", "c"], rng)
print(f"Alice announces initial {display_label(initial)}, measured {display_label(measured)}")

print("Alice reads  ", decode_others(0, ops["a"], initial, measured))
print("Bob reads    ", decode_others(1, ops["b"], initial, measured))
print("Charlie reads", decode_others(2, ops["c"], initial, measured))

# the same thing through the full protocol engine
res = run_session(SessionConfig(groups=1, check_count=0, initial_index="000"), MessagePlan(("01", "0", "1")))
print("\nsession status:", res.status)
for ev in res.transcript.public_events():
    print(f"  {ev.seq:2d} {ev.kind:10s} {ev.data}")
