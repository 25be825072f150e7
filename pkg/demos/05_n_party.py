#!/usr/bin/env python3
"""Five parties sharing five-qubit GHZ groups.

Alice sends two bits per group, everyone else one; a single announcement lets
every party read every other party's message.
"""

from ghz_qsdc import MessagePlan, SessionConfig, run_session
from ghz_qsdc.transcript import party_name

plan = MessagePlan(("0110", "01", "11", "00", "10"))
res = run_session(SessionConfig(n=5, groups=4, check_count=2, seed=12), plan)
print("status:", res.status)
for ann in res.announcements:
    print(f"group {ann.group}: initial {ann.initial} measured {ann.measured}")
for viewer in range(5):
    view = {party_name(p): res.decoded_message(viewer, p) for p in sorted(res.decoded[viewer])}
    print(f"{party_name(viewer):8s} reads {view}")
print("all exact:", res.all_exact())
