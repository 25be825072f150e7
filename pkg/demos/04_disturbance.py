#!/usr/bin/env python3
"""Eve scrambles returning particles instead of reading them.

She learns nothing (her guesses hit half the bits), but the damage is visible
once the receivers publicly compare a fraction of what Alice decoded.
"""

from ghz_qsdc import DisturbanceConfig, disturbance, eve_information, run_session
from ghz_qsdc.protocol import SessionConfig

for mode in ("apply-random-op", "measure-z"):
    res = run_session(
        SessionConfig(groups=200, check_count=0, reveal_fraction=0.0, seed=2),
        channel=disturbance(DisturbanceConfig(mode=mode, p=1.0), seed=2),
    )
    info = eve_information(res.eve_report, res.plan.messages, res.message_groups)
    print(f"{mode:16s} eve hit rate {info}  message fidelity {res.fidelity():.2f}")

print("\nreveal check, flip mode, 8 message groups, rho = 0.25")
for p in (0.0, 0.1, 0.3, 1.0):
    trials = 400
    caught = sum(
        run_session(
            SessionConfig(groups=8, check_count=0, reveal_fraction=0.25, seed=s),
            channel=disturbance(DisturbanceConfig(mode="flip", p=p), seed=s),
        ).status
        != "completed"
        for s in range(trials)
    )
    print(f"  p={p:.1f}  aborted {caught / trials:.3f}  binomial {1 - (1 - p) ** 4:.3f}")
