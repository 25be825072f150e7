#!/usr/bin/env python3
"""Eve swaps in her own particles and reads every message.

Without a check phase the attack is invisible and fully informative. With check
groups it shows up as error rates of 1 (Z checks) and 1/2 (X checks) for fakes
|0>,|1>, and 1/2 in both bases for fakes |0>,|0>.
"""

from ghz_qsdc import ExperimentSpec, SessionConfig, eve_information, intercept_resend, run_experiment, run_session

res = run_session(SessionConfig(groups=12, check_count=0, seed=4), channel=intercept_resend(seed=4))
print("no checks:", res.status)
print("  messages     ", res.plan.messages)
print("  alice decoded", {p: res.decoded_message(0, p) for p in (1, 2)})
print("  eve recovered", eve_information(res.eve_report, res.plan.messages, res.message_groups))

for fakes in ({1: "0", 2: "1"}, {1: "0", 2: "0"}):
    spec = ExperimentSpec(
        session=SessionConfig(groups=51, check_count=50, abort_threshold=1.0, initial_index="000", seed=1),
        adversary={"kind": "intercept-resend", "fakes": fakes},
        trials=60,
        metrics=("check-error-rate-z", "check-error-rate-x"),
    )
    print(f"\nfakes b={fakes[1]} c={fakes[2]} on the 000 state")
    for rec in run_experiment(spec, write=False):
        print(f"  {rec.metric:20s} {rec.estimate:.3f} +/- {rec.stderr:.3f}  ({rec.trials} groups)")

res = run_session(SessionConfig(groups=21, check_count=20, seed=9), channel=intercept_resend(seed=9))
print(f"\nwith 20 check groups: {res.status}, error rate {res.check_error_rate:.2f}")
