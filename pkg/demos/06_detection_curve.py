#!/usr/bin/env python3
"""How many check groups does it take to catch intercept-resend?

Sweeps the check-subset size and compares the abort rate with 1 - 2^-M.
"""

from pathlib import Path

from ghz_qsdc import detection_curve, load_spec

spec = load_spec(Path(__file__).parent / "configs" / "detection_curve.yaml")
table = detection_curve(spec, spec.sweep["parameter"], spec.sweep["values"], write=False)
print(" M   abort rate   stderr   bound")
for rec in table:
    print(f"{rec.value:2d}   {rec.estimate:.3f}        {rec.stderr:.3f}    {1 - 2.0 ** -rec.value:.3f}")
