"""Fast invariant checks runnable from the command line (``ghz-qsdc selftest``)."""

from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from .encoding import allowed_ops, decode_others
from .protocol import MessagePlan, SessionConfig, run_session
from .quantum import (
    GhzIndex,
    MeasBasis,
    PauliOp,
    apply_pauli,
    ghz_state,
    inner_product,
    outcome_is_consistent,
    pauli_delta,
)


def check_basis_orthonormal(max_n: int = 6) -> bool:
    for n in range(2, max_n + 1):
        states = [ghz_state(n, idx).amplitudes for idx in GhzIndex.all(n)]
        gram = np.array(states).conj() @ np.array(states).T
        if not np.allclose(gram, np.eye(2**n), atol=1e-10):
            return False
    return True


def check_toggle_soundness(max_n: int = 5) -> bool:
    for n in range(3, max_n + 1):
        for idx, q, op in itertools.product(GhzIndex.all(n), range(n), PauliOp):
            after = apply_pauli(ghz_state(n, idx), f"q{q}", op)
            target = ghz_state(n, idx ^ pauli_delta(op, q, n))
            if abs(abs(inner_product(target, after)) - 1.0) > 1e-10:
                return False
    return True


def check_parity_law(max_n: int = 6) -> bool:
    for n in range(2, max_n + 1):
        for idx in GhzIndex.all(n):
            amps = ghz_state(n, idx).x_amplitudes()
            for code in np.flatnonzero(np.abs(amps) > 1e-12):
                outcome = format(int(code), f"0{n}b").replace("0", "+").replace("1", "-")
                if not outcome_is_consistent(idx, MeasBasis.X, outcome):
                    return False
    return True


def check_decode_injective(max_n: int = 6) -> bool:
    for n in range(3, max_n + 1):
        for r in range(n):
            others = [p for p in range(n) if p != r]
            for own in allowed_ops(r):
                seen = set()
                for combo in itertools.product(*(allowed_ops(p) for p in others)):
                    d = pauli_delta(own, r, n)
                    for p, op in zip(others, combo):
                        d = d ^ pauli_delta(op, p, n)
                    if d.code in seen:
                        return False
                    seen.add(d.code)
                if r >= 1 and len(seen) != 2**n:
                    return False
    return True


def check_worked_example() -> bool:
    cfg = SessionConfig(n=3, groups=1, check_count=0, initial_index="000")
    res = run_session(cfg, MessagePlan(("01", "0", "1")))
    ann = res.announcements[0]
    return (
        str(ann.measured) == "101"
        and decode_others(0, PauliOp.X, ann.initial, ann.measured) == {1: "0", 2: "1"}
        and res.all_exact()
    )


def check_round_trip(sessions: int = 30) -> bool:
    return all(
        run_session(SessionConfig(n=n, groups=8, check_count=3, seed=s)).all_exact()
        for n in (3, 4, 5)
        for s in range(sessions)
    )


CHECKS: dict[str, Callable[[], bool]] = {
    "ghz basis orthonormal (n<=6)": check_basis_orthonormal,
    "pauli toggle soundness (n<=5)": check_toggle_soundness,
    "x-basis parity law (n<=6)": check_parity_law,
    "decode injectivity (n<=6)": check_decode_injective,
    "worked example 000 -> 101": check_worked_example,
    "attack-free round trip": check_round_trip,
}


def run_selftest(echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, fn in CHECKS.items():
        passed = bool(fn())
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
