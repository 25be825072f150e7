#!/usr/bin/env python3
"""Tour of the three-qubit GHZ basis.

Prints each basis state as a sum of computational and X-basis product terms,
then shows how a single-qubit Pauli hops between basis labels.
"""

import itertools

import numpy as np

from ghz_qsdc import GhzIndex, PauliOp, apply_pauli, ghz_state, inner_product, display_label, pauli_delta


def expand(amps, n, chars):
    terms = []
    for k, a in enumerate(amps):
        if abs(a) > 1e-12:
            bits = format(k, f"0{n}b").translate(str.maketrans("01", chars))
            terms.append(f"{'+' if a.real > 0 else '-'}|{bits}>")
    return " ".join(terms)


def main():
    n = 3
    print("label   computational basis        X basis (each term weight 1/2)")
    for idx in GhzIndex.all(n):
        s = ghz_state(n, idx)
        print(f"{display_label(idx)}   {expand(s.amplitudes, n, '01'):24s}   {expand(s.x_amplitudes(), n, '+-')}")

    gram = np.array([ghz_state(n, i).amplitudes for i in GhzIndex.all(n)])
    print("\northonormal:", np.allclose(gram @ gram.T, np.eye(8)))

    # a Pauli on one qubit moves the label by a fixed xor, whatever the start
    print("\nop  qubit  label toggle")
    for op, q in itertools.product(PauliOp, range(n)):
        print(f"{op.value:3s} {q}      {pauli_delta(op, q, n).display_label()}")

    start = GhzIndex.from_label("000")
    moved = apply_pauli(ghz_state(n, start), "q2", PauliOp.IY)
    target = start ^ pauli_delta(PauliOp.IY, 2, n)
    print(f"\niY on q2 takes 000 to {display_label(target)}, overlap {abs(inner_product(ghz_state(n, target), moved)):.3f}")


if __name__ == "__main__":
    main()
