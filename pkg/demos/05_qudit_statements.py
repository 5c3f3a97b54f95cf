"""Switched generalised Pauli channels on qudits.

A generalised Pauli channel mixes Weyl operators with probabilities
p_kl. Switched with itself it still fixes I/d, and the probability of the
'+' outcome does not depend on the input state. For the ideal switch that
probability is sum p_kl p_rs (1 + omega^(ks - rl)) / 2; for the uniform
qubit channel it is 5/8.
"""

import numpy as np

from switchsim import qlinalg as la
from switchsim.channels import GeneralizedPauliSpec
from switchsim.switch import ideal_switch_trace, verify_statement1, verify_statement2


def main(seed=3):
    rng = np.random.default_rng(seed)
    for d in (2, 3, 4, 5):
        spec = GeneralizedPauliSpec.random(d, rng)
        states = [la.random_density_matrix(d, rng) for _ in range(8)]
        check = verify_statement2(spec, states)
        print(f"d={d}: fixed-point deviation {verify_statement1(spec):.1e}, "
              f"P(+) = {check.traces[0]:.12f} (spread {check.spread:.1e}, "
              f"formula {ideal_switch_trace(spec):.12f})")
    uniform = GeneralizedPauliSpec.uniform(2)
    print(f"uniform qubit channel: P(+) = {ideal_switch_trace(uniform):.12f}")


if __name__ == "__main__":
    main()
