"""Normalised RHP measure of a Pauli channel switched with itself.

Two Pauli rates run over a grid while the third is held at zero. Pass a
grid size as the first argument (default 3; 5 reproduces the full
acceptance grid and takes about a minute).
"""

import sys

import numpy as np

from switchsim.measures import sweep_ns_surface


def main(n=3):
    grid = np.linspace(0.2, 1.0, n)
    sweep = sweep_ns_surface(grid, grid, 0.0)
    print("gamma3 = 0; rows gamma1, columns gamma2")
    print("      " + " ".join(f"{g:9.2f}" for g in grid))
    for g1, row in zip(grid, sweep.normalized):
        print(f"{g1:5.2f} " + " ".join(f"{v:9.6f}" for v in row))
    print(f"\nlargest error bound on a cell: {np.nanmax(sweep.uncertainty):.1e}")
    print("With gamma3 = 0 the diagonal cells are time-rescaled copies of each other,")
    print("so they share one value; the surface varies only away from the diagonal.")
    sym = sweep_ns_surface([1.0], [1.0], 1.0).normalized[0, 0]
    print(f"symmetric channel (all three rates equal): {sym:.6f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
