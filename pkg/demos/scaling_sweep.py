"""Logical infidelity against a uniform physical error rate.

Run with ``python3 demos/scaling_sweep.py [shots_per_point]``.  Prints a
small curve per variant and the log-log slope of 1 - F_p.
"""

import sys

from steane_teleport.cli import cmd_sweep

shots = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
grid = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]

for variant in ("physical", "transversal_0qec", "lattice_mzz"):
    curve = cmd_sweep(variant, "uniform", grid, shots, fit_range=(grid[0], grid[-1]))
    print(f"\n{variant}: slope {curve['slope']:.2f}")
    for p in curve["points"]:
        print(f"  p={p['p']:.0e}  1-F_p={p['infidelity']:.3e}  (+{p['err_lo']:.1e}/-{p['err_hi']:.1e})  discard={p['discard_fraction']:.3f}")
