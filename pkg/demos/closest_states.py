"""Closest separable states to pure two-qubit states.

Sweeps the Schmidt weight p of sqrt(p)|00> + sqrt(1-p)|11> and prints the
optimal weight q of the separable state q|00><00| + (1-q)|11><11| for a few
generators, with a sampled optimality certificate at each point.
"""

import numpy as np

from qrelent.closest import closest_two_qubit
from qrelent.fgen import parse_spec

specs = ["log", "power_entropy:0.3", "power_entropy:0.5", "tsallis:0.7"]
print(f"{'p':>5}" + "".join(f"{s:>22}" for s in specs))
for p in np.arange(0.55, 1.0, 0.05):
    cells = []
    for s in specs:
        r = closest_two_qubit(float(p), parse_spec(s), samples=200, seed=0)
        mark = "" if r.certificate.passed else "!"
        cells.append(f"q={r.q[0]:.4f} E={r.entanglement:.4f}{mark}")
    print(f"{p:5.2f}" + "".join(f"{c:>22}" for c in cells))
print("\nFor -log the closest weight equals p; for the others q is pushed towards 1.")
