"""Generator functions and the integrals H_f and G_f.

Builds each built-in generator, checks its integral representation against
the closed form, and tabulates H_f on a coarse grid.  Only -log has a flat
H_f; the power families grow like p**e.
"""

import numpy as np

from qrelent.fgen import classify_hf, gf, hf, parse_spec, verify_representation

specs = ["log", "power:0.3", "scaled_power:0.5", "tsallis:0.7", "power_entropy:0.5"]
grid = [0.1, 0.3, 0.5, 0.7, 0.9]

print(f"{'generator':>20}  {'repr err':>9}  {'H_f shape':>10}  " + "  ".join(f"H({p})" for p in grid))
for s in specs:
    f = parse_spec(s)
    rep = verify_representation(f)
    values = "  ".join(f"{hf(f, p, method='quad'):6.4f}" for p in grid)
    print(f"{s:>20}  {rep.max_abs_error:9.1e}  {classify_hf(f):>10}  {values}")

# Cauchy-Schwarz: G_f(p, q)**2 <= H_f(p) H_f(q)
f = parse_spec("power_entropy:0.5")
p, q = 0.2, 0.7
print(f"\nG(0.2, 0.7) = {gf(f, p, q):.6f},  sqrt(H(0.2) H(0.7)) = {np.sqrt(hf(f, p) * hf(f, q)):.6f}")
