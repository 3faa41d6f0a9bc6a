"""Quasi-relative entropies between two-qubit states.

Evaluates several divergences between a Bell state and the maximally mixed
state, then compares the spectral and modular-operator routes on a random
full-rank pair.
"""

from qrelent.fgen import parse_spec
from qrelent.qre import alpha_divergence, qre_modular, qre_spectral, renyi_relative, tsallis_relative, umegaki
from qrelent.qstate import DensityMatrix, bell_state, random_state

psi = bell_state(2)
mixed = DensityMatrix.maximally_mixed(4, (2, 2))

print("Bell state against I/4")
print(f"  Umegaki          {umegaki(psi, mixed):.6f}   (ln 4)")
print(f"  alpha = 1/2      {alpha_divergence(psi, mixed, 0.5):.6f}")
print(f"  Renyi alpha=1/2  {renyi_relative(psi, mixed, 0.5):.6f}")
print(f"  Tsallis q=1/2    {tsallis_relative(psi, mixed, 0.5):.6f}")

rho = random_state("density", (2, 2), 1)
sigma = random_state("density", (2, 2), 2)
print("\nrandom full-rank pair: spectral vs modular")
for s in ["log", "power:0.3", "tsallis:0.7"]:
    f = parse_spec(s)
    a, b = qre_spectral(rho, sigma, f), qre_modular(rho, sigma, f)
    print(f"  {s:>12}  {a:.12f}  {b:.12f}  diff {abs(a - b):.1e}")
