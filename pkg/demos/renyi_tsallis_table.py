"""Renyi and Tsallis entanglement of maximally entangled states.

The Renyi entanglement equals the marginal Renyi entropy log d, while the
Tsallis entanglement falls strictly below the marginal Tsallis entropy.
"""

from qrelent.cli import table_rows

print(f"{'d':>2} {'alpha':>6} {'Renyi E':>10} {'log d':>10} {'Tsallis E':>10} {'marginal':>10}")
for r in table_rows([2, 3, 4], [0.3, 0.5, 0.7]):
    print(f"{r['d']:>2} {r['alpha']:>6} {r['renyi_E']:>10.6f} {r['renyi_marginal']:>10.6f} "
          f"{r['tsallis_E']:>10.6f} {r['tsallis_marginal']:>10.6f}")
