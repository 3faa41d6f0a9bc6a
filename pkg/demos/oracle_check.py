"""Brute-force check of a closed-form entanglement value.

Minimises S_f(rho || sigma) directly over mixtures of product states, from
random starts only, and compares with the closed-form two-qubit answer.
"""

import time

from qrelent.closest import closest_two_qubit
from qrelent.fgen import make_builtin
from qrelent.qstate import schmidt_state
from qrelent.sepopt import OptimizerConfig, assemble, minimize

f = make_builtin("power_entropy", 0.5)
p = 0.75
exact = closest_two_qubit(p, f, samples=0)

start = time.perf_counter()
res = minimize(schmidt_state([p, 1 - p]), f, OptimizerConfig(restarts=5, max_iters=2000, seed=0))
elapsed = time.perf_counter() - start

print(f"closed form  E = {exact.entanglement:.8f}  (q = {exact.q[0]:.6f})")
print(f"oracle       E = {res.value:.8f}  after {res.evaluations} evaluations in {elapsed:.1f} s")
print(f"per-restart values: {[round(v, 6) for v in res.restart_values]}")
sigma = assemble(res.ensemble)
print("oracle sigma diagonal:", sigma.entries.diagonal().real.round(4))
