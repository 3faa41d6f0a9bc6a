"""Seeded invariant suites behind ``qrelent verify``.

Each suite returns a list of :class:`Check` records.  A check stores the
worst observed value of a quantity that must stay on one side of a bound,
and its margin (positive when the invariant holds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closest import (
    certify,
    closest_maxent,
    closest_pure_flatH,
    closest_two_qubit,
    solve_q,
    stationarity,
)
from .fgen import classify_hf, gf, hf, parse_spec, verify_representation
from .qre import qre_modular, qre_spectral
from .qstate import DensityMatrix, random_state, random_unitary, schmidt_state
from .sepopt import OptimizerConfig, ensemble_from_result, minimize

__all__ = [
    "Check",
    "SAMPLE_SPECS",
    "SUITES",
    "suite_functions",
    "suite_divergence",
    "suite_theorems",
    "run_suite",
    "random_channel",
]

# one representative per builtin family
SAMPLE_SPECS = ("log", "power:0.3", "scaled_power:0.5", "tsallis:0.7", "power_entropy:0.5")

GRID_20 = (np.arange(20) + 0.5) / 20


@dataclass
class Check:
    """One invariant with its worst-case observation."""

    suite: str
    name: str
    worst: float
    bound: float
    upper: bool = True  # True: worst <= bound is required

    @property
    def margin(self) -> float:
        return self.bound - self.worst if self.upper else self.worst - self.bound

    @property
    def passed(self) -> bool:
        return bool(self.margin >= 0 and not math.isnan(self.worst))

    def to_json(self):
        return {
            "suite": self.suite,
            "name": self.name,
            "worst": self.worst,
            "bound": self.bound,
            "margin": self.margin,
            "passed": self.passed,
        }


# ---------------------------------------------------------------------------
# functions


def suite_functions(seed=0, specs=SAMPLE_SPECS):
    """Integral representation, Cauchy-Schwarz grid, closed-form H_f, classification."""
    checks = []
    for s in specs:
        f = parse_spec(s)
        rep = verify_representation(f)
        checks.append(Check("functions", f"representation[{s}]", rep.max_abs_error, rep.tolerance))

        h = {p: hf(f, p, method="quad") for p in GRID_20}
        cs_worst = -math.inf
        mean_worst = -math.inf
        for i, p in enumerate(GRID_20):
            for q in GRID_20[i:]:
                g = gf(f, p, q)
                cs_worst = max(cs_worst, g * g - h[p] * h[q])
                mean_worst = max(mean_worst, g - hf(f, math.sqrt(p * q), method="quad"))
        checks.append(Check("functions", f"G^2 <= H(p)H(q) [{s}]", cs_worst, 1e-10))
        checks.append(Check("functions", f"G(p,q) <= H(sqrt(pq)) [{s}]", mean_worst, 1e-10))

        if f.hf_closed is not None:
            err = max(abs(h[p] - f.hf_closed(p)) for p in GRID_20)
            checks.append(Check("functions", f"closed-form H_f [{s}]", err, 1e-8))

        expected = "constant" if f.name == "neg_log" else "increasing"
        got = classify_hf(f)
        checks.append(Check("functions", f"classify_hf[{s}] == {expected}", float(got != expected), 0.0))
    return checks


# ---------------------------------------------------------------------------
# divergence


def random_channel(d_in, d_out, rng, d_env=None):
    """Kraus operators of ``rho -> Tr_E(V rho V^dag)`` for a random isometry ``V``."""
    d_env = d_env or d_in
    u = random_unitary(d_out * d_env, rng)
    v = u[:, :d_in]  # isometry C^d_in -> C^d_out (x) C^d_env
    v = v.reshape(d_out, d_env, d_in)
    return [v[:, e, :] for e in range(d_env)]


def apply_channel(kraus, rho):
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    out = sum(k @ m @ k.conj().T for k in kraus)
    return DensityMatrix(out)


def suite_divergence(seed=0, trials=100, specs=SAMPLE_SPECS):
    """Nonnegativity, identity, unitary invariance, DPI and spectral/modular agreement."""
    rng = np.random.default_rng(seed)
    funcs = [parse_spec(s) for s in specs]
    worst = {
        "S_f >= 0": math.inf,
        "S_f(rho||rho) = 0": 0.0,
        "unitary invariance": 0.0,
        "DPI": -math.inf,
        "spectral = modular": 0.0,
    }
    for trial in range(trials):
        d = int(rng.integers(2, 5))
        f = funcs[trial % len(funcs)]
        rho = random_state("density", d, rng)
        sigma = random_state("density", d, rng)
        s = qre_spectral(rho, sigma, f)
        worst["S_f >= 0"] = min(worst["S_f >= 0"], s)
        worst["S_f(rho||rho) = 0"] = max(worst["S_f(rho||rho) = 0"], abs(qre_spectral(rho, rho, f)))

        u = random_unitary(d, rng)
        rho_u = DensityMatrix(u @ rho.entries @ u.conj().T)
        sigma_u = DensityMatrix(u @ sigma.entries @ u.conj().T)
        worst["unitary invariance"] = max(worst["unitary invariance"], abs(qre_spectral(rho_u, sigma_u, f) - s))

        d_out = int(rng.integers(2, 5))
        kraus = random_channel(d, d_out, rng)
        s_out = qre_spectral(apply_channel(kraus, rho), apply_channel(kraus, sigma), f)
        worst["DPI"] = max(worst["DPI"], s_out - s)

        worst["spectral = modular"] = max(worst["spectral = modular"], abs(qre_modular(rho, sigma, f) - s))

    return [
        Check("divergence", "S_f >= 0", worst["S_f >= 0"], -1e-10, upper=False),
        Check("divergence", "S_f(rho||rho) = 0", worst["S_f(rho||rho) = 0"], 1e-10),
        Check("divergence", "unitary invariance", worst["unitary invariance"], 1e-9),
        Check("divergence", "DPI", worst["DPI"], 1e-9),
        Check("divergence", "spectral = modular", worst["spectral = modular"], 1e-9),
    ]


# ---------------------------------------------------------------------------
# theorems


def bullet_violation(p, q, kind):
    """Amount by which ``q`` breaks the ordering laws for the given ``H_f`` trend."""
    side = (p - 0.5) * (q - 0.5)
    bad = max(0.0, -side) if p != 0.5 else abs(q - 0.5)
    trend = (p - 0.5) * (q - p)
    if kind == "increasing":
        bad = max(bad, -trend)
    elif kind == "decreasing":
        bad = max(bad, trend)
    elif kind == "constant":
        bad = max(bad, abs(q - p))
    return bad


def suite_theorems(seed=0, specs=SAMPLE_SPECS, oracle_restarts=50, oracle_iters=100):
    """Cross-theorem consistency, ordering laws, recomputation and oracle dominance."""
    checks = []
    p_grid = np.round(np.arange(1, 20) * 0.05, 12)
    for s in specs:
        f = parse_spec(s)
        a = closest_two_qubit(0.5, f, samples=0)
        b = closest_maxent(2, f, samples=0)
        gap = max(abs(a.entanglement - b.entanglement),
                  float(np.max(np.abs(a.sigma_star.entries - b.sigma_star.entries))))
        checks.append(Check("theorems", f"two-qubit(1/2) = maxent(2) [{s}]", gap, 1e-10))

        kind = classify_hf(f)
        bad, stat = 0.0, 0.0
        for p in p_grid:
            q = solve_q(p, f, kind=kind)
            bad = max(bad, bullet_violation(p, q, kind))
            stat = max(stat, *map(abs, stationarity(p, q, f)))
        checks.append(Check("theorems", f"ordering laws [{s}]", bad, 0.0))
        checks.append(Check("theorems", f"stationarity [{s}]", stat, 1e-8))

        results = [b, closest_two_qubit(0.75, f, samples=0)]
        if kind == "constant":
            results.append(closest_pure_flatH([0.5, 0.3, 0.2], f, samples=0))
        recompute = 0.0
        cert = math.inf
        for r in results:
            rho = schmidt_state(r.p)
            recompute = max(recompute, abs(qre_spectral(rho, r.sigma_star, f) - r.entanglement))
            cert = min(cert, certify(r, f, 200, seed).min_directional_derivative)
        checks.append(Check("theorems", f"E_f recomputation [{s}]", recompute, 1e-10))
        checks.append(Check("theorems", f"certificate minimum [{s}]", cert, -1e-8, upper=False))

        below, above = -math.inf, -math.inf
        for r in results[:2]:
            cfg = OptimizerConfig(restarts=oracle_restarts, max_iters=oracle_iters, seed=seed)
            o = minimize(schmidt_state(r.p), f, cfg, warm_start=ensemble_from_result(r))
            below = max(below, r.entanglement - o.value)
            above = max(above, o.value - r.entanglement)
        checks.append(Check("theorems", f"oracle never beats E_f [{s}]", below, 1e-6))
        checks.append(Check("theorems", f"oracle within 1e-3 of E_f [{s}]", above, 1e-3))
    return checks


SUITES = {
    "functions": suite_functions,
    "divergence": suite_divergence,
    "theorems": suite_theorems,
}


def run_suite(name, seed=0):
    """Run one named suite, or every suite for ``"all"``."""
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](seed)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](seed)
