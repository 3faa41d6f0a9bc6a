"""Closest separable states to pure states under a quasi-relative entropy.

Three closed-form constructions are implemented, for a pure state with
Schmidt coefficients ``p`` and candidate ``sigma(q) = sum_j q_j |jj><jj|``:

* maximally entangled input: ``q_j = 1/d`` and ``E_f = f(1/d)`` for every
  generator;
* generators with constant ``H_f``: ``q = p`` and ``E_f = sum_j p_j f(p_j)``;
* two-qubit input with monotone ``H_f``: ``q`` solves
  ``p = q H(1-q) / (q H(1-q) + (1-q) H(q))``.

Optimality is spot-checked by the directional derivative of
``x -> S_f(rho || (1-x) sigma* + x sigma)`` towards random product states,
which must be non-negative at the minimiser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fgen import GeneratorFunction, classify_hf, gf, hf
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .qre import qre_spectral
from .qstate import DensityMatrix, PureState, schmidt_decompose

__all__ = [
    "CERTIFICATE_TOL",
    "HypothesisError",
    "SolveError",
    "Certificate",
    "ClosestResult",
    "closest_maxent",
    "closest_pure_flatH",
    "closest_two_qubit",
    "closest_separable",
    "solve_q",
    "pq_ratio",
    "stationarity",
    "directional_derivative",
    "directional_derivatives",
    "certify",
    "sigma_of_weights",
]

CERTIFICATE_TOL = 1e-8
_EPS = 1e-9


class HypothesisError(ValueError):
    """A theorem hypothesis does not hold for the requested input."""

    def __init__(self, message, theorem=None):
        super().__init__(message)
        self.theorem = theorem


class SolveError(ArithmeticError):
    """The implicit equation for ``q`` could not be solved."""

    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = samples


@dataclass
class Certificate:
    """Sampled directional-derivative check at the proposed minimiser."""

    theorem: str
    min_directional_derivative: float
    samples: int
    seed: Optional[int]
    stationarity: Optional[tuple] = None
    tolerance: float = CERTIFICATE_TOL

    @property
    def passed(self) -> bool:
        ok = self.min_directional_derivative >= -self.tolerance
        if self.stationarity is not None:
            ok = ok and all(abs(s) <= self.tolerance for s in self.stationarity)
        return bool(ok)

    def to_json(self):
        return {
            "theorem": self.theorem,
            "min_directional_derivative": self.min_directional_derivative,
            "samples": self.samples,
            "seed": self.seed,
            "stationarity": list(self.stationarity) if self.stationarity is not None else None,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class ClosestResult:
    """Entanglement value, closest separable state and its certificate."""

    entanglement: float
    sigma_star: DensityMatrix
    q: np.ndarray
    p: np.ndarray
    theorem: str
    function: str
    certificate: Optional[Certificate] = None
    local_dims: tuple = field(default=None)
    basisA: Optional[np.ndarray] = None
    basisB: Optional[np.ndarray] = None

    def to_json(self):
        from .qstate import state_to_json

        return {
            "theorem": self.theorem,
            "function": self.function,
            "entanglement": self.entanglement,
            "p": list(map(float, self.p)),
            "q": list(map(float, self.q)),
            "sigma_star": state_to_json(self.sigma_star),
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


def sigma_of_weights(q, basisA=None, basisB=None) -> DensityMatrix:
    """``sum_j q_j |a_j b_j><a_j b_j|``; computational bases by default."""
    q = np.asarray(q, dtype=float)
    d = len(q)
    ua = np.eye(d) if basisA is None else np.asarray(basisA)
    ub = np.eye(d) if basisB is None else np.asarray(basisB)
    dA, dB = ua.shape[0], ub.shape[0]
    m = np.zeros((dA * dB, dA * dB), dtype=complex)
    for j, w in enumerate(q):
        if w:
            v = np.kron(ua[:, j], ub[:, j])
            m += w * np.outer(v, v.conj())
    return DensityMatrix(m, (dA, dB))


def _check_distribution(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("Schmidt coefficients must be a non-empty vector")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("Schmidt coefficients must be a probability vector")
    return p


def _ent_value(p, q, f):
    mask = p > 0
    return float(np.sum(p[mask] * f(q[mask])))


# ---------------------------------------------------------------------------
# directional derivative


def _derivative_data(p, q, f, spec):
    support = np.flatnonzero(p > 0)
    if np.any(q[support] <= 0):
        raise ValueError("q must be positive wherever p is positive")
    ps, qs = p[support], q[support]
    h = np.array([hf(f, x, spec) for x in qs])
    n = len(support)
    g = np.empty((n, n))
    for i in range(n):
        g[i, i] = h[i]
        for k in range(i + 1, n):
            g[i, k] = g[k, i] = gf(f, qs[i], qs[k], spec)
    w = np.sqrt(ps / qs)
    base = float(np.dot(ps, h))
    return support, base, g * np.outer(w, w)


def directional_derivatives(p, q, f, a, b, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Vectorised :func:`directional_derivative` over rows of ``a`` and ``b``.

    ``a`` and ``b`` have shape ``(n, dA)`` and ``(n, dB)`` and hold local
    amplitudes in the Schmidt bases; only the first ``len(p)`` coordinates
    enter.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    support, base, m = _derivative_data(p, q, f, spec)
    c = a[:, support] * b[:, support]
    quad_form = np.einsum("nj,jk,nk->n", c.conj(), m, c).real
    return base - quad_form


def directional_derivative(p, q, f: GeneratorFunction, a, b, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Derivative of ``S_f(psi || (1-x) sigma(q) + x |ab><ab|)`` at ``x = 0``.

    Equal to ``sum_j p_j H(q_j) - sum_jk sqrt(p_j p_k / (q_j q_k))
    G(q_j, q_k) a_k b_k conj(a_j b_j)`` where ``psi`` has Schmidt
    coefficients ``p`` and ``a``, ``b`` are unit vectors in the Schmidt
    bases.
    """
    return float(directional_derivatives(p, q, f, [a], [b], spec)[0])


def _haar_rows(n, d, rng):
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def certify(result: ClosestResult, f: GeneratorFunction, samples: int = 1000, seed=0,
            spec: QuadratureSpec = DEFAULT_SPEC) -> Certificate:
    """Minimum directional derivative over ``samples`` random product states.

    Passes when the minimum is at least -1e-8.  The sample sequence depends
    only on ``seed``.
    """
    rng = np.random.default_rng(seed)
    d = len(result.p)
    dA, dB = result.local_dims or (d, d)
    if samples > 0 and np.count_nonzero(result.p) > 1:
        a = _haar_rows(samples, dA, rng)
        b = _haar_rows(samples, dB, rng)
        values = directional_derivatives(result.p, result.q, f, a, b, spec)
        worst = float(values.min())
    else:
        worst = 0.0
    stat = None
    if result.theorem == "qubit" and 0.0 < result.p[0] < 1.0:
        stat = stationarity(result.p[0], result.q[0], f, spec)
    return Certificate(result.theorem, worst, int(samples), seed, stat)


# ---------------------------------------------------------------------------
# theorem constructors


def _finish(result, f, samples, seed, spec):
    if samples:
        result.certificate = certify(result, f, samples, seed, spec)
    return result


def closest_maxent(d: int, f: GeneratorFunction, samples: int = 1000, seed=0,
                   spec: QuadratureSpec = DEFAULT_SPEC) -> ClosestResult:
    """Closest separable state to ``d**-1/2 sum_j |jj>``: uniform weights, ``E = f(1/d)``."""
    d = int(d)
    if d < 2:
        raise ValueError("maximally entangled state needs d >= 2")
    q = np.full(d, 1.0 / d)
    result = ClosestResult(
        entanglement=float(f(1.0 / d)),
        sigma_star=sigma_of_weights(q),
        q=q,
        p=q.copy(),
        theorem="max",
        function=repr(f),
        local_dims=(d, d),
    )
    return _finish(result, f, samples, seed, spec)


def closest_pure_flatH(p, f: GeneratorFunction, samples: int = 1000, seed=0,
                       spec: QuadratureSpec = DEFAULT_SPEC) -> ClosestResult:
    """Closest separable state ``sigma(p)`` for generators with constant ``H_f``.

    Raises
    ------
    HypothesisError
        If ``H_f`` is not constant on the classification grid.
    """
    p = _check_distribution(p)
    if f.a_f != 0:
        raise HypothesisError(f"{f!r} has a_f > 0", theorem="flatH")
    kind = classify_hf(f, spec)
    if kind != "constant":
        raise HypothesisError(
            f"H_f of {f!r} is {kind}, not constant in p; the flat-H_f construction does not apply",
            theorem="flatH",
        )
    result = ClosestResult(
        entanglement=_ent_value(p, p, f),
        sigma_star=sigma_of_weights(p),
        q=p.copy(),
        p=p,
        theorem="flatH",
        function=repr(f),
        local_dims=(len(p), len(p)),
    )
    return _finish(result, f, samples, seed, spec)


def pq_ratio(q: float, f: GeneratorFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Right-hand side ``q H(1-q) / (q H(1-q) + (1-q) H(q))``."""
    h_q = hf(f, q, spec)
    h_1q = hf(f, 1.0 - q, spec)
    num = q * h_1q
    return num / (num + (1.0 - q) * h_q)


def stationarity(p: float, q: float, f: GeneratorFunction, spec: QuadratureSpec = DEFAULT_SPEC):
    """Derivatives towards ``|00>`` and ``|11>`` for the two-qubit candidate.

    Returns ``((1-p) H(1-q) - p (1-q)/q H(q), p H(q) - (1-p) q/(1-q) H(1-q))``.
    """
    h_q = hf(f, q, spec)
    h_1q = hf(f, 1.0 - q, spec)
    d0 = (1.0 - p) * h_1q - p * (1.0 - q) / q * h_q
    d1 = p * h_q - (1.0 - p) * q / (1.0 - q) * h_1q
    return float(d0), float(d1)


def solve_q(p: float, f: GeneratorFunction, spec: QuadratureSpec = DEFAULT_SPEC,
            kind: Optional[str] = None) -> float:
    """Solve ``pq_ratio(q) = p`` for ``q`` in (0, 1) by bisection.

    The bracket follows from the monotonicity of ``H_f``: for ``p > 1/2``
    the root lies in ``(p, 1)`` when ``H_f`` increases and in ``(1/2, p)``
    when it decreases, mirrored for ``p < 1/2``.  If the bracket shows no
    sign change a grid scan over ``(1e-9, 1 - 1e-9)`` looks for one.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if f.a_f != 0:
        raise HypothesisError(f"{f!r} has a_f > 0", theorem="qubit")
    kind = kind or classify_hf(f, spec)
    if kind == "other":
        raise HypothesisError(f"H_f of {f!r} is neither constant nor monotone", theorem="qubit")
    if p == 0.5:
        return 0.5
    if kind == "constant":
        q = p
    else:
        upper = p > 0.5
        if (kind == "increasing") == upper:
            lo, hi = (p, 1.0 - _EPS) if upper else (_EPS, p)
        else:
            lo, hi = (0.5, p) if upper else (p, 0.5)

        def g(x):
            return pq_ratio(x, f, spec) - p

        g_lo, g_hi = g(lo), g(hi)
        if g_lo * g_hi > 0:
            lo, hi, g_lo = _scan_bracket(g, p)
        # bisection to 1e-12 in q
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            g_mid = g(mid)
            if g_mid == 0:
                lo = hi = mid
                break
            if (g_mid < 0) == (g_lo < 0):
                lo, g_lo = mid, g_mid
            else:
                hi = mid
        q = 0.5 * (lo + hi)
    residual = abs(pq_ratio(q, f, spec) - p)
    if residual > 1e-10:
        raise SolveError(f"solve_q residual {residual:.3e} exceeds 1e-10 at p={p}")
    return q


def _scan_bracket(g, p):
    grid = np.linspace(_EPS, 1.0 - _EPS, 201)
    values = np.array([g(x) for x in grid])
    flips = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)
    if flips.size == 0:
        raise SolveError(
            f"no sign change of pq_ratio(q) - {p} on (1e-9, 1 - 1e-9)",
            samples=list(zip(grid[::20].tolist(), values[::20].tolist())),
        )
    i = flips[0]
    return grid[i], grid[i + 1], values[i]


def closest_two_qubit(p: float, f: GeneratorFunction, samples: int = 1000, seed=0,
                      spec: QuadratureSpec = DEFAULT_SPEC) -> ClosestResult:
    """Closest separable state ``q|00><00| + (1-q)|11><11|`` to ``sqrt(p)|00> + sqrt(1-p)|11>``."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p in (0.0, 1.0):
        q = p
    else:
        q = solve_q(p, f, spec)
    pv = np.array([p, 1.0 - p])
    qv = np.array([q, 1.0 - q])
    result = ClosestResult(
        entanglement=0.0 if p in (0.0, 1.0) else _ent_value(pv, qv, f),
        sigma_star=sigma_of_weights(qv),
        q=qv,
        p=pv,
        theorem="qubit",
        function=repr(f),
        local_dims=(2, 2),
    )
    return _finish(result, f, samples, seed, spec)


def closest_separable(psi: PureState, f: GeneratorFunction, samples: int = 1000, seed=0,
                      spec: QuadratureSpec = DEFAULT_SPEC) -> ClosestResult:
    """Dispatch an arbitrary bipartite pure state to the applicable construction.

    The state is Schmidt-decomposed; the returned ``sigma_star`` is written
    in the input's local Schmidt bases.  Schmidt rank one gives ``E = 0``
    with the product state itself.
    """
    sf = schmidt_decompose(psi)
    p = sf.coefficients
    dA, dB = psi.split
    nonzero = p[p > 1e-12]
    if nonzero.size <= 1:
        q = np.zeros_like(p)
        q[0] = 1.0
        result = ClosestResult(0.0, sigma_of_weights(q), q, p, "product", repr(f))
    elif nonzero.size == p.size and np.ptp(p) <= 1e-12:
        result = closest_maxent(p.size, f, 0, seed, spec)
    else:
        kind = classify_hf(f, spec)
        if kind == "constant":
            result = closest_pure_flatH(p, f, 0, seed, spec)
        elif p.size == 2:
            result = closest_two_qubit(p[0], f, 0, seed, spec)
        else:
            raise HypothesisError(
                f"Schmidt rank {p.size} needs constant H_f, but H_f of {f!r} is {kind}; "
                "the two-qubit construction only covers Schmidt rank 2",
                theorem="flatH",
            )
    result.p = p
    result.local_dims = (dA, dB)
    result.basisA, result.basisB = sf.basisA, sf.basisB
    result.sigma_star = sigma_of_weights(result.q, sf.basisA, sf.basisB)
    return _finish(result, f, samples, seed, spec)
