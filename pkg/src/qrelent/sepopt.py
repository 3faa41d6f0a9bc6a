"""Brute-force upper bounds on the quasi-relative entropy of entanglement.

Separable candidates are parametrised as mixtures of ``k`` product pure
states.  Each local qudit state uses ``d - 1`` hyperspherical angles for the
moduli and ``d - 1`` relative phases; the mixture weights are kept on the
probability simplex by Euclidean projection after every simplex move.  The
search is a derivative-free Nelder-Mead descent with dimension-adapted
coefficients, restarted from Haar-random ensembles and, optionally, from a
warm start.  Every value it reports is attained by an explicit separable
state, so it is an upper bound on the true minimum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fgen import GeneratorFunction
from .qre import qre_spectral_arrays
from .qstate import DensityMatrix, PureState

__all__ = [
    "INFINITE_PENALTY",
    "ProductEnsemble",
    "OptimizerConfig",
    "OracleResult",
    "assemble",
    "project_simplex",
    "vector_from_angles",
    "angles_from_vector",
    "ensemble_from_weights",
    "ensemble_from_result",
    "minimize",
    "nelder_mead",
]

INFINITE_PENALTY = 1e6


@dataclass(frozen=True, eq=False)
class ProductEnsemble:
    """``sum_i weights[i] |a_i b_i><a_i b_i|`` with unit local vectors."""

    weights: np.ndarray
    locals_a: np.ndarray
    locals_b: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        a = np.atleast_2d(np.asarray(self.locals_a, dtype=complex))
        b = np.atleast_2d(np.asarray(self.locals_b, dtype=complex))
        if not (len(w) == a.shape[0] == b.shape[0]):
            raise ValueError("weights and local states must have the same count")
        if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must lie on the probability simplex")
        for name, arr in (("A", a), ("B", b)):
            if np.max(np.abs(np.linalg.norm(arr, axis=1) - 1.0)) > 1e-12:
                raise ValueError(f"local states on {name} must have unit norm")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))
        object.__setattr__(self, "locals_a", a)
        object.__setattr__(self, "locals_b", b)

    @property
    def k(self):
        return len(self.weights)

    @property
    def dims(self):
        return (self.locals_a.shape[1], self.locals_b.shape[1])

    def matrix(self) -> np.ndarray:
        return _mixture(self.weights, self.locals_a, self.locals_b)

    def to_json(self):
        return {
            "weights": self.weights.tolist(),
            "a_re": self.locals_a.real.tolist(),
            "a_im": self.locals_a.imag.tolist(),
            "b_re": self.locals_b.real.tolist(),
            "b_im": self.locals_b.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data):
        a = np.asarray(data["a_re"]) + 1j * np.asarray(data["a_im"])
        b = np.asarray(data["b_re"]) + 1j * np.asarray(data["b_im"])
        return cls(np.asarray(data["weights"], dtype=float), a, b)

    def dumps(self):
        return json.dumps(self.to_json())


def _mixture(weights, a, b):
    v = np.einsum("ki,kj->kij", a, b).reshape(len(weights), -1)
    return np.einsum("k,ki,kj->ij", weights, v, v.conj())


def assemble(e: ProductEnsemble) -> DensityMatrix:
    """The separable density matrix described by ``e``."""
    return DensityMatrix(e.matrix(), e.dims)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{w : w >= 0, sum w = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    w = np.maximum(v - theta, 0.0)
    return w / w.sum()


def vector_from_angles(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Unit vector from ``d-1`` hyperspherical angles and ``d-1`` phases.

    Works on stacked parameters: ``theta`` and ``phi`` of shape ``(..., d-1)``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta)
    sprod = np.cumprod(np.sin(theta), axis=-1)
    out = np.empty(theta.shape[:-1] + (theta.shape[-1] + 1,), dtype=complex)
    out[..., 0] = c[..., 0]
    out[..., 1:-1] = sprod[..., :-1] * c[..., 1:]
    out[..., -1] = sprod[..., -1]
    out[..., 1:] *= np.exp(1j * phi)
    return out


def angles_from_vector(v: np.ndarray):
    """Inverse of :func:`vector_from_angles` up to a global phase."""
    v = np.asarray(v, dtype=complex)
    v = v * np.exp(-1j * np.angle(v[0])) if abs(v[0]) > 0 else v
    d = len(v)
    mod = np.abs(v)
    theta = np.zeros(d - 1)
    for i in range(d - 1):
        tail = np.linalg.norm(mod[i:])
        theta[i] = math.acos(min(1.0, mod[i] / tail)) if tail > 0 else 0.0
    phi = np.angle(v[1:]) - (np.angle(v[0]) if abs(v[0]) > 0 else 0.0)
    return theta, phi


@dataclass
class OptimizerConfig:
    """Restart count, iteration budget and seed of the oracle search.

    ``k`` is the number of mixture components; ``None`` means ``dA * dB``.
    Larger ``k`` is Caratheodory-safe for arbitrary separable states but
    the simplex search then stalls far from the optimum.
    """

    restarts: int = 50
    max_iters: int = 2000
    tol: float = 1e-9
    seed: int = 0
    k: Optional[int] = None

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.tol <= 0:
            raise ValueError("optimizer settings must be positive")
        if self.k is not None and self.k < 1:
            raise ValueError("component count must be positive")


@dataclass
class OracleResult:
    value: float
    ensemble: ProductEnsemble
    restart_values: list = field(default_factory=list)
    best_restart: int = 0
    evaluations: int = 0


class _Layout:
    # flat parameter vector: [raw weights (k) | theta_a (k, dA-1) | phi_a | theta_b | phi_b]

    def __init__(self, k, dA, dB):
        self.k, self.dA, self.dB = k, dA, dB
        sizes = [k, k * (dA - 1), k * (dA - 1), k * (dB - 1), k * (dB - 1)]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.size = int(self.offsets[-1])

    def split(self, x):
        o = self.offsets
        k, dA, dB = self.k, self.dA, self.dB
        lead = x.shape[:-1]
        w = x[..., o[0]:o[1]]
        ta = x[..., o[1]:o[2]].reshape(lead + (k, dA - 1))
        pa = x[..., o[2]:o[3]].reshape(lead + (k, dA - 1))
        tb = x[..., o[3]:o[4]].reshape(lead + (k, dB - 1))
        pb = x[..., o[4]:o[5]].reshape(lead + (k, dB - 1))
        return w, ta, pa, tb, pb

    def project(self, x):
        x = np.array(x, dtype=float)
        x[: self.k] = project_simplex(x[: self.k])
        return x

    def ensemble(self, x):
        w, ta, pa, tb, pb = self.split(x)
        return ProductEnsemble(project_simplex(w), vector_from_angles(ta, pa), vector_from_angles(tb, pb))

    def matrices(self, xs):
        # batched assembly for an (n, size) stack of projected parameter vectors
        w, ta, pa, tb, pb = self.split(xs)
        a = vector_from_angles(ta, pa)
        b = vector_from_angles(tb, pb)
        v = np.einsum("nki,nkj->nkij", a, b).reshape(xs.shape[0], self.k, -1)
        return np.einsum("nk,nki,nkj->nij", w, v, v.conj())

    def pack(self, ensemble):
        k = ensemble.k
        x = np.zeros(self.size)
        x[:k] = ensemble.weights
        ta = np.zeros((k, self.dA - 1))
        pa = np.zeros_like(ta)
        tb = np.zeros((k, self.dB - 1))
        pb = np.zeros_like(tb)
        for i in range(k):
            ta[i], pa[i] = angles_from_vector(ensemble.locals_a[i])
            tb[i], pb[i] = angles_from_vector(ensemble.locals_b[i])
        o = self.offsets
        x[o[1]:o[2]] = ta.ravel()
        x[o[2]:o[3]] = pa.ravel()
        x[o[3]:o[4]] = tb.ravel()
        x[o[4]:o[5]] = pb.ravel()
        return x


def nelder_mead(fun, x0, step, project, max_iters=2000, tol=1e-9, batch_fun=None):
    """Nelder-Mead with dimension-adapted coefficients and projected vertices.

    ``project`` maps any trial point back onto the feasible parameter set;
    it is applied to every vertex before evaluation.  ``batch_fun``, when
    given, evaluates a stack of points at once and is used for the initial
    simplex and for shrink steps.  Stops after ``max_iters`` iterations or
    when both the simplex diameter (max-norm) and the spread of vertex
    values fall below ``tol``.

    Returns ``(x_best, f_best, n_evaluations)``.
    """
    if batch_fun is None:
        def batch_fun(xs):
            return np.array([fun(x) for x in xs])
    n = len(x0)
    alpha, gamma = 1.0, 1.0 + 2.0 / n
    rho, sigma = 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n
    simplex = np.empty((n + 1, n))
    simplex[0] = project(x0)
    for i in range(n):
        y = simplex[0].copy()
        y[i] += step[i]
        simplex[i + 1] = project(y)
    values = np.asarray(batch_fun(simplex), dtype=float)
    nfev = n + 1

    for _ in range(max_iters):
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        if diameter < tol and values[-1] - values[0] < tol:
            break
        centroid = simplex[:-1].mean(axis=0)
        xr = project(centroid + alpha * (centroid - simplex[-1]))
        fr = fun(xr)
        nfev += 1
        if fr < values[0]:
            xe = project(centroid + gamma * (xr - centroid))
            fe = fun(xe)
            nfev += 1
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = project(centroid + rho * (xr - centroid))
        else:
            xc = project(centroid + rho * (simplex[-1] - centroid))
        fc = fun(xc)
        nfev += 1
        if fc < min(fr, values[-1]):
            simplex[-1], values[-1] = xc, fc
            continue
        # shrink towards the best vertex
        simplex[1:] = np.array([project(simplex[0] + sigma * (x - simplex[0])) for x in simplex[1:]])
        values[1:] = batch_fun(simplex[1:])
        nfev += n
    best = int(np.argmin(values))
    return simplex[best], float(values[best]), nfev


def ensemble_from_weights(q, dA, dB, k=None, seed=0) -> ProductEnsemble:
    """Ensemble for ``sum_j q_j |jj><jj|`` padded with zero-weight random terms."""
    q = np.asarray(q, dtype=float)
    k = k or len(q)
    if k < len(q):
        raise ValueError("component count smaller than the number of weights")
    rng = np.random.default_rng(seed)
    a = _haar_rows(k, dA, rng)
    b = _haar_rows(k, dB, rng)
    w = np.zeros(k)
    w[: len(q)] = q
    for j in range(len(q)):
        a[j] = np.eye(dA)[j]
        b[j] = np.eye(dB)[j]
    return ProductEnsemble(w / w.sum(), a, b)


def ensemble_from_result(result, k=None, seed=0) -> ProductEnsemble:
    """Warm-start ensemble reproducing the ``sigma_star`` of a closed-form result."""
    dA, dB = result.local_dims or (len(result.q), len(result.q))
    e = ensemble_from_weights(result.q, dA, dB, k, seed)
    r = len(result.q)
    a, b = e.locals_a.copy(), e.locals_b.copy()
    if result.basisA is not None:
        a[:r] = result.basisA[:, :r].T
    if result.basisB is not None:
        b[:r] = result.basisB[:, :r].T
    return ProductEnsemble(e.weights, a, b)


def _haar_rows(n, d, rng):
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _target_matrix(rho):
    if isinstance(rho, PureState):
        return rho.density().entries, rho.split
    return rho.entries, rho.split


def _batched_qre(lam, rho_vecs, f, sigmas):
    # spectral sum for a stack of sigmas sharing one rho (support eigenpairs only)
    mu, psi = np.linalg.eigh(sigmas)
    overlap = np.abs(np.matmul(psi.conj().swapaxes(-1, -2), rho_vecs)) ** 2  # (n, k, j)
    pos = mu > 1e-12
    weighted = overlap * lam
    ratio = np.where(pos, mu, 1.0)[:, :, None] / lam
    out = np.sum(np.where(pos[:, :, None], f(ratio) * weighted, 0.0), axis=(1, 2))
    if pos.all():
        return out
    kernel = ~pos[:, :, None]
    if math.isinf(f.f_at_zero):
        bad = np.any(kernel & (overlap > 1e-14), axis=(1, 2))
        return np.where(bad, np.inf, out)
    return out + f.f_at_zero * np.sum(np.where(kernel, weighted, 0.0), axis=(1, 2))


def minimize(rho, f: GeneratorFunction, cfg: Optional[OptimizerConfig] = None,
             warm_start: Optional[ProductEnsemble] = None) -> OracleResult:
    """Minimise ``S_f(rho || sigma)`` over ``k``-term product mixtures.

    Restart 0 starts from ``warm_start`` when given; all other restarts use
    Haar-random local states with uniform weights.  Infinite objective
    values are replaced by a penalty of 1e6 during the search.  The result
    is deterministic for a fixed ``cfg.seed``; ties go to the lowest restart
    index.
    """
    cfg = cfg or OptimizerConfig()
    target, split = _target_matrix(rho)
    if split is None:
        raise ValueError("oracle needs a bipartite split on rho")
    dA, dB = split
    k = cfg.k or dA * dB
    if warm_start is not None and warm_start.k > k:
        raise ValueError("warm start has more components than cfg.k")
    layout = _Layout(k, dA, dB)
    rng = np.random.default_rng(cfg.seed)

    w_rho, v_rho = np.linalg.eigh(target)
    keep = w_rho > 1e-12
    rho_vals, rho_vecs = w_rho[keep], v_rho[:, keep]
    counter = [0]

    def objective(x):
        return float(batch(x[None, :])[0])

    def batch(xs):
        counter[0] += len(xs)
        vals = _batched_qre(rho_vals, rho_vecs, f, layout.matrices(xs))
        return np.where(np.isinf(vals), INFINITE_PENALTY, vals)

    step = np.concatenate([
        np.full(k, 0.5 / k),
        np.full(layout.size - k, 0.4),
    ])

    restart_values = []
    best_val, best_x, best_idx = math.inf, None, 0
    for r in range(cfg.restarts):
        if r == 0 and warm_start is not None:
            if warm_start.k < k:
                pad = _haar_rows(k - warm_start.k, dA, rng), _haar_rows(k - warm_start.k, dB, rng)
                warm_start = ProductEnsemble(
                    np.concatenate([warm_start.weights, np.zeros(k - warm_start.k)]),
                    np.vstack([warm_start.locals_a, pad[0]]),
                    np.vstack([warm_start.locals_b, pad[1]]),
                )
            x0 = layout.pack(warm_start)
        else:
            x0 = layout.pack(ProductEnsemble(np.full(k, 1.0 / k), _haar_rows(k, dA, rng), _haar_rows(k, dB, rng)))
        x, val, _ = nelder_mead(objective, x0, step, layout.project, cfg.max_iters, cfg.tol, batch)
        restart_values.append(val)
        if val < best_val:
            best_val, best_x, best_idx = val, x, r
    ensemble = layout.ensemble(best_x)
    # report the objective of the exact projected ensemble that is returned
    value = qre_spectral_arrays(target, ensemble.matrix(), f)
    return OracleResult(value, ensemble, restart_values, best_idx, counter[0])
