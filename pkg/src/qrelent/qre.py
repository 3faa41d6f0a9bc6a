"""Quasi-relative entropy ``S_f(rho || sigma)`` and named divergences.

Two independent evaluation routes are provided.  :func:`qre_spectral`
sums ``lambda_j f(mu_k / lambda_j) |<psi_k|phi_j>|**2`` over the
eigen-decompositions of both states; :func:`qre_modular` builds the relative
modular operator as a ``d**2 x d**2`` matrix, applies ``f`` to it and pairs
the result with ``rho**1/2`` in the Hilbert-Schmidt inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fgen import GeneratorFunction, make_builtin
from .qstate import ZERO_EIGENVALUE_TOL, DensityMatrix, PureState, StateError

__all__ = [
    "OVERLAP_TOL",
    "ModularOperator",
    "modular_operator",
    "qre_spectral",
    "qre_spectral_arrays",
    "qre_modular",
    "umegaki",
    "umegaki_direct",
    "trace_power_overlap",
    "alpha_divergence",
    "renyi_relative",
    "tsallis_relative",
    "divergence",
]

OVERLAP_TOL = 1e-14


def _entries(state):
    if isinstance(state, PureState):
        state = state.density()
    if isinstance(state, DensityMatrix):
        return state.entries
    return np.asarray(state, dtype=complex)


def _eigh_desc(m):
    w, v = np.linalg.eigh(m)
    w = w[::-1]
    w = np.where(np.abs(w) <= ZERO_EIGENVALUE_TOL, 0.0, w)
    return w, v[:, ::-1]


def qre_spectral_arrays(rho: np.ndarray, sigma: np.ndarray, f: GeneratorFunction) -> float:
    """Spectral formula on raw Hermitian arrays; no state validation.

    Terms with ``lambda_j = 0`` are dropped.  Terms with ``mu_k = 0`` and
    overlap above 1e-14 contribute ``lambda_j f(0+)``, which is ``inf`` for
    generators unbounded at zero.
    """
    lam, phi = _eigh_desc(rho)
    mu, psi = _eigh_desc(sigma)
    overlap = np.abs(psi.conj().T @ phi) ** 2  # [k, j] = |<psi_k|phi_j>|^2
    keep_j = lam > 0
    lam = lam[keep_j]
    overlap = overlap[:, keep_j]
    mu = np.clip(mu, 0.0, None)
    pos = mu > 0
    total = 0.0
    if np.any(~pos):
        f0 = f.f_at_zero
        if math.isinf(f0):
            if np.any(overlap[~pos] > OVERLAP_TOL):
                return math.inf
        else:
            total += f0 * float(np.sum(overlap[~pos] * lam))
    ratio = mu[pos, None] / lam[None, :]
    total += float(np.sum(lam[None, :] * f(ratio) * overlap[pos]))
    return total


def _check_pair(rho, sigma):
    if rho.shape != sigma.shape:
        raise StateError(f"dimension mismatch: {rho.shape[0]} vs {sigma.shape[0]}")


def qre_spectral(rho, sigma, f: GeneratorFunction) -> float:
    """``S_f(rho || sigma)`` by the spectral sum; may return ``inf``."""
    r, s = _entries(rho), _entries(sigma)
    _check_pair(r, s)
    return qre_spectral_arrays(r, s, f)


@dataclass(frozen=True, eq=False)
class ModularOperator:
    """Relative modular operator ``X -> sigma X rho**-1`` on row-major vec(X).

    ``eigenvalues[j, k] = mu_k / lambda_j`` with eigenvector
    ``|psi_k><phi_j|``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    sigma_vectors: np.ndarray
    rho_vectors: np.ndarray

    @property
    def dim(self):
        return self.sigma_vectors.shape[0]

    def apply(self, x):
        d = self.dim
        return (self.matrix @ np.asarray(x, dtype=complex).reshape(-1)).reshape(d, d)

    def projector(self, j, k):
        """``P_{j,k}(X) = <psi_k|X|phi_j> |psi_k><phi_j|`` as a d^2 x d^2 matrix."""
        e = np.outer(self.sigma_vectors[:, k], self.rho_vectors[:, j].conj()).reshape(-1)
        return np.outer(e, e.conj())

    def apply_function(self, f):
        w, v = np.linalg.eigh(self.matrix)
        return (v * f(np.clip(w, 0.0, None))) @ v.conj().T


def modular_operator(sigma, rho) -> ModularOperator:
    """Build ``Delta_{sigma, rho}``; ``rho`` must be invertible."""
    s, r = _entries(sigma), _entries(rho)
    _check_pair(r, s)
    lam, phi = _eigh_desc(r)
    mu, psi = _eigh_desc(s)
    if np.any(lam <= 0):
        raise StateError("modular operator needs an invertible rho")
    r_inv = (phi / lam) @ phi.conj().T
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    matrix = np.kron(s, r_inv.T)
    matrix = 0.5 * (matrix + matrix.conj().T)
    eig = mu[None, :] / lam[:, None]
    return ModularOperator(matrix, eig, psi, phi)


def qre_modular(rho, sigma, f: GeneratorFunction) -> float:
    """``S_f(rho || sigma)`` from the modular operator, full-rank states only.

    ``Tr(f(Delta) rho)`` is evaluated as ``<rho**1/2, f(Delta) rho**1/2>``
    in the Hilbert-Schmidt inner product.
    """
    r, s = _entries(rho), _entries(sigma)
    _check_pair(r, s)
    lam, phi = _eigh_desc(r)
    mu, _ = _eigh_desc(s)
    if np.any(lam <= 0) or np.any(mu <= 0):
        raise StateError("qre_modular needs strictly positive states; use qre_spectral")
    delta = modular_operator(s, r)
    sqrt_rho = (phi * np.sqrt(lam)) @ phi.conj().T
    vec = sqrt_rho.reshape(-1)
    return float(np.real(vec.conj() @ delta.apply_function(f) @ vec))


def _mpow(m, power):
    w, v = _eigh_desc(m)
    w = np.clip(w, 0.0, None)
    with np.errstate(divide="ignore"):
        wp = np.where(w > 0, w ** power, 0.0)
    return (v * wp) @ v.conj().T


def trace_power_overlap(rho, sigma, alpha: float) -> float:
    """``Tr(rho**alpha sigma**(1 - alpha))`` by direct matrix powers."""
    r, s = _entries(rho), _entries(sigma)
    _check_pair(r, s)
    return float(np.real(np.trace(_mpow(r, alpha) @ _mpow(s, 1.0 - alpha))))


def umegaki(rho, sigma) -> float:
    """Umegaki relative entropy (natural log); ``inf`` off-support."""
    return qre_spectral(rho, sigma, make_builtin("neg_log"))


def umegaki_direct(rho, sigma) -> float:
    """``Tr(rho log rho - rho log sigma)`` from matrix logarithms.

    Independent of the spectral pair sum; ``inf`` when ``rho`` has weight
    on the kernel of ``sigma``.
    """
    r, s = _entries(rho), _entries(sigma)
    _check_pair(r, s)
    lam, phi = _eigh_desc(r)
    mu, psi = _eigh_desc(s)
    kernel = psi[:, mu <= 0]
    if kernel.size and np.real(np.trace(kernel.conj().T @ r @ kernel)) > OVERLAP_TOL:
        return math.inf
    log_s = (psi[:, mu > 0] * np.log(mu[mu > 0])) @ psi[:, mu > 0].conj().T
    ent = float(np.sum(lam[lam > 0] * np.log(lam[lam > 0])))
    return ent - float(np.real(np.trace(r @ log_s)))


def alpha_divergence(rho, sigma, alpha: float) -> float:
    """``1 - Tr(rho**alpha sigma**(1-alpha))`` for ``alpha`` in (0, 1)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return qre_spectral(rho, sigma, make_builtin("power_entropy", alpha))


def renyi_relative(rho, sigma, alpha: float) -> float:
    """Petz-Renyi divergence ``log(1 - S_alpha) / (alpha - 1)``, alpha in (0, 1)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("Renyi divergence is only implemented for alpha in (0, 1)")
    overlap = 1.0 - alpha_divergence(rho, sigma, alpha)
    if overlap <= 0.0:
        return math.inf
    return math.log(overlap) / (alpha - 1.0)


def tsallis_relative(rho, sigma, q: float) -> float:
    """Tsallis relative entropy ``(1 - Tr(rho**q sigma**(1-q))) / (1 - q)``."""
    return qre_spectral(rho, sigma, make_builtin("tsallis", q))


def divergence(spec: str, rho, sigma) -> float:
    """Evaluate a divergence from a registry string (``renyi:alpha`` allowed)."""
    from .fgen import parse_spec

    head, _, tail = spec.partition(":")
    if head == "renyi":
        return renyi_relative(rho, sigma, float(tail))
    return qre_spectral(rho, sigma, parse_spec(spec))
