"""Finite-dimensional bipartite state algebra.

Density matrices and pure states are small immutable wrappers around numpy
arrays that validate on construction and remember an optional bipartite
split ``(dA, dB)``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "HERMITIAN_TOL",
    "TRACE_TOL",
    "PSD_TOL",
    "NORM_TOL",
    "ZERO_EIGENVALUE_TOL",
    "StateError",
    "PPTWarning",
    "DensityMatrix",
    "PureState",
    "SchmidtForm",
    "SpectralDecomposition",
    "tensor_product",
    "partial_trace",
    "partial_transpose",
    "schmidt_decompose",
    "eig_hermitian",
    "random_state",
    "random_unitary",
    "is_ppt",
    "bell_state",
    "schmidt_state",
    "fidelity",
    "state_to_json",
    "state_from_json",
    "load_state",
    "save_state",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12
ZERO_EIGENVALUE_TOL = 1e-12


class StateError(ValueError):
    """Invalid state data or a missing bipartite split."""


class PPTWarning(UserWarning):
    """PPT verdict outside 2x2, where it is only a necessary condition."""


def _check_split(dim, split):
    if split is None:
        return None
    dA, dB = (int(x) for x in split)
    if dA < 1 or dB < 1 or dA * dB != dim:
        raise StateError(f"split {split!r} incompatible with dimension {dim}")
    return (dA, dB)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one positive semidefinite matrix with an optional bipartite split."""

    entries: np.ndarray
    split: Optional[tuple] = None

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"density matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise StateError(f"density matrix trace {np.trace(m).real!r} differs from 1")
        # symmetrise away rounding so eigh sees an exactly Hermitian array
        m = 0.5 * (m + m.conj().T)
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise StateError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "split", _check_split(m.shape[0], self.split))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_pure(cls, psi: "PureState") -> "DensityMatrix":
        v = psi.amplitudes
        return cls(np.outer(v, v.conj()), psi.split)

    @classmethod
    def maximally_mixed(cls, dim, split=None):
        return cls(np.eye(dim) / dim, split)

    def with_split(self, split):
        return DensityMatrix(self.entries, split)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector with an optional bipartite split."""

    amplitudes: np.ndarray
    split: Optional[tuple] = None

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise StateError(f"pure state norm {np.linalg.norm(v)!r} differs from 1")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "split", _check_split(v.shape[0], self.split))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """Schmidt coefficients (descending) and local bases as unitary columns.

    ``coefficients[j]`` is the weight ``p_j`` of ``|a_j> (x) |b_j>``; the
    vector has length ``min(dA, dB)``.
    """

    coefficients: np.ndarray
    basisA: np.ndarray
    basisB: np.ndarray

    def state(self) -> PureState:
        dA, dB = self.basisA.shape[0], self.basisB.shape[0]
        r = len(self.coefficients)
        amp = (self.basisA[:, :r] * np.sqrt(self.coefficients)) @ self.basisB[:, :r].T
        return PureState(amp.reshape(-1), (dA, dB))

    def product_basis_vector(self, j: int) -> np.ndarray:
        return np.kron(self.basisA[:, j], self.basisB[:, j])


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


State = Union[DensityMatrix, PureState]


def tensor_product(a: State, b: State) -> State:
    """Kronecker product of two states of the same kind, split ``(dim a, dim b)``."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), (a.dim, b.dim))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries), (a.dim, b.dim))
    raise TypeError("tensor_product needs two states of the same kind")


def _as_density(rho):
    if isinstance(rho, PureState):
        return rho.density()
    return rho


def partial_trace(rho: State, subsystem: str = "B") -> DensityMatrix:
    """Trace out subsystem ``"A"`` or ``"B"`` of a bipartite state."""
    rho = _as_density(rho)
    if rho.split is None:
        raise StateError("partial trace needs a declared bipartite split")
    dA, dB = rho.split
    t = rho.entries.reshape(dA, dB, dA, dB)
    if subsystem == "B":
        out = np.einsum("ijkj->ik", t)
    elif subsystem == "A":
        out = np.einsum("ijil->jl", t)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return DensityMatrix(out)


def partial_transpose(rho: DensityMatrix, subsystem: str = "B") -> np.ndarray:
    """Partial transpose as a plain Hermitian array (generally not a state)."""
    if rho.split is None:
        raise StateError("partial transpose needs a declared bipartite split")
    dA, dB = rho.split
    t = rho.entries.reshape(dA, dB, dA, dB)
    axes = (0, 3, 2, 1) if subsystem == "B" else (2, 1, 0, 3)
    return t.transpose(axes).reshape(dA * dB, dA * dB)


def _fix_phase(columns):
    # make the first non-negligible entry of each column real and positive
    out = columns.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            z = col[idx[0]]
            out[:, k] = col * (abs(z) / z)
    return out


def schmidt_decompose(psi: PureState) -> SchmidtForm:
    """Schmidt decomposition from the SVD of the ``dA x dB`` amplitude matrix.

    Phase convention: each column of ``basisA`` has its first non-zero entry
    real and positive; ``basisB`` absorbs the compensating phase so that the
    reconstruction is exact.
    """
    if psi.split is None:
        raise StateError("Schmidt decomposition needs a declared bipartite split")
    dA, dB = psi.split
    m = psi.amplitudes.reshape(dA, dB)
    u, s, vh = np.linalg.svd(m)
    r = min(dA, dB)
    ua = _fix_phase(u)
    # u[:, k] = ua[:, k] * c_k with |c_k| = 1; push c_k into the B vector
    phases = np.ones(dB, dtype=complex)
    phases[:r] = np.einsum("ik,ik->k", u[:, :r], ua[:, :r].conj())
    ub = vh.T * phases
    coeffs = np.clip(s[:r] ** 2, 0.0, 1.0)
    coeffs = coeffs / coeffs.sum()
    return SchmidtForm(coeffs, ua, ub)


def eig_hermitian(m) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Eigenvalues within 1e-12 of zero are set to exactly zero.
    """
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.abs(m).max()):
        raise StateError("eig_hermitian needs a Hermitian matrix")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w, v = w[::-1], v[:, ::-1]
    w = np.where(np.abs(w) <= ZERO_EIGENVALUE_TOL, 0.0, w)
    return SpectralDecomposition(w, v)


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def _haar_vector(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_state(kind: str, dims, seed=None):
    """Seeded random state.

    ``kind`` is ``"density"`` (full-rank Ginibre ``G G^dag / Tr``),
    ``"pure"`` (Haar vector) or ``"product_pure"`` (tensor of Haar vectors).
    ``dims`` is an int or an ``(dA, dB)`` pair; a pair sets the split.
    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if isinstance(dims, (int, np.integer)):
        dims = (int(dims),)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError("dimensions must be positive")
    dim = int(np.prod(dims))
    split = dims if len(dims) == 2 else None
    if kind == "pure":
        return PureState(_haar_vector(dim, rng), split)
    if kind == "product_pure":
        if len(dims) != 2:
            raise ValueError("product_pure needs a (dA, dB) pair")
        return PureState(np.kron(_haar_vector(dims[0], rng), _haar_vector(dims[1], rng)), split)
    if kind == "density":
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = g @ g.conj().T
        return DensityMatrix(m / np.trace(m).real, split)
    raise ValueError(f"unknown state kind {kind!r}")


def is_ppt(sigma: DensityMatrix) -> bool:
    """Positive-partial-transpose test (smallest eigenvalue >= -1e-10).

    Exact separability test for 2x2 systems; for other splits a
    :class:`PPTWarning` flags that PPT is only necessary.
    """
    if sigma.split is None:
        raise StateError("PPT test needs a declared bipartite split")
    if sigma.split != (2, 2):
        # 2x3 is also exact, but only 2x2 is claimed here
        warnings.warn(
            f"PPT is only a necessary separability condition for split {sigma.split}",
            PPTWarning,
            stacklevel=2,
        )
    return bool(np.linalg.eigvalsh(partial_transpose(sigma))[0] >= -PSD_TOL)


def bell_state(d: int) -> PureState:
    """``d**-1/2 sum_j |jj>``."""
    return schmidt_state(np.full(d, 1.0 / d))


def schmidt_state(p: Sequence[float]) -> PureState:
    """``sum_j sqrt(p_j) |jj>`` on a ``d x d`` system."""
    p = np.asarray(p, dtype=float)
    d = len(p)
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = np.sqrt(p)
    return PureState(v / np.linalg.norm(v), (d, d))


def fidelity(psi: PureState, phi: PureState) -> float:
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


def state_to_json(state: State) -> dict:
    """Serialise to ``{"dim", "split", "re", "im"}``; pure states as vectors."""
    arr = state.amplitudes if isinstance(state, PureState) else state.entries
    return {
        "dim": state.dim,
        "split": list(state.split) if state.split else None,
        "re": arr.real.tolist(),
        "im": arr.imag.tolist(),
    }


def state_from_json(data: dict) -> State:
    arr = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    split = tuple(data["split"]) if data.get("split") else None
    if arr.ndim == 1:
        state = PureState(arr, split)
    else:
        state = DensityMatrix(arr, split)
    if state.dim != int(data["dim"]):
        raise StateError(f"declared dim {data['dim']} does not match data shape {arr.shape}")
    return state


def save_state(state: State, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json(state), fh)


def load_state(path) -> State:
    with open(path) as fh:
        return state_from_json(json.load(fh))
