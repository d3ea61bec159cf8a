"""Dense finite-dimensional operator and pure-state primitives.

Everything here works on plain complex numpy arrays: square matrices for
operators, 1-d arrays for state vectors.  All functions are pure; nothing
mutates its inputs.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "ValidationError",
    "DimensionMismatchError",
    "DegenerateInputError",
    "is_hermitian",
    "validate_density_matrix",
    "linear_entropy",
    "hs_inner",
    "hs_norm",
    "trace_norm",
    "operator_norm",
    "fix_phase",
    "normalize_state",
    "projector",
    "state_from_projector",
    "fidelity",
    "join_projectors",
    "superposition",
    "random_pure_state",
    "random_density_matrix",
    "random_hermitian",
]

HERMITICITY_TOL = 1e-12
DENSITY_EIG_FLOOR = -1e-10
DENSITY_TRACE_TOL = 1e-10


class ValidationError(ValueError):
    """Input fails a structural precondition (shape, hermiticity, ...)."""


class DimensionMismatchError(ValidationError):
    """Operands live on Hilbert spaces of different dimension."""


class DegenerateInputError(ValidationError):
    """Degenerate input for which the operation is not defined (e.g. e == f)."""


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    return A


def _check_same_dim(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: {A.shape} vs {B.shape}")


def is_hermitian(A, tol: float = HERMITICITY_TOL) -> bool:
    A = _as_square(A)
    scale = max(np.abs(A).max(), 1.0)
    return np.abs(A - A.conj().T).max() <= tol * scale


def validate_density_matrix(rho, eig_floor: float = DENSITY_EIG_FLOOR,
                            trace_tol: float = DENSITY_TRACE_TOL) -> np.ndarray:
    """Validate and return a cleaned copy of a density matrix.

    Eigenvalues in [eig_floor, 0) are clamped to 0 and the trace renormalized
    (matrix exponentials leave harmless negative dust); anything worse is a
    hard error.
    """
    rho = _as_square(rho)
    if not is_hermitian(rho, tol=1e-10):
        raise ValidationError("density matrix must be Hermitian")
    rho = 0.5 * (rho + rho.conj().T)
    tr = rho.trace().real
    if abs(tr - 1.0) > max(trace_tol, 1e3 * abs(eig_floor) * rho.shape[0]):
        raise ValidationError(f"density matrix trace {tr} is not 1")
    w, V = np.linalg.eigh(rho)
    if w.min() < eig_floor:
        raise ValidationError(
            f"density matrix has negative eigenvalue {w.min()}")
    if w.min() < 0.0:
        w = np.clip(w, 0.0, None)
        rho = (V * w) @ V.conj().T
        rho = rho / rho.trace().real
    return rho


def linear_entropy(rho) -> float:
    """tr(rho - rho^2); zero exactly on pure states, 1 - 1/d on I/d."""
    rho = validate_density_matrix(rho)
    return float((rho.trace() - (rho @ rho).trace()).real)


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    A = _as_square(A)
    B = _as_square(B)
    _check_same_dim(A, B)
    return complex(np.vdot(A, B))


def hs_norm(A) -> float:
    return float(np.linalg.norm(_as_square(A)))


def trace_norm(A) -> float:
    """Sum of singular values (trace norm)."""
    return float(np.linalg.svd(_as_square(A), compute_uv=False).sum())


def operator_norm(A) -> float:
    return float(np.linalg.norm(_as_square(A), ord=2))


def fix_phase(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Gauge-fix the global phase: first nonzero amplitude made real-positive."""
    psi = np.asarray(psi, dtype=complex)
    idx = np.flatnonzero(np.abs(psi) > tol * max(np.abs(psi).max(), 1.0))
    if idx.size == 0:
        raise ValidationError("zero vector has no phase representative")
    a = psi[idx[0]]
    return psi * (abs(a) / a)


def normalize_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    n = np.linalg.norm(psi)
    if n == 0.0:
        raise ValidationError("cannot normalize the zero vector")
    return fix_phase(psi / n)


def projector(psi) -> np.ndarray:
    """Rank-1 projector |psi><psi| of a unit vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ValidationError("state vector is not normalized")
    return np.outer(psi, psi.conj())


def state_from_projector(e, tol: float = 1e-8) -> np.ndarray:
    """Recover the (phase-fixed) unit vector of a rank-1 projector."""
    e = _as_square(e)
    w, V = np.linalg.eigh(e)
    if abs(w[-1] - 1.0) > tol or np.abs(w[:-1]).max(initial=0.0) > tol:
        raise ValidationError("operator is not a rank-1 projector")
    return normalize_state(V[:, -1])


def fidelity(psi, phi) -> float:
    """|<psi|phi>|^2 for unit vectors; phase-invariant state equality metric."""
    psi = np.asarray(psi, dtype=complex).ravel()
    phi = np.asarray(phi, dtype=complex).ravel()
    if psi.shape != phi.shape:
        raise DimensionMismatchError("state dimensions differ")
    return float(abs(np.vdot(psi, phi)) ** 2)


def join_projectors(e, f, tol: float = 1e-10) -> np.ndarray:
    """Orthogonal projector onto span(range e, range f) for rank-1 e != f."""
    u = state_from_projector(e)
    v = state_from_projector(f)
    if fidelity(u, v) > 1.0 - tol:
        raise DegenerateInputError(
            "e and f coincide; the join of a projector with itself is itself")
    # Gram-Schmidt of v against u
    w = v - np.vdot(u, v) * u
    w = w / np.linalg.norm(w)
    return np.outer(u, u.conj()) + np.outer(w, w.conj())


def superposition(e, f, z1: complex, z2: complex) -> np.ndarray:
    """Normalized superposition z1|psi1> + z2|psi2> of two rank-1 projectors.

    Representatives are phase-fixed (first nonzero amplitude real-positive),
    so the result is deterministic; sweeping all (z1, z2) still covers every
    superposition ray.
    """
    if z1 == 0 and z2 == 0:
        raise DegenerateInputError("(z1, z2) = (0, 0)")
    u = state_from_projector(e)
    v = state_from_projector(f)
    if fidelity(u, v) > 1.0 - 1e-12:
        raise DegenerateInputError("e and f coincide")
    psi = z1 * u + z2 * v
    n = np.linalg.norm(psi)
    if n < 1e-12 * (abs(z1) + abs(z2)):
        raise DegenerateInputError("z1|psi1> + z2|psi2> vanishes")
    return normalize_state(psi)


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize_state(psi)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (A + A.conj().T)


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = A @ A.conj().T
    return rho / rho.trace().real
