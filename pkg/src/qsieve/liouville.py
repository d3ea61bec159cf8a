"""Lindblad generators, superoperator matrices and the semigroup exp(tL).

Vectorization convention: vec stacks columns (Fortran order), so the map
rho -> X rho Y has the matrix Y^T (x) X.  The vec map is an isometry between
the Hilbert-Schmidt inner product and the Euclidean one, so the HS-adjoint of
a superoperator is its conjugate transpose.

Three dissipator forms are supported:

* jump list          L_D(rho) = sum_k V_k rho V_k^dag - 1/2 {V_k^dag V_k, rho}
* Hadamard kernel    (L_D rho)(x, y) = C(x, y) rho(x, y)  with C(x, x) = 0
* weighted rank-1 projectors (quadrature form)
                     L_D(rho) = sum_j w_j P_j rho P_j - 1/2 {sum_j w_j P_j, rho}
  with P_j = v_j v_j^dag stored as the columns v_j of a d x n array.
* explicit CP part  L_D(rho) = Phi(rho) - 1/2 {Phi*(I), rho}
  with Phi a completely positive map given by its d^2 x d^2 matrix; the
  anticommutator operator Phi*(I) is the unique choice making L trace
  preserving.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .operators import (
    DimensionMismatchError,
    ValidationError,
    hs_norm,
    is_hermitian,
    operator_norm,
    random_density_matrix,
    random_hermitian,
    trace_norm,
    validate_density_matrix,
)

__all__ = [
    "LindbladGenerator",
    "vec",
    "unvec",
    "apply_generator",
    "apply_generator_adjoint",
    "build_superoperator",
    "adjoint_semigroup",
    "propagator",
    "evolve",
    "channel_applier",
    "choi_matrix",
    "eis_check",
    "EisReport",
]


def vec(A: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(A, dtype=complex).reshape(-1, order="F")


def unvec(x: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(x.size)))
    return np.asarray(x, dtype=complex).reshape((d, d), order="F")


def _frozen_array(a, dtype=complex) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LindbladGenerator:
    """Hamiltonian plus one dissipator specification.

    Exactly one of (jump_ops, kernel, proj_vectors/proj_weights) carries the
    dissipator; a purely Hamiltonian generator has none of them.
    """

    dim: int
    hamiltonian: np.ndarray
    jump_ops: tuple = ()
    kernel: np.ndarray | None = None
    proj_vectors: np.ndarray | None = None
    proj_weights: np.ndarray | None = None
    cp_superop: np.ndarray | None = None
    label: str = field(default="custom", compare=False)

    def __post_init__(self):
        H = _frozen_array(self.hamiltonian)
        if H.shape != (self.dim, self.dim):
            raise ValidationError(
                f"hamiltonian shape {H.shape} does not match dim {self.dim}")
        if not is_hermitian(H, tol=1e-12):
            raise ValidationError("hamiltonian must be Hermitian")
        object.__setattr__(self, "hamiltonian", H)

        forms = sum([bool(len(self.jump_ops)), self.kernel is not None,
                     self.proj_vectors is not None,
                     self.cp_superop is not None])
        if forms > 1:
            raise ValidationError("at most one dissipator form may be given")

        if len(self.jump_ops):
            ops = tuple(_frozen_array(V) for V in self.jump_ops)
            for V in ops:
                if V.shape != (self.dim, self.dim):
                    raise ValidationError("jump operator shape mismatch")
            object.__setattr__(self, "jump_ops", ops)
        if self.kernel is not None:
            C = _frozen_array(self.kernel)
            if C.shape != (self.dim, self.dim):
                raise ValidationError("kernel shape mismatch")
            if not is_hermitian(C, tol=1e-12):
                raise ValidationError("Hadamard kernel must be Hermitian")
            if np.abs(np.diag(C)).max() > 1e-12 * max(np.abs(C).max(), 1.0):
                raise ValidationError(
                    "Hadamard kernel must vanish on the diagonal "
                    "(trace preservation)")
            object.__setattr__(self, "kernel", C)
        if (self.proj_vectors is None) != (self.proj_weights is None):
            raise ValidationError(
                "proj_vectors and proj_weights must be given together")
        if self.proj_vectors is not None:
            V = _frozen_array(self.proj_vectors)
            w = _frozen_array(self.proj_weights, dtype=float)
            if V.ndim != 2 or V.shape[0] != self.dim or w.shape != (V.shape[1],):
                raise ValidationError("projector-family shape mismatch")
            if w.min() <= 0.0:
                raise ValidationError("projector weights must be positive")
            object.__setattr__(self, "proj_vectors", V)
            object.__setattr__(self, "proj_weights", w)
        if self.cp_superop is not None:
            S = _frozen_array(self.cp_superop)
            if S.shape != (self.dim * self.dim, self.dim * self.dim):
                raise ValidationError("cp_superop must be d^2 x d^2")
            object.__setattr__(self, "cp_superop", S)
            if not is_hermitian(self._cp_anticomm, tol=1e-10):
                raise ValidationError(
                    "cp_superop must be Hermiticity preserving "
                    "(its adjoint applied to the identity is not Hermitian)")

    @cached_property
    def _cp_anticomm(self) -> np.ndarray:
        """Phi*(I) for the explicit CP form; makes the generator trace free."""
        S = self.cp_superop
        return unvec(S.conj().T @ vec(np.eye(self.dim)))

    @cached_property
    def _cp_sym(self) -> np.ndarray:
        """S + S^dag for the explicit CP form, cached as a complex array so
        repeated matvecs (gradient descent) skip the dtype promotion."""
        S = self.cp_superop
        return np.ascontiguousarray(S + S.conj().T, dtype=complex)

    @cached_property
    def _proj_sum(self) -> np.ndarray:
        """sum_j w_j v_j v_j^dag for the weighted-projector form."""
        V, w = self.proj_vectors, self.proj_weights
        return (V * w) @ V.conj().T

    @cached_property
    def _jump_anticomm(self) -> np.ndarray:
        """sum_k V_k^dag V_k for the jump-list form."""
        G = np.zeros((self.dim, self.dim), dtype=complex)
        for V in self.jump_ops:
            G += V.conj().T @ V
        return G

    @property
    def is_hamiltonian_only(self) -> bool:
        return (not self.jump_ops and self.kernel is None
                and self.proj_vectors is None and self.cp_superop is None)


def _check_dim(gen: LindbladGenerator, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.shape != (gen.dim, gen.dim):
        raise DimensionMismatchError(
            f"operator shape {A.shape} does not match generator dim {gen.dim}")
    return A


def _dissipator(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    if gen.jump_ops:
        out = -0.5 * (gen._jump_anticomm @ rho + rho @ gen._jump_anticomm)
        for V in gen.jump_ops:
            out += V @ rho @ V.conj().T
        return out
    if gen.kernel is not None:
        return gen.kernel * rho
    if gen.proj_vectors is not None:
        V, w = gen.proj_vectors, gen.proj_weights
        q = np.einsum("ij,ik,kj->j", V.conj(), rho, V)
        out = (V * (w * q)) @ V.conj().T
        G = gen._proj_sum
        return out - 0.5 * (G @ rho + rho @ G)
    if gen.cp_superop is not None:
        G = gen._cp_anticomm
        out = unvec(gen.cp_superop @ vec(rho))
        return out - 0.5 * (G @ rho + rho @ G)
    return np.zeros_like(rho)


def apply_generator(gen: LindbladGenerator, rho) -> np.ndarray:
    """L(rho) = -i[H, rho] + L_D(rho)."""
    rho = _check_dim(gen, rho)
    H = gen.hamiltonian
    return -1j * (H @ rho - rho @ H) + _dissipator(gen, rho)


def apply_generator_adjoint(gen: LindbladGenerator, A) -> np.ndarray:
    """HS-adjoint L*(A) = +i[H, A] + L_D*(A)."""
    A = _check_dim(gen, A)
    H = gen.hamiltonian
    out = 1j * (H @ A - A @ H)
    if gen.jump_ops:
        out -= 0.5 * (gen._jump_anticomm @ A + A @ gen._jump_anticomm)
        for V in gen.jump_ops:
            out += V.conj().T @ A @ V
    elif gen.kernel is not None:
        out += gen.kernel.conj() * A
    elif gen.proj_vectors is not None:
        # projectors are Hermitian, so the dissipator is HS-self-adjoint
        V, w = gen.proj_vectors, gen.proj_weights
        q = np.einsum("ij,ik,kj->j", V.conj(), A, V)
        G = gen._proj_sum
        out += (V * (w * q)) @ V.conj().T - 0.5 * (G @ A + A @ G)
    elif gen.cp_superop is not None:
        G = gen._cp_anticomm
        out += unvec(gen.cp_superop.conj().T @ vec(A))
        out -= 0.5 * (G @ A + A @ G)
    return out


def build_superoperator(gen: LindbladGenerator) -> np.ndarray:
    """Dense d^2 x d^2 matrix M with M vec(rho) = vec(L(rho))."""
    d = gen.dim
    I = np.eye(d)
    H = gen.hamiltonian
    M = -1j * (np.kron(I, H) - np.kron(H.T, I))
    if gen.jump_ops:
        G = gen._jump_anticomm
        M -= 0.5 * (np.kron(I, G) + np.kron(G.T, I))
        for V in gen.jump_ops:
            M += np.kron(V.conj(), V)
    elif gen.kernel is not None:
        M += np.diag(vec(gen.kernel))
    elif gen.proj_vectors is not None:
        G = gen._proj_sum
        M -= 0.5 * (np.kron(I, G) + np.kron(G.T, I))
        V, w = gen.proj_vectors, gen.proj_weights
        # vec(v v^dag) = conj(v) (x) v; accumulate in chunks to bound memory
        n = V.shape[1]
        for lo in range(0, n, 512):
            hi = min(lo + 512, n)
            Z = np.einsum("cj,rj->crj", V[:, lo:hi].conj(),
                          V[:, lo:hi]).reshape(d * d, hi - lo)
            M += (Z * w[lo:hi]) @ Z.conj().T
    elif gen.cp_superop is not None:
        G = gen._cp_anticomm
        M += gen.cp_superop - 0.5 * (np.kron(I, G) + np.kron(G.T, I))
    return M


def adjoint_semigroup(gen: LindbladGenerator) -> np.ndarray:
    """Superoperator of the HS-adjoint generator (conjugate transpose of M)."""
    return build_superoperator(gen).conj().T


def propagator(gen: LindbladGenerator, t: float,
               superop: np.ndarray | None = None) -> np.ndarray:
    """Superoperator matrix of T_t = exp(tL) (scaling-and-squaring Pade)."""
    if t < 0:
        raise ValidationError("the semigroup is defined for t >= 0 only")
    M = build_superoperator(gen) if superop is None else superop
    return scipy.linalg.expm(t * M)


def channel_applier(gen: LindbladGenerator, t: float):
    """Return a function A -> T_t(A).

    A Hamiltonian-free Hadamard-kernel generator acts entrywise, so its
    semigroup is an entrywise exponential and no d^2 x d^2 matrix is needed;
    every other form goes through the dense propagator.
    """
    if t < 0:
        raise ValidationError("the semigroup is defined for t >= 0 only")
    if gen.kernel is not None and np.abs(gen.hamiltonian).max() == 0.0:
        E = np.exp(t * gen.kernel)
        return lambda A: E * np.asarray(A, dtype=complex)
    P = propagator(gen, t)
    return lambda A: unvec(P @ vec(A))


def evolve(gen: LindbladGenerator, rho, t: float) -> np.ndarray:
    """T_t(rho) for a density matrix rho, dust-clamped on output."""
    rho = validate_density_matrix(rho)
    rho = _check_dim(gen, rho)
    out = channel_applier(gen, t)(rho)
    return validate_density_matrix(out)


def choi_matrix(apply_map, dim: int) -> np.ndarray:
    """Choi matrix sum_ij |i><j| (x) Map(|i><j|), normalized by 1/dim."""
    C = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            E = np.zeros((dim, dim), dtype=complex)
            E[i, j] = 1.0
            C[i * dim:(i + 1) * dim, j * dim:(j + 1) * dim] = apply_map(E)
    return C / dim


@dataclass(frozen=True)
class EisReport:
    """Numeric evidence that exp(tL) is an environment-induced semigroup."""

    min_choi_eigenvalue: float
    max_trace_deviation: float
    max_trace_norm_growth: float
    max_operator_norm_growth: float
    times: tuple

    choi_tol: float = 1e-8
    trace_tol: float = 1e-10
    contraction_tol: float = 1e-9

    @property
    def completely_positive(self) -> bool:
        return self.min_choi_eigenvalue >= -self.choi_tol

    @property
    def trace_preserving(self) -> bool:
        return self.max_trace_deviation <= self.trace_tol

    @property
    def trace_norm_contractive(self) -> bool:
        return self.max_trace_norm_growth <= self.contraction_tol

    @property
    def operator_norm_contractive(self) -> bool:
        return self.max_operator_norm_growth <= self.contraction_tol

    @property
    def passed(self) -> bool:
        return (self.completely_positive and self.trace_preserving
                and self.trace_norm_contractive
                and self.operator_norm_contractive)

    def as_dict(self) -> dict:
        return {
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "max_trace_deviation": self.max_trace_deviation,
            "max_trace_norm_growth": self.max_trace_norm_growth,
            "max_operator_norm_growth": self.max_operator_norm_growth,
            "times": list(self.times),
            "completely_positive": self.completely_positive,
            "trace_preserving": self.trace_preserving,
            "trace_norm_contractive": self.trace_norm_contractive,
            "operator_norm_contractive": self.operator_norm_contractive,
            "passed": self.passed,
        }


def eis_check(gen: LindbladGenerator, n_samples: int = 10,
              times=(0.1, 1.0, 5.0), seed: int = 0) -> EisReport:
    """Verify CP, trace preservation and both norm contractions numerically."""
    rng = np.random.default_rng(seed)
    d = gen.dim
    rhos = [random_density_matrix(d, rng) for _ in range(n_samples)]
    herms = [random_hermitian(d, rng) for _ in range(n_samples)]

    min_choi = np.inf
    max_trace_dev = 0.0
    max_tn_growth = -np.inf
    max_on_growth = -np.inf
    for t in times:
        T = channel_applier(gen, t)
        choi = choi_matrix(T, d)
        min_choi = min(min_choi, float(np.linalg.eigvalsh(choi).min()))
        for rho in rhos:
            out = T(rho)
            max_trace_dev = max(max_trace_dev, abs(out.trace().real - 1.0))
        for A in herms:
            out = T(A)
            max_tn_growth = max(max_tn_growth, trace_norm(out) - trace_norm(A))
            max_on_growth = max(max_on_growth,
                                operator_norm(out) - operator_norm(A))
    return EisReport(min_choi, max_trace_dev, max_tn_growth, max_on_growth,
                     tuple(times))
