"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = A @ A.conj().T
    return rho / rho.trace().real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (A + A.conj().T)


def basis_state(d: int, k: int) -> np.ndarray:
    psi = np.zeros(d, dtype=complex)
    psi[k] = 1.0
    return psi


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260826)
