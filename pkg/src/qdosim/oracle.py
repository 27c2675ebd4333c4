"""Exact ground truth by dense Hermitian diagonalization of the truncated Hamiltonian."""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh

from .fock import FockConfig, FockVector
from .model import ModelParams, hamiltonian_dense

__all__ = ["ground_state_exact", "spectrum_exact"]


def ground_state_exact(p: ModelParams, config: FockConfig, quad_order: int = 80):
    """Lowest eigenpair of the dense Hamiltonian.

    The eigenvector phase is fixed so that its largest-magnitude amplitude
    is real and positive. Returns (energy, state).
    """
    h = hamiltonian_dense(p, config, quad_order)
    vals, vecs = eigh(h)
    v = vecs[:, 0].astype(complex)
    k = int(np.argmax(np.abs(v)))
    v *= abs(v[k]) / v[k]
    return float(vals[0]), FockVector(config, v)


def spectrum_exact(p: ModelParams, config: FockConfig, quad_order: int = 80, k: int = 6):
    """The k lowest eigenvalues, ascending."""
    if k > config.total_dim:
        raise ValueError("cannot request more eigenvalues than the space dimension")
    h = hamiltonian_dense(p, config, quad_order)
    return eigh(h, eigvals_only=True)[:k]
