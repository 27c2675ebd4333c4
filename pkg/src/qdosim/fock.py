"""Truncated two-mode Fock-space linear algebra.

States are complex amplitude vectors over the product basis
|n1⟩⊗|n2⟩, n_i = 0..dim-1, indexed lexicographically (n1*dim + n2).
Positions are dimensionless quadratures X = (a + a†)/√2, so the level-n
wavefunction is the Hermite function
ψ_n(x) = e^{-x²/2} H_n(x) / √(π^{1/2} 2^n n!), with vacuum variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre

from .errors import DegenerateState

__all__ = [
    "FockConfig",
    "FockVector",
    "DensityMatrix",
    "QuadratureGrid",
    "hermite_function",
    "hermite_basis",
    "quadrature_amplitude",
    "amplitude_field",
    "joint_position_density",
    "partial_trace",
    "von_neumann_entropy",
    "mutual_information",
    "fidelity",
    "wigner_single_mode",
    "wigner_antisymmetric_slice",
    "number_expectation",
    "quadrature_moments",
    "vacuum_state",
    "basis_state",
]

_NORM_TOL = 1e-9
_ZERO_NORM = 1e-12


@dataclass(frozen=True)
class FockConfig:
    """Per-mode truncation of the bosonic Hilbert space (levels 0..dim_per_mode-1)."""

    dim_per_mode: int = 5
    modes: int = 2

    def __post_init__(self):
        if self.dim_per_mode < 2:
            raise ValueError("dim_per_mode must be at least 2")
        if self.modes != 2:
            raise ValueError("only two-mode states are supported")

    @property
    def total_dim(self) -> int:
        return self.dim_per_mode ** self.modes


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform position-quadrature grid; default 500 points on [-6, 6]."""

    x_min: float = -6.0
    x_max: float = 6.0
    n_points: int = 500

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be smaller than x_max")
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)


class FockVector:
    """A (possibly sub-normalized) pure state of the truncated two-mode space."""

    __slots__ = ("config", "amplitudes")

    def __init__(self, config: FockConfig, amplitudes):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (config.total_dim,):
            raise ValueError(
                f"amplitude vector must have length {config.total_dim}, "
                f"got shape {amplitudes.shape}"
            )
        if not np.all(np.isfinite(amplitudes)):
            raise ValueError("amplitudes must be finite")
        n2 = float(np.vdot(amplitudes, amplitudes).real)
        if n2 > 1.0 + _NORM_TOL:
            raise ValueError(f"squared norm {n2} exceeds 1 (truncation can only lose norm)")
        self.config = config
        self.amplitudes = amplitudes

    @property
    def dim(self) -> int:
        return self.config.dim_per_mode

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (n1, n2)."""
        d = self.dim
        return self.amplitudes.reshape(d, d)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockVector":
        n = self.norm()
        if n < _ZERO_NORM:
            raise DegenerateState("cannot normalize a zero-norm state")
        return FockVector(self.config, self.amplitudes / n)

    def overlap(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def vacuum_state(config: FockConfig) -> FockVector:
    amps = np.zeros(config.total_dim, dtype=complex)
    amps[0] = 1.0
    return FockVector(config, amps)


def basis_state(config: FockConfig, n1: int, n2: int) -> FockVector:
    d = config.dim_per_mode
    if not (0 <= n1 < d and 0 <= n2 < d):
        raise ValueError("occupation numbers outside the truncated space")
    amps = np.zeros(config.total_dim, dtype=complex)
    amps[n1 * d + n2] = 1.0
    return FockVector(config, amps)


@dataclass
class DensityMatrix:
    """Hermitian, positive, unit-trace matrix of a single mode."""

    entries: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("density matrix must be Hermitian to 1e-10")
        tr = float(np.trace(rho).real)
        if abs(tr) < _ZERO_NORM:
            raise DegenerateState("density matrix has zero trace")
        rho = rho / tr
        if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
            raise ValueError("density matrix has a significantly negative eigenvalue")
        self.entries = rho
        self.dim = rho.shape[0]


def hermite_function(n: int, x):
    """Hermite function ψ_n(x), by the stable recurrence on the normalized functions.

    ψ_0 = π^{-1/4} e^{-x²/2}, ψ_1 = √2 x ψ_0,
    ψ_{k+1} = √(2/(k+1)) x ψ_k − √(k/(k+1)) ψ_{k-1}.
    """
    if n < 0:
        raise ValueError("level must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = math.sqrt(2.0) * x * prev
    for k in range(1, n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    return cur if cur.ndim else float(cur)


def hermite_basis(dim: int, x) -> np.ndarray:
    """Matrix ψ_n(x_k) of shape (dim, len(x)); one recurrence pass for all levels."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((dim, x.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if dim > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, dim - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def quadrature_amplitude(state: FockVector, x1: float, x2: float) -> complex:
    """⟨x1, x2|ψ⟩ = Σ_{n1 n2} α_{n1 n2} ψ_{n1}(x1) ψ_{n2}(x2)."""
    d = state.dim
    p1 = hermite_basis(d, [x1])[:, 0]
    p2 = hermite_basis(d, [x2])[:, 0]
    return complex(p1 @ state.as_matrix() @ p2)


def amplitude_field(state: FockVector, grid: QuadratureGrid) -> np.ndarray:
    """⟨x1, x2|ψ⟩ over grid×grid, shape (n, n) with axis 0 = x1."""
    psi = hermite_basis(state.dim, grid.nodes)
    return psi.T @ state.as_matrix() @ psi


def joint_position_density(state: FockVector, grid: QuadratureGrid) -> np.ndarray:
    """|⟨x1,x2|ψ⟩|² over grid×grid, renormalized so that Σ ρ Δx² = 1.

    The raw grid sum falls slightly below the state norm through truncation
    and domain clipping; renormalizing makes grid expectations proper averages.
    """
    if state.norm() < _ZERO_NORM:
        raise DegenerateState("cannot form the position density of a zero-norm state")
    rho = np.abs(amplitude_field(state, grid)) ** 2
    rho /= rho.sum() * grid.dx ** 2
    return rho


def partial_trace(state: FockVector, keep_mode: int) -> DensityMatrix:
    """Reduced density matrix of one mode: ρ₁ = Σ_l α_{nl} α*_{ml} |n⟩⟨m|."""
    if keep_mode not in (1, 2):
        raise ValueError("keep_mode must be 1 or 2")
    if state.norm() < _ZERO_NORM:
        raise DegenerateState("cannot trace a zero-norm state")
    a = state.normalized().as_matrix()
    if keep_mode == 1:
        rho = a @ a.conj().T
    else:
        rho = a.T @ a.conj()
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(ρ) = −Tr ρ ln ρ; eigenvalues below 1e-14 contribute nothing."""
    w = np.linalg.eigvalsh(rho.entries)
    w = w[w > 1e-14]
    return float(-(w * np.log(w)).sum())


def mutual_information(state: FockVector) -> float:
    """I(1:2) = 2 S(ρ₁); valid because the total state is pure."""
    return 2.0 * von_neumann_entropy(partial_trace(state, 1))


def fidelity(a: FockVector, b: FockVector) -> float:
    """|⟨a|b⟩|² between the normalized states."""
    na, nb = a.norm(), b.norm()
    if na < _ZERO_NORM or nb < _ZERO_NORM:
        raise DegenerateState("fidelity with a zero-norm state is undefined")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 / (na * nb) ** 2)


def _wigner_kernel(n: int, m: int, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Wigner transform of |n⟩⟨m| at broadcastable (x, p) arrays.

    For n ≥ m:  (1/π) e^{-r²} (−1)^m √(2^{n−m} m!/n!) (x − ip)^{n−m} L_m^{n−m}(2r²),
    r² = x² + p²; the n < m case is the complex conjugate.
    """
    if n < m:
        return np.conj(_wigner_kernel(m, n, x, p))
    r2 = x * x + p * p
    pref = np.exp(-r2) / np.pi * (-1.0) ** m
    coeff = math.sqrt(2.0 ** (n - m) * math.factorial(m) / math.factorial(n))
    return pref * coeff * (x - 1j * p) ** (n - m) * eval_genlaguerre(m, n - m, 2 * r2)


def wigner_single_mode(
    rho: DensityMatrix, x_grid: QuadratureGrid, p_grid: QuadratureGrid
) -> np.ndarray:
    """W(x,p) = Σ_{nm} ρ_{nm} W_{|n⟩⟨m|}(x,p); convention ∫∫ W dx dp = 1.

    Returns a real field of shape (n_x, n_p) with axis 0 = x.
    """
    X, P = np.meshgrid(x_grid.nodes, p_grid.nodes, indexing="ij")
    w = np.zeros(X.shape, dtype=complex)
    d = rho.dim
    for n in range(d):
        for m in range(d):
            if rho.entries[n, m] != 0:
                w += rho.entries[n, m] * _wigner_kernel(n, m, X, P)
    return w.real


def wigner_antisymmetric_slice(
    state: FockVector, x_grid: QuadratureGrid, p_grid: QuadratureGrid
) -> np.ndarray:
    """Two-mode Wigner function on the plane (x1,p1,x2,p2) = (x, p, −x, −p).

    W(x,p) = Σ ρ_{(n1 n2)(m1 m2)} W_{n1 m1}(x,p) W_{n2 m2}(−x,−p) for the pure
    input state; shape (n_x, n_p).
    """
    a = state.normalized().as_matrix()
    d = state.dim
    X, P = np.meshgrid(x_grid.nodes, p_grid.nodes, indexing="ij")
    k1 = np.empty((d, d) + X.shape, dtype=complex)
    k2 = np.empty_like(k1)
    for n in range(d):
        for m in range(d):
            k1[n, m] = _wigner_kernel(n, m, X, P)
            k2[n, m] = _wigner_kernel(n, m, -X, -P)
    # ρ_{(n1 n2)(m1 m2)} = a[n1,n2] conj(a[m1,m2])
    w = np.einsum("ab,cd,acxy,bdxy->xy", a, a.conj(), k1, k2, optimize=True)
    return w.real


def number_expectation(state: FockVector, mode: int) -> float:
    """Mean photon number ⟨a†a⟩ of one mode in the normalized state."""
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    prob = np.abs(state.normalized().as_matrix()) ** 2
    marginal = prob.sum(axis=1) if mode == 1 else prob.sum(axis=0)
    return float(marginal @ np.arange(state.dim))


def quadrature_moments(state: FockVector, grid: QuadratureGrid):
    """(⟨X1⟩, ⟨X2⟩, ⟨X1²⟩, ⟨X2²⟩, ⟨X1X2⟩) of the grid-renormalized joint density."""
    w = joint_position_density(state, grid) * grid.dx ** 2
    x = grid.nodes
    w1 = w.sum(axis=1)
    w2 = w.sum(axis=0)
    m1 = float(w1 @ x)
    m2 = float(w2 @ x)
    m1sq = float(w1 @ (x * x))
    m2sq = float(w2 @ (x * x))
    m12 = float(x @ w @ x)
    return m1, m2, m1sq, m2sq, m12
