"""The coupled-oscillator model: θ-family Coulomb potential and Hamiltonian assembly.

Units: ħ = 4πε₀ = 1. Two charged drudons, each harmonically bound to its
nucleus, move along a common axis tilted by θ against the internuclear axis;
d is the internuclear distance. Physical coordinates relate to the
dimensionless quadratures through x_i = λ_i X_i with λ_i = √(1/(m_i ω_i)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SingularConfiguration
from .fock import FockConfig, QuadratureGrid, hermite_basis

__all__ = [
    "ModelParams",
    "coulomb_potential",
    "scale_factors",
    "potential_on_grid",
    "hamiltonian_dense",
    "uncoupled_ground_energy",
]

_MIN_DENOM = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters selecting one member of the Hamiltonian family."""

    theta: float
    d: float
    omega1: float = 1.0
    omega2: float = 1.0
    m1: float = 1.0
    m2: float = 1.0
    q1: float = 1.0
    q2: float = 1.0
    softening: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError("theta must lie in [0, pi/2]")
        if not self.d > 0:
            raise ValueError("d must be positive")
        if min(self.omega1, self.omega2, self.m1, self.m2) <= 0:
            raise ValueError("masses and frequencies must be positive")
        if self.softening < 0:
            raise ValueError("softening must be non-negative")


def _denominators(p: ModelParams, x1, x2):
    """Squared denominators of the three pair terms, softened by ε²."""
    c = math.cos(p.theta)
    eps2 = p.softening ** 2
    d = p.d
    t2 = d * d + 2 * d * c * x1 + x1 * x1 + eps2
    t3 = d * d - 2 * d * c * x2 + x2 * x2 + eps2
    u = x2 - x1
    t4 = d * d - 2 * d * c * u + u * u + eps2
    return t2, t3, t4


def coulomb_potential(p: ModelParams, x1, x2):
    """Coulomb energy of the four charge pairs at physical drudon offsets (x1, x2).

    q1q2 [ 1/d − 1/√(d²+2d cosθ x1+x1²+ε²) − 1/√(d²−2d cosθ x2+x2²+ε²)
           + 1/√(d²−2d cosθ (x2−x1)+(x2−x1)²+ε²) ].
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    t2, t3, t4 = _denominators(p, x1, x2)
    floor = _MIN_DENOM ** 2
    if p.d < _MIN_DENOM or min(np.min(t2), np.min(t3), np.min(t4)) <= floor:
        raise SingularConfiguration(
            f"Coulomb denominator underflow at theta={p.theta}, d={p.d} "
            "(set a positive softening to explore this regime)"
        )
    v = p.q1 * p.q2 * (1.0 / p.d - 1.0 / np.sqrt(t2) - 1.0 / np.sqrt(t3) + 1.0 / np.sqrt(t4))
    return v if v.ndim else float(v)


def scale_factors(p: ModelParams):
    """(λ1, λ2) with λᵢ = √(1/(mᵢωᵢ)); physical coordinate xᵢ = λᵢ Xᵢ."""
    return math.sqrt(1.0 / (p.m1 * p.omega1)), math.sqrt(1.0 / (p.m2 * p.omega2))


@lru_cache(maxsize=256)
def _potential_field(p: ModelParams, grid: QuadratureGrid) -> np.ndarray:
    lam1, lam2 = scale_factors(p)
    x = grid.nodes
    t2, t3, t4 = _denominators(p, lam1 * x[:, None], lam2 * x[None, :])
    floor = _MIN_DENOM ** 2
    bad = (t2 <= floor) | (t3 <= floor) | (t4 <= floor)
    if p.d < _MIN_DENOM or np.any(bad):
        idx = np.argwhere(bad)[:8]
        raise SingularConfiguration(
            f"Coulomb denominator underflow on grid nodes {idx.tolist()} "
            f"at theta={p.theta}, d={p.d}"
        )
    v = p.q1 * p.q2 * (1.0 / p.d - 1.0 / np.sqrt(t2) - 1.0 / np.sqrt(t3) + 1.0 / np.sqrt(t4))
    v.flags.writeable = False
    return v


def potential_on_grid(p: ModelParams, grid: QuadratureGrid) -> np.ndarray:
    """V(λ1 x1, λ2 x2) over grid×grid (axis 0 = x1); cached per (params, grid)."""
    return _potential_field(p, grid)


def uncoupled_ground_energy(p: ModelParams) -> float:
    """Ground energy (ω1 + ω2)/2 of the charge-free oscillator pair."""
    return 0.5 * (p.omega1 + p.omega2)


@lru_cache(maxsize=64)
def _gauss_hermite(order: int):
    t, w = np.polynomial.hermite.hermgauss(order)
    # fold the e^{x²} weight back so plain ψ products can be integrated
    return t, np.exp(np.log(w) + t * t)


def hamiltonian_dense(p: ModelParams, config: FockConfig, quad_order: int = 80) -> np.ndarray:
    """Dense Hermitian H = ω₁(n₁+½) + ω₂(n₂+½) + V̂ in the product Fock basis.

    Coupling matrix elements ⟨n1 n2|V|m1 m2⟩ are Gauss–Hermite integrals of
    ψ_{n1}ψ_{m1}(x1) ψ_{n2}ψ_{m2}(x2) V(λ1 x1, λ2 x2); the result is
    symmetrized to remove quadrature asymmetry noise.
    """
    dim = config.dim_per_mode
    if quad_order < 2 * dim:
        raise ValueError("quad_order must be at least twice the per-mode dimension")
    if quad_order > 300:
        raise ValueError("quad_order beyond 300 underflows float64 quadrature weights")
    t, wp = _gauss_hermite(quad_order)
    lam1, lam2 = scale_factors(p)
    v = coulomb_potential(p, lam1 * t[:, None], lam2 * t[None, :])
    psi = hermite_basis(dim, t)
    pairs = np.einsum("nk,mk->nmk", psi, psi).reshape(dim * dim, quad_order)
    pw = pairs * wp
    coup = pw @ v @ pw.T  # indexed [(n1,m1),(n2,m2)]
    coup = coup.reshape(dim, dim, dim, dim).transpose(0, 2, 1, 3).reshape(dim ** 2, dim ** 2)
    n = np.arange(dim)
    diag = p.omega1 * (n[:, None] + 0.5) + p.omega2 * (n[None, :] + 0.5)
    h = np.diag(diag.ravel().astype(float)) + coup
    return 0.5 * (h + h.conj().T)
