"""Variational ground-state search over the photonic ansatz.

The cost is the grid estimate of ⟨H⟩: exact photon-number terms plus the
Coulomb expectation taken against the renormalized joint quadrature density,
optionally augmented with a norm penalty (artifact plumbing for truncated
evolutions that leak amplitude). Gradients are central finite differences;
Kerr gates admit no exact shift rule, so differencing is the honest
simulator-side substitute.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateState, NonFinite
from .fock import FockConfig, FockVector, QuadratureGrid, hermite_basis
from .gates import PARAMS_PER_LAYER, CircuitParams, apply_circuit
from .model import ModelParams, potential_on_grid

__all__ = [
    "VqeConfig",
    "VqeResult",
    "energy_expectation",
    "cost",
    "gradient",
    "finite_difference_gradient",
    "train",
    "sample_quadratures",
    "estimate_energy_sampled",
    "point_seed",
]

OPTIMIZERS = ("adaptive-moment", "plain-gradient-descent")


@dataclass(frozen=True, kw_only=True)
class VqeConfig:
    """Knobs of the training loop; the seed is mandatory for reproducibility."""

    seed: int
    n_layers: int = 8
    max_steps: int = 5000
    learning_rate: float = 0.01
    optimizer: str = "adaptive-moment"
    fd_step: float = 1e-3
    norm_penalty: float = 10.0
    conv_tol: float = 1e-6
    conv_window: int = 50
    grid: QuadratureGrid = field(default_factory=QuadratureGrid)
    fock: FockConfig = field(default_factory=FockConfig)

    def __post_init__(self):
        if self.n_layers < 1 or self.max_steps < 1 or self.conv_window < 1:
            raise ValueError("n_layers, max_steps and conv_window must be positive")
        if self.learning_rate <= 0 or self.fd_step <= 0 or self.conv_tol <= 0:
            raise ValueError("learning_rate, fd_step and conv_tol must be positive")
        if self.norm_penalty < 0:
            raise ValueError("norm_penalty must be non-negative")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")


@dataclass
class VqeResult:
    params: CircuitParams
    energy: float
    energy_trace: np.ndarray
    state: FockVector  # normalized
    final_norm: float
    steps_taken: int
    converged: bool


def point_seed(seed: int, theta: float, d: float) -> int:
    """Deterministic per-point seed: run seed xor a stable hash of (theta, d)."""
    digest = hashlib.blake2b(struct.pack("<dd", theta, d), digest_size=8).digest()
    return (int(seed) ^ int.from_bytes(digest, "little")) & ((1 << 63) - 1)


@lru_cache(maxsize=128)
def _grid_operators(p: ModelParams, grid: QuadratureGrid, dim: int):
    """Fock-basis matrices (M, N) reproducing the grid sums exactly:

    α†Mα = Σ_grid |⟨x1x2|ψ⟩|² V Δx²  and  α†Nα = Σ_grid |⟨x1x2|ψ⟩|² Δx²,
    so the renormalized-density Coulomb expectation is (α†Mα)/(α†Nα).
    """
    v = potential_on_grid(p, grid)
    psi = hermite_basis(dim, grid.nodes)
    pairs = np.einsum("nk,mk->nmk", psi, psi).reshape(dim * dim, grid.n_points) * grid.dx
    m = pairs @ v @ pairs.T  # [(n1,m1),(n2,m2)]
    m = m.reshape(dim, dim, dim, dim).transpose(0, 2, 1, 3).reshape(dim ** 2, dim ** 2)
    g = (psi * grid.dx) @ psi.T
    n = np.kron(g, g)
    m.flags.writeable = False
    n.flags.writeable = False
    return m, n


def _energy_parts(amps: np.ndarray, p: ModelParams, grid: QuadratureGrid, dim: int):
    nrm2 = float(np.vdot(amps, amps).real)
    if nrm2 < 1e-24:
        raise DegenerateState("energy of a zero-norm state is undefined")
    m, n = _grid_operators(p, grid, dim)
    vbar = float(np.vdot(amps, m @ amps).real / np.vdot(amps, n @ amps).real)
    prob = np.abs(amps.reshape(dim, dim)) ** 2 / nrm2
    levels = np.arange(dim)
    n1 = float(prob.sum(axis=1) @ levels)
    n2 = float(prob.sum(axis=0) @ levels)
    energy = p.omega1 * (n1 + 0.5) + p.omega2 * (n2 + 0.5) + vbar
    return energy, nrm2


def energy_expectation(state: FockVector, p: ModelParams, grid: QuadratureGrid) -> float:
    """ω₁(⟨n₁⟩+½) + ω₂(⟨n₂⟩+½) + Σ_grid ρ V Δx², with ρ the renormalized density."""
    return _energy_parts(state.amplitudes, p, grid, state.dim)[0]


def cost(params: CircuitParams, p: ModelParams, cfg: VqeConfig, padded: bool = False) -> float:
    """Grid energy of the circuit output plus γ(1−‖ψ‖²)²."""
    state, _ = apply_circuit(params, cfg.fock, padded)
    energy, nrm2 = _energy_parts(state.amplitudes, p, cfg.grid, cfg.fock.dim_per_mode)
    return energy + cfg.norm_penalty * (1.0 - nrm2) ** 2


def finite_difference_gradient(f, x: np.ndarray, h: float) -> np.ndarray:
    """Central differences (f(x+he_i) − f(x−he_i)) / 2h, one coordinate at a time."""
    g = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def gradient(params: CircuitParams, p: ModelParams, cfg: VqeConfig) -> np.ndarray:
    """Finite-difference gradient of the cost in the flattened parameter vector."""
    n_layers = params.n_layers

    def f(vec):
        return cost(CircuitParams.from_vector(vec, n_layers), p, cfg)

    return finite_difference_gradient(f, params.to_vector(), cfg.fd_step)


def train(p: ModelParams, cfg: VqeConfig, init: CircuitParams | None = None) -> VqeResult:
    """Minimize the cost from a seeded (or warm-started) parameter vector.

    Stops when |ΔC| stays below conv_tol for conv_window consecutive steps,
    or at max_steps. Deterministic for fixed (seed, config, model, init).
    """
    size = cfg.n_layers * PARAMS_PER_LAYER
    if init is not None:
        if init.n_layers != cfg.n_layers:
            raise ValueError("warm-start layer count does not match the config")
        x = init.to_vector()
    else:
        rng = np.random.default_rng(cfg.seed)
        x = rng.uniform(-0.05, 0.05, size)

    def parts(vec):
        prm = CircuitParams.from_vector(vec, cfg.n_layers)
        state, _ = apply_circuit(prm, cfg.fock)
        energy, nrm2 = _energy_parts(state.amplitudes, p, cfg.grid, cfg.fock.dim_per_mode)
        return energy + cfg.norm_penalty * (1.0 - nrm2) ** 2, energy

    def f(vec):
        return parts(vec)[0]

    adam = cfg.optimizer == "adaptive-moment"
    m = np.zeros(size)
    v = np.zeros(size)
    b1, b2, eps = 0.9, 0.999, 1e-8

    c_prev, energy = parts(x)
    if not np.isfinite(c_prev):
        raise NonFinite("initial cost is not finite", step=0, params=x.copy())
    trace = [energy]
    quiet = 0
    steps = 0
    converged = False
    for t in range(1, cfg.max_steps + 1):
        g = finite_difference_gradient(f, x, cfg.fd_step)
        if adam:
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            x = x - cfg.learning_rate * (m / (1 - b1 ** t)) / (np.sqrt(v / (1 - b2 ** t)) + eps)
        else:
            x = x - cfg.learning_rate * g
        c, energy = parts(x)
        if not np.isfinite(c):
            raise NonFinite(f"cost became non-finite at step {t}", step=t, params=x.copy())
        trace.append(energy)
        steps = t
        quiet = quiet + 1 if abs(c - c_prev) < cfg.conv_tol else 0
        c_prev = c
        if quiet >= cfg.conv_window:
            converged = True
            break

    final_params = CircuitParams.from_vector(x, cfg.n_layers)
    raw_state, final_norm = apply_circuit(final_params, cfg.fock)
    state = raw_state.normalized()
    return VqeResult(
        params=final_params,
        energy=energy_expectation(state, p, cfg.grid),
        energy_trace=np.asarray(trace),
        state=state,
        final_norm=final_norm,
        steps_taken=steps,
        converged=converged,
    )


def sample_quadratures(
    state: FockVector, grid: QuadratureGrid, shots: int, seed: int
) -> np.ndarray:
    """Empirical joint density from inverse-CDF draws over the flattened grid.

    Counts are accumulated per cell, normalized by the shot count and divided
    by Δx² so the result is commensurate with joint_position_density.
    """
    if shots < 1:
        raise ValueError("at least one shot is required")
    from .fock import joint_position_density

    prob = (joint_position_density(state, grid) * grid.dx ** 2).ravel()
    prob = np.maximum(prob, 0.0)
    prob /= prob.sum()
    rng = np.random.default_rng(seed)
    cells = np.searchsorted(np.cumsum(prob), rng.random(shots), side="right")
    counts = np.bincount(cells, minlength=prob.size).astype(float)
    return (counts / shots / grid.dx ** 2).reshape(grid.n_points, grid.n_points)


def estimate_energy_sampled(
    state: FockVector, p: ModelParams, grid: QuadratureGrid, shots: int, seed: int
) -> float:
    """Grid energy with the sampled density in place of the exact one.

    Photon-number terms stay exact; only the Coulomb expectation is estimated
    from the empirical distribution.
    """
    emp = sample_quadratures(state, grid, shots, seed)
    v = potential_on_grid(p, grid)
    vbar = float((emp * v).sum() * grid.dx ** 2)
    st = state.normalized()
    prob = np.abs(st.as_matrix()) ** 2
    levels = np.arange(state.dim)
    n1 = float(prob.sum(axis=1) @ levels)
    n2 = float(prob.sum(axis=0) @ levels)
    return p.omega1 * (n1 + 0.5) + p.omega2 * (n2 + 0.5) + vbar
