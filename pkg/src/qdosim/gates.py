"""Truncated-Fock matrix representations of the photonic gate set.

All gates are built as matrix exponentials of generators assembled from the
standard truncated ladder matrices (scaling-and-squaring via scipy). The
circuit layer follows the fixed ordering: BS, R on mode 1, S⊗S, BS, R on
mode 1, D⊗D, K⊗K. Gate construction is a pure function of (parameters, dim)
and is cached; cached matrices are frozen read-only.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import ParameterOutOfRange
from .fock import FockConfig, FockVector, vacuum_state

__all__ = [
    "LayerParams",
    "CircuitParams",
    "PARAMS_PER_LAYER",
    "build_rotation",
    "build_kerr",
    "build_squeeze",
    "build_displacement",
    "build_beamsplitter",
    "apply_layer",
    "apply_circuit",
]

MAX_SQUEEZE = 5.0
MAX_DISPLACEMENT = 4.0
_PAD = 4  # extra levels for the optional padded build


@dataclass(frozen=True)
class LayerParams:
    """Parameters of one circuit layer; field order defines the flattening."""

    bs1_theta: float = 0.0
    bs1_phi: float = 0.0
    rot1: float = 0.0
    squeeze_r1: float = 0.0
    squeeze_r2: float = 0.0
    bs2_theta: float = 0.0
    bs2_phi: float = 0.0
    rot2: float = 0.0
    disp_mag1: float = 0.0
    disp_phase1: float = 0.0
    disp_mag2: float = 0.0
    disp_phase2: float = 0.0
    kerr1: float = 0.0
    kerr2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            if not np.isfinite(getattr(self, f.name)):
                raise ValueError(f"layer parameter {f.name} must be finite")

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    @classmethod
    def from_vector(cls, vec) -> "LayerParams":
        vec = np.asarray(vec, dtype=float)
        names = [f.name for f in fields(cls)]
        if vec.shape != (len(names),):
            raise ValueError(f"layer vector must have length {len(names)}")
        return cls(**dict(zip(names, vec.tolist())))


PARAMS_PER_LAYER = len(fields(LayerParams))


@dataclass(frozen=True)
class CircuitParams:
    """Ordered layers of the variational circuit; flattening is layer-major."""

    layers: tuple

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ValueError("a circuit needs at least one layer")
        if not all(isinstance(l, LayerParams) for l in self.layers):
            raise TypeError("layers must be LayerParams instances")
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([l.to_vector() for l in self.layers])

    @classmethod
    def from_vector(cls, vec, n_layers: int) -> "CircuitParams":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (n_layers * PARAMS_PER_LAYER,):
            raise ValueError("parameter vector length does not match layer count")
        blocks = vec.reshape(n_layers, PARAMS_PER_LAYER)
        return cls(tuple(LayerParams.from_vector(b) for b in blocks))

    @classmethod
    def zeros(cls, n_layers: int) -> "CircuitParams":
        return cls(tuple(LayerParams() for _ in range(n_layers)))


def _ladder(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim))
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def _frozen(m: np.ndarray) -> np.ndarray:
    m.flags.writeable = False
    return m


@lru_cache(maxsize=16384)
def _rotation(phi: float, dim: int) -> np.ndarray:
    return _frozen(np.diag(np.exp(1j * phi * np.arange(dim))))


@lru_cache(maxsize=16384)
def _kerr(kappa: float, dim: int) -> np.ndarray:
    n = np.arange(dim)
    return _frozen(np.diag(np.exp(1j * kappa * n * n)))


@lru_cache(maxsize=16384)
def _squeeze(r: float, dim: int, padded: bool) -> np.ndarray:
    d = dim + _PAD if padded else dim
    a = _ladder(d)
    u = expm(0.5 * r * (a @ a - a.T @ a.T)).astype(complex)
    return _frozen(u[:dim, :dim].copy() if padded else u)


@lru_cache(maxsize=16384)
def _displacement(re: float, im: float, dim: int, padded: bool) -> np.ndarray:
    d = dim + _PAD if padded else dim
    a = _ladder(d)
    alpha = re + 1j * im
    u = expm(alpha * a.T - np.conj(alpha) * a)
    return _frozen(u[:dim, :dim].copy() if padded else u)


@lru_cache(maxsize=4096)
def _beamsplitter(theta: float, phi: float, dim: int) -> np.ndarray:
    a = _ladder(dim)
    eye = np.eye(dim)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    gen = theta * (
        cmath.exp(1j * phi) * a1 @ a2.conj().T - cmath.exp(-1j * phi) * a1.conj().T @ a2
    )
    return _frozen(expm(gen))


def build_rotation(phi: float, dim: int) -> np.ndarray:
    """Phase rotation diag(e^{i φ n}); exactly unitary at any truncation."""
    return _rotation(float(phi), dim).copy()


def build_kerr(kappa: float, dim: int) -> np.ndarray:
    """Kerr gate diag(e^{i κ n²}); the ansatz's only non-Gaussian element."""
    return _kerr(float(kappa), dim).copy()


def build_squeeze(r: float, dim: int, padded: bool = False) -> np.ndarray:
    """Single-mode squeezer exp{(r/2)(a² − a†²)} on the truncated space."""
    if abs(r) > MAX_SQUEEZE:
        raise ParameterOutOfRange(f"squeeze magnitude {r} exceeds {MAX_SQUEEZE}")
    return _squeeze(float(r), dim, padded).copy()


def build_displacement(alpha: complex, dim: int, padded: bool = False) -> np.ndarray:
    """Displacement exp{α a† − α* a} on the truncated space."""
    alpha = complex(alpha)
    if abs(alpha) > MAX_DISPLACEMENT:
        raise ParameterOutOfRange(f"displacement magnitude {abs(alpha)} exceeds {MAX_DISPLACEMENT}")
    return _displacement(alpha.real, alpha.imag, dim, padded).copy()


def build_beamsplitter(theta: float, phi: float, dim: int) -> np.ndarray:
    """Two-mode beamsplitter exp{θ(e^{iφ} a₁a₂† − e^{−iφ} a₁†a₂)} on dim².

    The generator conserves total photon number, so the truncated matrix is
    exactly unitary.
    """
    return _beamsplitter(float(theta), float(phi), dim).copy()


@lru_cache(maxsize=4096)
def _layer_matrix(key: tuple, dim: int, padded: bool) -> np.ndarray:
    (b1t, b1p, r1, s1, s2, b2t, b2p, r2, d1m, d1p, d2m, d2p, k1, k2) = key
    if abs(s1) > MAX_SQUEEZE or abs(s2) > MAX_SQUEEZE:
        raise ParameterOutOfRange("squeeze magnitude exceeds the guard range")
    if abs(d1m) > MAX_DISPLACEMENT or abs(d2m) > MAX_DISPLACEMENT:
        raise ParameterOutOfRange("displacement magnitude exceeds the guard range")
    eye = np.eye(dim)
    m = _beamsplitter(b1t, b1p, dim)
    m = np.kron(_rotation(r1, dim), eye) @ m
    m = np.kron(_squeeze(s1, dim, padded), _squeeze(s2, dim, padded)) @ m
    m = _beamsplitter(b2t, b2p, dim) @ m
    m = np.kron(_rotation(r2, dim), eye) @ m
    d1 = _displacement(d1m * np.cos(d1p), d1m * np.sin(d1p), dim, padded)
    d2 = _displacement(d2m * np.cos(d2p), d2m * np.sin(d2p), dim, padded)
    m = np.kron(d1, d2) @ m
    m = np.kron(_kerr(k1, dim), _kerr(k2, dim)) @ m
    return _frozen(m)


def apply_layer(state: FockVector, layer: LayerParams, padded: bool = False) -> FockVector:
    """Apply one circuit layer: BS, R₁, S⊗S, BS, R₁, D⊗D, K⊗K."""
    key = tuple(layer.to_vector().tolist())
    m = _layer_matrix(key, state.dim, padded)
    return FockVector(state.config, m @ state.amplitudes)


def apply_circuit(params: CircuitParams, config: FockConfig, padded: bool = False):
    """Run the layered circuit on the two-mode vacuum.

    Returns (state, norm): the unnormalized output (truncated evolution can
    only lose amplitude) and its norm as a diagnostic.
    """
    state = vacuum_state(config)
    for layer in params.layers:
        state = apply_layer(state, layer, padded)
    return state, state.norm()
