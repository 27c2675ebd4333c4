"""Downstream analysis: binding curves, Morse fits, entropy and correlation
profiles, and the displaced-cat ansatz fit."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import least_squares, minimize
from scipy.special import gammaln

from .errors import DegenerateState, FitFailed, ParameterOutOfRange
from .fock import (
    FockConfig,
    FockVector,
    QuadratureGrid,
    fidelity,
    mutual_information,
    quadrature_moments,
)
from .model import ModelParams, uncoupled_ground_energy
from .oracle import ground_state_exact
from .vqe import VqeConfig, VqeResult, point_seed, train

__all__ = [
    "CurvePoint",
    "BindingCurve",
    "MorseFit",
    "CatFit",
    "sweep",
    "morse_curve",
    "fit_morse",
    "inflection_point",
    "correlation_coefficient",
    "entropy_profile",
    "cat_state",
    "fit_cat",
]

MAX_CAT_ALPHA = 3.0


@dataclass
class CurvePoint:
    d: float
    E_b: float
    energy: float
    norm: float
    entropy: float
    correlation: float
    source: str
    status: str = "ok"
    state: FockVector | None = None


@dataclass
class BindingCurve:
    """Per-distance ground-state summary along one θ slice; d strictly increasing."""

    theta: float
    points: list

    def __post_init__(self):
        ds = [pt.d for pt in self.points]
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise ValueError("curve distances must be strictly increasing")

    @property
    def d(self) -> np.ndarray:
        return np.array([pt.d for pt in self.points])

    @property
    def E_b(self) -> np.ndarray:
        return np.array([pt.E_b for pt in self.points])

    def ok_points(self) -> list:
        return [pt for pt in self.points if pt.status == "ok"]


@dataclass
class MorseFit:
    """Fitted bond-curve parameters: depth E_b at d_b with decay rate s."""

    E_b: float
    d_b: float
    s: float
    residual_l2: float
    converged: bool


@dataclass
class CatFit:
    alpha: complex
    fidelity: float


def _solve_point(theta, d, base, cfg, engine, quad_order, warm):
    p = replace(base, theta=theta, d=d)
    if engine == "oracle":
        energy, state = ground_state_exact(p, cfg.fock, quad_order)
        return energy, state, 1.0, None
    pcfg = replace(cfg, seed=point_seed(cfg.seed, theta, d))
    res: VqeResult = train(p, pcfg, init=warm)
    return res.energy, res.state, res.final_norm, res.params


def sweep(
    theta: float,
    d_values,
    cfg: VqeConfig,
    engine: str = "oracle",
    base: ModelParams | None = None,
    quad_order: int = 80,
    keep_states: bool = False,
) -> BindingCurve:
    """Ground-state solve at every distance of one θ slice.

    The VQE engine walks the grid from the largest distance down, warm-starting
    each point from the previous converged parameters (at large d the vacuum
    anchors the branch). Point failures are recorded in-row and never abort
    the sweep.
    """
    if engine not in ("vqe", "oracle"):
        raise ValueError("engine must be 'vqe' or 'oracle'")
    base = base if base is not None else ModelParams(theta=theta, d=1.0)
    e0 = uncoupled_ground_energy(base)
    order = np.argsort(np.asarray(d_values, dtype=float))[::-1]
    points: dict[float, CurvePoint] = {}
    warm = None
    for i in order:
        d = float(np.asarray(d_values, dtype=float)[i])
        try:
            energy, state, norm, params = _solve_point(
                theta, d, base, cfg, engine, quad_order, warm
            )
            if engine == "vqe":
                warm = params
            points[d] = CurvePoint(
                d=d,
                E_b=energy - e0,
                energy=energy,
                norm=norm,
                entropy=0.5 * mutual_information(state),
                correlation=correlation_coefficient(state, cfg.grid),
                source=engine,
                state=state if keep_states else None,
            )
        except Exception as exc:  # record per-row, keep sweeping
            points[d] = CurvePoint(
                d=d, E_b=math.nan, energy=math.nan, norm=math.nan,
                entropy=math.nan, correlation=math.nan, source=engine,
                status=f"error: {exc}",
            )
    return BindingCurve(theta=theta, points=[points[d] for d in sorted(points)])


def morse_curve(d, E_b: float, d_b: float, s: float):
    """f(d) = E_b (e^{−2s(d−d_b)} − 2 e^{−s(d−d_b)}); depth −E_b at d_b."""
    u = np.asarray(d, dtype=float) - d_b
    return E_b * (np.exp(-2.0 * s * u) - 2.0 * np.exp(-s * u))


def _morse_fit_window(curve: BindingCurve):
    """Fitted points: finite E_b and healthy norm, from the first usable d on."""
    pts = [pt for pt in curve.ok_points() if np.isfinite(pt.E_b) and pt.norm >= 0.95]
    return np.array([pt.d for pt in pts]), np.array([pt.E_b for pt in pts])


def _morse_initial_guess(d, eb):
    imin = int(np.argmin(eb))
    depth0 = -eb[imin]
    db0 = d[imin]
    # decay-side estimate: half-depth crossing to the right of the minimum
    j = imin
    while j < eb.size - 1 and eb[j] < -depth0 / 2:
        j += 1
    s_right = math.log(2.0) / max(d[j] - db0, 1e-3)
    # wall-side estimate: the Morse form crosses zero at d_b - ln(2)/s
    s0 = s_right
    wall = np.nonzero(eb[:imin] >= 0)[0]
    if wall.size:
        s_wall = math.log(2.0) / max(db0 - d[wall[-1]], 1e-3)
        s0 = max(s_right, s_wall)
    return np.array([depth0, db0, s0])


def fit_morse(curve: BindingCurve) -> MorseFit:
    """Nonlinear least squares of the Morse form to a binding curve.

    Initialization from the sampled minimum plus wall/decay crossings,
    refined by Nelder–Mead simplex descent and a Gauss–Newton style polish;
    the flat-curve local minimum is avoided by keeping the best of several
    deterministic starts.
    """
    d, eb = _morse_fit_window(curve)
    if d.size < 10:
        raise FitFailed("need at least 10 usable points spanning the minimum")
    if np.min(eb) >= 0:
        raise FitFailed(
            f"curve has no negative minimum (min E_b = {np.min(eb):.3g} "
            f"at d = {d[int(np.argmin(eb))]:.3g})"
        )
    init = _morse_initial_guess(d, eb)

    def sse(q):
        return float(np.sum((morse_curve(d, *q) - eb) ** 2))

    def residuals(q):
        return morse_curve(d, *q) - eb

    nm = minimize(
        sse,
        init,
        method="Nelder-Mead",
        options={"maxiter": 500, "xatol": 1e-10, "fatol": 1e-14},
    )
    candidates = []
    for start in (nm.x, init, init * np.array([1.0, 1.0, 2.5])):
        ls = least_squares(residuals, start, method="lm", xtol=1e-12)
        candidates.append((float(np.sum(ls.fun ** 2)), ls))
    cost, ls = min(candidates, key=lambda c: c[0])
    converged = bool(ls.success)
    return MorseFit(
        E_b=float(ls.x[0]),
        d_b=float(ls.x[1]),
        s=float(ls.x[2]),
        residual_l2=float(math.sqrt(cost)),
        converged=converged,
    )


def inflection_point(fit: MorseFit) -> float:
    """Zero of the fitted curve's second derivative: d_b + ln(2)/s."""
    return fit.d_b + math.log(2.0) / fit.s


def correlation_coefficient(state: FockVector, grid: QuadratureGrid) -> float:
    """Pearson coefficient of the position quadratures under the joint density."""
    m1, m2, m1sq, m2sq, m12 = quadrature_moments(state, grid)
    var1 = m1sq - m1 * m1
    var2 = m2sq - m2 * m2
    if var1 < 1e-12 or var2 < 1e-12:
        raise DegenerateState("a quadrature variance degenerated to zero")
    return float((m12 - m1 * m2) / math.sqrt(var1 * var2))


def entropy_profile(curve: BindingCurve, bandwidth: float = 0.12):
    """Per-point entanglement entropy with a Gaussian-kernel smooth.

    Returns (d, entropy, smoothed); the kernel is reflected at the domain
    edges so the smooth is unbiased near the boundary.
    """
    pts = [pt for pt in curve.ok_points() if np.isfinite(pt.entropy)]
    d = np.array([pt.d for pt in pts])
    s = np.array([pt.entropy for pt in pts])
    if d.size == 0:
        return d, s, s.copy()
    lo, hi = d.min(), d.max()
    # source points plus their reflections about both edges
    dd = np.concatenate([d, 2 * lo - d, 2 * hi - d])
    ss = np.concatenate([s, s, s])
    w = np.exp(-0.5 * ((d[:, None] - dd[None, :]) / bandwidth) ** 2)
    smooth = (w @ ss) / w.sum(axis=1)
    return d, s, smooth


def _coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    n = np.arange(dim)
    log_fact = gammaln(n + 1.0)
    if alpha == 0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return amps
    return np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * log_fact) * np.power(complex(alpha), n)


def cat_state(alpha: complex, config: FockConfig) -> FockVector:
    """Displaced cat (|0,0⟩ + |α⟩⊗|−α⟩)/𝒩 with truncated coherent branches.

    𝒩 is the actual norm of the truncated superposition (which converges to
    √(2 + 2Re⟨0,0|α,−α⟩) as the cutoff grows), so the result is exactly unit
    norm at any truncation.
    """
    alpha = complex(alpha)
    if abs(alpha) > MAX_CAT_ALPHA:
        raise ParameterOutOfRange(f"cat amplitude {abs(alpha)} exceeds {MAX_CAT_ALPHA}")
    d = config.dim_per_mode
    branch = np.zeros(d * d, dtype=complex)
    branch[0] = 1.0
    vec = branch + np.kron(
        _coherent_amplitudes(alpha, d), _coherent_amplitudes(-alpha, d)
    )
    return FockVector(config, vec / np.linalg.norm(vec))


def fit_cat(state: FockVector, box: float = 2.0, step: float = 0.1) -> CatFit:
    """Best displaced cat by fidelity: coarse complex-grid search, then simplex."""
    st = state.normalized()
    config = state.config

    def neg_fid(re, im):
        if abs(complex(re, im)) > MAX_CAT_ALPHA:
            return 0.0  # keeps the simplex inside the guarded domain
        return -fidelity(st, cat_state(complex(re, im), config))

    best = (0.0, 0.0, neg_fid(0.0, 0.0))
    for re in np.arange(-box, box + step / 2, step):
        for im in np.arange(-box, box + step / 2, step):
            f = neg_fid(re, im)
            if f < best[2]:
                best = (re, im, f)
    res = minimize(
        lambda q: neg_fid(q[0], q[1]),
        np.array(best[:2]),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12},
    )
    alpha = complex(res.x[0], res.x[1])
    return CatFit(alpha=alpha, fidelity=float(-res.fun))
