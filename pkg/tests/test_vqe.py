import math

import numpy as np
import pytest

from qdosim import (
    CircuitParams,
    FockConfig,
    LayerParams,
    ModelParams,
    NonFinite,
    QuadratureGrid,
    VqeConfig,
    basis_state,
    cost,
    energy_expectation,
    estimate_energy_sampled,
    finite_difference_gradient,
    gradient,
    hamiltonian_dense,
    joint_position_density,
    point_seed,
    potential_on_grid,
    sample_quadratures,
    train,
    vacuum_state,
)
from qdosim.fock import FockVector, amplitude_field
from qdosim.model import scale_factors

GRID = QuadratureGrid()
CFG5 = FockConfig()
ZERO_CHARGE = ModelParams(theta=0.58, d=1.0, q1=0.0)


def small_cfg(**kw):
    defaults = dict(seed=123, n_layers=2, max_steps=400, conv_window=30)
    defaults.update(kw)
    return VqeConfig(**defaults)


def random_state(rng, config=CFG5):
    amps = rng.normal(size=config.total_dim) + 1j * rng.normal(size=config.total_dim)
    return FockVector(config, amps / np.linalg.norm(amps))


class TestEnergyExpectation:
    def test_zero_charge_vacuum(self):
        assert energy_expectation(vacuum_state(CFG5), ZERO_CHARGE, GRID) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_zero_charge_one_photon(self):
        assert energy_expectation(basis_state(CFG5, 1, 0), ZERO_CHARGE, GRID) == pytest.approx(
            2.0, abs=1e-12
        )

    def test_matches_literal_grid_sum(self):
        # the factorized quadratic form must equal the written-out grid formula
        rng = np.random.default_rng(2)
        p = ModelParams(theta=0.58, d=0.82)
        state = random_state(rng)
        rho = joint_position_density(state, GRID)
        lam1, lam2 = scale_factors(p)
        v = potential_on_grid(p, GRID)
        literal = float((rho * v).sum() * GRID.dx ** 2)
        prob = np.abs(state.as_matrix()) ** 2
        n = np.arange(5)
        literal += (prob.sum(axis=1) @ n + 0.5) + (prob.sum(axis=0) @ n + 0.5)
        assert energy_expectation(state, p, GRID) == pytest.approx(literal, abs=1e-12)

    def test_agrees_with_dense_oracle(self):
        rng = np.random.default_rng(3)
        p = ModelParams(theta=0.58, d=1.0)
        h = hamiltonian_dense(p, CFG5)
        for _ in range(5):
            state = random_state(rng)
            rayleigh = float(np.vdot(state.amplitudes, h @ state.amplitudes).real)
            assert energy_expectation(state, p, GRID) == pytest.approx(rayleigh, abs=5e-3)

    def test_scale_invariance_of_normalized_expectations(self):
        rng = np.random.default_rng(4)
        state = random_state(rng)
        scaled = FockVector(CFG5, 0.5 * state.amplitudes)
        p = ModelParams(theta=0.4, d=1.3)
        assert energy_expectation(state, p, GRID) == pytest.approx(
            energy_expectation(scaled, p, GRID), abs=1e-12
        )


class TestCost:
    def test_zero_params_zero_charge(self):
        for gamma in (0.0, 10.0, 500.0):
            cfg = small_cfg(norm_penalty=gamma)
            params = CircuitParams.zeros(cfg.n_layers)
            assert cost(params, ZERO_CHARGE, cfg) == pytest.approx(1.0, abs=1e-12)

    def test_gamma_zero_reduces_to_energy(self):
        rng = np.random.default_rng(5)
        cfg = small_cfg(norm_penalty=0.0)
        params = CircuitParams.from_vector(rng.uniform(-0.3, 0.3, 28), 2)
        from qdosim import apply_circuit

        state, _ = apply_circuit(params, cfg.fock)
        p = ModelParams(theta=0.58, d=0.82)
        assert cost(params, p, cfg) == pytest.approx(
            energy_expectation(state, p, cfg.grid), abs=1e-12
        )

    def test_penalty_positive_when_truncation_leaks(self):
        # the padded build projects dim+4 -> dim, so displacement leaks norm
        layer = LayerParams(disp_mag1=0.8, disp_mag2=0.5)
        params = CircuitParams((layer,))
        cfg0 = small_cfg(n_layers=1, norm_penalty=0.0)
        cfg1 = small_cfg(n_layers=1, norm_penalty=10.0)
        leak = cost(params, ZERO_CHARGE, cfg1, padded=True) - cost(
            params, ZERO_CHARGE, cfg0, padded=True
        )
        assert leak > 1e-8


class TestGradient:
    def test_central_difference_exact_on_quadratics(self):
        rng = np.random.default_rng(6)
        a = rng.normal(size=(4, 4))
        a = a + a.T
        b = rng.normal(size=4)

        def f(x):
            return float(x @ a @ x + b @ x)

        x0 = rng.normal(size=4)
        g = finite_difference_gradient(f, x0, h=1e-3)
        assert g == pytest.approx(2 * a @ x0 + b, abs=1e-9)

    def test_zero_charge_gradient_vanishes_at_origin(self):
        cfg = small_cfg(n_layers=1)
        g = gradient(CircuitParams.zeros(1), ZERO_CHARGE, cfg)
        layer = LayerParams.from_vector(np.arange(14.0))
        disp_idx = [int(layer.disp_mag1), int(layer.disp_mag2)]
        assert np.max(np.abs(g[disp_idx])) < 1e-10
        assert np.max(np.abs(g)) < 1e-9  # vacuum is the uncoupled optimum

    def test_richardson_consistency(self):
        rng = np.random.default_rng(7)
        p = ModelParams(theta=0.58, d=0.82)
        cfg_h = small_cfg(n_layers=1, fd_step=1e-3)
        cfg_h2 = small_cfg(n_layers=1, fd_step=5e-4)
        params = CircuitParams.from_vector(rng.uniform(-0.2, 0.2, 14), 1)
        g1 = gradient(params, p, cfg_h)
        g2 = gradient(params, p, cfg_h2)
        assert np.linalg.norm(g1 - g2) <= 1e-4 * max(np.linalg.norm(g1), 1e-6)


class TestTrain:
    def test_zero_charge_converges_to_uncoupled_optimum(self):
        cfg = VqeConfig(seed=42, n_layers=2, max_steps=500, conv_window=40)
        res = train(ZERO_CHARGE, cfg)
        assert res.energy == pytest.approx(1.0, abs=1e-4)
        assert res.steps_taken <= 500
        assert res.state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_energy_field_consistent_with_state(self):
        cfg = small_cfg(max_steps=60, conv_window=10)
        res = train(ZERO_CHARGE, cfg)
        assert res.energy == pytest.approx(
            energy_expectation(res.state, ZERO_CHARGE, cfg.grid), abs=1e-10
        )
        assert 0.0 < res.final_norm <= 1.0 + 1e-12

    def test_deterministic(self):
        cfg = small_cfg(max_steps=40, conv_window=10)
        p = ModelParams(theta=0.58, d=1.36)
        a = train(p, cfg)
        b = train(p, cfg)
        assert np.array_equal(a.params.to_vector(), b.params.to_vector())
        assert a.energy == b.energy
        assert np.array_equal(a.energy_trace, b.energy_trace)
        assert np.array_equal(a.state.amplitudes, b.state.amplitudes)

    def test_warm_start_layer_mismatch(self):
        cfg = small_cfg()
        with pytest.raises(ValueError):
            train(ZERO_CHARGE, cfg, init=CircuitParams.zeros(5))

    def test_nonfinite_cost_reported(self):
        cfg = small_cfg(norm_penalty=math.inf, max_steps=10)
        with pytest.raises(NonFinite) as err:
            train(ZERO_CHARGE, cfg)
        assert err.value.step is not None

    def test_trace_trailing_average_nonincreasing(self):
        cfg = VqeConfig(seed=9, n_layers=2, max_steps=350, conv_window=30)
        p = ModelParams(theta=0.58, d=1.36)
        res = train(p, cfg)
        trace = res.energy_trace
        window = min(100, len(trace) // 2)
        head = trace[:window].mean()
        tail = trace[-window:].mean()
        assert tail <= head + 1e-9


class TestPointSeed:
    def test_stable_and_distinct(self):
        assert point_seed(7, 0.58, 0.54) == point_seed(7, 0.58, 0.54)
        assert point_seed(7, 0.58, 0.54) != point_seed(7, 0.58, 0.55)
        assert point_seed(7, 0.58, 0.54) != point_seed(8, 0.58, 0.54)
        assert point_seed(7, 0.58, 0.54) >= 0


class TestSampler:
    def test_single_shot_is_unit_spike(self):
        emp = sample_quadratures(vacuum_state(CFG5), GRID, shots=1, seed=0)
        assert np.count_nonzero(emp) == 1
        assert emp.sum() * GRID.dx ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_seed_reproducible(self):
        a = sample_quadratures(vacuum_state(CFG5), GRID, shots=500, seed=11)
        b = sample_quadratures(vacuum_state(CFG5), GRID, shots=500, seed=11)
        assert np.array_equal(a, b)

    def test_total_variation_shrinks_to_exact_density(self):
        coarse = QuadratureGrid(-6.0, 6.0, 50)
        exact = joint_position_density(vacuum_state(CFG5), coarse) * coarse.dx ** 2
        emp = sample_quadratures(vacuum_state(CFG5), coarse, shots=100_000, seed=3)
        emp = emp * coarse.dx ** 2
        tv = 0.5 * np.abs(emp - exact).sum()
        # multinomial bound: E[TV] ~ 0.5 sqrt(2/(pi M)) sum sqrt(p) ~ 0.015 here
        assert tv <= 0.02

    def test_shot_validation(self):
        with pytest.raises(ValueError):
            sample_quadratures(vacuum_state(CFG5), GRID, shots=0, seed=0)


class TestSampledEnergy:
    def test_zero_charge_exact_for_any_shots(self):
        for shots in (1, 10, 1000):
            e = estimate_energy_sampled(vacuum_state(CFG5), ZERO_CHARGE, GRID, shots, seed=5)
            assert e == pytest.approx(1.0, abs=1e-12)

    def test_within_three_standard_errors(self):
        from qdosim import ground_state_exact

        p = ModelParams(theta=0.58, d=1.36)
        _, state = ground_state_exact(p, CFG5)
        exact = energy_expectation(state, p, GRID)
        shots = 100_000
        est = estimate_energy_sampled(state, p, GRID, shots, seed=17)
        # population standard error of the Coulomb term under the exact density
        w = joint_position_density(state, GRID) * GRID.dx ** 2
        v = potential_on_grid(p, GRID)
        mean_v = float((w * v).sum())
        var_v = float((w * (v - mean_v) ** 2).sum())
        se = math.sqrt(var_v / shots)
        assert abs(est - exact) <= 3 * se

    def test_variance_decreases_with_shots(self):
        p = ModelParams(theta=0.58, d=1.36)
        from qdosim import ground_state_exact

        _, state = ground_state_exact(p, CFG5)
        lows = [estimate_energy_sampled(state, p, GRID, 2000, seed=s) for s in range(12)]
        highs = [estimate_energy_sampled(state, p, GRID, 32000, seed=s) for s in range(12)]
        assert np.var(highs) < np.var(lows)
