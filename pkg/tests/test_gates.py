import math

import numpy as np
import pytest
from scipy.linalg import expm

from qdosim import (
    CircuitParams,
    FockConfig,
    FockVector,
    LayerParams,
    PARAMS_PER_LAYER,
    ParameterOutOfRange,
    apply_circuit,
    apply_layer,
    basis_state,
    build_beamsplitter,
    build_displacement,
    build_kerr,
    build_rotation,
    build_squeeze,
    quadrature_moments,
    vacuum_state,
)
from qdosim.fock import QuadratureGrid

DIM = 5
CFG = FockConfig(dim_per_mode=DIM)


def unitarity_defect(u):
    return np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))


class TestRotation:
    def test_identity(self):
        assert np.array_equal(build_rotation(0.0, DIM), np.eye(DIM))

    def test_phase_on_one_photon(self):
        v = np.zeros(DIM, dtype=complex)
        v[1] = 1.0
        out = build_rotation(math.pi, DIM) @ v
        assert out[1] == pytest.approx(-1.0, abs=1e-15)

    def test_additivity(self):
        r = build_rotation(0.7, DIM) @ build_rotation(-1.9, DIM)
        assert np.max(np.abs(r - build_rotation(-1.2, DIM))) < 1e-12

    @pytest.mark.parametrize("phi", [0.0, 0.3, -2.5, 11.0])
    def test_unitary(self, phi):
        assert unitarity_defect(build_rotation(phi, DIM)) < 1e-12


class TestKerr:
    def test_identity(self):
        assert np.array_equal(build_kerr(0.0, DIM), np.eye(DIM))

    def test_quadratic_phase(self):
        kappa = 0.37
        v = np.zeros(DIM, dtype=complex)
        v[2] = 1.0
        out = build_kerr(kappa, DIM) @ v
        assert out[2] == pytest.approx(np.exp(4j * kappa), abs=1e-14)

    def test_commutes_with_rotation(self):
        k = build_kerr(0.9, DIM)
        r = build_rotation(-0.4, DIM)
        assert np.max(np.abs(k @ r - r @ k)) < 1e-14

    def test_unitary(self):
        assert unitarity_defect(build_kerr(1.3, DIM)) < 1e-12


class TestSqueeze:
    def test_identity(self):
        assert np.max(np.abs(build_squeeze(0.0, DIM) - np.eye(DIM))) < 1e-15

    def test_only_even_levels_populated(self):
        col = build_squeeze(0.4, 12)[:, 0]
        assert np.max(np.abs(col[1::2])) < 1e-14
        assert abs(col[2]) > 1e-3

    @pytest.mark.parametrize("r", [0.1, 0.3, 0.5])
    def test_vacuum_amplitude_against_high_dim_oracle(self, r):
        oracle = expm(0.5 * r * (_ladder(40) @ _ladder(40) - _ladder(40).T @ _ladder(40).T))
        assert build_squeeze(r, 12)[0, 0] == pytest.approx(oracle[0, 0], abs=1e-6)
        assert oracle[0, 0].real == pytest.approx(1 / math.sqrt(math.cosh(r)), abs=1e-10)

    def test_composition_inverse_on_low_span(self):
        for r in (0.1, 0.3):
            m = build_squeeze(r, DIM) @ build_squeeze(-r, DIM)
            low = m[: DIM - 2, : DIM - 2] - np.eye(DIM - 2)
            assert np.max(np.abs(low)) < 1e-6

    def test_guard(self):
        with pytest.raises(ParameterOutOfRange):
            build_squeeze(5.5, DIM)

    def test_padded_build_contracts(self):
        u = build_squeeze(0.4, DIM, padded=True)
        norms = np.linalg.norm(u, axis=0)
        assert np.all(norms <= 1 + 1e-12)
        assert norms.min() < 1 - 1e-6  # the projection genuinely leaks


def _ladder(dim):
    a = np.zeros((dim, dim))
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


class TestDisplacement:
    def test_identity(self):
        assert np.max(np.abs(build_displacement(0.0, DIM) - np.eye(DIM))) < 1e-15

    @pytest.mark.parametrize("alpha", [0.5, 0.8 + 0.3j, -1.2j])
    def test_coherent_amplitudes_closed_form(self, alpha):
        def closed_form(dim):
            n = np.arange(dim)
            return np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / np.sqrt(
                [math.factorial(k) for k in n]
            )

        # at the threshold dimension the bound holds below the truncation edge
        dim = int(abs(alpha) ** 2 + 10 * abs(alpha)) + 2
        col = build_displacement(alpha, dim)[:, 0]
        assert np.max(np.abs(col - closed_form(dim))[: dim - 2]) < 1e-6
        # a little headroom makes the whole column match
        col = build_displacement(alpha, dim + 4)[:, 0]
        assert np.max(np.abs(col - closed_form(dim + 4))) < 1e-6

    def test_composition_inverse_on_low_span(self):
        for alpha in (0.3, 0.6 + 0.4j):
            m = build_displacement(alpha, DIM) @ build_displacement(-alpha, DIM)
            low = m[: DIM - 2, : DIM - 2] - np.eye(DIM - 2)
            assert np.max(np.abs(low)) < 1e-6

    def test_guard(self):
        with pytest.raises(ParameterOutOfRange):
            build_displacement(4.2, DIM)


class TestBeamsplitter:
    def test_identity_at_zero_angle(self):
        assert np.max(np.abs(build_beamsplitter(0.0, 1.3, DIM) - np.eye(DIM * DIM))) < 1e-14

    @pytest.mark.parametrize("theta,phi", [(0.4, 0.0), (1.1, 0.7), (math.pi / 2, -1.2)])
    def test_one_photon_block_matches_2x2_exponential(self, theta, phi):
        # independent oracle: exponentiate the generator restricted to
        # span{|1,0>, |0,1>}, where a1 a2^dag -> [[0,0],[1,0]] etc.
        block = expm(theta * np.array([[0, -np.exp(-1j * phi)], [np.exp(1j * phi), 0]]))
        u = build_beamsplitter(theta, phi, DIM)
        i10, i01 = 1 * DIM + 0, 0 * DIM + 1
        got = np.array([[u[i10, i10], u[i10, i01]], [u[i01, i10], u[i01, i01]]])
        assert np.max(np.abs(got - block)) < 1e-12

    def test_photon_number_conserved(self):
        rng = np.random.default_rng(8)
        u = build_beamsplitter(0.83, -0.51, DIM)
        n_op = np.diag(
            [n1 + n2 for n1 in range(DIM) for n2 in range(DIM)]
        ).astype(float)
        v = rng.normal(size=DIM * DIM) + 1j * rng.normal(size=DIM * DIM)
        v /= np.linalg.norm(v)
        before = np.vdot(v, n_op @ v).real
        after = np.vdot(u @ v, n_op @ (u @ v)).real
        assert abs(before - after) < 1e-12

    @pytest.mark.parametrize("theta,phi", [(0.3, 0.0), (2.0, 1.0)])
    def test_unitary(self, theta, phi):
        assert unitarity_defect(build_beamsplitter(theta, phi, DIM)) < 1e-12


class TestApplyLayer:
    def test_zero_layer_is_identity(self):
        rng = np.random.default_rng(2)
        amps = rng.normal(size=25) + 1j * rng.normal(size=25)
        state = FockVector(CFG, amps / np.linalg.norm(amps))
        out = apply_layer(state, LayerParams())
        assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-14

    def test_half_beamsplitter_swaps_single_photon(self):
        layer = LayerParams(bs1_theta=math.pi / 2, bs1_phi=0.0)
        out = apply_layer(basis_state(CFG, 1, 0), layer)
        prob = np.abs(out.amplitudes) ** 2
        assert prob[0 * DIM + 1] == pytest.approx(1.0, abs=1e-12)

    def test_norm_never_grows(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            amps = rng.normal(size=25) + 1j * rng.normal(size=25)
            state = FockVector(CFG, amps / np.linalg.norm(amps))
            layer = LayerParams.from_vector(rng.uniform(-0.5, 0.5, PARAMS_PER_LAYER))
            out = apply_layer(state, layer)
            assert out.norm() <= state.norm() + 1e-12


class TestApplyCircuit:
    def test_zero_params_give_vacuum(self):
        state, norm = apply_circuit(CircuitParams.zeros(3), CFG)
        assert norm == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(state.amplitudes - vacuum_state(CFG).amplitudes)) < 1e-12

    def test_displacement_only_layer_gives_coherent_product(self):
        alpha1, alpha2 = 0.45, -0.3
        layer = LayerParams(disp_mag1=abs(alpha1), disp_phase1=0.0,
                            disp_mag2=abs(alpha2), disp_phase2=math.pi)
        cfg = FockConfig(dim_per_mode=14)
        state, _ = apply_circuit(CircuitParams((layer,)), cfg)
        m1, m2, *_ = quadrature_moments(state.normalized(), QuadratureGrid())
        assert m1 == pytest.approx(math.sqrt(2) * alpha1, abs=1e-4)
        assert m2 == pytest.approx(math.sqrt(2) * alpha2, abs=1e-4)

    def test_deterministic_and_cache_reproducible(self):
        rng = np.random.default_rng(9)
        params = CircuitParams.from_vector(rng.uniform(-0.2, 0.2, 2 * PARAMS_PER_LAYER), 2)
        a, na = apply_circuit(params, CFG)
        b, nb = apply_circuit(params, CFG)
        assert na == nb
        assert np.array_equal(a.amplitudes, b.amplitudes)


class TestTruncationBehaviour:
    """Truncated S/D stay norm-non-increasing with negligible unitarity defect,
    and track the dim-40 construction on the low-lying span."""

    @pytest.mark.parametrize("r", [0.1, 0.3, -0.3])
    def test_squeeze_unitarity_defect_low_span(self, r):
        u = build_squeeze(r, DIM)
        defect = (u.conj().T @ u - np.eye(DIM))[: DIM - 3, : DIM - 3]
        assert np.max(np.abs(defect)) < 1e-4
        norms = np.linalg.norm(u, axis=0)
        assert np.all(norms <= 1 + 1e-12)

    @pytest.mark.parametrize("alpha", [0.2, 0.8, 0.5 + 0.5j])
    def test_displacement_unitarity_defect_low_span(self, alpha):
        u = build_displacement(alpha, DIM)
        defect = (u.conj().T @ u - np.eye(DIM))[: DIM - 3, : DIM - 3]
        assert np.max(np.abs(defect)) < 1e-4

    @pytest.mark.parametrize("r", [0.1, 0.3])
    def test_squeeze_tracks_high_dim_oracle(self, r):
        big = expm(0.5 * r * (_ladder(40) @ _ladder(40) - _ladder(40).T @ _ladder(40).T))
        small = build_squeeze(r, DIM)
        # truncation itself costs ~1e-3 at r=0.3; anything beyond that is a bug
        assert np.max(np.abs(small[:2, :2] - big[:2, :2])) < 5e-3

    @pytest.mark.parametrize("alpha", [0.2, 0.8])
    def test_displacement_tracks_high_dim_oracle(self, alpha):
        a40 = _ladder(40)
        big = expm(alpha * a40.T - np.conj(alpha) * a40)
        small = build_displacement(alpha, DIM)
        assert np.max(np.abs(small[:2, :2] - big[:2, :2])) < 5e-3


class TestParamFlattening:
    def test_roundtrip_layer_major(self):
        rng = np.random.default_rng(14)
        vec = rng.normal(size=3 * PARAMS_PER_LAYER)
        params = CircuitParams.from_vector(vec, 3)
        assert np.array_equal(params.to_vector(), vec)
        assert params.layers[1].bs1_theta == vec[PARAMS_PER_LAYER]

    def test_field_order_is_documented_bijection(self):
        layer = LayerParams.from_vector(np.arange(PARAMS_PER_LAYER, dtype=float))
        assert layer.bs1_theta == 0 and layer.bs1_phi == 1 and layer.rot1 == 2
        assert layer.squeeze_r1 == 3 and layer.squeeze_r2 == 4
        assert layer.bs2_theta == 5 and layer.bs2_phi == 6 and layer.rot2 == 7
        assert layer.disp_mag1 == 8 and layer.disp_phase1 == 9
        assert layer.disp_mag2 == 10 and layer.disp_phase2 == 11
        assert layer.kerr1 == 12 and layer.kerr2 == 13

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            LayerParams(bs1_theta=math.nan)

    def test_layer_count_mismatch(self):
        with pytest.raises(ValueError):
            CircuitParams.from_vector(np.zeros(PARAMS_PER_LAYER + 1), 1)
