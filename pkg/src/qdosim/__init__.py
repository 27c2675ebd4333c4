"""Two-mode Fock-space simulator and variational ground-state engine for
Coulomb-coupled quantum Drude oscillators."""

from .analysis import (
    BindingCurve,
    CatFit,
    CurvePoint,
    MorseFit,
    cat_state,
    correlation_coefficient,
    entropy_profile,
    fit_cat,
    fit_morse,
    inflection_point,
    morse_curve,
    sweep,
)
from .errors import (
    ConfigError,
    DegenerateState,
    FitFailed,
    NonFinite,
    ParameterOutOfRange,
    QdoError,
    SingularConfiguration,
)
from .fock import (
    DensityMatrix,
    FockConfig,
    FockVector,
    QuadratureGrid,
    basis_state,
    fidelity,
    hermite_function,
    joint_position_density,
    mutual_information,
    number_expectation,
    partial_trace,
    quadrature_amplitude,
    quadrature_moments,
    vacuum_state,
    von_neumann_entropy,
    wigner_antisymmetric_slice,
    wigner_single_mode,
)
from .gates import (
    CircuitParams,
    LayerParams,
    PARAMS_PER_LAYER,
    apply_circuit,
    apply_layer,
    build_beamsplitter,
    build_displacement,
    build_kerr,
    build_rotation,
    build_squeeze,
)
from .model import (
    ModelParams,
    coulomb_potential,
    hamiltonian_dense,
    potential_on_grid,
    scale_factors,
    uncoupled_ground_energy,
)
from .oracle import ground_state_exact, spectrum_exact
from .vqe import (
    VqeConfig,
    VqeResult,
    cost,
    energy_expectation,
    estimate_energy_sampled,
    finite_difference_gradient,
    gradient,
    point_seed,
    sample_quadratures,
    train,
)

__version__ = "0.1.0"
