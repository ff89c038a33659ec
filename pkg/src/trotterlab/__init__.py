"""trotterlab: entanglement-aware Trotter error analysis on small quantum systems."""

from .pauli import CommutatorExpansion, PauliTerm, pauli_product, term_commutator, terms_commute
from .hamiltonians import (
    HamiltonianModel,
    InteractionMetadata,
    build_all_to_all_ising,
    build_heisenberg,
    build_syk4,
    build_tfim,
    interaction_metadata,
    light_cone_neighbor_count,
    light_cone_term_cap,
)
from .dense import (
    DENSE_LIMIT,
    DenseState,
    ExactPropagator,
    SchmidtSpectrum,
    apply_term_exponential,
    apply_terms,
    commutator_expectation,
    entanglement_entropy,
    exact_evolve,
    expectation,
    from_product,
    max_entropy,
    renyi_half_entropy,
    schmidt_spectrum,
    state_distance,
)
from .mps import (
    MpsState,
    apply_single_site_gate,
    apply_two_site_gate,
    bond_spectrum,
    mps_canonicalize,
    mps_entropy_at_bond,
    mps_from_product,
    mps_load,
    mps_max_bond_entropy,
    mps_overlap,
    mps_save,
    mps_to_dense,
)
from .trotter import (
    ErrorSample,
    OrderFit,
    TrotterPlan,
    build_plan,
    execute,
    measure_error,
    order_scaling_fit,
    single_step_error,
    suzuki_split_coefficient,
    suzuki_stage_multipliers,
)
from .bounds import (
    BoundConstants,
    BoundParams,
    BoundReport,
    commutator_entropy_bound,
    effective_entanglement,
    ent_bound_first,
    ent_bound_p,
    evaluate_bounds,
    growth_bound,
    light_cone_radius,
    lower_bound_steps,
    lr_velocity,
    order_recommendation,
    required_steps,
    s_max_preset,
    separation_ratio,
    standard_bound,
    threshold_check,
)

__version__ = "0.1.0"

from .experiments import (
    CSV_COLUMNS,
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    RunResult,
    build_model,
    controlled_entropy_state,
    commutator_cut_sweep,
    default_config,
    emit_outputs,
    mps_step_halving,
    parse_records,
    records_to_csv,
    run_experiment,
    run_order_sweep,
    run_resource_table,
    run_separation,
    run_sweep,
    run_validation,
    straddling_pauli_pairs,
    validate_config,
)
