"""Simulation and analysis toolkit for positive jump-diffusions with no
negative jumps: reproducible Monte Carlo, first-passage estimation, monotone
coupling, analytic entrance-boundary classification, and empirical tests of
entrance-at-infinity behavior."""

__version__ = "0.1.0"

from .boundary import BoundaryReport, classify
from .coupling import (
    FlowEnsemble,
    FlowStudy,
    GronwallReport,
    flow_realizations,
    gronwall_check,
    simulate_flow,
)
from .diagnostics import (
    EXP_NEG,
    EntranceProfile,
    FddReport,
    MomentConvergenceReport,
    SemigroupCauchyReport,
    TestFunction,
    compactified_distance,
    entrance_profile,
    fdd_convergence,
    ks_threshold,
    ks_two_sample,
    moment_convergence,
    semigroup_cauchy,
)
from .errors import (
    DomainError,
    EntranceSimError,
    NumericalOverflowError,
    PreconditionError,
    SchemaError,
    SpecificationError,
)
from .model import (
    LevyMeasure,
    ProcessSpec,
    RateFunction,
    ValidationReport,
    logistic_csbp,
    logistic_drift_only,
    null_spec,
    nu_partial_moments,
    nu_tail_mass,
    spec_from_dict,
    stable_power_spec,
    validate,
)
from .passage import (
    ExpMomentEstimate,
    MarkovDecompositionCheck,
    PassageEstimate,
    TailGeometricFit,
    estimate_exp_moment,
    estimate_passage,
    markov_decomposition_check,
    tail_geometric_fit,
)
from .simulate import (
    DrivingNoise,
    NoiseSlice,
    Path,
    PathEnsemble,
    SimConfig,
    set_worker_count,
    simulate_ensemble,
    simulate_path,
    simulate_path_reference,
    step,
    with_seed,
)

__all__ = [name for name in dir() if not name.startswith("_")]
