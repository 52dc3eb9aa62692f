"""Structure-preserving integration toolkit for Lotka-Volterra systems on
cluster Poisson structures."""

__version__ = "0.1.0"

from .analysis import (
    DriftStats,
    SEModifiedHamiltonian,
    SpectrumReport,
    TangentBasis,
    delta_analytic_eigenvalues,
    delta_spectral_matrix,
    drift_report,
    linearize,
    lyapunov_eigenvector,
    lyapunov_tangent_basis,
    principal_angles,
    resonance_search,
    se_modified_hamiltonian,
    se_time_dependent_hamiltonian,
    spectrum,
)
from .config import (
    CanonicalSystem,
    ConfigDocument,
    Tolerances,
    bundled_config,
    load_config,
)
from .errors import (
    ContinuationStall,
    DomainError,
    FormatError,
    IoError,
    LVPoissonError,
    MissingArtifact,
    NoConvergence,
    NoPositiveFixedPoint,
    NotAntisymmetric,
    NotFound,
    ParseError,
    SingularFormula,
    SingularReduced,
    StageDivergence,
    StepUnderflow,
    ValidationError,
)
from .experiments import (
    BUILTIN_SPECS,
    ExperimentSpec,
    SeedRecipe,
    Verdict,
    list_experiments,
    run_experiment,
    verify_experiment,
)
from .integrators import (
    HPStepConfig,
    StepOutcome,
    alpha,
    beta,
    hp_modified_hamiltonian_check,
    hp_step,
    reference_flow,
    rk4_step,
    se_simulate,
    se_step_matrix,
    simulate,
    symplectic_euler_step,
)
from .io import read_trajectory, write_trajectory
from .orbits import (
    OrbitFamily,
    PeriodicOrbit,
    amplitude_family,
    continue_in_delta,
    flow_and_monodromy,
    shoot_orbit,
)
from .systems import (
    CasimirBasis,
    LVSystem,
    LogLinear,
    Monomial,
    bracket_vector_field,
    build_system,
    casimir_basis,
    casimir_value,
    delta_system,
    grad_hamiltonian,
    hamiltonian,
    integrable_5d,
    predator_prey_2d,
    require_state,
    vector_field,
)
from .trajectory import Trajectory
