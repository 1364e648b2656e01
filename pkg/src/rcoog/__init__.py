"""Regularized cyclic output-to-output gain of continuous-time LTI systems."""
from .errors import (
    EigenFailure,
    GenerationFailed,
    MaxIterationsExceeded,
    NotPositiveDefinite,
    NotStable,
    PlantFormatError,
    RcoogError,
    RegularizationFailed,
    SingularDcal,
    SingularResolvent,
    StagnationDetected,
)
from .gsv import GsvResult, generalized_singular_values, max_gsv_at_frequency
from .hamiltonian import (
    HamiltonianParts,
    ImagEigs,
    build_hamiltonian,
    imaginary_eigenvalues,
    retry_regularization,
)
from .oracle import GridSpec, gamma_determinant, grid_rcoog, hinf_reference
from .solver import (
    RcoogResult,
    SolverConfig,
    bounded_below_gamma,
    compute_rcoog,
    initial_lower_bound,
)
from .sslib import (
    StateSpace,
    TwoOutputPlant,
    freq_response,
    read_plant,
    spectral_abscissa,
    write_plant,
)
from .sysgen import NetworkSpec, RandomSystemSpec, networked_plant, random_stable_plant

__version__ = "0.1.0"
