"""aifdom: dominance certification of antithetic integral feedback circuits.

The toolkit covers the full workflow: circuit models with exact Jacobians
along trajectories, ODE simulation and attractor classification, convex
certification regions, shifted-axis frequency diagnostics, and vertex-LMI
dominance certificates with independent verification.
"""

__version__ = "0.1.0"

from .circuit_models import (  # noqa: F401
    AllSeqPlantParams,
    BistableParams,
    ControllerParams,
    FopPlantParams,
    HillParams,
    SystemModel,
    all_seq_closed_loop,
    bistable_model,
    closed_loop,
    fop_closed_loop,
    fop_equilibrium,
    hill_value_and_derivative,
    linear_model,
)
from .dominance import (  # noqa: F401
    DominanceCertificate,
    InertiaTriple,
    classify,
    inertia,
    lmi_residual,
    solve_dominance_lmi,
    solve_robust_dominance,
    verify_certificate,
)
from .ode_sim import AttractorReport, Trajectory, integrate, classify_trajectory, refine_equilibrium  # noqa: F401
from .regions import Region, contains, hull_of_points, hull_of_trajectory, vertices  # noqa: F401
from .spectral import (  # noqa: F401
    FrequencyLocus,
    RootLocusResult,
    SpectrumSample,
    frozen_transfer_function,
    nyquist_locus,
    root_locus,
    spectrum,
)
