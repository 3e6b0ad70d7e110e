"""Numerical laboratory for frequency-function arguments on the magnetic Schroedinger operator.

Exact solutions of ``(i grad + A)^2 w = phi w`` are integrated on concentric
spheres and balls to check the divergence identities, derivative formulas,
comparison, monotonicity and doubling inequalities used in strong unique
continuation proofs.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationError,
    EvaluationError,
    InternalConsistencyError,
    MagUCPError,
    VanishingBoundaryMassError,
)
from .fields import (  # noqa: E402
    ComplexField,
    GaugeFunction,
    ManufacturedTriple,
    ScalarPotential,
    VectorPotential,
    catalog,
    derive_phi,
    gauge_transform,
    mag_gradient,
    mag_laplacian,
    xi_frobenius_max,
    xi_matrix,
)
from .functionals import (  # noqa: E402
    FrequencyProfile,
    boundary_flux,
    build_profile,
    frequency,
    phi_of_r,
    phi_prime_formula,
    psi_of_r,
    psi_prime_formula,
    volume_mass,
)
from .quadrature import (  # noqa: E402
    BallRule,
    RadiiGrid,
    Rules,
    SphereRule,
    integrate_ball,
    integrate_sphere,
    make_ball_rule,
    make_rules,
    make_sphere_rule,
)
from .verify import (  # noqa: E402
    INFINITE_ORDER,
    IdentityReport,
    TauEstimate,
    Verdict,
    boundary_flux_bound,
    comparison_check,
    derivative_check,
    doubling_check,
    frequency_monotonicity,
    pohozaev_residual,
    rellich_check,
    vanishing_order,
)
