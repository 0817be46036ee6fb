"""Numerical continuation of harmonic functions along quadratic curves."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationError,
    DataError,
    DomainError,
    EstimationError,
    GeometryError,
    HarmocontError,
    PreconditionError,
    ResolutionError,
    SingularKernelError,
)
from .geometry import (  # noqa: E402
    DomainBox,
    PaperAffine,
    QuadraticCurve,
    SourceCircle,
    analytic_radius_hyperbola,
    analytic_radius_parabola,
    distance_set_to_set,
    point_on_curve,
    sample_arc,
)
from .potential import DensityVector, assemble, discrete_laplacian_check, forward_eval, kernel  # noqa: E402
from .solver import TikhonovConfig, alpha_sweep, condition_diagnostics, tikhonov_solve  # noqa: E402
from .measure import (  # noqa: E402
    SlitRectangle,
    fit_lower_bound,
    good_controlled_mask,
    solve_measure,
    two_constants_check,
)
from .experiment import (  # noqa: E402
    ContinuationCase,
    GroundTruth,
    estimate_exponent,
    paper_case,
    run_case,
    run_table,
    synthesize_data,
)
