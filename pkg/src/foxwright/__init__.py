"""Fox-Wright functions: series evaluation, H-density representations,
monotonicity and Turán checks, Luke envelopes and Mathieu series bounds."""

from .bounds import Envelope, luke_bounds, luke_bounds_lambda, pfq_luke
from .conditions import (
    ConditionReport,
    check_h1,
    check_h2,
    numeric_cm_check,
    turan_in_A,
    turan_in_sigma,
    zero_count_rectangle,
    zero_count_right_half,
)
from .errors import (
    AccuracyWarning,
    DivergenceError,
    DomainError,
    FoxWrightError,
    HypothesisError,
    InputError,
    NoConvergenceError,
    NumericalError,
    PoleError,
    ZeroOnBoundaryError,
)
from .fox_wright import (
    ConvergenceData,
    FoxWrightParams,
    ParamPair,
    convergence_data,
    eval_pfq,
    eval_series,
    psi_moment,
)
from .hfunction import ContourSpec, HDensitySpec, h_density
from .mathieu import MathieuSpec, mathieu_bounds, mathieu_bounds_digamma, mathieu_sum

__version__ = "0.1.0"
