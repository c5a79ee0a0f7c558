"""Secret-key rates for QKD with coarse-grained vs refined error correction."""

from .analysis import (
    SweepRow,
    TradeoffPoint,
    find_es_threshold,
    find_eta_threshold,
    sweep,
    tradeoff_curve,
)
from .information import (
    ConvergenceError,
    DomainError,
    JointTable,
    NoSignChangeError,
    ThresholdResult,
    binary_entropy,
    bisect,
    conditional_entropy,
    marginal_a,
    marginal_b,
    shannon_entropy,
)
from .montecarlo import MonteCarloEstimate, compare, simulate, simulate_di, simulate_ddi
from .rates import (
    EcParams,
    RateBreakdown,
    bb84_coarse_rate,
    bb84_refined_rate,
    ddi_coarse_rate,
    ddi_refined_rate,
    di_coarse_rate,
    di_ipa,
    di_refined_rate,
    generic_rate,
    key_rate,
)
from .scenarios import Bb84Params, DdiParams, DiParams

__version__ = "0.1.0"
