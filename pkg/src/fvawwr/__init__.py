"""Monte Carlo FVA engine with a wrong-way-risk split for IR swaps."""

__version__ = "0.1.0"

from .curves import Curve, build_curve, load_curve_csv
from .fva import ExposureProfile, FvaFlags, FvaResult, ModelSet, SpreadInputs, compute_fva
from .ratemodels import CirParams, HullWhiteParams
from .scenarios import CATALOG, Scenario, build_models, load_scenario, swap_variants
from .simulation import CorrelationBlock, PathBlock, SimConfig, simulate
from .swaps import SwapSpec, apply_moneyness, par_rate

__all__ = [
    "CATALOG",
    "CirParams",
    "CorrelationBlock",
    "Curve",
    "ExposureProfile",
    "FvaFlags",
    "FvaResult",
    "HullWhiteParams",
    "ModelSet",
    "PathBlock",
    "Scenario",
    "SimConfig",
    "SpreadInputs",
    "SwapSpec",
    "apply_moneyness",
    "build_curve",
    "build_models",
    "compute_fva",
    "load_curve_csv",
    "load_scenario",
    "par_rate",
    "simulate",
    "swap_variants",
]
