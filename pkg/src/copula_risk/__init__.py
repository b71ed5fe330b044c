"""Copula-coupled safety and security failure probabilities.

Combines a Weibull functional-safety marginal and a hazard-based cyberattack
marginal through a bivariate copula, and perturbs each marginal by the other
in a dynamic failure model.
"""

__version__ = "0.1.0"

from .copulas import CopulaSpec, copula_cdf, partial_wrt_u, partial_wrt_v, sample_pairs
from .cyber import CyberParams, cyber_cdf, cyber_cdf_closed_form, cyber_cdf_quadrature, cyber_quantile
from .dynamic import DynamicParams, sfdc, sfdf
from .errors import CopulaRiskError, DomainError, NumericError, PlausibilityWarning, UnreachableQuantileError
from .joint import JointScenario, ProbabilityCurve, joint_curve, joint_failure_prob
from .presets import ExperimentConfig, load_config, preset_config
from .safety import LifecyclePhase, SafetyParams, phase_params, safety_quantile, weibull_cdf

__all__ = [
    "__version__",
    "CopulaSpec",
    "copula_cdf",
    "partial_wrt_u",
    "partial_wrt_v",
    "sample_pairs",
    "CyberParams",
    "cyber_cdf",
    "cyber_cdf_closed_form",
    "cyber_cdf_quadrature",
    "cyber_quantile",
    "DynamicParams",
    "sfdc",
    "sfdf",
    "CopulaRiskError",
    "DomainError",
    "NumericError",
    "PlausibilityWarning",
    "UnreachableQuantileError",
    "JointScenario",
    "ProbabilityCurve",
    "joint_curve",
    "joint_failure_prob",
    "ExperimentConfig",
    "load_config",
    "preset_config",
    "LifecyclePhase",
    "SafetyParams",
    "phase_params",
    "safety_quantile",
    "weibull_cdf",
]
