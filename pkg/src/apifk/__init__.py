"""API knowledge prepositioning: mine call logs into per-API knowledge
(value patterns, enums, numeric ranges, required params, parameter
sequences, producer dependencies) and predict call outcomes before
execution with a character-level temporal ConvNet.
"""

from .log_model import (
    ApiCallRecord,
    ApiSpec,
    MalformedRecord,
    OutcomeLabel,
    ParamSpec,
    RIGHT,
    read_log,
    write_log,
)
from .knowledge_store import ApiKnowledge, ParamKnowledge, load, load_all, merge_daily, save, save_all
from .pipeline import MiningConfig, mine_knowledge
from .simulator import SimScenario, generate, sms_scenario, table3_scenario
from .service import SuccessRateReport, compute_sr, create_app, main

__version__ = "0.1.0"

__all__ = [
    "ApiCallRecord",
    "ApiKnowledge",
    "ApiSpec",
    "MalformedRecord",
    "MiningConfig",
    "OutcomeLabel",
    "ParamKnowledge",
    "ParamSpec",
    "RIGHT",
    "SimScenario",
    "SuccessRateReport",
    "compute_sr",
    "create_app",
    "generate",
    "load",
    "load_all",
    "main",
    "merge_daily",
    "mine_knowledge",
    "read_log",
    "save",
    "save_all",
    "sms_scenario",
    "table3_scenario",
    "write_log",
    "__version__",
]
