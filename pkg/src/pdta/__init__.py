"""Reachability for pushdown timed automata with zones and LU simulation."""

from .engine import EngineConfig, ReachResult, UsageError, pdta_reach, verify_fixed_point, witness_trace
from .model import ModelError, PdtaModel, compute_lu_bounds, format_model, load_model, parse_model

__all__ = [
    "EngineConfig",
    "ModelError",
    "PdtaModel",
    "ReachResult",
    "UsageError",
    "compute_lu_bounds",
    "format_model",
    "load_model",
    "parse_model",
    "pdta_reach",
    "verify_fixed_point",
    "witness_trace",
]
