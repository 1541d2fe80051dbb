from typing import Any, Dict, List, Type

from typing_extensions import Required, TypedDict


ConfigDocument: Type = TypedDict(
    "ConfigDocument",
    {
        "seeds": List[int],
        "baseline": str,
        "system": Dict[str, Any],
        "power": Dict[str, float],
        "covert": Dict[str, float],
        "qos": Dict[str, float],
        "geometry": Dict[str, float],
        "solver": Dict[str, Any],
        "validation": Dict[str, Any],
        "sweep": Dict[str, Any],
    },
    total=False,
)
"""
The nested form of an experiment configuration, as written to ``config.toml`` and
hashed into ``config_hash``.
"""

TraceRow: Type = TypedDict(
    "TraceRow",
    {
        "outer_iter": int,
        "objective": float,
        "covert_rate": float,
        "min_secure_h0": float,
        "min_secure_h1": float,
        "eta_cs": float,
        "eta_r": float,
        "eta_t": float,
        "inner_i": int,
        "inner_q": int,
        "wall_s": float,
    },
)
"""One row of ``trace_<seed>.csv``: the state after one outer iteration."""

RecordRow: Type = TypedDict(
    "RecordRow",
    {
        "config_hash": Required[str],
        "record_hash": Required[str],
        "scheme": str,
        "sweep_parameter": str,
        "sweep_value": float,
        "seed": int,
        "status": str,
        "error": str,
        "objective": float,
        "covert_rate": float,
        "min_secure_h0": float,
        "min_secure_h1": float,
        "covert_component": float,
        "secure_component": float,
        "p_e_star": float,
        "p_ea_star": float,
        "eta_cs": float,
        "eta_r": float,
        "eta_t": float,
        "outer_iters": int,
        "inner_i": int,
        "inner_q": int,
        "converged": bool,
        "wall_s": float,
    },
    total=False,
)
"""One row of ``records.csv``; failed points carry ``status`` and ``error`` only."""

CheckReport: Type = TypedDict(
    "CheckReport",
    {
        "name": Required[str],
        "closed_form": str,
        "oracle": str,
        "passed": Required[bool],
        "estimate": Any,
        "stderr": Any,
        "reference": Any,
        "detail": str,
        "attempts": int,
    },
    total=False,
)

ValidationReport: Type = TypedDict(
    "ValidationReport",
    {"config_hash": str, "passed": bool, "mutation": str, "checks": List[CheckReport], "pairings": List[List[str]]},
)
