import logging
from pathlib import Path
from typing import Any, Dict, Union

from enzyme_qssa.analysis.asymptotics import small_k1_asymptotics
from enzyme_qssa.analysis.reports import bound_report
from enzyme_qssa.kinetics.parameters import DEFAULT_Q, ReactionConfig
from enzyme_qssa.services.export import write_json

logger = logging.getLogger(__name__)

# Lowest-order estimates with their reliability markers ("++" strongest).
ESTIMATE_ROWS = (
    ("Delta_dstar", "substrate depletion in transient", "++"),
    ("t_star", "QSS onset time", "++"),
    ("eps_dd", "MM approximation error bound", "++"),
    ("eps_opt", "MM approximation error bound", "+"),
    ("eps_SSl", "MM approximation error bound", "+"),
)


def quick_reference(config: ReactionConfig, q: float = DEFAULT_Q) -> Dict[str, Any]:
    """Constants, timescales, lowest-order estimates and every exact bound for one configuration."""
    report = bound_report(config, q).to_dict()
    epsilons = report["epsilons"]
    slow = report["slow_error"] or {}
    values = {
        "Delta_dstar": report["depletion"]["Delta_dstar"] if report["depletion"] else None,
        "t_star": report["transient"]["t_star"],
        "eps_dd": slow.get("eps_dd"),
        "eps_opt": epsilons["eps_opt"],
        "eps_SSl": epsilons["eps_SSl"],
    }
    asymptotics = small_k1_asymptotics(config)
    return {
        "constants": report["derived"],
        "timescale": {"eps_SSl": epsilons["eps_SSl"], "t_SSl": report["transient"]["t_SSl"]},
        "estimates": [
            {"symbol": symbol, "estimates": meaning, "value": values[symbol], "reliability": marker}
            for symbol, meaning, marker in ESTIMATE_ROWS
        ],
        "bounds": report,
        "small_k1_asymptotics": asymptotics.model_dump(mode="json"),
        "notes": {
            "eps_inf": asymptotics.eps_inf_note,
            "Delta_star": report["depletion"]["preference_note"] if report["depletion"] else None,
        },
    }


def write_quick_reference(config: ReactionConfig, q: float, out_path: Union[str, Path]) -> Path:
    payload = quick_reference(config, q)
    logger.info(f"Quick reference for {config.label()} written to {out_path}")
    return write_json(payload, out_path)
