"""Data-generating processes and built-in scenarios."""

from acekit.simgen.generators import (
    generate,
    generate_logistic,
    generate_logit_normal,
    generate_normal,
    true_ace,
)
from acekit.simgen.scenarios import (
    SCENARIOS,
    list_scenarios,
    load_scenario_file,
    scenario,
    scenario_from_json,
    scenario_to_json,
)

__all__ = [
    "SCENARIOS",
    "generate",
    "generate_logistic",
    "generate_logit_normal",
    "generate_normal",
    "list_scenarios",
    "load_scenario_file",
    "scenario",
    "scenario_from_json",
    "scenario_to_json",
    "true_ace",
]
