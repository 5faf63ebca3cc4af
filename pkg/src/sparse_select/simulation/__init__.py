"""Harness Monte Carlo: cenários, métodos, métricas e dados de demonstração."""
from .fixtures import demo_dataset, noise_dataset, write_demo
from .harness import draw_replicate, run_configured, run_scenario, run_study, simulate_replicate
from .methods import MethodContext, MethodOutcome, available_methods, resolve_method
from .metrics import MetricsReport, bayes_risk, confusion, summarize_records
from .scenarios import ScenarioSpec, builtin_scenarios, load_scenarios, resolve_scenario

__all__ = [
    "MethodContext",
    "MethodOutcome",
    "MetricsReport",
    "ScenarioSpec",
    "available_methods",
    "bayes_risk",
    "builtin_scenarios",
    "confusion",
    "demo_dataset",
    "draw_replicate",
    "load_scenarios",
    "noise_dataset",
    "resolve_method",
    "resolve_scenario",
    "run_configured",
    "run_scenario",
    "run_study",
    "simulate_replicate",
    "summarize_records",
    "write_demo",
]
