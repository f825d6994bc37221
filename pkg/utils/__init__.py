from .geometry.metric_core import (
    SpaceHandle,
    SpaceKind,
    distance,
    geodesic_point,
)
from .geometry.model_spaces import ray_eval, make_ray, clip_to_domain, domain_contains
from .game.engine import GameConfig, play, classify_outcome, lion_step, check_transcript_invariants
from .game.strategies import parse_strategy
from .analysis.verification import run_suite, example41_report
from .system.error_handler import (
    GeoPursuitError,
    ContractViolation,
    UnsupportedOperation,
    IllegalMove,
    ConfigError,
    OutputError,
    handle_output_error,
)

__all__ = [
    "SpaceHandle",
    "SpaceKind",
    "distance",
    "geodesic_point",
    "ray_eval",
    "make_ray",
    "clip_to_domain",
    "domain_contains",
    "GameConfig",
    "play",
    "classify_outcome",
    "lion_step",
    "check_transcript_invariants",
    "parse_strategy",
    "run_suite",
    "example41_report",
    "GeoPursuitError",
    "ContractViolation",
    "UnsupportedOperation",
    "IllegalMove",
    "ConfigError",
    "OutputError",
    "handle_output_error",
]
