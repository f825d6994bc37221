"""
CLI Argument Parser Module
Handles command-line parsing and turns flags plus an optional run file
into a validated RunSpec.
"""
import argparse
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .config import load_config, parse_config_text
from utils.game.engine import GameConfig
from utils.game.strategies import ManStrategy, parse_strategy
from utils.geometry.metric_core import SpaceHandle, SpaceKind, WholeSpace, distance, geodesic_point, get_model
from utils.geometry.model_spaces import domain_contains, extend_geodesic, parse_domain, parse_point_text
from utils.system.error_handler import ConfigError, GeoPursuitError

MODES = ("play", "sweep", "verify", "spaces")

# run-file key -> argparse dest
RUN_KEYS = {
    "mode": "mode",
    "space": "space",
    "domain": "domain",
    "arms": "arms",
    "D": "D",
    "L0": "L0",
    "M0": "M0",
    "strategy": "strategy",
    "horizon": "horizon",
    "win_tol": "win_tol",
    "tie_tol": "tie_tol",
    "capture_grace": "capture_grace",
    "seed": "seed",
    "samples": "samples",
    "workers": "workers",
    "output_dir": "output_dir",
    "csv": "csv",
    "json": "json",
    "svg": "svg",
    "sweep.D0": None,
    "sweep.horizon": None,
}
GAME_KEYS = ("space", "D", "L0", "M0")


@dataclass(frozen=True)
class OutputPaths:
    csv: Path
    json: Path
    svg: Optional[Path]


@dataclass(frozen=True)
class SweepGrid:
    d0_values: Tuple[float, ...]
    horizons: Tuple[int, ...]

    def points(self) -> List[Tuple[float, int]]:
        return [(d0, h) for d0 in self.d0_values for h in self.horizons]


@dataclass
class RunSpec:
    mode: str
    space: Optional[SpaceHandle] = None
    game: Optional[GameConfig] = None
    strategy_text: str = "stationary"
    strategy: Optional[ManStrategy] = None
    outputs: Optional[OutputPaths] = None
    sweep: Optional[SweepGrid] = None
    seed: Optional[int] = None
    samples: int = 1000
    workers: int = 1
    quiet: bool = False
    save_defaults: bool = False
    settings: Dict[str, str] = field(default_factory=dict)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="run_pursuit",
        description="Discrete Lion-Man pursuit on uniquely geodesic spaces"
    )
    parser.add_argument("mode", nargs="?", choices=MODES, default=None,
                        help="play (default), sweep, verify or spaces")

    # Game
    parser.add_argument("--config", type=str, help="Run file with key = value lines")
    parser.add_argument("--space", type=str, help="euclidean, poincare, sphere-cap, river or star")
    parser.add_argument("--domain", type=str, help="'whole', 'ball c=<coords> r=<radius>' or 'strip n=<angle> lo=<a> hi=<b|inf>'")
    parser.add_argument("--arms", type=str, help="Number of arms of the star tree (default 3)")
    parser.add_argument("--D", type=str, dest="D", help="Jump bound D > 0")
    parser.add_argument("--L0", type=str, help="Lion start, comma-separated coordinates")
    parser.add_argument("--M0", type=str, help="Man start, comma-separated coordinates")
    parser.add_argument("--strategy", type=str, help="Man strategy (see the spaces mode for the list)")
    parser.add_argument("--horizon", type=str, help="Maximum number of steps")
    parser.add_argument("--win-tol", type=str, dest="win_tol", help="Tolerance for the limit win")
    parser.add_argument("--tie-tol", type=str, dest="tie_tol", help="Rounding band below D for capture (0 = exact)")
    parser.add_argument("--capture-grace", type=str, dest="capture_grace", help="Steps played after capture")

    # Runs
    parser.add_argument("--seed", type=str, help="Seed for sampling (falls back to GEOPURSUIT_SEED)")
    parser.add_argument("--samples", type=str, help="Sample count for verify")
    parser.add_argument("--workers", type=str, help="Parallel processes for sweep")
    parser.add_argument("--quiet", action="store_true", help="No progress bars")

    # Outputs
    parser.add_argument("--output-dir", type=str, dest="output_dir", help="Directory for artifacts")
    parser.add_argument("--csv", type=str, help="Transcript / sweep CSV path")
    parser.add_argument("--json", type=str, help="Outcome / report JSON path")
    parser.add_argument("--svg", type=str, help="Trajectory plot path")
    parser.add_argument("--no-svg", action="store_true", dest="no_svg", help="Skip the trajectory plot")
    parser.add_argument("--save-defaults", action="store_true", dest="save_defaults",
                        help="Store --seed, --samples, --workers and --output-dir in .env")
    return parser


def parse_arguments(argv=None):
    """Parse command line arguments"""
    return build_parser().parse_args(argv)


# --- value parsing ---

def _lookup(values, key) -> Tuple[Optional[str], Optional[int]]:
    entry = values.get(key)
    return entry if entry else (None, None)


def _number(values, key, cast, default=None, positive=False, minimum=None):
    raw, line = _lookup(values, key)
    if raw is None:
        return default
    try:
        value = cast(raw)
    except ValueError:
        raise ConfigError(key, f"expected a {cast.__name__}, got '{raw}'", line=line)
    if positive and not value > 0:
        raise ConfigError(key, f"must be positive, got {raw}", line=line)
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be at least {minimum}, got {raw}", line=line)
    return value


def _list(values, key, cast) -> Optional[Tuple]:
    raw, line = _lookup(values, key)
    if raw is None:
        return None
    try:
        items = tuple(cast(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ConfigError(key, f"expected a comma-separated list, got '{raw}'", line=line)
    if not items or any(not v > 0 for v in items):
        raise ConfigError(key, "values must be positive", line=line)
    return items


def _as_config_error(values, key, error: GeoPursuitError) -> ConfigError:
    return ConfigError(key, error.message, line=_lookup(values, key)[1], solution=error.solution)


def _parse_space(values) -> SpaceHandle:
    raw, line = _lookup(values, "space")
    try:
        kind = SpaceKind(raw.strip().lower())
    except ValueError:
        raise ConfigError("space", f"unknown space '{raw}'", line=line,
                          solution=[k.value for k in SpaceKind])
    arms = _number(values, "arms", int, default=3, minimum=2)
    domain_text, _ = _lookup(values, "domain")
    try:
        domain = parse_domain(get_model(kind, arms), domain_text) if domain_text else WholeSpace()
        return SpaceHandle(kind, domain, arms=arms)
    except GeoPursuitError as e:
        raise _as_config_error(values, "domain", e)


def _parse_point(values, key, space: SpaceHandle):
    raw, line = _lookup(values, key)
    try:
        return parse_point_text(space.model, raw)
    except GeoPursuitError as e:
        raise ConfigError(key, e.message, line=line)


def place_at_gap(space: SpaceHandle, L0, M0, gap: float):
    """Point at distance gap from L0 on the geodesic from L0 through M0"""
    d = distance(space, L0, M0)
    if d == 0:
        raise ConfigError("sweep.D0", "L0 and M0 coincide, so no direction to place the man along")
    if gap <= d:
        return geodesic_point(space, L0, M0, gap / d)
    return extend_geodesic(space, L0, M0, gap - d)


def parse_run_spec(args: Sequence[str], config_text: Optional[str] = None) -> RunSpec:
    """
    Merge flags, run file and .env defaults into a validated RunSpec.
    Flags override run-file keys, which override .env, which overrides built-in defaults.
    """
    ns = parse_arguments(list(args))
    env = load_config()

    if config_text is None and ns.config:
        path = Path(ns.config)
        if not path.exists():
            raise ConfigError("config", f"run file not found: {path}")
        config_text = path.read_text(encoding="utf-8")
    values = parse_config_text(config_text) if config_text else {}
    for key, (_, line) in values.items():
        if key not in RUN_KEYS:
            raise ConfigError(key, "unknown key", line=line, solution=sorted(RUN_KEYS))

    # flags win over the run file
    for key, dest in RUN_KEYS.items():
        flag = getattr(ns, dest) if dest else None
        if flag is not None:
            values[key] = (str(flag), None)

    mode = (_lookup(values, "mode")[0] or "play").strip().lower()
    if mode not in MODES:
        raise ConfigError("mode", f"unknown mode '{mode}'", line=_lookup(values, "mode")[1], solution=list(MODES))

    seed = _number(values, "seed", int, default=env["GEOPURSUIT_SEED"])
    spec = RunSpec(
        mode=mode,
        seed=seed,
        samples=_number(values, "samples", int, default=env["GEOPURSUIT_VERIFY_SAMPLES"], minimum=12),
        workers=_number(values, "workers", int, default=env["GEOPURSUIT_WORKERS"], minimum=1),
        quiet=ns.quiet,
        save_defaults=ns.save_defaults,
        settings={key: value for key, (value, _) in values.items()},
    )

    output_dir = Path(_lookup(values, "output_dir")[0] or env["GEOPURSUIT_OUTPUT_DIR"])
    csv_name = "sweep.csv" if mode == "sweep" else "transcript.csv"
    json_name = "report.json" if mode == "verify" else "outcome.json"
    spec.outputs = OutputPaths(
        csv=Path(_lookup(values, "csv")[0] or output_dir / csv_name),
        json=Path(_lookup(values, "json")[0] or output_dir / json_name),
        svg=None if ns.no_svg else Path(_lookup(values, "svg")[0] or output_dir / "trajectory.svg"),
    )

    if mode == "spaces":
        return spec

    required = ("space",) if mode == "verify" else GAME_KEYS
    for key in required:
        if _lookup(values, key)[0] is None:
            raise ConfigError(key, "missing mandatory setting", solution=f"Pass --{key} or set '{key} = ...' in the run file")
    spec.space = _parse_space(values)
    if mode == "verify" and not all(_lookup(values, key)[0] for key in GAME_KEYS[1:]):
        return spec

    L0 = _parse_point(values, "L0", spec.space)
    M0 = _parse_point(values, "M0", spec.space)
    try:
        spec.game = GameConfig(
            space=spec.space,
            jump_bound=_number(values, "D", float, positive=True),
            L0=L0,
            M0=M0,
            horizon=_number(values, "horizon", int, default=env["GEOPURSUIT_HORIZON"], minimum=1),
            win_tol=_number(values, "win_tol", float, default=env["GEOPURSUIT_WIN_TOL"], positive=True),
            tie_tol=_number(values, "tie_tol", float, default=None, minimum=0.0),
            capture_grace=_number(values, "capture_grace", int, default=3, minimum=0),
        )
    except ConfigError:
        raise
    except GeoPursuitError as e:
        raise _as_config_error(values, "M0", e)

    strategy_text = (_lookup(values, "strategy")[0] or "stationary").strip()
    if strategy_text == "random":
        strategy_text = f"random:{seed if seed is not None else 0}"
    spec.strategy_text = strategy_text
    try:
        spec.strategy = parse_strategy(strategy_text, spec.space, L0)
        spec.strategy.prepare(spec.game)
    except ConfigError:
        raise
    except GeoPursuitError as e:
        raise _as_config_error(values, "strategy", e)

    if mode == "sweep":
        d0_values = _list(values, "sweep.D0", float) or (distance(spec.space, L0, M0),)
        horizons = _list(values, "sweep.horizon", int) or (spec.game.horizon,)
        spec.sweep = SweepGrid(d0_values, horizons)
        for d0 in d0_values:
            placed = place_at_gap(spec.space, L0, M0, d0)
            if not domain_contains(spec.space.domain, placed, spec.space.tau_geo):
                raise ConfigError("sweep.D0", f"gap {d0} puts the man outside the domain",
                                  line=_lookup(values, "sweep.D0")[1])
            try:
                spec.strategy.prepare(replace(spec.game, M0=placed, horizon=max(horizons)))
            except GeoPursuitError as e:
                raise _as_config_error(values, "strategy", e)

    return spec
