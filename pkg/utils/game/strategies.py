"""
Man Strategies Module
Bundled man policies and the parser for their textual identifiers.
"""
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from core.logger import log
from utils.geometry.metric_core import (
    DiskPoint,
    PlanarPoint,
    PointValue,
    SpaceHandle,
    SpaceKind,
    distance,
    geodesic_point,
)
from utils.geometry.model_spaces import (
    DISK_RAY_REACH,
    RayDescriptor,
    clip_to_domain,
    extend_geodesic,
    make_ray,
    ray_eval,
    sample_domain,
)
from utils.system.error_handler import ConfigError, ContractViolation, UnsupportedOperation

STRATEGY_IDENTIFIERS = (
    ("stationary", "Stay put"),
    ("spiral", "Besicovitch spiral, clockwise (Euclidean plane)"),
    ("spiral-ccw", "Besicovitch spiral, counterclockwise"),
    ("reverse@k[:base]", "Play base (default spiral), at move k step back toward the lion"),
    ("ray:<direction>", "Run along a geodesic ray from L0 (noncompact domains)"),
    ("flee", "Step directly away from the lion, clipped to the domain"),
    ("random:<seed>", "Seeded random walk"),
    ("scripted:<path>", "Replay moves from a file"),
)


class ManStrategy(ABC):
    """A man policy; instances are immutable and may be reused across games"""

    name = "strategy"

    def prepare(self, config) -> None:
        """Reject configurations the policy cannot play"""

    @abstractmethod
    def next_move(self, history, space: SpaceHandle, jump_bound: float) -> PointValue:
        ...

    def certificate(self) -> Optional[RayDescriptor]:
        return None


class Stationary(ManStrategy):
    name = "stationary"

    def next_move(self, history, space, jump_bound):
        return history.current_man


class BesicovitchSpiral(ManStrategy):
    """
    Step of length D perpendicular to the segment from the man to the lion.
    Clockwise rotates the unit vector u pointing at the lion to (-u_y, u_x).
    """

    def __init__(self, clockwise: bool = True):
        self.clockwise = clockwise
        self.name = "spiral" if clockwise else "spiral-ccw"

    def prepare(self, config):
        if config.space.kind is not SpaceKind.EUCLIDEAN:
            raise UnsupportedOperation(
                f"The spiral strategy is only defined in the Euclidean plane, not {config.space.kind.value}"
            )

    def next_move(self, history, space, jump_bound):
        lion = history.previous_lion
        man = history.current_man
        dx, dy = lion.x - man.x, lion.y - man.y
        norm = math.hypot(dx, dy)
        if norm == 0:
            return man
        ux, uy = dx / norm, dy / norm
        px, py = (-uy, ux) if self.clockwise else (uy, -ux)
        return PlanarPoint(man.x + jump_bound * px, man.y + jump_bound * py)


class ReverseAtStep(ManStrategy):
    """Follow base, except that move k steps from M_{k-1} straight back toward L_{k-1}"""

    def __init__(self, k: int, base: ManStrategy):
        if k < 1:
            raise ContractViolation(f"Reverse step must be at least 1, got {k}")
        self.k = k
        self.base = base
        self.name = f"reverse@{k}:{base.name}"

    def prepare(self, config):
        self.base.prepare(config)

    def next_move(self, history, space, jump_bound):
        if history.step + 1 != self.k:
            return self.base.next_move(history, space, jump_bound)
        man, lion = history.current_man, history.previous_lion
        d = distance(space, man, lion)
        if d == 0:
            return man
        return geodesic_point(space, man, lion, min(jump_bound, d) / d)


class RayEscape(ManStrategy):
    """Keep to the ray, one full jump further out each move"""

    def __init__(self, ray: RayDescriptor, label: str = "ray"):
        self.ray = ray
        self.name = label

    def prepare(self, config):
        if config.space != self.ray.space:
            raise UnsupportedOperation("The ray belongs to a different space or domain")
        s0 = self._arclength(config.M0)
        if config.space.kind is SpaceKind.POINCARE:
            centre = distance(config.space, DiskPoint(0.0, 0.0), self.ray.basepoint)
            reach = centre + s0 + config.horizon * config.jump_bound
            if reach > DISK_RAY_REACH:
                raise UnsupportedOperation(
                    f"The man could end {reach:g} from the disk centre, past the precision reach {DISK_RAY_REACH:g}",
                    solution=["Lower the horizon or D", "Start the ray nearer the centre"]
                )

    def _arclength(self, man: PointValue) -> float:
        s = distance(self.ray.space, self.ray.basepoint, man)
        tol = self.ray.space.tau_geo * max(1.0, s)
        if distance(self.ray.space, ray_eval(self.ray, s), man) > tol:
            raise UnsupportedOperation(
                f"The man at {man!r} is not on the {self.ray.describe()}",
                solution="Start the man on the ray, e.g. M0 in the ray direction from L0"
            )
        return s

    def next_move(self, history, space, jump_bound):
        return ray_eval(self.ray, self._arclength(history.current_man) + jump_bound)

    def certificate(self):
        return self.ray


class RadialFlee(ManStrategy):
    name = "flee"

    def next_move(self, history, space, jump_bound):
        lion, man = history.previous_lion, history.current_man
        if distance(space, lion, man) == 0:
            return man
        target = extend_geodesic(space, lion, man, jump_bound)
        return clip_to_domain(space, space.domain, man, target, jump_bound)


class RandomWalk(ManStrategy):
    """Head for a sampled domain point, step length uniform in (0, D]; seeded by (seed, step)"""

    def __init__(self, seed: int):
        self.seed = seed
        self.name = f"random:{seed}"

    def next_move(self, history, space, jump_bound):
        rng = np.random.default_rng([self.seed, history.step])
        man = history.current_man
        target = sample_domain(space, rng, 1)[0]
        length = jump_bound * (1.0 - float(rng.random()))
        d = distance(space, man, target)
        if d == 0:
            return man
        return geodesic_point(space, man, target, min(1.0, length / d))


class Scripted(ManStrategy):
    """Replay a fixed list of moves; stays put once the list runs out"""

    def __init__(self, moves: Sequence[PointValue], label: str = "scripted"):
        self.moves = tuple(moves)
        self.name = label

    def next_move(self, history, space, jump_bound):
        if history.step < len(self.moves):
            return self.moves[history.step]
        return history.current_man


def load_scripted_moves(path, space: SpaceHandle) -> List[PointValue]:
    """One point per line, comma-separated coordinates; '#' starts a comment"""
    path = Path(path)
    if not path.exists():
        raise ConfigError("strategy", f"Scripted moves file not found: {path}")
    moves = []
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            moves.append(space.model.parse_point([float(v) for v in line.split(",")]))
        except (ValueError, ContractViolation) as e:
            raise ConfigError("strategy", f"bad move in {path.name}: {e}", line=number)
    log.debug(f"Loaded {len(moves)} scripted moves from {path}")
    return moves


def parse_strategy(text: str, space: SpaceHandle, L0: PointValue) -> ManStrategy:
    """Build a strategy from its textual identifier"""
    text = text.strip()
    if text == "stationary":
        return Stationary()
    if text == "spiral":
        return BesicovitchSpiral(clockwise=True)
    if text == "spiral-ccw":
        return BesicovitchSpiral(clockwise=False)
    if text == "flee":
        return RadialFlee()
    if text.startswith("reverse@"):
        head, _, base_text = text[len("reverse@"):].partition(":")
        try:
            k = int(head)
        except ValueError:
            raise ConfigError("strategy", f"reverse@k needs an integer step, got '{head}'")
        return ReverseAtStep(k, parse_strategy(base_text or "spiral", space, L0))
    if text.startswith("ray:"):
        return RayEscape(make_ray(space, L0, text[len("ray:"):]), label=text)
    if text.startswith("random:"):
        try:
            return RandomWalk(int(text[len("random:"):]))
        except ValueError:
            raise ConfigError("strategy", f"random:<seed> needs an integer seed, got '{text}'")
    if text.startswith("scripted:"):
        path = text[len("scripted:"):]
        return Scripted(load_scripted_moves(path, space), label=f"scripted:{Path(path).name}")
    raise ConfigError(
        "strategy",
        f"unknown strategy '{text}'",
        solution=[name for name, _ in STRATEGY_IDENTIFIERS]
    )
