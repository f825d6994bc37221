"""
Game Engine Module
Discrete Lion-Man game: configuration, the turn loop, transcripts and the
lion-wins / man-wins classification.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

from core.logger import log
from utils.geometry.metric_core import (
    PointValue,
    SpaceHandle,
    distance,
    geodesic_point,
)
from utils.geometry.model_spaces import RayDescriptor, domain_contains
from utils.system.error_handler import ContractViolation, IllegalMove

DEFAULT_CAPTURE_GRACE = 3


@dataclass(frozen=True)
class GameConfig:
    space: SpaceHandle
    jump_bound: float
    L0: PointValue
    M0: PointValue
    horizon: int = 100
    win_tol: float = 1e-6
    tie_tol: Optional[float] = None
    capture_grace: int = DEFAULT_CAPTURE_GRACE

    def __post_init__(self):
        if not self.jump_bound > 0:
            raise ContractViolation(f"Jump bound D must be positive, got {self.jump_bound}")
        if self.horizon < 1:
            raise ContractViolation(f"Horizon must be at least 1, got {self.horizon}")
        if not self.win_tol > 0:
            raise ContractViolation(f"Win tolerance must be positive, got {self.win_tol}")
        if self.capture_grace < 0:
            raise ContractViolation(f"Capture grace must be nonnegative, got {self.capture_grace}")
        for name, p in (("L0", self.L0), ("M0", self.M0)):
            self.space.model.validate_point(p)
            if not domain_contains(self.domain, p, self.space.tau_geo):
                raise ContractViolation(
                    f"{name} lies outside the domain {self.domain.describe()}",
                    solution="Pick starting points inside the domain or enlarge it"
                )
        if self.tie_tol is None:
            object.__setattr__(self, "tie_tol", 1e-12 * max(1.0, self.jump_bound))
        elif self.tie_tol < 0:
            raise ContractViolation(f"Tie tolerance must be nonnegative, got {self.tie_tol}")

    @property
    def domain(self):
        return self.space.domain

    def is_capture(self, gap: float) -> bool:
        """
        Capture test for a single gap: D_i <= D - tie_tol.
        With the default band an exact tie D_i == D is not a capture, so the
        lion closes in one step later; tie_tol=0 counts exact ties.
        """
        return gap <= self.jump_bound - self.tie_tol


@dataclass(frozen=True)
class StepRecord:
    """State (L_i, M_i) before step i together with the lengths of the moves made from it"""
    index: int
    lion: PointValue
    man: PointValue
    gap: float
    lion_move_len: float
    man_move_len: float


class GameHistory:
    """
    Read-only view of a game in progress, as seen by the man when choosing M_{i+1}.
    The lion has already answered, so lions holds L_0..L_{i+1} and men holds M_0..M_i.
    """

    def __init__(self, lions: List[PointValue], men: List[PointValue]):
        self._lions = lions
        self._men = men

    @property
    def step(self) -> int:
        return len(self._men) - 1

    @property
    def current_man(self) -> PointValue:
        return self._men[-1]

    @property
    def current_lion(self) -> PointValue:
        return self._lions[-1]

    @property
    def previous_lion(self) -> PointValue:
        return self._lions[-2] if len(self._lions) > 1 else self._lions[-1]

    @property
    def lions(self) -> Sequence[PointValue]:
        return tuple(self._lions)

    @property
    def men(self) -> Sequence[PointValue]:
        return tuple(self._men)


@dataclass
class GameTranscript:
    config: GameConfig
    steps: List[StepRecord]
    post_gaps: List[float]
    final_lion: PointValue
    final_man: PointValue
    strategy_name: str = ""
    certificate: Optional[RayDescriptor] = None

    @property
    def gaps(self) -> List[float]:
        """D_0 .. D_n, the last entry being the gap after the final step"""
        return [s.gap for s in self.steps] + [distance(self.config.space, self.final_lion, self.final_man)]

    @property
    def lions(self) -> List[PointValue]:
        return [s.lion for s in self.steps] + [self.final_lion]

    @property
    def men(self) -> List[PointValue]:
        return [s.man for s in self.steps] + [self.final_man]

    def capture_index(self) -> Optional[int]:
        for i, gap in enumerate(self.gaps):
            if self.config.is_capture(gap):
                return i
        return None


# --- Outcomes ---

@dataclass(frozen=True)
class LionCapture:
    i0: int
    variant: str = field(default="LionCapture", init=False)

    def to_record(self) -> Dict[str, Any]:
        return {"variant": self.variant, "i0": self.i0}


@dataclass(frozen=True)
class LionLimit:
    final_gap: float
    monotone_certified: bool
    variant: str = field(default="LionLimit", init=False)

    def to_record(self) -> Dict[str, Any]:
        return {"variant": self.variant, "final_gap": self.final_gap,
                "monotone_certified": self.monotone_certified}


@dataclass(frozen=True)
class ManEscapeCertified:
    liminf_gap: float
    certificate: str
    variant: str = field(default="ManEscapeCertified", init=False)

    def to_record(self) -> Dict[str, Any]:
        return {"variant": self.variant, "liminf_gap": self.liminf_gap, "certificate": self.certificate}


@dataclass(frozen=True)
class Undecided:
    final_D_i: float
    trend: float
    variant: str = field(default="Undecided", init=False)

    def to_record(self) -> Dict[str, Any]:
        return {"variant": self.variant, "final_D_i": self.final_D_i, "trend": self.trend}


Outcome = Union[LionCapture, LionLimit, ManEscapeCertified, Undecided]


# --- Game operations ---

def lion_step(space: SpaceHandle, L: PointValue, M: PointValue, D: float) -> PointValue:
    """Move from L toward M by min{D, d(L, M)} along the geodesic"""
    d = distance(space, L, M)
    if d <= D:
        return M
    return geodesic_point(space, L, M, D / d)


def validate_man_move(domain, space: SpaceHandle, M_i: PointValue, M_next: PointValue, D: float, tol: float) -> bool:
    try:
        space.model.validate_point(M_next)
    except ContractViolation:
        return False
    if not domain_contains(domain, M_next, tol):
        return False
    return distance(space, M_i, M_next) <= D + tol


def play(config: GameConfig, strategy) -> GameTranscript:
    """
    Run the game until the horizon, or until capture_grace steps after the first capture.
    Each step: the lion answers M_i, then the man moves seeing L_{i+1}.
    """
    space = config.space
    D = config.jump_bound
    tol = space.tau_geo * max(1.0, D)
    strategy.prepare(config)

    lions = [config.L0]
    men = [config.M0]
    history = GameHistory(lions, men)
    steps: List[StepRecord] = []
    post_gaps: List[float] = []
    captured_at = None

    log.debug(f"Game start: {space.kind.value} D={D} horizon={config.horizon} strategy={strategy.name}")
    for i in range(config.horizon):
        L, M = lions[i], men[i]
        gap = distance(space, L, M)
        L_next = lion_step(space, L, M, D)
        lions.append(L_next)

        M_next = strategy.next_move(history, space, D)
        if not validate_man_move(config.domain, space, M, M_next, D, tol):
            raise IllegalMove(
                i,
                f"{strategy.name} moved to {M_next!r} from {M!r} (D={D})",
                solution=["Check the strategy stays inside the domain", "Moves may not exceed the jump bound D"]
            )
        men.append(M_next)

        steps.append(StepRecord(i, L, M, gap, distance(space, L, L_next), distance(space, M, M_next)))
        post_gaps.append(distance(space, L_next, M))

        if captured_at is None and config.is_capture(gap):
            captured_at = i
            log.debug(f"Capture at step {i} (D_i={gap})")
        if captured_at is not None and i - captured_at >= config.capture_grace:
            break

    log.debug(f"Game over after {len(steps)} steps")
    return GameTranscript(
        config=config,
        steps=steps,
        post_gaps=post_gaps,
        final_lion=lions[len(steps)],
        final_man=men[len(steps)],
        strategy_name=strategy.name,
        certificate=strategy.certificate(),
    )


def classify_outcome(transcript: GameTranscript, win_tol: Optional[float] = None) -> Outcome:
    if not transcript.steps:
        raise ContractViolation("Cannot classify an empty transcript")
    config = transcript.config
    eps = config.win_tol if win_tol is None else win_tol
    D = config.jump_bound
    tau = config.space.tau_geo * max(1.0, D)
    gaps = transcript.gaps

    i0 = transcript.capture_index()
    if i0 is not None:
        return LionCapture(i0)

    monotone = all(b <= a + tau for a, b in zip(gaps, gaps[1:]))
    if gaps[-1] - D <= eps and monotone:
        return LionLimit(gaps[-1] - D, True)

    mid = gaps[len(gaps) // 2]
    if transcript.certificate is not None:
        if min(gaps) - D > eps and abs(gaps[-1] - mid) <= tau:
            return ManEscapeCertified(min(gaps[len(gaps) // 2:]), transcript.certificate.describe())
        log.debug("Ray certificate present but the gap did not stay constant")

    half = max(1, len(gaps) // 2)
    return Undecided(gaps[-1], (gaps[-1] - mid) / half)


def check_transcript_invariants(transcript: GameTranscript) -> List[str]:
    """Messages for every broken game law in the transcript (empty when all hold)"""
    config = transcript.config
    space = config.space
    D = config.jump_bound
    tau = space.tau_geo
    problems = []

    for expected, record in enumerate(transcript.steps):
        i = record.index
        scale = max(1.0, D, record.gap)
        if i != expected:
            problems.append(f"step indices not contiguous at position {expected} (got {i})")
        if abs(record.lion_move_len - min(D, record.gap)) > tau * scale:
            problems.append(f"step {i}: lion moved {record.lion_move_len}, expected {min(D, record.gap)}")
        if record.man_move_len > D + tau * max(1.0, D):
            problems.append(f"step {i}: man moved {record.man_move_len} > D")
        if not domain_contains(config.domain, record.man, tau):
            problems.append(f"step {i}: man left the domain")
        expected_post = record.gap - min(D, record.gap)
        if abs(transcript.post_gaps[i] - expected_post) > tau * scale:
            problems.append(f"step {i}: post-gap {transcript.post_gaps[i]} != D_i - min(D, D_i) = {expected_post}")

    gaps = transcript.gaps
    i0 = transcript.capture_index()
    limit = len(gaps) - 1 if i0 is None else i0
    for i in range(limit):
        if gaps[i + 1] > gaps[i] + tau * max(1.0, gaps[i]):
            problems.append(f"step {i}: gap grew from {gaps[i]} to {gaps[i + 1]} before capture")
    if i0 is not None:
        for i in range(i0, len(transcript.post_gaps)):
            if transcript.post_gaps[i] > tau * max(1.0, D):
                problems.append(f"step {i}: lion failed to stay on the man after capture")

    for message in problems:
        log.debug(f"Invariant violation: {message}")
    return problems
