"""
Verification Module
Executable checks for the structural results: betweenness probes, the
spiral-game report, the fixed-point-free nonexpansive map on a ray, and the
batch suite behind the `verify` mode.
"""
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.logger import log
from utils.game.engine import GameConfig, GameTranscript, play
from utils.game.strategies import Stationary
from utils.geometry.metric_core import (
    TAU_EQ,
    ClosedBall,
    HalfPlaneStrip,
    PointValue,
    ProbeResult,
    SpaceHandle,
    SpaceKind,
    betweenness_holds,
    busemann_convexity_check,
    cat_excess_range,
    distance,
    geodesic_point,
    geodesic_uniform_convergence_gap,
    lower_curvature_check,
    metric_axiom_defects,
    model_diameter,
    rtree_condition_check,
)
from utils.geometry.model_spaces import (
    PlanarDirection,
    RayDescriptor,
    clip_to_domain,
    domain_contains,
    domain_diameter_estimate,
    dyadic_geodesic_point,
    extend_geodesic,
    lion_step_bound,
    make_ray,
    ray_eval,
    sample_domain,
)
from utils.system.error_handler import UnsupportedOperation


# --- Spiral game report ---

@dataclass
class Example41Report:
    """Per-step series of a spiral game in the plane"""
    jump_bound: float
    t_series: List[float]
    alpha_series: List[float]
    partial_sums: List[float]
    recurrence_residuals: List[float]
    identity_residuals: List[float]
    containment_max_L: float
    containment_max_M: float
    all_gaps_above_D: bool

    def halving_holds(self, floor: float = 1e-12) -> bool:
        """t_{i+2} < t_{i+1} / 2 wherever t_{i+1} exceeds floor"""
        return all(b < a / 2 for a, b in zip(self.t_series, self.t_series[1:]) if a > floor)

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def example41_report(transcript: GameTranscript, D: float) -> Example41Report:
    config = transcript.config
    if config.space.kind is not SpaceKind.EUCLIDEAN or not transcript.strategy_name.startswith("spiral"):
        raise UnsupportedOperation(
            "The spiral report needs a spiral game in the Euclidean plane",
            solution="Run with --space euclidean --strategy spiral"
        )
    space = config.space
    t_series = list(transcript.post_gaps)
    gaps = transcript.gaps

    origin = config.L0
    max_L = max(distance(space, origin, p) for p in transcript.lions)
    max_M = max(distance(space, origin, p) for p in transcript.men)

    report = Example41Report(
        jump_bound=D,
        t_series=t_series,
        alpha_series=[math.atan(t / D) for t in t_series],
        partial_sums=[float(v) for v in np.cumsum(t_series)],
        recurrence_residuals=[abs((D + b) ** 2 - D ** 2 - a ** 2) for a, b in zip(t_series, t_series[1:])],
        identity_residuals=[abs(gaps[i] - (D + t)) for i, t in enumerate(t_series)],
        containment_max_L=max_L,
        containment_max_M=max_M,
        all_gaps_above_D=all(g > D - config.tie_tol for g in gaps),
    )
    log.debug(f"Spiral report: {len(t_series)} steps, sum t = {report.partial_sums[-1] if t_series else 0}")
    return report


# --- Fixed-point-free map on a ray ---

@dataclass(frozen=True)
class FppWitness:
    ray: RayDescriptor

    @property
    def basepoint(self) -> PointValue:
        return self.ray.basepoint


def fpp_map_eval(witness: FppWitness, space: SpaceHandle, x: PointValue) -> PointValue:
    """f(x) = ray(d(ray(0), x) + 1)"""
    return ray_eval(witness.ray, distance(space, witness.basepoint, x) + 1.0)


def fpp_no_fixed_point_check(witness: FppWitness, space: SpaceHandle, samples: Sequence[PointValue]) -> float:
    """Smallest displacement d(x, f(x)) over the samples"""
    return min(distance(space, x, fpp_map_eval(witness, space, x)) for x in samples)


def fpp_nonexpansive_defect(witness: FppWitness, space: SpaceHandle,
                            pairs: Sequence[Tuple[PointValue, PointValue]]) -> float:
    """Largest d(f(x), f(y)) - d(x, y) over the pairs"""
    return max(
        distance(space, fpp_map_eval(witness, space, x), fpp_map_eval(witness, space, y)) - distance(space, x, y)
        for x, y in pairs
    )


# --- Betweenness ---

def betweenness_tally(space: SpaceHandle, samples: Sequence[PointValue], grid: int, tol: float,
                      domain=None) -> Counter:
    """
    Probe betweenness on constructed quadruples: for consecutive sample pairs
    (x, z) take y on [x, z] at grid parameter u, then w past z on the extension
    of [y, z], clipped to the domain. Only the hypothesis holds by construction.
    """
    domain = space.domain if domain is None else domain
    tally = Counter()
    params = [k / grid for k in range(1, grid)]
    for x, z in zip(samples[::2], samples[1::2]):
        for u in params:
            y = geodesic_point(space, x, z, u)
            reach = distance(space, y, z)
            for v in params:
                length = v * reach
                w = clip_to_domain(space, domain, z, extend_geodesic(space, y, z, length), length)
                tally[betweenness_holds(space, x, y, z, w, tol)] += 1
    return tally


def strong_convexity_probe(space: SpaceHandle, domain, samples: Sequence[PointValue], grid: int, tol: float) -> bool:
    """Falsifier: False as soon as one constructed quadruple breaks betweenness"""
    inside = [p for p in samples if domain_contains(domain, p, tol)]
    tally = betweenness_tally(space, inside, max(grid, 3), tol, domain)
    log.debug(f"Betweenness tally: {dict((k.value, n) for k, n in tally.items())}")
    return tally[ProbeResult.VIOLATED] == 0


# --- Batch suite ---

@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class VerificationReport:
    space: str
    domain: str
    samples: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, threshold: float, passed: Optional[bool] = None, detail: str = ""):
        if passed is None:
            passed = value <= threshold
        self.checks.append(CheckResult(name, bool(passed), float(value), float(threshold), detail))

    def to_record(self) -> Dict[str, Any]:
        return {
            "space": self.space,
            "domain": self.domain,
            "samples": self.samples,
            "passed": self.passed,
            "checks": [c.to_record() for c in self.checks],
        }


# natural comparison curvatures per space: (CAT upper bounds, lower bound or None)
CURVATURE_PROFILE = {
    SpaceKind.EUCLIDEAN: ((0.0,), 0.0),
    SpaceKind.POINCARE: ((-1.0, 0.0), -1.0),
    SpaceKind.SPHERE_CAP: ((1.0,), 0.0),
    SpaceKind.RIVER: ((0.0, -1.0), None),
    SpaceKind.STAR: ((0.0, -1.0), None),
}

BUSEMANN_SPACES = (SpaceKind.EUCLIDEAN, SpaceKind.POINCARE, SpaceKind.RIVER, SpaceKind.STAR)
TREE_SPACES = (SpaceKind.RIVER, SpaceKind.STAR)
PROPER_SPACES = (SpaceKind.EUCLIDEAN, SpaceKind.POINCARE, SpaceKind.SPHERE_CAP)

PROBE_RAYS = {
    SpaceKind.EUCLIDEAN: ("+x", "angle=2"),
    SpaceKind.POINCARE: ("+x", "-y"),
    SpaceKind.RIVER: ("+x", "-x", "+y", "-y"),
    SpaceKind.STAR: ("0", "1"),
}


def _triples(points: Sequence[PointValue]):
    return list(zip(points[0::3], points[1::3], points[2::3]))


def _probe_rays(space: SpaceHandle, basepoint: PointValue) -> List[RayDescriptor]:
    if isinstance(space.domain, HalfPlaneStrip):
        nx, ny = space.domain.normal
        along = PlanarDirection(-ny, nx)
        return [RayDescriptor(space, basepoint, along),
                RayDescriptor(space, basepoint, PlanarDirection(ny, -nx))]
    return [make_ray(space, basepoint, text) for text in PROBE_RAYS[space.kind]]


def _check_metric(report, space, points, tau):
    worst = 0.0
    for x, y, z in _triples(points):
        worst = max(worst, max(metric_axiom_defects(space, x, y, z).values()) / max(1.0, distance(space, x, z)))
    report.add("metric_axioms", worst, tau, detail=f"{len(points) // 3} triples")


def _check_geodesics(report, space, points, rng, tau):
    param_gap = 0.0
    segment_gap = 0.0
    unique_gap = 0.0
    for x, y in zip(points[0::2], points[1::2]):
        d = distance(space, x, y)
        scale = max(1.0, d)
        t, s = (float(v) for v in rng.uniform(0.0, 1.0, size=2))
        gt, gs = geodesic_point(space, x, y, t), geodesic_point(space, x, y, s)
        param_gap = max(param_gap,
                        abs(distance(space, x, gt) - t * d) / scale,
                        abs(distance(space, gt, y) - (1 - t) * d) / scale)
        segment_gap = max(segment_gap, abs(distance(space, gt, gs) - abs(t - s) * d) / scale)
        unique_gap = max(unique_gap, distance(space, gt, dyadic_geodesic_point(space, x, y, t)) / scale)
    report.add("geodesic_parametrization", param_gap, tau)
    report.add("segment_consistency", segment_gap, tau)
    report.add("geodesic_uniqueness", unique_gap, 10 * tau, detail="direct formula vs repeated midpoints")


def _check_domain(report, space, points, rng):
    escaped = 0
    for x, y in zip(points[0::2], points[1::2]):
        if not domain_contains(space.domain, geodesic_point(space, x, y, float(rng.uniform())), 1e-9):
            escaped += 1
    report.add("domain_convexity", escaped, 0, detail=space.domain.describe())


def _check_curvature(report, space, points, grid, tau):
    upper, lower = CURVATURE_PROFILE[space.kind]
    triangles = _triples(points)[:max(1, len(points) // 60)]
    for kappa in upper:
        worst = -math.inf
        skipped = 0
        for x1, x2, x3 in triangles:
            perimeter = distance(space, x1, x2) + distance(space, x2, x3) + distance(space, x1, x3)
            if perimeter >= 2 * model_diameter(kappa):
                skipped += 1
                continue
            worst = max(worst, cat_excess_range(space, x1, x2, x3, kappa, grid)[0])
        report.add(f"cat({kappa:g})", max(worst, 0.0), tau,
                   detail=f"{len(triangles) - skipped} triangles, max excess {worst:.3g}")
    if lower is not None:
        failures = sum(1 for x1, x2, x3 in triangles
                       if not lower_curvature_check(space, x1, x2, x3, lower, grid, tau))
        report.add(f"curvature_lower_bound({lower:g})", failures, 0)
    if space.kind in BUSEMANN_SPACES:
        failures = 0
        for a0, a1, b0, b1 in zip(points[0::4], points[1::4], points[2::4], points[3::4]):
            scale = max(1.0, distance(space, a0, b0), distance(space, a1, b1))
            if not busemann_convexity_check(space, (a0, a1), (b0, b1), grid, tau * scale):
                failures += 1
        report.add("busemann_convexity", failures, 0)


def _check_trees(report, space, points, tau):
    tally = Counter(rtree_condition_check(space, x, y, z, tau * max(1.0, distance(space, y, z)))
                    for x, y, z in _triples(points))
    report.add("rtree_condition", tally[ProbeResult.VIOLATED], 0,
               detail=f"{tally[ProbeResult.HOLDS]} admissible triples")


def _check_rays(report, space, points, rng, tau):
    basepoint = points[0]
    rays = _probe_rays(space, basepoint)
    reach = 10.0 if space.kind is SpaceKind.POINCARE else 100.0
    worst = 0.0
    for ray in rays:
        for s, s2 in rng.uniform(0.0, reach, size=(100, 2)):
            s, s2 = float(s), float(s2)
            gap = abs(distance(space, ray_eval(ray, s), ray_eval(ray, s2)) - abs(s - s2))
            worst = max(worst, gap / max(1.0, abs(s - s2)))
    report.add("ray_isometry", worst, tau, detail=f"{len(rays)} rays")

    witness = FppWitness(rays[0])
    near = [p for p in points if distance(space, basepoint, p) < reach - 2]
    displacement = fpp_no_fixed_point_check(witness, space, near)
    report.add("fpp_no_fixed_point", displacement, 1 - tau, passed=displacement >= 1 - tau)
    pairs = list(zip(near[0::2], near[1::2]))
    report.add("fpp_nonexpansive", fpp_nonexpansive_defect(witness, space, pairs), tau)


def _check_uniform_convergence(report, space, points, grid):
    x, y, aux = points[0], points[1], points[2]
    limit_gap = distance(space, x, aux)
    if limit_gap <= TAU_EQ:
        return
    ns = [int(n) for n in np.unique(np.geomspace(10, 10_000, 40).astype(int))]
    sequence = [(geodesic_point(space, x, aux, min(1.0, 1.0 / (n * limit_gap))), y) for n in ns]
    gaps = geodesic_uniform_convergence_gap(space, sequence, (x, y), grid)
    tail = gaps[len(gaps) // 10:]
    decreasing = all(b <= a for a, b in zip(tail, tail[1:]))
    report.add("geodesic_uniform_convergence", gaps[-1], 1e-3, passed=gaps[-1] < 1e-3 and decreasing,
               detail=f"n up to {ns[-1]}")


def _check_lion_step_bound(report, space, points, bound, diameter):
    """A stationary man is caught within bound - 1 steps at D = 1"""
    worst = 0
    for L0, M0 in list(zip(points[0::2], points[1::2]))[:20]:
        transcript = play(GameConfig(space, 1.0, L0, M0, horizon=bound + 1, capture_grace=0), Stationary())
        i0 = transcript.capture_index()
        worst = max(worst, bound + 1 if i0 is None else i0)
    report.add("lion_step_bound", worst, bound - 1, detail=f"sampled diameter {diameter:.6g} at D = 1, N = {bound}")


def run_suite(space: SpaceHandle, rng: np.random.Generator, samples: int = 1000, grid: int = 10) -> VerificationReport:
    """All checks that apply to the space and its domain"""
    report = VerificationReport(space.kind.value, space.domain.describe(), samples)
    tau = space.tau_geo
    points = sample_domain(space, rng, max(samples, 12))
    log.info(f"Verification suite: {space.kind.value} / {space.domain.describe()} with {len(points)} samples")

    _check_metric(report, space, points, tau)
    _check_geodesics(report, space, points, rng, tau)
    _check_domain(report, space, points, rng)

    tally = betweenness_tally(space, points[:max(2, samples // 50) * 2], 6, tau)
    report.add("betweenness", tally[ProbeResult.VIOLATED], 0,
               detail=f"{tally[ProbeResult.HOLDS]} quadruples held")

    _check_curvature(report, space, points, grid, tau)
    if space.kind in TREE_SPACES:
        _check_trees(report, space, points, tau)
    if not space.is_compact:
        _check_rays(report, space, points, rng, tau)
    if space.kind in PROPER_SPACES:
        _check_uniform_convergence(report, space, points, grid)
    if isinstance(space.domain, ClosedBall):
        diameter = domain_diameter_estimate(space, points[:200])
        bound = lion_step_bound(diameter, 1.0)
        _check_lion_step_bound(report, space, points, bound, diameter)

    for check in report.checks:
        log.debug(f"check {check.name}: passed={check.passed} value={check.value} threshold={check.threshold}")
    return report
