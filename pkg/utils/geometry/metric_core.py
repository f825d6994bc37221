"""
Metric Core Module
Space-independent geodesic geometry: point and domain records, the model
space interface, betweenness probes, comparison triangles and the sampled
curvature checks built on them.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.logger import log
from utils.system.error_handler import ContractViolation, UnsupportedOperation

# Tolerances
TAU_EQ = 1e-10
TAU_GEO_FLAT = 1e-9
TAU_GEO_CURVED = 1e-7


class SpaceKind(Enum):
    """The bundled model spaces (values are the CLI identifiers)"""
    EUCLIDEAN = "euclidean"
    POINCARE = "poincare"
    SPHERE_CAP = "sphere-cap"
    RIVER = "river"
    STAR = "star"


# --- Points ---

@dataclass(frozen=True)
class PlanarPoint:
    x: float
    y: float

    def coordinates(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class DiskPoint:
    """Point of the Poincaré disk model (open unit disk)"""
    x: float
    y: float

    def __post_init__(self):
        if not (self.x * self.x + self.y * self.y < 1.0):
            raise ContractViolation(f"Disk point ({self.x}, {self.y}) is not inside the unit disk")

    def coordinates(self) -> Tuple[float, float]:
        return (self.x, self.y)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class SpherePoint:
    """Point of the open upper unit hemisphere (colatitude theta, longitude phi)"""
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta < math.pi / 2):
            raise ContractViolation(f"Colatitude {self.theta} outside [0, pi/2)")
        phi = self.phi % (2 * math.pi)
        if self.theta == 0.0 or phi >= 2 * math.pi:
            phi = 0.0
        object.__setattr__(self, "phi", phi)

    def coordinates(self) -> Tuple[float, float]:
        return (self.theta, self.phi)


@dataclass(frozen=True)
class RiverPoint:
    x: float
    y: float

    def coordinates(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class StarPoint:
    """Point of a star tree: arclength s along arm ray_index; s = 0 is the hub"""
    ray_index: int
    s: float

    def __post_init__(self):
        if self.ray_index < 0 or self.s < 0:
            raise ContractViolation(f"Invalid star point ({self.ray_index}, {self.s})")
        if self.s == 0:
            object.__setattr__(self, "ray_index", 0)

    def coordinates(self) -> Tuple[float, float]:
        return (float(self.ray_index), self.s)


PointValue = Union[PlanarPoint, DiskPoint, SpherePoint, RiverPoint, StarPoint]


# --- Domains ---

@dataclass(frozen=True)
class ClosedBall:
    center: PointValue
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ContractViolation(f"Ball radius must be positive, got {self.radius}")

    def describe(self) -> str:
        coords = ",".join(f"{c:g}" for c in self.center.coordinates())
        return f"ball c={coords} r={self.radius:g}"


@dataclass(frozen=True)
class WholeSpace:

    def describe(self) -> str:
        return "whole"


@dataclass(frozen=True)
class HalfPlaneStrip:
    """Euclidean strip lower <= <p, n> <= upper with n = (cos angle, sin angle); upper may be inf"""
    normal_angle: float
    lower: float
    upper: float = math.inf

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ContractViolation(f"Strip bounds must satisfy lower < upper, got {self.lower}, {self.upper}")

    @property
    def normal(self) -> Tuple[float, float]:
        return (math.cos(self.normal_angle), math.sin(self.normal_angle))

    def describe(self) -> str:
        return f"strip n={self.normal_angle:g} lo={self.lower:g} hi={self.upper:g}"


DomainDescriptor = Union[ClosedBall, WholeSpace, HalfPlaneStrip]


# --- Model space interface ---

class ModelSpace(ABC):
    """Closed-form geometry of one uniquely geodesic model space"""

    kind: SpaceKind
    point_type: type
    tau_geo: float = TAU_GEO_FLAT

    @abstractmethod
    def distance(self, x, y) -> float:
        ...

    @abstractmethod
    def geodesic_point(self, x, y, t: float):
        """Point at fraction t of the geodesic from x to y"""

    @abstractmethod
    def extend(self, x, y, length: float):
        """Point at distance `length` beyond y on an extension of the geodesic from x through y"""

    @abstractmethod
    def random_point(self, rng: np.random.Generator, scale: float):
        ...

    @abstractmethod
    def parse_point(self, values: Sequence[float]):
        ...

    def ray_point(self, basepoint, direction, s: float):
        raise UnsupportedOperation(f"The {self.kind.value} space has no geodesic rays")

    def parse_direction(self, text: str):
        raise UnsupportedOperation(f"The {self.kind.value} space has no geodesic rays")

    def validate_point(self, p) -> None:
        if not isinstance(p, self.point_type):
            raise ContractViolation(
                f"Point {p!r} does not belong to the {self.kind.value} space",
                solution=f"Use {self.point_type.__name__} coordinates"
            )


_MODEL_FACTORIES: Dict[SpaceKind, Callable[..., ModelSpace]] = {}
_POINT_KINDS: Dict[type, SpaceKind] = {}


def register_space(kind: SpaceKind, point_type: type):
    """Class decorator registering a model space implementation"""
    def wrap(cls):
        cls.kind = kind
        cls.point_type = point_type
        _MODEL_FACTORIES[kind] = cls
        _POINT_KINDS[point_type] = kind
        return cls
    return wrap


@lru_cache(maxsize=None)
def get_model(kind: SpaceKind, arms: int = 3) -> ModelSpace:
    try:
        factory = _MODEL_FACTORIES[kind]
    except KeyError:
        raise UnsupportedOperation(f"No model registered for {kind.value}")
    if kind is SpaceKind.STAR:
        return factory(arms)
    return factory()


def model_for_point(p) -> ModelSpace:
    try:
        return get_model(_POINT_KINDS[type(p)])
    except KeyError:
        raise ContractViolation(f"Unknown point type {type(p).__name__}")


@dataclass(frozen=True)
class SpaceHandle:
    """A model space together with the domain the game is played in"""
    kind: SpaceKind
    domain: DomainDescriptor = WholeSpace()
    arms: int = 3
    margin: float = 1e-3

    def __post_init__(self):
        if self.kind is SpaceKind.STAR and self.arms < 2:
            raise ContractViolation(f"A star tree needs at least 2 arms, got {self.arms}")
        if isinstance(self.domain, ClosedBall):
            self.model.validate_point(self.domain.center)
        if isinstance(self.domain, HalfPlaneStrip) and self.kind is not SpaceKind.EUCLIDEAN:
            raise ContractViolation("Strip domains exist only in the Euclidean plane")
        if self.kind is SpaceKind.SPHERE_CAP:
            if not isinstance(self.domain, ClosedBall):
                raise ContractViolation(
                    "The sphere cap is only uniquely geodesic on small balls",
                    solution="Use a domain like 'ball c=0,0 r=1'"
                )
            reach = self.domain.center.theta + self.domain.radius
            if reach >= math.pi / 2 - self.margin:
                raise ContractViolation(
                    f"Sphere cap ball reaches colatitude {reach:.6f}, must stay below pi/2 - {self.margin}"
                )

    @property
    def model(self) -> ModelSpace:
        return get_model(self.kind, self.arms)

    @property
    def tau_geo(self) -> float:
        return self.model.tau_geo

    @property
    def is_compact(self) -> bool:
        return isinstance(self.domain, ClosedBall)


@dataclass(frozen=True)
class ComparisonTriangle:
    """Side lengths a, b (sharing a vertex), c (opposite it) and curvature kappa"""
    a: float
    b: float
    c: float
    kappa: float

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if min(a, b, c) < 0:
            raise ContractViolation(f"Negative side length in ({a}, {b}, {c})")
        slack = 1e-9 * max(1.0, a + b + c)
        if a > b + c + slack or b > a + c + slack or c > a + b + slack:
            raise ContractViolation(f"Sides ({a}, {b}, {c}) violate the triangle inequality")
        if a + b + c >= 2 * model_diameter(self.kappa):
            raise ContractViolation(
                f"Perimeter {a + b + c} is not below 2*D_kappa for kappa={self.kappa}"
            )


@dataclass(frozen=True)
class GeodesicEvalRequest:
    x: PointValue
    y: PointValue
    t: float

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ContractViolation(f"Geodesic parameter {self.t} outside [0, 1]")


class ProbeResult(Enum):
    """Outcome of a probe whose hypothesis may fail on the given inputs"""
    HOLDS = "holds"
    VIOLATED = "violated"
    HYPOTHESIS_NOT_MET = "hypothesis-not-met"


# --- Basic operations ---

def _check(space: SpaceHandle, *points) -> ModelSpace:
    model = space.model
    for p in points:
        model.validate_point(p)
    return model


def distance(space: SpaceHandle, x: PointValue, y: PointValue) -> float:
    model = _check(space, x, y)
    return model.distance(x, y)


def geodesic_point(space: SpaceHandle, x: PointValue, y: PointValue, t: float) -> PointValue:
    model = _check(space, x, y)
    if not 0.0 <= t <= 1.0:
        raise ContractViolation(f"Geodesic parameter {t} outside [0, 1]")
    if t == 0.0:
        return x
    if t == 1.0:
        return y
    return model.geodesic_point(x, y, t)


def evaluate(space: SpaceHandle, request: GeodesicEvalRequest) -> PointValue:
    return geodesic_point(space, request.x, request.y, request.t)


def points_equal(space: SpaceHandle, x: PointValue, y: PointValue, tol: float = TAU_EQ) -> bool:
    return distance(space, x, y) <= tol


def is_between(space: SpaceHandle, x, y, z, tol: float) -> bool:
    """True iff y lies on the geodesic segment [x, z] up to tol"""
    if not tol > 0:
        raise ContractViolation(f"Tolerance must be positive, got {tol}")
    return distance(space, x, y) + distance(space, y, z) <= distance(space, x, z) + tol


def betweenness_holds(space: SpaceHandle, x, y, z, w, tol: float) -> ProbeResult:
    """If y in [x,z] and z in [y,w] (points pairwise distinct), check y, z in [x,w]"""
    quad = (x, y, z, w)
    for i in range(4):
        for j in range(i + 1, 4):
            if points_equal(space, quad[i], quad[j]):
                return ProbeResult.HYPOTHESIS_NOT_MET
    if not (is_between(space, x, y, z, tol) and is_between(space, y, z, w, tol)):
        return ProbeResult.HYPOTHESIS_NOT_MET
    if is_between(space, x, y, w, tol) and is_between(space, x, z, w, tol):
        return ProbeResult.HOLDS
    log.debug(f"Betweenness violated for {quad}")
    return ProbeResult.VIOLATED


def metric_axiom_defects(space: SpaceHandle, x, y, z) -> Dict[str, float]:
    """Nonnegative defects of the metric axioms on one triple (0 means satisfied)"""
    dxy = distance(space, x, y)
    dyx = distance(space, y, x)
    dyz = distance(space, y, z)
    dxz = distance(space, x, z)
    return {
        "nonnegativity": max(0.0, -min(dxy, dyz, dxz)),
        "identity": distance(space, x, x),
        "symmetry": abs(dxy - dyx),
        "triangle": max(0.0, dxz - dxy - dyz),
    }


# --- Comparison geometry ---

def model_diameter(kappa: float) -> float:
    """D_kappa: diameter of the model plane of curvature kappa"""
    return math.pi / math.sqrt(kappa) if kappa > 0 else math.inf


def _half_chord(kappa: float) -> Tuple[Callable[[float], float], Callable[[float], float]]:
    # S(x) and P(x) for the haversine form S(d)^2 = S(s1-s2)^2 + P(s1)P(s2) hav(angle)
    if kappa > 0:
        return (lambda v: math.sin(v / 2)), math.sin
    if kappa < 0:
        return (lambda v: math.sinh(v / 2)), math.sinh
    return (lambda v: v / 2), (lambda v: v)


def comparison_point_distance(tri: ComparisonTriangle, s1: float, s2: float) -> float:
    """
    Model-plane distance between the point at arclength s1 along side a and
    the point at arclength s2 along side b, both measured from the vertex the
    two sides share.
    """
    slack = 1e-12 * max(1.0, tri.a, tri.b)
    if not (-slack <= s1 <= tri.a + slack and -slack <= s2 <= tri.b + slack):
        raise ContractViolation(f"Arclengths ({s1}, {s2}) outside sides ({tri.a}, {tri.b})")
    s1 = min(max(s1, 0.0), tri.a)
    s2 = min(max(s2, 0.0), tri.b)

    scale = math.sqrt(abs(tri.kappa)) if tri.kappa != 0 else 1.0
    a, b, c = tri.a * scale, tri.b * scale, tri.c * scale
    u, v = s1 * scale, s2 * scale
    half, full = _half_chord(tri.kappa)

    denominator = full(a) * full(b)
    if denominator <= 0.0:
        hav_angle = 0.0
    else:
        hav_angle = (half(c) ** 2 - half(a - b) ** 2) / denominator
        hav_angle = min(max(hav_angle, 0.0), 1.0)

    chord = math.sqrt(max(half(u - v) ** 2 + full(u) * full(v) * hav_angle, 0.0))
    if tri.kappa > 0:
        result = 2 * math.asin(min(chord, 1.0))
    elif tri.kappa < 0:
        result = 2 * math.asinh(chord)
    else:
        result = 2 * chord
    return result / scale


def _grid(n: int) -> np.ndarray:
    if n < 1:
        raise ContractViolation(f"Grid size must be positive, got {n}")
    return np.linspace(0.0, 1.0, n + 1)


def cat_excess_range(space: SpaceHandle, x1, x2, x3, kappa: float, grid: int) -> Tuple[float, float]:
    """(max, min) over sampled pairs of d(p, q) - comparison distance"""
    vertices = (x1, x2, x3)
    params = _grid(grid)
    worst = -math.inf
    best = math.inf
    for k in range(3):
        apex, left, right = vertices[k], vertices[(k + 1) % 3], vertices[(k + 2) % 3]
        a = distance(space, apex, left)
        b = distance(space, apex, right)
        c = distance(space, left, right)
        tri = ComparisonTriangle(a, b, c, kappa)
        left_pts = [geodesic_point(space, apex, left, float(t)) for t in params]
        right_pts = [geodesic_point(space, apex, right, float(t)) for t in params]
        for i, p in enumerate(left_pts):
            for j, q in enumerate(right_pts):
                excess = distance(space, p, q) - comparison_point_distance(tri, params[i] * a, params[j] * b)
                worst = max(worst, excess)
                best = min(best, excess)
    return worst, best


def cat_inequality_excess(space: SpaceHandle, x1, x2, x3, kappa: float, grid: int) -> float:
    """
    Signed maximum of d(p, q) - comparison distance over sampled pairs on two
    sides, taken over all three vertex pairings. Nonpositive means the
    CAT(kappa) inequality holds on the samples.
    """
    return cat_excess_range(space, x1, x2, x3, kappa, grid)[0]


def cat_inequality_check(space: SpaceHandle, x1, x2, x3, kappa: float, grid: int, tol: float) -> bool:
    """Sampled CAT(kappa) inequality on the triangle x1 x2 x3"""
    if not sum((distance(space, x1, x2), distance(space, x2, x3), distance(space, x1, x3))) < 2 * model_diameter(kappa):
        raise ContractViolation("Triangle perimeter is not below 2*D_kappa")
    return cat_inequality_excess(space, x1, x2, x3, kappa, grid) <= tol


def lower_curvature_check(space: SpaceHandle, x1, x2, x3, kappa: float, grid: int, tol: float) -> bool:
    """Sampled reverse CAT(kappa) inequality (curvature bounded below by kappa)"""
    return cat_excess_range(space, x1, x2, x3, kappa, grid)[1] >= -tol


def busemann_convexity_check(space: SpaceHandle, gamma1: Tuple, gamma2: Tuple, grid: int, tol: float) -> bool:
    """d(g1(t), g2(t)) <= (1-t) d(g1(0), g2(0)) + t d(g1(1), g2(1)) on grid samples"""
    a0, a1 = gamma1
    b0, b1 = gamma2
    start = distance(space, a0, b0)
    end = distance(space, a1, b1)
    for t in _grid(grid):
        t = float(t)
        gap = distance(space, geodesic_point(space, a0, a1, t), geodesic_point(space, b0, b1, t))
        if gap > (1 - t) * start + t * end + tol:
            log.debug(f"Busemann convexity fails at t={t}: {gap} > {(1 - t) * start + t * end}")
            return False
    return True


def metric_convexity_check(space: SpaceHandle, x, a, b, grid: int, tol: float) -> bool:
    """d(x, g(t)) <= (1-t) d(x, a) + t d(x, b) along the geodesic g from a to b"""
    da = distance(space, x, a)
    db = distance(space, x, b)
    for t in _grid(grid):
        t = float(t)
        if distance(space, x, geodesic_point(space, a, b, t)) > (1 - t) * da + t * db + tol:
            return False
    return True


def rtree_condition_check(space: SpaceHandle, x, y, z, tol: float) -> ProbeResult:
    """If [y,x] and [x,z] meet only at x then their union is [y,z]"""
    dxy = distance(space, x, y)
    dxz = distance(space, x, z)
    if min(dxy, dxz) <= TAU_EQ:
        return ProbeResult.HYPOTHESIS_NOT_MET
    probe = min(dxy, dxz) * 1e-6
    near_y = geodesic_point(space, x, y, probe / dxy)
    near_z = geodesic_point(space, x, z, probe / dxz)
    if distance(space, near_y, near_z) <= probe:
        return ProbeResult.HYPOTHESIS_NOT_MET
    if abs(dxy + dxz - distance(space, y, z)) <= tol:
        return ProbeResult.HOLDS
    return ProbeResult.VIOLATED


def geodesic_uniform_convergence_gap(
    space: SpaceHandle,
    endpoints_sequence: Sequence[Tuple[PointValue, PointValue]],
    limit_endpoints: Tuple[PointValue, PointValue],
    grid: int,
) -> List[float]:
    """sup over grid samples of d(g_n(t), g(t)) for each endpoint pair (x_n, y_n)"""
    x, y = limit_endpoints
    params = [float(t) for t in _grid(grid)]
    limit = [geodesic_point(space, x, y, t) for t in params]
    gaps = []
    for xn, yn in endpoints_sequence:
        gaps.append(max(
            distance(space, geodesic_point(space, xn, yn, t), p) for t, p in zip(params, limit)
        ))
    return gaps
