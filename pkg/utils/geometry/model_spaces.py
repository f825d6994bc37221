"""
Model Spaces Module
Closed-form geometry of the five bundled uniquely geodesic spaces, their
domains, geodesic rays and seeded samplers.
"""
import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from core.logger import log
from utils.geometry.metric_core import (
    TAU_GEO_CURVED,
    TAU_GEO_FLAT,
    ClosedBall,
    DiskPoint,
    DomainDescriptor,
    HalfPlaneStrip,
    ModelSpace,
    PlanarPoint,
    PointValue,
    RiverPoint,
    SpaceHandle,
    SpaceKind,
    SpherePoint,
    StarPoint,
    WholeSpace,
    distance,
    geodesic_point,
    model_for_point,
    register_space,
)
from utils.system.error_handler import ContractViolation, UnsupportedOperation

CLIP_ITERATIONS = 60
DEFAULT_SAMPLE_SCALE = 5.0
# disk points farther than this from the centre lose distance precision past the curved tolerance
DISK_RAY_REACH = 16.0


# --- Directions ---

@dataclass(frozen=True)
class PlanarDirection:
    """Unit vector (normalised on construction)"""
    dx: float
    dy: float

    def __post_init__(self):
        norm = math.hypot(self.dx, self.dy)
        if norm == 0:
            raise ContractViolation("Direction vector must be nonzero")
        object.__setattr__(self, "dx", self.dx / norm)
        object.__setattr__(self, "dy", self.dy / norm)


@dataclass(frozen=True)
class IdealEndpoint:
    """Point at infinity of the Poincaré disk, given by its angle on the unit circle"""
    angle: float


@dataclass(frozen=True)
class RiverDirection:
    """'axis': descend to the x-axis then travel along it; 'vertical': stay on the vertical line"""
    leg: str
    sign: int

    def __post_init__(self):
        if self.leg not in ("axis", "vertical") or self.sign not in (-1, 1):
            raise ContractViolation(f"Invalid river direction ({self.leg}, {self.sign})")


@dataclass(frozen=True)
class StarDirection:
    ray_index: int


Direction = Union[PlanarDirection, IdealEndpoint, RiverDirection, StarDirection]


def _parse_signed_axis(text: str):
    text = text.strip().lower()
    table = {"+x": (1.0, 0.0), "x": (1.0, 0.0), "-x": (-1.0, 0.0),
             "+y": (0.0, 1.0), "y": (0.0, 1.0), "-y": (0.0, -1.0)}
    return table.get(text)


def _parse_planar_direction(text: str):
    axis = _parse_signed_axis(text)
    if axis:
        return axis
    text = text.strip().lower()
    if text.startswith("angle="):
        angle = float(text.split("=", 1)[1])
        return (math.cos(angle), math.sin(angle))
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise ContractViolation(f"Cannot parse direction '{text}'")
    return (parts[0], parts[1])


def _expect(values: Sequence[float], count: int, kind: str):
    if len(values) != count:
        raise ContractViolation(f"A {kind} point needs {count} coordinates, got {len(values)}")


# --- Euclidean plane ---

@register_space(SpaceKind.EUCLIDEAN, PlanarPoint)
class EuclideanPlane(ModelSpace):
    tau_geo = TAU_GEO_FLAT

    def distance(self, x, y):
        return math.hypot(x.x - y.x, x.y - y.y)

    def geodesic_point(self, x, y, t):
        return PlanarPoint(x.x + t * (y.x - x.x), x.y + t * (y.y - x.y))

    def extend(self, x, y, length):
        d = self.distance(x, y)
        if d == 0:
            return y
        return PlanarPoint(y.x + length * (y.x - x.x) / d, y.y + length * (y.y - x.y) / d)

    def ray_point(self, basepoint, direction, s):
        return PlanarPoint(basepoint.x + s * direction.dx, basepoint.y + s * direction.dy)

    def parse_direction(self, text):
        return PlanarDirection(*_parse_planar_direction(text))

    def random_point(self, rng, scale):
        x, y = rng.uniform(-scale, scale, size=2)
        return PlanarPoint(float(x), float(y))

    def parse_point(self, values):
        _expect(values, 2, "planar")
        return PlanarPoint(float(values[0]), float(values[1]))


# --- Poincaré disk ---

def _to_origin(a: complex, z: complex) -> complex:
    """Disk automorphism sending a to 0"""
    return (z - a) / (1 - a.conjugate() * z)


def _from_origin(a: complex, z: complex) -> complex:
    """Inverse of _to_origin"""
    return (z + a) / (1 + a.conjugate() * z)


def _disk_point(z: complex) -> DiskPoint:
    if abs(z) >= 1.0:
        raise ContractViolation(
            "Disk point left the unit disk in double precision",
            solution="Keep hyperbolic distances below ~35 from the origin"
        )
    return DiskPoint(z.real, z.imag)


def euclidean_radius(hyperbolic_radius: float) -> float:
    """Euclidean radius of the disk-model circle of given hyperbolic radius about the origin"""
    return math.tanh(hyperbolic_radius / 2)


@register_space(SpaceKind.POINCARE, DiskPoint)
class PoincareDisk(ModelSpace):
    tau_geo = TAU_GEO_CURVED

    def distance(self, x, y):
        nx = (1 - math.hypot(x.x, x.y)) * (1 + math.hypot(x.x, x.y))
        ny = (1 - math.hypot(y.x, y.y)) * (1 + math.hypot(y.x, y.y))
        delta = 2 * ((x.x - y.x) ** 2 + (x.y - y.y) ** 2) / (nx * ny)
        # arcosh(1 + delta) without cancellation
        return math.log1p(delta + math.sqrt(delta * (delta + 2)))

    def geodesic_point(self, x, y, t):
        a = x.as_complex()
        w = _to_origin(a, y.as_complex())
        r = abs(w)
        if r == 0:
            return x
        rho = math.tanh(t * math.atanh(r))
        return _disk_point(_from_origin(a, rho * w / r))

    def extend(self, x, y, length):
        b = y.as_complex()
        w = _to_origin(b, x.as_complex())
        r = abs(w)
        if r == 0:
            return y
        return _disk_point(_from_origin(b, -euclidean_radius(length) * w / r))

    def ray_point(self, basepoint, direction, s):
        a = basepoint.as_complex()
        xi = _to_origin(a, cmath.exp(1j * direction.angle))
        rho = euclidean_radius(s)
        if rho >= 1.0:
            raise ContractViolation(f"Ray parameter {s} is beyond double precision in the disk model")
        return _disk_point(_from_origin(a, rho * xi / abs(xi)))

    def parse_direction(self, text):
        dx, dy = _parse_planar_direction(text)
        return IdealEndpoint(math.atan2(dy, dx))

    def random_point(self, rng, scale):
        rho = euclidean_radius(float(rng.uniform(0.0, scale)))
        angle = float(rng.uniform(0.0, 2 * math.pi))
        return DiskPoint(rho * math.cos(angle), rho * math.sin(angle))

    def parse_point(self, values):
        _expect(values, 2, "disk")
        return DiskPoint(float(values[0]), float(values[1]))


# --- Sphere cap (open upper hemisphere) ---

def sphere_vector(p: SpherePoint) -> np.ndarray:
    st = math.sin(p.theta)
    return np.array([st * math.cos(p.phi), st * math.sin(p.phi), math.cos(p.theta)])


def sphere_point(v: np.ndarray) -> SpherePoint:
    v = v / np.linalg.norm(v)
    theta = math.atan2(math.hypot(v[0], v[1]), v[2])
    return SpherePoint(theta, math.atan2(v[1], v[0]))


@register_space(SpaceKind.SPHERE_CAP, SpherePoint)
class SphereCap(ModelSpace):
    tau_geo = TAU_GEO_CURVED

    def distance(self, x, y):
        u, v = sphere_vector(x), sphere_vector(y)
        return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))

    def geodesic_point(self, x, y, t):
        d = self.distance(x, y)
        if d == 0:
            return x
        u, v = sphere_vector(x), sphere_vector(y)
        return sphere_point((math.sin((1 - t) * d) * u + math.sin(t * d) * v) / math.sin(d))

    def extend(self, x, y, length):
        d = self.distance(x, y)
        if d == 0:
            return y
        u, v = sphere_vector(x), sphere_vector(y)
        tangent = (math.cos(d) * v - u) / math.sin(d)
        # the extension may leave the hemisphere; shorten until it does not
        while length > 0:
            candidate = math.cos(length) * v + math.sin(length) * tangent
            if candidate[2] > 1e-12:
                return sphere_point(candidate)
            length /= 2
        return y

    def random_point(self, rng, scale):
        theta = float(rng.uniform(0.0, min(scale, math.pi / 2 - 1e-3)))
        return SpherePoint(theta, float(rng.uniform(0.0, 2 * math.pi)))

    def parse_point(self, values):
        _expect(values, 2, "sphere")
        return SpherePoint(float(values[0]), float(values[1]))


# --- River metric R-tree ---

def _sign(v: float) -> float:
    return 1.0 if v >= 0 else -1.0


@register_space(SpaceKind.RIVER, RiverPoint)
class RiverTree(ModelSpace):
    """The plane with the river metric: paths run through the x-axis unless abscissas agree"""
    tau_geo = TAU_GEO_FLAT

    def distance(self, x, y):
        if x.x == y.x:
            return abs(x.y - y.y)
        return abs(x.y) + abs(y.y) + abs(x.x - y.x)

    def geodesic_point(self, x, y, t):
        if x.x == y.x:
            return RiverPoint(x.x, x.y + t * (y.y - x.y))
        down, across = abs(x.y), abs(x.x - y.x)
        s = t * self.distance(x, y)
        if s <= down:
            return RiverPoint(x.x, x.y - math.copysign(s, x.y))
        if s <= down + across:
            return RiverPoint(x.x + _sign(y.x - x.x) * (s - down), 0.0)
        return RiverPoint(y.x, _sign(y.y) * (s - down - across))

    def extend(self, x, y, length):
        if x == y:
            return y
        if x.x == y.x:
            return RiverPoint(y.x, y.y + _sign(y.y - x.y) * length)
        if y.y != 0:
            return RiverPoint(y.x, y.y + _sign(y.y) * length)
        return RiverPoint(y.x + _sign(y.x - x.x) * length, 0.0)

    def ray_point(self, basepoint, direction, s):
        if direction.leg == "vertical":
            return RiverPoint(basepoint.x, basepoint.y + direction.sign * s)
        down = abs(basepoint.y)
        if s <= down:
            return RiverPoint(basepoint.x, basepoint.y - math.copysign(s, basepoint.y))
        return RiverPoint(basepoint.x + direction.sign * (s - down), 0.0)

    def parse_direction(self, text):
        axis = _parse_signed_axis(text)
        if axis is None:
            raise ContractViolation(f"River rays are '+x', '-x' (along the axis) or '+y', '-y' (vertical), got '{text}'")
        if axis[0] != 0:
            return RiverDirection("axis", int(axis[0]))
        return RiverDirection("vertical", int(axis[1]))

    def random_point(self, rng, scale):
        x, y = rng.uniform(-scale, scale, size=2)
        return RiverPoint(float(x), float(y))

    def parse_point(self, values):
        _expect(values, 2, "river")
        return RiverPoint(float(values[0]), float(values[1]))


# --- Star tree ---

@register_space(SpaceKind.STAR, StarPoint)
class StarTree(ModelSpace):
    """Finitely many half-lines glued at a hub"""
    tau_geo = TAU_GEO_FLAT

    def __init__(self, arms: int = 3):
        self.arms = arms

    def validate_point(self, p):
        super().validate_point(p)
        if p.ray_index >= self.arms:
            raise ContractViolation(f"Star point on arm {p.ray_index} but the tree has {self.arms} arms")

    def distance(self, x, y):
        if x.ray_index == y.ray_index:
            return abs(x.s - y.s)
        return x.s + y.s

    def geodesic_point(self, x, y, t):
        if x.ray_index == y.ray_index:
            return StarPoint(x.ray_index, x.s + t * (y.s - x.s))
        # through the hub (also covers an endpoint sitting on the hub)
        travelled = t * (x.s + y.s)
        if travelled <= x.s:
            return StarPoint(x.ray_index, x.s - travelled)
        return StarPoint(y.ray_index, travelled - x.s)

    def extend(self, x, y, length):
        if x == y:
            return y
        if y.s == 0:
            return StarPoint((x.ray_index + 1) % self.arms, length)
        outward = x.ray_index != y.ray_index or x.s == 0 or y.s > x.s
        if outward:
            return StarPoint(y.ray_index, y.s + length)
        if length <= y.s:
            return StarPoint(y.ray_index, y.s - length)
        return StarPoint((y.ray_index + 1) % self.arms, length - y.s)

    def ray_point(self, basepoint, direction, s):
        if basepoint.s == 0 or basepoint.ray_index == direction.ray_index:
            return StarPoint(direction.ray_index, basepoint.s + s)
        if s <= basepoint.s:
            return StarPoint(basepoint.ray_index, basepoint.s - s)
        return StarPoint(direction.ray_index, s - basepoint.s)

    def parse_direction(self, text):
        index = int(text.strip())
        if not 0 <= index < self.arms:
            raise ContractViolation(f"Star arm {index} does not exist (tree has {self.arms} arms)")
        return StarDirection(index)

    def random_point(self, rng, scale):
        return StarPoint(int(rng.integers(0, self.arms)), float(rng.uniform(0.0, scale)))

    def parse_point(self, values):
        _expect(values, 2, "star")
        index = float(values[0])
        if index != int(index):
            raise ContractViolation(f"Star arm index must be an integer, got {values[0]}")
        return StarPoint(int(index), float(values[1]))


# --- Rays ---

@dataclass(frozen=True)
class RayDescriptor:
    space: SpaceHandle
    basepoint: PointValue
    direction: Direction

    def __post_init__(self):
        self.space.model.validate_point(self.basepoint)
        _check_ray_domain(self.space, self.basepoint, self.direction)

    def describe(self) -> str:
        coords = ",".join(f"{c:g}" for c in self.basepoint.coordinates())
        return f"ray from ({coords}) {self.direction}"


def _check_ray_domain(space: SpaceHandle, basepoint, direction):
    domain = space.domain
    if isinstance(domain, ClosedBall):
        raise UnsupportedOperation(
            "Compact domains contain no geodesic rays",
            solution="Use the 'whole' domain (or a strip in the plane) for ray strategies"
        )
    if isinstance(domain, HalfPlaneStrip):
        nx, ny = domain.normal
        along = direction.dx * nx + direction.dy * ny
        leaves = abs(along) > 1e-12 and not (math.isinf(domain.upper) and along > 0)
        if leaves or not domain_contains(domain, basepoint, space.tau_geo):
            raise UnsupportedOperation("The ray leaves the strip domain")


def ray_eval(ray: RayDescriptor, s: float) -> PointValue:
    """Point at arclength s along the ray"""
    if s < 0:
        raise ContractViolation(f"Ray parameter must be nonnegative, got {s}")
    if s == 0:
        return ray.basepoint
    return ray.space.model.ray_point(ray.basepoint, ray.direction, s)


def make_ray(space: SpaceHandle, basepoint: PointValue, direction_text: str) -> RayDescriptor:
    return RayDescriptor(space, basepoint, space.model.parse_direction(direction_text))


# --- Domains ---

def domain_contains(domain: DomainDescriptor, p: PointValue, tol: float) -> bool:
    if isinstance(domain, WholeSpace):
        return True
    if isinstance(domain, ClosedBall):
        return model_for_point(p).distance(domain.center, p) <= domain.radius + tol
    if isinstance(domain, HalfPlaneStrip):
        if not isinstance(p, PlanarPoint):
            raise ContractViolation("Strip domains hold planar points only")
        nx, ny = domain.normal
        level = p.x * nx + p.y * ny
        return domain.lower - tol <= level <= domain.upper + tol
    raise ContractViolation(f"Unknown domain {domain!r}")


def clip_to_domain(space: SpaceHandle, domain: DomainDescriptor, origin: PointValue,
                   toward: PointValue, max_step: float, tol: float = 0.0) -> PointValue:
    """Farthest point of [origin, toward] within max_step of origin that stays in the domain"""
    total = distance(space, origin, toward)
    if total == 0:
        return origin
    hi = min(1.0, max_step / total)
    candidate = geodesic_point(space, origin, toward, hi)
    if domain_contains(domain, candidate, tol):
        return candidate
    lo = 0.0
    for _ in range(CLIP_ITERATIONS):
        mid = (lo + hi) / 2
        if domain_contains(domain, geodesic_point(space, origin, toward, mid), tol):
            lo = mid
        else:
            hi = mid
    return geodesic_point(space, origin, toward, lo)


def extend_geodesic(space: SpaceHandle, x: PointValue, y: PointValue, length: float) -> PointValue:
    """Point `length` beyond y on an extension of [x, y] (trees pick a fixed branch)"""
    model = space.model
    model.validate_point(x)
    model.validate_point(y)
    if length < 0:
        raise ContractViolation(f"Extension length must be nonnegative, got {length}")
    return model.extend(x, y, length)


def dyadic_geodesic_point(space: SpaceHandle, x: PointValue, y: PointValue, t: float, depth: int = 48) -> PointValue:
    """Geodesic evaluation built only from repeated midpoints"""
    lo_point, hi_point = x, y
    lo, hi = 0.0, 1.0
    for _ in range(depth):
        if hi - lo <= 0:
            break
        mid_point = geodesic_point(space, lo_point, hi_point, 0.5)
        mid = (lo + hi) / 2
        if t < mid:
            hi, hi_point = mid, mid_point
        else:
            lo, lo_point = mid, mid_point
    if hi == lo:
        return lo_point
    return geodesic_point(space, lo_point, hi_point, min(max((t - lo) / (hi - lo), 0.0), 1.0))


def sample_domain(space: SpaceHandle, rng: np.random.Generator, count: int,
                  scale: float = DEFAULT_SAMPLE_SCALE) -> List[PointValue]:
    """Seeded sample of domain points"""
    model = space.model
    domain = space.domain
    points = []
    for _ in range(count):
        if isinstance(domain, ClosedBall):
            candidate = model.random_point(rng, max(scale, 2 * domain.radius))
            d = model.distance(domain.center, candidate)
            reach = domain.radius * math.sqrt(float(rng.uniform()))
            if d > reach:
                candidate = geodesic_point(space, domain.center, candidate, reach / d)
            points.append(candidate)
        elif isinstance(domain, HalfPlaneStrip):
            nx, ny = domain.normal
            top = domain.upper if math.isfinite(domain.upper) else domain.lower + scale
            level = float(rng.uniform(domain.lower, top))
            along = float(rng.uniform(-scale, scale))
            points.append(PlanarPoint(level * nx - along * ny, level * ny + along * nx))
        else:
            points.append(model.random_point(rng, scale))
    log.debug(f"Sampled {count} points in {space.kind.value} / {domain.describe()}")
    return points


def domain_diameter_estimate(space: SpaceHandle, samples: Sequence[PointValue]) -> float:
    """Largest sampled pairwise distance, a lower bound for the diameter"""
    best = 0.0
    for i, p in enumerate(samples):
        for q in samples[i + 1:]:
            best = max(best, distance(space, p, q))
    return best


def lion_step_bound(diameter: float, jump_bound: float) -> int:
    """The integer N with (N - 1) D <= diam < N D"""
    if jump_bound <= 0:
        raise ContractViolation(f"Jump bound must be positive, got {jump_bound}")
    return int(math.floor(diameter / jump_bound)) + 1


# --- Text forms ---

def parse_point_text(model: ModelSpace, text: str) -> PointValue:
    """'1.5,0' style coordinates"""
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ContractViolation(f"Cannot parse point '{text}'")
    return model.parse_point(values)


def parse_domain(model: ModelSpace, text: str) -> DomainDescriptor:
    """'whole', 'ball c=<coords> r=<radius>' or 'strip n=<angle> lo=<a> hi=<b|inf>'"""
    words = text.split()
    if not words:
        raise ContractViolation("Empty domain")
    head, fields = words[0].lower(), {}
    for word in words[1:]:
        key, sep, value = word.partition("=")
        if not sep:
            raise ContractViolation(f"Domain field '{word}' is not key=value")
        fields[key.lower()] = value
    try:
        if head == "whole" and not fields:
            return WholeSpace()
        if head == "ball" and set(fields) == {"c", "r"}:
            return ClosedBall(parse_point_text(model, fields["c"]), float(fields["r"]))
        if head == "strip" and {"n", "lo"} <= set(fields) <= {"n", "lo", "hi"}:
            return HalfPlaneStrip(float(fields["n"]), float(fields["lo"]), float(fields.get("hi", "inf")))
    except ValueError as e:
        raise ContractViolation(f"Bad number in domain '{text}': {e}")
    raise ContractViolation(
        f"Cannot parse domain '{text}'",
        solution=["whole", "ball c=<coords> r=<radius>", "strip n=<angle> lo=<a> hi=<b|inf>"]
    )
