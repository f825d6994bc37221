"""Unit tests for the concrete model spaces, rays and domains"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, strategies as st

# Add project root to path
sys.path.append(str(Path(__file__).parents[1]))

from utils.geometry.metric_core import (
    ClosedBall,
    DiskPoint,
    HalfPlaneStrip,
    PlanarPoint,
    RiverPoint,
    SpaceHandle,
    SpaceKind,
    SpherePoint,
    StarPoint,
    WholeSpace,
    distance,
    geodesic_point,
)
from utils.geometry.model_spaces import (
    IdealEndpoint,
    PlanarDirection,
    RayDescriptor,
    RiverDirection,
    StarDirection,
    clip_to_domain,
    domain_contains,
    domain_diameter_estimate,
    dyadic_geodesic_point,
    extend_geodesic,
    lion_step_bound,
    make_ray,
    parse_domain,
    parse_point_text,
    ray_eval,
    sample_domain,
)
from utils.system.error_handler import ContractViolation, UnsupportedOperation

EUCLID = SpaceHandle(SpaceKind.EUCLIDEAN)
DISK = SpaceHandle(SpaceKind.POINCARE)
RIVER = SpaceHandle(SpaceKind.RIVER)
STAR = SpaceHandle(SpaceKind.STAR)

COMPACT = (
    SpaceHandle(SpaceKind.EUCLIDEAN, ClosedBall(PlanarPoint(0, 0), 7.0)),
    SpaceHandle(SpaceKind.POINCARE, ClosedBall(DiskPoint(0.1, -0.2), 2.0)),
    SpaceHandle(SpaceKind.SPHERE_CAP, ClosedBall(SpherePoint(0.3, 1.0), 1.0)),
    SpaceHandle(SpaceKind.RIVER, ClosedBall(RiverPoint(1.0, 2.0), 3.0)),
    SpaceHandle(SpaceKind.STAR, ClosedBall(StarPoint(1, 0.5), 2.0)),
)


class TestRays(unittest.TestCase):

    def test_euclidean_ray(self):
        ray = RayDescriptor(EUCLID, PlanarPoint(0, 0), PlanarDirection(1, 0))
        self.assertEqual(ray_eval(ray, 5.0), PlanarPoint(5, 0))

    def test_river_ray_descends_then_runs_along_axis(self):
        """From (0,3): s = 3 reaches the axis, s = 7 is 4 along it"""
        right = RayDescriptor(RIVER, RiverPoint(0, 3), RiverDirection("axis", 1))
        left = RayDescriptor(RIVER, RiverPoint(0, 3), RiverDirection("axis", -1))
        self.assertEqual(ray_eval(right, 3.0), RiverPoint(0, 0))
        self.assertEqual(ray_eval(right, 7.0), RiverPoint(4, 0))
        self.assertEqual(ray_eval(left, 7.0), RiverPoint(-4, 0))

    def test_star_ray_from_hub(self):
        ray = RayDescriptor(STAR, StarPoint(0, 0.0), StarDirection(2))
        self.assertEqual(ray_eval(ray, 1.5), StarPoint(2, 1.5))

    def test_star_ray_through_hub(self):
        """A ray from another arm passes the hub first"""
        ray = RayDescriptor(STAR, StarPoint(1, 2.0), StarDirection(0))
        self.assertEqual(ray_eval(ray, 1.0), StarPoint(1, 1.0))
        self.assertEqual(ray_eval(ray, 5.0), StarPoint(0, 3.0))

    def test_ray_isometry(self):
        """100 random parameter pairs per ray"""
        rays = [
            make_ray(EUCLID, PlanarPoint(1, -2), "angle=0.7"),
            make_ray(DISK, DiskPoint(0.2, 0.3), "-y"),
            make_ray(RIVER, RiverPoint(-1, 2), "+x"),
            make_ray(RIVER, RiverPoint(-1, 2), "-y"),
            make_ray(STAR, StarPoint(2, 1.0), "1"),
        ]
        rng = np.random.default_rng(21)
        for ray in rays:
            reach = 12.0 if ray.space.kind is SpaceKind.POINCARE else 100.0
            for s, s2 in rng.uniform(0, reach, size=(100, 2)):
                gap = distance(ray.space, ray_eval(ray, float(s)), ray_eval(ray, float(s2)))
                self.assertLess(abs(gap - abs(s - s2)), ray.space.tau_geo * max(1.0, abs(s - s2)))

    def test_disk_ray_tends_to_ideal_point(self):
        ray = RayDescriptor(DISK, DiskPoint(0, 0), IdealEndpoint(math.pi / 2))
        p = ray_eval(ray, 20.0)
        self.assertAlmostEqual(p.x, 0.0, places=9)
        self.assertGreater(p.y, 0.999999)

    def test_no_rays_in_compact_domains(self):
        for space in COMPACT:
            center = space.domain.center
            with self.assertRaises(UnsupportedOperation, msg=space.kind.value):
                make_ray(space, center, "1" if space.kind is SpaceKind.STAR else "+x")

    def test_strip_rays(self):
        """Rays along the strip are fine, rays across it are not"""
        strip = SpaceHandle(SpaceKind.EUCLIDEAN, HalfPlaneStrip(math.pi / 2, -1.0, 1.0))
        along = make_ray(strip, PlanarPoint(0, 0), "+x")
        self.assertEqual(ray_eval(along, 3.0), PlanarPoint(3, 0))
        with self.assertRaises(UnsupportedOperation):
            make_ray(strip, PlanarPoint(0, 0), "+y")
        half_plane = SpaceHandle(SpaceKind.EUCLIDEAN, HalfPlaneStrip(math.pi / 2, 0.0))
        make_ray(half_plane, PlanarPoint(0, 0), "+y")

    def test_negative_parameter(self):
        ray = make_ray(EUCLID, PlanarPoint(0, 0), "+x")
        with self.assertRaises(ContractViolation):
            ray_eval(ray, -1.0)

    def test_sphere_cap_has_no_rays(self):
        with self.assertRaises(UnsupportedOperation):
            make_ray(COMPACT[2], SpherePoint(0.3, 1.0), "+x")


class TestDomains(unittest.TestCase):

    def test_ball_contains(self):
        ball = ClosedBall(PlanarPoint(0, 0), 7.0)
        self.assertTrue(domain_contains(ball, PlanarPoint(7, 0), 1e-9))
        self.assertFalse(domain_contains(ball, PlanarPoint(7 + 1e-6, 0), 1e-9))
        self.assertTrue(domain_contains(WholeSpace(), PlanarPoint(1e9, 0), 0.0))

    def test_strip_contains(self):
        strip = HalfPlaneStrip(0.0, -1.0, 2.0)
        self.assertTrue(domain_contains(strip, PlanarPoint(2.0, 100.0), 1e-9))
        self.assertFalse(domain_contains(strip, PlanarPoint(2.1, 0.0), 1e-9))

    def test_clip_to_domain(self):
        """Boundary hit versus step bound"""
        space = SpaceHandle(SpaceKind.EUCLIDEAN, ClosedBall(PlanarPoint(0, 0), 1.0))
        hit = clip_to_domain(space, space.domain, PlanarPoint(0, 0), PlanarPoint(5, 0), 10.0)
        self.assertAlmostEqual(hit.x, 1.0, places=9)
        short = clip_to_domain(space, space.domain, PlanarPoint(0, 0), PlanarPoint(5, 0), 0.5)
        self.assertEqual(short, PlanarPoint(0.5, 0))

    def test_clip_in_poincare_ball(self):
        """Hyperbolic radius 2 means Euclidean radius tanh(1)"""
        space = SpaceHandle(SpaceKind.POINCARE, ClosedBall(DiskPoint(0, 0), 2.0))
        p = clip_to_domain(space, space.domain, DiskPoint(0, 0), DiskPoint(0.99, 0), 10.0)
        self.assertAlmostEqual(distance(space, DiskPoint(0, 0), p), 2.0, places=7)
        self.assertAlmostEqual(p.x, math.tanh(1.0), places=7)

    def test_domains_are_convex(self):
        """Sampled geodesics stay inside every compact domain"""
        for space in COMPACT:
            rng = np.random.default_rng(4)
            points = sample_domain(space, rng, 400)
            for x, y in zip(points[0::2], points[1::2]):
                self.assertTrue(domain_contains(space.domain, x, 1e-9))
                p = geodesic_point(space, x, y, float(rng.uniform()))
                self.assertTrue(domain_contains(space.domain, p, 1e-9), msg=space.kind.value)

    def test_sphere_cap_restrictions(self):
        """Balls must stay below the equator, and the whole hemisphere is refused"""
        with self.assertRaises(ContractViolation):
            SpaceHandle(SpaceKind.SPHERE_CAP, ClosedBall(SpherePoint(0.0, 0.0), math.pi / 2))
        with self.assertRaises(ContractViolation):
            SpaceHandle(SpaceKind.SPHERE_CAP)

    def test_strip_only_in_plane(self):
        with self.assertRaises(ContractViolation):
            SpaceHandle(SpaceKind.RIVER, HalfPlaneStrip(0.0, 0.0, 1.0))

    def test_diameter_and_lion_step_bound(self):
        """(N - 1) D <= diam < N D"""
        space = COMPACT[0]
        diameter = domain_diameter_estimate(space, sample_domain(space, np.random.default_rng(2), 300))
        self.assertLessEqual(diameter, 14.0)
        self.assertGreater(diameter, 12.0)
        self.assertEqual(lion_step_bound(14.0, 1.0), 15)
        self.assertEqual(lion_step_bound(13.5, 1.0), 14)
        with self.assertRaises(ContractViolation):
            lion_step_bound(3.0, 0.0)


class TestConstructions(unittest.TestCase):

    def test_dyadic_matches_direct(self):
        """Two independent geodesic constructions agree"""
        spaces = (EUCLID, DISK, RIVER, STAR, COMPACT[2])
        for space in spaces:
            rng = np.random.default_rng(8)
            points = sample_domain(space, rng, 200)
            for x, y in zip(points[0::2], points[1::2]):
                t = float(rng.uniform())
                direct = geodesic_point(space, x, y, t)
                self.assertLess(distance(space, direct, dyadic_geodesic_point(space, x, y, t)),
                                10 * space.tau_geo * max(1.0, distance(space, x, y)))

    def test_extend_euclidean(self):
        self.assertEqual(extend_geodesic(EUCLID, PlanarPoint(0, 0), PlanarPoint(1, 0), 2.0), PlanarPoint(3, 0))

    def test_extend_is_geodesic(self):
        """d(x, extension) = d(x, y) + length"""
        cases = (
            (DISK, DiskPoint(-0.2, 0.1), DiskPoint(0.3, 0.2)),
            (RIVER, RiverPoint(-1, 2), RiverPoint(1, 3)),
            (RIVER, RiverPoint(-1, 2), RiverPoint(1, 0)),
            (STAR, StarPoint(1, 2.0), StarPoint(2, 1.0)),
            (STAR, StarPoint(1, 2.0), StarPoint(1, 1.0)),
            (COMPACT[2], SpherePoint(0.3, 1.0), SpherePoint(0.6, 1.5)),
        )
        for space, x, y in cases:
            z = extend_geodesic(space, x, y, 0.5)
            self.assertAlmostEqual(distance(space, x, z), distance(space, x, y) + 0.5, places=7,
                                   msg=space.kind.value)

    def test_star_extension_past_hub(self):
        """Inward extension through the hub continues on the next arm"""
        z = extend_geodesic(STAR, StarPoint(1, 2.0), StarPoint(1, 1.0), 3.0)
        self.assertEqual(z, StarPoint(2, 2.0))

    def test_sphere_extension_stays_in_hemisphere(self):
        z = extend_geodesic(COMPACT[2], SpherePoint(0.5, 0.0), SpherePoint(1.5, 0.0), 2.0)
        self.assertLess(z.theta, math.pi / 2)

    @given(st.floats(min_value=-20, max_value=20), st.floats(min_value=-20, max_value=20),
           st.floats(min_value=0, max_value=10))
    def test_river_extension_from_axis(self, x1, x2, length):
        """Hypothesis: extension from an axis point continues along the axis"""
        if x1 == x2:
            return
        z = extend_geodesic(RIVER, RiverPoint(x1, 1.0), RiverPoint(x2, 0.0), length)
        self.assertAlmostEqual(distance(RIVER, RiverPoint(x1, 1.0), z),
                               1.0 + abs(x2 - x1) + length, places=9)


class TestParsing(unittest.TestCase):

    def test_parse_points(self):
        self.assertEqual(parse_point_text(EUCLID.model, "1.5,0"), PlanarPoint(1.5, 0))
        self.assertEqual(parse_point_text(STAR.model, "2,1.5"), StarPoint(2, 1.5))
        with self.assertRaises(ContractViolation):
            parse_point_text(EUCLID.model, "1,2,3")
        with self.assertRaises(ContractViolation):
            parse_point_text(STAR.model, "0.5,1")

    def test_parse_domains(self):
        self.assertEqual(parse_domain(EUCLID.model, "whole"), WholeSpace())
        self.assertEqual(parse_domain(EUCLID.model, "ball c=0,0 r=7"), ClosedBall(PlanarPoint(0, 0), 7.0))
        self.assertEqual(parse_domain(EUCLID.model, "strip n=0 lo=-1"), HalfPlaneStrip(0.0, -1.0))
        with self.assertRaises(ContractViolation):
            parse_domain(EUCLID.model, "ball r=7")
        with self.assertRaises(ContractViolation):
            parse_domain(EUCLID.model, "ball c=0,0 r=-1")

    def test_parse_directions(self):
        self.assertEqual(RIVER.model.parse_direction("+y"), RiverDirection("vertical", 1))
        self.assertEqual(RIVER.model.parse_direction("-x"), RiverDirection("axis", -1))
        self.assertEqual(STAR.model.parse_direction("2"), StarDirection(2))
        with self.assertRaises(ContractViolation):
            STAR.model.parse_direction("3")


if __name__ == '__main__':
    unittest.main()
