"""Unit tests for the bundled man strategies"""
import math
import sys
import tempfile
import unittest
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parents[1]))

from utils.game.engine import GameConfig, GameHistory, play
from utils.game.strategies import (
    BesicovitchSpiral,
    RandomWalk,
    RayEscape,
    ReverseAtStep,
    Scripted,
    Stationary,
    load_scripted_moves,
    parse_strategy,
)
from utils.geometry.metric_core import (
    ClosedBall,
    DiskPoint,
    PlanarPoint,
    SpaceHandle,
    SpaceKind,
    distance,
)
from utils.system.error_handler import ConfigError, UnsupportedOperation

EUCLID = SpaceHandle(SpaceKind.EUCLIDEAN)
DISK = SpaceHandle(SpaceKind.POINCARE)
ORIGIN = PlanarPoint(0, 0)


class TestSpiral(unittest.TestCase):

    def test_clockwise_direction(self):
        """Lion along +x: clockwise turns u into (-u_y, u_x) = (0, 1)"""
        history = GameHistory([PlanarPoint(1, 0), PlanarPoint(0.5, 0)], [PlanarPoint(0, 0)])
        move = BesicovitchSpiral(clockwise=True).next_move(history, EUCLID, 1.0)
        self.assertAlmostEqual(move.x, 0.0)
        self.assertAlmostEqual(move.y, 1.0)
        move = BesicovitchSpiral(clockwise=False).next_move(history, EUCLID, 1.0)
        self.assertAlmostEqual(move.y, -1.0)

    def test_move_is_perpendicular(self):
        history = GameHistory([PlanarPoint(-1, 2), PlanarPoint(0, 1)], [PlanarPoint(3, -2)])
        move = BesicovitchSpiral().next_move(history, EUCLID, 0.7)
        lion, man = history.previous_lion, history.current_man
        dot = (move.x - man.x) * (lion.x - man.x) + (move.y - man.y) * (lion.y - man.y)
        self.assertAlmostEqual(dot, 0.0, places=12)
        self.assertAlmostEqual(distance(EUCLID, man, move), 0.7, places=12)

    def test_only_in_the_plane(self):
        config = GameConfig(DISK, 0.1, DiskPoint(0, 0), DiskPoint(0.5, 0))
        with self.assertRaises(UnsupportedOperation):
            BesicovitchSpiral().prepare(config)


class TestParsing(unittest.TestCase):

    def test_identifiers(self):
        self.assertIsInstance(parse_strategy("stationary", EUCLID, ORIGIN), Stationary)
        self.assertFalse(parse_strategy("spiral-ccw", EUCLID, ORIGIN).clockwise)
        reverse = parse_strategy("reverse@3:spiral-ccw", EUCLID, ORIGIN)
        self.assertIsInstance(reverse, ReverseAtStep)
        self.assertEqual(reverse.k, 3)
        self.assertEqual(reverse.name, "reverse@3:spiral-ccw")
        self.assertIsInstance(parse_strategy("random:7", EUCLID, ORIGIN), RandomWalk)
        ray = parse_strategy("ray:+x", EUCLID, ORIGIN)
        self.assertIsInstance(ray, RayEscape)
        self.assertEqual(ray.name, "ray:+x")
        self.assertIs(ray.certificate(), ray.ray)

    def test_bad_identifiers(self):
        for text in ("teleport", "reverse@x", "random:abc"):
            with self.assertRaises(ConfigError, msg=text):
                parse_strategy(text, EUCLID, ORIGIN)

    def test_ray_needs_noncompact_domain(self):
        ball = SpaceHandle(SpaceKind.EUCLIDEAN, ClosedBall(ORIGIN, 5.0))
        with self.assertRaises(UnsupportedOperation):
            parse_strategy("ray:+x", ball, ORIGIN)

    def test_ray_rejects_man_off_the_ray(self):
        config = GameConfig(EUCLID, 1.0, ORIGIN, PlanarPoint(0, 2))
        with self.assertRaises(UnsupportedOperation):
            parse_strategy("ray:+x", EUCLID, ORIGIN).prepare(config)

    def test_disk_ray_stays_within_precision_reach(self):
        """M0 sits at hyperbolic distance 2 from the centre"""
        disk = SpaceHandle(SpaceKind.POINCARE)
        centre, M0 = DiskPoint(0.0, 0.0), DiskPoint(math.tanh(1.0), 0.0)
        with self.assertRaises(UnsupportedOperation):
            parse_strategy("ray:+x", disk, centre).prepare(GameConfig(disk, 1.0, centre, M0, horizon=100))

        config = GameConfig(disk, 1.0, centre, M0, horizon=12)
        transcript = play(config, parse_strategy("ray:+x", disk, centre))
        self.assertEqual(len(transcript.steps), 12)
        self.assertAlmostEqual(distance(disk, centre, transcript.final_man), 14.0, places=6)


class TestRandomWalk(unittest.TestCase):

    def test_reproducible(self):
        """Same seed, same game"""
        ball = SpaceHandle(SpaceKind.EUCLIDEAN, ClosedBall(ORIGIN, 4.0))
        config = GameConfig(ball, 0.5, ORIGIN, PlanarPoint(2, 1), horizon=30)
        first = play(config, RandomWalk(11))
        second = play(config, RandomWalk(11))
        self.assertEqual(first.men, second.men)
        other = play(config, RandomWalk(12))
        self.assertNotEqual(first.men, other.men)

    def test_moves_stay_legal(self):
        ball = SpaceHandle(SpaceKind.POINCARE, ClosedBall(DiskPoint(0, 0), 1.5))
        config = GameConfig(ball, 0.3, DiskPoint(0, 0), DiskPoint(0.4, 0), horizon=50)
        for record in play(config, RandomWalk(3)).steps:
            self.assertLessEqual(record.man_move_len, 0.3 + 1e-7)


class TestScripted(unittest.TestCase):

    def test_replay_then_stay(self):
        strategy = Scripted([PlanarPoint(2, 0), PlanarPoint(2.5, 0)])
        config = GameConfig(EUCLID, 1.0, ORIGIN, PlanarPoint(1.5, 0), horizon=4)
        transcript = play(config, strategy)
        self.assertEqual(transcript.men[1:], [PlanarPoint(2, 0), PlanarPoint(2.5, 0),
                                              PlanarPoint(2.5, 0), PlanarPoint(2.5, 0)])

    def test_load_moves(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "moves.txt"
            path.write_text("# man moves\n2,0\n\n2.5, 0  # last\n", encoding="utf-8")
            self.assertEqual(load_scripted_moves(path, EUCLID), [PlanarPoint(2, 0), PlanarPoint(2.5, 0)])
            strategy = parse_strategy(f"scripted:{path}", EUCLID, ORIGIN)
            self.assertEqual(strategy.name, "scripted:moves.txt")

    def test_bad_line_reports_number(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "moves.txt"
            path.write_text("2,0\nnorth\n", encoding="utf-8")
            with self.assertRaises(ConfigError) as ctx:
                load_scripted_moves(path, EUCLID)
            self.assertEqual(ctx.exception.line, 2)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_scripted_moves("/nonexistent/moves.txt", EUCLID)


class TestReverse(unittest.TestCase):

    def test_steps_toward_previous_lion(self):
        history = GameHistory([PlanarPoint(0, 0), PlanarPoint(0, 0), PlanarPoint(1, 0)],
                              [PlanarPoint(0, 0), PlanarPoint(3, 0)])
        move = ReverseAtStep(2, Stationary()).next_move(history, EUCLID, 1.0)
        self.assertAlmostEqual(move.x, 2.0, places=12)
        self.assertAlmostEqual(move.y, 0.0, places=12)
        self.assertTrue(math.isclose(distance(EUCLID, move, history.previous_lion), 2.0))


if __name__ == '__main__':
    unittest.main()
