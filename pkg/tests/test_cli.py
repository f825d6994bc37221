"""Unit tests for CLI module"""
import os
import tempfile
import unittest
from unittest.mock import patch
import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parents[1]))

from core.cli import parse_arguments, parse_run_spec, place_at_gap
from utils.game.strategies import BesicovitchSpiral, RandomWalk
from utils.geometry.metric_core import ClosedBall, PlanarPoint, SpaceHandle, SpaceKind
from utils.system.error_handler import ConfigError

SPIRAL_FLAGS = ["--space", "euclidean", "--D", "1", "--L0", "0,0", "--M0", "1.5,0", "--strategy", "spiral"]


class CLITestCase(unittest.TestCase):
    """Isolates each test from the developer's .env"""

    def setUp(self):
        self.test_dir = tempfile.TemporaryDirectory()
        self.patchers = [
            patch('core.config.ENV_PATH', Path(self.test_dir.name) / ".env"),
            patch.dict(os.environ, {}, clear=True),
        ]
        for p in self.patchers:
            p.start()

    def tearDown(self):
        for p in reversed(self.patchers):
            p.stop()
        self.test_dir.cleanup()


class TestArguments(CLITestCase):

    def test_default_arguments(self):
        """Test parsing default arguments"""
        with patch.object(sys, 'argv', ['prog']):
            args = parse_arguments()
            self.assertIsNone(args.mode)
            self.assertIsNone(args.space)
            self.assertFalse(args.no_svg)
            self.assertFalse(args.save_defaults)

    def test_custom_arguments(self):
        """Test parsing custom arguments"""
        test_args = ['prog', 'sweep', '--space', 'river', '--win-tol', '1e-4', '--no-svg', '--quiet']
        with patch.object(sys, 'argv', test_args):
            args = parse_arguments()
            self.assertEqual(args.mode, 'sweep')
            self.assertEqual(args.space, 'river')
            self.assertEqual(args.win_tol, '1e-4')
            self.assertTrue(args.no_svg)
            self.assertTrue(args.quiet)


class TestRunSpec(CLITestCase):

    def test_play_from_flags(self):
        spec = parse_run_spec(SPIRAL_FLAGS)
        self.assertEqual(spec.mode, 'play')
        self.assertEqual(spec.game.jump_bound, 1.0)
        self.assertEqual(spec.game.M0, PlanarPoint(1.5, 0))
        self.assertEqual(spec.game.horizon, 100)
        self.assertIsInstance(spec.strategy, BesicovitchSpiral)
        self.assertEqual(spec.outputs.csv, Path('output') / 'transcript.csv')
        self.assertEqual(spec.outputs.svg, Path('output') / 'trajectory.svg')

    def test_negative_jump_bound(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_spec(["--space", "euclidean", "--D", "-1", "--L0", "0,0", "--M0", "1,0"])
        self.assertEqual(ctx.exception.key, 'D')

    def test_ray_in_compact_domain(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_spec(["--space", "euclidean", "--domain", "ball c=0,0 r=5", "--D", "1",
                            "--L0", "0,0", "--M0", "1,0", "--strategy", "ray:+x"])
        self.assertEqual(ctx.exception.key, 'strategy')

    def test_disk_ray_past_precision_reach(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_spec(["--space", "poincare", "--D", "1", "--L0", "0,0", "--M0", "0.5,0",
                            "--strategy", "ray:+x", "--horizon", "100"])
        self.assertEqual(ctx.exception.key, 'strategy')

    def test_spiral_outside_the_plane(self):
        with self.assertRaises(ConfigError):
            parse_run_spec(["--space", "poincare", "--D", "0.1", "--L0", "0,0", "--M0", "0.5,0",
                            "--strategy", "spiral"])

    def test_flags_override_run_file(self):
        text = "space = euclidean\nD = 2\nL0 = 0,0\nM0 = 3,0\nhorizon = 50\n"
        spec = parse_run_spec(["--D", "1"], config_text=text)
        self.assertEqual(spec.game.jump_bound, 1.0)
        self.assertEqual(spec.game.horizon, 50)
        self.assertEqual(spec.settings['D'], '1')

    def test_run_file_overrides_env(self):
        text = "space = euclidean\nD = 1\nL0 = 0,0\nM0 = 3,0\n"
        with patch.dict(os.environ, {'GEOPURSUIT_HORIZON': '7', 'GEOPURSUIT_OUTPUT_DIR': 'runs'}):
            spec = parse_run_spec([], config_text=text)
            self.assertEqual(spec.game.horizon, 7)
            self.assertEqual(spec.outputs.json, Path('runs') / 'outcome.json')
            spec = parse_run_spec([], config_text=text + "horizon = 9\n")
            self.assertEqual(spec.game.horizon, 9)

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_spec([], config_text="space = euclidean\nspeed = 3\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_missing_mandatory(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_spec(["--space", "euclidean"])
        self.assertEqual(ctx.exception.key, 'D')

    def test_bad_point(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_spec([], config_text="space = euclidean\nD = 1\nL0 = 0\nM0 = 3,0\n")
        self.assertEqual(ctx.exception.key, 'L0')
        self.assertEqual(ctx.exception.line, 3)

    def test_unknown_space(self):
        with self.assertRaises(ConfigError):
            parse_run_spec(["--space", "torus", "--D", "1", "--L0", "0,0", "--M0", "1,0"])

    def test_verify_needs_only_space(self):
        spec = parse_run_spec(["verify", "--space", "river", "--seed", "3", "--samples", "200"])
        self.assertIsNone(spec.game)
        self.assertEqual(spec.seed, 3)
        self.assertEqual(spec.samples, 200)
        self.assertEqual(spec.outputs.json, Path('output') / 'report.json')

    def test_spaces_mode(self):
        spec = parse_run_spec(["spaces"])
        self.assertIsNone(spec.space)

    def test_plain_random_uses_seed(self):
        spec = parse_run_spec(["--space", "euclidean", "--D", "1", "--L0", "0,0", "--M0", "1,0",
                               "--strategy", "random", "--seed", "5"])
        self.assertIsInstance(spec.strategy, RandomWalk)
        self.assertEqual(spec.strategy_text, "random:5")

    def test_output_paths(self):
        spec = parse_run_spec(SPIRAL_FLAGS + ["--csv", "a.csv", "--no-svg"])
        self.assertEqual(spec.outputs.csv, Path('a.csv'))
        self.assertIsNone(spec.outputs.svg)


class TestSweep(CLITestCase):

    def test_grid(self):
        text = "mode = sweep\nspace = euclidean\nD = 1\nL0 = 0,0\nM0 = 1,0\n[sweep]\nD0 = 2, 3\nhorizon = 10, 20\n"
        spec = parse_run_spec([], config_text=text)
        self.assertEqual(spec.sweep.points(), [(2.0, 10), (2.0, 20), (3.0, 10), (3.0, 20)])
        self.assertEqual(spec.outputs.csv, Path('output') / 'sweep.csv')

    def test_default_grid(self):
        spec = parse_run_spec(["sweep"] + SPIRAL_FLAGS)
        self.assertEqual(spec.sweep.points(), [(1.5, 100)])

    def test_gap_outside_domain(self):
        text = ("mode = sweep\nspace = euclidean\ndomain = ball c=0,0 r=2\nD = 1\nL0 = 0,0\nM0 = 1,0\n"
                "[sweep]\nD0 = 1, 5\n")
        with self.assertRaises(ConfigError) as ctx:
            parse_run_spec([], config_text=text)
        self.assertEqual(ctx.exception.line, 8)

    def test_place_at_gap(self):
        space = SpaceHandle(SpaceKind.EUCLIDEAN)
        self.assertEqual(place_at_gap(space, PlanarPoint(0, 0), PlanarPoint(1, 0), 3.0), PlanarPoint(3, 0))
        self.assertEqual(place_at_gap(space, PlanarPoint(0, 0), PlanarPoint(2, 0), 1.0), PlanarPoint(1, 0))
        ball = SpaceHandle(SpaceKind.EUCLIDEAN, ClosedBall(PlanarPoint(0, 0), 2.0))
        with self.assertRaises(ConfigError):
            place_at_gap(ball, PlanarPoint(0, 0), PlanarPoint(0, 0), 1.0)


if __name__ == '__main__':
    unittest.main()
