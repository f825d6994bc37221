"""
Core Runner Module
Handles the orchestration of the play, sweep, verify and spaces modes.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Any, Dict, List, Tuple

import numpy as np
from tqdm import tqdm

from core.cli import RunSpec, place_at_gap
from core.config import save_config
from core.logger import log
from utils.analysis.verification import example41_report, run_suite
from utils.export.plots import plot_transcript_svg
from utils.export.writers import write_json, write_sweep_csv, write_transcript_csv
from utils.game.engine import GameConfig, check_transcript_invariants, classify_outcome, play
from utils.game.strategies import STRATEGY_IDENTIFIERS, parse_strategy
from utils.geometry.metric_core import SpaceKind, get_model
from utils.system.error_handler import EXIT_INVARIANT_FAILURE, EXIT_OK
from utils.system.ui import (
    print_check, print_header, print_info, print_step, print_substep,
    print_success, print_summary, print_table, print_warning
)

SPACE_NOTES = {
    SpaceKind.EUCLIDEAN: ("x,y", "whole, ball, strip", "yes"),
    SpaceKind.POINCARE: ("x,y (|z| < 1)", "whole, ball", "yes, within 16 of the centre"),
    SpaceKind.SPHERE_CAP: ("theta,phi", "ball (below the equator)", "no"),
    SpaceKind.RIVER: ("x,y", "whole, ball", "yes"),
    SpaceKind.STAR: ("arm,s", "whole, ball", "yes"),
}


def game_record(spec: RunSpec, transcript, outcome, problems: List[str]) -> Dict[str, Any]:
    config = transcript.config
    record = {
        "space": config.space.kind.value,
        "domain": config.domain.describe(),
        "strategy": transcript.strategy_name,
        "D": config.jump_bound,
        "L0": list(config.L0.coordinates()),
        "M0": list(config.M0.coordinates()),
        "horizon": config.horizon,
        "win_tol": config.win_tol,
        "steps": len(transcript.steps),
        "final_D_i": transcript.gaps[-1],
        "outcome": outcome.to_record(),
        "invariant_violations": problems,
        "seed": spec.seed,
    }
    if config.space.kind is SpaceKind.EUCLIDEAN and transcript.strategy_name.startswith("spiral"):
        report = example41_report(transcript, config.jump_bound)
        record["spiral"] = {
            "max_recurrence_residual": max(report.recurrence_residuals, default=0.0),
            "max_identity_residual": max(report.identity_residuals, default=0.0),
            "halving_holds": report.halving_holds(),
            "sum_t": report.partial_sums[-1],
            "containment_max_L": report.containment_max_L,
            "containment_max_M": report.containment_max_M,
            "all_gaps_above_D": report.all_gaps_above_D,
        }
    return record


def run_play(spec: RunSpec) -> int:
    print_header("LION-MAN GAME")
    game = spec.game
    print_info("Space", f"{game.space.kind.value} / {game.domain.describe()}")
    print_info("Strategy", spec.strategy.name)
    print_info("D", game.jump_bound)

    print_step(1, 3, "Playing")
    transcript = play(game, spec.strategy)
    outcome = classify_outcome(transcript)
    problems = check_transcript_invariants(transcript)
    for problem in problems:
        print_warning(problem)

    print_step(2, 3, "Writing transcript and outcome")
    write_transcript_csv(transcript, spec.outputs.csv)
    write_json(game_record(spec, transcript, outcome, problems), spec.outputs.json)

    print_step(3, 3, "Plotting")
    if spec.outputs.svg:
        plot_transcript_svg(transcript, spec.outputs.svg)
    else:
        print_substep("Plot disabled")

    summary = {"Steps": len(transcript.steps), "Final D_i": f"{transcript.gaps[-1]:.12g}"}
    summary.update({k: v for k, v in outcome.to_record().items()})
    print_summary("GAME COMPLETE", summary)
    return EXIT_OK if not problems else EXIT_INVARIANT_FAILURE


def sweep_point(task: Tuple[GameConfig, str, float, int]) -> Dict[str, Any]:
    """One grid point; top level so a process pool can pickle it"""
    base, strategy_text, d0, horizon = task
    game = replace(base, M0=place_at_gap(base.space, base.L0, base.M0, d0), horizon=horizon)
    transcript = play(game, parse_strategy(strategy_text, game.space, game.L0))
    outcome = classify_outcome(transcript)
    return {
        "D0": d0,
        "horizon": horizon,
        "variant": outcome.variant,
        "steps": len(transcript.steps),
        "final_D_i": transcript.gaps[-1],
        "capture_index": transcript.capture_index(),
        "violations": len(check_transcript_invariants(transcript)),
    }


def run_sweep(spec: RunSpec) -> int:
    print_header("LION-MAN SWEEP")
    tasks = [(spec.game, spec.strategy_text, d0, h) for d0, h in spec.sweep.points()]
    print_info("Grid points", len(tasks))
    print_info("Workers", spec.workers)

    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(tqdm(pool.map(sweep_point, tasks), total=len(tasks), desc="Sweep", disable=spec.quiet))
    else:
        rows = [sweep_point(task) for task in tqdm(tasks, desc="Sweep", disable=spec.quiet)]

    write_sweep_csv(rows, spec.outputs.csv)
    print_table("Sweep", ["D0", "horizon", "outcome", "steps", "final D_i"],
                [(r["D0"], r["horizon"], r["variant"], r["steps"], f"{r['final_D_i']:.9g}") for r in rows])
    broken = sum(r["violations"] for r in rows)
    if broken:
        print_warning(f"{broken} invariant violations across the sweep")
    return EXIT_OK if not broken else EXIT_INVARIANT_FAILURE


def run_verify(spec: RunSpec) -> int:
    print_header("VERIFICATION SUITE")
    space = spec.space
    seed = spec.seed if spec.seed is not None else 0
    print_info("Space", f"{space.kind.value} / {space.domain.describe()}")
    print_info("Samples", spec.samples)
    print_info("Seed", seed)

    report = run_suite(space, np.random.default_rng(seed), spec.samples)
    if spec.game is not None and spec.strategy.name.startswith("spiral") and space.kind is SpaceKind.EUCLIDEAN:
        transcript = play(spec.game, spec.strategy)
        spiral = example41_report(transcript, spec.game.jump_bound)
        D = spec.game.jump_bound
        report.add("spiral_recurrence", max(spiral.recurrence_residuals, default=0.0), 1e-9)
        report.add("spiral_halving", 0.0, 0.0, passed=spiral.halving_holds())
        report.add("spiral_summability", spiral.partial_sums[-1], 2 * D + 1e-9)
        report.add("spiral_gap_identity", max(spiral.identity_residuals, default=0.0), 1e-9)
        report.add("spiral_gaps_above_D", 0.0, 0.0, passed=spiral.all_gaps_above_D)
        report.add("game_invariants", len(check_transcript_invariants(transcript)), 0)

    for check in report.checks:
        print_check(check.name, check.passed, f"value={check.value:.3g} threshold={check.threshold:.3g} {check.detail}")
    write_json(report.to_record(), spec.outputs.json)

    if report.passed:
        print_success("All checks passed")
        return EXIT_OK
    print_warning("Some checks failed")
    return EXIT_INVARIANT_FAILURE


def run_spaces(spec: RunSpec) -> int:
    rows = []
    for kind in SpaceKind:
        coords, domains, rays = SPACE_NOTES[kind]
        rows.append((kind.value, coords, domains, rays, f"{get_model(kind).tau_geo:g}"))
    print_table("Spaces", ["space", "coordinates", "domains", "rays", "tolerance"], rows)
    print_table("Strategies", ["identifier", "description"], STRATEGY_IDENTIFIERS)
    return EXIT_OK


MODE_RUNNERS = {
    "play": run_play,
    "sweep": run_sweep,
    "verify": run_verify,
    "spaces": run_spaces,
}


def run(spec: RunSpec) -> int:
    """Run the requested mode and return the exit status"""
    log.info(f"Run mode={spec.mode} settings={spec.settings}")
    if spec.save_defaults:
        save_run_defaults(spec)
    return MODE_RUNNERS[spec.mode](spec)


def save_run_defaults(spec: RunSpec):
    for key, env_key in (("seed", "GEOPURSUIT_SEED"), ("samples", "GEOPURSUIT_VERIFY_SAMPLES"),
                         ("workers", "GEOPURSUIT_WORKERS"), ("output_dir", "GEOPURSUIT_OUTPUT_DIR")):
        if key in spec.settings:
            save_config(env_key, spec.settings[key])
            print_substep(f"Saved {env_key}={spec.settings[key]}")
