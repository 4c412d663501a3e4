# multicpr cli.py
#
# Copyright (c) 2023-2024 Adam Poulemanos. All rights reserved.
#
# multicpr is open source software subject to the terms of the
# MIT license, found in the LICENSE.md file.
#
# It may be freely distributed, reused, modified, and distributed under the
# terms of that license, but must be accompanied by the license and the
# accompanying copyright notice.

"""
Command-line surface. Each command reads one YAML experiment file and writes
its tables (CSV, 17 significant digits) and a summary (YAML) to the output
directory:

- ``multicpr solve``: best responses to a fixed profile -> solve.csv
- ``multicpr dynamics``: one dynamics run -> trajectory.csv, summary.yaml
- ``multicpr search``: multi-start GNE search, structural checks and an
optional grid-oracle cross-check -> gne.csv, summary.yaml
- ``multicpr sweep``: the search repeated over values of one parameter ->
sweep.csv, summary.yaml
- ``multicpr validate``: the standing-assumption checks -> validation.yaml

Exit codes: 0 ok, 1 config error, 2 numeric failure, 3 a check failed.
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import pandas as pd
import yaml
from attr import evolve

from multicpr._base import (
    BracketingError,
    CheckFailure,
    ConfigError,
    ContractViolation,
    CostGuardError,
    DomainError,
    GameValidationError,
)
from multicpr._config import (
    ExperimentConfig,
    SearchOptions,
    dynamics_options,
    load_config,
    search_options,
    solve_options,
    start_profile,
    sweep_options,
    validate_options,
    with_path,
)
from multicpr.dynamics import export_trajectory_csv, run
from multicpr.enum import ExitCode, ResponseKind
from multicpr.equilibrium import (
    GneSet,
    brute_force_gne,
    export_gne_csv,
    find_gne,
    theorem_checks,
)
from multicpr.model import validate_assumptions
from multicpr.solver import best_response, clear_omega_cache
from multicpr.utils import FLOAT_FORMAT

logger = logging.getLogger(__name__)

BRUTE_MATCH_TOL: float = 0.02

"""
BRUTE_MATCH_TOL: max-norm distance within which a searched GNE and a grid
oracle cluster are taken to be the same point (widened to two grid steps on
coarse grids).
"""


def _plain(value: Any) -> Any:
    """numpy and tuple values to YAML-friendly builtins."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, ResponseKind):
        return str(value)
    return value


def _write_yaml(path: Path, data: dict[str, Any]) -> Path:
    path.write_text(
        yaml.safe_dump(_plain(data), sort_keys=True, default_flow_style=False),
        encoding="utf-8",
    )
    return path


def _write_csv(path: Path, frame: pd.DataFrame) -> Path:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def _show(frame: pd.DataFrame, quiet: bool) -> None:
    if not quiet:
        print(frame.to_string(index=False))


def _require_assumptions(cfg: ExperimentConfig) -> None:
    report = validate_assumptions(cfg.game)
    if not report.passed:
        raise ConfigError(
            "game violates the standing assumptions: " + "; ".join(report.failures),
            field="game",
            line=cfg.lines.get("game"),
        )


def cmd_solve(cfg: ExperimentConfig, out_dir: Path, quiet: bool) -> ExitCode:
    """Best responses of the selected players to the configured profile."""
    _require_assumptions(cfg)
    options = solve_options(cfg)
    rows = []
    for i in options.players:
        response = best_response(cfg.game, i, options.profile, cfg.solver)
        row: dict[str, Any] = {
            "player": i,
            "type": str(response.kind),
            "kappa0": response.kappa0,
        }
        row.update({f"x_{j}": value for j, value in enumerate(response.values)})
        row.update(
            {f"residual_{j}": value for j, value in enumerate(response.residuals)}
        )
        row["residual"] = response.max_residual
        rows.append(row)
    frame = pd.DataFrame(rows)
    _write_csv(out_dir / "solve.csv", frame)
    _show(frame, quiet)
    return ExitCode.OK


def cmd_dynamics(cfg: ExperimentConfig, out_dir: Path, quiet: bool) -> ExitCode:
    """One best-response dynamics run from the configured start."""
    _require_assumptions(cfg)
    dyn, start = dynamics_options(cfg)
    trajectory = run(cfg.game, start_profile(cfg, start, cfg.seed), dyn)
    export_trajectory_csv(trajectory, out_dir / "trajectory.csv")
    summary = {
        "command": "dynamics",
        "schedule": str(dyn.schedule),
        "status": str(trajectory.status),
        "rounds": trajectory.rounds,
        "effective_rounds": trajectory.effective_rounds,
        "final_gap": trajectory.final_gap,
        "final_profile": trajectory.final.x,
        "types": [str(response.kind) for response in trajectory.responses],
    }
    _write_yaml(out_dir / "summary.yaml", summary)
    if not quiet:
        print(
            f"{trajectory.status} after {trajectory.rounds} rounds "
            f"(final gap {trajectory.final_gap:.3g})"
        )
        print(pd.DataFrame(trajectory.final.x).to_string())
    return ExitCode.OK


def _brute_comparison(found: GneSet, grid: GneSet, resolution: int) -> dict[str, Any]:
    tol = max(BRUTE_MATCH_TOL, 2.0 / resolution)

    def unmatched(left: GneSet, right: GneSet) -> list[int]:
        return [
            idx
            for idx, point in enumerate(left.points)
            if not any(point.max_distance(other) <= tol for other in right.points)
        ]

    missing_from_grid = unmatched(found, grid)
    missing_from_search = unmatched(grid, found)
    return {
        "resolution": resolution,
        "clusters": len(grid),
        "match_tol": tol,
        "search_points_without_cluster": missing_from_grid,
        "clusters_without_search_point": missing_from_search,
        "agree": not missing_from_grid and not missing_from_search,
    }


def _search(cfg: ExperimentConfig, options: SearchOptions) -> tuple[GneSet, dict[str, Any]]:
    gne_set = find_gne(
        cfg.game,
        num_starts=options.num_starts,
        seed=cfg.seed,
        dyn_cfg=options.dynamics,
        dedup_eps=options.dedup_eps,
        gap_tol=options.gap_tol,
        kkt_tol=options.kkt_tol,
        max_workers=options.max_workers,
    )
    checks = theorem_checks(cfg.game, gne_set, dedup_eps=options.dedup_eps, cfg=cfg.solver)
    kinds = Counter(str(tag) for report in gne_set.reports for tag in report.type_tags)
    summary: dict[str, Any] = {
        "points": len(gne_set),
        "attempts": gne_set.attempts,
        "converged": gne_set.converged,
        "type_counts": dict(sorted(kinds.items())),
        "totals": [totals for totals in gne_set.totals],
        "checks": checks.to_dict(),
        "checks_passed": checks.passed,
    }
    if options.brute_force_resolution:
        grid = brute_force_gne(cfg.game, options.brute_force_resolution, cfg.solver)
        summary["grid_oracle"] = _brute_comparison(
            gne_set, grid, options.brute_force_resolution
        )
    return gne_set, summary


def _search_failed(summary: dict[str, Any]) -> bool:
    grid = summary.get("grid_oracle")
    return not summary["checks_passed"] or bool(grid and not grid["agree"])


def cmd_search(cfg: ExperimentConfig, out_dir: Path, quiet: bool) -> ExitCode:
    """Multi-start GNE search with structural checks."""
    _require_assumptions(cfg)
    options = search_options(cfg)
    gne_set, summary = _search(cfg, options)
    export_gne_csv(gne_set, out_dir / "gne.csv")
    _write_yaml(out_dir / "summary.yaml", {"command": "search", **summary})
    _show(gne_set.to_frame(), quiet)
    if _search_failed(summary):
        raise CheckFailure(f"search checks failed: {summary['checks']}")
    return ExitCode.OK


def cmd_sweep(cfg: ExperimentConfig, out_dir: Path, quiet: bool) -> ExitCode:
    """The search repeated for each value of one game parameter."""
    options = sweep_options(cfg)
    rows, failed = [], []
    for value in options.values:
        variant = with_path(cfg, options.parameter, value)
        report = validate_assumptions(variant.game)
        row: dict[str, Any] = {"value": value, "assumptions": report.passed}
        if report.passed:
            _, summary = _search(variant, search_options(variant, options.search, "sweep.search"))
            row.update(
                points=summary["points"],
                converged=summary["converged"],
                attempts=summary["attempts"],
                type_i=summary["type_counts"].get(str(ResponseKind.TYPE_I), 0),
                type_ii=summary["type_counts"].get(str(ResponseKind.TYPE_II), 0),
                antichain=summary["checks"]["antichain"]["passed"],
                checks_passed=summary["checks_passed"],
            )
            if _search_failed(summary):
                failed.append(value)
        else:
            logger.warning("%s = %r violates the standing assumptions", options.parameter, value)
        rows.append(row)
        clear_omega_cache()
    frame = pd.DataFrame(rows)
    _write_csv(out_dir / "sweep.csv", frame)
    _write_yaml(
        out_dir / "summary.yaml",
        {"command": "sweep", "parameter": options.parameter, "rows": frame.to_dict("records")},
    )
    _show(frame, quiet)
    if failed:
        raise CheckFailure(f"checks failed for {options.parameter} in {failed}")
    return ExitCode.OK


def cmd_validate(cfg: ExperimentConfig, out_dir: Path, quiet: bool) -> ExitCode:
    """Standing-assumption checks only."""
    report = validate_assumptions(cfg.game, samples=validate_options(cfg))
    _write_yaml(out_dir / "validation.yaml", report.to_dict())
    if not quiet:
        print("PASS" if report.passed else "FAIL")
        for failure in report.failures:
            print(f"  {failure}")
        print(report.note)
    return ExitCode.OK if report.passed else ExitCode.CHECK_FAILURE


COMMAND_HANDLERS: dict[str, Callable[[ExperimentConfig, Path, bool], ExitCode]] = {
    "solve": cmd_solve,
    "dynamics": cmd_dynamics,
    "search": cmd_search,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multicpr",
        description="Best responses, dynamics and GNE search for Fragile multi-CPR Games",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "best responses to a fixed profile",
        "dynamics": "run best-response dynamics",
        "search": "multi-start GNE search",
        "sweep": "repeat the search over one parameter",
        "validate": "check the standing assumptions",
    }
    for name, help_text in helps.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", "-c", required=True, help="YAML experiment file")
        sub.add_argument("--out", "-o", help="output directory (overrides output_dir)")
        sub.add_argument("--seed", "-s", type=int, help="seed (overrides seed)")
        sub.add_argument("--quiet", "-q", action="store_true", help="warnings only, no tables")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config, command=args.command)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative", field="seed")
            cfg = evolve(cfg, seed=args.seed)
        out_dir = Path(args.out) if args.out else cfg.output_dir
        out_dir.mkdir(parents=True, exist_ok=True)
        return int(COMMAND_HANDLERS[args.command](cfg, out_dir, args.quiet))
    except (ConfigError, GameValidationError) as e:
        logger.error("config error: %s", e)
        return int(ExitCode.CONFIG_ERROR)
    except CheckFailure as e:
        logger.error("check failed: %s", e)
        return int(ExitCode.CHECK_FAILURE)
    except (BracketingError, ContractViolation, CostGuardError, DomainError) as e:
        logger.error("numeric failure: %s", e)
        return int(ExitCode.NUMERIC_FAILURE)
    except OSError as e:
        logger.error("cannot write output: %s", e)
        return int(ExitCode.CONFIG_ERROR)


if __name__ == "__main__":
    sys.exit(main())


__all__: list[str] = [
    "build_parser",
    "cmd_dynamics",
    "cmd_search",
    "cmd_solve",
    "cmd_sweep",
    "cmd_validate",
    "main",
]
