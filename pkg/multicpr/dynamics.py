# multicpr dynamics.py
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
Best-response dynamics: players repeatedly replace (or, with damping, move
toward) their best response to everyone else.

A round is one pass over all players. `sequential` updates players in index
order, each seeing the updates made earlier in the same round (Gauss-Seidel);
`simultaneous` computes every response against the round's starting profile
(Jacobi). A run stops when a round moves no coordinate by more than conv_tol,
when it revisits the profile from two rounds back while still moving (a
2-cycle), or at max_rounds.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from multicpr._base import DomainError
from multicpr.enum import Schedule, TrajectoryStatus
from multicpr.model import GameSpec, StrategyProfile
from multicpr.solver import DEFAULT_SOLVER, BestResponse, SolverConfig, best_response
from multicpr.utils import FLOAT_FORMAT

logger = logging.getLogger(__name__)

CYCLE_RTOL: float = 1e-3

"""
CYCLE_RTOL: a round is a 2-cycle only if its return distance to the profile two
rounds back is below this fraction of its own step. A converging run that
alternates around its limit comes back much less close than that.
"""


@dataclass(frozen=True, slots=True)
class DynamicsConfig:
    """
    Settings for `run`.

    Attributes
    ----------
    schedule
        sequential (default) or simultaneous
    conv_tol
        a round whose max-norm change is at most this counts as converged
    max_rounds
        round cap
    damping
        lambda in (0, 1]; each update is x <- (1 - lambda) x + lambda * B(x)
    solver
        settings for every best-response call
    """

    schedule: Schedule = Schedule.SEQUENTIAL
    conv_tol: float = 1e-8
    max_rounds: int = 10_000
    damping: float = 1.0
    solver: SolverConfig = DEFAULT_SOLVER

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedule", Schedule.from_label(self.schedule))
        if not self.conv_tol > 0.0:
            raise ValueError(f"conv_tol must be positive, got {self.conv_tol}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")


DEFAULT_DYNAMICS = DynamicsConfig()


@dataclass(frozen=True, slots=True)
class Trajectory:
    """
    A finished dynamics run.

    Attributes
    ----------
    profiles
        the start followed by the profile after each round
    gaps
        max-norm change made by each round (one per round)
    status
        how the run ended
    responses
        the best responses computed in the last round
    """

    profiles: tuple[StrategyProfile, ...]
    gaps: tuple[float, ...]
    status: TrajectoryStatus
    responses: tuple[BestResponse, ...] = ()

    @property
    def rounds(self) -> int:
        """Rounds executed."""
        return len(self.gaps)

    @property
    def effective_rounds(self) -> int:
        """Rounds that moved the profile; a converged run's last round only
        confirms the fixed point."""
        if self.status is TrajectoryStatus.CONVERGED:
            return self.rounds - 1
        return self.rounds

    @property
    def final(self) -> StrategyProfile:
        return self.profiles[-1]

    @property
    def final_gap(self) -> float:
        return self.gaps[-1] if self.gaps else 0.0

    @property
    def converged(self) -> bool:
        return self.status is TrajectoryStatus.CONVERGED

    def to_frame(self) -> pd.DataFrame:
        """
        One row per profile: ``round``, ``x_<i>_<j>`` for every coordinate
        and ``gap`` (empty for round 0).
        """
        first = self.profiles[0]
        columns = [f"x_{i}_{j}" for i in range(first.n) for j in range(first.m)]
        frame = pd.DataFrame(
            np.vstack([profile.x.ravel() for profile in self.profiles]),
            columns=columns,
        )
        frame.insert(0, "round", np.arange(len(self.profiles)))
        frame["gap"] = [np.nan, *self.gaps]
        return frame


def _check_profile(game: GameSpec, profile: StrategyProfile) -> None:
    if profile.x.shape != (game.n, game.m):
        raise DomainError(
            f"profile shape {profile.x.shape} does not match game ({game.n}, {game.m})"
        )


def _round(
    game: GameSpec, profile: StrategyProfile, cfg: DynamicsConfig
) -> tuple[StrategyProfile, tuple[BestResponse, ...]]:
    lam = cfg.damping
    if cfg.schedule is Schedule.SIMULTANEOUS:
        responses = tuple(best_response(game, i, profile, cfg.solver) for i in range(game.n))
        targets = np.vstack([response.as_array() for response in responses])
        return StrategyProfile((1.0 - lam) * profile.x + lam * targets), responses

    current, responses = profile, []
    for i in range(game.n):
        response = best_response(game, i, current, cfg.solver)
        row = (1.0 - lam) * current.x[i] + lam * response.as_array()
        current = current.with_row(i, row)
        responses.append(response)
    return current, tuple(responses)


def step(
    game: GameSpec, profile: StrategyProfile, cfg: DynamicsConfig = DEFAULT_DYNAMICS
) -> StrategyProfile:
    """
    One round of best-response dynamics.

    Parameters
    ----------
    game
        the game
    profile
        the starting profile
    cfg
        schedule, damping and solver settings

    Returns
    -------
        the profile after every player has updated once
    """
    _check_profile(game, profile)
    return _round(game, profile, cfg)[0]


def run(
    game: GameSpec, start: StrategyProfile, cfg: DynamicsConfig = DEFAULT_DYNAMICS
) -> Trajectory:
    """
    Iterates `step` from `start` until convergence, a detected 2-cycle or
    max_rounds.

    Round t converges when its max-norm change is at most conv_tol. It is a
    2-cycle when it moved more than conv_tol but landed within conv_tol of
    the profile two rounds back, and within CYCLE_RTOL times its own step.
    Runs that converge by alternating overshoots keep going.

    Returns
    -------
        the `Trajectory`; `final_gap` is the last round's change
    """
    _check_profile(game, start)
    profiles, gaps = [start], []
    responses: tuple[BestResponse, ...] = ()
    status = TrajectoryStatus.MAX_ROUNDS
    for _ in range(cfg.max_rounds):
        current, responses = _round(game, profiles[-1], cfg)
        gap = current.max_distance(profiles[-1])
        profiles.append(current)
        gaps.append(gap)
        if gap <= cfg.conv_tol:
            status = TrajectoryStatus.CONVERGED
            break
        back = current.max_distance(profiles[-3]) if len(profiles) >= 3 else math.inf
        if back <= cfg.conv_tol and back <= CYCLE_RTOL * gap:
            status = TrajectoryStatus.CYCLE
            break

    trajectory = Trajectory(
        profiles=tuple(profiles), gaps=tuple(gaps), status=status, responses=responses
    )
    log = logger.debug if trajectory.converged else logger.warning
    log(
        "dynamics %s after %d rounds (final gap %.3g)",
        status,
        trajectory.rounds,
        trajectory.final_gap,
    )
    return trajectory


def export_trajectory_csv(trajectory: Trajectory, path: str | Path) -> Path:
    """
    Writes the trajectory table with 17 significant digits.
    """
    path = Path(path)
    trajectory.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


__all__: list[str] = [
    "DEFAULT_DYNAMICS",
    "DynamicsConfig",
    "Trajectory",
    "export_trajectory_csv",
    "run",
    "step",
]
