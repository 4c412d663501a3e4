# multicpr equilibrium.py
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
equilibrium.py finds, certifies and characterises generalized Nash
equilibria (GNE).

It includes:
- `verify_gne`: feasibility, the utility a player gains by switching to
their exact best response, KKT residuals and response types at a candidate.

- `find_gne`: best-response dynamics from the all-zero profile and seeded
random starts; converged endpoints that verify are merged into a `GneSet`
(sorted, deduplicated in max-norm, so the result does not depend on the
order runs finish in).

- `brute_force_gne`: an independent grid oracle for small games
(n * m <= 4) that uses no solver code to find candidates.

- Structural checks on a GneSet: `antichain_check` (no GNE's CPR totals
sit below another's while summing lower), `classify_types` and
`support_sets`, `count_bound_check` (points sharing totals are few), and
`theorem_checks`, which bundles them with the premises under which each is
guaranteed to hold.

- `export_gne_csv`, the one-row-per-(point, player) GNE table.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Iterator, Sequence

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from multicpr._base import CostGuardError, DomainError
from multicpr._typing import FloatArray, IntArray
from multicpr.dynamics import DEFAULT_DYNAMICS, DynamicsConfig, run
from multicpr.enum import ResponseKind, TrajectoryStatus
from multicpr.model import GameSpec, StrategyProfile, rate_values, utility
from multicpr.solver import (
    DEFAULT_SOLVER,
    BestResponse,
    SolverConfig,
    best_response,
    constraint_bounds,
    kkt_residuals,
    omega,
)
from multicpr.utils import FLOAT_FORMAT, random_profile, simplex_grid

logger = logging.getLogger(__name__)

MAX_GRID_CELLS: int = 4

MAX_GRID_RESOLUTION: int = 200

"""
MAX_GRID_CELLS, MAX_GRID_RESOLUTION: size guard of the grid oracle, on n * m
and on the number of grid steps per unit.
"""

_BLOCK_ELEMENTS: int = 4_000_000


@dataclass(frozen=True, slots=True)
class GneReport:
    """
    Verification of one candidate profile.

    Attributes
    ----------
    feasible
        every row lies in its player's constrained strategy set
    utility_gap
        per player, V_i(best response) - V_i(candidate)
    kkt_residual
        per player, the largest KKT residual at the candidate's own row
    type_tags
        per player, the type of the recomputed best response
    kappa0
        per player, the recomputed budget multiplier
    verdict
        feasible, every gap <= gap_tol and every residual <= kkt_tol
    """

    feasible: bool
    utility_gap: tuple[float, ...]
    kkt_residual: tuple[float, ...]
    type_tags: tuple[ResponseKind, ...]
    kappa0: tuple[float, ...]
    verdict: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "utility_gap": list(self.utility_gap),
            "kkt_residual": list(self.kkt_residual),
            "type_tags": [str(tag) for tag in self.type_tags],
            "kappa0": list(self.kappa0),
            "verdict": self.verdict,
        }


@dataclass(frozen=True, slots=True)
class GneSet:
    """
    A deduplicated, deterministically ordered set of GNE.

    Attributes
    ----------
    points
        the profiles, sorted by CPR totals and then coordinates
    reports
        `verify_gne` reports, aligned with `points`
    attempts
        dynamics runs (or accepted grid profiles) that fed the set
    converged
        runs that converged, whether or not their endpoint verified
    """

    points: tuple[StrategyProfile, ...] = ()
    reports: tuple[GneReport, ...] = ()
    attempts: int = 0
    converged: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[StrategyProfile]:
        return iter(self.points)

    @property
    def totals(self) -> tuple[FloatArray, ...]:
        """v_x for each point: the vector of CPR totals."""
        return tuple(point.totals for point in self.points)

    def to_frame(self) -> pd.DataFrame:
        """
        One row per (point, player): ``id``, ``player``, ``type``,
        ``kappa0``, ``x_<j>`` and ``total_<j>``.
        """
        rows: list[dict[str, Any]] = []
        for pid, point in enumerate(self.points):
            report = self.reports[pid] if pid < len(self.reports) else None
            totals = point.totals
            for i in range(point.n):
                row: dict[str, Any] = {
                    "id": pid,
                    "player": i,
                    "type": str(report.type_tags[i]) if report else "",
                    "kappa0": report.kappa0[i] if report else np.nan,
                }
                row.update({f"x_{j}": point.x[i, j] for j in range(point.m)})
                row.update({f"total_{j}": totals[j] for j in range(point.m)})
                rows.append(row)
        return pd.DataFrame(rows)


def verify_gne(
    game: GameSpec,
    profile: StrategyProfile,
    gap_tol: float = 1e-6,
    kkt_tol: float = 1e-6,
    feas_tol: float = 1e-9,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> GneReport:
    """
    Checks whether `profile` is a GNE.

    For every player: the row must lie in the constrained strategy set
    (caps omega_ij - x_T^(j|i), unit budget), the exact best response to the
    other rows must not improve utility by more than gap_tol, and the KKT
    residuals at the row itself must not exceed kkt_tol.

    Parameters
    ----------
    game
        the game
    profile
        the candidate
    gap_tol
        utility-gap tolerance
    kkt_tol
        KKT residual tolerance
    feas_tol
        slack on the feasibility constraints
    cfg
        solver settings

    Returns
    -------
        a `GneReport`

    Raises
    ------
    DomainError
        profile shape does not match the game
    """
    if profile.x.shape != (game.n, game.m):
        raise DomainError(
            f"profile shape {profile.x.shape} does not match game ({game.n}, {game.m})"
        )
    feasible = True
    gaps, residuals, tags, kappas = [], [], [], []
    for i in range(game.n):
        bounds = constraint_bounds(game, i, profile, cfg)
        feasible &= bounds.contains(profile.x[i], feas_tol)
        response = best_response(game, i, profile, cfg)
        gaps.append(
            utility(game, profile.with_row(i, response.values), i)
            - utility(game, profile, i)
        )
        residuals.append(kkt_residuals(game, i, profile, cfg).max_residual)
        tags.append(response.kind)
        kappas.append(response.kappa0)
    verdict = (
        feasible
        and all(gap <= gap_tol for gap in gaps)
        and all(residual <= kkt_tol for residual in residuals)
    )
    return GneReport(
        feasible=bool(feasible),
        utility_gap=tuple(float(gap) for gap in gaps),
        kkt_residual=tuple(float(res) for res in residuals),
        type_tags=tuple(tags),
        kappa0=tuple(float(kappa) for kappa in kappas),
        verdict=bool(verdict),
    )


def _search_one(
    game: GameSpec,
    dyn_cfg: DynamicsConfig,
    gap_tol: float,
    kkt_tol: float,
    start: StrategyProfile,
) -> tuple[TrajectoryStatus, StrategyProfile, GneReport | None]:
    trajectory = run(game, start, dyn_cfg)
    if not trajectory.converged:
        return trajectory.status, trajectory.final, None
    report = verify_gne(game, trajectory.final, gap_tol, kkt_tol, cfg=dyn_cfg.solver)
    return trajectory.status, trajectory.final, report


def _ordering_key(profile: StrategyProfile) -> tuple[tuple[float, ...], tuple[float, ...]]:
    return tuple(profile.totals.tolist()), tuple(profile.x.ravel().tolist())


def _merge(
    found: Sequence[tuple[StrategyProfile, GneReport]], dedup_eps: float
) -> list[tuple[StrategyProfile, GneReport]]:
    """Sorts by (totals, coordinates) and drops points within dedup_eps of a
    point already kept."""
    kept: list[tuple[StrategyProfile, GneReport]] = []
    for profile, report in sorted(found, key=lambda pair: _ordering_key(pair[0])):
        if all(profile.max_distance(other) > dedup_eps for other, _ in kept):
            kept.append((profile, report))
    return kept


def find_gne(
    game: GameSpec,
    num_starts: int = 10,
    seed: int = 0,
    dyn_cfg: DynamicsConfig = DEFAULT_DYNAMICS,
    dedup_eps: float = 1e-6,
    *,
    gap_tol: float = 1e-6,
    kkt_tol: float = 1e-6,
    max_workers: int | None = None,
) -> GneSet:
    """
    Multi-start GNE search.

    Runs best-response dynamics from the all-zero profile and `num_starts`
    random profiles drawn with `seed`, keeps converged endpoints that pass
    `verify_gne`, and merges them: sorted by CPR totals then coordinates,
    points within `dedup_eps` (max-norm) of an earlier point dropped.

    Parameters
    ----------
    game
        the game
    num_starts
        random starts in addition to the all-zero start
    seed
        seed for the start generator
    dyn_cfg
        dynamics settings
    dedup_eps
        merge radius
    gap_tol, kkt_tol
        verification tolerances
    max_workers
        run starts in a process pool of this size; the result does not
        depend on it

    Returns
    -------
        the `GneSet`; may be empty
    """
    if num_starts < 1:
        raise DomainError(f"num_starts must be >= 1, got {num_starts}")
    rng = np.random.default_rng(seed)
    starts = [StrategyProfile.zeros(game.n, game.m)] + [
        random_profile(rng, game.n, game.m) for _ in range(num_starts)
    ]
    search = partial(_search_one, game, dyn_cfg, gap_tol, kkt_tol)
    if max_workers and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(search, starts))
    else:
        outcomes = [search(start) for start in starts]

    converged = sum(status is TrajectoryStatus.CONVERGED for status, _, _ in outcomes)
    verified = [
        (profile, report) for _, profile, report in outcomes if report and report.verdict
    ]
    rejected = converged - len(verified)
    if rejected:
        logger.warning("%d converged endpoints failed verification", rejected)
    kept = _merge(verified, dedup_eps)
    logger.info(
        "search: %d starts, %d converged, %d verified, %d distinct GNE",
        len(starts),
        converged,
        len(verified),
        len(kept),
    )
    return GneSet(
        points=tuple(profile for profile, _ in kept),
        reports=tuple(report for _, report in kept),
        attempts=len(starts),
        converged=converged,
    )


def _payoff_table(game: GameSpec, i: int, j: int, res: int) -> FloatArray:
    """table[k, s] = (k/res)**a_i * F_ij(s/res) for k <= res, s <= n * res."""
    h = 1.0 / res
    own = (np.arange(res + 1) * h) ** game.players[i].a
    rates = rate_values(game, i, j, np.arange(game.n * res + 1) * h)
    return own[:, None] * np.asarray(rates)[None, :]


def _curvature_bound(
    tables: Sequence[FloatArray], rates_positive: Sequence[np.ndarray], res: int, n: int
) -> float:
    """
    Largest second difference quotient of E_ij along the player's own
    coordinate and mixed with the CPR total, sampled on interior cells
    (own index >= 2) where F_ij > 0.
    """
    h = 1.0 / res
    bound = 0.0
    k = np.arange(2, res)[:, None]
    for table, positive in zip(tables, rates_positive):
        width = table.shape[1]
        # own coordinate moves the total with it
        b = np.arange((n - 1) * res + 1)[None, :]
        valid = (k + 1 + b < width) & positive[np.minimum(k + 1 + b, width - 1)]
        kk, bb = np.broadcast_arrays(k, b)
        kk, bb = kk[valid], bb[valid]
        if kk.size:
            d2 = table[kk + 1, kk + 1 + bb] - 2.0 * table[kk, kk + bb] + table[kk - 1, kk - 1 + bb]
            bound = max(bound, float(np.max(np.abs(d2))) / h**2)
        s = np.arange(width - 1)[None, :]
        valid = (s >= k) & positive[s + 1]
        kk, ss = np.broadcast_arrays(k, s)
        kk, ss = kk[valid], ss[valid]
        if kk.size:
            mixed = table[kk + 1, ss + 1] - table[kk + 1, ss] - table[kk, ss + 1] + table[kk, ss]
            bound = max(bound, float(np.max(np.abs(mixed))) / h**2)
    return bound if bound > 0.0 else 1.0


def _own_values(tables: Sequence[FloatArray], own: IntArray, opp: IntArray) -> FloatArray:
    """V[g, o] = sum_j table_j[own[g, j], own[g, j] + opp[o, j]]."""
    out = np.zeros((own.shape[0], opp.shape[0]))
    for j, table in enumerate(tables):
        out += table[own[:, j, None], own[:, j, None] + opp[None, :, j]]
    return out


def _best_by_opponents(tables: Sequence[FloatArray], own: IntArray, opp: IntArray) -> FloatArray:
    """best[o] = max over own grid points of V[g, o], computed in blocks."""
    best = np.empty(opp.shape[0])
    block = max(1, _BLOCK_ELEMENTS // max(1, own.shape[0]))
    for start in range(0, opp.shape[0], block):
        stop = min(start + block, opp.shape[0])
        best[start:stop] = _own_values(tables, own, opp[start:stop]).max(axis=0)
    return best


def _accepted_profiles(
    game: GameSpec, res: int, thresholds: Sequence[float], tables: Sequence[Sequence[FloatArray]]
) -> tuple[IntArray, FloatArray]:
    """
    Grid profiles where no player's best grid deviation gains more than
    their threshold. Returns integer profiles (N, n, m) and each profile's
    worst per-player gain.
    """
    n, m = game.n, game.m
    grid = simplex_grid(m, res)

    if n == 1:
        values = _own_values(tables[0], grid, np.zeros((1, m), dtype=np.int64))[:, 0]
        gains = values.max() - values
        keep = gains <= thresholds[0]
        return grid[keep][:, None, :], gains[keep]

    if n == 2:
        best = [_best_by_opponents(tables[i], grid, grid) for i in range(2)]
        points, worst = [], []
        block = max(1, _BLOCK_ELEMENTS // grid.shape[0])
        for start in range(0, grid.shape[0], block):
            other = grid[start : start + block]
            # rows: player 0's point, columns: player 1's point
            gain0 = best[0][None, start : start + block] - _own_values(tables[0], grid, other)
            gain1 = best[1][:, None] - _own_values(tables[1], other, grid).T
            keep = (gain0 <= thresholds[0]) & (gain1 <= thresholds[1])
            rows, cols = np.nonzero(keep)
            points.append(np.stack([grid[rows], other[cols]], axis=1))
            worst.append(np.maximum(gain0[rows, cols], gain1[rows, cols]))
        return np.concatenate(points), np.concatenate(worst)

    # n >= 3 only arises with m = 1 under the size guard
    opp = np.arange((n - 1) * res + 1, dtype=np.int64)[:, None]
    gain_tables = []
    for i in range(n):
        values = _own_values(tables[i], grid, opp)
        gain_tables.append(values.max(axis=0)[None, :] - values)
    points, worst = [], []
    for total in range(n * res + 1):
        choices = []
        for i in range(n):
            ks = np.arange(max(0, total - (n - 1) * res), min(res, total) + 1)
            ks = ks[gain_tables[i][ks, total - ks] <= thresholds[i]]
            choices.append(ks.tolist())
        for head in itertools.product(*choices[:-1]):
            last = total - sum(head)
            if last in choices[-1]:
                ks = (*head, last)
                points.append(np.array(ks, dtype=np.int64)[:, None])
                worst.append(max(gain_tables[i][k, total - k] for i, k in enumerate(ks)))
    if not points:
        return np.zeros((0, n, 1), dtype=np.int64), np.zeros(0)
    return np.stack(points), np.array(worst)


def _clusters(points: IntArray) -> np.ndarray:
    """Connected components of grid profiles under Chebyshev adjacency."""
    flat = points.reshape(points.shape[0], -1).astype(np.float64)
    if flat.shape[0] == 1:
        return np.zeros(1, dtype=np.int64)
    pairs = cKDTree(flat).query_pairs(r=1.0 + 1e-9, p=np.inf, output_type="ndarray")
    graph = coo_matrix(
        (np.ones(pairs.shape[0]), (pairs[:, 0], pairs[:, 1])),
        shape=(flat.shape[0], flat.shape[0]),
    )
    _, labels = connected_components(graph, directed=False)
    return labels


def brute_force_gne(
    game: GameSpec, resolution: int = 100, cfg: SolverConfig = DEFAULT_SOLVER
) -> GneSet:
    """
    Grid oracle for small games.

    Every player's strategy set is discretised at spacing h = 1/resolution.
    A grid profile is an approximate GNE when no player has a grid deviation
    improving their utility by more than 2 * slack, where slack =
    L * (n * m * h)**2 / 2 and L bounds the utility's sampled second
    differences on interior cells. Accepted profiles are grouped into
    clusters of grid neighbours; each cluster is represented by its member
    with the smallest worst-player gain, and representatives are confirmed
    with `verify_gne` at grid-scale tolerances.

    Parameters
    ----------
    game
        the game; n * m must not exceed 4
    resolution
        grid steps per unit, at most 200
    cfg
        solver settings used when confirming representatives

    Returns
    -------
        a `GneSet` of cluster representatives

    Raises
    ------
    CostGuardError
        n * m > 4, or resolution outside [1, 200]
    """
    if game.n * game.m > MAX_GRID_CELLS:
        raise CostGuardError(
            f"grid oracle supports n * m <= {MAX_GRID_CELLS}; got {game.n} x {game.m}"
        )
    if not 1 <= resolution <= MAX_GRID_RESOLUTION:
        raise CostGuardError(
            f"resolution must lie in [1, {MAX_GRID_RESOLUTION}], got {resolution}"
        )
    n, m, res = game.n, game.m, resolution
    h = 1.0 / res
    tables, thresholds = [], []
    for i in range(n):
        player_tables = [_payoff_table(game, i, j, res) for j in range(m)]
        positive = [
            np.asarray(rate_values(game, i, j, np.arange(n * res + 1) * h)) > 0.0
            for j in range(m)
        ]
        curvature = _curvature_bound(player_tables, positive, res, n)
        slack = 0.5 * curvature * (n * m * h) ** 2
        tables.append(player_tables)
        thresholds.append(2.0 * slack)
    points, worst = _accepted_profiles(game, res, thresholds, tables)
    logger.info("grid oracle: %d accepted grid profiles at resolution %d", len(points), res)
    if not len(points):
        return GneSet()

    labels = _clusters(points)
    found = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        rep = members[np.argmin(worst[members])]
        profile = StrategyProfile(points[rep] * h)
        report = verify_gne(
            game, profile, gap_tol=2.0 * max(thresholds), kkt_tol=math.inf, feas_tol=h, cfg=cfg
        )
        if report.feasible and report.verdict:
            found.append((profile, report))
        else:
            logger.debug("grid cluster at %s rejected on refinement", profile.x.tolist())
    kept = _merge(found, dedup_eps=0.0)
    return GneSet(
        points=tuple(profile for profile, _ in kept),
        reports=tuple(report for _, report in kept),
        attempts=len(points),
        converged=len(kept),
    )


def antichain_check(
    gne_set: GneSet, tol: float = 1e-9
) -> tuple[bool, tuple[int, int] | None]:
    """
    Fails if some point's totals v_x are coordinatewise <= another's v_y
    (up to tol) while sum(v_x) < sum(v_y) - tol.

    Returns
    -------
        (passed, witness): witness is the (x, y) index pair of the first
        violation, or None
    """
    totals = gne_set.totals
    for x, y in itertools.permutations(range(len(totals)), 2):
        vx, vy = totals[x], totals[y]
        if np.all(vx <= vy + tol) and vx.sum() < vy.sum() - tol:
            return False, (x, y)
    return True, None


@dataclass(frozen=True, slots=True)
class TypeClassification:
    """
    Types at a profile.

    Attributes
    ----------
    kinds
        per player, the type of the recomputed best response
    kappa0
        per player, the recomputed multiplier
    responses
        the recomputed best responses
    support, support_i, support_ii
        per CPR, the players investing in it while its total is below their
        omega; and the Type I / Type II parts of that set
    """

    kinds: tuple[ResponseKind, ...]
    kappa0: tuple[float, ...]
    responses: tuple[BestResponse, ...]
    support: tuple[frozenset[int], ...]
    support_i: tuple[frozenset[int], ...]
    support_ii: tuple[frozenset[int], ...]

    @property
    def type_i_players(self) -> frozenset[int]:
        return frozenset(i for i, kind in enumerate(self.kinds) if kind is ResponseKind.TYPE_I)


def support_sets(
    game: GameSpec,
    profile: StrategyProfile,
    kinds: Sequence[ResponseKind],
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> tuple[tuple[frozenset[int], ...], tuple[frozenset[int], ...], tuple[frozenset[int], ...]]:
    """
    Per CPR j: S_j = {i : x_T^(j) < omega_ij and x_ij > 0}, and its split by
    player type.
    """
    totals = profile.totals
    support = tuple(
        frozenset(
            i
            for i in range(game.n)
            if profile.x[i, j] > 0.0 and totals[j] < omega(game, i, j, cfg)
        )
        for j in range(game.m)
    )
    support_i = tuple(
        frozenset(i for i in s if kinds[i] is ResponseKind.TYPE_I) for s in support
    )
    support_ii = tuple(s - s_i for s, s_i in zip(support, support_i))
    return support, support_i, support_ii


def classify_types(
    game: GameSpec, profile: StrategyProfile, cfg: SolverConfig = DEFAULT_SOLVER
) -> TypeClassification:
    """
    Type tags, multipliers and support sets at a profile. Types come from
    recomputing each player's best response to the rest of the profile.
    """
    responses = tuple(best_response(game, i, profile, cfg) for i in range(game.n))
    kinds = tuple(response.kind for response in responses)
    support, support_i, support_ii = support_sets(game, profile, kinds, cfg)
    return TypeClassification(
        kinds=kinds,
        kappa0=tuple(response.kappa0 for response in responses),
        responses=responses,
        support=support,
        support_i=support_i,
        support_ii=support_ii,
    )


def _totals_groups(gne_set: GneSet, dedup_eps: float) -> list[list[int]]:
    groups: list[list[int]] = []
    anchors: list[FloatArray] = []
    for idx, totals in enumerate(gne_set.totals):
        for group, anchor in zip(groups, anchors):
            if np.max(np.abs(totals - anchor)) <= dedup_eps:
                group.append(idx)
                break
        else:
            groups.append([idx])
            anchors.append(totals)
    return groups


def count_bound_check(gne_set: GneSet, n: int, m: int, dedup_eps: float = 1e-6) -> bool:
    """
    Points sharing the same CPR totals (within dedup_eps) number at most
    2**(n * (m + 1)).
    """
    limit = 2 ** (n * (m + 1))
    return all(len(group) <= limit for group in _totals_groups(gne_set, dedup_eps))


@dataclass(frozen=True, slots=True)
class CheckResult:
    """One structural check: whether its premise holds for the game, whether
    the computed set passed, and a short explanation."""

    name: str
    premise: bool
    passed: bool
    detail: str = ""
    condition: tuple[str, str] | None = None

    @property
    def failed(self) -> bool:
        return self.premise and not self.passed

    @property
    def premise_label(self) -> str:
        """
        "premise n >= m" or "premise not met (n < m)" for a conditional
        check, "unconditional" otherwise. `condition` holds the premise and
        its negation.
        """
        if self.condition is None:
            return "unconditional"
        holds, fails = self.condition
        return f"premise {holds}" if self.premise else f"premise not met ({fails})"


@dataclass(frozen=True, slots=True)
class CheckReport:
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not any(check.failed for check in self.checks)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(check for check in self.checks if check.failed)

    def to_dict(self) -> dict[str, Any]:
        return {
            check.name: {
                "premise": check.premise,
                "premise_label": check.premise_label,
                "passed": check.passed,
                "detail": check.detail,
            }
            for check in self.checks
        }


def theorem_checks(
    game: GameSpec,
    gne_set: GneSet,
    dedup_eps: float = 1e-6,
    tol: float = 1e-9,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> CheckReport:
    """
    Structural properties every GNE set must have, each with the premise
    under which it is guaranteed:

    - ``unique_when_single_cpr``: at most one GNE when m = 1
    - ``antichain``: see `antichain_check`; n >= m
    - ``type_i_nonempty``: every GNE has a Type I player; n >= m
    - ``type_i_effective_is_active``: a Type I player invests in every
    active CPR; always
    - ``single_all_type_i``: at most one GNE where everyone is Type I; always
    - ``count_bound``: see `count_bound_check`; always

    Returns
    -------
        a `CheckReport`; `failures` lists checks whose premise held but
        which did not pass
    """
    n, m = game.n, game.m
    classes = [classify_types(game, point, cfg) for point in gne_set.points]
    checks = [
        CheckResult(
            "unique_when_single_cpr",
            premise=m == 1,
            condition=("m = 1", "m > 1"),
            passed=len(gne_set) <= 1,
            detail=f"{len(gne_set)} point(s)",
        )
    ]

    passed, witness = antichain_check(gne_set, tol)
    checks.append(
        CheckResult(
            "antichain",
            premise=n >= m,
            condition=("n >= m", "n < m"),
            passed=passed,
            detail="" if passed else f"totals of point {witness[0]} dominated by point {witness[1]}",
        )
    )

    lacking = [pid for pid, cls in enumerate(classes) if not cls.type_i_players]
    checks.append(
        CheckResult(
            "type_i_nonempty",
            premise=n >= m,
            condition=("n >= m", "n < m"),
            passed=not lacking,
            detail=f"points without a Type I player: {lacking}" if lacking else "",
        )
    )

    mismatched = [
        (pid, i)
        for pid, cls in enumerate(classes)
        for i, response in enumerate(cls.responses)
        if response.kind is ResponseKind.TYPE_I and response.effective != response.active
    ]
    checks.append(
        CheckResult(
            "type_i_effective_is_active",
            premise=True,
            passed=not mismatched,
            detail=f"(point, player) pairs: {mismatched}" if mismatched else "",
        )
    )

    all_type_i = [pid for pid, cls in enumerate(classes) if len(cls.type_i_players) == n]
    checks.append(
        CheckResult(
            "single_all_type_i",
            premise=True,
            passed=len(all_type_i) <= 1,
            detail=f"all-Type-I points: {all_type_i}",
        )
    )

    groups = _totals_groups(gne_set, dedup_eps)
    checks.append(
        CheckResult(
            "count_bound",
            premise=True,
            passed=count_bound_check(gne_set, n, m, dedup_eps),
            detail=f"largest totals group {max((len(g) for g in groups), default=0)}, "
            f"bound {2 ** (n * (m + 1))}",
        )
    )
    return CheckReport(checks=tuple(checks))


def export_gne_csv(gne_set: GneSet, path: str | Path) -> Path:
    """Writes the GNE table with 17 significant digits."""
    path = Path(path)
    gne_set.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


__all__: list[str] = [
    "CheckReport",
    "CheckResult",
    "GneReport",
    "GneSet",
    "MAX_GRID_CELLS",
    "MAX_GRID_RESOLUTION",
    "TypeClassification",
    "antichain_check",
    "brute_force_gne",
    "classify_types",
    "count_bound_check",
    "export_gne_csv",
    "find_gne",
    "support_sets",
    "theorem_checks",
    "verify_gne",
]
