# multicpr model.py
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
model.py holds the game itself: who the players are, what the CPRs look like,
what a strategy profile is, and what a player earns.

It includes:
- `PlayerParams`, `CprSpec`, `GameSpec` and `StrategyProfile`, immutable
records validated on construction. `build_game` is the front door for
assembling a game from parameter records or plain mappings.

- `effective_rate` and `effective_rate_deriv` evaluate a player's effective
rate of return on a CPR,
    F_ij(t) = (R_j(t) - 1)**a_i * (1 - p_j(t)) - k_i * p_j(t),
and its first two derivatives. `rate_and_derivs` is the unchecked, vectorised
workhorse the solver and the validators use.

- `utility` computes V_i = sum_j x_ij**a_i * F_ij(x_T^(j)) (a zero investment
contributes zero even where F is negative), and `utility_hessian` its
finite-difference Hessian in the player's own coordinates.

- `validate_assumptions` checks the standing assumptions on sampled grids and
reports which ones failed. A pass is evidence, not proof.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from attr import field, frozen
from funcy import decorator

from multicpr._base import DomainError, GameValidationError, bounded
from multicpr._typing import FloatArray, ScalarOrArray
from multicpr.enum import DerivativeMethod
from multicpr.families import (
    FailureFunction,
    ReturnFunction,
    failure_from_dict,
    return_from_dict,
)

logger = logging.getLogger(__name__)

FEASIBILITY_TOL: float = 1e-9

"""
FEASIBILITY_TOL: slack allowed on row sums and signs when a profile is built
from computed values (a Type II response sums to 1 up to rounding).
"""

NUMERIC_STEPS: dict[int, float] = {1: 1e-6, 2: 1e-4}

"""
NUMERIC_STEPS: central-difference step per derivative order.
"""


@frozen
class PlayerParams:
    """
    A player's risk attitude. `a` in (0, 1] is the exponent applied to gains
    (a = 1 is risk neutral), `k` > 0 is the weight on a CPR failure.
    """

    a: float = field(
        converter=float, validator=bounded(lower=0.0, upper=1.0, lower_open=True)
    )
    k: float = field(converter=float, validator=bounded(lower=0.0, lower_open=True))

    def to_dict(self) -> dict[str, float]:
        return {"a": self.a, "k": self.k}


@frozen
class CprSpec:
    """
    A CPR: its failure probability and return as functions of the total
    fraction invested in it.
    """

    failure: FailureFunction
    returns: ReturnFunction

    def to_dict(self) -> dict[str, Any]:
        return {"failure": self.failure.to_dict(), "returns": self.returns.to_dict()}


@frozen(cache_hash=True)
class GameSpec:
    """
    n players, m CPRs. Hashable, so per-game caches can key on it.
    """

    players: tuple[PlayerParams, ...] = field(converter=tuple)
    cprs: tuple[CprSpec, ...] = field(converter=tuple)

    @players.validator
    def _check_players(self, attribute: Any, value: tuple[PlayerParams, ...]) -> None:
        if not value:
            raise GameValidationError("a game needs at least one player", "players")

    @cprs.validator
    def _check_cprs(self, attribute: Any, value: tuple[CprSpec, ...]) -> None:
        if not value:
            raise GameValidationError("a game needs at least one CPR", "cprs")

    @property
    def n(self) -> int:
        return len(self.players)

    @property
    def m(self) -> int:
        return len(self.cprs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "players": [player.to_dict() for player in self.players],
            "cprs": [cpr.to_dict() for cpr in self.cprs],
        }


def _to_profile_array(x: Any) -> FloatArray:
    arr = np.array(x, dtype=np.float64, copy=True)
    if arr.ndim != 2 or 0 in arr.shape:
        raise DomainError(
            f"a strategy profile is an n x m matrix with n, m >= 1; got shape "
            f"{arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise DomainError("strategy profile contains non-finite entries")
    if np.any(arr < -FEASIBILITY_TOL):
        raise DomainError(f"negative investment in profile: min {arr.min()!r}")
    sums = arr.sum(axis=1)
    if np.any(sums > 1.0 + FEASIBILITY_TOL):
        worst = int(np.argmax(sums))
        raise DomainError(
            f"player {worst} invests {sums[worst]!r} > 1; rows must lie in the "
            "unit simplex"
        )
    arr = np.clip(arr, 0.0, None)
    arr.setflags(write=False)
    return arr


@frozen(eq=False)
class StrategyProfile:
    """
    An n x m investment matrix; row i is player i's split of their unit
    budget across the CPRs. Rows are validated to lie in the simplex
    {x >= 0, sum x <= 1} and the array is read-only.
    """

    x: FloatArray = field(converter=_to_profile_array)

    @classmethod
    def zeros(cls, n: int, m: int) -> StrategyProfile:
        return cls(np.zeros((n, m)))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def m(self) -> int:
        return self.x.shape[1]

    @property
    def totals(self) -> FloatArray:
        """x_T^(j): total investment in each CPR."""
        return self.x.sum(axis=0)

    def others_totals(self, i: int) -> FloatArray:
        """x_T^(j|i): investment in each CPR by everyone but player i."""
        return self.totals - self.x[i]

    def row(self, i: int) -> FloatArray:
        return self.x[i]

    def with_row(self, i: int, values: Sequence[float] | FloatArray) -> StrategyProfile:
        """Returns a new profile with player i's row replaced."""
        new = np.array(self.x, copy=True)
        new[i] = values
        return StrategyProfile(new)

    def max_distance(self, other: StrategyProfile) -> float:
        """Max-norm distance between two profiles of the same shape."""
        return float(np.max(np.abs(self.x - other.x)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StrategyProfile):
            return NotImplemented
        return self.x.shape == other.x.shape and bool(np.array_equal(self.x, other.x))

    def __hash__(self) -> int:
        return hash((self.x.shape, self.x.tobytes()))


def build_game(
    players: Iterable[PlayerParams | Mapping[str, float]],
    cprs: Iterable[CprSpec | Mapping[str, Any]],
) -> GameSpec:
    """
    Assembles a validated game.

    Parameters
    ----------
    players
        `PlayerParams` or mappings with ``a`` and ``k``
    cprs
        `CprSpec` or mappings with ``failure`` and ``returns`` family
        mappings, e.g. ``{"failure": {"family": "power", "q": 2},
        "returns": {"family": "constant", "c": 1}}``

    Returns
    -------
        the GameSpec

    Raises
    ------
    GameValidationError
        any parameter out of range; `field` names it, e.g. ``players[0].a``
    """
    built_players = [_player(spec, f"players[{i}]") for i, spec in enumerate(players)]
    built_cprs = [_cpr(spec, f"cprs[{j}]") for j, spec in enumerate(cprs)]
    return GameSpec(players=built_players, cprs=built_cprs)


def _player(spec: PlayerParams | Mapping[str, float], where: str) -> PlayerParams:
    if isinstance(spec, PlayerParams):
        return spec
    if not isinstance(spec, Mapping) or set(spec) != {"a", "k"}:
        raise GameValidationError(
            f"a player is a mapping with exactly the keys 'a' and 'k', got {spec!r}",
            field=where,
        )
    try:
        return PlayerParams(**spec)
    except GameValidationError as e:
        raise GameValidationError(str(e), field=f"{where}.{e.field}") from e
    except (TypeError, ValueError) as e:
        raise GameValidationError(f"non-numeric player parameter: {e}", where) from e


def _cpr(spec: CprSpec | Mapping[str, Any], where: str) -> CprSpec:
    if isinstance(spec, CprSpec):
        return spec
    if not isinstance(spec, Mapping) or set(spec) != {"failure", "returns"}:
        raise GameValidationError(
            "a CPR is a mapping with exactly the keys 'failure' and 'returns', "
            f"got {spec!r}",
            field=where,
        )
    return CprSpec(
        failure=failure_from_dict(spec["failure"], f"{where}.failure"),
        returns=return_from_dict(spec["returns"], f"{where}.returns"),
    )


@decorator
def check_player(call) -> Any:
    """
    Guards functions taking ``(game, ..., i, ...)`` against out-of-range
    player indices.
    """
    game, i = call.game, call.i
    if not 0 <= i < game.n:
        raise DomainError(f"player index {i} out of range for n = {game.n}")
    return call()


@decorator
def check_cell(call) -> Any:
    """
    Like `check_player`, for functions addressing one (player, CPR) cell.
    """
    game, i, j = call.game, call.i, call.j
    if not 0 <= i < game.n:
        raise DomainError(f"player index {i} out of range for n = {game.n}")
    if not 0 <= j < game.m:
        raise DomainError(f"cpr index {j} out of range for m = {game.m}")
    return call()


def rate_and_derivs(
    game: GameSpec, i: int, j: int, t: ScalarOrArray
) -> tuple[ScalarOrArray, ScalarOrArray, ScalarOrArray]:
    """
    F_ij, F_ij' and F_ij'' at t, vectorised and unchecked. Negative t is
    read as 0; for t >= 1 the CPR has failed for sure, so F = -k and both
    derivatives vanish.
    """
    player, cpr = game.players[i], game.cprs[j]
    a, k = player.a, player.k
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, None)
    p = np.asarray(cpr.failure.value(t))
    p1 = np.asarray(cpr.failure.deriv(t, 1))
    p2 = np.asarray(cpr.failure.deriv(t, 2))
    gain = np.asarray(cpr.returns.value(t)) - 1.0
    r1 = np.asarray(cpr.returns.deriv(t, 1))
    r2 = np.asarray(cpr.returns.deriv(t, 2))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ga = gain**a
        ga1 = a * gain ** (a - 1.0)
        ga2 = 0.0 if a == 1.0 else a * (a - 1.0) * gain ** (a - 2.0)
        f0 = ga * (1.0 - p) - k * p
        f1 = ga1 * r1 * (1.0 - p) - ga * p1 - k * p1
        f2 = (
            ga2 * r1**2 * (1.0 - p)
            + ga1 * r2 * (1.0 - p)
            - 2.0 * ga1 * r1 * p1
            - ga * p2
            - k * p2
        )
    failed = t >= 1.0
    f0 = np.where(failed, -k, f0)
    f1 = np.where(failed, 0.0, f1)
    f2 = np.where(failed, 0.0, f2)
    if np.ndim(t) == 0:
        return float(f0), float(f1), float(f2)
    return f0, f1, f2


def rate_values(game: GameSpec, i: int, j: int, t: ScalarOrArray) -> ScalarOrArray:
    """F_ij at t, vectorised and unchecked (see `rate_and_derivs`)."""
    player, cpr = game.players[i], game.cprs[j]
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, None)
    p = np.asarray(cpr.failure.value(t))
    gain = np.asarray(cpr.returns.value(t)) - 1.0
    out = gain**player.a * (1.0 - p) - player.k * p
    return float(out) if np.ndim(out) == 0 else out


def _check_unit_interval(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t!r}")
    return t


@check_cell
def effective_rate(game: GameSpec, i: int, j: int, t: float) -> float:
    """
    Player i's effective rate of return on CPR j when the CPR's total
    investment is t.

    Parameters
    ----------
    game
        the game
    i, j
        player and CPR indices
    t
        total investment, in [0, 1]

    Returns
    -------
        F_ij(t)

    Raises
    ------
    DomainError
        index out of range or t outside [0, 1]
    """
    return rate_values(game, i, j, _check_unit_interval(t))


@dataclass(frozen=True, slots=True)
class Derivative:
    """A derivative value and the path that produced it."""

    value: float
    order: int
    method: DerivativeMethod

    @property
    def analytic(self) -> bool:
        return self.method is DerivativeMethod.ANALYTIC


@check_cell
def effective_rate_deriv(
    game: GameSpec,
    i: int,
    j: int,
    t: float,
    order: int = 1,
    method: DerivativeMethod | str = DerivativeMethod.AUTO,
) -> Derivative:
    """
    First or second derivative of F_ij at t.

    All built-in families have closed forms, so AUTO takes the analytic
    path. NUMERIC uses central differences with step 1e-6 (order 1) or 1e-4
    (order 2); the two paths agree to about 1e-5 away from the ends of the
    interval.

    Parameters
    ----------
    game
        the game
    i, j
        player and CPR indices
    t
        total investment, in (0, 1)
    order
        1 or 2
    method
        AUTO, ANALYTIC or NUMERIC (or their config spellings)

    Returns
    -------
        a `Derivative` record carrying the value and the path taken

    Raises
    ------
    DomainError
        bad index, t outside (0, 1) or order not in {1, 2}
    """
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError(f"derivatives need t in (0, 1), got {t!r}")
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    method = DerivativeMethod.from_label(method)
    if method is DerivativeMethod.NUMERIC:
        h = NUMERIC_STEPS[order]
        lo, mid, hi = (rate_values(game, i, j, s) for s in (t - h, t, t + h))
        value = (hi - lo) / (2.0 * h) if order == 1 else (hi - 2.0 * mid + lo) / h**2
        return Derivative(value=value, order=order, method=method)
    _, f1, f2 = rate_and_derivs(game, i, j, t)
    return Derivative(
        value=f1 if order == 1 else f2, order=order, method=DerivativeMethod.ANALYTIC
    )


@check_player
def utility(game: GameSpec, profile: StrategyProfile, i: int) -> float:
    """
    V_i(x) = sum_j x_ij**a_i * F_ij(x_T^(j)). CPRs player i does not invest
    in contribute zero, however crowded they are.

    Raises
    ------
    DomainError
        i out of range or profile shape does not match the game
    """
    _check_shape(game, profile)
    a = game.players[i].a
    row, totals = profile.x[i], profile.totals
    return float(
        sum(
            row[j] ** a * rate_values(game, i, j, totals[j])
            for j in range(game.m)
            if row[j] > 0.0
        )
    )


@check_player
def utility_hessian(
    game: GameSpec,
    profile: StrategyProfile,
    i: int,
    h: float = 1e-4,
    coords: Sequence[int] | None = None,
) -> FloatArray:
    """
    Central-difference Hessian of V_i in player i's own coordinates, holding
    everyone else fixed. CPR utilities are separable, so off-diagonal
    entries vanish up to rounding; the diagonal is negative on the interior
    of player i's feasible set when the standing assumptions hold.

    Parameters
    ----------
    game
        the game
    profile
        the evaluation point; its row i must be at least h from the simplex
        faces so every finite-difference point stays feasible
    i
        player index
    h
        difference step
    coords
        CPR indices to differentiate along, by default all of them

    Returns
    -------
        square matrix over `coords`
    """
    _check_shape(game, profile)
    base = np.asarray(profile.x[i], dtype=np.float64)
    m = game.m
    coords = list(range(m)) if coords is None else list(coords)

    def value(row: FloatArray) -> float:
        return utility(game, profile.with_row(i, row), i)

    size = len(coords)
    hess = np.empty((size, size))
    centre = value(base)
    for r, j in enumerate(coords):
        ej = np.eye(m)[j] * h
        hess[r, r] = (value(base + ej) - 2.0 * centre + value(base - ej)) / h**2
        for s in range(r + 1, size):
            el = np.eye(m)[coords[s]] * h
            hess[r, s] = hess[s, r] = (
                value(base + ej + el)
                - value(base + ej - el)
                - value(base - ej + el)
                + value(base - ej - el)
            ) / (4.0 * h**2)
    return hess


def _check_shape(game: GameSpec, profile: StrategyProfile) -> None:
    if profile.x.shape != (game.n, game.m):
        raise DomainError(
            f"profile shape {profile.x.shape} does not match game ({game.n}, {game.m})"
        )


@dataclass(frozen=True, slots=True)
class Violation:
    """
    One failed standing assumption. `player` is None for conditions on the
    CPR alone (p and R); `t` is the first offending sample, None for the
    endpoint conditions.
    """

    player: int | None
    cpr: int
    t: float | None
    condition: str

    def __str__(self) -> str:
        where = f"cprs[{self.cpr}]"
        if self.player is not None:
            where = f"players[{self.player}]/{where}"
        at = "" if self.t is None else f" at t={self.t:.6g}"
        return f"{where}: {self.condition} violated{at}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "player": self.player,
            "cpr": self.cpr,
            "t": self.t,
            "condition": self.condition,
        }


@dataclass(frozen=True, slots=True)
class AssumptionReport:
    """
    Outcome of `validate_assumptions`: every violated condition, one
    `Violation` per (cell, condition) naming the first offending sample.
    The report passes exactly when there are none.
    """

    violations: tuple[Violation, ...]
    samples: int
    concavity_domain: str
    note: str = dc_field(
        default=(
            "sound but incomplete: conditions are checked on sampled grids only; "
            "a pass is evidence, not proof"
        )
    )

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def failures(self) -> tuple[str, ...]:
        """The violations as readable lines."""
        return tuple(str(violation) for violation in self.violations)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "failures": list(self.failures),
            "violations": [violation.to_dict() for violation in self.violations],
            "samples": self.samples,
            "concavity_domain": self.concavity_domain,
            "note": self.note,
        }


def validate_assumptions(
    game: GameSpec, samples: int = 1000, concavity_domain: str = "active"
) -> AssumptionReport:
    """
    Checks the standing assumptions on a uniform grid of `samples` points in
    (0, 1):

    - p_j(0) = 0, p_j(1) = 1 and p_j nondecreasing
    - R_j(t) > 1
    - F_ij(0) > 0 and F_ij(1) < 0, so each F_ij has a root
    - F_ij' < 0
    - F_ij'' < 0 on the grid points where F_ij > 0 (``"active"``, the region
    every best response lives in), or on the whole grid (``"full"``)

    Parameters
    ----------
    game
        the game
    samples
        grid size, at least 3
    concavity_domain
        "active" or "full"

    Returns
    -------
        an `AssumptionReport`

    Raises
    ------
    DomainError
        samples < 3 or unknown concavity_domain
    """
    if samples < 3:
        raise DomainError(f"samples must be >= 3, got {samples}")
    if concavity_domain not in ("active", "full"):
        raise DomainError(
            f"concavity_domain must be 'active' or 'full', got {concavity_domain!r}"
        )
    grid = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    violations: list[Violation] = []

    def first_bad(mask: np.ndarray) -> float:
        return float(grid[np.argmax(mask)])

    for j, cpr in enumerate(game.cprs):
        if cpr.failure.value(0.0) != 0.0:
            violations.append(Violation(None, j, None, "p(0) = 0"))
        if cpr.failure.value(1.0) != 1.0:
            violations.append(Violation(None, j, None, "p(1) = 1"))
        bad = np.r_[False, np.diff(cpr.failure.value(grid)) < 0.0]
        if bad.any():
            violations.append(Violation(None, j, first_bad(bad), "p nondecreasing"))
        bad = ~(np.asarray(cpr.returns.value(grid)) > 1.0)
        if bad.any():
            violations.append(Violation(None, j, first_bad(bad), "R > 1"))
        for i in range(game.n):
            if not rate_values(game, i, j, 0.0) > 0.0:
                violations.append(Violation(i, j, None, "F(0) > 0"))
            if not rate_values(game, i, j, 1.0) < 0.0:
                violations.append(Violation(i, j, None, "F(1) < 0"))
            f0, f1, f2 = rate_and_derivs(game, i, j, grid)
            bad = ~(f1 < 0.0)
            if bad.any():
                violations.append(Violation(i, j, first_bad(bad), "F' < 0"))
            region = f0 > 0.0 if concavity_domain == "active" else np.ones_like(grid, bool)
            bad = region & ~(f2 < 0.0)
            if bad.any():
                violations.append(Violation(i, j, first_bad(bad), "F'' < 0"))

    report = AssumptionReport(
        violations=tuple(violations),
        samples=samples,
        concavity_domain=concavity_domain,
    )
    logger.debug("assumption check: %s", "pass" if report.passed else report.failures)
    return report


__all__: list[str] = [
    "AssumptionReport",
    "CprSpec",
    "Derivative",
    "FEASIBILITY_TOL",
    "GameSpec",
    "PlayerParams",
    "StrategyProfile",
    "Violation",
    "build_game",
    "check_cell",
    "check_player",
    "effective_rate",
    "effective_rate_deriv",
    "rate_and_derivs",
    "rate_values",
    "utility",
    "utility_hessian",
    "validate_assumptions",
]
