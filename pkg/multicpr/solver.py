# multicpr solver.py
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
solver.py computes a single player's exact best response to fixed opponents.

The pieces, bottom-up:
- `omega`: the root of F_ij, the total investment past which CPR j pays
player i nothing. Cached per (game, player, cpr, solver settings).
- `active_set`: CPRs the opponents have not already pushed past omega.
- `constraint_bounds`: the player's feasible set, a per-CPR cap
omega_ij - x_T^(j|i) plus the unit budget.
- `psi`: x * F'(x + xbar) + a * F(x + xbar), the sign of player i's
marginal utility on one CPR. Decreasing in x on (0, omega - xbar).
- `type1_response`: every active CPR solved independently at psi = 0.
Valid when the results leave part of the budget unspent.
- `type2_response`: the budget binds; solve x**(a-1) * psi = kappa per CPR
and then the common multiplier kappa0 so the investments sum to one.
- `best_response`: runs the Type I candidate and routes to Type II when it
does not fit the budget.
- `g_aux`/`h_aux`: the fixed-point maps whose solutions are the Type I and
Type II responses.
- `kkt_residuals` and `concavity_check`: numeric certificates used by
equilibrium verification and the tests.

Only bracketing root finders are used (scipy's brentq by default, plain
bisection on request); every bracket is sign-checked before the finder runs.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from funcy import memoize
from scipy.optimize import bisect, brentq

from multicpr._base import BracketingError, ContractViolation, DomainError
from multicpr._typing import FloatArray
from multicpr.enum import ResponseKind, RootMethod
from multicpr.model import (
    CprSpec,
    GameSpec,
    PlayerParams,
    StrategyProfile,
    check_cell,
    check_player,
    rate_and_derivs,
    rate_values,
    utility_hessian,
)

logger = logging.getLogger(__name__)

KAPPA_CAP: float = 2.0**40

"""
KAPPA_CAP: the doubling search for an upper bracket on kappa0 gives up here.
"""

TINY: float = 1e-300

"""
TINY: left end of the Type II bracket when a < 1, where x**(a-1) * psi blows up
at zero.
"""


@dataclass(frozen=True, slots=True)
class SolverConfig:
    """
    Solver tolerances.

    Attributes
    ----------
    root_tol
        target |F(omega)| and the scale of every root finder's x-tolerance
    max_bisect_iters
        iteration cap for every root finder call
    sum_tol
        a Type I candidate must sum below 1 - sum_tol; Type II sums are
        expected within sum_tol of 1
    root_method
        "brentq" (default) or "bisect"
    """

    root_tol: float = 1e-10
    max_bisect_iters: int = 200
    sum_tol: float = 1e-9
    root_method: RootMethod = RootMethod.BRENTQ

    def __post_init__(self) -> None:
        for name in ("root_tol", "sum_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_bisect_iters < 1:
            raise ValueError(
                f"max_bisect_iters must be >= 1, got {self.max_bisect_iters}"
            )
        object.__setattr__(self, "root_method", RootMethod.from_label(self.root_method))

    @property
    def xtol(self) -> float:
        return self.root_tol * 1e-3


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True, slots=True)
class BestResponse:
    """
    Player i's best response to fixed opponents.

    Attributes
    ----------
    player
        index of the responding player
    values
        investment per CPR; positive exactly on `effective`
    kind
        Type I (budget slack) or Type II (budget binds)
    kappa0
        budget multiplier, 0 for Type I
    active
        CPRs with x_T^(j|i) < omega_ij
    effective
        CPRs receiving positive investment, a subset of `active`
    residuals
        per CPR: |psi| (Type I) or |x**(a-1) * psi - kappa0| (Type II) on
        effective CPRs, the complementary-slackness violation on active
        CPRs left at zero, 0 elsewhere
    """

    player: int
    values: tuple[float, ...]
    kind: ResponseKind
    kappa0: float
    active: frozenset[int]
    effective: frozenset[int]
    residuals: tuple[float, ...]

    def as_array(self) -> FloatArray:
        return np.array(self.values, dtype=np.float64)

    @property
    def total(self) -> float:
        return math.fsum(self.values)

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)


@dataclass(frozen=True, slots=True)
class ConstraintBounds:
    """
    Player i's feasible set under the constraint policy: 0 <= x_j <=
    upper[j] for each CPR and sum(x) <= budget. upper[j] is 0 off the
    active set.
    """

    upper: tuple[float, ...]
    active: frozenset[int]
    budget: float = 1.0

    def contains(self, values: Sequence[float], tol: float = 1e-9) -> bool:
        arr = np.asarray(values, dtype=np.float64)
        return bool(
            np.all(arr >= -tol)
            and np.all(arr <= np.asarray(self.upper) + tol)
            and arr.sum() <= self.budget + tol
        )


def _find_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: SolverConfig,
    what: str,
) -> float:
    """
    Sign-checks [lo, hi] and runs the configured bracketing finder.

    Raises
    ------
    BracketingError
        no sign change, non-finite end values or no convergence
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.isnan(f_lo) or math.isnan(f_hi):
        raise BracketingError(f"{what}: undefined value on [{lo!r}, {hi!r}]")
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise BracketingError(
            f"{what}: no sign change on [{lo!r}, {hi!r}] "
            f"(f(lo) = {f_lo!r}, f(hi) = {f_hi!r})"
        )
    finder = brentq if cfg.root_method is RootMethod.BRENTQ else bisect
    try:
        root, info = finder(
            func,
            lo,
            hi,
            xtol=cfg.xtol,
            rtol=4.0 * np.finfo(float).eps,
            maxiter=cfg.max_bisect_iters,
            full_output=True,
            disp=False,
        )
    except (RuntimeError, ValueError) as e:
        raise BracketingError(f"{what}: root finder failed: {e}") from e
    if not info.converged:
        raise BracketingError(
            f"{what}: no convergence within {cfg.max_bisect_iters} iterations"
        )
    logger.debug("%s: root %r after %d iterations", what, root, info.iterations)
    return float(root)


@memoize
def _omega_cached(player: PlayerParams, cpr: CprSpec, cfg: SolverConfig) -> float:
    # keyed on the cell, not the game, so sweeps share entries across games
    cell = GameSpec(players=(player,), cprs=(cpr,))
    root = _find_root(
        lambda t: rate_values(cell, 0, 0, t), 0.0, 1.0, cfg, f"omega for {player}"
    )
    residual = abs(rate_values(cell, 0, 0, root))
    if residual > cfg.root_tol:
        logger.warning("omega = %r leaves |F| = %.3g above root_tol", root, residual)
    return root


def clear_omega_cache() -> None:
    """Drops every cached omega. Long sweeps call this between values."""
    _omega_cached.invalidate_all()


@check_cell
def omega(game: GameSpec, i: int, j: int, cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """
    The unique t in (0, 1) with F_ij(t) = 0. Computed once per (player,
    CPR, solver settings) and then served from cache.

    Raises
    ------
    BracketingError
        F_ij(0) <= 0 or F_ij(1) >= 0, i.e. a game that skipped
        `validate_assumptions`
    """
    return _omega_cached(game.players[i], game.cprs[j], cfg)


def _opponent_totals(game: GameSpec, i: int, opponents: StrategyProfile) -> FloatArray:
    if opponents.x.shape != (game.n, game.m):
        raise DomainError(
            f"opponents profile shape {opponents.x.shape} does not match game "
            f"({game.n}, {game.m})"
        )
    return opponents.others_totals(i)


def _active(game: GameSpec, i: int, xbar: FloatArray, cfg: SolverConfig) -> frozenset[int]:
    return frozenset(j for j in range(game.m) if xbar[j] < omega(game, i, j, cfg))


@check_player
def active_set(
    game: GameSpec, i: int, opponents: StrategyProfile, cfg: SolverConfig = DEFAULT_SOLVER
) -> frozenset[int]:
    """
    CPRs j with x_T^(j|i) < omega_ij. Row i of `opponents` is ignored.
    """
    return _active(game, i, _opponent_totals(game, i, opponents), cfg)


@check_player
def constraint_bounds(
    game: GameSpec, i: int, opponents: StrategyProfile, cfg: SolverConfig = DEFAULT_SOLVER
) -> ConstraintBounds:
    """
    Player i's feasible set given the opponents (row i ignored): per-CPR
    caps max(0, omega_ij - x_T^(j|i)) and the unit budget.
    """
    xbar = _opponent_totals(game, i, opponents)
    upper = tuple(
        max(0.0, omega(game, i, j, cfg) - float(xbar[j])) for j in range(game.m)
    )
    return ConstraintBounds(upper=upper, active=_active(game, i, xbar, cfg))


def _psi(game: GameSpec, i: int, j: int, x: float, xbar: float) -> float:
    f0, f1, _ = rate_and_derivs(game, i, j, x + xbar)
    return x * f1 + game.players[i].a * f0


@check_cell
def psi(game: GameSpec, i: int, j: int, x: float, xbar: float) -> float:
    """
    psi_ij(x; xbar) = x * F_ij'(x + xbar) + a_i * F_ij(x + xbar). Player i's
    marginal utility on CPR j is x**(a_i - 1) * psi, so psi carries its sign.

    Raises
    ------
    DomainError
        x < 0 or x + xbar outside (0, 1)
    """
    if x < 0.0 or not 0.0 < x + xbar < 1.0:
        raise DomainError(f"psi needs x >= 0 and x + xbar in (0, 1); got {x!r}, {xbar!r}")
    return _psi(game, i, j, x, xbar)


def _marginal(game: GameSpec, i: int, j: int, x: float, xbar: float) -> float:
    """x**(a-1) * psi; at x = 0 only defined for a = 1."""
    a = game.players[i].a
    return (1.0 if a == 1.0 else x ** (a - 1.0)) * _psi(game, i, j, x, xbar)


def _type1_values(
    game: GameSpec, i: int, xbar: FloatArray, active: frozenset[int], cfg: SolverConfig
) -> FloatArray:
    values = np.zeros(game.m)
    for j in sorted(active):
        upper = omega(game, i, j, cfg) - float(xbar[j])
        # a cap within rounding of zero leaves no interior root
        if (
            upper <= cfg.xtol
            or _psi(game, i, j, 0.0, float(xbar[j])) <= 0.0
            or _psi(game, i, j, upper, float(xbar[j])) >= 0.0
        ):
            continue
        root = _find_root(
            lambda x: _psi(game, i, j, x, float(xbar[j])),
            0.0,
            upper,
            cfg,
            f"type I psi[{i}][{j}]",
        )
        # never hand back the cap itself
        values[j] = root if root < upper else 0.0
    return values


def _type1_record(
    game: GameSpec, i: int, xbar: FloatArray, active: frozenset[int], values: FloatArray
) -> BestResponse:
    residuals = tuple(
        abs(_psi(game, i, j, float(values[j]), float(xbar[j]))) if j in active else 0.0
        for j in range(game.m)
    )
    return BestResponse(
        player=i,
        values=tuple(float(v) for v in values),
        kind=ResponseKind.TYPE_I,
        kappa0=0.0,
        active=active,
        effective=frozenset(j for j in active if values[j] > 0.0),
        residuals=residuals,
    )


@check_player
def type1_response(
    game: GameSpec, i: int, opponents: StrategyProfile, cfg: SolverConfig = DEFAULT_SOLVER
) -> BestResponse:
    """
    Type I candidate: for every active CPR the unique root of psi on
    (0, omega_ij - x_T^(j|i)), zero elsewhere.

    The candidate comes back whatever its sum. When `total` reaches
    1 - sum_tol it is not feasible and the best response is Type II;
    `best_response` makes that call.

    Raises
    ------
    BracketingError
        a root could not be bracketed
    """
    xbar = _opponent_totals(game, i, opponents)
    active = _active(game, i, xbar, cfg)
    values = _type1_values(game, i, xbar, active, cfg)
    if values.sum() >= 1.0 - cfg.sum_tol:
        logger.debug("player %d: Type I candidate sums to %r", i, values.sum())
    return _type1_record(game, i, xbar, active, values)


def _type2_value(
    game: GameSpec, i: int, j: int, xbar: float, kappa: float, cfg: SolverConfig
) -> float:
    """Solves x**(a-1) * psi(x; xbar) = kappa on (0, omega - xbar)."""
    a = game.players[i].a
    upper = omega(game, i, j, cfg) - xbar
    if upper <= cfg.xtol or _marginal(game, i, j, upper, xbar) - kappa >= 0.0:
        return 0.0
    if a == 1.0:
        if rate_values(game, i, j, xbar) - kappa <= 0.0:
            return 0.0
        lo = 0.0
    else:
        lo = min(TINY, upper / 2.0)
    root = _find_root(
        lambda x: _marginal(game, i, j, x, xbar) - kappa,
        lo,
        upper,
        cfg,
        f"type II inner[{i}][{j}] kappa={kappa:.6g}",
    )
    return root if root < upper else 0.0


def _type2_solve(
    game: GameSpec,
    i: int,
    xbar: FloatArray,
    active: frozenset[int],
    candidate: FloatArray,
    cfg: SolverConfig,
) -> BestResponse:
    order = sorted(active)

    def allocation(kappa: float) -> FloatArray:
        values = np.zeros(game.m)
        for j in order:
            values[j] = _type2_value(game, i, j, float(xbar[j]), kappa, cfg)
        return values

    if candidate.sum() <= 1.0:
        # knife edge: the unconstrained candidate already spends the budget
        kappa0, values = 0.0, candidate
    else:
        lo, hi = 0.0, 1.0
        while allocation(hi).sum() >= 1.0:
            lo, hi = hi, hi * 2.0
            if hi > KAPPA_CAP:
                raise BracketingError(
                    f"type II outer[{i}]: no kappa below {KAPPA_CAP:g} brings the "
                    "allocation under budget"
                )
        kappa0 = _find_root(
            lambda kappa: allocation(kappa).sum() - 1.0,
            lo,
            hi,
            cfg,
            f"type II outer[{i}]",
        )
        values = allocation(kappa0)

    slack = abs(values.sum() - 1.0)
    if slack > cfg.sum_tol:
        logger.warning("player %d: Type II allocation misses the budget by %.3g", i, slack)

    residuals = []
    for j in range(game.m):
        if j not in active:
            residuals.append(0.0)
        elif values[j] > 0.0:
            residuals.append(
                abs(_marginal(game, i, j, float(values[j]), float(xbar[j])) - kappa0)
            )
        else:
            residuals.append(max(0.0, rate_values(game, i, j, float(xbar[j])) - kappa0))
    return BestResponse(
        player=i,
        values=tuple(float(v) for v in values),
        kind=ResponseKind.TYPE_II,
        kappa0=float(kappa0),
        active=active,
        effective=frozenset(j for j in active if values[j] > 0.0),
        residuals=tuple(residuals),
    )


@check_player
def type2_response(
    game: GameSpec, i: int, opponents: StrategyProfile, cfg: SolverConfig = DEFAULT_SOLVER
) -> BestResponse:
    """
    Type II response. For a trial multiplier kappa each active CPR's
    investment solves x**(a-1) * psi(x) = kappa (with a = 1 a CPR whose
    F(x_T^(j|i)) <= kappa is dropped at zero); the allocation sum S(kappa)
    decreases in kappa, and kappa0 solves S(kappa0) = 1. The upper bracket
    doubles from 1 and gives up past 2**40.

    Raises
    ------
    ContractViolation
        S(0) < 1 - sum_tol: the Type I candidate fits and should be used
    BracketingError
        bracket search or a root finder failed
    """
    xbar = _opponent_totals(game, i, opponents)
    active = _active(game, i, xbar, cfg)
    candidate = _type1_values(game, i, xbar, active, cfg)
    if candidate.sum() < 1.0 - cfg.sum_tol:
        raise ContractViolation(
            f"player {i}: S(0) = {candidate.sum()!r} < 1 - sum_tol; the response "
            "is Type I"
        )
    return _type2_solve(game, i, xbar, active, candidate, cfg)


@check_player
def best_response(
    game: GameSpec, i: int, opponents: StrategyProfile, cfg: SolverConfig = DEFAULT_SOLVER
) -> BestResponse:
    """
    Player i's best response to the other rows of `opponents`.

    With an empty active set the response is all zeros (Type I). Otherwise
    the Type I candidate is computed; it is the answer if it sums below
    1 - sum_tol, else the Type II system is solved.

    Parameters
    ----------
    game
        the game
    i
        responding player
    opponents
        full profile; row i is ignored
    cfg
        solver settings

    Returns
    -------
        a `BestResponse`

    Raises
    ------
    BracketingError
        a root finder could not bracket or converge
    """
    xbar = _opponent_totals(game, i, opponents)
    active = _active(game, i, xbar, cfg)
    candidate = _type1_values(game, i, xbar, active, cfg)
    if candidate.sum() < 1.0 - cfg.sum_tol:
        return _type1_record(game, i, xbar, active, candidate)
    return _type2_solve(game, i, xbar, active, candidate, cfg)


@check_cell
def g_aux(
    game: GameSpec, i: int, j: int, t: float, cfg: SolverConfig = DEFAULT_SOLVER
) -> float:
    """
    G_ij(t) = -a_i * F_ij(t) / F_ij'(t) on (0, omega_ij). Positive and
    decreasing there; a Type I response b satisfies G(b + xbar) = b.

    Raises
    ------
    DomainError
        t outside (0, omega_ij)
    """
    if not 0.0 < t < omega(game, i, j, cfg):
        raise DomainError(f"G needs t in (0, omega_{i}{j}); got {t!r}")
    f0, f1, _ = rate_and_derivs(game, i, j, t)
    return -game.players[i].a * f0 / f1


@check_cell
def h_aux(
    game: GameSpec,
    i: int,
    j: int,
    t: float,
    kappa0: float,
    x: float,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> float:
    """
    H_ij(t; kappa0) = -a_i * F_ij(t) / (F_ij'(t) - kappa0 / x**a_i), the Type
    II counterpart of G (x is the player's own investment, t the CPR total).
    H <= G, with equality at kappa0 = 0.

    Raises
    ------
    DomainError
        x <= 0, kappa0 < 0 or t outside (0, omega_ij]
    """
    if x <= 0.0 or kappa0 < 0.0:
        raise DomainError(f"H needs x > 0 and kappa0 >= 0; got x={x!r}, kappa0={kappa0!r}")
    if not 0.0 < t <= omega(game, i, j, cfg):
        raise DomainError(f"H needs t in (0, omega_{i}{j}]; got {t!r}")
    f0, f1, _ = rate_and_derivs(game, i, j, t)
    a = game.players[i].a
    return -a * f0 / (f1 - kappa0 / x**a)


@dataclass(frozen=True, slots=True)
class KktResult:
    """
    KKT conditions of player i's problem evaluated at their own row of a
    candidate profile. `kind` is read off the row (budget slack or not);
    `kappa0` is the mean marginal utility over invested CPRs for rows that
    spend the budget.
    """

    residuals: tuple[float, ...]
    kappa0: float
    kind: ResponseKind
    budget_residual: float

    @property
    def max_residual(self) -> float:
        return max(max(self.residuals, default=0.0), self.budget_residual)


@check_player
def kkt_residuals(
    game: GameSpec, i: int, profile: StrategyProfile, cfg: SolverConfig = DEFAULT_SOLVER
) -> KktResult:
    """
    Residuals of the KKT conditions at row i of `profile`.

    Per CPR: the row's entry where the CPR is inactive (it must be zero);
    |psi| (slack budget) or |x**(a-1) * psi - kappa0| (spent budget) where
    the row invests; the positive part of the marginal utility at zero (minus
    kappa0) where the CPR is active but unused.
    """
    xbar = _opponent_totals(game, i, profile)
    active = _active(game, i, xbar, cfg)
    row = profile.x[i]
    a = game.players[i].a
    spent = row.sum() >= 1.0 - cfg.sum_tol

    kappa0 = 0.0
    if spent:
        marginals = [
            _marginal(game, i, j, float(row[j]), float(xbar[j]))
            for j in active
            if row[j] > 0.0
        ]
        kappa0 = float(np.mean(marginals)) if marginals else 0.0

    residuals = []
    for j in range(game.m):
        x, bar = float(row[j]), float(xbar[j])
        if j not in active:
            residuals.append(x)
        elif x > 0.0:
            value = _marginal(game, i, j, x, bar) if spent else _psi(game, i, j, x, bar)
            residuals.append(abs(value - kappa0))
        elif a < 1.0:
            # marginal utility is unbounded at zero
            residuals.append(math.inf)
        else:
            residuals.append(max(0.0, rate_values(game, i, j, bar) - kappa0))
    return KktResult(
        residuals=tuple(residuals),
        kappa0=kappa0,
        kind=ResponseKind.TYPE_II if spent else ResponseKind.TYPE_I,
        budget_residual=(abs(row.sum() - 1.0) + max(0.0, -kappa0)) if spent else 0.0,
    )


@dataclass(frozen=True, slots=True)
class ConcavityReport:
    """Outcome of `concavity_check`."""

    passed: bool
    samples: int
    max_diagonal: float
    max_cross: float


@check_player
def concavity_check(
    game: GameSpec,
    i: int,
    opponents: StrategyProfile,
    samples: int = 32,
    seed: int = 0,
    h: float = 1e-4,
    cross_tol: float = 1e-5,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> ConcavityReport:
    """
    Samples points in the interior of player i's feasible set and checks
    that V_i's second differences along each active CPR are negative and
    the cross differences vanish, i.e. V_i is strictly concave there.

    Parameters
    ----------
    game
        the game
    i
        player index
    opponents
        full profile; row i is ignored
    samples
        number of interior points to try
    seed
        seed for the sampler
    h
        difference step
    cross_tol
        bound on |cross difference|
    cfg
        solver settings (for omega)

    Returns
    -------
        a `ConcavityReport`; `samples` counts the points actually checked
    """
    bounds = constraint_bounds(game, i, opponents, cfg)
    coords = [j for j in sorted(bounds.active) if bounds.upper[j] > 6.0 * h]
    rng = np.random.default_rng(seed)
    max_diag, max_cross, checked = -math.inf, 0.0, 0
    if not coords:
        return ConcavityReport(passed=True, samples=0, max_diagonal=max_diag, max_cross=0.0)
    caps = np.array([bounds.upper[j] for j in coords])
    for _ in range(samples):
        point = 2.0 * h + (caps - 4.0 * h) * rng.uniform(size=len(coords))
        if point.sum() > 1.0 - 2.0 * h:
            continue
        row = np.zeros(game.m)
        row[coords] = point
        hess = utility_hessian(game, opponents.with_row(i, row), i, h=h, coords=coords)
        max_diag = max(max_diag, float(np.max(np.diag(hess))))
        off = hess - np.diag(np.diag(hess))
        max_cross = max(max_cross, float(np.max(np.abs(off))))
        checked += 1
    passed = checked == 0 or (max_diag < 0.0 and max_cross <= cross_tol)
    return ConcavityReport(
        passed=passed, samples=checked, max_diagonal=max_diag, max_cross=max_cross
    )


__all__: list[str] = [
    "BestResponse",
    "ConcavityReport",
    "ConstraintBounds",
    "DEFAULT_SOLVER",
    "KktResult",
    "SolverConfig",
    "active_set",
    "best_response",
    "clear_omega_cache",
    "concavity_check",
    "constraint_bounds",
    "g_aux",
    "h_aux",
    "kkt_residuals",
    "omega",
    "psi",
    "type1_response",
    "type2_response",
]
