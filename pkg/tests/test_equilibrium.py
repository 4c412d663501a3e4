from __future__ import annotations

import math

import numpy as np
import pandas as pd
import pytest

from multicpr._base import CostGuardError, DomainError
from multicpr.dynamics import DynamicsConfig, run
from multicpr.enum import ResponseKind
from multicpr.equilibrium import (
    GneSet,
    antichain_check,
    brute_force_gne,
    classify_types,
    count_bound_check,
    export_gne_csv,
    find_gne,
    support_sets,
    theorem_checks,
    verify_gne,
)
from multicpr.model import StrategyProfile, build_game, validate_assumptions
from multicpr.utils import random_profile
from tests.conftest import make_game


def test_verify_gne_accepts_the_symmetric_point(duo):
    report = verify_gne(duo, StrategyProfile([[0.25], [0.25]]))
    assert report.verdict and report.feasible
    assert max(report.utility_gap) < 1e-12
    assert max(report.kkt_residual) < 1e-12
    assert report.type_tags == (ResponseKind.TYPE_I, ResponseKind.TYPE_I)
    assert report.to_dict()["type_tags"] == ["TypeI", "TypeI"]


def test_verify_gne_rejects(duo):
    report = verify_gne(duo, StrategyProfile([[0.1], [0.1]]))
    assert not report.verdict
    assert min(report.utility_gap) > 1e-3

    crowded = verify_gne(duo, StrategyProfile([[0.5], [0.5]]))
    assert not crowded.feasible and not crowded.verdict


def test_find_gne_duo(duo):
    gne = find_gne(duo, num_starts=4, seed=3)
    assert len(gne) == 1
    assert np.allclose(gne.points[0].x, 0.25, atol=1e-7)
    assert gne.attempts == 5
    assert gne.converged == 5
    assert gne.reports[0].verdict


def test_find_gne_is_reproducible(crowded_exp):
    first = find_gne(crowded_exp, num_starts=3, seed=11)
    second = find_gne(crowded_exp, num_starts=3, seed=11)
    assert len(first) == len(second) >= 1
    for left, right in zip(first, second):
        assert left == right


@pytest.mark.slow
def test_find_gne_worker_pool_matches_serial(crowded_exp):
    serial = find_gne(crowded_exp, num_starts=4, seed=5)
    pooled = find_gne(crowded_exp, num_starts=4, seed=5, max_workers=2)
    assert [p.x.tolist() for p in serial] == [p.x.tolist() for p in pooled]


def test_find_gne_type_ii(rich):
    gne = find_gne(rich, num_starts=2)
    assert len(gne) == 1
    assert np.allclose(gne.points[0].x, 0.5, atol=1e-9)
    assert gne.reports[0].type_tags == (ResponseKind.TYPE_II,)
    assert gne.reports[0].kappa0[0] == pytest.approx(1.25, abs=1e-8)


def test_gne_table(duo, tmp_path):
    gne = find_gne(duo, num_starts=1)
    frame = gne.to_frame()
    assert list(frame.columns) == ["id", "player", "type", "kappa0", "x_0", "total_0"]
    assert frame["type"].tolist() == ["TypeI", "TypeI"]
    assert frame["total_0"].iloc[0] == pytest.approx(0.5, abs=1e-7)

    path = export_gne_csv(gne, tmp_path / "gne.csv")
    assert pd.read_csv(path).shape == (2, 6)


def test_antichain_check():
    low = StrategyProfile([[0.1, 0.1]])
    high = StrategyProfile([[0.2, 0.2]])
    passed, witness = antichain_check(GneSet(points=(low, high)))
    assert not passed and witness == (0, 1)

    crossing = StrategyProfile([[0.3, 0.05]])
    assert antichain_check(GneSet(points=(low, crossing))) == (True, None)


def test_count_bound_check():
    point = StrategyProfile([[0.1, 0.1]])
    assert count_bound_check(GneSet(points=(point,) * 3), n=1, m=2)
    assert not count_bound_check(GneSet(points=(point,) * 9), n=1, m=2)


def test_classify_types_and_supports(duo):
    profile = StrategyProfile([[0.25], [0.25]])
    classes = classify_types(duo, profile)
    assert classes.type_i_players == frozenset({0, 1})
    assert classes.support == (frozenset({0, 1}),)
    assert classes.support_ii == (frozenset(),)
    support, support_i, _ = support_sets(duo, profile, [ResponseKind.TYPE_II] * 2)
    assert support_i == (frozenset(),)
    assert support == classes.support


def test_theorem_checks_pass_on_computed_sets(duo, crowded_exp):
    report = theorem_checks(duo, find_gne(duo, num_starts=3))
    assert report.passed and report.failures == ()
    names = set(report.to_dict())
    assert {"antichain", "type_i_nonempty", "unique_when_single_cpr", "count_bound"} <= names
    assert report.to_dict()["unique_when_single_cpr"]["premise"]

    assert theorem_checks(crowded_exp, find_gne(crowded_exp, num_starts=3)).passed


def test_theorem_checks_flag_a_bad_set(duo):
    fake = GneSet(points=(StrategyProfile([[0.1], [0.1]]), StrategyProfile([[0.25], [0.25]])))
    report = theorem_checks(duo, fake)
    failed = {check.name for check in report.failures}
    assert {"unique_when_single_cpr", "antichain"} <= failed


def test_brute_force_cost_guard(duo):
    with pytest.raises(CostGuardError):
        brute_force_gne(make_game(2, 3))
    with pytest.raises(CostGuardError):
        brute_force_gne(duo, resolution=0)
    with pytest.raises(CostGuardError):
        brute_force_gne(duo, resolution=201)


@pytest.mark.slow
def test_brute_force_single_player(solo, rich):
    found = brute_force_gne(solo, resolution=200)
    assert len(found) == 1
    assert found.points[0].x[0, 0] == pytest.approx(1.0 / math.sqrt(6.0), abs=0.01)

    found = brute_force_gne(rich, resolution=100)
    assert len(found) == 1
    assert np.allclose(found.points[0].x, 0.5, atol=0.02)


ORACLE_GAMES = {
    "duo": make_game(2, 1),
    "crowded_exp": make_game(2, 2, a=0.4, returns="exp"),
    "four_on_one": make_game(4, 1),
    "mixed": build_game(
        players=[{"a": 1.0, "k": 1.0}, {"a": 0.6, "k": 2.0}],
        cprs=[
            {"failure": {"family": "power", "q": 2}, "returns": {"family": "constant", "c": 1}},
            {"failure": {"family": "power", "q": 3}, "returns": {"family": "exp"}},
        ],
    ),
    "one_on_four": make_game(1, 4, c=2.0),
}


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(ORACLE_GAMES))
def test_brute_force_agrees_with_search(name):
    game = ORACLE_GAMES[name]
    grid = brute_force_gne(game, resolution=100)
    searched = find_gne(game, num_starts=5, seed=2)
    assert len(searched) >= 1
    for point in searched:
        assert any(point.max_distance(other) <= 0.02 for other in grid)
    for other in grid:
        assert any(other.max_distance(point) <= 0.02 for point in searched)


@pytest.mark.parametrize("n, seed", [(2, 0), (3, 1), (3, 2), (5, 3), (5, 4)])
def test_single_cpr_games_have_one_gne(n, seed):
    rng = np.random.default_rng(seed)
    game = build_game(
        players=[
            {"a": float(rng.uniform(0.3, 1.0)), "k": float(rng.uniform(0.5, 2.0))}
            for _ in range(n)
        ],
        cprs=[{"failure": {"family": "power", "q": 2}, "returns": {"family": "constant", "c": 2}}],
    )
    assert validate_assumptions(game).passed
    gne = find_gne(game, num_starts=10, seed=seed)
    assert len(gne) == 1
    assert theorem_checks(game, gne).passed

    # the same starts find_gne draws: zero, then the seeded random ones
    starts_rng = np.random.default_rng(seed)
    starts = [StrategyProfile.zeros(n, 1)]
    starts += [random_profile(starts_rng, n, 1) for _ in range(10)]
    for start in starts:
        trajectory = run(game, start)
        assert trajectory.converged
        assert trajectory.final.max_distance(gne.points[0]) <= 1e-6


def test_find_gne_needs_a_random_start(duo):
    with pytest.raises(DomainError, match="num_starts"):
        find_gne(duo, num_starts=0)


def test_premise_labels(duo):
    report = theorem_checks(duo, find_gne(duo, num_starts=2))
    checks = {check.name: check for check in report.checks}
    assert checks["antichain"].premise_label == "premise n >= m"
    assert checks["unique_when_single_cpr"].premise_label == "premise m = 1"
    assert checks["count_bound"].premise_label == "unconditional"
    wide = theorem_checks(make_game(2, 3), GneSet()).to_dict()
    assert wide["antichain"]["premise_label"] == "premise not met (n < m)"
