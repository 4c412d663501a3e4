from __future__ import annotations

import numpy as np
import pytest

from multicpr._base import DomainError, GameValidationError
from multicpr.enum import DerivativeMethod
from multicpr.families import ConstantReturn, ExpReturn, PowerFailure
from multicpr.model import (
    CprSpec,
    PlayerParams,
    StrategyProfile,
    Violation,
    build_game,
    effective_rate,
    effective_rate_deriv,
    rate_and_derivs,
    utility,
    utility_hessian,
    validate_assumptions,
)
from tests.conftest import make_game


def test_effective_rate_values(solo):
    assert effective_rate(solo, 0, 0, 0.0) == pytest.approx(1.0)
    assert effective_rate(solo, 0, 0, 0.5) == pytest.approx(0.5)
    assert effective_rate(solo, 0, 0, 1.0) == pytest.approx(-1.0)


def test_effective_rate_rejects_bad_input(solo):
    with pytest.raises(DomainError, match=r"\[0, 1\]"):
        effective_rate(solo, 0, 0, 1.5)
    with pytest.raises(DomainError):
        effective_rate(solo, 1, 0, 0.5)
    with pytest.raises(DomainError):
        effective_rate(solo, 0, 3, 0.5)


def test_derivatives_analytic(solo):
    first = effective_rate_deriv(solo, 0, 0, 0.5)
    second = effective_rate_deriv(solo, 0, 0, 0.5, order=2)
    assert first.value == pytest.approx(-2.0)
    assert second.value == pytest.approx(-4.0)
    assert first.analytic and second.analytic


@pytest.mark.parametrize("order", [1, 2])
@pytest.mark.parametrize("t", [0.2, 0.5, 0.8])
def test_numeric_derivative_agrees_with_analytic(crowded_exp, order, t):
    exact = effective_rate_deriv(crowded_exp, 0, 0, t, order=order)
    approx = effective_rate_deriv(crowded_exp, 0, 0, t, order=order, method="numeric")
    assert approx.method is DerivativeMethod.NUMERIC
    assert approx.value == pytest.approx(exact.value, abs=1e-5)


def test_derivative_order_must_be_one_or_two(solo):
    with pytest.raises(DomainError):
        effective_rate_deriv(solo, 0, 0, 0.5, order=3)


@pytest.mark.parametrize("t", [0.0, 1.0, -0.2, 1.5])
@pytest.mark.parametrize("method", ["analytic", "numeric"])
def test_derivatives_need_an_interior_point(solo, t, method):
    with pytest.raises(DomainError, match=r"\(0, 1\)"):
        effective_rate_deriv(solo, 0, 0, t, method=method)


def test_rate_is_flat_past_one(solo):
    f0, f1, f2 = rate_and_derivs(solo, 0, 0, np.array([1.0, 1.3]))
    assert np.allclose(f0, -1.0)
    assert np.allclose(f1, 0.0)
    assert np.allclose(f2, 0.0)


def test_player_params_ranges():
    PlayerParams(a=1.0, k=0.1)
    with pytest.raises(GameValidationError) as info:
        PlayerParams(a=0.0, k=1.0)
    assert info.value.field == "a"
    with pytest.raises(GameValidationError):
        PlayerParams(a=0.5, k=0.0)


def test_family_ranges():
    with pytest.raises(GameValidationError):
        PowerFailure(q=0.5)
    with pytest.raises(GameValidationError):
        ConstantReturn(c=0.0)


def test_build_game_names_the_bad_field():
    with pytest.raises(GameValidationError) as info:
        build_game(
            players=[{"a": 1.0, "k": 1.0}, {"a": 1.5, "k": 1.0}],
            cprs=[{"failure": {"family": "power", "q": 2}, "returns": {"family": "exp"}}],
        )
    assert info.value.field == "players[1].a"

    with pytest.raises(GameValidationError) as info:
        build_game(
            players=[{"a": 1.0, "k": 1.0}],
            cprs=[{"failure": {"family": "power", "q": 2}, "returns": {"family": "log"}}],
        )
    assert info.value.field == "cprs[0].returns.family"


def test_build_game_accepts_records():
    cpr = CprSpec(failure=PowerFailure(q=2), returns=ExpReturn())
    game = build_game([PlayerParams(a=0.4, k=1.0)], [cpr, cpr])
    assert (game.n, game.m) == (1, 2)
    assert game == build_game([{"a": 0.4, "k": 1.0}], [cpr.to_dict(), cpr.to_dict()])
    assert hash(game) == hash(build_game([PlayerParams(a=0.4, k=1.0)], [cpr, cpr]))


def test_profile_validation():
    with pytest.raises(DomainError):
        StrategyProfile([[0.7, 0.4]])
    with pytest.raises(DomainError):
        StrategyProfile([[-0.1, 0.4]])
    with pytest.raises(DomainError):
        StrategyProfile([0.1, 0.2])
    profile = StrategyProfile([[0.2, 0.3], [0.1, 0.0]])
    with pytest.raises(ValueError):
        profile.x[0, 0] = 0.5
    assert np.allclose(profile.totals, [0.3, 0.3])
    assert np.allclose(profile.others_totals(0), [0.1, 0.0])
    assert profile.with_row(1, [0.0, 0.5]).x[1, 1] == 0.5
    assert profile == StrategyProfile([[0.2, 0.3], [0.1, 0.0]])


def test_utility(solo, duo):
    assert utility(solo, StrategyProfile([[0.5]]), 0) == pytest.approx(0.25)
    at_gne = StrategyProfile([[0.25], [0.25]])
    assert utility(duo, at_gne, 0) == pytest.approx(0.125)
    assert utility(duo, at_gne, 1) == pytest.approx(0.125)


def test_zero_investment_earns_nothing_on_a_failed_cpr(duo):
    profile = StrategyProfile([[0.0], [1.0]])
    assert utility(duo, profile, 0) == 0.0
    assert utility(duo, profile, 1) == pytest.approx(-1.0)


def test_utility_hessian(rich):
    # V(x) = sum_j x_j (8 - 9 x_j**2), so V'' = -54 x_j on the diagonal
    profile = StrategyProfile([[0.3, 0.2]])
    hess = utility_hessian(rich, profile, 0)
    assert hess.shape == (2, 2)
    assert hess[0, 0] == pytest.approx(-16.2, abs=1e-3)
    assert hess[1, 1] == pytest.approx(-10.8, abs=1e-3)
    assert abs(hess[0, 1]) < 1e-5


def test_validate_assumptions_passes(duo, crowded_exp):
    report = validate_assumptions(duo)
    assert report.passed and bool(report)
    assert report.failures == ()
    assert "evidence" in report.note
    assert validate_assumptions(crowded_exp).passed


def test_validate_assumptions_flags_linear_failure():
    report = validate_assumptions(make_game(1, 1, q=1.0))
    assert not report.passed
    assert any("F'' < 0 violated" in failure for failure in report.failures)
    (violation,) = report.violations
    assert isinstance(violation, Violation)
    assert (violation.player, violation.cpr, violation.condition) == (0, 0, "F'' < 0")
    assert violation.t == pytest.approx(1.0 / 1001.0)
    assert report.to_dict()["violations"][0]["condition"] == "F'' < 0"


def test_violation_lines():
    assert str(Violation(None, 2, 0.5, "R > 1")) == "cprs[2]: R > 1 violated at t=0.5"
    assert str(Violation(1, 0, None, "F(1) < 0")) == "players[1]/cprs[0]: F(1) < 0 violated"


def test_full_concavity_domain_is_stricter(crowded_exp):
    # with a < 1 the exp-return rate bends upward close to t = 1, where it is
    # already negative
    report = validate_assumptions(crowded_exp, concavity_domain="full")
    assert not report.passed
    assert all("F''" in failure for failure in report.failures)


def test_validate_assumptions_arguments(duo):
    with pytest.raises(DomainError):
        validate_assumptions(duo, samples=2)
    with pytest.raises(DomainError):
        validate_assumptions(duo, concavity_domain="partial")


def test_utility_is_a_sum_over_cprs(crowded_exp):
    profile = StrategyProfile([[0.2, 0.3], [0.1, 0.15]])
    first_only = StrategyProfile([[0.2, 0.0], [0.1, 0.0]])
    second_only = StrategyProfile([[0.0, 0.3], [0.0, 0.15]])
    for i in range(2):
        assert utility(crowded_exp, profile, i) == pytest.approx(
            utility(crowded_exp, first_only, i) + utility(crowded_exp, second_only, i),
            abs=1e-14,
        )
