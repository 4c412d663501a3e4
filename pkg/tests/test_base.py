from __future__ import annotations

import pytest

from multicpr._base import (
    BracketingError,
    ConfigError,
    DomainError,
    GameValidationError,
    MultiCprError,
)
from multicpr.enum import ExitCode, ResponseKind, ReturnFamily, Schedule, TrajectoryStatus


def test_enum_lookups():
    assert ResponseKind.reverse_lookup("II") is ResponseKind.TYPE_II
    assert ResponseKind.reverse_lookup("typei") is ResponseKind.TYPE_I
    assert str(ResponseKind.TYPE_I) == "TypeI"
    assert Schedule.from_label(" Simultaneous ") is Schedule.SIMULTANEOUS
    assert str(TrajectoryStatus.CYCLE) == "cycle_detected"
    assert ReturnFamily.list_by_attr("value") == ["constant", "exp"]
    assert ReturnFamily.reverse_lookup("log") is None
    with pytest.raises(ValueError):
        Schedule.from_label("sideways")


def test_exit_codes():
    assert [int(code) for code in ExitCode] == [0, 1, 2, 3]
    assert str(ExitCode.CHECK_FAILURE) == "check_failure"


def test_exception_hierarchy():
    assert issubclass(GameValidationError, ValueError)
    assert issubclass(DomainError, MultiCprError)
    assert issubclass(BracketingError, ArithmeticError)


def test_config_error_message():
    error = ConfigError("must be positive", field="game.players.0.k", line=7)
    assert str(error) == "line 7 field 'game.players.0.k': must be positive"
    assert (error.field, error.line) == ("game.players.0.k", 7)
    assert str(ConfigError("plain")) == "plain"
