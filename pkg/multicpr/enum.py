# multicpr enum.py
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
Enum classes for the tags that travel between modules, config files and
output tables: response kinds, update schedules, trajectory outcomes, the
built-in function families and CLI exit codes.
"""
from __future__ import annotations

from enum import Enum, IntEnum, unique
from typing import Iterable, Type

from multicpr._base import HandyEnumMixin
from multicpr._typing import EnumType


@unique
class ResponseKind(HandyEnumMixin, Enum):
    """
    The two shapes a best response can take. A Type I response leaves part of
    the budget unspent and zeroes every CPR's marginal utility; a Type II
    response spends the whole budget and equalises marginal utility at a
    common multiplier kappa0.

    Example:
        ```python
        ResponseKind.reverse_lookup("II")
        >> ResponseKind.TYPE_II
        ```
    """

    def __init__(self, label: str, roman: str) -> None:
        self.label: str = label  # table label, e.g. "TypeI"
        self.roman: str = roman  # short form used in sweeps

    def __str__(self) -> str:
        return self.label

    TYPE_I = ("TypeI", "I")
    TYPE_II = ("TypeII", "II")

    @classmethod
    def _lookup_attributes(cls: Type[EnumType]) -> Iterable[str]:
        return ["label", "roman"]


class _ValueLookupMixin(HandyEnumMixin):
    @classmethod
    def _lookup_attributes(cls: Type[EnumType]) -> Iterable[str]:
        return ["value"]

    def __str__(self) -> str:
        return str(self.value)


@unique
class Schedule(_ValueLookupMixin, Enum):
    """
    Order in which players update during a round of best-response dynamics.
    """

    SEQUENTIAL = "sequential"
    SIMULTANEOUS = "simultaneous"


@unique
class TrajectoryStatus(_ValueLookupMixin, Enum):
    """
    How a dynamics run ended.
    """

    CONVERGED = "converged"
    MAX_ROUNDS = "max_rounds_reached"
    CYCLE = "cycle_detected"


@unique
class FailureFamily(_ValueLookupMixin, Enum):
    """Built-in failure-probability families."""

    POWER = "power"


@unique
class ReturnFamily(_ValueLookupMixin, Enum):
    """Built-in return families."""

    CONSTANT = "constant"
    EXP = "exp"


@unique
class DerivativeMethod(_ValueLookupMixin, Enum):
    """
    Path taken for a derivative of the effective rate. AUTO resolves to
    ANALYTIC for families with closed-form derivatives.
    """

    AUTO = "auto"
    ANALYTIC = "analytic"
    NUMERIC = "numeric"


@unique
class RootMethod(_ValueLookupMixin, Enum):
    """Bracketing root finder used by the solver."""

    BRENTQ = "brentq"
    BISECT = "bisect"


@unique
class ExitCode(IntEnum):
    """
    Process exit codes of the command-line surface.
    """

    OK = 0
    CONFIG_ERROR = 1
    NUMERIC_FAILURE = 2
    CHECK_FAILURE = 3

    def __str__(self) -> str:
        return self.name.lower()


__all__: list[str] = [
    "DerivativeMethod",
    "ExitCode",
    "FailureFamily",
    "ResponseKind",
    "ReturnFamily",
    "RootMethod",
    "Schedule",
    "TrajectoryStatus",
]
