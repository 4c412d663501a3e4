# multicpr _base.py
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
_base is an internal support module containing the base classes shared by the
rest of multicpr.
It consists of:
- HandyEnumMixin, a mixin class for enumerated types that provides reverse
lookups from member attributes (config strings, CSV labels) to members
- The multicpr exception hierarchy. Every error we raise on purpose derives
from MultiCprError and, where it makes sense, from the builtin a caller would
expect (ValueError for bad input, ArithmeticError for root finder trouble).
The CLI maps these onto exit codes.
"""
from __future__ import annotations

from typing import Any, Callable, Iterable, Type

from multicpr._typing import EnumType


class HandyEnumMixin:
    """
    Mixin for our enums. Members carry one or more string attributes (the
    spelling used in config files, the label used in output tables), and
    `reverse_lookup` maps any of them back to the member.
    """

    @classmethod
    def _lookup_attributes(cls: Type[EnumType]) -> Iterable[str]:
        """
        Child classes should override this method to return the attribute names
        that should be considered in the reverse lookup.
        """
        raise NotImplementedError("This method should be implemented by child classes.")

    @classmethod
    def reverse_lookup(
        cls: Type[EnumType], value: Any, attributes: Iterable[str] | None = None
    ) -> EnumType | None:
        """
        Reverse lookup for enum object member from an attribute value. Child
        classes must implement cls._lookup_attributes().

        Parameters
        ----------
        value
            attribute value to search for; strings are compared
            case-insensitively
        attributes
            attribute names to search, by default cls._lookup_attributes()

        Returns
        -------
            the matching member, or None
        """
        attributes = list(attributes or cls._lookup_attributes())
        if isinstance(value, str):
            value = value.strip().lower()
        return next(
            (
                member
                for member in cls
                if any(
                    _fold(getattr(member, attr, None)) == value for attr in attributes
                )
            ),
            None,
        )

    @classmethod
    def from_label(cls: Type[EnumType], value: Any) -> EnumType:
        """
        Strict form of reverse_lookup for parsing user input.

        Raises
        ------
        ValueError
            if no member carries the value.
        """
        if isinstance(value, cls):
            return value
        member = cls.reverse_lookup(value)
        if member is None:
            raise ValueError(
                f"{value!r} is not a recognised {cls.__name__}; expected one of "
                f"{cls.list_by_attr(next(iter(cls._lookup_attributes())))}"
            )
        return member

    @classmethod
    def list_by_attr(cls, attr: str) -> list[Any]:
        """
        Simple classmethod to return the attributes of members.
        """
        return sorted([getattr(member, attr) for member in cls.members()])

    @classmethod
    def members(cls) -> list[Any]:
        return [cls.__members__.get(name) for name in cls.__members__]


def _fold(value: Any) -> Any:
    return value.lower() if isinstance(value, str) else value


class MultiCprError(Exception):
    """Root of the multicpr exception hierarchy."""


class GameValidationError(MultiCprError, ValueError):
    """
    A game parameter violates its documented range. `field` holds the dotted
    path of the offending value (e.g. ``players[0].a``) so config diagnostics
    can point at it.
    """

    def __init__(self, message: str, field: str | None = None) -> None:
        super().__init__(message)
        self.field: str | None = field


class DomainError(MultiCprError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketingError(MultiCprError, ArithmeticError):
    """
    A bracketing root finder could not run or did not finish: no sign change
    across the bracket, the upper bracket search overflowed, or the iteration
    cap was hit.
    """


class ContractViolation(MultiCprError, RuntimeError):
    """The caller broke a routing contract (e.g. asked for a Type II response
    when the unconstrained candidate already fits the budget)."""


class CostGuardError(MultiCprError, ValueError):
    """The requested brute-force search exceeds the supported size."""


class ConfigError(MultiCprError, ValueError):
    """
    An experiment config could not be parsed or violates the schema.
    """

    def __init__(
        self, message: str, field: str | None = None, line: int | None = None
    ) -> None:
        where = " ".join(
            part
            for part in (
                f"line {line}" if line is not None else "",
                f"field '{field}'" if field else "",
            )
            if part
        )
        super().__init__(f"{where}: {message}" if where else message)
        self.field: str | None = field
        self.line: int | None = line


class CheckFailure(MultiCprError):
    """A theorem-backed invariant failed on computed results."""


def bounded(
    lower: float | None = None,
    upper: float | None = None,
    *,
    lower_open: bool = False,
    upper_open: bool = False,
) -> Callable[[Any, Any, float], None]:
    """
    attrs validator factory for numeric range checks. Failures raise
    GameValidationError naming the attribute, e.g. "a out of range".

    Parameters
    ----------
    lower, upper
        bounds; None leaves that side unbounded
    lower_open, upper_open
        whether the respective bound is excluded

    Returns
    -------
        a validator with the attrs (instance, attribute, value) signature
    """

    def _validate(instance: Any, attribute: Any, value: float) -> None:
        too_low = lower is not None and (
            value <= lower if lower_open else value < lower
        )
        too_high = upper is not None and (
            value >= upper if upper_open else value > upper
        )
        if too_low or too_high or value != value:
            left = "(" if lower_open else "["
            right = ")" if upper_open else "]"
            interval = (
                f"{left}{'-inf' if lower is None else lower}, "
                f"{'inf' if upper is None else upper}{right}"
            )
            raise GameValidationError(
                f"{attribute.name} out of range: {value!r} not in {interval} "
                f"for {type(instance).__name__}",
                field=attribute.name,
            )

    return _validate


__all__: list[str] = [
    "BracketingError",
    "CheckFailure",
    "ConfigError",
    "ContractViolation",
    "CostGuardError",
    "DomainError",
    "GameValidationError",
    "HandyEnumMixin",
    "MultiCprError",
    "bounded",
]
