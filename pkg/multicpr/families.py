# multicpr families.py
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
Built-in function families for a CPR's failure probability p(t) and return
R(t), where t is the total fraction of investment placed in the CPR.

Failure families:
- `PowerFailure`, p(t) = min(t**q, 1) with q >= 1

Return families:
- `ConstantReturn`, R(t) = c + 1 with c > 0
- `ExpReturn`, R(t) = 2 - exp(t - 1)

Every family evaluates on floats or numpy arrays and returns the same kind it
was given. Inputs are clamped to the family's natural domain: p is flat at 1
and R is evaluated at min(t, 1) once t passes 1, which is what utilities of
overcrowded CPRs need (only the failure branch matters there).

`failure_from_dict` and `return_from_dict` build families from the mappings
used in config files, e.g. ``{"family": "power", "q": 2}``.
"""
from __future__ import annotations

from typing import Any, ClassVar, Mapping

import numpy as np
from attr import field, frozen

from multicpr._base import GameValidationError, bounded
from multicpr._typing import ScalarOrArray
from multicpr.enum import FailureFamily, ReturnFamily


def _as_array(t: ScalarOrArray) -> np.ndarray:
    return np.asarray(t, dtype=np.float64)


def _as_output(values: np.ndarray) -> ScalarOrArray:
    return float(values) if np.ndim(values) == 0 else values


@frozen
class PowerFailure:
    """
    p(t) = min(t**q, 1). q = 1 gives the linear failure curve; larger q
    makes small investments safer.
    """

    q: float = field(converter=float, validator=bounded(lower=1.0))
    family: ClassVar[FailureFamily] = FailureFamily.POWER

    def value(self, t: ScalarOrArray) -> ScalarOrArray:
        t = np.clip(_as_array(t), 0.0, None)
        return _as_output(np.minimum(t**self.q, 1.0))

    def deriv(self, t: ScalarOrArray, order: int = 1) -> ScalarOrArray:
        """
        Closed-form derivative of p. Both derivatives vanish for t >= 1.
        The second derivative is unbounded at t = 0 when 1 < q < 2.
        """
        t = np.clip(_as_array(t), 0.0, None)
        q = self.q
        with np.errstate(divide="ignore", invalid="ignore"):
            if order == 1:
                inner = q * t ** (q - 1.0)
            elif order == 2:
                inner = np.zeros_like(t) if q == 1.0 else q * (q - 1.0) * t ** (q - 2.0)
            else:
                raise ValueError(f"order must be 1 or 2, got {order}")
        return _as_output(np.where(t < 1.0, inner, 0.0))

    def to_dict(self) -> dict[str, Any]:
        return {"family": str(self.family), "q": self.q}


@frozen
class ConstantReturn:
    """
    R(t) = c + 1: a CPR that pays c per unit regardless of crowding.
    """

    c: float = field(converter=float, validator=bounded(lower=0.0, lower_open=True))
    family: ClassVar[ReturnFamily] = ReturnFamily.CONSTANT

    def value(self, t: ScalarOrArray) -> ScalarOrArray:
        return _as_output(np.full_like(_as_array(t), self.c + 1.0))

    def deriv(self, t: ScalarOrArray, order: int = 1) -> ScalarOrArray:
        if order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {order}")
        return _as_output(np.zeros_like(_as_array(t)))

    def to_dict(self) -> dict[str, Any]:
        return {"family": str(self.family), "c": self.c}


@frozen
class ExpReturn:
    """
    R(t) = 2 - exp(t - 1): returns that decay with crowding and reach 1
    (no gain) at t = 1.
    """

    family: ClassVar[ReturnFamily] = ReturnFamily.EXP

    def value(self, t: ScalarOrArray) -> ScalarOrArray:
        t = np.clip(_as_array(t), 0.0, 1.0)
        return _as_output(2.0 - np.exp(t - 1.0))

    def deriv(self, t: ScalarOrArray, order: int = 1) -> ScalarOrArray:
        if order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {order}")
        t = _as_array(t)
        # both derivatives are -exp(t - 1)
        inner = -np.exp(np.clip(t, 0.0, 1.0) - 1.0)
        return _as_output(np.where(t < 1.0, inner, 0.0))

    def to_dict(self) -> dict[str, Any]:
        return {"family": str(self.family)}


FailureFunction = PowerFailure

ReturnFunction = ConstantReturn | ExpReturn


def failure_from_dict(spec: Mapping[str, Any], where: str = "failure") -> FailureFunction:
    """
    Builds a failure family from a config mapping.

    Parameters
    ----------
    spec
        mapping with a ``family`` key and that family's parameters
    where
        dotted path used in error messages

    Returns
    -------
        the family instance

    Raises
    ------
    GameValidationError
        unknown family, missing or out-of-range parameters
    """
    family = _lookup_family(FailureFamily, spec, where)
    params = {key: value for key, value in spec.items() if key != "family"}
    if family is FailureFamily.POWER:
        return _construct(PowerFailure, params, where)
    raise GameValidationError(f"unsupported failure family {family}", field=where)


def return_from_dict(spec: Mapping[str, Any], where: str = "returns") -> ReturnFunction:
    """
    Builds a return family from a config mapping. See `failure_from_dict`.
    """
    family = _lookup_family(ReturnFamily, spec, where)
    params = {key: value for key, value in spec.items() if key != "family"}
    if family is ReturnFamily.CONSTANT:
        return _construct(ConstantReturn, params, where)
    if family is ReturnFamily.EXP:
        return _construct(ExpReturn, params, where)
    raise GameValidationError(f"unsupported return family {family}", field=where)


def _lookup_family(enum_cls: Any, spec: Mapping[str, Any], where: str) -> Any:
    if not isinstance(spec, Mapping) or "family" not in spec:
        raise GameValidationError(
            f"expected a mapping with a 'family' key, got {spec!r}", field=where
        )
    member = enum_cls.reverse_lookup(spec["family"])
    if member is None:
        raise GameValidationError(
            f"unknown family {spec['family']!r}; choose from "
            f"{enum_cls.list_by_attr('value')}",
            field=f"{where}.family",
        )
    return member


def _construct(cls: type, params: dict[str, Any], where: str) -> Any:
    try:
        return cls(**params)
    except GameValidationError as e:
        raise GameValidationError(str(e), field=f"{where}.{e.field}") from e
    except TypeError as e:
        raise GameValidationError(
            f"bad parameters {sorted(params)} for {cls.__name__}: {e}", field=where
        ) from e
    except ValueError as e:
        raise GameValidationError(
            f"non-numeric parameter for {cls.__name__}: {e}", field=where
        ) from e


__all__: list[str] = [
    "ConstantReturn",
    "ExpReturn",
    "FailureFunction",
    "PowerFailure",
    "ReturnFunction",
    "failure_from_dict",
    "return_from_dict",
]
