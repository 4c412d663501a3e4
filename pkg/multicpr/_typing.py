# multicpr _typing.py
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
This module provides internal type definitions for multicpr to keep the code
clean but well-typed.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Sequence, TypeVar, Union

import numpy as np
from numpy.typing import NDArray
from pandas import DataFrame

if TYPE_CHECKING:
    from multicpr._base import HandyEnumMixin
    from multicpr.model import StrategyProfile

EnumType = TypeVar("EnumType", bound="HandyEnumMixin")

FloatArray = NDArray[np.float64]

IntArray = NDArray[np.int64]

ScalarOrArray = Union[float, FloatArray]

ProfileConvertibleTypes = Union[
    "StrategyProfile",
    FloatArray,
    Sequence[Sequence[float]],
    DataFrame,
]

__all__: list[str] = [
    "EnumType",
    "FloatArray",
    "IntArray",
    "ProfileConvertibleTypes",
    "ScalarOrArray",
]
