# multicpr utils.py
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
utils.py provides helper converters and grids used across multicpr. We expose
it publicly because they're handy when preparing starts or reading results
back in.

It includes:
- `to_profile`, a singledispatch converter that normalizes nested lists,
numpy arrays, DataFrames (such as a GNE table read back from CSV) and
existing profiles to `StrategyProfile`.

- `random_profile`, a seeded draw of a profile whose rows are uniform on the
simplex {x >= 0, sum x <= 1}.

- `simplex_grid`, every integer vector k with k >= 0 and sum k <= res, i.e.
the points of the simplex at spacing 1/res. Cached, since the grid oracle
asks for the same grid once per player.

- `FLOAT_FORMAT`, the 17-significant-digit format every CSV writer passes to
pandas.
"""
from __future__ import annotations

from functools import singledispatch
from typing import Any

import numpy as np
import pandas as pd
from funcy import memoize

from multicpr._typing import IntArray, ProfileConvertibleTypes
from multicpr.model import StrategyProfile

FLOAT_FORMAT: str = "%.17g"


@singledispatch
def to_profile(profile_input: ProfileConvertibleTypes) -> StrategyProfile:
    """
    Converts a variety of matrix-like inputs to a validated StrategyProfile.

    Parameters
    ----------
    profile_input
        a StrategyProfile, numpy array, nested list/tuple, or DataFrame. A
        DataFrame may be a plain n x m matrix or a GNE table with ``player``
        and ``x_<j>`` columns (one point).

    Returns
    -------
        the profile

    Raises
    ------
    TypeError
        unsupported input type
    DomainError
        the values are not a feasible profile
    """
    raise TypeError(
        f"Unsupported profile input. You provided type: {type(profile_input)}. "
        "Supported types are ProfileConvertibleTypes"
    )


@to_profile.register(cls=StrategyProfile)
def _profile_to_profile(profile_input: StrategyProfile) -> StrategyProfile:
    return profile_input


@to_profile.register(cls=np.ndarray)
@to_profile.register(cls=list)
@to_profile.register(cls=tuple)
def _matrix_to_profile(profile_input: Any) -> StrategyProfile:
    return StrategyProfile(np.asarray(profile_input, dtype=np.float64))


@to_profile.register(cls=pd.DataFrame)
def _frame_to_profile(profile_input: pd.DataFrame) -> StrategyProfile:
    """
    GNE tables carry one row per player with x_0..x_{m-1} columns; anything
    else is read as a bare matrix.
    """
    x_cols = [col for col in profile_input.columns if str(col).startswith("x_")]
    if "player" in profile_input.columns and x_cols:
        ordered = profile_input.sort_values("player")
        x_cols = sorted(x_cols, key=lambda col: int(str(col).split("_")[1]))
        return StrategyProfile(ordered[x_cols].to_numpy(dtype=np.float64))
    return StrategyProfile(profile_input.to_numpy(dtype=np.float64))


def random_profile(rng: np.random.Generator, n: int, m: int) -> StrategyProfile:
    """
    Draws a profile with rows uniform on the simplex {x >= 0, sum x <= 1}
    (a flat Dirichlet over the m CPRs plus an unspent share, which is then
    dropped).
    """
    draws = rng.dirichlet(np.ones(m + 1), size=n)[:, :m]
    return StrategyProfile(draws)


@memoize
def simplex_grid(m: int, res: int) -> IntArray:
    """
    All integer vectors k in N^m with sum(k) <= res, in lexicographic order.

    Parameters
    ----------
    m
        dimension
    res
        grid resolution; k / res are the simplex points at spacing 1/res

    Returns
    -------
        read-only (N, m) integer array, N = C(res + m, m)
    """
    if m == 1:
        grid = np.arange(res + 1, dtype=np.int64)[:, None]
    else:
        blocks = []
        for first in range(res + 1):
            tail = simplex_grid(m - 1, res - first)
            head = np.full((tail.shape[0], 1), first, dtype=np.int64)
            blocks.append(np.hstack([head, tail]))
        grid = np.vstack(blocks)
    grid.setflags(write=False)
    return grid


__all__: list[str] = [
    "FLOAT_FORMAT",
    "random_profile",
    "simplex_grid",
    "to_profile",
]
