from __future__ import annotations

import math

import numpy as np
import pandas as pd
import pytest

from multicpr._base import DomainError
from multicpr.model import StrategyProfile
from multicpr.utils import random_profile, simplex_grid, to_profile


def test_to_profile_from_matrices():
    expected = StrategyProfile([[0.2, 0.3], [0.0, 0.5]])
    assert to_profile([[0.2, 0.3], [0.0, 0.5]]) == expected
    assert to_profile(((0.2, 0.3), (0.0, 0.5))) == expected
    assert to_profile(np.array([[0.2, 0.3], [0.0, 0.5]])) == expected
    assert to_profile(expected) is expected


def test_to_profile_from_gne_table():
    table = pd.DataFrame(
        {
            "id": [0, 0],
            "player": [1, 0],
            "type": ["TypeI", "TypeI"],
            "kappa0": [0.0, 0.0],
            "x_1": [0.1, 0.3],
            "x_0": [0.2, 0.4],
            "total_0": [0.6, 0.6],
        }
    )
    assert to_profile(table) == StrategyProfile([[0.4, 0.3], [0.2, 0.1]])


def test_to_profile_rejects():
    with pytest.raises(TypeError):
        to_profile("0.5")
    with pytest.raises(DomainError):
        to_profile([[0.8, 0.8]])


def test_random_profile_is_feasible_and_seeded():
    first = random_profile(np.random.default_rng(4), 3, 2)
    second = random_profile(np.random.default_rng(4), 3, 2)
    assert first == second
    assert first.x.shape == (3, 2)
    assert np.all(first.x.sum(axis=1) <= 1.0)


def test_simplex_grid():
    grid = simplex_grid(2, 3)
    assert grid.shape == (math.comb(5, 2), 2)
    assert grid.sum(axis=1).max() == 3
    assert grid[0].tolist() == [0, 0] and grid[-1].tolist() == [3, 0]
    assert not grid.flags.writeable
    assert simplex_grid(1, 4).ravel().tolist() == [0, 1, 2, 3, 4]
