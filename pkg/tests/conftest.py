from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Callable

import pytest
import yaml

from multicpr.model import GameSpec, build_game


def make_game(
    n: int,
    m: int,
    a: float = 1.0,
    k: float = 1.0,
    c: float = 1.0,
    q: float = 2.0,
    returns: str = "constant",
) -> GameSpec:
    """n identical players and m identical CPRs."""
    ret: dict[str, Any] = {"family": returns}
    if returns == "constant":
        ret["c"] = c
    return build_game(
        players=[{"a": a, "k": k}] * n,
        cprs=[{"failure": {"family": "power", "q": q}, "returns": ret}] * m,
    )


def duo_best_response(b: float) -> float:
    """Closed-form best response in the two-player quadratic game to an
    opponent investing b."""
    return (-4.0 * b + math.sqrt(4.0 * b * b + 6.0)) / 6.0


@pytest.fixture
def solo() -> GameSpec:
    # F(t) = 1 - 2 t**2
    return make_game(1, 1)


@pytest.fixture
def duo() -> GameSpec:
    return make_game(2, 1)


@pytest.fixture
def rich() -> GameSpec:
    # F(t) = 8 - 9 t**2 on both CPRs; the unconstrained answer overspends
    return make_game(1, 2, c=8.0)


@pytest.fixture
def crowded_exp() -> GameSpec:
    return make_game(2, 2, a=0.4, returns="exp")


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    """Writes a config document to tmp_path and returns its path."""

    def _write(document: dict[str, Any], name: str = "experiment.yaml") -> Path:
        document = {"schema_version": 1, "output_dir": str(tmp_path / "out"), **document}
        path = tmp_path / name
        path.write_text(yaml.safe_dump(document, sort_keys=False), encoding="utf-8")
        return path

    return _write


def game_document(
    n: int = 2,
    m: int = 1,
    a: float = 1.0,
    k: float = 1.0,
    c: float = 1.0,
    q: float = 2.0,
) -> dict[str, Any]:
    return {
        "players": [{"a": a, "k": k} for _ in range(n)],
        "cprs": [
            {
                "failure": {"family": "power", "q": q},
                "returns": {"family": "constant", "c": c},
            }
            for _ in range(m)
        ],
    }
