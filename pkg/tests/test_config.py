from __future__ import annotations

import numpy as np
import pytest

from multicpr._base import ConfigError
from multicpr._config import (
    dynamics_options,
    get_path,
    load_config,
    search_options,
    solve_options,
    start_profile,
    sweep_options,
    validate_options,
    with_path,
)
from multicpr.enum import RootMethod, Schedule
from tests.conftest import game_document

BAD_PLAYER = """\
schema_version: 1
game:
  players:
    - {a: 1.0, k: 1.0}
    - {a: 2.0, k: 1.0}
  cprs:
    - failure: {family: power, q: 2}
      returns: {family: constant, c: 1}
search: {}
"""


def test_search_config(write_config):
    path = write_config(
        {
            "seed": 9,
            "game": game_document(),
            "solver": {"root_method": "bisect"},
            "search": {"num_starts": 3, "dynamics": {"schedule": "simultaneous"}},
        }
    )
    cfg = load_config(path, command="search")
    assert cfg.command == "search"
    assert (cfg.game.n, cfg.game.m, cfg.seed) == (2, 1, 9)
    assert cfg.solver.root_method is RootMethod.BISECT
    options = search_options(cfg)
    assert options.num_starts == 3
    assert options.dynamics.schedule is Schedule.SIMULTANEOUS
    assert options.dynamics.solver == cfg.solver
    assert options.brute_force_resolution is None


def test_errors_point_at_the_line(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(BAD_PLAYER, encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.field == "game.players.1.a"
    assert info.value.line == 5


def test_yaml_syntax_error(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("schema_version: 1\ngame: [\n", encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.line is not None


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.yaml")


@pytest.mark.parametrize(
    "document, field",
    [
        ({"game": game_document(), "search": {}, "schema_version": 2}, "schema_version"),
        ({"game": game_document(), "search": {}, "dynamics": {}}, None),
        ({"game": game_document(), "search": {}, "colour": "red"}, "colour"),
        ({"game": game_document(), "search": {}, "seed": -1}, "seed"),
        ({"game": game_document(), "search": {"num_starts": -2}}, "search.num_starts"),
        ({"game": game_document(), "search": {"num_starts": 0}}, "search.num_starts"),
        ({"game": game_document(), "search": {"tempo": 1}}, "search.tempo"),
        ({"game": {"players": []}, "search": {}}, "game"),
    ],
)
def test_schema_violations(write_config, document, field):
    with pytest.raises(ConfigError) as info:
        cfg = load_config(write_config(document))
        search_options(cfg)
    assert info.value.field == field


def test_command_must_match_block(write_config):
    path = write_config({"game": game_document(), "dynamics": {}})
    with pytest.raises(ConfigError):
        load_config(path, command="search")
    # validate runs on any file, with or without a block
    assert load_config(path, command="validate").command == "dynamics"
    bare = write_config({"game": game_document()}, name="bare.yaml")
    cfg = load_config(bare, command="validate")
    assert cfg.command is None
    assert validate_options(cfg) == 1000


def test_solve_options(write_config):
    cfg = load_config(
        write_config(
            {"game": game_document(), "solve": {"profile": [[0.1], [0.2]], "players": [1]}}
        )
    )
    options = solve_options(cfg)
    assert options.players == (1,)
    assert np.allclose(options.profile.x, [[0.1], [0.2]])

    cfg = load_config(write_config({"game": game_document(), "solve": {"profile": [[0.1]]}}))
    with pytest.raises(ConfigError) as info:
        solve_options(cfg)
    assert info.value.field == "solve.profile"


def test_dynamics_start(write_config):
    cfg = load_config(
        write_config(
            {"game": game_document(), "dynamics": {"start": "random", "damping": 0.5}}
        )
    )
    dyn, start = dynamics_options(cfg)
    assert dyn.damping == 0.5
    assert start_profile(cfg, start, 3) == start_profile(cfg, start, 3)
    assert start_profile(cfg, "zero", 3).x.sum() == 0.0

    cfg = load_config(write_config({"game": game_document(), "dynamics": {"damping": 2}}))
    with pytest.raises(ConfigError):
        dynamics_options(cfg)


def test_sweep_paths(write_config):
    cfg = load_config(
        write_config(
            {
                "game": game_document(),
                "sweep": {"parameter": "game.cprs.0.returns.c", "values": [1, 2]},
            }
        )
    )
    options = sweep_options(cfg)
    assert options.values == (1, 2)
    assert get_path(cfg.raw, options.parameter) == 1.0
    changed = with_path(cfg, options.parameter, 4.0)
    assert changed.game.cprs[0].returns.c == 4.0
    assert cfg.game.cprs[0].returns.c == 1.0

    cfg = load_config(
        write_config(
            {
                "game": game_document(),
                "sweep": {"parameter": "game.cprs.3.returns.c", "values": [1]},
            }
        )
    )
    with pytest.raises(ConfigError) as info:
        sweep_options(cfg)
    assert info.value.field == "sweep.parameter"
