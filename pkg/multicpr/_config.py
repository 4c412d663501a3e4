# multicpr _config.py
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
A small factory pipeline that turns a YAML experiment file into validated
multicpr objects: `load_config` -> `parse_yaml` -> `process_config`, plus one
reader per command block (`solve_options`, `dynamics_options`,
`search_options`, `sweep_options`, `validate_options`).

Every schema problem is raised as ConfigError naming the dotted field path
and, when the value came from a file, its line.
"""
from __future__ import annotations

import copy
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml
from attr import field, frozen

from multicpr._base import ConfigError, DomainError, GameValidationError
from multicpr.dynamics import DynamicsConfig
from multicpr.model import GameSpec, StrategyProfile, build_game
from multicpr.solver import SolverConfig
from multicpr.utils import random_profile, to_profile

SCHEMA_VERSION: int = 1

COMMANDS: tuple[str, ...] = ("solve", "dynamics", "search", "sweep", "validate")

"""
COMMANDS: command blocks a config may carry; exactly one per file.
"""

TOP_LEVEL_KEYS: frozenset[str] = frozenset(
    {"schema_version", "seed", "output_dir", "game", "solver", *COMMANDS}
)

_INDEXED = re.compile(r"\[(\d+)\]")


def _dotted(path: str) -> str:
    """players[0].a -> players.0.a"""
    return _INDEXED.sub(r".\1", path)


@frozen
class ExperimentConfig:
    """
    A parsed experiment file.

    Attributes
    ----------
    command
        the command block present ("validate" may also run block-less files)
    game
        the validated game
    seed
        base seed
    output_dir
        where writers put their files
    solver
        shared solver settings
    block
        the command block's raw mapping
    raw
        the whole document, kept for sweeps that rebuild it
    lines
        dotted field path -> 1-based source line
    """

    command: str | None
    game: GameSpec
    seed: int
    output_dir: Path
    solver: SolverConfig
    block: dict[str, Any] = field(factory=dict)
    raw: dict[str, Any] = field(factory=dict)
    lines: dict[str, int] = field(factory=dict)

    def error(self, message: str, path: str) -> ConfigError:
        return ConfigError(message, field=path, line=self.lines.get(path))


def load_config(path: str | Path, command: str | None = None) -> ExperimentConfig:
    """
    Reads and validates an experiment file.

    Parameters
    ----------
    path
        YAML file
    command
        the command about to run; when given, the file's block must match it
        (``validate`` accepts any file)

    Raises
    ------
    ConfigError
        unreadable file, YAML syntax error or schema violation
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    raw, lines = parse_yaml(text)
    return process_config(raw, command=command, lines=lines)


def parse_yaml(text: str) -> tuple[dict[str, Any], dict[str, int]]:
    """
    Parses YAML text into a mapping and an index of field lines.
    """
    try:
        raw = yaml.safe_load(text)
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark else None
        raise ConfigError(f"YAML syntax error: {e.problem}", line=line) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML error: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("the top level of a config must be a mapping", line=1)
    lines: dict[str, int] = {}
    _index_lines(node, "", lines)
    return raw, lines


def _index_lines(node: yaml.Node | None, prefix: str, lines: dict[str, int]) -> None:
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            lines[path] = key_node.start_mark.line + 1
            _index_lines(value_node, path, lines)
    elif isinstance(node, yaml.SequenceNode):
        for idx, item in enumerate(node.value):
            path = f"{prefix}.{idx}"
            lines[path] = item.start_mark.line + 1
            _index_lines(item, path, lines)


def process_config(
    raw: Mapping[str, Any],
    command: str | None = None,
    lines: Mapping[str, int] | None = None,
) -> ExperimentConfig:
    """
    Validates a parsed document and builds the game and shared settings.
    """
    lines = dict(lines or {})

    def fail(message: str, path: str | None = None) -> ConfigError:
        return ConfigError(message, field=path, line=lines.get(path) if path else None)

    unknown = sorted(set(raw) - TOP_LEVEL_KEYS)
    if unknown:
        raise fail(f"unknown top-level key(s) {unknown}", unknown[0])
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise fail(
            f"schema_version must be {SCHEMA_VERSION}, got {raw.get('schema_version')!r}",
            "schema_version",
        )

    blocks = [name for name in COMMANDS if name in raw]
    if command == "validate":
        if len(blocks) > 1:
            raise fail(f"expected at most one command block, found {blocks}")
    elif len(blocks) != 1:
        raise fail(f"expected exactly one command block of {list(COMMANDS)}, found {blocks}")
    elif command is not None and blocks[0] != command:
        raise fail(f"command '{command}' needs a '{command}' block, found '{blocks[0]}'", blocks[0])
    name = blocks[0] if blocks else None
    block = raw.get(name) if name else {}
    if block is None:
        block = {}
    if not isinstance(block, dict):
        raise fail(f"the '{name}' block must be a mapping", name)

    game = _game(raw.get("game"), fail)
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise fail(f"seed must be a non-negative integer, got {seed!r}", "seed")
    solver_raw = raw.get("solver") or {}
    try:
        solver = SolverConfig(**solver_raw)
    except (TypeError, ValueError) as e:
        raise fail(f"bad solver settings: {e}", "solver") from e

    return ExperimentConfig(
        command=name,
        game=game,
        seed=seed,
        output_dir=Path(str(raw.get("output_dir", "results"))),
        solver=solver,
        block=dict(block),
        raw=copy.deepcopy(dict(raw)),
        lines=lines,
    )


def _game(spec: Any, fail: Any) -> GameSpec:
    if not isinstance(spec, dict) or set(spec) != {"players", "cprs"}:
        raise fail("game must be a mapping with 'players' and 'cprs' lists", "game")
    for key in ("players", "cprs"):
        if not isinstance(spec[key], list):
            raise fail(f"game.{key} must be a list", f"game.{key}")
    try:
        return build_game(spec["players"], spec["cprs"])
    except GameValidationError as e:
        path = f"game.{_dotted(e.field)}" if e.field else "game"
        raise fail(str(e), path) from e


def _profile(value: Any, cfg: ExperimentConfig, path: str) -> StrategyProfile:
    try:
        profile = to_profile(value)
    except (DomainError, TypeError, ValueError) as e:
        raise cfg.error(f"not a feasible profile: {e}", path) from e
    if profile.x.shape != (cfg.game.n, cfg.game.m):
        raise cfg.error(
            f"profile shape {profile.x.shape} does not match game "
            f"({cfg.game.n}, {cfg.game.m})",
            path,
        )
    return profile


@dataclass(frozen=True, slots=True)
class SolveOptions:
    profile: StrategyProfile
    players: tuple[int, ...]


def solve_options(cfg: ExperimentConfig) -> SolveOptions:
    """
    ``solve: {profile: [[...], ...], players: [...]}``. The profile defaults
    to all zeros, players to everyone.
    """
    block = cfg.block
    unknown = sorted(set(block) - {"profile", "players"})
    if unknown:
        raise cfg.error(f"unknown key(s) {unknown}", f"solve.{unknown[0]}")
    game = cfg.game
    profile = (
        _profile(block["profile"], cfg, "solve.profile")
        if "profile" in block
        else StrategyProfile.zeros(game.n, game.m)
    )
    players = block.get("players", list(range(game.n)))
    if not isinstance(players, list) or not all(
        isinstance(i, int) and 0 <= i < game.n for i in players
    ):
        raise cfg.error(f"players must be a list of indices below {game.n}", "solve.players")
    return SolveOptions(profile=profile, players=tuple(players))


def dynamics_options(
    cfg: ExperimentConfig, block: Mapping[str, Any] | None = None, where: str = "dynamics"
) -> tuple[DynamicsConfig, Any]:
    """
    Reads a dynamics block: schedule, conv_tol, max_rounds, damping and
    start (``zero``, ``random`` or an n x m matrix).

    Returns
    -------
        (DynamicsConfig, raw start value)
    """
    block = cfg.block if block is None else block
    allowed = {"schedule", "conv_tol", "max_rounds", "damping", "start"}
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise cfg.error(f"unknown key(s) {unknown}", f"{where}.{unknown[0]}")
    try:
        dyn = DynamicsConfig(
            schedule=block.get("schedule", "sequential"),
            conv_tol=float(block.get("conv_tol", 1e-8)),
            max_rounds=int(block.get("max_rounds", 10_000)),
            damping=float(block.get("damping", 1.0)),
            solver=cfg.solver,
        )
    except (TypeError, ValueError) as e:
        raise cfg.error(f"bad dynamics settings: {e}", where) from e
    return dyn, block.get("start", "zero")


def start_profile(cfg: ExperimentConfig, start: Any, seed: int) -> StrategyProfile:
    """Resolves a dynamics ``start`` value."""
    game = cfg.game
    if start == "zero":
        return StrategyProfile.zeros(game.n, game.m)
    if start == "random":
        return random_profile(np.random.default_rng(seed), game.n, game.m)
    return _profile(start, cfg, "dynamics.start")


@dataclass(frozen=True, slots=True)
class SearchOptions:
    num_starts: int
    dedup_eps: float
    gap_tol: float
    kkt_tol: float
    max_workers: int | None
    brute_force_resolution: int | None
    dynamics: DynamicsConfig


def search_options(
    cfg: ExperimentConfig, block: Mapping[str, Any] | None = None, where: str = "search"
) -> SearchOptions:
    """
    ``search: {num_starts, dedup_eps, gap_tol, kkt_tol, max_workers,
    brute_force_resolution, dynamics: {...}}``
    """
    block = cfg.block if block is None else block
    allowed = {
        "num_starts",
        "dedup_eps",
        "gap_tol",
        "kkt_tol",
        "max_workers",
        "brute_force_resolution",
        "dynamics",
    }
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise cfg.error(f"unknown key(s) {unknown}", f"{where}.{unknown[0]}")
    dyn, _ = dynamics_options(cfg, block.get("dynamics") or {}, f"{where}.dynamics")
    num_starts = block.get("num_starts", 10)
    if not isinstance(num_starts, int) or isinstance(num_starts, bool) or num_starts < 1:
        raise cfg.error("num_starts must be a positive integer", f"{where}.num_starts")
    resolution = block.get("brute_force_resolution")
    if resolution is not None and (not isinstance(resolution, int) or resolution < 1):
        raise cfg.error(
            "brute_force_resolution must be a positive integer",
            f"{where}.brute_force_resolution",
        )
    workers = block.get("max_workers")
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise cfg.error("max_workers must be a positive integer", f"{where}.max_workers")
    tolerances = {}
    for key, default in (("dedup_eps", 1e-6), ("gap_tol", 1e-6), ("kkt_tol", 1e-6)):
        value = block.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise cfg.error(f"{key} must be a positive number", f"{where}.{key}")
        tolerances[key] = float(value)
    return SearchOptions(
        num_starts=num_starts,
        max_workers=workers,
        brute_force_resolution=resolution,
        dynamics=dyn,
        **tolerances,
    )


@dataclass(frozen=True, slots=True)
class SweepOptions:
    parameter: str
    values: tuple[Any, ...]
    search: dict[str, Any]


def sweep_options(cfg: ExperimentConfig) -> SweepOptions:
    """
    ``sweep: {parameter: game.cprs.0.returns.c, values: [...], search:
    {...}}``. The parameter path must already exist in the document.
    """
    block = cfg.block
    unknown = sorted(set(block) - {"parameter", "values", "search"})
    if unknown:
        raise cfg.error(f"unknown key(s) {unknown}", f"sweep.{unknown[0]}")
    parameter = block.get("parameter")
    if not isinstance(parameter, str) or not parameter.startswith("game."):
        raise cfg.error("parameter must be a dotted path under 'game.'", "sweep.parameter")
    try:
        get_path(cfg.raw, parameter)
    except (KeyError, IndexError, TypeError) as e:
        raise cfg.error(f"parameter path {parameter!r} does not exist", "sweep.parameter") from e
    values = block.get("values")
    if not isinstance(values, list) or not values:
        raise cfg.error("values must be a non-empty list", "sweep.values")
    search = block.get("search") or {}
    if not isinstance(search, dict):
        raise cfg.error("search must be a mapping", "sweep.search")
    search_options(cfg, search, "sweep.search")
    return SweepOptions(parameter=parameter, values=tuple(values), search=search)


def validate_options(cfg: ExperimentConfig) -> int:
    """``validate: {samples: 1000}``; returns the grid size."""
    block = cfg.block if cfg.command == "validate" else {}
    samples = block.get("samples", 1000)
    if not isinstance(samples, int) or samples < 3:
        raise cfg.error("samples must be an integer >= 3", "validate.samples")
    return samples


def _step(node: Any, key: str) -> Any:
    return node[int(key)] if isinstance(node, list) else node[key]


def get_path(raw: Mapping[str, Any], path: str) -> Any:
    node: Any = raw
    for key in path.split("."):
        node = _step(node, key)
    return node


def with_path(cfg: ExperimentConfig, path: str, value: Any) -> ExperimentConfig:
    """
    A copy of `cfg` with the value at `path` replaced and the game rebuilt.
    """
    raw = copy.deepcopy(cfg.raw)
    *parents, last = path.split(".")
    node: Any = raw
    for key in parents:
        node = _step(node, key)
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value
    return process_config(raw, command=cfg.command, lines=cfg.lines)


__all__: list[str] = [
    "COMMANDS",
    "ExperimentConfig",
    "SCHEMA_VERSION",
    "SearchOptions",
    "SolveOptions",
    "SweepOptions",
    "dynamics_options",
    "get_path",
    "load_config",
    "parse_yaml",
    "process_config",
    "search_options",
    "solve_options",
    "start_profile",
    "sweep_options",
    "validate_options",
    "with_path",
]
