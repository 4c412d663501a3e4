# multicpr __init__.py
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
Welcome to multicpr!

multicpr's __init__.py. Nothing extraordinary here. We import and name the
primary API: the game records, best responses, dynamics and the GNE search.
This makes them easy to import and use, like:

```python
import multicpr as mc
game = mc.build_game(
    players=[{"a": 1.0, "k": 1.0}] * 2,
    cprs=[{"failure": {"family": "power", "q": 2},
           "returns": {"family": "constant", "c": 1.0}}],
)
gne = mc.find_gne(game, num_starts=5)
```
"""

from ._base import (
    BracketingError,
    CheckFailure,
    ConfigError,
    ContractViolation,
    CostGuardError,
    DomainError,
    GameValidationError,
    MultiCprError,
)
from .dynamics import DynamicsConfig, Trajectory, run, step
from .enum import ResponseKind, Schedule, TrajectoryStatus
from .equilibrium import (
    GneReport,
    GneSet,
    brute_force_gne,
    find_gne,
    theorem_checks,
    verify_gne,
)
from .families import ConstantReturn, ExpReturn, PowerFailure
from .model import (
    CprSpec,
    GameSpec,
    PlayerParams,
    StrategyProfile,
    Violation,
    build_game,
    effective_rate,
    effective_rate_deriv,
    utility,
    validate_assumptions,
)
from .solver import (
    BestResponse,
    SolverConfig,
    best_response,
    g_aux,
    h_aux,
    omega,
    psi,
    type1_response,
    type2_response,
)
from .utils import random_profile, to_profile

__all__: list[str] = [
    "BestResponse",
    "BracketingError",
    "CheckFailure",
    "ConfigError",
    "ConstantReturn",
    "ContractViolation",
    "CostGuardError",
    "CprSpec",
    "DomainError",
    "DynamicsConfig",
    "ExpReturn",
    "GameSpec",
    "GameValidationError",
    "GneReport",
    "GneSet",
    "MultiCprError",
    "PlayerParams",
    "PowerFailure",
    "ResponseKind",
    "Schedule",
    "SolverConfig",
    "StrategyProfile",
    "Trajectory",
    "TrajectoryStatus",
    "Violation",
    "best_response",
    "brute_force_gne",
    "build_game",
    "effective_rate",
    "effective_rate_deriv",
    "find_gne",
    "g_aux",
    "h_aux",
    "omega",
    "psi",
    "random_profile",
    "run",
    "step",
    "theorem_checks",
    "to_profile",
    "type1_response",
    "type2_response",
    "utility",
    "validate_assumptions",
    "verify_gne",
]
