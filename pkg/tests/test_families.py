from __future__ import annotations

import math

import numpy as np
import pytest

from multicpr._base import GameValidationError
from multicpr.families import (
    ConstantReturn,
    ExpReturn,
    PowerFailure,
    failure_from_dict,
    return_from_dict,
)


def test_power_failure():
    p = PowerFailure(q=2)
    assert p.value(0.5) == 0.25
    assert p.value(1.5) == 1.0
    assert p.deriv(0.5) == 1.0
    assert p.deriv(0.5, order=2) == 2.0
    assert np.allclose(p.deriv(np.array([1.0, 1.2])), 0.0)
    assert PowerFailure(q=1).deriv(0.3, order=2) == 0.0


def test_returns():
    assert ConstantReturn(c=3).value(0.7) == 4.0
    assert np.allclose(ConstantReturn(c=3).value(np.zeros(3)), 4.0)
    r = ExpReturn()
    assert r.value(1.0) == pytest.approx(1.0)
    assert r.value(0.0) == pytest.approx(2.0 - math.exp(-1.0))
    assert r.deriv(0.5) == pytest.approx(-math.exp(-0.5))
    assert r.deriv(1.0) == 0.0


def test_families_from_dicts():
    assert failure_from_dict({"family": "Power", "q": 3}) == PowerFailure(q=3)
    assert return_from_dict({"family": "exp"}) == ExpReturn()
    assert return_from_dict(ConstantReturn(c=2).to_dict()) == ConstantReturn(c=2)
    with pytest.raises(GameValidationError) as info:
        return_from_dict({"family": "constant", "c": -1}, where="cprs[2].returns")
    assert info.value.field == "cprs[2].returns.c"
    with pytest.raises(GameValidationError):
        failure_from_dict({"family": "power"})
    with pytest.raises(GameValidationError):
        return_from_dict({"c": 1})
