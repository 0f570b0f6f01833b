import math

import pytest

from mhaoi.costs import (
    DEFAULT_CAP,
    Exponential,
    Indicator,
    Linear,
    Power,
    Table,
    cost_from_dict,
    mixed_cost_functions,
)


def test_linear_and_power_values():
    assert Linear(15)(3) == 45
    assert Power(2)(4) == 16
    assert Power(3, scale=0.5)(2) == 4


def test_exponential_saturates_at_cap():
    g = Exponential(cap=1e6)
    assert g(2) == pytest.approx(math.e ** 2)
    assert g(100) == 1e6
    assert g(10**6) == 1e6


def test_infinite_age_maps_to_cap():
    assert Linear(1)(math.inf) == DEFAULT_CAP
    assert Power(2, cap=50)(math.inf) == 50


def test_indicator_threshold():
    g = Indicator(3)
    assert [g(a) for a in (1, 2, 3, 4)] == [0, 0, 1, 1]


def test_table_holds_last_value():
    g = Table([1, 2, 5])
    assert [g(a) for a in (1, 2, 3, 4, 10)] == [1, 2, 5, 5, 5]


def test_table_rejects_decreasing_values():
    with pytest.raises(ValueError):
        Table([3, 1])


def test_round_trip_through_dict():
    for g in mixed_cost_functions() + [Indicator(4), Table([0, 1, 1, 2])]:
        h = cost_from_dict(g.to_dict())
        assert h == g
        assert [h(a) for a in range(1, 40)] == [g(a) for a in range(1, 40)]


def test_unknown_kind():
    with pytest.raises(ValueError, match="unknown cost kind"):
        cost_from_dict({"kind": "cubic"})


def test_mixed_cost_functions_are_monotone():
    assert all(g.check_monotone() for g in mixed_cost_functions())
    assert [repr(g) for g in mixed_cost_functions()][0] == "Linear(weight=15.0)"
