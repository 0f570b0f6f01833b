"""Scheduling policies and a name-based registry used by configs and the CLI."""

from __future__ import annotations

from .age_debt import AgeDebtPolicy, DebtParams
from .age_difference import AgeDifferencePolicy
from .baselines import FixedActionPolicy, MaxWeightPolicy, RoundRobinPolicy, TablePolicy
from .stationary import StationaryRandomizedPolicy


class UnknownPolicyError(ValueError):
    pass


def _age_debt(params: dict) -> AgeDebtPolicy:
    p = dict(params)
    opts = {k: p.pop(k) for k in ("intermediate_queues", "rule", "tie_break") if k in p}
    if "intermediate_queues" in opts:
        opts["intermediate"] = opts.pop("intermediate_queues")
    return AgeDebtPolicy(DebtParams(**p), **opts)


POLICIES = {
    "age_debt": _age_debt,
    "age_difference": lambda p: AgeDifferencePolicy(**p),
    "max_weight": lambda p: MaxWeightPolicy(**p),
    "round_robin": lambda p: RoundRobinPolicy(**p),
    "stationary_randomized": lambda p: StationaryRandomizedPolicy(**p),
}


def available_policies() -> list[str]:
    return sorted(POLICIES)


def make_policy(name: str, params: dict | None = None):
    """Build a fresh policy from its registry name and keyword parameters."""
    try:
        factory = POLICIES[name]
    except KeyError:
        raise UnknownPolicyError(
            f"unknown policy {name!r}; available: {', '.join(available_policies())}") from None
    return factory(dict(params or {}))


__all__ = [
    "AgeDebtPolicy", "AgeDifferencePolicy", "DebtParams", "FixedActionPolicy", "MaxWeightPolicy",
    "POLICIES", "RoundRobinPolicy", "StationaryRandomizedPolicy", "TablePolicy", "UnknownPolicyError",
    "available_policies", "make_policy",
]
