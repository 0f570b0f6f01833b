"""Monotone age-cost functions ``g(A)`` with a saturation cap.

Every cost function is evaluated on integer ages through a lazily grown lookup
table, which keeps the per-slot cost of evaluating ``g`` to a list index.
"""

from __future__ import annotations

import math

DEFAULT_CAP = 1e9


class CostFunction:
    """Base class. Subclasses implement :meth:`raw`; the cap is applied here."""

    kind = "custom"

    def __init__(self, cap: float = DEFAULT_CAP):
        if not cap > 0:
            raise ValueError("cost cap must be positive")
        self.cap = float(cap)
        self._table: list[float] = []

    def raw(self, age: float) -> float:
        raise NotImplementedError

    def _value(self, age):
        if age == math.inf:
            return self.cap
        v = self.raw(age)
        return v if v < self.cap else self.cap

    def __call__(self, age):
        table = self._table
        try:
            return table[age]
        except (IndexError, TypeError):
            pass
        if not isinstance(age, int) or age < 0:
            return self._value(age)
        n = max(2 * len(table), age + 1, 64)
        table.extend(self._value(a) for a in range(len(table), n))
        return table[age]

    def params(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        d = {"kind": self.kind, **self.params()}
        if self.cap != DEFAULT_CAP:
            d["cap"] = self.cap
        return d

    def check_monotone(self, max_age: int = 200) -> bool:
        vals = [self(a) for a in range(1, max_age + 1)]
        return vals[0] >= 0 and all(b >= a for a, b in zip(vals, vals[1:]))

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((type(self).__name__, repr(sorted(self.to_dict().items()))))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class Linear(CostFunction):
    kind = "linear"

    def __init__(self, weight: float = 1.0, cap: float = DEFAULT_CAP):
        super().__init__(cap)
        self.weight = float(weight)

    def raw(self, age):
        return self.weight * age

    def params(self):
        return {"weight": self.weight}


class Power(CostFunction):
    kind = "power"

    def __init__(self, exponent: float, scale: float = 1.0, cap: float = DEFAULT_CAP):
        super().__init__(cap)
        self.exponent = float(exponent)
        self.scale = float(scale)

    def raw(self, age):
        return self.scale * float(age) ** self.exponent

    def params(self):
        return {"exponent": self.exponent, "scale": self.scale}


class Exponential(CostFunction):
    """``scale * base**A``; overflow saturates at the cap."""

    kind = "exponential"

    def __init__(self, scale: float = 1.0, base: float = math.e, cap: float = DEFAULT_CAP):
        super().__init__(cap)
        self.scale = float(scale)
        self.base = float(base)

    def raw(self, age):
        try:
            return self.scale * math.exp(age * math.log(self.base))
        except OverflowError:
            return math.inf

    def params(self):
        return {"scale": self.scale, "base": self.base}


class Indicator(CostFunction):
    """``1{A >= threshold}``, e.g. to express a violation-probability target."""

    kind = "indicator"

    def __init__(self, threshold: int, cap: float = DEFAULT_CAP):
        super().__init__(cap)
        self.threshold = threshold

    def raw(self, age):
        return 1.0 if age >= self.threshold else 0.0

    def params(self):
        return {"threshold": self.threshold}


class Table(CostFunction):
    """Explicit values ``g(1), g(2), ...``; held at the last value afterwards."""

    kind = "table"

    def __init__(self, values, cap: float = DEFAULT_CAP):
        super().__init__(cap)
        if len(values) == 0:
            raise ValueError("table cost needs at least one value")
        self.values = [float(v) for v in values]
        if any(b < a for a, b in zip(self.values, self.values[1:])) or self.values[0] < 0:
            raise ValueError("table cost must be nonnegative and nondecreasing")

    def raw(self, age):
        if age <= 1:
            return self.values[0]
        if age == math.inf or age > len(self.values):
            return self.values[-1]
        return self.values[int(age) - 1]

    def params(self):
        return {"values": self.values}


_KINDS = {c.kind: c for c in (Linear, Power, Exponential, Indicator, Table)}


def cost_from_dict(d: dict) -> CostFunction:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _KINDS:
        raise ValueError(f"unknown cost kind {kind!r}; expected one of {sorted(_KINDS)}")
    return _KINDS[kind](**d)


def mixed_cost_functions(cap: float = DEFAULT_CAP) -> list[CostFunction]:
    """The four cost shapes 15A, e^A, A^2, A^3 used in the single-hop study."""
    return [Linear(15.0, cap), Exponential(cap=cap), Power(2, cap=cap), Power(3, cap=cap)]
