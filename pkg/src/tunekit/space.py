"""Mixed-variable search spaces: validation, unit-scale encoding, and distance.

A search space is an ordered list of variables (continuous, integer, or
categorical). Points are value tuples aligned with that order. All search
logic operates on the encoded representation: continuous and integer channels
scaled to [0, 1], categorical channels carrying the level index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Value = Union[float, int, str]


class ArityMismatchError(ValueError):
    """Point value count does not match the space's variable count."""


class InvalidPointError(ValueError):
    """Point violates bounds or level sets of its space."""


@dataclass(frozen=True)
class ContinuousVariable:
    name: str
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"continuous variable {self.name!r}: need lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class IntegerVariable:
    name: str
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValueError(f"integer variable {self.name!r}: need lo <= hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class CategoricalVariable:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.levels) < 1:
            raise ValueError(f"categorical variable {self.name!r}: needs at least one level")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError(f"categorical variable {self.name!r}: levels must be distinct")


VariableSpec = Union[ContinuousVariable, IntegerVariable, CategoricalVariable]


def _native(value: Value) -> Value:
    """Numpy scalars from sampler/solver arithmetic become builtin types so
    point values serialize cleanly."""
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


@dataclass(frozen=True)
class Point:
    """A candidate assignment; values aligned with the space's variable order."""

    values: tuple[Value, ...]

    def __init__(self, values: Iterable[Value]):
        object.__setattr__(self, "values", tuple(_native(v) for v in values))


@dataclass(frozen=True)
class SearchSpace:
    variables: tuple[VariableSpec, ...]

    def __init__(self, variables: Iterable[VariableSpec]):
        variables = tuple(variables)
        if not variables:
            raise ValueError("search space needs at least one variable")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be unique, got {names}")
        object.__setattr__(self, "variables", variables)

    def __len__(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(name)

    @property
    def numeric_indices(self) -> list[int]:
        """Channels that live on the [0, 1] scale (continuous and integer)."""
        return [i for i, v in enumerate(self.variables) if not isinstance(v, CategoricalVariable)]

    @property
    def continuous_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if isinstance(v, ContinuousVariable)]

    @property
    def integer_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if isinstance(v, IntegerVariable)]

    @property
    def categorical_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if isinstance(v, CategoricalVariable)]

    def point(self, values: Mapping[str, Value] | Sequence[Value]) -> Point:
        """Build a Point from a name->value mapping or an ordered sequence."""
        if isinstance(values, Mapping):
            missing = [v.name for v in self.variables if v.name not in values]
            if missing:
                raise KeyError(f"missing values for {missing}")
            return Point(values[v.name] for v in self.variables)
        return Point(values)

    def to_dict(self, p: Point) -> dict[str, Value]:
        if len(p.values) != len(self.variables):
            raise ArityMismatchError(f"point has {len(p.values)} values for {len(self.variables)} variables")
        return {v.name: x for v, x in zip(self.variables, p.values)}


def validate_point(space: SearchSpace, p: Point) -> list[str]:
    """Return the list of violated bounds/levels; the point is valid iff empty.

    Raises ArityMismatchError when the value count does not match the space
    (that is a usage error, not a verdict).
    """
    if len(p.values) != len(space.variables):
        raise ArityMismatchError(
            f"point has {len(p.values)} values for {len(space.variables)} variables"
        )
    violations: list[str] = []
    for var, value in zip(space.variables, p.values):
        if isinstance(var, ContinuousVariable):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                violations.append(f"{var.name}: expected a real value, got {value!r}")
            elif not (var.lo <= value <= var.hi):
                violations.append(f"{var.name}: {value!r} outside [{var.lo}, {var.hi}]")
        elif isinstance(var, IntegerVariable):
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                violations.append(f"{var.name}: expected an integer, got {value!r}")
            elif not (var.lo <= value <= var.hi):
                violations.append(f"{var.name}: {value!r} outside [{var.lo}, {var.hi}]")
        else:
            if value not in var.levels:
                violations.append(f"{var.name}: unknown level {value!r}")
    return violations


def is_valid(space: SearchSpace, p: Point) -> bool:
    return not validate_point(space, p)


def encode(space: SearchSpace, p: Point) -> np.ndarray:
    """Map a valid point to encoded coordinates.

    Continuous/integer values are scaled to [0, 1] over their bounds (a
    degenerate integer range encodes to 0); categorical values carry their
    level index.
    """
    violations = validate_point(space, p)
    if violations:
        raise InvalidPointError("; ".join(violations))
    coords = np.empty(len(space.variables), dtype=float)
    for i, (var, value) in enumerate(zip(space.variables, p.values)):
        if isinstance(var, ContinuousVariable):
            coords[i] = (float(value) - var.lo) / (var.hi - var.lo)
        elif isinstance(var, IntegerVariable):
            coords[i] = 0.0 if var.hi == var.lo else (int(value) - var.lo) / (var.hi - var.lo)
        else:
            coords[i] = float(var.levels.index(value))
    return coords


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def decode(space: SearchSpace, coords: Sequence[float]) -> Point:
    """Inverse of encode with snapping: clip continuous channels, round-half-up
    then clip integer and categorical channels. Always returns a valid point."""
    if len(coords) != len(space.variables):
        raise ArityMismatchError(
            f"coordinate vector has {len(coords)} channels for {len(space.variables)} variables"
        )
    values: list[Value] = []
    for var, c in zip(space.variables, coords):
        c = float(c)
        if isinstance(var, ContinuousVariable):
            values.append(min(max(var.lo + c * (var.hi - var.lo), var.lo), var.hi))
        elif isinstance(var, IntegerVariable):
            if var.hi == var.lo:
                values.append(var.lo)
            else:
                k = _round_half_up(var.lo + c * (var.hi - var.lo))
                values.append(min(max(k, var.lo), var.hi))
        else:
            idx = min(max(_round_half_up(c), 0), len(var.levels) - 1)
            values.append(var.levels[idx])
    return Point(values)


def distance(space: SearchSpace, a: Point, b: Point) -> float:
    """Mixed-variable metric: Euclidean on encoded numeric channels plus a 0/1
    mismatch indicator per categorical channel."""
    ea, eb = encode(space, a), encode(space, b)
    total = 0.0
    for i, var in enumerate(space.variables):
        if isinstance(var, CategoricalVariable):
            total += 0.0 if ea[i] == eb[i] else 1.0
        else:
            total += (ea[i] - eb[i]) ** 2
    return math.sqrt(total)


def encoded_distance(space: SearchSpace, ea: np.ndarray, eb: np.ndarray) -> float:
    """Same metric as distance(), computed directly on encoded vectors."""
    total = 0.0
    for i in space.numeric_indices:
        total += (ea[i] - eb[i]) ** 2
    for i in space.categorical_indices:
        total += 0.0 if ea[i] == eb[i] else 1.0
    return math.sqrt(total)
