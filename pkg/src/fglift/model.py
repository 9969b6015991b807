"""Immutable propositional factor graphs over finite discrete variables.

A graph is a bipartite structure of random variables and factors. Each factor
maps every joint assignment of its arguments to a strictly positive potential,
stored as a flat float64 vector in row order with the *last* argument varying
fastest (for two booleans the rows are TT, TF, FT, FF).

Everything here is validated once in :func:`build_graph` and frozen
afterwards, so graphs can be shared freely across threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    DanglingVariable,
    DuplicateName,
    IncompleteAssignment,
    MissingValue,
    NonPositivePotential,
    SchemaError,
    TableSizeMismatch,
)

#: Replacement used for zero potentials when clamping is enabled.
ZERO_CLAMP = 1e-9

#: An assignment maps variable names to value labels. It may be partial
#: (evidence) or total, depending on the operation.
Assignment = Mapping[str, str]


@dataclass(frozen=True)
class RandomVariable:
    """A named variable with an ordered range of at least two value labels."""

    name: str
    range: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.range)

    def index_of(self, value: str) -> int:
        """Position of ``value`` in the range; raises MissingValue otherwise."""
        try:
            return self.range.index(value)
        except ValueError:
            raise MissingValue(
                f"value {value!r} is not in the range of variable {self.name!r}"
            ) from None


class CompatibilitySignature(NamedTuple):
    """Structural key deciding whether two tables are comparable entry-wise.

    Two factors are comparable exactly when they have the same table
    dimension (row count) and the same multiset of argument range sizes.
    """

    dim: int
    range_sizes: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Factor:
    """A factor over an ordered, duplicate-free argument list.

    ``table`` is flat, float64 and read-only; its length equals the product
    of the argument range sizes.
    """

    name: str
    args: tuple[RandomVariable, ...]
    table: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.args)

    @property
    def dim(self) -> int:
        return int(self.table.size)

    def value_at(self, row: int) -> float:
        return float(self.table[row])


@dataclass(frozen=True, eq=False)
class FactorGraph:
    """Validated bipartite model; construct via :func:`build_graph`."""

    variables: tuple[RandomVariable, ...]
    factors: tuple[Factor, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_var_by_name", {v.name: v for v in self.variables}
        )
        object.__setattr__(
            self, "_factor_by_name", {f.name: f for f in self.factors}
        )

    @property
    def m(self) -> int:
        """Number of factors."""
        return len(self.factors)

    @property
    def n(self) -> int:
        """Number of variables."""
        return len(self.variables)

    def variable(self, name: str) -> RandomVariable:
        try:
            return self._var_by_name[name]  # type: ignore[attr-defined]
        except KeyError:
            raise MissingValue(f"unknown variable {name!r}") from None

    def factor(self, name: str) -> Factor:
        try:
            return self._factor_by_name[name]  # type: ignore[attr-defined]
        except KeyError:
            raise MissingValue(f"unknown factor {name!r}") from None

    def has_variable(self, name: str) -> bool:
        return name in self._var_by_name  # type: ignore[attr-defined]

    def edges(self) -> Iterator[tuple[str, str]]:
        """Implied bipartite edges as (variable name, factor name) pairs."""
        for f in self.factors:
            for v in f.args:
                yield (v.name, f.name)


def _as_table(name: str, values: Sequence[float], clamp_zeros: bool) -> np.ndarray:
    table = np.asarray(values, dtype=np.float64).reshape(-1).copy()
    if clamp_zeros:
        zero = table == 0.0
        if zero.any():
            warnings.warn(
                f"factor {name!r}: {int(zero.sum())} zero potential(s) "
                f"clamped to {ZERO_CLAMP}",
                stacklevel=3,
            )
            table[zero] = ZERO_CLAMP
    if not (table > 0.0).all():
        bad = int(np.argmin(table > 0.0))
        raise NonPositivePotential(
            f"factor {name!r}: non-positive potential {table[bad]!r} at row {bad}"
        )
    table.setflags(write=False)
    return table


def build_graph(
    variables: Sequence[RandomVariable],
    factors: Sequence[tuple[str, Sequence[str], Sequence[float]]] | Sequence[Factor],
    *,
    clamp_zeros: bool = False,
) -> FactorGraph:
    """Validate and freeze a factor graph.

    ``factors`` entries are either ready ``Factor`` objects or
    ``(name, arg names, flat table)`` triples; triples are resolved against
    ``variables``. With ``clamp_zeros`` enabled, exact zeros in tables are
    replaced by ``ZERO_CLAMP`` and a warning is emitted; negative entries are
    always rejected.
    """
    seen_vars: dict[str, RandomVariable] = {}
    for v in variables:
        if v.name in seen_vars:
            raise DuplicateName(f"duplicate variable name {v.name!r}")
        if v.size < 2:
            raise SchemaError(
                f"variable {v.name!r}: range must have at least 2 values"
            )
        if len(set(v.range)) != v.size:
            raise SchemaError(f"variable {v.name!r}: range labels must be unique")
        seen_vars[v.name] = v

    resolved: list[Factor] = []
    seen_factors: set[str] = set()
    for item in factors:
        if isinstance(item, Factor):
            name, arg_names, raw = (
                item.name,
                [a.name for a in item.args],
                item.table,
            )
        else:
            name, arg_names, raw = item
        if name in seen_factors:
            raise DuplicateName(f"duplicate factor name {name!r}")
        seen_factors.add(name)
        if not arg_names:
            raise SchemaError(f"factor {name!r}: argument list is empty")
        if len(set(arg_names)) != len(arg_names):
            raise DuplicateName(f"factor {name!r}: repeated argument")
        args = []
        for a in arg_names:
            if a not in seen_vars:
                raise SchemaError(f"factor {name!r}: unknown argument {a!r}")
            args.append(seen_vars[a])
        table = _as_table(name, raw, clamp_zeros)
        expected = int(np.prod([v.size for v in args]))
        if table.size != expected:
            raise TableSizeMismatch(
                f"factor {name!r}: table has {table.size} entries, "
                f"expected {expected}"
            )
        resolved.append(Factor(name, tuple(args), table))

    used = {a.name for f in resolved for a in f.args}
    for v in variables:
        if v.name not in used:
            raise DanglingVariable(
                f"variable {v.name!r} is referenced by no factor"
            )

    return FactorGraph(tuple(seen_vars.values()), tuple(resolved))


def row_index(f: Factor, r: Assignment) -> int:
    """Mixed-radix row of ``r`` in ``f``'s table, last argument fastest."""
    idx = 0
    for var in f.args:
        if var.name not in r:
            raise MissingValue(
                f"assignment lacks variable {var.name!r} required by "
                f"factor {f.name!r}"
            )
        idx = idx * var.size + var.index_of(r[var.name])
    return idx


def row_assignment(f: Factor, row: int) -> dict[str, str]:
    """Inverse of :func:`row_index`: the assignment stored at ``row``."""
    if not 0 <= row < f.dim:
        raise MissingValue(f"row {row} outside table of factor {f.name!r}")
    out: dict[str, str] = {}
    for var in reversed(f.args):
        row, pos = divmod(row, var.size)
        out[var.name] = var.range[pos]
    return out


def joint_potential(g: FactorGraph, r: Assignment) -> float:
    """Product of all factor potentials under the total assignment ``r``."""
    for v in g.variables:
        if v.name not in r:
            raise IncompleteAssignment(
                f"assignment lacks variable {v.name!r}"
            )
    out = 1.0
    for f in g.factors:
        out *= f.value_at(row_index(f, r))
    return out


def signature(f: Factor) -> CompatibilitySignature:
    """Table dimension plus sorted multiset of argument range sizes."""
    return CompatibilitySignature(f.dim, tuple(sorted(f.shape)))
