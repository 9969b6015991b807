"""Seedable planted-model generator for experiments and property tests.

Models are built from ``num_groups`` groups of ``factors_per_group`` factors
each. Every group draws one base table; each member copies it with every
entry scaled by an independent factor from [1 - noise, 1 + noise]. Group g's
base entries live in ``base_range`` scaled by ``((1 + group_gap) * hi/lo)^g``,
which keeps every cross-group entry ratio at least ``1 + group_gap``; with
noise well below the gap, all intra-group distances stay strictly below all
cross-group distances and the planted grouping is recoverable from the
distance matrix alone.

All variables are boolean, so a table of ``table_dim`` rows (a power of two)
spans ``log2(table_dim)`` arguments. Topologies:

- ``star``: one shared hub variable in the last argument slot, all other
  arguments are private leaf variables (the liftable pattern),
- ``chain``: factor k spans the consecutive variable window k .. k+a-1,
- ``random-bipartite``: each factor draws its arguments from a fixed pool.

Randomness comes from ``numpy.random.default_rng`` (PCG64); one seed fixes
the model byte-for-byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import FactorGraph, RandomVariable, build_graph

TOPOLOGIES = ("star", "chain", "random-bipartite")
BOOL_RANGE = ("true", "false")


@dataclass(frozen=True)
class PlantedSpec:
    """Parameters of one planted model.

    ``noise`` must stay in [0, 0.5) so potentials remain positive;
    ``num_variables`` caps the variable pool of the random-bipartite
    topology (a heuristic pool is used when it is None).
    """

    seed: int
    num_groups: int = 3
    factors_per_group: int = 4
    table_dim: int = 4
    base_range: tuple[float, float] = (1.0, 1.2)
    noise: float = 0.01
    topology: str = "star"
    group_gap: float = 0.5
    num_variables: int | None = None

    def __post_init__(self) -> None:
        if self.num_groups < 1 or self.factors_per_group < 1:
            raise ValueError("need at least one group and one factor per group")
        if not (self.table_dim >= 2 and self.table_dim & (self.table_dim - 1) == 0):
            raise ValueError("table_dim must be a power of two, at least 2")
        lo, hi = self.base_range
        if not 0.0 < lo <= hi:
            raise ValueError("base_range must satisfy 0 < lo <= hi")
        if not 0.0 <= self.noise < 0.5:
            raise ValueError("noise must lie in [0, 0.5)")
        if self.group_gap < 0.0:
            raise ValueError("group_gap must be non-negative")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}")

    @property
    def m(self) -> int:
        return self.num_groups * self.factors_per_group

    @property
    def args_per_factor(self) -> int:
        return int(math.log2(self.table_dim))


def planted_model(spec: PlantedSpec) -> tuple[FactorGraph, tuple[tuple[str, ...], ...]]:
    """Generate the model plus the planted grouping (tuples of factor names)."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.base_range
    scale_step = (1.0 + spec.group_gap) * hi / lo

    tables = []
    truth: list[tuple[str, ...]] = []
    for grp in range(spec.num_groups):
        base = rng.uniform(lo, hi, spec.table_dim) * scale_step**grp
        names = []
        for member in range(spec.factors_per_group):
            wiggle = rng.uniform(1.0 - spec.noise, 1.0 + spec.noise, spec.table_dim)
            tables.append(base * wiggle)
            names.append(f"f{grp * spec.factors_per_group + member + 1}")
        truth.append(tuple(names))

    a = spec.args_per_factor
    m = spec.m
    variables: list[RandomVariable] = []
    arg_lists: list[list[str]] = []

    def boolean(name: str) -> str:
        variables.append(RandomVariable(name, BOOL_RANGE))
        return name

    if spec.topology == "star":
        hub = boolean("Q")
        for k in range(m):
            leaves = [boolean(f"L{k + 1}_{p + 1}") for p in range(a - 1)]
            arg_lists.append(leaves + [hub])
    elif spec.topology == "chain":
        names = [boolean(f"V{p + 1}") for p in range(m + a - 1)]
        for k in range(m):
            arg_lists.append(names[k : k + a])
    else:
        pool_size = spec.num_variables or max(a + 1, math.ceil(m * a / 2))
        if pool_size < a:
            raise ValueError(
                f"variable pool {pool_size} too small for {a} arguments"
            )
        names = [boolean(f"V{p + 1}") for p in range(pool_size)]
        arg_lists = [
            list(rng.choice(pool_size, size=a, replace=False))
            for _ in range(m)
        ]
        arg_lists = [[names[p] for p in picks] for picks in arg_lists]
        # Re-draw is not needed for coverage: unused pool variables are
        # dropped so the graph stays valid.
        used = {nm for picks in arg_lists for nm in picks}
        variables = [v for v in variables if v.name in used]

    factor_names = [name for grp in truth for name in grp]
    factors = [
        (factor_names[k], arg_lists[k], tables[k]) for k in range(m)
    ]
    return build_graph(variables, factors), tuple(truth)
