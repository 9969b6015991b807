from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fglift import RandomVariable, build_graph

BOOL = ("true", "false")


def make_fig1(table=(2.0, 1.0, 3.0, 4.0)):
    """Three booleans A, B, C; phi1(A, B) and phi2(C, B) share one table."""
    return build_graph(
        [
            RandomVariable("A", BOOL),
            RandomVariable("B", BOOL),
            RandomVariable("C", BOOL),
        ],
        [
            ("phi1", ["A", "B"], list(table)),
            ("phi2", ["C", "B"], list(table)),
        ],
    )


def random_graph(rng: np.random.Generator, n_vars=6, n_factors=4, max_arity=3):
    """Random connected-enough graph with positive tables, arities <= 3."""
    names = [f"V{k}" for k in range(n_vars)]
    sizes = rng.integers(2, 4, size=n_vars)
    variables = [
        RandomVariable(nm, tuple(f"v{p}" for p in range(sz)))
        for nm, sz in zip(names, sizes)
    ]
    factors = []
    used: set[str] = set()
    for k in range(n_factors):
        arity = int(rng.integers(1, max_arity + 1))
        picks = rng.choice(n_vars, size=min(arity, n_vars), replace=False)
        args = [names[p] for p in picks]
        used.update(args)
        dim = int(np.prod([sizes[p] for p in picks]))
        factors.append((f"f{k}", args, np.exp(rng.uniform(-2, 2, dim))))
    # route leftover variables into one extra factor so none dangle
    leftover = [nm for nm in names if nm not in used]
    for pos, nm in enumerate(leftover):
        sz = sizes[names.index(nm)]
        factors.append((f"pad{pos}", [nm], np.exp(rng.uniform(-2, 2, sz))))
    return build_graph(variables, factors)


@pytest.fixture
def fig1():
    return make_fig1()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
