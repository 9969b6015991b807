from __future__ import annotations

import itertools

import numpy as np
import pytest

from fglift import (
    CompatibilitySignature,
    RandomVariable,
    build_graph,
    joint_potential,
    row_assignment,
    row_index,
    signature,
)
from fglift.errors import (
    DanglingVariable,
    DuplicateName,
    IncompleteAssignment,
    MissingValue,
    NonPositivePotential,
    SchemaError,
    TableSizeMismatch,
)

from conftest import BOOL, random_graph
from oracles import per_factor_lookup


class TestBuildGraph:
    def test_fig1_shape(self, fig1):
        assert fig1.m == 2
        assert set(fig1.edges()) == {
            ("A", "phi1"),
            ("B", "phi1"),
            ("B", "phi2"),
            ("C", "phi2"),
        }

    def test_minimal_graph(self):
        g = build_graph(
            [RandomVariable("X", BOOL)], [("phi", ["X"], [1.0, 1.0])]
        )
        assert g.m == 1

    def test_zero_potential_rejected(self):
        with pytest.raises(NonPositivePotential):
            build_graph(
                [RandomVariable("X", BOOL)], [("phi", ["X"], [1.0, 0.0])]
            )

    def test_zero_potential_clamped_with_warning(self):
        with pytest.warns(UserWarning, match="clamped"):
            g = build_graph(
                [RandomVariable("X", BOOL)],
                [("phi", ["X"], [1.0, 0.0])],
                clamp_zeros=True,
            )
        assert g.factor("phi").table[1] == 1e-9

    def test_negative_potential_never_clamped(self):
        with pytest.raises(NonPositivePotential):
            build_graph(
                [RandomVariable("X", BOOL)],
                [("phi", ["X"], [1.0, -0.5])],
                clamp_zeros=True,
            )

    def test_duplicate_names(self):
        with pytest.raises(DuplicateName):
            build_graph(
                [RandomVariable("X", BOOL), RandomVariable("X", BOOL)],
                [("phi", ["X"], [1, 1])],
            )
        with pytest.raises(DuplicateName):
            build_graph(
                [RandomVariable("X", BOOL)],
                [("phi", ["X"], [1, 1]), ("phi", ["X"], [1, 1])],
            )
        with pytest.raises(DuplicateName):
            build_graph(
                [RandomVariable("X", BOOL)], [("phi", ["X", "X"], [1, 1, 1, 1])]
            )

    def test_table_size_mismatch(self):
        with pytest.raises(TableSizeMismatch, match="phi"):
            build_graph(
                [RandomVariable("X", BOOL)], [("phi", ["X"], [1, 1, 1])]
            )

    def test_dangling_variable(self):
        with pytest.raises(DanglingVariable, match="Y"):
            build_graph(
                [RandomVariable("X", BOOL), RandomVariable("Y", BOOL)],
                [("phi", ["X"], [1, 1])],
            )

    def test_unknown_argument(self):
        with pytest.raises(SchemaError, match="phi"):
            build_graph([RandomVariable("X", BOOL)], [("phi", ["Z"], [1, 1])])

    def test_bad_ranges(self):
        with pytest.raises(SchemaError):
            build_graph(
                [RandomVariable("X", ("only",))], [("phi", ["X"], [1.0])]
            )
        with pytest.raises(SchemaError):
            build_graph(
                [RandomVariable("X", ("a", "a"))], [("phi", ["X"], [1, 1])]
            )

    def test_tables_are_read_only(self, fig1):
        with pytest.raises(ValueError):
            fig1.factor("phi1").table[0] = 5.0


class TestRowIndex:
    def test_boolean_pair(self, fig1):
        f = fig1.factor("phi1")
        assert row_index(f, {"A": "true", "B": "false"}) == 1
        assert row_index(f, {"A": "true", "B": "true"}) == 0
        assert row_index(f, {"A": "false", "B": "true"}) == 2
        assert row_index(f, {"A": "false", "B": "false"}) == 3

    def test_all_first_values_is_zero(self, rng):
        g = random_graph(rng)
        r = {v.name: v.range[0] for v in g.variables}
        for f in g.factors:
            assert row_index(f, r) == 0

    def test_ternary_binary(self):
        g = build_graph(
            [
                RandomVariable("T", ("t0", "t1", "t2")),
                RandomVariable("B", ("b0", "b1")),
            ],
            [("phi", ["T", "B"], list(range(1, 7)))],
        )
        # mixed-radix enumeration oracle: row order is the nested product
        # with the last argument fastest
        f = g.factor("phi")
        expected = list(
            itertools.product(("t0", "t1", "t2"), ("b0", "b1"))
        )
        for k, (tv, bv) in enumerate(expected):
            assert row_index(f, {"T": tv, "B": bv}) == k
        assert row_index(f, {"T": "t2", "B": "b1"}) == 2 * 2 + 1

    def test_missing_value(self, fig1):
        f = fig1.factor("phi1")
        with pytest.raises(MissingValue):
            row_index(f, {"A": "true"})
        with pytest.raises(MissingValue):
            row_index(f, {"A": "true", "B": "maybe"})

    def test_row_assignment_roundtrip(self, rng):
        g = random_graph(rng, n_vars=5, n_factors=3)
        for f in g.factors:
            seen = set()
            for k in range(f.dim):
                r = row_assignment(f, k)
                assert row_index(f, r) == k
                seen.add(tuple(sorted(r.items())))
            assert len(seen) == f.dim
        with pytest.raises(MissingValue):
            row_assignment(g.factors[0], g.factors[0].dim)


class TestJointPotential:
    def test_fig1_all_true(self, fig1):
        r = {"A": "true", "B": "true", "C": "true"}
        t = fig1.factor("phi1").table
        assert joint_potential(fig1, r) == t[0] * t[0]

    def test_single_factor_rows(self):
        g = build_graph(
            [RandomVariable("X", ("a", "b", "c"))],
            [("phi", ["X"], [2.0, 5.0, 7.0])],
        )
        f = g.factor("phi")
        for k, v in enumerate(("a", "b", "c")):
            assert joint_potential(g, {"X": v}) == f.table[k]

    def test_matches_per_factor_lookup_oracle(self, rng):
        for _ in range(20):
            g = random_graph(rng, n_vars=5, n_factors=3)
            r = {v.name: v.range[rng.integers(v.size)] for v in g.variables}
            assert joint_potential(g, r) == per_factor_lookup(g, r)
            assert joint_potential(g, r) > 0.0

    def test_incomplete_assignment(self, fig1):
        with pytest.raises(IncompleteAssignment):
            joint_potential(fig1, {"A": "true", "B": "true"})


class TestSignature:
    def test_boolean_pair(self, fig1):
        assert signature(fig1.factor("phi1")) == CompatibilitySignature(4, (2, 2))

    def test_unary_ternary(self):
        g = build_graph(
            [RandomVariable("X", ("a", "b", "c"))], [("phi", ["X"], [1, 1, 1])]
        )
        assert signature(g.factor("phi")) == CompatibilitySignature(3, (3,))

    def test_multiset_ignores_argument_order(self):
        g = build_graph(
            [
                RandomVariable("A", BOOL),
                RandomVariable("B", ("x", "y", "z")),
                RandomVariable("C", ("x", "y", "z")),
                RandomVariable("D", BOOL),
            ],
            [
                ("f1", ["A", "B"], [1] * 6),
                ("f2", ["C", "D"], [1] * 6),
            ],
        )
        s1 = signature(g.factor("f1"))
        s2 = signature(g.factor("f2"))
        assert s1 == s2 == CompatibilitySignature(6, (2, 3))


def test_table_length_always_product_of_ranges(rng):
    for _ in range(10):
        g = random_graph(rng)
        for f in g.factors:
            assert f.dim == int(np.prod(f.shape))
