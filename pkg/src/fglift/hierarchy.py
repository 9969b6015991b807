"""Complete-linkage merge ordering over a pairwise distance matrix.

Starting from singletons, the two active groups with the smallest pairwise
distance are merged repeatedly. After merging rows i < j, row i's distances
are replaced by the entry-wise maximum of rows i and j and row j is
deactivated, so a recorded merge distance is always the *largest* pairwise
distance inside the new group (complete linkage). The recorded distances
form a non-decreasing ladder eps_1 <= eps_2 <= ... and every prefix of the
merge sequence induces a partition of the factors, nested across levels.

Groups whose factors are structurally incomparable have distance +inf and
are never merged; the result is then a forest and the ladder is shorter than
m - 1. Ties in the arg-min are broken towards the lexicographically smallest
index pair under exact float comparison, which makes the ordering fully
deterministic.

Merged nodes are numbered m + 1, m + 2, ... in merge order (1-based, after
the m leaves) in the serialised nested-list form, mirroring the convention
used by the level selector downstream.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import LevelOutOfRange, SchemaError
from .metric import DistanceMatrix


@dataclass(frozen=True)
class Merge:
    """One merge step: active representatives ``i < j`` (0-based) at ``eps``.

    ``node_id`` is the 1-based identifier ``m + level`` of the new internal
    node; the representative of the merged group is ``i``, which is always
    the smallest leaf index of the group.
    """

    i: int
    j: int
    eps: float
    node_id: int


@dataclass(frozen=True)
class MergeTree:
    """Ordered merge sequence over ``m`` leaves; a forest when merges stop early."""

    m: int
    merges: tuple[Merge, ...]

    @property
    def num_levels(self) -> int:
        return len(self.merges)

    @property
    def epsilons(self) -> tuple[float, ...]:
        """The merge-distance ladder, one value per level."""
        return tuple(mg.eps for mg in self.merges)

    def leaf_sets(self) -> list[frozenset[int]]:
        """Leaf set of every internal node, in merge order (0-based leaves)."""
        current: dict[int, frozenset[int]] = {}
        out: list[frozenset[int]] = []
        for mg in self.merges:
            grp = current.pop(mg.i, frozenset([mg.i])) | current.pop(
                mg.j, frozenset([mg.j])
            )
            current[mg.i] = grp
            out.append(grp)
        return out

    def nested(self) -> list:
        """Nested-list form with 1-based leaf ids and node ids ``m + level``.

        Each merge contributes a triple ``[left, right, node_id]`` where the
        sides are either 1-based leaf ids or earlier triples. Top-level
        entries (one per tree in the forest; never-merged leaves excluded)
        are ordered by root node id.
        """
        current: dict[int, list | int] = {}
        for mg in self.merges:
            left = current.pop(mg.i, mg.i + 1)
            right = current.pop(mg.j, mg.j + 1)
            current[mg.i] = [left, right, mg.node_id]
        roots = [v for v in current.values() if isinstance(v, list)]
        return sorted(roots, key=lambda entry: entry[2])


@dataclass(frozen=True)
class LevelPartition:
    """Disjoint factor-index groups induced by cutting after ``level`` merges."""

    level: int
    groups: tuple[tuple[int, ...], ...]

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def max_group_size(self) -> int:
        return max(len(grp) for grp in self.groups)


def build_hierarchy(dm: DistanceMatrix) -> tuple[MergeTree, tuple[float, ...]]:
    """Run the merge ordering on a distance matrix.

    Returns the merge tree and its distance ladder. The working matrix is
    updated in place over an active index set (no resizing); a cached
    per-row minimum keeps the arg-min scan linear per iteration. Cached row
    minima only go stale when their arg-min column was merged or removed,
    because the complete-linkage update never decreases an entry.
    """
    m = dm.m
    if m <= 1:
        return MergeTree(m, ()), ()

    work = dm.square()
    np.fill_diagonal(work, np.inf)
    active = np.ones(m, dtype=bool)
    row_min = work.min(axis=1)
    row_arg = work.argmin(axis=1)

    merges: list[Merge] = []
    for level in range(1, m):
        act_idx = np.flatnonzero(active)
        pos = int(np.argmin(row_min[act_idx]))
        i = int(act_idx[pos])
        eps = float(row_min[i])
        if not np.isfinite(eps):
            break  # only incompatible groups remain
        j = int(row_arg[i])
        if j < i:
            i, j = j, i

        merges.append(Merge(i, j, eps, m + level))

        # Complete-linkage row update; deactivate j.
        np.maximum(work[i], work[j], out=work[i])
        work[:, i] = work[i]
        work[i, i] = np.inf
        active[j] = False
        work[j, :] = np.inf
        work[:, j] = np.inf
        row_min[j] = np.inf

        row = work[i]
        row_min[i] = row.min()
        row_arg[i] = row.argmin()
        stale = np.flatnonzero(active & ((row_arg == i) | (row_arg == j)))
        for k in stale:
            if k == i:
                continue
            row = work[k]
            row_min[k] = row.min()
            row_arg[k] = row.argmin()

    tree = MergeTree(m, tuple(merges))
    return tree, tree.epsilons


def partition_at_level(h: MergeTree, level: int) -> LevelPartition:
    """Groups after applying the first ``level`` merges; the rest stay singletons."""
    if not 0 <= level <= h.num_levels:
        raise LevelOutOfRange(
            f"level {level} outside [0, {h.num_levels}]"
        )
    parent = list(range(h.m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for mg in h.merges[:level]:
        parent[find(mg.j)] = find(mg.i)

    blocks: dict[int, list[int]] = {}
    for k in range(h.m):
        blocks.setdefault(find(k), []).append(k)
    groups = tuple(
        tuple(sorted(grp)) for grp in sorted(blocks.values(), key=lambda b: b[0])
    )
    return LevelPartition(level, groups)


def level_for_epsilon(h: MergeTree, eps: float) -> int:
    """Largest level whose merge distance is <= ``eps`` (0 if none)."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return bisect_right(h.epsilons, eps)


def export_tree(h: MergeTree) -> dict:
    """Serialise a merge tree to its document form.

    The document carries the leaf count, the ladder, the forest (a list of
    root nodes; leaves appear as ``{"leaf": id}`` with 1-based ids) and every
    level's groups. ``parse_tree`` inverts it exactly.
    """
    leaf_sets = h.leaf_sets()
    node_for: dict[int, dict] = {}
    merged: set[int] = set()
    for mg, leaves in zip(h.merges, leaf_sets):
        left = node_for.pop(mg.i, None) or {"leaf": mg.i + 1}
        right = node_for.pop(mg.j, None) or {"leaf": mg.j + 1}
        node_for[mg.i] = {
            "id": mg.node_id,
            "eps": mg.eps,
            "children": [left, right],
        }
        merged.update((mg.i, mg.j))
    roots = sorted(
        (node for node in node_for.values()),
        key=lambda node: node["id"],
    )
    roots.extend({"leaf": k + 1} for k in range(h.m) if k not in merged)

    levels = []
    for level in range(h.num_levels + 1):
        part = partition_at_level(h, level)
        levels.append(
            {
                "level": level,
                "eps": 0.0 if level == 0 else h.merges[level - 1].eps,
                "groups": [[k + 1 for k in grp] for grp in part.groups],
            }
        )
    return {
        "m": h.m,
        "epsilons": list(h.epsilons),
        "tree": roots,
        "levels": levels,
    }


def parse_tree(doc: dict) -> MergeTree:
    """Rebuild a merge tree from its document form."""
    try:
        m = int(doc["m"])
        roots = doc["tree"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"hierarchy document lacks field {exc}") from None

    records: list[tuple[int, int, int, float]] = []

    def walk(node: dict) -> int:
        """Return the smallest 0-based leaf id of the subtree."""
        if "leaf" in node:
            leaf = int(node["leaf"]) - 1
            if not 0 <= leaf < m:
                raise SchemaError(f"leaf id {node['leaf']} outside 1..{m}")
            return leaf
        try:
            node_id = int(node["id"])
            eps = float(node["eps"])
            left, right = node["children"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed hierarchy node: {exc}") from None
        a, b = walk(left), walk(right)
        if a > b:
            a, b = b, a
        records.append((node_id, a, b, eps))
        return a

    for root in roots:
        walk(root)
    records.sort()
    merges = []
    for pos, (node_id, a, b, eps) in enumerate(records, start=1):
        if node_id != m + pos:
            raise SchemaError(
                f"hierarchy node ids must be consecutive from {m + 1}; "
                f"found {node_id}"
            )
        merges.append(Merge(a, b, eps, node_id))
    return MergeTree(m, tuple(merges))
