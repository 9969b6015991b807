"""Compress a model level by level and watch exact queries drift.

Run:  python demos/02_compress_and_query.py
"""

import numpy as np

from fglift import (
    PlantedSpec,
    build_hierarchy,
    dcd_distance,
    distance_matrix,
    hacp_compress,
    max_query_deviation,
    planted_model,
    query,
)

spec = PlantedSpec(
    seed=7, num_groups=3, factors_per_group=3, noise=0.05, topology="star"
)
g, truth = planted_model(spec)
print(f"star model: {g.n} variables, {g.m} factors, planted groups {truth}")
print()

dm = distance_matrix(g)
tree, ladder = build_hierarchy(dm)

print("Ground-truth marginal of the hub variable:")
base = query(g, "Q")
print(f"  P(Q) = {np.round(base.probabilities, 6)}")
print()

print("Compressing at each level replaces grouped tables by their mean.")
print("Distribution distance and worst scanned query deviation per level:")
print()
print(f"{'level':>5} {'eps':>10} {'groups':>7} {'dcd':>10} {'pmax':>10}")
for level in range(tree.num_levels + 1):
    cm = hacp_compress(g, tree, level)
    dcd = dcd_distance(g, cm.base)
    report = max_query_deviation(g, cm.base, evidence_budget=0)
    print(
        f"{level:>5} {cm.eps:>10.5f} {len(cm.hierarchy_blocks):>7} "
        f"{dcd:>10.6f} {report.pmax:>10.6f}"
    )
print()

deep = hacp_compress(g, tree, tree.num_levels)
after = query(deep.base, "Q")
print(f"After merging everything mergeable (level {deep.level}):")
print(f"  P(Q) = {np.round(after.probabilities, 6)}")
print(f"  distinct shared tables: {deep.grouping.num_blocks}")
print()
print("Factors inside one block now carry bit-identical tables, which is")
print("what allows exponentiation tricks during inference (see demo 04).")
print()

print("=== when structure blocks a merge ===")
print()
chain_spec = PlantedSpec(
    seed=7, num_groups=2, factors_per_group=2, noise=0.01, topology="chain"
)
cg, _ = planted_model(chain_spec)
ctree, _ = build_hierarchy(distance_matrix(cg))
cm = hacp_compress(cg, ctree, ctree.num_levels)
print("On a chain every factor sits in a structurally distinct position, so")
print("colour refinement splits the distance-based groups and the potentials")
print("stay untouched (reported as hierarchy groups vs final blocks):")
print(f"  hierarchy groups at level {cm.level}: {len(cm.hierarchy_blocks)}")
print(f"  blocks after refinement:     {cm.grouping.num_blocks}")
print(f"  distribution distance:       {dcd_distance(cg, cm.base):.6f}")
