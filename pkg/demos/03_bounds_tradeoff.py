"""The compression-versus-accuracy calculus: bounds before you compress.

Run:  python demos/03_bounds_tradeoff.py
"""

import numpy as np

from fglift import (
    PlantedSpec,
    bound_chain,
    build_hierarchy,
    dcd_bound_sharp,
    dcd_distance,
    distance_matrix,
    eps_for_target,
    greedy_eps_grouping,
    hacp_compress,
    max_query_deviation,
    mean_table,
    planted_model,
    pmax_bound,
)
from fglift.model import Factor, FactorGraph

print("=== forward direction: pick eps, read off the worst case ===")
print()
print("For m factors grouped under tolerance eps, the query shift is at most")
print("tanh(d2/4) with d2 the sharp distance bound:")
print()
print(f"{'eps':>8} {'m':>6} {'d2':>10} {'d3':>10} {'d4':>10} {'pmax(d2)':>10}")
for eps in (0.001, 0.01, 0.1, 0.5):
    for m in (2, 10, 100):
        c = bound_chain(eps, m)
        print(
            f"{eps:>8} {m:>6} {c.d2:>10.5f} {c.d3:>10.5f} {c.d4:>10.5f} "
            f"{c.pmax_d2:>10.6f}"
        )
print()

print("=== inverse direction: cap the deviation, read off eps ===")
print()
print("Largest tolerance that keeps every query within p* of its value:")
print(f"{'p*':>6} " + "".join(f"m={m:<10}" for m in (2, 10, 100, 1000)))
for p_star in (0.01, 0.05, 0.1, 0.5):
    row = [eps_for_target(p_star, m) for m in (2, 10, 100, 1000)]
    print(f"{p_star:>6} " + "".join(f"{eps:<12.5f}" for eps in row))
print()

print("=== measured versus bound on a planted model ===")
print()
spec = PlantedSpec(seed=11, num_groups=3, factors_per_group=3, noise=0.05)
g, _ = planted_model(spec)
tree, _ = build_hierarchy(distance_matrix(g))
print(f"{'level':>5} {'eps':>9} {'measured dcd':>13} {'bound d2':>10} {'ratio':>7}")
for level in range(tree.num_levels + 1):
    cm = hacp_compress(g, tree, level)
    measured = dcd_distance(g, cm.base)
    bound = dcd_bound_sharp(cm.eps, g.m)
    ratio = measured / bound if bound else 0.0
    print(
        f"{level:>5} {cm.eps:>9.5f} {measured:>13.6f} {bound:>10.5f} "
        f"{ratio:>7.1%}"
    )
print()
print("Measured distances sit far below the worst case; the bounds are")
print("guarantees, not predictions.")
print()

print("=== hierarchical grouping versus the greedy one-pass baseline ===")
print()


def replace_by_group_means(graph, blocks):
    tables = {}
    for blk in blocks:
        mean = mean_table([graph.factors[k].table for k in blk])
        for k in blk:
            tables[k] = mean
    factors = tuple(
        Factor(f.name, f.args, tables[k]) for k, f in enumerate(graph.factors)
    )
    return FactorGraph(graph.variables, factors)


eps_probe = tree.epsilons[tree.num_levels // 2]
hier_cm = hacp_compress(g, tree, tree.num_levels // 2)
greedy = greedy_eps_grouping(g, eps_probe)
greedy_model = replace_by_group_means(g, greedy.blocks)

rows = (
    ("hierarchical", hier_cm.base, hier_cm.grouping.num_blocks),
    ("greedy", greedy_model, len(greedy.blocks)),
)
for name, model, blocks in rows:
    report = max_query_deviation(g, model, evidence_budget=1)
    devs = [d.abs_dev for d in report.deviations]
    print(
        f"  {name:>12}: blocks={blocks:>2} "
        f"avg dev={np.mean(devs):.6f} max dev={report.pmax:.6f}"
    )
print()
print("The greedy baseline can land near the hierarchy on average, but its")
print("groups depend on scan order, so reruns with permuted factors need not")
print("reproduce it; the hierarchy is order-free by construction.")
