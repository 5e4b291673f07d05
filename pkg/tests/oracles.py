"""Independent brute-force oracles: path-based CPM and exact enumeration.

Everything here is deliberately naive pure Python (recursion over
predecessor lists, products of atoms) so it shares no code path with the
engine it checks.
"""

import itertools
import math


def pred_lists(network):
    return [list(node.preds) for node in network.nodes]


def brute_paths(preds):
    """All source->sink paths by recursion over predecessor lists."""
    n = len(preds)
    succs = [[] for _ in range(n)]
    for i, ps in enumerate(preds):
        for p in ps:
            succs[p].append(i)
    sink = n - 1
    out = []

    def walk(node, trail):
        if node == sink:
            out.append(tuple(trail))
            return
        for s in succs[node]:
            walk(s, trail + [s])

    walk(0, [0])
    return out


def brute_pd(paths, durations):
    """Project duration as the max over explicit path sums."""
    return max(sum(durations[i] for i in path) for path in paths)


def brute_critical(paths, durations, tol=1e-9):
    """Nodes lying on some longest path."""
    pd = brute_pd(paths, durations)
    critical = set()
    for path in paths:
        if sum(durations[i] for i in path) >= pd - tol:
            critical.update(path)
    return critical


def node_atom_sets(network):
    """Per-node effective (value, prob) atoms for discrete networks."""
    atoms = []
    for node in network.nodes:
        base = node.base
        if base.kind == "point":
            base_atoms = [(base.params[0], 1.0)]
        elif base.kind == "discrete":
            base_atoms = list(base.params)
        else:
            raise ValueError(f"exact enumeration needs point/discrete laws, got {base.kind}")
        if node.gate is None:
            atoms.append(base_atoms)
        else:
            p = node.gate
            mixture = []
            if p < 1.0:
                mixture.append((0.0, 1.0 - p))
            if p > 0.0:
                mixture.extend((v, p * q) for v, q in base_atoms)
            atoms.append(mixture)
    return atoms


def cost_risk_atom_sets(network):
    atoms = []
    for cr in network.cost_risks:
        if cr.impact.kind == "point":
            base_atoms = [(cr.impact.params[0], 1.0)]
        elif cr.impact.kind == "discrete":
            base_atoms = list(cr.impact.params)
        else:
            raise ValueError("exact enumeration needs point/discrete impacts")
        p = cr.probability
        mixture = []
        if p < 1.0:
            mixture.append((0.0, 1.0 - p))
        if p > 0.0:
            mixture.extend((v, p * q) for v, q in base_atoms)
        atoms.append(mixture)
    return atoms


def enumerate_exact(network):
    """Exact joint outcomes for a discrete network.

    Returns (pd_dist, cost_dist, crit_prob) where the dists map value ->
    probability and crit_prob is the per-node criticality probability.
    """
    paths = brute_paths(pred_lists(network))
    fixed = [node.fixed_cost for node in network.nodes]
    rate = [node.variable_cost_rate for node in network.nodes]
    duration_atoms = node_atom_sets(network)
    risk_atoms = cost_risk_atom_sets(network)

    pd_dist = {}
    cost_dist = {}
    crit_prob = [0.0] * len(network.nodes)
    for combo in itertools.product(*duration_atoms, *risk_atoms):
        durations = [v for v, _ in combo[:len(network.nodes)]]
        prob = math.prod(q for _, q in combo)
        pd = brute_pd(paths, durations)
        cost = sum(f + r * d for f, r, d in zip(fixed, rate, durations))
        cost += sum(v for v, _ in combo[len(network.nodes):])
        pd_dist[pd] = pd_dist.get(pd, 0.0) + prob
        cost_dist[cost] = cost_dist.get(cost, 0.0) + prob
        for i in brute_critical(paths, durations):
            crit_prob[i] += prob
    return pd_dist, cost_dist, crit_prob


def ks_distance(exact_dist, samples):
    """sup |F_exact - F_empirical| evaluated at the exact atoms."""
    import numpy as np

    values = sorted(exact_dist)
    sorted_samples = np.sort(np.asarray(samples, dtype=float))
    n = len(sorted_samples)
    cum = 0.0
    worst = 0.0
    for v in values:
        cum += exact_dist[v]
        emp = np.searchsorted(sorted_samples, v, side="right") / n
        worst = max(worst, abs(cum - emp))
    return worst
