"""Shared seeded instance generators and independent oracles for tests.

Everything here is deliberately dumb and direct: oracles must not share
clever machinery with the code they check.
"""

from __future__ import annotations

import random
from itertools import combinations

import poishare as ps


def random_instance(
    rng: random.Random,
    max_users: int = 8,
    max_extra_nodes: int = 0,
    edge_prob: float = 0.45,
    social_prob: float = 0.4,
    with_prefs: bool = False,
    with_weights: bool = False,
    with_loops: bool = False,
    max_radius: int = 1,
    min_users: int = 1,
) -> ps.Instance:
    m = rng.randint(min_users, max_users)
    extra = rng.randint(0, max_extra_nodes)
    nn = m + extra
    edges = [(i, j) for i in range(nn) for j in range(i + 1, nn) if rng.random() < edge_prob]
    loops = []
    if with_loops:
        loops = [(v, v) for v in range(nn) if rng.random() < 0.25]
    all_edges = tuple(edges + loops)
    weights = None
    if with_weights and all_edges:
        weights = tuple(round(rng.uniform(0.5, 3.0), 3) for _ in all_edges)
    sensing = ps.SensingGraph(
        node_count=nn,
        user_count=m,
        edges=all_edges,
        edge_weights=weights,
        allow_self_loops=bool(loops),
    )
    social = ps.SocialGraph(
        user_count=m,
        edges=tuple(
            (i, j) for i in range(m) for j in range(i + 1, m) if rng.random() < social_prob
        ),
    )
    prefs = None
    if with_prefs:
        rows = []
        for i in range(m):
            chosen = set(sensing.incident[i])
            for e in range(len(all_edges)):
                if rng.random() < 0.5:
                    chosen.add(e)
            rows.append(frozenset(chosen))
        prefs = ps.PreferenceProfile(tuple(rows))
    return ps.Instance(
        sensing=sensing,
        social=social,
        preferences=prefs,
        social_hop_radius=rng.randint(1, max_radius),
    )


def random_all_user_instance(rng: random.Random, max_nodes: int = 6, min_nodes: int = 2,
                             edge_prob: float = 0.5, social_prob: float = 0.4) -> ps.Instance:
    inst = random_instance(
        rng,
        max_users=max_nodes,
        min_users=min_nodes,
        max_extra_nodes=0,
        edge_prob=edge_prob,
        social_prob=social_prob,
    )
    if inst.sensing.edge_count == 0:
        sensing = ps.SensingGraph(
            node_count=inst.node_count, user_count=inst.user_count, edges=((0, 1),)
        )
        inst = ps.Instance(sensing=sensing, social=inst.social)
    return inst


def random_connected_graph(rng: random.Random, n: int, edge_prob: float = 0.4):
    """Random simple connected graph: a random spanning tree plus extras."""
    edges = set()
    nodes = list(range(n))
    rng.shuffle(nodes)
    for i in range(1, n):
        j = rng.randrange(i)
        u, v = nodes[i], nodes[j]
        edges.add((min(u, v), max(u, v)))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.add((i, j))
    return sorted(edges)


def vertex_cover_exists(n: int, edges, k: int) -> bool:
    """Independent brute-force decision oracle for vertex cover."""
    if not edges:
        return True
    for size in range(0, k + 1):
        for subset in combinations(range(n), size):
            chosen = set(subset)
            if all(u in chosen or v in chosen for u, v in edges):
                return True
    return False


def naive_phi(instance: ps.Instance, broadcast_nodes) -> float:
    """Second independent welfare computation, straight from definitions."""
    g1 = instance.sensing
    total = 0.0
    for i in range(instance.user_count):
        access = {i} | ps.social_neighborhood(instance, i) | set(broadcast_nodes)
        edge_ids = set()
        for e, (u, v) in enumerate(g1.edges):
            if u in access or v in access:
                edge_ids.add(e)
        if instance.preferences is not None:
            edge_ids &= instance.preferences.per_user_edges[i]
        total += sum(g1.weight(e) for e in edge_ids)
    return total / instance.user_count


def exact_total(breakdown: ps.WelfareBreakdown) -> int:
    """Sum of per-user utilities as an exact integer (uniform weights)."""
    total = breakdown.average * len(breakdown.per_user)
    rounded = round(total)
    assert abs(total - rounded) < 1e-6, f"expected integer welfare sum, got {total}"
    return rounded
