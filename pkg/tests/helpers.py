"""Shared fixtures builders for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

from tw2motif.graph import DataGraph, from_edges
from tw2motif.planner import CYCLE, DecompositionTree
from tw2motif.query import QueryGraph, make_query

DATA = Path(__file__).resolve().parent.parent / "data"


def gnp(rng: random.Random, n: int, p: float) -> DataGraph:
    return from_edges([(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p], n=n)


def series_parallel_query(rng: random.Random, k: int) -> QueryGraph:
    """Random connected query of treewidth <= 2 on exactly ``k`` nodes.

    Grown from one edge by pendant additions, edge subdivisions and new
    paths of length >= 2 between the ends of an existing edge; all three
    moves keep treewidth at most two.
    """
    if k == 1:
        return make_query(1, [])
    edges = {(0, 1)}
    n = 2
    while n < k:
        move = rng.random()
        a, b = rng.choice(sorted(edges))
        if move < 0.3:
            edges.add((rng.randrange(n), n))
            n += 1
        elif move < 0.55:
            edges.discard((a, b))
            edges |= {(a, n), (n, b)}
            n += 1
        else:
            length = min(rng.randint(2, 3), k - n + 1)
            path = [a] + list(range(n, n + length - 1)) + [b]
            edges |= set(zip(path, path[1:]))
            n += length - 1
    return make_query(k, sorted(edges))


def check_tree(tree: DecompositionTree):
    """Structural invariants every decomposition tree must satisfy."""
    q = tree.query
    if not tree.blocks:
        assert q.k == 1 and tree.residual_node == 0
        return
    assert set().union(*(set(b.nodes) for b in tree.blocks)) == set(range(q.k))

    owned = []
    for b in tree.blocks:
        virtual = set(p for p, _ in b.edge_children)
        for pos in b.edge_positions():
            if pos not in virtual:
                owned.append(frozenset(b.edge_nodes(pos)))
    assert sorted(map(sorted, owned)) == sorted(map(sorted, q.edges)), "every query edge owned exactly once"

    slots = [c for b in tree.blocks for c in b.children()]
    assert len(slots) == len(set(slots)) == len(tree.blocks) - 1
    assert set(slots) | {tree.root_block} == set(tree.blocks)

    adj = q.adjacency()
    for b in tree.blocks:
        sq = tree.subquery_nodes(b)
        bnd = {a for a in sq if adj[a] - sq}
        if b is tree.root_block and tree.residual_node is not None:
            # the whole query; the residual node stays as the table key
            assert not bnd and b.boundary == (tree.residual_node,)
        else:
            assert bnd == set(b.boundary), f"boundary of {b.key}"
        if b.kind == CYCLE:
            assert len(b.boundary) <= 2
        else:
            assert len(b.boundary) == 1
    if tree.residual_node is None:
        assert tree.root_block.kind == CYCLE and not tree.root_block.boundary
