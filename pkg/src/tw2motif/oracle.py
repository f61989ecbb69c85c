"""Brute-force ground truth by backtracking over injective maps.

Slow on purpose and kept independent of the table code: it only shares the
graph and query containers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import BudgetExceeded
from .graph import Coloring, DataGraph
from .query import QueryGraph
from .tables import ProjectionTable

DEFAULT_BUDGET = 10**9


@dataclass
class OracleBudget:
    """Cap on partial assignments tried before giving up."""

    limit: int = DEFAULT_BUDGET
    used: int = 0

    def __post_init__(self):
        if self.limit <= 0:
            raise ValueError("oracle budget must be positive")

    @classmethod
    def from_env(cls) -> "OracleBudget":
        raw = os.environ.get("MOTIF_BUDGET")
        return cls(int(float(raw))) if raw else cls()

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(
                f"oracle budget of {self.limit} assignments exhausted", explored=self.used
            )


def _search_order(q: QueryGraph) -> list[int]:
    """DFS order from the highest-degree node so each new node has an assigned neighbour."""
    adj = q.adjacency()
    start = max(range(q.k), key=lambda a: (len(adj[a]), -a))
    order, seen, stack = [], {start}, [start]
    while stack:
        a = stack.pop()
        order.append(a)
        for b in sorted(adj[a], key=lambda x: (len(adj[x]), -x)):
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return order


def enumerate_matches(g: DataGraph, q: QueryGraph, visit: Callable[[list], None],
                      budget: Optional[OracleBudget] = None,
                      colors: Optional[Sequence[int]] = None):
    """Call ``visit(image)`` for every match; ``image[a]`` is the vertex of query node ``a``.

    With ``colors`` only matches whose images carry pairwise distinct colors
    are visited.
    """
    budget = budget or OracleBudget.from_env()
    order = _search_order(q)
    qadj = q.adjacency()
    back = []  # earlier-placed neighbours of each node in the order
    placed = set()
    for a in order:
        back.append([b for b in qadj[a] if b in placed])
        placed.add(a)
    image = [-1] * q.k
    used = set()
    used_colors = set()

    def rec(i):
        if i == len(order):
            visit(image)
            return
        a = order[i]
        nb = back[i]
        cands = g.adj[image[nb[0]]] if nb else range(g.n)
        for v in cands:
            budget.spend()
            if v in used:
                continue
            if colors is not None and colors[v] in used_colors:
                continue
            if any(not g.has_edge(v, image[b]) for b in nb[1:]):
                continue
            image[a] = v
            used.add(v)
            if colors is not None:
                used_colors.add(colors[v])
            rec(i + 1)
            used.discard(v)
            if colors is not None:
                used_colors.discard(colors[v])
        image[a] = -1

    rec(0)


def brute_matches(g: DataGraph, q: QueryGraph, budget: Optional[OracleBudget] = None) -> int:
    n = 0

    def bump(_):
        nonlocal n
        n += 1

    enumerate_matches(g, q, bump, budget)
    return n


def brute_colorful(g: DataGraph, q: QueryGraph, chi: Coloring,
                   budget: Optional[OracleBudget] = None) -> int:
    """Matches whose ``k`` images all carry different colors."""
    n = 0

    def bump(_):
        nonlocal n
        n += 1

    enumerate_matches(g, q, bump, budget, colors=chi.chi)
    return n


def brute_projection(g: DataGraph, q: QueryGraph, chi: Coloring, boundary: Sequence[int],
                     budget: Optional[OracleBudget] = None) -> ProjectionTable:
    """Colorful matches of ``q`` grouped by the images of ``boundary`` and the signature.

    ``boundary`` holds 0 to 2 query nodes; their order fixes the key order.
    """
    boundary = tuple(boundary)
    if len(boundary) > 2:
        raise ValueError("at most two boundary nodes")
    bits = chi.bits()
    out: dict = {}

    def add(image):
        sig = 0
        for v in image:
            sig |= bits[v]
        key = tuple(image[a] for a in boundary) + (sig,)
        out[key] = out.get(key, 0) + 1

    enumerate_matches(g, q, add, budget, colors=chi.chi)
    return ProjectionTable(len(boundary), out)


def automorphism_count(q: QueryGraph) -> int:
    """Adjacency-preserving permutations of the query nodes."""
    if q.k > 10:
        raise ValueError(f"automorphism search limited to k <= 10, got {q.k}")
    from .graph import from_edges

    as_graph = from_edges(q.edge_list(), n=q.k)
    return brute_matches(as_graph, q)
