"""Query graphs: parsing, validation and a few named shapes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import QueryError

MAX_QUERY_NODES = 32


@dataclass(frozen=True)
class QueryGraph:
    """Connected simple query on nodes ``0..k-1``.

    ``names`` is cosmetic (plan JSON, error messages); ids are what count.
    """

    k: int
    edges: frozenset
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not 1 <= self.k <= MAX_QUERY_NODES:
            raise QueryError(f"query size {self.k} outside 1..{MAX_QUERY_NODES}")
        for e in self.edges:
            a, b = tuple(e)
            if not (0 <= a < self.k and 0 <= b < self.k):
                raise QueryError(f"edge {a}-{b} references a node outside 0..{self.k - 1}")
        if not self._connected():
            raise QueryError("query graph is not connected")

    def _connected(self) -> bool:
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.k

    def adjacency(self) -> list[set]:
        adj = [set() for _ in range(self.k)]
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def name(self, node: int) -> str:
        return self.names[node] if self.names else str(node)

    def node_id(self, name: str) -> int:
        if self.names is None:
            return int(name)
        return self.names.index(name)

    def induced(self, nodes: Iterable[int]) -> list[tuple[int, int]]:
        nodes = set(nodes)
        return [e for e in self.edge_list() if e[0] in nodes and e[1] in nodes]

    def serialize(self) -> str:
        head = f"# names: {' '.join(self.names)}\n" if self.names else ""
        return head + f"{self.k}\n" + "".join(f"{a} {b}\n" for a, b in self.edge_list())


def make_query(k: int, pairs: Iterable[tuple[int, int]], names: Optional[Sequence[str]] = None) -> QueryGraph:
    edges = set()
    for a, b in pairs:
        if a == b:
            raise QueryError(f"self-loop on query node {a}")
        e = frozenset((int(a), int(b)))
        if e in edges:
            raise QueryError(f"duplicate query edge {a}-{b}")
        edges.add(e)
    return QueryGraph(k, frozenset(edges), tuple(names) if names else None)


def named_query(names: str, pairs: Iterable[str]) -> QueryGraph:
    """Build a query from single-letter style names, e.g. ``("abc", ["ab", "bc"])``."""
    idx = {c: i for i, c in enumerate(names)}
    return make_query(len(names), [(idx[p[0]], idx[p[1]]) for p in pairs], list(names))


def parse_query(text: str) -> QueryGraph:
    """First line ``k``, then one ``u v`` pair per line.

    ``#`` starts a comment line; a ``# names: a b c`` comment gives the
    nodes display names.
    """
    names = None
    lines = []
    for i, raw in enumerate(text.splitlines(), start=1):
        ln = raw.strip()
        if ln.startswith("#"):
            body = ln[1:].strip()
            if body.startswith("names:"):
                names = body[len("names:"):].split()
            continue
        if ln:
            lines.append((i, ln))
    if not lines:
        raise QueryError("empty query file")
    first, head = lines[0]
    try:
        k = int(head)
    except ValueError:
        raise QueryError(f"line {first}: expected node count, got {head!r}") from None
    if names is not None and len(names) != k:
        raise QueryError(f"{len(names)} names given for {k} nodes")
    pairs = []
    for i, ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise QueryError(f"line {i}: expected 'u v', got {ln!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise QueryError(f"line {i}: malformed node id in {ln!r}") from None
    return make_query(k, pairs, names)


def cycle(length: int) -> QueryGraph:
    return make_query(length, [(i, (i + 1) % length) for i in range(length)])


def path(k: int) -> QueryGraph:
    return make_query(k, [(i, i + 1) for i in range(k - 1)])


def star(k: int) -> QueryGraph:
    """Center 0 with ``k - 1`` leaves."""
    return make_query(k, [(0, i) for i in range(1, k)])


# Reconstructed from the decomposition walk-through: 5-cycle abcde, path a-f-g-c,
# pendant h on f, triangle ijk, and triangle ifg sharing edge f-g.
SAT = named_query(
    "abcdefghijk",
    ["ab", "bc", "cd", "de", "ea", "af", "fg", "gc", "fh", "ij", "jk", "ki", "if", "gi"],
)

# A 4-cycle and a 6-cycle sharing one edge; the only two plans contract one
# cycle and keep the other as root.
TWO_CYCLES = named_query(
    "xyabcdef",
    ["xa", "ab", "by", "yx", "xc", "cd", "de", "ef", "fy"],
)

BUILTIN = {
    "sat": SAT,
    "two_cycles": TWO_CYCLES,
    "c3": cycle(3),
    "c4": cycle(4),
    "c5": cycle(5),
    "c6": cycle(6),
    "p4": path(4),
    "star4": star(4),
}
