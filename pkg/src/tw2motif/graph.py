"""Undirected data graphs, degree ordering and random colorings."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import EdgeListParseError

log = logging.getLogger(__name__)

MAX_COLORS = 32


@dataclass(frozen=True, eq=False)
class DataGraph:
    """Simple undirected graph with sorted adjacency lists.

    ``labels`` maps dense ids back to the ids found in the input file; it is
    ``None`` when the input ids were used as-is.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    m: int
    labels: Optional[tuple[int, ...]] = None
    dropped_self_loops: int = 0
    dropped_duplicates: int = 0
    _adjsets: list = field(default=None, repr=False, compare=False)

    @property
    def degree(self) -> list[int]:
        return [len(a) for a in self.adj]

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adj[u]

    def has_edge(self, u: int, v: int) -> bool:
        if self._adjsets is None:
            object.__setattr__(self, "_adjsets", [frozenset(a) for a in self.adj])
        return v in self._adjsets[u]

    def edges(self):
        """Yield each undirected edge once as ``(u, v)`` with ``u < v``."""
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if u < v:
                    yield u, v

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in self.adj])
        indices = np.fromiter(
            (v for a in self.adj for v in a), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    def __eq__(self, other):
        if not isinstance(other, DataGraph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def validate(self):
        total = 0
        for u, nbrs in enumerate(self.adj):
            assert list(nbrs) == sorted(set(nbrs)), f"adjacency of {u} not sorted/unique"
            assert u not in nbrs, f"self-loop at {u}"
            for v in nbrs:
                assert self.has_edge(v, u), f"asymmetric edge {u}-{v}"
            total += len(nbrs)
        assert total == 2 * self.m


def from_edges(edges: Iterable[tuple[int, int]], n: Optional[int] = None) -> DataGraph:
    """Build a graph from vertex pairs, dropping self-loops and duplicates."""
    nbrs: dict[int, set] = {}
    loops = dups = 0
    hi = -1
    for u, v in edges:
        u, v = int(u), int(v)
        if u < 0 or v < 0:
            raise ValueError(f"negative vertex id in edge ({u}, {v})")
        hi = max(hi, u, v)
        if u == v:
            loops += 1
            continue
        s = nbrs.setdefault(u, set())
        if v in s:
            dups += 1
            continue
        s.add(v)
        nbrs.setdefault(v, set()).add(u)
    if n is None:
        n = hi + 1
    elif hi >= n:
        raise ValueError(f"vertex id {hi} out of range for n={n}")
    adj = tuple(tuple(sorted(nbrs.get(u, ()))) for u in range(n))
    m = sum(len(a) for a in adj) // 2
    if loops or dups:
        log.warning("dropped %d self-loops and %d duplicate edges", loops, dups)
    return DataGraph(n=n, adj=adj, m=m, dropped_self_loops=loops, dropped_duplicates=dups)


def load_edge_list(
    source: Union[bytes, str, io.IOBase], compact: bool = False
) -> DataGraph:
    """Parse whitespace separated ``u v`` lines.

    Lines starting with ``#`` or ``%`` are comments (SNAP headers).  With
    ``compact=True`` the ids are remapped to ``0..n-1`` in ascending order of
    the original ids, and the original ids are kept in ``labels``.
    """
    if isinstance(source, (bytes, bytearray)):
        text = source.decode()
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode() if isinstance(data, (bytes, bytearray)) else data

    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(f"expected 2 tokens, got {len(parts)}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"malformed vertex id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise EdgeListParseError(f"negative vertex id in {line!r}", lineno)
        pairs.append((u, v))

    if not compact:
        return from_edges(pairs, n=None if pairs else 0)

    ids = sorted({x for p in pairs for x in p})
    remap = {x: i for i, x in enumerate(ids)}
    g = from_edges(((remap[u], remap[v]) for u, v in pairs), n=len(ids))
    return DataGraph(
        n=g.n, adj=g.adj, m=g.m, labels=tuple(ids),
        dropped_self_loops=g.dropped_self_loops, dropped_duplicates=g.dropped_duplicates,
    )


def serialize(g: DataGraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges())


@dataclass(frozen=True)
class VertexOrdering:
    """Total order by (degree, id); ``rank[u] > rank[v]`` means u is higher."""

    rank: tuple[int, ...]

    def higher(self, u: int, v: int) -> bool:
        return self.rank[u] > self.rank[v]


def degree_rank(g: DataGraph) -> VertexOrdering:
    order = sorted(range(g.n), key=lambda u: (len(g.adj[u]), u))
    rank = [0] * g.n
    for r, u in enumerate(order):
        rank[u] = r
    return VertexOrdering(tuple(rank))


@dataclass(frozen=True)
class Coloring:
    chi: tuple[int, ...]
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= MAX_COLORS:
            raise ValueError(f"k must be in 1..{MAX_COLORS}, got {self.k}")
        for c in self.chi:
            if not 1 <= c <= self.k:
                raise ValueError(f"color {c} outside 1..{self.k}")

    def bits(self) -> list[int]:
        """Per-vertex single-bit signature ``1 << (color - 1)``."""
        return [1 << (c - 1) for c in self.chi]


def random_coloring(g: DataGraph, k: int, seed) -> Coloring:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > MAX_COLORS:
        raise ValueError(f"k={k} unsupported: signatures are {MAX_COLORS}-bit words")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    chi = rng.integers(1, k + 1, size=g.n)
    return Coloring(tuple(int(c) for c in chi), k)


def coloring_from(colors: Sequence[int], k: Optional[int] = None) -> Coloring:
    colors = tuple(int(c) for c in colors)
    return Coloring(colors, k if k is not None else max(colors, default=1))
