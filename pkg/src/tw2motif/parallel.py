"""Bulk-synchronous in-process workers with 1D vertex ownership.

Every table entry lives on the worker that owns its trailing key vertex.
Each context operation is one round: workers compute on resident entries,
fill per-destination outboxes, and the round ends with an exchange.  Workers
run one after another inside a round, which keeps runs deterministic.

Ranks for the degree cap are never read from global state.  A worker starts
out knowing the ranks of its own vertices and their neighbours, and every
shipped entry carries the ranks of its key vertices.  A missing rank is a
``KeyError``, i.e. a protocol bug.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tables as T
from .engine import EngineKind, OpCounter, count_with_context
from .graph import Coloring, DataGraph, degree_rank
from .planner import DecompositionTree


@dataclass(frozen=True)
class Partition:
    p: int
    n: int
    starts: tuple  # first vertex of each worker's block, plus n at the end

    def owner(self, v: int) -> int:
        return self._owner[v]

    @property
    def _owner(self):
        cached = self.__dict__.get("_owner_arr")
        if cached is None:
            sizes = np.diff(self.starts)
            cached = np.repeat(np.arange(self.p), sizes).tolist()
            object.__setattr__(self, "_owner_arr", cached)
        return cached

    def block(self, w: int) -> range:
        return range(self.starts[w], self.starts[w + 1])

    def sizes(self) -> list[int]:
        return [self.starts[i + 1] - self.starts[i] for i in range(self.p)]


def partition_vertices(g_or_n, p: int) -> Partition:
    """Contiguous blocks: the first ``n % p`` get ``ceil(n/p)`` vertices, the rest ``floor(n/p)``."""
    n = g_or_n.n if isinstance(g_or_n, DataGraph) else int(g_or_n)
    if p < 1:
        raise ValueError("need at least one worker")
    if p > n:
        raise ValueError(f"{p} workers for {n} vertices")
    q, r = divmod(n, p)
    starts = [0]
    for i in range(p):
        starts.append(starts[-1] + q + (1 if i < r else 0))
    return Partition(p, n, tuple(starts))


class DistTable:
    """A projection table split into per-worker shards."""

    __slots__ = ("shards", "arity", "n_rec")

    def __init__(self, shards: list, arity: int, n_rec: int = 0):
        self.shards = shards
        self.arity = arity
        self.n_rec = n_rec

    def gather(self) -> T.ProjectionTable:
        out: dict = {}
        for s in self.shards:
            for k, c in s.entries.items():
                out[k] = out.get(k, 0) + c
        return T.ProjectionTable(self.arity, out, self.n_rec)

    def __len__(self):
        return sum(len(s) for s in self.shards)


class ParallelContext:
    def __init__(self, g: DataGraph, chi: Coloring, part: Partition, debug: bool = False):
        self.g = g
        self.chi = chi
        self.part = part
        self.debug = debug
        self.vbits = chi.bits()
        rank = degree_rank(g).rank
        self.stats = [OpCounter() for _ in range(part.p)]
        self.known = []
        for w in range(part.p):
            known = {}
            for v in part.block(w):
                known[v] = rank[v]
                for u in g.adj[v]:
                    known[u] = rank[u]
            self.known.append(known)
        self.rounds = 0
        self.messages = 0
        self._edges = None
        self._by_first: dict = {}
        self._transposed: dict = {}

    # -- plumbing -----------------------------------------------------------

    def _route(self, key, arity):
        return self.part.owner(key[arity - 1]) if arity else None

    def _exchange(self, produced: list, arity: int, n_rec: int) -> DistTable:
        """Ship every entry of ``produced[w]`` to the owner of its trailing key vertex."""
        return self._ship(produced, arity, n_rec, lambda k: self._route(k, arity))

    def _ship(self, produced: list, arity: int, n_rec: int, dest_of,
              check_pos: Optional[int] = None) -> DistTable:
        self.rounds += 1
        inbox = [dict() for _ in range(self.part.p)]
        width = arity + n_rec
        for w, entries in enumerate(produced):
            known = self.known[w]
            for key, c in entries.items():
                dst = dest_of(key)
                if dst is None:
                    dst = w
                box = inbox[dst]
                box[key] = box.get(key, 0) + c
                if dst != w:
                    self.messages += 1
                    dk = self.known[dst]
                    for x in key[:width]:
                        dk[x] = known[x]   # ranks travel with the entry
        out = DistTable([T.ProjectionTable(arity, box, n_rec) for box in inbox], arity, n_rec)
        if self.debug:
            self.check_ownership(out, check_pos)
        return out

    def check_ownership(self, t: DistTable, pos: Optional[int] = None):
        if t.arity == 0:
            return
        pos = t.arity - 1 if pos is None else pos
        for w, shard in enumerate(t.shards):
            for key in shard.entries:
                assert self.part.owner(key[pos]) == w, f"entry {key} resident on worker {w}"

    def _local(self, t: DistTable, arity: int, n_rec: int, fn) -> DistTable:
        self.rounds += 1
        out = DistTable([fn(w, s) for w, s in enumerate(t.shards)], arity, n_rec)
        if self.debug:
            self.check_ownership(out)
        return out

    def _by_first_vertex(self, t: DistTable) -> DistTable:
        """Reshard a binary table by its first key vertex (cached per table)."""
        hit = self._by_first.get(id(t))
        if hit is None or hit[0] is not t:
            moved = self._ship([s.entries for s in t.shards], 2, t.n_rec,
                               lambda k: self.part.owner(k[0]), check_pos=0)
            hit = (t, moved)
            self._by_first[id(t)] = hit
        return hit[1]

    # -- context interface ----------------------------------------------------

    def edges(self) -> DistTable:
        if self._edges is None:
            bits = self.vbits
            shards = []
            for w in range(self.part.p):
                entries = {}
                for v in self.part.block(w):
                    bv = bits[v]
                    for u in self.g.adj[v]:
                        if bits[u] != bv:
                            entries[(u, v, bits[u] | bv)] = 1
                shards.append(T.ProjectionTable(2, entries))
            self._edges = DistTable(shards, 2)
        return self._edges

    def transpose(self, t: DistTable) -> DistTable:
        hit = self._transposed.get(id(t))
        if hit is None or hit[0] is not t:
            flipped = [{(k[1], k[0]) + k[2:]: c for k, c in s.entries.items()} for s in t.shards]
            hit = (t, self._exchange(flipped, 2, t.n_rec))
            self._transposed[id(t)] = hit
        return hit[1]

    def start_path(self, t: DistTable, cap: bool, record: bool) -> DistTable:
        return self._local(t, 2, 1 if record else 0,
                           lambda w, s: T.start_path(s, self.known[w] if cap else None, record))

    def edge_join(self, t: DistTable, right: DistTable, cap: bool, record: bool) -> DistTable:
        r = self._by_first_vertex(right)
        self.rounds += 1
        produced = []
        for w in range(self.part.p):
            out = T.edge_join(t.shards[w], r.shards[w], self.vbits, self.known[w],
                              cap=cap, record=record, stats=self.stats[w])
            produced.append(out.entries)
        return self._exchange(produced, 2, t.n_rec + (1 if record else 0))

    def node_join(self, t: DistTable, unary: DistTable, at_start: bool = False) -> DistTable:
        if not at_start:
            return self._local(t, t.arity, t.n_rec,
                               lambda w, s: T.node_join(s, unary.shards[w], self.vbits,
                                                        stats=self.stats[w]))
        there = self._ship([s.entries for s in t.shards], t.arity, t.n_rec,
                           lambda k: self.part.owner(k[0]), check_pos=0)
        joined = [T.node_join(there.shards[w], unary.shards[w], self.vbits, at_start=True,
                              stats=self.stats[w]).entries for w in range(self.part.p)]
        return self._exchange(joined, t.arity, t.n_rec)

    def merge(self, plus: DistTable, minus: DistTable, out_index) -> DistTable:
        self.rounds += 1
        produced = [T.merge_halves(plus.shards[w], minus.shards[w], self.vbits, out_index,
                                   stats=self.stats[w]).entries for w in range(self.part.p)]
        return self._exchange(produced, len(out_index), 0)

    def add(self, parts: list) -> DistTable:
        first = parts[0]
        shards = [T.add_tables([p.shards[w] for p in parts]) for w in range(self.part.p)]
        self.rounds += 1
        return DistTable(shards, first.arity, first.n_rec)

    def project_first(self, t: DistTable) -> DistTable:
        produced = [T.project_first(s).entries for s in t.shards]
        return self._exchange(produced, 1, 0)

    def seal(self, t: DistTable) -> DistTable:
        for s in t.shards:
            s.seal()
        return t

    def total(self, t: DistTable) -> int:
        return sum(s.total() for s in t.shards)

    def load_report(self) -> dict:
        ops = [s.ops for s in self.stats]
        return {
            "p": self.part.p,
            "per_worker_ops": ops,
            "max_ops": max(ops),
            "avg_ops": sum(ops) / len(ops),
            "rounds": self.rounds,
            "messages": self.messages,
        }


def parallel_run(g: DataGraph, chi: Coloring, tree: DecompositionTree, engine="db",
                 part: Optional[Partition] = None, p: int = 1, debug: bool = False):
    """Count colorful matches on ``p`` simulated workers; returns ``(count, report)``."""
    part = part or partition_vertices(g, p)
    ctx = ParallelContext(g, chi, part, debug=debug)
    t0 = time.perf_counter()
    count = count_with_context(ctx, tree, EngineKind.parse(engine))
    report = ctx.load_report()
    report["wall_time"] = time.perf_counter() - t0
    report["count"] = count
    return count, report


def parallel_count(g: DataGraph, chi: Coloring, tree: DecompositionTree, engine="db",
                   part: Optional[Partition] = None, p: int = 1, debug: bool = False) -> int:
    return parallel_run(g, chi, tree, engine, part, p, debug)[0]


def report_json(report: dict, **kw) -> str:
    return json.dumps(report, **kw)
