"""Bottom-up evaluation of a decomposition tree with the PS or DB cycle engine.

The orchestration below never touches table entries directly; it goes
through a *context* object exposing the join primitives.  :class:`LocalContext`
runs them in-process on whole tables, and the parallel runtime supplies a
context whose tables are spread over workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from . import tables as T
from .errors import CountOverflowError
from .graph import Coloring, DataGraph, degree_rank
from .planner import CYCLE, LEAF, Block, DecompositionTree


class EngineKind(str, enum.Enum):
    PS = "ps"
    DB = "db"

    @classmethod
    def parse(cls, value) -> "EngineKind":
        return value if isinstance(value, cls) else cls(str(value).lower())


class OpCounter:
    """Tally of join candidate pairs examined."""

    __slots__ = ("ops",)

    def __init__(self):
        self.ops = 0


@dataclass(frozen=True)
class HalfPathSpec:
    """Walk from cycle position ``start`` to ``end``.

    ``include_start`` / ``include_end`` say whether the blocks annotating the
    endpoint nodes are joined into this half; exactly one of the two halves
    of a split takes each endpoint.  ``record`` lists interior positions whose
    images are kept in recorded slots, in traversal order.
    """

    start: int
    end: int
    clockwise: bool
    include_start: bool
    include_end: bool
    record: tuple = ()

    def positions(self, length: int) -> list[int]:
        step = 1 if self.clockwise else -1
        out = [self.start]
        while out[-1] != self.end:
            out.append((out[-1] + step) % length)
        return out


class LocalContext:
    """Single-process table operations with an operation counter."""

    def __init__(self, g: DataGraph, chi: Coloring, rank=None, stats: Optional[OpCounter] = None):
        self.g = g
        self.chi = chi
        self.vbits = chi.bits()
        self.rank = rank if rank is not None else degree_rank(g).rank
        self.stats = stats if stats is not None else OpCounter()
        self._edges = None
        self._transposed: dict = {}

    def edges(self):
        if self._edges is None:
            self._edges = T.edge_table(self.g, self.chi)
        return self._edges

    def transpose(self, t):
        key = id(t)
        hit = self._transposed.get(key)
        if hit is None or hit[0] is not t:
            hit = (t, T.transpose(t))
            self._transposed[key] = hit
        return hit[1]

    def start_path(self, t, cap: bool, record: bool):
        return T.start_path(t, self.rank if cap else None, record)

    def edge_join(self, t, right, cap: bool, record: bool):
        return T.edge_join(t, right, self.vbits, self.rank, cap=cap, record=record, stats=self.stats)

    def node_join(self, t, unary, at_start: bool = False):
        return T.node_join(t, unary, self.vbits, at_start=at_start, stats=self.stats)

    def merge(self, plus, minus, out_index):
        return T.merge_halves(plus, minus, self.vbits, out_index, stats=self.stats)

    def add(self, tables):
        return T.add_tables(tables)

    def project_first(self, t):
        return T.project_first(t)

    def seal(self, t):
        return t.seal()

    def total(self, t) -> int:
        return t.total()


def _oriented(ctx, block: Block, pos_from: int, pos_to: int, edge_pos: int, child_tables: dict):
    """Table for the cycle edge between two positions, keyed (from, to)."""
    child = block.child_on_edge.get(edge_pos)
    if child is None:
        return ctx.edges()
    t = child_tables[child]
    if child.boundary[0] == block.nodes[pos_from]:
        return t
    return ctx.transpose(t)


def build_half_path_table(ctx, block: Block, spec: HalfPathSpec, child_tables: dict, cap: bool = False):
    """Projection table of one half of a split cycle, keyed (image of start, image of end)."""
    L = block.length
    pos = spec.positions(L)
    m = len(pos) - 1
    if m < 1:
        raise ValueError("a half path needs at least one edge")
    nc = block.child_on_node
    rec = set(spec.record)

    def edge_tab(i):
        a, b = pos[i], pos[i + 1]
        return _oriented(ctx, block, a, b, a if spec.clockwise else b, child_tables)

    t = ctx.start_path(edge_tab(0), cap, pos[1] in rec)
    if spec.include_start and pos[0] in nc:
        t = ctx.node_join(t, child_tables[nc[pos[0]]], at_start=True)
    for i in range(1, m):
        if pos[i] in nc:
            t = ctx.node_join(t, child_tables[nc[pos[i]]])
        t = ctx.edge_join(t, edge_tab(i), cap, pos[i + 1] in rec)
    if spec.include_end and pos[m] in nc:
        t = ctx.node_join(t, child_tables[nc[pos[m]]])
    return t


def split_points(block: Block, engine: EngineKind) -> list[tuple[int, int]]:
    """(h, d) position pairs the engine splits the cycle at."""
    L = block.length
    half = L // 2
    if engine == EngineKind.DB:
        return [(h, (h + half) % L) for h in range(L)]
    bpos = [block.nodes.index(x) for x in block.boundary]
    if len(bpos) == 2:
        return [(bpos[0], bpos[1])]
    if len(bpos) == 1:
        return [(bpos[0], (bpos[0] + half) % L)]
    return [(0, half)]


def _half_specs(block: Block, h: int, d: int):
    L = block.length
    bpos = {block.nodes.index(x) for x in block.boundary}
    specs = []
    for cw in (True, False):
        inner = HalfPathSpec(h, d, cw, False, False).positions(L)[1:-1]
        specs.append(HalfPathSpec(h, d, cw, not cw, cw, tuple(p for p in inner if p in bpos)))
    return specs[0], specs[1]


def _out_index(block: Block, h: int, d: int, plus: HalfPathSpec, minus: HalfPathSpec) -> tuple:
    out = []
    for x in block.boundary:
        p = block.nodes.index(x)
        if p == h:
            out.append(0)
        elif p == d:
            out.append(1)
        elif p in plus.record:
            out.append(2 + plus.record.index(p))
        else:
            out.append(2 + len(plus.record) + minus.record.index(p))
    return tuple(out)


def solve_cycle_split(ctx, block: Block, child_tables: dict, h: int, d: int, cap: bool):
    """Merged table for one split of a cycle block, keyed by its boundary images."""
    plus, minus = _half_specs(block, h, d)
    tp = build_half_path_table(ctx, block, plus, child_tables, cap)
    tm = build_half_path_table(ctx, block, minus, child_tables, cap)
    return ctx.merge(tp, tm, _out_index(block, h, d, plus, minus))


def cycle_tables_per_split(ctx, block: Block, child_tables: dict, engine) -> list:
    engine = EngineKind.parse(engine)
    cap = engine == EngineKind.DB
    return [solve_cycle_split(ctx, block, child_tables, h, d, cap)
            for h, d in split_points(block, engine)]


def solve_cycle_block(ctx, block: Block, child_tables: dict, engine):
    if block.kind != CYCLE:
        raise ValueError(f"not a cycle block: {block.key}")
    parts = cycle_tables_per_split(ctx, block, child_tables, engine)
    out = parts[0] if len(parts) == 1 else ctx.add(parts)
    return ctx.seal(out)


def solve_leaf_block(ctx, block: Block, child_tables: dict):
    if block.kind != LEAF:
        raise ValueError(f"not a leaf block: {block.key}")
    t = ctx.start_path(_oriented(ctx, block, 0, 1, 0, child_tables), False, False)
    nc = block.child_on_node
    if 0 in nc:
        t = ctx.node_join(t, child_tables[nc[0]], at_start=True)
    if 1 in nc:
        t = ctx.node_join(t, child_tables[nc[1]])
    return ctx.seal(ctx.project_first(t))


def solve_tree(ctx, tree: DecompositionTree, engine) -> dict:
    """Tables of every block, children before parents."""
    engine = EngineKind.parse(engine)
    out: dict = {}
    for b in tree.blocks:
        if b.kind == LEAF:
            out[b] = solve_leaf_block(ctx, b, out)
        else:
            out[b] = solve_cycle_block(ctx, b, out, engine)
    return out


def block_tables(g: DataGraph, chi: Coloring, tree: DecompositionTree, engine="db") -> dict:
    return solve_tree(LocalContext(g, chi), tree, engine)


def count_with_context(ctx, tree: DecompositionTree, engine) -> int:
    if not tree.blocks:
        # single-node query: every vertex is a colorful match
        return ctx.g.n
    tabs = solve_tree(ctx, tree, engine)
    total = ctx.total(tabs[tree.root_block])
    if total > T.MAX_COUNT:
        raise CountOverflowError(f"colorful count {total} exceeds 64 bits")
    return total


def count_colorful(g: DataGraph, chi: Coloring, tree: DecompositionTree, engine="db",
                   stats: Optional[OpCounter] = None) -> int:
    """Number of colorful matches of ``tree.query`` in ``g`` under ``chi``."""
    return count_with_context(LocalContext(g, chi, stats=stats), tree, engine)
