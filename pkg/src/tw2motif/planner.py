"""Query decomposition into leaf-edge and cycle blocks, and plan selection.

Contraction works on a :class:`QueryState`, a residual query whose nodes and
edges may carry annotations.  Annotations hold finished :class:`Block`
values, so a block's children are reachable directly from the block; tree
ids are assigned only when a :class:`DecompositionTree` is materialised.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ContractError, PlanError, TreewidthError
from .query import QueryGraph

CYCLE = "cycle"
LEAF = "leaf"

MAX_TREES = 10_000


@dataclass(frozen=True, eq=False)
class Block:
    """A contracted leaf edge or cycle.

    ``nodes`` is ``(boundary, leaf)`` for a leaf edge and the cycle order for
    a cycle; edge position ``j`` of a cycle is ``(nodes[j], nodes[j+1 mod L])``.
    ``boundary`` is ordered: it fixes the key order of the block's table.
    """

    kind: str
    nodes: tuple
    boundary: tuple
    node_children: tuple = ()
    edge_children: tuple = ()
    key: str = field(default="", repr=False)

    def __post_init__(self):
        nc = ",".join(f"{p}:{c.key}" for p, c in self.node_children)
        ec = ",".join(f"{p}:{c.key}" for p, c in self.edge_children)
        nodes = ",".join(map(str, self.nodes))
        bnd = ",".join(map(str, self.boundary))
        object.__setattr__(self, "key", f"{self.kind}({nodes}|{bnd}|n[{nc}]|e[{ec}])")

    def __eq__(self, other):
        return isinstance(other, Block) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    @property
    def length(self) -> int:
        return len(self.nodes)

    @property
    def child_on_node(self) -> dict:
        return dict(self.node_children)

    @property
    def child_on_edge(self) -> dict:
        return dict(self.edge_children)

    def children(self) -> list:
        return [c for _, c in self.node_children] + [c for _, c in self.edge_children]

    def edge_nodes(self, pos: int) -> tuple:
        if self.kind == LEAF:
            return self.nodes
        return self.nodes[pos], self.nodes[(pos + 1) % len(self.nodes)]

    def edge_positions(self) -> range:
        return range(1) if self.kind == LEAF else range(len(self.nodes))

    def with_boundary(self, boundary: tuple) -> "Block":
        """Same block with the boundary order changed (transposed table)."""
        if sorted(boundary) != sorted(self.boundary):
            raise ValueError("boundary must be a permutation of the current one")
        return Block(self.kind, self.nodes, tuple(boundary), self.node_children, self.edge_children)


@dataclass(frozen=True, eq=False)
class QueryState:
    """Residual query during contraction."""

    nodes: frozenset
    adj: dict                    # node -> frozenset of neighbours
    node_ann: dict               # node -> Block
    edge_ann: dict               # frozenset({a, b}) -> Block (virtual edges)
    key: tuple = field(default=(), repr=False)

    def __post_init__(self):
        edges = frozenset(
            (frozenset((a, b)), self.edge_ann.get(frozenset((a, b))))
            for a in self.nodes for b in self.adj[a] if a < b
        )
        object.__setattr__(self, "key", (self.nodes, edges, frozenset(self.node_ann.items())))

    @classmethod
    def from_query(cls, q: QueryGraph) -> "QueryState":
        adj = q.adjacency()
        return cls(frozenset(range(q.k)), {a: frozenset(adj[a]) for a in range(q.k)}, {}, {})

    def __eq__(self, other):
        return isinstance(other, QueryState) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def degree(self, a) -> int:
        return len(self.adj[a])

    def describe(self) -> str:
        edges = sorted((a, b) for a in self.nodes for b in self.adj[a] if a < b)
        return f"nodes={sorted(self.nodes)} edges={edges}"


def _as_state(q: Union[QueryGraph, QueryState]) -> QueryState:
    return q if isinstance(q, QueryState) else QueryState.from_query(q)


def _canonical_cycle(cyc: list) -> tuple:
    i = cyc.index(min(cyc))
    rot = cyc[i:] + cyc[:i]
    if rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return tuple(rot)


def induced_cycles(state: QueryState) -> list[tuple]:
    """All chordless cycles of the residual query, canonically ordered."""
    adj = state.adj
    found = set()

    def extend(path, on_path):
        s, last = path[0], path[-1]
        interior = path[1:-1]
        for x in adj[last]:
            if x <= s or x in on_path:
                continue
            if any(x in adj[y] for y in interior):
                continue
            if len(path) >= 2 and s in adj[x]:
                found.add(_canonical_cycle(path + [x]))
                continue
            on_path.add(x)
            path.append(x)
            extend(path, on_path)
            path.pop()
            on_path.discard(x)

    for s in sorted(state.nodes):
        extend([s], {s})
    return sorted(found)


def _cycle_boundary(state: QueryState, cyc: tuple) -> tuple:
    members = set(cyc)
    return tuple(sorted(a for a in cyc if state.adj[a] - members))


def find_blocks(q: Union[QueryGraph, QueryState]) -> list[Block]:
    """Every leaf edge and every contractible cycle of the residual query.

    Returned blocks carry no children yet; :func:`contract_block` attaches
    them.  An empty result on a query with two or more nodes means the
    query has treewidth greater than two.
    """
    state = _as_state(q)
    if len(state.nodes) <= 1:
        return []
    blocks = []
    for b in sorted(state.nodes):
        if state.degree(b) == 1:
            (a,) = state.adj[b]
            blocks.append(Block(LEAF, (a, b), (a,)))
    for cyc in induced_cycles(state):
        bnd = _cycle_boundary(state, cyc)
        if len(bnd) <= 2:
            blocks.append(Block(CYCLE, cyc, bnd))
    return blocks


def contract_block(q: Union[QueryGraph, QueryState], b: Block) -> tuple[QueryState, Block]:
    """Contract ``b`` and return the residual query and the finished block.

    The finished block absorbs every annotation found on its nodes and
    edges; these become its children.
    """
    state = _as_state(q)
    if any(a not in state.nodes for a in b.nodes):
        raise ContractError(f"block {b.key} references nodes not in the query")
    for pos in b.edge_positions():
        x, y = b.edge_nodes(pos)
        if y not in state.adj[x]:
            raise ContractError(f"block {b.key} edge {x}-{y} not in the query")
    if b.kind == LEAF:
        if state.degree(b.nodes[1]) != 1:
            raise ContractError(f"node {b.nodes[1]} is not a leaf")
    else:
        if _cycle_boundary(state, b.nodes) != tuple(sorted(b.boundary)):
            raise ContractError(f"block {b.key} boundary does not match the query")
        if _canonical_cycle(list(b.nodes)) not in induced_cycles(state):
            raise ContractError(f"cycle {b.nodes} is not induced")

    node_children = tuple(
        (i, state.node_ann[a]) for i, a in enumerate(b.nodes) if a in state.node_ann
    )
    edge_children = []
    for pos in b.edge_positions():
        e = frozenset(b.edge_nodes(pos))
        if e in state.edge_ann:
            edge_children.append((pos, state.edge_ann[e]))
    done = Block(b.kind, b.nodes, b.boundary, node_children, tuple(edge_children))

    adj = {a: set(nb) for a, nb in state.adj.items()}
    node_ann = dict(state.node_ann)
    edge_ann = dict(state.edge_ann)
    for pos in b.edge_positions():
        x, y = b.edge_nodes(pos)
        adj[x].discard(y)
        adj[y].discard(x)
        edge_ann.pop(frozenset((x, y)), None)
    keep = set(b.boundary)
    removed = [a for a in b.nodes if a not in keep]
    for a in removed:
        assert not adj[a], f"node {a} still has edges after contraction"
        del adj[a]
        node_ann.pop(a, None)
    if len(b.boundary) == 1:
        node_ann[b.boundary[0]] = done
    elif len(b.boundary) == 2:
        x, y = b.boundary
        node_ann.pop(x, None)
        node_ann.pop(y, None)
        adj[x].add(y)
        adj[y].add(x)
        edge_ann[frozenset((x, y))] = done
    nodes = frozenset(adj)
    new = QueryState(nodes, {a: frozenset(adj[a]) for a in nodes}, node_ann, edge_ann)
    return new, done


@dataclass
class DecompositionTree:
    """Blocks in post-order (children first); the root is the last block.

    ``residual_node`` is set when contraction ended on a single node: the
    count is then the total of the root block's unary table.  When the root
    is a cycle with no boundary nodes it is ``None``.  A one-node query has
    no blocks at all.
    """

    query: QueryGraph
    blocks: list
    residual_node: Optional[int]

    def __post_init__(self):
        self.ids = {b: i for i, b in enumerate(self.blocks)}
        self.parent = {}
        for i, b in enumerate(self.blocks):
            for c in b.children():
                self.parent[self.ids[c]] = i

    @property
    def root(self) -> Optional[int]:
        return len(self.blocks) - 1 if self.blocks else None

    @property
    def root_block(self) -> Optional[Block]:
        return self.blocks[-1] if self.blocks else None

    def canonical(self) -> str:
        root = self.root_block.key if self.blocks else "-"
        return f"{root}@{self.residual_node}"

    def subquery_nodes(self, block: Block) -> set:
        nodes = set(block.nodes)
        for c in block.children():
            nodes |= self.subquery_nodes(c)
        return nodes

    def score(self) -> tuple[int, int, int]:
        """(longest cycle, total boundary nodes, total annotations)."""
        longest = max((b.length for b in self.blocks if b.kind == CYCLE), default=0)
        bnd = sum(len(b.boundary) for b in self.blocks)
        ann = sum(len(b.node_children) + len(b.edge_children) for b in self.blocks)
        return longest, bnd, ann

    def to_dict(self) -> dict:
        q = self.query
        out = []
        for i, b in enumerate(self.blocks):
            out.append({
                "id": i,
                "kind": b.kind,
                "nodes": [q.name(a) for a in b.nodes],
                "boundary": [q.name(a) for a in b.boundary],
                "parent": self.parent.get(i),
                "node_children": {str(p): self.ids[c] for p, c in b.node_children},
                "edge_children": {str(p): self.ids[c] for p, c in b.edge_children},
            })
        return {
            "k": q.k,
            "root": self.root,
            "residual_node": None if self.residual_node is None else q.name(self.residual_node),
            "score": list(self.score()),
            "blocks": out,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _post_order(root: Block) -> list:
    out = []

    def visit(b):
        for c in b.children():
            visit(c)
        out.append(b)

    visit(root)
    return out


def tree_from_root(q: QueryGraph, root: Optional[Block], residual: Optional[int]) -> DecompositionTree:
    return DecompositionTree(q, _post_order(root) if root is not None else [], residual)


def enumerate_trees(q: QueryGraph, cap: int = MAX_TREES) -> list[DecompositionTree]:
    """All decomposition trees of ``q``, deduplicated and sorted canonically."""
    memo: dict = {}

    def finals(state: QueryState) -> frozenset:
        if state in memo:
            return memo[state]
        if len(state.nodes) == 1:
            (a,) = state.nodes
            res = frozenset({(state.node_ann.get(a), a)})
            memo[state] = res
            return res
        cands = find_blocks(state)
        if not cands:
            raise TreewidthError(
                f"query has treewidth > 2: no block in residual {state.describe()}",
                residual=state.describe(),
            )
        res = set()
        for b in cands:
            nxt, done = contract_block(state, b)
            if not nxt.nodes:
                res.add((done, None))
            else:
                res |= finals(nxt)
            if len(res) > cap:
                raise PlanError(f"more than {cap} decomposition trees")
        res = frozenset(res)
        memo[state] = res
        return res

    roots = finals(QueryState.from_query(q))
    trees = [tree_from_root(q, r, a) for r, a in roots]
    trees.sort(key=lambda t: t.canonical())
    return trees


def select_plan(trees: list[DecompositionTree]) -> DecompositionTree:
    if not trees:
        raise PlanError("no decomposition trees to choose from")
    return min(trees, key=lambda t: (t.score(), t.canonical()))


def plan(q: QueryGraph) -> DecompositionTree:
    return select_plan(enumerate_trees(q))
