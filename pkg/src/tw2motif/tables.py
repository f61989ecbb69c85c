"""Projection tables and the join primitives the engines are built from.

A table maps a flat key tuple ``(*key_vertices, *recorded, signature)`` to a
positive count.  ``arity`` is the number of key vertices (0, 1 or 2) and
``n_rec`` the number of recorded boundary-vertex slots that follow them.
Signatures are color bitsets: color ``c`` is bit ``c - 1``.

Joins take ``vbits`` (per-vertex color bit) and, where the degree cap is
used, ``rank`` from :func:`tw2motif.graph.degree_rank`.  ``stats`` is any
object with an integer ``ops`` attribute; every candidate pair a join looks
at increments it.
"""

from __future__ import annotations

from bisect import bisect_left
from typing import Iterable, Optional, Sequence

from .errors import CountOverflowError, SchemaError
from .graph import Coloring, DataGraph

MAX_COUNT = 2**64 - 1


class ProjectionTable:
    __slots__ = ("arity", "n_rec", "entries", "block", "boundary", "_first_index", "_vertex_index")

    def __init__(self, arity: int, entries: Optional[dict] = None, n_rec: int = 0,
                 block=None, boundary: tuple = ()):
        if arity not in (0, 1, 2):
            raise SchemaError(f"key arity must be 0, 1 or 2, got {arity}")
        self.arity = arity
        self.n_rec = n_rec
        self.entries = {} if entries is None else entries
        self.block = block
        self.boundary = tuple(boundary)
        self._first_index = None
        self._vertex_index = {}

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, ProjectionTable):
            return NotImplemented
        return (self.arity, self.n_rec, self.entries) == (other.arity, other.n_rec, other.entries)

    def __repr__(self):
        return f"ProjectionTable(arity={self.arity}, n_rec={self.n_rec}, entries={len(self.entries)})"

    def seal(self) -> "ProjectionTable":
        """Reject counts that do not fit an unsigned 64-bit word."""
        for key, c in self.entries.items():
            if c > MAX_COUNT:
                raise CountOverflowError(f"count {c} for key {key} exceeds 64 bits")
        return self

    def total(self) -> int:
        return sum(self.entries.values())

    def signature_sizes(self) -> set:
        return {bin(key[-1]).count("1") for key in self.entries}

    def validate(self):
        for key, c in self.entries.items():
            assert len(key) == self.arity + self.n_rec + 1, f"bad key width {key}"
            assert c > 0, f"non-positive count at {key}"
            assert c <= MAX_COUNT
        assert len(self.signature_sizes()) <= 1, "mixed signature sizes"

    def dump(self) -> str:
        """One ``u v [x [y]] bitmask count`` line per entry, sorted."""
        return "".join(
            " ".join(str(x) for x in key) + f" {c}\n" for key, c in sorted(self.entries.items())
        )

    def first_index(self, rank: Sequence[int]) -> dict:
        """Binary table grouped by first key vertex, rows sorted by rank of the second.

        Returns ``v -> (ranks, items)`` where ``items[i] = (w, sig, count)``
        and ``ranks[i] = rank[w]`` ascending, so a degree cap is a prefix.
        """
        if self.arity != 2 or self.n_rec:
            raise SchemaError("first_index needs a plain binary table")
        if self._first_index is None:
            rows: dict = {}
            for (v, w, sig), c in self.entries.items():
                rows.setdefault(v, []).append((rank[w], w, sig, c))
            idx = {}
            for v, row in rows.items():
                row.sort()
                idx[v] = ([r[0] for r in row], [(w, s, c) for _, w, s, c in row])
            self._first_index = idx
        return self._first_index

    def vertex_index(self, pos: int) -> dict:
        """Group entries by the key vertex at ``pos``: ``v -> [(key, count)]``."""
        if pos not in self._vertex_index:
            idx: dict = {}
            for key, c in self.entries.items():
                idx.setdefault(key[pos], []).append((key, c))
            self._vertex_index[pos] = idx
        return self._vertex_index[pos]


def edge_table(g: DataGraph, chi: Coloring) -> ProjectionTable:
    """Both orientations of every bichromatic edge, each with count 1."""
    bits = chi.bits()
    entries = {}
    for u in range(g.n):
        bu = bits[u]
        for v in g.adj[u]:
            if bits[v] != bu:
                entries[(u, v, bu | bits[v])] = 1
    return ProjectionTable(2, entries)


def transpose(t: ProjectionTable) -> ProjectionTable:
    if t.arity != 2:
        raise SchemaError("transpose needs a binary-keyed table")
    out = {(k[1], k[0]) + k[2:]: c for k, c in t.entries.items()}
    return ProjectionTable(2, out, t.n_rec, t.block, t.boundary[::-1])


def start_path(t: ProjectionTable, rank: Optional[Sequence[int]] = None,
               record: bool = False) -> ProjectionTable:
    """First edge of a half path: optionally keep only ``u`` higher than ``v``
    and optionally record ``v`` in a boundary slot."""
    if t.arity != 2 or t.n_rec:
        raise SchemaError("a half path starts from a plain binary table")
    out = {}
    for (u, v, sig), c in t.entries.items():
        if rank is not None and rank[u] <= rank[v]:
            continue
        out[(u, v, v, sig) if record else (u, v, sig)] = c
    return ProjectionTable(2, out, 1 if record else 0)


def edge_join(t: ProjectionTable, right: ProjectionTable, vbits: Sequence[int],
              rank: Sequence[int], cap: bool = False, record: bool = False,
              stats=None) -> ProjectionTable:
    """Extend every ``(u, v, ...)`` by a right entry ``(v, w)``.

    Signatures must overlap exactly in ``chi(v)``.  With ``cap`` the new end
    ``w`` must rank below the start ``u``.  With ``record`` ``w`` is appended
    to the recorded slots.
    """
    if t.arity != 2:
        raise SchemaError("edge_join extends a binary-keyed table")
    if right.arity != 2 or right.n_rec:
        raise SchemaError("edge_join needs a plain binary right table")
    idx = right.first_index(rank)
    out: dict = {}
    get = out.get
    ops = 0
    for key, c1 in t.entries.items():
        v = key[1]
        row = idx.get(v)
        if row is None:
            continue
        ranks, items = row
        stop = bisect_left(ranks, rank[key[0]]) if cap else len(items)
        if not stop:
            continue
        u = key[0]
        a1 = key[-1]
        mid = key[2:-1]
        vb = vbits[v]
        ops += stop
        for i in range(stop):
            w, a2, c2 = items[i]
            if a1 & a2 != vb:
                continue
            nk = (u, w) + mid + ((w, a1 | a2) if record else (a1 | a2,))
            out[nk] = get(nk, 0) + c1 * c2
    if stats is not None:
        stats.ops += ops
    return ProjectionTable(2, out, t.n_rec + (1 if record else 0))


def node_join(t: ProjectionTable, unary: ProjectionTable, vbits: Sequence[int],
              at_start: bool = False, stats=None) -> ProjectionTable:
    """Attach a unary table at the trailing key vertex (or the first with ``at_start``).

    Signatures must overlap exactly in the shared vertex's color.
    """
    if unary.arity != 1 or unary.n_rec:
        raise SchemaError("node_join needs a plain unary table")
    if t.arity == 0:
        raise SchemaError("node_join needs a keyed table")
    pos = 0 if at_start else t.arity - 1
    idx = unary.vertex_index(0)
    out: dict = {}
    get = out.get
    ops = 0
    for key, c1 in t.entries.items():
        v = key[pos]
        row = idx.get(v)
        if row is None:
            continue
        a1 = key[-1]
        vb = vbits[v]
        head = key[:-1]
        ops += len(row)
        for (_, a2), c2 in row:
            if a1 & a2 != vb:
                continue
            nk = head + (a1 | a2,)
            out[nk] = get(nk, 0) + c1 * c2
    if stats is not None:
        stats.ops += ops
    return ProjectionTable(t.arity, out, t.n_rec)


def merge_halves(plus: ProjectionTable, minus: ProjectionTable, vbits: Sequence[int],
                 out_index: Sequence[int] = (0, 1), stats=None) -> ProjectionTable:
    """Join two half paths sharing both endpoints ``(u, v)``.

    Signatures must overlap exactly in ``{chi(u), chi(v)}``.  The output key
    picks positions out of ``(u, v, *plus_recorded, *minus_recorded)`` via
    ``out_index``; ``()`` yields a scalar (signature-only) table.
    """
    if plus.arity != 2 or minus.arity != 2:
        raise SchemaError("merge_halves needs two binary-keyed tables")
    width = 2 + plus.n_rec + minus.n_rec
    if any(not 0 <= i < width for i in out_index):
        raise SchemaError(f"output index {tuple(out_index)} outside key width {width}")
    idx: dict = {}
    for key, c in minus.entries.items():
        idx.setdefault((key[0], key[1]), []).append((key[2:-1], key[-1], c))
    out: dict = {}
    get = out.get
    ops = 0
    plain = tuple(out_index) == (0, 1)
    for key, c1 in plus.entries.items():
        u, v = key[0], key[1]
        row = idx.get((u, v))
        if row is None:
            continue
        a1 = key[-1]
        need = vbits[u] | vbits[v]
        ops += len(row)
        for rec2, a2, c2 in row:
            if a1 & a2 != need:
                continue
            if plain:
                nk = (u, v, a1 | a2)
            else:
                full = key[:-1] + rec2
                nk = tuple(full[i] for i in out_index) + (a1 | a2,)
            out[nk] = get(nk, 0) + c1 * c2
    if stats is not None:
        stats.ops += ops
    return ProjectionTable(len(out_index), out)


def project_first(t: ProjectionTable) -> ProjectionTable:
    """Sum a binary table over its second key vertex."""
    if t.arity != 2 or t.n_rec:
        raise SchemaError("project_first needs a plain binary table")
    out: dict = {}
    for (u, _, sig), c in t.entries.items():
        out[(u, sig)] = out.get((u, sig), 0) + c
    return ProjectionTable(1, out)


def add_tables(tables: Iterable[ProjectionTable]) -> ProjectionTable:
    tables = list(tables)
    if not tables:
        raise SchemaError("nothing to add")
    arity, n_rec = tables[0].arity, tables[0].n_rec
    out: dict = {}
    for t in tables:
        if (t.arity, t.n_rec) != (arity, n_rec):
            raise SchemaError("cannot add tables with different layouts")
        for k, c in t.entries.items():
            out[k] = out.get(k, 0) + c
    return ProjectionTable(arity, out, n_rec)


def is_subtable(small: ProjectionTable, big: ProjectionTable) -> bool:
    """Every key of ``small`` is in ``big`` with at least the same count."""
    return all(big.entries.get(k, 0) >= c for k, c in small.entries.items())
