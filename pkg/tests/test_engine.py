import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import DATA, gnp, series_parallel_query
from tw2motif.engine import (
    EngineKind, HalfPathSpec, LocalContext, OpCounter, block_tables, build_half_path_table,
    count_colorful, cycle_tables_per_split, solve_cycle_block, solve_leaf_block, solve_tree,
)
from tw2motif.graph import coloring_from, from_edges, load_edge_list, random_coloring
from tw2motif.oracle import brute_colorful, brute_projection
from tw2motif.planner import CYCLE, LEAF, Block, enumerate_trees, plan
from tw2motif.query import BUILTIN, SAT, cycle, make_query, path
from tw2motif.tables import add_tables, is_subtable, transpose

K3 = from_edges([(0, 1), (1, 2), (0, 2)])


def complete(n):
    return from_edges([(u, v) for u in range(n) for v in range(u + 1, n)])


def subquery(q, nodes):
    """Induced subquery, relabelled to 0..len-1, plus the relabelling."""
    nodes = sorted(nodes)
    idx = {a: i for i, a in enumerate(nodes)}
    return make_query(len(nodes), [(idx[a], idx[b]) for a, b in q.induced(nodes)]), idx


@pytest.mark.parametrize("engine", ["ps", "db"])
def test_rainbow_triangle(engine):
    assert count_colorful(K3, coloring_from([1, 2, 3]), plan(cycle(3)), engine) == 6
    assert count_colorful(K3, coloring_from([1, 1, 2], 3), plan(cycle(3)), engine) == 0


@pytest.mark.parametrize("engine", ["ps", "db"])
def test_four_cycle_on_k4(engine):
    assert count_colorful(complete(4), coloring_from([1, 2, 3, 4]), plan(cycle(4)), engine) == 24


def test_sat_on_fixture_graph():
    g = load_edge_list((DATA / "g12.el").read_text())
    chi = coloring_from([5, 5, 10, 11, 1, 8, 7, 9, 2, 4, 6, 3], 11)
    want = 31508  # frozen from the brute-force oracle
    for engine in ("ps", "db"):
        assert count_colorful(g, chi, plan(SAT), engine) == want


def test_ps_half_tables_on_five_cycle():
    g = complete(5)
    chi = coloring_from([1, 2, 3, 4, 5])
    blk = Block(CYCLE, (0, 1, 2, 3, 4), (0, 2))
    ctx = LocalContext(g, chi)
    plus = build_half_path_table(ctx, blk, HalfPathSpec(0, 2, True, False, True), {})
    minus = build_half_path_table(ctx, blk, HalfPathSpec(0, 2, False, True, False), {})
    assert plus == brute_projection(g, path(3), chi, (0, 2))
    assert minus == brute_projection(g, path(4), chi, (0, 3))
    assert (plus.total(), minus.total()) == (60, 120)


def test_db_half_tables_start_at_top_vertex():
    blk = Block(CYCLE, (0, 1, 2), ())
    ctx = LocalContext(K3, coloring_from([1, 2, 3]))
    for h in range(3):
        for cw in (True, False):
            spec = HalfPathSpec(h, (h + 1) % 3, cw, not cw, cw)
            t = build_half_path_table(ctx, blk, spec, {}, cap=True)
            if cw:   # one edge: the start only has to outrank the end
                assert t.entries and all(u > v for u, v, _ in t.entries)
            else:    # two edges cover the whole triangle
                assert t.entries and {k[0] for k in t.entries} == {2}


def test_triangle_splits_sum_to_six():
    blk = Block(CYCLE, (0, 1, 2), ())
    ctx = LocalContext(K3, coloring_from([1, 2, 3]))
    parts = cycle_tables_per_split(ctx, blk, {}, "db")
    assert len(parts) == 3
    assert sum(p.total() for p in parts) == 6


def test_bare_leaf():
    g = from_edges([(0, 1)])
    ctx = LocalContext(g, coloring_from([1, 2]))
    t = solve_leaf_block(ctx, Block(LEAF, (0, 1), (0,)), {})
    assert t.entries == {(0, 0b11): 1, (1, 0b11): 1}


def test_leaf_with_empty_child():
    g = from_edges([(0, 1)])
    ctx = LocalContext(g, coloring_from([1, 2]))
    child = Block(LEAF, (1, 2), (1,))
    from tw2motif.tables import ProjectionTable
    t = solve_leaf_block(ctx, Block(LEAF, (0, 1), (0,), ((1, child),)), {child: ProjectionTable(1)})
    assert len(t) == 0


def test_single_node_query_counts_vertices():
    g = from_edges([(0, 1), (1, 2)])
    assert count_colorful(g, coloring_from([1, 1, 1]), plan(make_query(1, [])), "db") == 3


def test_engine_kind_parse():
    assert EngineKind.parse("PS") is EngineKind.PS
    with pytest.raises(ValueError):
        EngineKind.parse("xx")


def _instance(seed, n_max=9, k_max=6):
    rng = random.Random(seed)
    q = series_parallel_query(rng, rng.randint(2, k_max))
    g = gnp(rng, rng.randint(q.k, n_max), rng.uniform(0.3, 0.9))
    return g, q, random_coloring(g, q.k, seed)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_engines_match_oracle_on_every_tree(seed):
    g, q, chi = _instance(seed)
    want = brute_colorful(g, q, chi)
    for t in enumerate_trees(q)[:8]:
        assert count_colorful(g, chi, t, "ps") == want
        assert count_colorful(g, chi, t, "db") == want


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_engines_match_oracle_larger(seed):
    rng = random.Random(seed)
    q = series_parallel_query(rng, rng.randint(6, 8))
    g = gnp(rng, rng.randint(12, 30), rng.uniform(0.15, 0.35))
    chi = random_coloring(g, q.k, seed)
    want = brute_colorful(g, q, chi)
    t = plan(q)
    assert count_colorful(g, chi, t, "ps") == count_colorful(g, chi, t, "db") == want


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["ps", "db"]))
def test_block_tables_match_oracle_projection(seed, engine):
    g, q, chi = _instance(seed, n_max=8)
    t = plan(q)
    tabs = block_tables(g, chi, t, engine)
    for b in t.blocks:
        sub, idx = subquery(q, t.subquery_nodes(b))
        want = brute_projection(g, sub, chi, [idx[a] for a in b.boundary])
        assert tabs[b] == want, b.key


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_split_tables_partition_ps_table(seed):
    g, q, chi = _instance(seed)
    t = plan(q)
    ctx = LocalContext(g, chi)
    tabs = solve_tree(ctx, t, "ps")
    for b in t.blocks:
        if b.kind == CYCLE:
            parts = cycle_tables_per_split(ctx, b, tabs, "db")
            assert add_tables(parts) == tabs[b]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["ps", "db"]))
def test_boundary_order_transposes(seed, engine):
    g, q, chi = _instance(seed)
    t = plan(q)
    ctx = LocalContext(g, chi)
    tabs = solve_tree(ctx, t, engine)
    for b in t.blocks:
        if b.kind == CYCLE and len(b.boundary) == 2:
            flipped = solve_cycle_block(ctx, b.with_boundary(b.boundary[::-1]), tabs, engine)
            assert flipped == transpose(tabs[b])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_capped_half_tables_are_subtables(seed):
    g, q, chi = _instance(seed)
    t = plan(q)
    ctx = LocalContext(g, chi)
    tabs = solve_tree(ctx, t, "ps")
    for b in t.blocks:
        if b.kind != CYCLE:
            continue
        L = b.length
        for h in range(L):
            d = (h + L // 2) % L
            for cw in (True, False):
                spec = HalfPathSpec(h, d, cw, not cw, cw)
                capped = build_half_path_table(ctx, b, spec, tabs, cap=True)
                free = build_half_path_table(ctx, b, spec, tabs, cap=False)
                assert is_subtable(capped, free)


def test_plan_invariance_on_sat():
    g = load_edge_list((DATA / "g12.el").read_text())
    chi = coloring_from([5, 5, 10, 11, 1, 8, 7, 9, 2, 4, 6, 3], 11)
    counts = {count_colorful(g, chi, t, "db") for t in enumerate_trees(SAT)}
    assert counts == {31508}


def test_op_counter_accumulates():
    st_ = OpCounter()
    count_colorful(complete(5), coloring_from([1, 2, 3, 4, 5]), plan(cycle(5)), "ps", stats=st_)
    assert st_.ops > 0
