import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import check_tree, series_parallel_query
from tw2motif.errors import ContractError, PlanError, QueryError, TreewidthError
from tw2motif.planner import (
    CYCLE, LEAF, Block, QueryState, contract_block, enumerate_trees, find_blocks, plan, select_plan,
)
from tw2motif.query import BUILTIN, SAT, TWO_CYCLES, cycle, make_query, parse_query, path, star

ID = {c: i for i, c in enumerate("abcdefghijk")}


def names(q, nodes):
    return "".join(q.name(a) for a in nodes)


def kinds(blocks):
    return {(b.kind, names(SAT, b.nodes), names(SAT, b.boundary)) for b in blocks}


def test_sat_candidates():
    found = kinds(find_blocks(SAT))
    assert ("cycle", "abcde", "ac") in found
    assert ("cycle", "ijk", "i") in found
    assert ("leaf", "fh", "f") in found


def test_sat_fgi_not_contractible():
    fgi = {ID["f"], ID["g"], ID["i"]}
    assert all(set(b.nodes) != fgi for b in find_blocks(SAT))


def test_single_edge_two_leaves():
    blocks = find_blocks(path(2))
    assert [(b.kind, b.nodes, b.boundary) for b in blocks] == [(LEAF, (1, 0), (1,)), (LEAF, (0, 1), (0,))]


def test_contract_adds_virtual_edge():
    b1 = next(b for b in find_blocks(SAT) if names(SAT, b.nodes) == "abcde")
    state, done = contract_block(SAT, b1)
    a, c = ID["a"], ID["c"]
    assert c in state.adj[a]
    assert state.edge_ann[frozenset((a, c))] is done
    assert not {ID[x] for x in "bde"} & state.nodes


def test_contract_annotates_single_boundary():
    state = QueryState.from_query(SAT)
    for want in ("abcde", "fh", "acgf"):
        b = next(b for b in find_blocks(state) if names(SAT, b.nodes) in (want, want[::-1], "afgc"))
        state, _ = contract_block(state, b)
    ijk = next(b for b in find_blocks(state) if names(SAT, b.nodes) == "ijk")
    state, done = contract_block(state, ijk)
    assert state.node_ann[ID["i"]] is done


def test_contract_whole_triangle():
    (b,) = find_blocks(cycle(3))
    state, done = contract_block(cycle(3), b)
    assert not state.nodes and done.boundary == ()


def test_contract_rejects_foreign_block():
    with pytest.raises(ContractError):
        contract_block(cycle(4), Block(CYCLE, (0, 1, 2), ()))


def test_reference_tree_is_enumerated():
    def block(nodes, bnd):
        return names(SAT, nodes), set(names(SAT, bnd))

    found = False
    for t in enumerate_trees(SAT):
        root = t.root_block
        if set(names(SAT, root.nodes)) != set("fgi") or root.boundary:
            continue
        kids = {names(SAT, c.nodes): c for c in root.children()}
        mid = next((c for k, c in kids.items() if set(k) == set("acgf")), None)
        tri = next((c for k, c in kids.items() if set(k) == set("ijk")), None)
        if mid is None or tri is None or set(names(SAT, tri.boundary)) != {"i"}:
            continue
        inner = {(frozenset(names(SAT, c.nodes)), frozenset(names(SAT, c.boundary))) for c in mid.children()}
        if inner == {(frozenset("abcde"), frozenset("ac")), (frozenset("fh"), frozenset("f"))}:
            assert len(t.blocks) == 5
            found = True
    assert found


def test_two_cycle_query_has_two_trees():
    trees = enumerate_trees(TWO_CYCLES)
    assert len(trees) == 2
    for t in trees:
        assert sorted(b.length for b in t.blocks) == [4, 6]
    assert {t.root_block.length for t in trees} == {4, 6}


def test_triangle_one_tree():
    (t,) = enumerate_trees(cycle(3))
    assert t.root_block.kind == CYCLE and t.residual_node is None


def test_single_node_query():
    (t,) = enumerate_trees(make_query(1, []))
    assert t.blocks == [] and t.residual_node == 0


def test_select_plan_contract():
    trees = enumerate_trees(SAT)
    best = select_plan(trees)
    assert best.score() == min(t.score() for t in trees)
    assert select_plan([trees[3]]) is trees[3]
    assert select_plan(list(reversed(trees))).canonical() == best.canonical()
    with pytest.raises(PlanError):
        select_plan([])


def test_k4_is_rejected():
    k4 = make_query(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    with pytest.raises(TreewidthError) as err:
        enumerate_trees(k4)
    assert err.value.exit_code == 3 and "edges" in err.value.residual


def test_tree_cap():
    with pytest.raises(PlanError):
        enumerate_trees(SAT, cap=3)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtin_trees_are_well_formed(name):
    trees = enumerate_trees(BUILTIN[name])
    assert len({t.canonical() for t in trees}) == len(trees)
    for t in trees:
        check_tree(t)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.integers(0, 10**6))
def test_series_parallel_queries_decompose(k, seed):
    q = series_parallel_query(random.Random(seed), k)
    for t in enumerate_trees(q):
        check_tree(t)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10**6))
def test_blocks_remain_until_done(k, seed):
    """Contracting any available block leaves a query that still has one."""
    rng = random.Random(seed)
    state = QueryState.from_query(series_parallel_query(rng, k))
    while len(state.nodes) > 1:
        cands = find_blocks(state)
        assert cands
        state, _ = contract_block(state, rng.choice(cands))


def test_plan_json_round_trip():
    d = plan(SAT).to_dict()
    assert d["k"] == 11 and len(d["blocks"]) == 5
    roots = [b for b in d["blocks"] if b["parent"] is None]
    assert len(roots) == 1 and roots[0]["id"] == d["root"]


def test_query_file_parsing():
    q = parse_query("# names: x y z\n3\n0 1\n1 2\n")
    assert q.names == ("x", "y", "z") and q.edge_list() == [(0, 1), (1, 2)]
    for bad in ("", "3\n0 1 2\n", "3\n0 x\n", "2\n0 0\n", "2\n0 1\n1 0\n", "3\n0 1\n", "40\n"):
        with pytest.raises(QueryError):
            parse_query(bad)


def test_shapes():
    assert star(4).adjacency()[0] == {1, 2, 3}
    assert len(cycle(5).edges) == 5 and len(path(4).edges) == 3
