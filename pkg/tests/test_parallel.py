import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import DATA, gnp, series_parallel_query
from tw2motif.engine import OpCounter, count_colorful
from tw2motif.graph import coloring_from, from_edges, load_edge_list, random_coloring
from tw2motif.parallel import (
    ParallelContext, parallel_count, parallel_run, partition_vertices, report_json,
)
from tw2motif.planner import plan
from tw2motif.query import SAT, cycle

K3 = from_edges([(0, 1), (1, 2), (0, 2)])


def test_partition_sizes():
    part = partition_vertices(10, 3)
    assert part.sizes() == [4, 3, 3]
    assert [part.owner(v) for v in range(10)] == [0] * 4 + [1] * 3 + [2] * 3
    assert partition_vertices(5, 1).sizes() == [5]
    assert list(part.block(1)) == [4, 5, 6]
    with pytest.raises(ValueError):
        partition_vertices(3, 4)
    with pytest.raises(ValueError):
        partition_vertices(3, 0)


def test_triangle_on_two_workers():
    assert parallel_count(K3, coloring_from([1, 2, 3]), plan(cycle(3)), p=2, debug=True) == 6


def test_edge_shards_are_owned():
    g = gnp(random.Random(3), 12, 0.4)
    ctx = ParallelContext(g, random_coloring(g, 3, 1), partition_vertices(g, 4), debug=True)
    e = ctx.edges()
    ctx.check_ownership(e)
    assert e.gather() == ctx.transpose(e).gather()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["ps", "db"]))
def test_parallel_matches_sequential(seed, engine):
    rng = random.Random(seed)
    q = series_parallel_query(rng, rng.randint(3, 6))
    g = gnp(rng, rng.randint(8, 16), rng.uniform(0.2, 0.6))
    chi = random_coloring(g, q.k, seed)
    t = plan(q)
    stats = OpCounter()
    want = count_colorful(g, chi, t, engine, stats=stats)
    for p in (1, 2, 4, 8):
        got, rep = parallel_run(g, chi, t, engine, p=p, debug=True)
        assert got == want
        # work is only redistributed, never duplicated
        assert sum(rep["per_worker_ops"]) == stats.ops


G30_COLORS = [5, 5, 10, 11, 1, 8, 7, 9, 2, 4, 6, 3, 8, 6, 9, 10, 11, 6, 7, 1, 7, 6, 8, 8, 7, 2, 3,
              3, 10, 2]


def test_sat_on_thirty_vertices():
    g = load_edge_list((DATA / "g30.el").read_text())
    chi = coloring_from(G30_COLORS, 11)
    want = 146742  # frozen from brute_colorful (about 20 s to recompute)
    for p in (1, 4):
        assert parallel_count(g, chi, plan(SAT), "db", p=p, debug=True) == want
    assert count_colorful(g, chi, plan(SAT), "ps") == want


def test_report_fields():
    g = gnp(random.Random(8), 20, 0.3)
    chi = random_coloring(g, 4, 8)
    count, rep = parallel_run(g, chi, plan(cycle(4)), p=4)
    d = json.loads(report_json(rep))
    assert d["p"] == 4 and len(d["per_worker_ops"]) == 4 and d["count"] == count
    assert d["max_ops"] >= d["avg_ops"] and d["rounds"] > 0 and d["messages"] >= 0
    _, single = parallel_run(g, chi, plan(cycle(4)), p=1)
    assert single["messages"] == 0
