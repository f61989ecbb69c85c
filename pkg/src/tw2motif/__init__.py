"""Color-coding subgraph counting for treewidth-2 queries."""

from .engine import EngineKind, count_colorful
from .graph import DataGraph, degree_rank, from_edges, load_edge_list, random_coloring
from .planner import enumerate_trees, plan, select_plan
from .query import QueryGraph, make_query, parse_query

__all__ = [
    "DataGraph", "EngineKind", "QueryGraph", "count_colorful", "degree_rank",
    "enumerate_trees", "from_edges", "load_edge_list", "make_query", "parse_query",
    "plan", "random_coloring", "select_plan",
]
__version__ = "0.1.0"
