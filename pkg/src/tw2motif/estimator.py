"""Multi-trial color-coding estimates of match and subgraph counts."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .engine import EngineKind, OpCounter, count_colorful
from .graph import DataGraph, random_coloring
from .oracle import automorphism_count
from .planner import DecompositionTree, plan
from .query import QueryGraph


def normalizer(k: int) -> Fraction:
    """Inverse probability that a fixed k-set is colorful: k^k / k!."""
    return Fraction(k**k, math.factorial(k))


def trial_seed(seed: int, i: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(i,))


def coefficient_of_variation(values) -> float:
    """Population variance over mean; 0 for a single value or a zero mean."""
    vals = [Fraction(v) for v in values]
    if len(vals) < 2:
        return 0.0
    mean = sum(vals) / len(vals)
    if mean == 0:
        return 0.0
    var = sum((v - mean) ** 2 for v in vals) / len(vals)
    return float(var / mean)


@dataclass
class EstimateReport:
    trials: int
    per_trial_colorful: list
    normalizer: float
    mean_estimate: float
    cv: float
    aut: Optional[int]
    subgraph_estimate: Optional[float]
    wall_time_per_trial: float
    engine: str = "db"
    ops: int = 0

    @property
    def normalized(self) -> list[float]:
        return [c * self.normalizer for c in self.per_trial_colorful]

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def estimate(g: DataGraph, q: QueryGraph, tree: Optional[DecompositionTree] = None,
             engine="db", trials: int = 10, seed: int = 0, counter=None) -> EstimateReport:
    """Average ``k^k/k! * colorful`` over ``trials`` independent colorings.

    ``counter(g, chi, tree, engine, stats)`` replaces the sequential engine
    when given (the parallel runtime plugs in here).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    engine = EngineKind.parse(engine)
    tree = tree if tree is not None else plan(q)
    counter = counter or count_colorful
    stats = OpCounter()
    counts = []
    t0 = time.perf_counter()
    for i in range(trials):
        chi = random_coloring(g, q.k, np.random.default_rng(trial_seed(seed, i)))
        counts.append(int(counter(g, chi, tree, engine, stats=stats)))
    wall = (time.perf_counter() - t0) / trials

    norm = normalizer(q.k)
    mean = Fraction(sum(counts), trials) * norm
    aut = automorphism_count(q) if q.k <= 10 else None
    return EstimateReport(
        trials=trials,
        per_trial_colorful=counts,
        normalizer=float(norm),
        mean_estimate=float(mean),
        cv=coefficient_of_variation(counts),
        aut=aut,
        subgraph_estimate=float(mean / aut) if aut else None,
        wall_time_per_trial=wall,
        engine=engine.value,
        ops=stats.ops,
    )
