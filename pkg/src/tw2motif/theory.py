"""Chung-Lu graphs on truncated power-law degrees, and degree- vs id-topped path counts.

``X(q)`` counts directed simple paths ``(u1, ..., uq)`` whose first vertex is
highest in the degree ordering; ``Y(q)`` does the same with a random id
permutation in place of the degree ordering.  Their ratio is the pruning
advantage of ordering by degree.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, ChungLuSpecError
from .graph import DataGraph, degree_rank

log = logging.getLogger(__name__)

MAX_SAMPLE_N = 2**15


def power_law_degrees(n: int, alpha: float, seed=None) -> np.ndarray:
    """Bucketed power law: about ``c*n/2^(alpha*j)`` vertices of degree ``2^j``.

    ``j`` runs over ``0..floor(log2(n)/2)`` so the top degree stays at most
    ``sqrt(n)``.  Buckets ``j >= 1`` are rounded up and degree 1 takes the
    remainder.  The result is shuffled with ``seed``.
    """
    if not 1 < alpha < 2:
        raise ValueError(f"alpha must lie in (1, 2), got {alpha}")
    if n < 4:
        raise ValueError("n must be at least 4")
    top = int(math.floor(0.5 * math.log2(n)))
    c = 1.0 / sum(2.0 ** (-alpha * j) for j in range(top + 1))
    sizes = [0] + [math.ceil(c * n / 2.0 ** (alpha * j)) for j in range(1, top + 1)]
    while sum(sizes) > n:          # only reachable for tiny n
        j = max(i for i, s in enumerate(sizes) if s)
        sizes[j] -= 1
    sizes[0] = n - sum(sizes)
    d = np.repeat(2 ** np.arange(top + 1), sizes).astype(np.int64)
    np.random.default_rng(seed).shuffle(d)
    return d


@dataclass(frozen=True)
class ChungLuSpec:
    d: tuple

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.size == 0:
            raise ChungLuSpecError("empty degree sequence")
        if (d < 1).any():
            raise ChungLuSpecError("every expected degree must be at least 1")
        if d.max() > math.sqrt(d.size) + 1e-9:
            raise ChungLuSpecError(f"max degree {d.max()} exceeds sqrt(n)={math.sqrt(d.size):.3f}")
        if self.m < self.n:
            log.info("sparse spec: m=%.1f is below n=%d", self.m, self.n)

    @classmethod
    def from_degrees(cls, d: Iterable) -> "ChungLuSpec":
        return cls(tuple(float(x) for x in d))

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def m(self) -> float:
        return 0.5 * float(sum(self.d))

    def edge_probability(self, u: int, v: int) -> float:
        return min(1.0, self.d[u] * self.d[v] / (2 * self.m))


GROUPED_MAX_VALUES = 64


def sample_chung_lu(spec: ChungLuSpec, seed=None, method: str = "auto") -> DataGraph:
    """Include each pair ``{u, v}`` independently with ``min(1, d_u d_v / 2m)``.

    ``method="scan"`` flips one coin per pair.  ``method="grouped"`` is for
    sequences with few distinct values: all pairs between two value groups
    share one probability, so it draws a binomial edge count per group pair
    and then that many distinct pairs uniformly, which is the same
    distribution.  ``auto`` picks ``grouped`` when there are at most
    ``GROUPED_MAX_VALUES`` distinct values.
    """
    n = spec.n
    if n > MAX_SAMPLE_N:
        raise ChungLuSpecError(f"pair-scan sampler is limited to n <= {MAX_SAMPLE_N}")
    d = np.asarray(spec.d, dtype=float)
    rng = np.random.default_rng(seed)
    values = np.unique(d)
    if method == "auto":
        method = "grouped" if values.size <= GROUPED_MAX_VALUES else "scan"
    if method == "grouped":
        return _sample_grouped(d, values, 1.0 / (2 * spec.m), rng)
    if method != "scan":
        raise ValueError(f"unknown sampling method {method!r}")
    scale = 1.0 / (2 * spec.m)
    us, vs = [], []
    for u in range(n - 1):
        p = np.minimum(1.0, d[u] * d[u + 1:] * scale)
        hit = np.flatnonzero(rng.random(n - u - 1) < p)
        if hit.size:
            us.append(np.full(hit.size, u, dtype=np.int64))
            vs.append(hit + (u + 1))
    return _graph_from_arrays(n, us, vs)


def _sample_grouped(d: np.ndarray, values: np.ndarray, scale: float, rng) -> DataGraph:
    groups = [np.flatnonzero(d == x) for x in values]
    us, vs = [], []
    for i, gi in enumerate(groups):
        for j in range(i, len(groups)):
            gj = groups[j]
            p = min(1.0, values[i] * values[j] * scale)
            pairs = gi.size * (gi.size - 1) // 2 if i == j else gi.size * gj.size
            if pairs == 0 or p == 0:
                continue
            hits = int(rng.binomial(pairs, p))
            if not hits:
                continue
            t = np.sort(rng.choice(pairs, size=hits, replace=False))
            if i == j:
                # t = a(a-1)/2 + b with b < a
                a = ((1 + np.sqrt(1 + 8 * t.astype(float))) // 2).astype(np.int64)
                a -= (a * (a - 1) // 2 > t)
                a += ((a + 1) * a // 2 <= t)
                b = t - a * (a - 1) // 2
                us.append(gi[a])
                vs.append(gi[b])
            else:
                us.append(gi[t // gj.size])
                vs.append(gj[t % gj.size])
    return _graph_from_arrays(d.size, us, vs)


def _graph_from_arrays(n: int, us: list, vs: list) -> DataGraph:
    if us:
        u = np.concatenate(us)
        v = np.concatenate(vs)
    else:
        u = v = np.zeros(0, dtype=np.int64)
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    bounds = np.searchsorted(src, np.arange(n + 1))
    dl = dst.tolist()
    adj = tuple(tuple(dl[bounds[i]:bounds[i + 1]]) for i in range(n))
    return DataGraph(n=n, adj=adj, m=int(u.size))


def check_balanced(d: Sequence, a_max: int = 2, b_max: int = 2) -> dict:
    """Exact ``sum(d^(a+b)) / (sum(d^a) * sum(d^b))`` for ``1 <= a <= a_max``, ``1 <= b <= b_max``."""
    if a_max < 1 or b_max < 1:
        raise ValueError("a and b start at 1")
    fd = [Fraction(x) for x in d]
    power = {}

    def s(e):
        if e not in power:
            power[e] = sum(x**e for x in fd)
        return power[e]

    return {(a, b): s(a + b) / (s(a) * s(b))
            for a in range(1, a_max + 1) for b in range(1, b_max + 1)}


@dataclass(frozen=True)
class PathStats:
    q: int
    X: int
    Y: int
    total: int

    @property
    def ratio(self) -> float:
        return self.Y / self.X if self.X else math.inf


def random_id_key(n: int, seed=None) -> np.ndarray:
    """A uniformly random id permutation, used as the ordering key for ``Y``."""
    return np.random.default_rng(seed).permutation(n)


def _topped_paths_dfs(g: DataGraph, q: int, key: Sequence[int], budget: int) -> int:
    count = 0
    spent = 0
    for s in range(g.n):
        ks = key[s]
        stack = [(s, iter(g.adj[s]))]
        on = {s}
        while stack:
            x, it = stack[-1]
            for y in it:
                spent += 1
                if spent > budget:
                    raise BudgetExceeded(f"path enumeration budget {budget} exhausted", spent)
                if y in on or key[y] >= ks:
                    continue
                if len(stack) + 1 == q:
                    count += 1
                    continue
                on.add(y)
                stack.append((y, iter(g.adj[y])))
                break
            else:
                stack.pop()
                on.discard(x)
    return count


def topped_paths(g: DataGraph, q: int, key: Sequence[int], budget: int = 10**9) -> int:
    """Directed simple ``q``-vertex paths whose first vertex has the largest key (DFS)."""
    if q < 1:
        raise ValueError("q must be positive")
    if q == 1:
        return g.n
    return _topped_paths_dfs(g, q, key, budget)


def _topped_three_paths(indptr, indices, key) -> int:
    """Vectorised ``q = 3`` count: for a middle vertex m, a neighbour a starts
    ``#{c in N(m): key c < key a}`` topped paths provided ``key a > key m``."""
    n = indptr.size - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    kn = key[indices]
    order = np.lexsort((kn, rows))
    pos = np.arange(indices.size) - indptr[rows]
    kn_sorted = kn[order]
    keep = kn_sorted > key[rows]
    return int(pos[keep].sum())


def total_path_tuples(g: DataGraph, q: int) -> int:
    if q == 3:
        deg = np.asarray(g.degree, dtype=np.int64)
        return int((deg * (deg - 1)).sum())
    return topped_paths(g, q, [0] * g.n) if q == 1 else _all_paths(g, q)


def _all_paths(g: DataGraph, q: int) -> int:
    count = 0

    def rec(x, depth, on):
        nonlocal count
        if depth == q:
            count += 1
            return
        for y in g.adj[x]:
            if y not in on:
                on.add(y)
                rec(y, depth + 1, on)
                on.discard(y)

    for s in range(g.n):
        rec(s, 1, {s})
    return count


def path_stats(g: DataGraph, q: int, ordering=None, id_key=None, seed=None,
               fast: bool = True) -> PathStats:
    """``X`` under the degree ordering and ``Y`` under a random id permutation."""
    rank = np.asarray((ordering or degree_rank(g)).rank, dtype=np.int64)
    ids = np.asarray(id_key if id_key is not None else random_id_key(g.n, seed), dtype=np.int64)
    if q == 3 and fast:
        indptr, indices = g.csr()
        x = _topped_three_paths(indptr, indices, rank)
        y = _topped_three_paths(indptr, indices, ids)
    else:
        x = topped_paths(g, q, rank.tolist())
        y = topped_paths(g, q, ids.tolist())
    return PathStats(q, x, y, total_path_tuples(g, q))


CSV_FIELDS = ("n", "alpha", "seed", "q", "X", "Y", "ratio")


def pathstats_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r[k] for k in CSV_FIELDS})
    return buf.getvalue()


def measure(n: int, alpha: float, seed: int, q: int = 3) -> dict:
    """Sample one Chung-Lu graph and return a CSV-ready row."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n,)))
    d = power_law_degrees(n, alpha, rng)
    g = sample_chung_lu(ChungLuSpec.from_degrees(d), rng)
    st = path_stats(g, q, id_key=random_id_key(n, rng))
    return {"n": n, "alpha": alpha, "seed": seed, "q": q, "X": st.X, "Y": st.Y, "ratio": st.ratio}
