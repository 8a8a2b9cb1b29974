"""Exchange-graph balls and empirical growth classification.

Vertices of the exchange graph are identified through their C-matrices:
two seeds are the same vertex when their C-matrices agree up to a
permutation of columns.  Keys sort the columns and carry B along with the
same permutation.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .exchange_core import (
    ExchangeMatrix,
    Matrix,
    Seed,
    _mutate_seed_raw,
    as_matrix,
    identity,
)

VertexKey = tuple


def _key(b: Matrix, c: Matrix) -> VertexKey:
    n = len(b)
    cols = sorted(range(n), key=lambda j: tuple(c[i][j] for i in range(n)))
    return (
        tuple(tuple(c[i][j] for j in cols) for i in range(n)),
        tuple(tuple(b[i][j] for j in cols) for i in cols),
    )


def vertex_key(s: Seed) -> VertexKey:
    return _key(s.b.entries, s.c)


@dataclass(frozen=True)
class GrowthConfig:
    delta: float = 0.05
    log_ratio_variance: float = 0.01
    slope_tolerance: float = 0.25
    flat_tolerance: float = 0.25
    max_difference: int = 4
    min_radii: int = 6
    tail_fraction: float = 0.5


@dataclass
class Classification:
    kind: str  # Finite | Linear | Polynomial | Exponential | Inconclusive
    degree: int | None = None
    ratio: float | None = None
    slope: float | None = None
    mean_log_ratio: float | None = None

    def __str__(self):
        if self.kind == "Polynomial":
            return f"Polynomial({self.degree})"
        if self.kind == "Exponential":
            return f"Exponential({self.ratio:.4f})"
        return self.kind


@dataclass
class GrowthReport:
    family: str | None
    radius: int
    counts: list[int]
    saturated: bool
    truncated: bool = False
    vertices_visited: int = 0
    wall_time_ms: int = 0
    classification: Classification | None = None
    config: GrowthConfig = field(default_factory=GrowthConfig)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "family": self.family,
            "radius": self.radius,
            "counts": list(self.counts),
            "classification": str(self.classification) if self.classification else None,
            "saturated": self.saturated,
            "truncated": self.truncated,
            "vertices_visited": self.vertices_visited,
            "parameters": asdict(self.config),
        }
        if timing:
            out["wall_time_ms"] = self.wall_time_ms
        return out


def _expand(item, n):
    b, c = item
    out = []
    for k in range(n):
        b2, c2 = _mutate_seed_raw(b, c, k)
        out.append((_key(b2, c2), b2, c2))
    return out


def exchange_graph_ball(b, radius: int, max_vertices: int = 10**6,
                        family: str | None = None,
                        threads: int = 1) -> GrowthReport:
    """Count distinct vertices within each radius of the initial seed.

    ``counts[r]`` is the number of vertices at distance at most ``r``.  As soon as
    more than ``max_vertices`` vertices are seen the search stops, the
    unfinished level is discarded and the report is flagged ``truncated``.  With ``threads > 1`` the mutations of a frontier
    are computed in parallel; insertion into the visited set happens in
    frontier order, so the counts do not depend on scheduling.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if not isinstance(b, ExchangeMatrix):
        b = ExchangeMatrix(b)
    t0 = time.perf_counter()
    n = b.n
    bm, cm = as_matrix(b.entries), identity(n)
    seen = {_key(bm, cm)}
    frontier = [(bm, cm)]
    counts = [1]
    visited = 1
    saturated = False
    truncated = False
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for _ in range(radius):
            if pool is not None:
                expanded = pool.map(lambda it: _expand(it, n), frontier,
                                    chunksize=max(1, len(frontier) // (4 * threads)))
            else:
                expanded = (_expand(it, n) for it in frontier)
            nxt = []
            for group in expanded:
                for key, b2, c2 in group:
                    visited += 1
                    if key not in seen:
                        seen.add(key)
                        nxt.append((b2, c2))
                if len(seen) > max_vertices:
                    truncated = True
                    break
            if truncated:
                # the partial level is dropped; counts stop at the last full radius
                break
            frontier = nxt
            counts.append(len(seen))
            if not frontier:
                saturated = True
                break
    finally:
        if pool is not None:
            pool.shutdown()
    if not frontier and not truncated:
        saturated = True
    elapsed = int((time.perf_counter() - t0) * 1000)
    return GrowthReport(family, radius, counts, saturated, truncated, visited, elapsed)


def _lsq_slope(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope and residual mean square."""
    m = len(xs)
    mx = sum(xs) / m
    my = sum(ys) / m
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    icpt = my - slope * mx
    res = sum((y - icpt - slope * x) ** 2 for x, y in zip(xs, ys)) / m
    return slope, res


def _diffs(seq: Sequence[int], k: int) -> list[int]:
    for _ in range(k):
        seq = [b - a for a, b in zip(seq, seq[1:])]
    return list(seq)


def _log_ratio_stats(vals: Sequence[int]) -> tuple[float, float] | None:
    if len(vals) < 3 or any(v <= 0 for v in vals):
        return None
    lr = [math.log(b / a) for a, b in zip(vals, vals[1:])]
    mean = sum(lr) / len(lr)
    return mean, sum((x - mean) ** 2 for x in lr) / len(lr)


def classify_growth(counts: Sequence[int], saturated: bool,
                    config: GrowthConfig | None = None) -> Classification:
    """Finite, polynomial (Linear is degree 1), exponential or inconclusive.

    Works on the tail window of the counts and of their finite differences
    up to order ``max_difference``.  Growth is exponential when the counts
    and every difference keep a mean log-ratio of at least log(1 + delta)
    with small variance.  Otherwise the degree is the first order whose
    differences end flat: over the second half of the tail window their
    relative spread is within ``flat_tolerance``.  When
    no order flattens, the log-log slope of the counts is used as a fallback
    and accepted only within ``slope_tolerance`` of an integer.
    """
    cfg = config or GrowthConfig()
    if saturated:
        return Classification("Finite")
    if len(counts) < cfg.min_radii:
        return Classification("Inconclusive")
    last = len(counts) - 1
    lo = max(1, int(math.floor(last * (1 - cfg.tail_fraction))))

    def tail(k):
        # k-th difference at index i belongs to radius i + k
        return _diffs(counts, k)[max(0, lo - k):]

    base = _log_ratio_stats(tail(0))
    mean_lr = base[0] if base else None
    threshold = math.log1p(cfg.delta)
    exp_ok = True
    for k in range(cfg.max_difference + 1):
        st = _log_ratio_stats(tail(k))
        if st is None or st[0] < threshold or st[1] > cfg.log_ratio_variance:
            exp_ok = False
            break
    if exp_ok:
        return Classification("Exponential", ratio=math.exp(mean_lr),
                              mean_log_ratio=mean_lr)

    for d in range(1, cfg.max_difference + 1):
        t = tail(d)
        t = t[len(t) // 2:] if len(t) >= 6 else t
        if len(t) < 3 or min(t) <= 0:
            continue
        mean = sum(t) / len(t)
        if (max(t) - min(t)) / mean <= cfg.flat_tolerance:
            return Classification("Linear" if d == 1 else "Polynomial",
                                  degree=d, mean_log_ratio=mean_lr)

    rs = list(range(lo, last + 1))
    if any(counts[r] <= 0 for r in rs):
        return Classification("Inconclusive", mean_log_ratio=mean_lr)
    slope, _ = _lsq_slope([math.log(r) for r in rs], [math.log(counts[r]) for r in rs])
    deg = round(slope)
    if deg >= 1 and abs(slope - deg) <= cfg.slope_tolerance:
        return Classification("Linear" if deg == 1 else "Polynomial", degree=deg,
                              slope=slope, mean_log_ratio=mean_lr)
    return Classification("Inconclusive", slope=slope, mean_log_ratio=mean_lr)


def tail_loglog_slope(counts: Sequence[int], tail_fraction: float = 0.5) -> float:
    """Least-squares slope of log c(r) against log r over the tail window."""
    last = len(counts) - 1
    lo = max(1, int(math.floor(last * (1 - tail_fraction))))
    rs = list(range(lo, last + 1))
    return _lsq_slope([math.log(r) for r in rs], [math.log(counts[r]) for r in rs])[0]


def growth_report(b, radius: int, max_vertices: int = 10**6,
                  family: str | None = None, config: GrowthConfig | None = None,
                  threads: int = 1) -> GrowthReport:
    rep = exchange_graph_ball(b, radius, max_vertices, family, threads)
    rep.config = config or GrowthConfig()
    rep.classification = classify_growth(rep.counts, rep.saturated, rep.config)
    return rep
