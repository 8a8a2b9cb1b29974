"""Diagrams of skew-symmetrizable matrices.

A diagram is stored as its signed weight matrix ``w``: ``w[i][j] = c`` when
there is an edge i -> j of weight c, ``-c`` for an edge j -> i and 0 otherwise.
Vertices are 0-based in this representation; mutation directions are 1-based
as everywhere else in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterable

import networkx as nx

from .exchange_core import (
    ExchangeMatrix,
    Matrix,
    MutationError,
    _check_direction,
)


class RealizabilityError(MutationError):
    """The diagram is not the diagram of any skew-symmetrizable matrix."""


def _is_square(x: int) -> bool:
    return x >= 0 and isqrt(x) ** 2 == x


@dataclass(frozen=True)
class Diagram:
    n: int
    w: Matrix

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]],
                   one_based: bool = False) -> "Diagram":
        off = 1 if one_based else 0
        m = [[0] * n for _ in range(n)]
        for i, j, c in edges:
            i, j, c = int(i) - off, int(j) - off, int(c)
            if not (0 <= i < n and 0 <= j < n):
                raise MutationError(f"edge ({i + off},{j + off}) out of range")
            if i == j:
                raise MutationError("loops are not allowed")
            if c <= 0:
                raise MutationError("edge weights must be positive")
            if m[i][j] or m[j][i]:
                raise MutationError(f"parallel edge between {i + off} and {j + off}")
            m[i][j], m[j][i] = c, -c
        return cls(n, tuple(map(tuple, m)))

    @property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        """Sorted 0-based ``(source, target, weight)`` triples."""
        return tuple(
            (i, j, self.w[i][j])
            for i in range(self.n)
            for j in range(self.n)
            if self.w[i][j] > 0
        )

    def weight(self, i: int, j: int) -> int:
        return abs(self.w[i][j])

    def max_weight(self) -> int:
        return max((abs(x) for r in self.w for x in r), default=0)

    def permute(self, perm) -> "Diagram":
        """New vertex ``i`` is old vertex ``perm[i]``."""
        return Diagram(self.n, tuple(tuple(self.w[a][b] for b in perm) for a in perm))

    def mutate(self, k: int) -> "Diagram":
        return mutate_diagram(self, k)

    def to_text(self) -> str:
        lines = [f"v {self.n}"]
        lines += [f"e {i + 1} {j + 1} {c}" for i, j, c in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Diagram":
        n = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "v" and len(parts) == 2 and n is None:
                n = int(parts[1])
            elif parts[0] == "e" and len(parts) == 4 and n is not None:
                edges.append(tuple(int(x) for x in parts[1:]))
            else:
                raise MutationError(f"line {lineno}: cannot parse {raw!r}")
        if n is None or n <= 0:
            raise MutationError("diagram text must start with 'v N'")
        return cls.from_edges(n, edges, one_based=True)


def diagram_of_matrix(b) -> Diagram:
    if not isinstance(b, ExchangeMatrix):
        b = ExchangeMatrix(b)
    m = b.entries
    n = b.n
    w = tuple(
        tuple(
            -m[i][j] * m[j][i] if m[i][j] > 0 else (m[i][j] * m[j][i] if m[i][j] < 0 else 0)
            for j in range(n)
        )
        for i in range(n)
    )
    return Diagram(n, w)


def _mutate_w(w: Matrix, k: int) -> Matrix:
    """Diagram mutation on the signed weight matrix, 0-based ``k``.

    For a path i -> k -> j with weights a, b write x for the signed root of
    the i-j weight (positive when the edge points i -> j).  The new signed
    root is x + sqrt(ab), which is the square-root rule for triangles.
    """
    n = len(w)
    out = [list(r) for r in w]
    for i in range(n):
        out[i][k] = -w[i][k]
        out[k][i] = -w[k][i]
    for i in range(n):
        a = w[i][k]
        if a <= 0:
            continue
        for j in range(n):
            b = w[k][j]
            if b <= 0 or j == i:
                continue
            ab = a * b
            c = w[i][j]
            if c == 0:
                out[i][j], out[j][i] = ab, -ab
                continue
            cc = abs(c)
            prod = ab * cc
            r = isqrt(prod)
            if r * r != prod:
                raise RealizabilityError(
                    f"triangle ({i + 1},{k + 1},{j + 1}) has non-square weight product"
                )
            if c > 0:
                d = cc + ab + 2 * r
                sign = 1
            else:
                d = cc + ab - 2 * r
                sign = 1 if ab > cc else -1
            out[i][j], out[j][i] = sign * d, -sign * d
    return tuple(map(tuple, out))


def mutate_diagram(d: Diagram, k: int) -> Diagram:
    idx = _check_direction(d.n, k)
    return Diagram(d.n, _mutate_w(d.w, idx))


def _undirected(d: Diagram) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(d.n))
    g.add_edges_from((i, j) for i, j, _ in d.edges)
    return g


def is_realizable(d: Diagram) -> bool:
    """Every chordless cycle must have a perfect-square weight product."""
    for cyc in nx.chordless_cycles(_undirected(d)):
        prod = 1
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            prod *= abs(d.w[a][b])
        if not _is_square(prod):
            return False
    return True


def _factorizations(c: int) -> list[tuple[int, int]]:
    """Pairs (p, q) with p*q = c, in order of preference."""
    pairs = [(p, c // p) for p in range(1, c + 1) if c % p == 0]
    r = isqrt(c)
    first = [(r, r)] if r * r == c else []
    ge = sorted((pq for pq in pairs if pq[0] > pq[1]), key=lambda pq: pq[0])
    lt = sorted((pq for pq in pairs if pq[0] < pq[1]), key=lambda pq: pq[1])
    return first + ge + lt


def matrix_of_diagram(d: Diagram) -> ExchangeMatrix:
    """Deterministic matrix with diagram ``d``.

    Each weight c on i -> j is split as b_ij = p, b_ji = -q with p*q = c,
    preferring p = q and then p > q.  Choices on a spanning forest fix the
    symmetrizer ratios; the remaining edges are then forced, and a
    backtracking search over the forest choices finds a consistent one.
    """
    from fractions import Fraction

    if not is_realizable(d):
        raise RealizabilityError("diagram is not realizable")
    n = d.n
    g = _undirected(d)
    order: list[tuple[int, int]] = []  # forest edges (parent, child)
    roots = []
    seen = set()
    for r in range(n):
        if r in seen:
            continue
        roots.append(r)
        seen.add(r)
        for a, b in nx.bfs_edges(g, r, sort_neighbors=sorted):
            order.append((a, b))
            seen.add(b)

    ratio: dict[int, Fraction] = {r: Fraction(1) for r in roots}

    def check(v: int) -> bool:
        # every edge from v to an already-placed vertex must factor
        for u in range(n):
            c = abs(d.w[v][u])
            if c == 0 or u not in ratio or u == v:
                continue
            # d_i p = d_j q with i -> j and p q = c
            i, j = (v, u) if d.w[v][u] > 0 else (u, v)
            p2 = Fraction(c) * ratio[j] / ratio[i]
            if p2.denominator != 1 or not _is_square(p2.numerator):
                return False
            if c % isqrt(p2.numerator):
                return False
        return True

    def solve(t: int) -> bool:
        if t == len(order):
            return True
        a, b = order[t]
        c = abs(d.w[a][b])
        for p, q in _factorizations(c):
            # p = b_ij for the edge i -> j
            if d.w[a][b] > 0:
                ratio[b] = ratio[a] * Fraction(p, q)
            else:
                ratio[b] = ratio[a] * Fraction(q, p)
            if check(b) and solve(t + 1):
                return True
            del ratio[b]
        return False

    if not solve(0):
        raise RealizabilityError("no consistent factorization found")
    m = [[0] * n for _ in range(n)]
    for i, j, c in d.edges:
        p = isqrt(int(Fraction(c) * ratio[j] / ratio[i]))
        m[i][j], m[j][i] = p, -(c // p)
    return ExchangeMatrix(m)


# ---------------------------------------------------------------------------
# Canonical forms


CanonicalKey = bytes


def _refine(w: Matrix, cells: list[list[int]]) -> list[list[int]]:
    """Equitable refinement: split cells by signed-weight counts into cells."""
    n = len(w)
    while True:
        cell_of = [0] * n
        for ci, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = ci
        new: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new.append(cell)
                continue
            sig = {}
            for v in cell:
                prof = tuple(sorted((cell_of[u], w[v][u]) for u in range(n) if w[v][u]))
                sig.setdefault(prof, []).append(v)
            if len(sig) > 1:
                changed = True
                for key in sorted(sig):
                    new.append(sig[key])
            else:
                new.append(cell)
        cells = new
        if not changed:
            return cells


def _twins(w: Matrix, a: int, b: int) -> bool:
    if w[a][b]:
        return False
    return all(w[a][u] == w[b][u] for u in range(len(w)) if u != a and u != b)


def canonical_perm(d: Diagram) -> tuple[int, ...]:
    """Vertex order giving the lexicographically least relabelled matrix.

    Individualisation-refinement over every branch (exact); twin vertices
    in a cell are interchangeable, so only one of them is branched on.
    """
    w = d.w
    n = d.n
    if n == 0:
        return ()
    start = _refine(w, [list(range(n))])
    best: list = [None, None]

    def encode(order):
        return tuple(w[a][b] for a in order for b in order)

    def search(cells):
        if all(len(c) == 1 for c in cells):
            order = tuple(c[0] for c in cells)
            code = encode(order)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, order
            return
        idx = next(i for i, c in enumerate(cells) if len(c) > 1)
        cell = cells[idx]
        tried: list[int] = []
        for v in cell:
            if any(_twins(w, v, u) for u in tried):
                continue
            tried.append(v)
            rest = [u for u in cell if u != v]
            search(_refine(w, cells[:idx] + [[v], rest] + cells[idx + 1:]))

    search(start)
    return best[1]


def canonical_form(d: Diagram) -> CanonicalKey:
    order = canonical_perm(d)
    body = ",".join(str(d.w[a][b]) for a in order for b in order)
    return f"{d.n}:{body}".encode()


def labeled_key(d: Diagram) -> CanonicalKey:
    return (f"{d.n}:" + ",".join(str(x) for r in d.w for x in r)).encode()
