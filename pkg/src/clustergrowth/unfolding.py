"""Unfoldings of skew-symmetrizable matrices.

An unfolding of an n x n matrix ``b`` is a skew-symmetric m x m matrix
``c`` with the indices 1..m split into blocks E_1..E_n, |E_i| = d_i,
where b*diag(d) is skew-symmetric.  Every column of the E_i x E_j block of
``c`` sums to b_ij, the block is entrywise nonnegative when b_ij >= 0, and
both facts survive composite mutations (mutate at every index of E_i).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Sequence

from .exchange_core import (
    ExchangeMatrix,
    Matrix,
    MutationError,
    MutationWord,
    _check_direction,
    _mutate_rows,
    as_matrix,
    is_skew_symmetrizable,
)


class UnfoldingError(MutationError):
    """Malformed unfolding data or a failed composite mutation."""


def unfolding_dims(b) -> tuple[int, ...]:
    """Least positive d with b*diag(d) skew-symmetric."""
    m = b.entries if isinstance(b, ExchangeMatrix) else as_matrix(b)
    s = is_skew_symmetrizable(tuple(zip(*m)))
    if s is None:
        raise UnfoldingError("matrix is not skew-symmetrizable")
    return s.d


@dataclass(frozen=True)
class UnfoldingSpec:
    b: Matrix
    partition: tuple  # 0-based index tuples
    c: Matrix
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def m(self) -> int:
        return len(self.c)

    @property
    def d(self) -> tuple[int, ...]:
        return tuple(len(e) for e in self.partition)

    @classmethod
    def make(cls, b, partition, c, name: str = "", one_based: bool = False):
        off = 1 if one_based else 0
        part = tuple(tuple(int(x) - off for x in e) for e in partition)
        return cls(as_matrix(b.entries if isinstance(b, ExchangeMatrix) else b),
                   part, as_matrix(c), name)

    @classmethod
    def trivial(cls, b) -> "UnfoldingSpec":
        """c = b with singleton blocks; only skew-symmetric b qualify."""
        bm = as_matrix(b.entries if isinstance(b, ExchangeMatrix) else b)
        if any(bm[i][j] != -bm[j][i] for i in range(len(bm)) for j in range(len(bm))):
            raise UnfoldingError("a trivial unfolding needs a skew-symmetric matrix")
        return cls(bm, tuple((i,) for i in range(len(bm))), bm, "trivial")

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"# {self.name}")
        lines.append(f"B {self.n}")
        lines += [" ".join(str(x) for x in r) for r in self.b]
        for i, e in enumerate(self.partition):
            lines.append(f"E {i + 1}: " + " ".join(str(x + 1) for x in e))
        lines.append(f"C {self.m}")
        lines += [" ".join(str(x) for x in r) for r in self.c]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "UnfoldingSpec":
        name = ""
        rows = []
        for raw in text.splitlines():
            if raw.startswith("#") and not name and not rows:
                name = raw[1:].strip()
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append(line)
        it = iter(rows)

        def block(tag):
            head = next(it, None)
            if head is None or not head.startswith(tag):
                raise UnfoldingError(f"expected '{tag} <size>' line")
            size = int(head.split()[1])
            return [tuple(int(x) for x in next(it).split()) for _ in range(size)]

        try:
            b = block("B")
            part = {}
            line = None
            for line in it:
                if not line.startswith("E"):
                    break
                head, _, body = line.partition(":")
                part[int(head.split()[1])] = tuple(int(x) - 1 for x in body.split())
                line = None
            if line is None or not line.startswith("C"):
                raise UnfoldingError("expected 'C <size>' line after the partition")
            size = int(line.split()[1])
            c = [tuple(int(x) for x in next(it).split()) for _ in range(size)]
        except (StopIteration, ValueError, IndexError) as e:
            raise UnfoldingError(f"cannot parse unfolding file: {e}") from None
        if sorted(part) != list(range(1, len(b) + 1)):
            raise UnfoldingError("partition must list E 1 .. E n")
        return cls(as_matrix(b), tuple(part[i] for i in sorted(part)), as_matrix(c), name)


@dataclass
class StaticCheck:
    ok: bool
    diagnostics: list

    def __bool__(self):
        return self.ok


def _partition_problem(spec: UnfoldingSpec) -> str | None:
    if len(spec.partition) != spec.n:
        return f"partition has {len(spec.partition)} blocks for a {spec.n} x {spec.n} matrix"
    flat = [x for e in spec.partition for x in e]
    if sorted(flat) != list(range(spec.m)):
        return "partition blocks must be disjoint and cover 1..m"
    if any(len(e) == 0 for e in spec.partition):
        return "empty partition block"
    return None


def _violations(b, partition, c, first_only=False) -> list[str]:
    out = []
    m = len(c)
    for i in range(m):
        for j in range(i, m):
            if c[i][j] != -c[j][i]:
                out.append(f"c is not skew-symmetric at ({i + 1},{j + 1})")
                if first_only:
                    return out
    for i, ei in enumerate(partition):
        for j, ej in enumerate(partition):
            bij = b[i][j]
            for col in ej:
                s = sum(c[r][col] for r in ei)
                if s != bij:
                    out.append(f"block E{i + 1} x E{j + 1}: column {col + 1} sums to {s}, "
                               f"expected b_{i + 1}{j + 1} = {bij}")
                    if first_only:
                        return out
                    break
            if bij >= 0 and any(c[r][col] < 0 for r in ei for col in ej):
                out.append(f"block E{i + 1} x E{j + 1} has a negative entry "
                           f"although b_{i + 1}{j + 1} = {bij} >= 0")
                if first_only:
                    return out
    return out


def check_unfolding_static(spec: UnfoldingSpec) -> StaticCheck:
    """Conditions (column sums, nonnegativity) for ``spec`` as given."""
    problem = _partition_problem(spec)
    if problem:
        raise UnfoldingError(problem)
    diags = []
    bd = [[spec.b[i][j] * spec.d[j] for j in range(spec.n)] for i in range(spec.n)]
    if any(bd[i][j] != -bd[j][i] for i in range(spec.n) for j in range(spec.n)):
        diags.append("b * diag(|E_i|) is not skew-symmetric")
    diags += _violations(spec.b, spec.partition, spec.c)
    return StaticCheck(not diags, diags)


def _mutate_c(c: Matrix, idxs: Sequence[int]) -> Matrix:
    for k in idxs:
        c = _mutate_rows(c, k)
    return c


def composite_mutate(spec: UnfoldingSpec, i: int) -> UnfoldingSpec:
    """Mutate ``b`` at ``i`` (1-based) and ``c`` at every index of E_i.

    The indices of E_i are applied in two orders; differing results mean
    the mutations do not commute and raise :class:`UnfoldingError`.
    """
    idx = _check_direction(spec.n, i)
    block = spec.partition[idx]
    c1 = _mutate_c(spec.c, block)
    if len(block) > 1:
        c2 = _mutate_c(spec.c, block[::-1])
        if c1 != c2:
            raise UnfoldingError(
                f"mutations in E{i} do not commute (nonzero E{i} x E{i} block)")
    return UnfoldingSpec(_mutate_rows(spec.b, idx), spec.partition, c1, spec.name)


@dataclass
class UnfoldingResult:
    verified: bool
    depth: int
    nodes: int
    saturated: bool = False
    witness: MutationWord | None = None
    diagnostics: list | None = None
    limit_hit: bool = False

    def exit_code(self) -> int:
        if not self.verified:
            return 1
        return 2 if self.limit_hit else 0

    def to_dict(self) -> dict:
        out = {"verdict": "Verified" if self.verified else "Violation",
               "depth": self.depth, "nodes": self.nodes,
               "saturated": self.saturated, "limit_hit": self.limit_hit}
        if self.witness is not None:
            out["witness"] = str(self.witness)
            out["diagnostics"] = self.diagnostics
        return out


def verify_unfolding(spec: UnfoldingSpec, depth: int = 6,
                     max_nodes: int = 10**5) -> UnfoldingResult:
    """Breadth-first search over composite-mutation words up to ``depth``.

    Nodes are the pairs (b, c); the first node violating the conditions is
    reported with the shortest word reaching it.  ``saturated`` means the
    search closed before reaching the depth.
    """
    st = check_unfolding_static(spec)
    if not st.ok:
        return UnfoldingResult(False, 0, 1, witness=MutationWord(), diagnostics=st.diagnostics)
    start = (spec.b, spec.c)
    seen = {start}
    frontier = deque([(spec, ())])
    level = 0
    while frontier and level < depth:
        nxt = deque()
        for node, word in frontier:
            for i in range(1, spec.n + 1):
                if word and word[-1] == i:
                    continue
                try:
                    child = composite_mutate(node, i)
                except UnfoldingError as e:
                    return UnfoldingResult(False, level + 1, len(seen),
                                           witness=MutationWord(word + (i,)),
                                           diagnostics=[str(e)])
                key = (child.b, child.c)
                if key in seen:
                    continue
                seen.add(key)
                bad = _violations(child.b, child.partition, child.c, first_only=True)
                if bad:
                    return UnfoldingResult(False, level + 1, len(seen),
                                           witness=MutationWord(word + (i,)),
                                           diagnostics=bad)
                if len(seen) >= max_nodes:
                    return UnfoldingResult(True, level + 1, len(seen), limit_hit=True)
                nxt.append((child, word + (i,)))
        frontier = nxt
        level += 1
    return UnfoldingResult(True, level, len(seen), saturated=not frontier)


# ---------------------------------------------------------------------------
# Search for unfoldings


def _tables(rows: int, cols: int, col_sum: int, row_sum: int) -> Iterator[tuple]:
    """Nonnegative integer rows x cols tables with the given uniform sums."""
    def compositions(total, parts, caps):
        if parts == 0:
            if total == 0:
                yield ()
            return
        for x in range(min(total, caps[0]) + 1):
            for rest in compositions(total - x, parts - 1, caps[1:]):
                yield (x,) + rest

    def fill(r, remaining):
        if r == rows:
            if all(x == 0 for x in remaining):
                yield ()
            return
        for row in compositions(row_sum, cols, remaining):
            rem = tuple(a - b for a, b in zip(remaining, row))
            for tail in fill(r + 1, rem):
                yield (row,) + tail

    yield from fill(0, (col_sum,) * cols)


def consecutive_partition(d: Sequence[int]) -> tuple:
    out, start = [], 0
    for x in d:
        out.append(tuple(range(start, start + x)))
        start += x
    return tuple(out)


def candidate_unfoldings(b, d: Sequence[int] | None = None) -> Iterator[UnfoldingSpec]:
    """Every c meeting the static conditions for consecutive blocks of sizes d."""
    bm = as_matrix(b.entries if isinstance(b, ExchangeMatrix) else b)
    n = len(bm)
    d = tuple(d) if d is not None else unfolding_dims(bm)
    part = consecutive_partition(d)
    m = sum(d)
    pairs = []
    for i in range(n):
        for j in range(n):
            if bm[i][j] > 0:
                pairs.append((i, j))
    options = []
    for i, j in pairs:
        opts = list(_tables(d[i], d[j], bm[i][j], -bm[j][i]))
        if not opts:
            return
        options.append(opts)
    for choice in itertools.product(*options):
        c = [[0] * m for _ in range(m)]
        for (i, j), tab in zip(pairs, choice):
            for a, r in enumerate(part[i]):
                for bb, s in enumerate(part[j]):
                    c[r][s] = tab[a][bb]
                    c[s][r] = -tab[a][bb]
        yield UnfoldingSpec(bm, part, as_matrix(c))


def find_unfolding(b, target, d=None, depth: int = 4, limit: int = 100000,
                   name: str = "") -> UnfoldingSpec | None:
    """First candidate whose diagram lies in the mutation class of ``target``.

    The candidate must also survive :func:`verify_unfolding` to ``depth``.
    """
    from .diagram import canonical_form, diagram_of_matrix
    from .mutation_class import Status, enumerate_class

    cls = enumerate_class(diagram_of_matrix(target))
    if cls.status is not Status.FINITE:
        raise UnfoldingError("target class must be finite")
    for count, spec in enumerate(candidate_unfoldings(b, d)):
        if count >= limit:
            break
        if canonical_form(diagram_of_matrix(spec.c)) not in cls.keys:
            continue
        if verify_unfolding(spec, depth=depth).verified:
            return UnfoldingSpec(spec.b, spec.partition, spec.c, name)
    return None


# ---------------------------------------------------------------------------
# Catalog of unfolding pairs (frozen data files)

UNFOLDING_PAIRS = {
    "B~3->D~4": "affine_B3_D4.unf",
    "B~4->D~5": "affine_B4_D5.unf",
    "C~2->D~4": "affine_C2_D4.unf",
    "C~3->D~5": "affine_C3_D5.unf",
    "F4~->E6~": "affine_F4_E6.unf",
    "F4~->E7~": "affine_F4_E7.unf",
    "G2~->D4~": "affine_G2_D4.unf",
    "G2~->E6~": "affine_G2_E6.unf",
    "G2*+->E6^11": "g2_star_plus_E6_11.unf",
    "G2^(1,1)->E8^11": "g2_11_E8_11.unf",
    "F4*+->E7^11": "f4_star_plus_E7_11.unf",
}


def load_pair(key: str) -> UnfoldingSpec:
    try:
        fname = UNFOLDING_PAIRS[key]
    except KeyError:
        raise UnfoldingError(f"unknown unfolding pair {key!r}; known: "
                             + ", ".join(UNFOLDING_PAIRS)) from None
    text = resources.files("clustergrowth.data").joinpath(fname).read_text()
    return UnfoldingSpec.from_text(text)


def corrupt(spec: UnfoldingSpec, depth: int = 6) -> UnfoldingSpec:
    """Damage ``spec`` while keeping the static conditions when possible.

    Tries 2x2 interchanges (+1 -1 / -1 +1) inside off-diagonal blocks.  These
    keep every row and column sum, so only composite mutation can expose
    them; the first one refuted within ``depth`` is returned.  Blocks too
    small for an interchange fall back to a sign flip that the static check
    rejects outright.
    """
    part = spec.partition
    for i, ei in enumerate(part):
        for j, ej in enumerate(part):
            if spec.b[i][j] < 0 or len(ei) < 2 or len(ej) < 2:
                continue
            for r0, r1 in itertools.combinations(ei, 2):
                for s0, s1 in itertools.combinations(ej, 2):
                    for sgn in (1, -1):
                        c = [list(r) for r in spec.c]
                        for r, s, v in ((r0, s0, sgn), (r1, s1, sgn),
                                        (r0, s1, -sgn), (r1, s0, -sgn)):
                            c[r][s] += v
                            c[s][r] -= v
                        if any(c[r][s] < 0 for r in (r0, r1) for s in (s0, s1)):
                            continue
                        cand = UnfoldingSpec(spec.b, part, as_matrix(c),
                                             spec.name + " (corrupted)")
                        if not verify_unfolding(cand, depth=depth).verified:
                            return cand
    c = [list(r) for r in spec.c]
    for i, ei in enumerate(part):
        for j, ej in enumerate(part):
            if spec.b[i][j] > 0:
                r, s = ei[0], ej[0]
                c[r][s], c[s][r] = -c[r][s] - 1, c[r][s] + 1
                return UnfoldingSpec(spec.b, part, as_matrix(c), spec.name + " (corrupted)")
    raise UnfoldingError("nothing to corrupt")
