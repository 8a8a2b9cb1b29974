"""Exact exchange-matrix and seed mutation, words and enhanced words.

Matrices are stored as tuples of tuples of Python ints, so arithmetic never
wraps and every value is hashable and immutable.  Directions are 1-based at
the public surface (matching how mutation words are written) and 0-based in
the ``_``-prefixed helpers used by the BFS code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

import sympy

Matrix = tuple[tuple[int, ...], ...]


class MutationError(ValueError):
    """Invalid mutation input (bad direction, malformed matrix or word)."""


class InvariantViolation(AssertionError):
    """An internal invariant (sign-coherence, unimodularity) failed."""


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    n = len(m)
    if any(len(row) != n for row in m):
        raise MutationError("matrix must be square")
    return m


# ---------------------------------------------------------------------------
# Symmetrizers


@dataclass(frozen=True)
class Symmetrizer:
    d: tuple[int, ...]

    def __post_init__(self):
        if any(x <= 0 for x in self.d):
            raise MutationError("symmetrizer entries must be positive")


def _sign_skew(m: Matrix) -> bool:
    n = len(m)
    for i in range(n):
        if m[i][i] != 0:
            return False
        for j in range(i + 1, n):
            a, b = m[i][j], m[j][i]
            if (a > 0) != (b < 0) or (a == 0) != (b == 0):
                return False
    return True


def is_skew_symmetrizable(m) -> Symmetrizer | None:
    """Return the gcd-normalised symmetrizer of ``m`` or ``None``.

    Solves ``d_i b_ij = -d_j b_ji`` by propagating ratios along a spanning
    forest and then checking every remaining pair.  Disconnected components
    are each scaled to integers independently before the global gcd is taken.
    """
    from fractions import Fraction

    m = as_matrix(m)
    if not _sign_skew(m):
        return None
    n = len(m)
    ratio: list[Fraction | None] = [None] * n
    for root in range(n):
        if ratio[root] is not None:
            continue
        ratio[root] = Fraction(1)
        component = [root]
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if m[i][j] != 0 and ratio[j] is None:
                    # d_j = -d_i b_ij / b_ji
                    ratio[j] = -ratio[i] * m[i][j] / m[j][i]
                    component.append(j)
                    stack.append(j)
        lcm_den = 1
        for i in component:
            den = ratio[i].denominator
            lcm_den = lcm_den * den // gcd(lcm_den, den)
        for i in component:
            ratio[i] = ratio[i] * lcm_den
    d = [int(r) for r in ratio]
    for i in range(n):
        for j in range(n):
            if d[i] * m[i][j] != -d[j] * m[j][i]:
                return None
    g = 0
    for x in d:
        g = gcd(g, x)
    return Symmetrizer(tuple(x // g for x in d))


# ---------------------------------------------------------------------------
# Exchange matrices


@dataclass(frozen=True)
class ExchangeMatrix:
    """Skew-symmetrizable integer matrix, validated at construction."""

    entries: Matrix
    symmetrizer: Symmetrizer = field(compare=False, repr=False, default=None)

    def __init__(self, entries, symmetrizer: Symmetrizer | None = None):
        m = as_matrix(entries)
        if not m:
            raise MutationError("rank must be positive")
        if symmetrizer is None:
            symmetrizer = is_skew_symmetrizable(m)
            if symmetrizer is None:
                raise MutationError("matrix is not skew-symmetrizable")
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "symmetrizer", symmetrizer)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def is_skew_symmetric(self) -> bool:
        return all(x == 1 for x in self.symmetrizer.d)

    def mutate(self, k: int) -> "ExchangeMatrix":
        return mutate_matrix(self, k)

    def permute(self, perm: Sequence[int]) -> "ExchangeMatrix":
        """Relabel so that new vertex ``i`` is old vertex ``perm[i]`` (0-based)."""
        m = self.entries
        new = tuple(tuple(m[pi][pj] for pj in perm) for pi in perm)
        d = self.symmetrizer.d
        return ExchangeMatrix(new, Symmetrizer(tuple(d[p] for p in perm)))

    def __neg__(self) -> "ExchangeMatrix":
        return ExchangeMatrix(
            tuple(tuple(-x for x in r) for r in self.entries), self.symmetrizer
        )

    def transpose(self) -> "ExchangeMatrix":
        return ExchangeMatrix(tuple(zip(*self.entries)))

    def __str__(self):
        w = max(len(str(x)) for r in self.entries for x in r)
        return "\n".join(" ".join(str(x).rjust(w) for x in r) for r in self.entries)


def _mutate_rows(m: Matrix, k: int) -> Matrix:
    """FZ mutation of an n×n (or extended m×n) matrix at 0-based column k.

    Row k of the top square block supplies b_kj; for extended matrices the
    extra rows are treated like any other row.
    """
    rowk = m[k]
    out = []
    for i, row in enumerate(m):
        bik = row[k]
        if i == k:
            out.append(tuple(-x for x in row))
        elif bik == 0:
            out.append(row)
        elif bik > 0:
            out.append(
                tuple(
                    -x if j == k else (x + bik * rowk[j] if rowk[j] > 0 else x)
                    for j, x in enumerate(row)
                )
            )
        else:
            out.append(
                tuple(
                    -x if j == k else (x - bik * rowk[j] if rowk[j] < 0 else x)
                    for j, x in enumerate(row)
                )
            )
    return tuple(out)


def _check_direction(n: int, k: int) -> int:
    if not isinstance(k, int) or isinstance(k, bool):
        raise MutationError(f"direction must be an integer, got {k!r}")
    if not 1 <= k <= n:
        raise MutationError(f"direction {k} out of range 1..{n}")
    return k - 1


def mutate_matrix(b: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Mutate ``b`` in direction ``k`` (1-based)."""
    idx = _check_direction(b.n, k)
    return ExchangeMatrix(_mutate_rows(b.entries, idx), b.symmetrizer)


# ---------------------------------------------------------------------------
# Seeds with principal coefficients


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _mutate_seed_raw(b: Matrix, c: Matrix, k: int) -> tuple[Matrix, Matrix]:
    # c_ij' = -c_ij (j = k), else c_ij + sgn(c_ik) max(c_ik b_kj, 0)
    rowk = b[k]
    newc = []
    for row in c:
        cik = row[k]
        if cik == 0:
            newc.append(row)
        elif cik > 0:
            newc.append(
                tuple(
                    -x if j == k else (x + cik * rowk[j] if rowk[j] > 0 else x)
                    for j, x in enumerate(row)
                )
            )
        else:
            newc.append(
                tuple(
                    -x if j == k else (x - cik * rowk[j] if rowk[j] < 0 else x)
                    for j, x in enumerate(row)
                )
            )
    return _mutate_rows(b, k), tuple(newc)


def _det(m: Matrix) -> int:
    """Exact integer determinant by fraction-free Bareiss elimination."""
    a = [list(r) for r in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def column_sign_coherent(c: Matrix) -> bool:
    n = len(c)
    for j in range(len(c[0]) if n else 0):
        pos = neg = False
        for i in range(n):
            if c[i][j] > 0:
                pos = True
            elif c[i][j] < 0:
                neg = True
        if pos and neg:
            return False
    return True


@dataclass(frozen=True)
class Seed:
    """Exchange matrix with its C-matrix (principal coefficients).

    ``c`` has rows indexed by initial directions and columns by current
    cluster positions.
    """

    b: ExchangeMatrix
    c: Matrix
    depth: int = field(default=0, compare=False)

    @classmethod
    def initial(cls, b) -> "Seed":
        if not isinstance(b, ExchangeMatrix):
            b = ExchangeMatrix(b)
        return cls(b, identity(b.n), 0)

    @property
    def n(self) -> int:
        return self.b.n

    def mutate(self, k: int, check: bool = True) -> "Seed":
        return mutate_seed(self, k, check=check)

    def check_invariants(self) -> None:
        if not column_sign_coherent(self.c):
            raise InvariantViolation(f"C-matrix not column sign-coherent: {self.c}")
        if abs(_det(self.c)) != 1:
            raise InvariantViolation(f"C-matrix not unimodular: {self.c}")


def mutate_seed(s: Seed, k: int, check: bool = True) -> Seed:
    idx = _check_direction(s.n, k)
    b, c = _mutate_seed_raw(s.b.entries, s.c, idx)
    out = Seed(ExchangeMatrix(b, s.b.symmetrizer), c, s.depth + 1)
    if check and not column_sign_coherent(c):
        raise InvariantViolation(
            f"sign-coherence lost after mutating at {k}: C={c}"
        )
    return out


# ---------------------------------------------------------------------------
# Words


def reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    """Cancel adjacent equal letters (free product of copies of Z/2)."""
    out: list[int] = []
    for x in letters:
        if out and out[-1] == x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class MutationWord:
    """Repetition-free sequence of 1-based directions, applied left to right."""

    letters: tuple[int, ...] = ()

    def __init__(self, letters: Iterable[int] = (), reduce: bool = False):
        seq = tuple(int(x) for x in letters)
        if any(x < 1 for x in seq):
            raise MutationError("directions are 1-based positive integers")
        if reduce:
            seq = reduce_letters(seq)
        else:
            for a, b in zip(seq, seq[1:]):
                if a == b:
                    raise MutationError(
                        f"word repeats letter {a}; pass reduce=True to cancel it"
                    )
        object.__setattr__(self, "letters", seq)

    @classmethod
    def parse(cls, text: str, reduce: bool = False) -> "MutationWord":
        """Parse ``"3,2,1^10"``: comma-separated letters, optional ``^k`` repeat.

        Brackets are tolerated, so ``"[3,2,1]^10"`` means the same thing.
        """
        text = text.strip().replace(" ", "")
        reps = 1
        if "^" in text:
            text, _, r = text.rpartition("^")
            try:
                reps = int(r)
            except ValueError:
                raise MutationError(f"bad repetition count {r!r}") from None
            if reps < 0:
                raise MutationError("repetition count must be nonnegative")
        text = text.strip("[]()")
        if not text:
            return cls((), reduce)
        try:
            letters = [int(x) for x in text.split(",")]
        except ValueError:
            raise MutationError(f"bad word {text!r}") from None
        return cls(letters * reps, reduce)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "MutationWord") -> "MutationWord":
        return MutationWord(self.letters + other.letters, reduce=True)

    def __pow__(self, r: int) -> "MutationWord":
        if r < 0:
            return self.inverse() ** (-r)
        return MutationWord(self.letters * r, reduce=True)

    def inverse(self) -> "MutationWord":
        return MutationWord(self.letters[::-1])

    def relabel(self, sigma: Sequence[int]) -> "MutationWord":
        """Replace each letter i with sigma(i); ``sigma`` is a 1-based tuple."""
        return MutationWord(tuple(sigma[x - 1] for x in self.letters))

    def __str__(self):
        return ",".join(map(str, self.letters))


def _as_word(w) -> MutationWord:
    if isinstance(w, MutationWord):
        return w
    if isinstance(w, str):
        return MutationWord.parse(w)
    return MutationWord(w)


def apply_word(s, w) -> Seed:
    """Apply ``w`` to a seed (or matrix, wrapped into its initial seed)."""
    if not isinstance(s, Seed):
        s = Seed.initial(s)
    for k in _as_word(w):
        s = mutate_seed(s, k)
    return s


def apply_word_matrix(b, w) -> ExchangeMatrix:
    if not isinstance(b, ExchangeMatrix):
        b = ExchangeMatrix(b)
    m = b.entries
    n = b.n
    for k in _as_word(w):
        m = _mutate_rows(m, _check_direction(n, k))
    return ExchangeMatrix(m, b.symmetrizer)


def is_mutationally_trivial(b, w) -> bool:
    if not isinstance(b, ExchangeMatrix):
        b = ExchangeMatrix(b)
    return apply_word_matrix(b, w).entries == b.entries


def is_trivial_word(b, w) -> bool:
    """True iff the principal-coefficient seed returns to (B, identity)."""
    if not isinstance(b, ExchangeMatrix):
        b = ExchangeMatrix(b)
    s = apply_word(Seed.initial(b), w)
    return s.b.entries == b.entries and s.c == identity(b.n)


# ---------------------------------------------------------------------------
# Enhanced words


def _check_perm(sigma: Sequence[int]) -> tuple[int, ...]:
    sigma = tuple(int(x) for x in sigma)
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise MutationError(f"{sigma} is not a permutation of 1..{len(sigma)}")
    return sigma


@dataclass(frozen=True)
class EnhancedWord:
    """Pair (word, permutation); acts as ``sigma ∘ mu_word``.

    ``sigma`` is a 1-based tuple with ``sigma[i-1] = sigma(i)``.
    """

    word: MutationWord
    sigma: tuple[int, ...]

    def __init__(self, word, sigma: Sequence[int]):
        sigma = _check_perm(sigma)
        word = _as_word(word)
        if any(x > len(sigma) for x in word):
            raise MutationError("word letter exceeds permutation size")
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def identity(cls, n: int) -> "EnhancedWord":
        return cls(MutationWord(), tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.sigma)

    def inverse(self) -> "EnhancedWord":
        # (w x s)^-1 = s(w^-1) x s^-1
        inv = _perm_inverse(self.sigma)
        return EnhancedWord(self.word.inverse().relabel(self.sigma), inv)

    def __mul__(self, other: "EnhancedWord") -> "EnhancedWord":
        return compose_enhanced(self, other)


def _perm_inverse(sigma: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma, 1):
        inv[s - 1] = i
    return tuple(inv)


def _perm_compose(s1: tuple[int, ...], s2: tuple[int, ...]) -> tuple[int, ...]:
    """Product read left to right: s1 first, then s2, so (s1 s2)(i) = s2(s1(i)).

    This is the reading under which the product of enhanced words matches
    their action on matrices (``apply_enhanced``).
    """
    return tuple(s2[s1[i] - 1] for i in range(len(s1)))


def compose_enhanced(e1: EnhancedWord, e2: EnhancedWord) -> EnhancedWord:
    """Group product ``(w1 x s1)(w2 x s2) = w1 s1^-1(w2) x s1 s2``."""
    if e1.n != e2.n:
        raise MutationError(f"rank mismatch: {e1.n} vs {e2.n}")
    w2 = e2.word.relabel(_perm_inverse(e1.sigma))
    letters = reduce_letters(e1.word.letters + w2.letters)
    return EnhancedWord(MutationWord(letters), _perm_compose(e1.sigma, e2.sigma))


def apply_enhanced(b: ExchangeMatrix, e: EnhancedWord) -> ExchangeMatrix:
    """Matrix after ``mu_w`` followed by conjugation by the permutation matrix.

    Cluster position i moves to position sigma(i), so the new matrix has
    entry ``b'[sigma(i)][sigma(j)] = b[i][j]``.
    """
    m = apply_word_matrix(b, e.word)
    inv = [s - 1 for s in _perm_inverse(e.sigma)]
    return m.permute(inv)


# ---------------------------------------------------------------------------
# Rank-2 symbolic oracle


@dataclass
class Rank2Orbit:
    variables: list
    period: int | None
    status: str  # "period", "no period within bound", "size limit"


def rank2_symbolic_orbit(p: int, q: int, max_steps: int = 40,
                         max_terms: int = 2000) -> Rank2Orbit:
    """Iterate ``x_{m+1} x_{m-1} = x_m^w + 1`` with w alternating p, q.

    Works with exact rational functions in x1, x2.  The period is the least
    m > 0 with (x_m, x_{m+1}) = (x_0, x_1); it equals the number of distinct
    cluster variables, which for a rank-2 cycle is also the number of
    clusters.
    """
    if p <= 0 or q <= 0:
        raise MutationError("p and q must be positive")
    x1, x2 = sympy.symbols("x1 x2")
    seq = [x1, x2]
    for m in range(1, max_steps + 1):
        w = p if m % 2 == 1 else q
        nxt = sympy.cancel((seq[-1] ** w + 1) / seq[-2])
        num, den = sympy.fraction(nxt)
        if len(sympy.Add.make_args(sympy.expand(num))) > max_terms:
            return Rank2Orbit(seq, None, "size limit")
        seq.append(nxt)
        if seq[-2] == x1 and seq[-1] == x2:
            return Rank2Orbit(seq[:-2], m, "period")
    return Rank2Orbit(seq, None, "no period within bound")


def parse_matrix_text(text: str) -> ExchangeMatrix:
    """Read ``n`` followed by ``n`` rows of integers; ``#`` starts a comment."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows or len(rows[0]) != 1:
        raise MutationError("matrix text must start with a line holding n")
    try:
        n = int(rows[0][0])
        body = [[int(x) for x in r] for r in rows[1:]]
    except ValueError as exc:
        raise MutationError(f"non-integer entry: {exc}") from None
    if n <= 0 or len(body) != n or any(len(r) != n for r in body):
        raise MutationError(f"expected {n} rows of {n} integers")
    return ExchangeMatrix(body)


def matrix_to_text(b) -> str:
    m = b.entries if isinstance(b, ExchangeMatrix) else as_matrix(b)
    return f"{len(m)}\n" + "\n".join(" ".join(str(x) for x in r) for r in m) + "\n"
