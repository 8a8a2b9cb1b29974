"""Named exchange matrices, the exceptional ping-pong cases, and block gluing.

Vertex numbering in the docstrings is 1-based; matrices are 0-based tuples.
Every constructor returns an :class:`ExchangeMatrix`; use
:func:`family_diagram` for the diagram.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .diagram import Diagram, diagram_of_matrix
from .exchange_core import ExchangeMatrix, MutationError, MutationWord


class CatalogError(MutationError):
    """Unknown family name or invalid parameters."""


def _matrix(n: int, arrows) -> ExchangeMatrix:
    """Build from ``(i, j, b_ij, -b_ji)`` with 0-based indices."""
    m = [[0] * n for _ in range(n)]
    for i, j, p, q in arrows:
        if m[i][j] or m[j][i]:
            raise CatalogError(f"duplicate arrow {i}-{j}")
        m[i][j], m[j][i] = p, -q
    return ExchangeMatrix(m)


def _simple(n: int, edges) -> ExchangeMatrix:
    return _matrix(n, [(i, j, 1, 1) for i, j in edges])


def _path(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def _star(arms: Sequence[int]) -> ExchangeMatrix:
    """Tree with one centre (vertex 0) and arms of the given lengths.

    Arms point towards the centre.
    """
    n = 1 + sum(arms)
    edges = []
    nxt = 1
    for length in arms:
        prev = 0
        for _ in range(length):
            edges.append((nxt, prev))
            prev = nxt
            nxt += 1
    return _simple(n, edges)


def _need(params, count, name):
    if len(params) != count:
        raise CatalogError(f"{name} takes {count} parameter(s), got {len(params)}")
    if any(not isinstance(p, int) or p <= 0 for p in params):
        raise CatalogError(f"{name} parameters must be positive integers")


# ---------------------------------------------------------------------------
# Finite and affine types


def type_A(n: int) -> ExchangeMatrix:
    return _simple(n, _path(n))


def type_B(n: int) -> ExchangeMatrix:
    if n < 2:
        raise CatalogError("B_n needs n >= 2")
    arrows = [(i, i + 1, 1, 1) for i in range(n - 2)] + [(n - 2, n - 1, 2, 1)]
    return _matrix(n, arrows)


def type_C(n: int) -> ExchangeMatrix:
    return type_B(n).transpose()


def type_D(n: int) -> ExchangeMatrix:
    if n < 4:
        raise CatalogError("D_n needs n >= 4")
    return _simple(n, _path(n - 1) + [(n - 3, n - 1)])


def type_E(n: int) -> ExchangeMatrix:
    if n not in (6, 7, 8):
        raise CatalogError("E_n needs n in {6, 7, 8}")
    return _simple(n, _path(n - 1) + [(n - 1, 2)])


def type_F4() -> ExchangeMatrix:
    return _matrix(4, [(0, 1, 1, 1), (1, 2, 2, 1), (2, 3, 1, 1)])


def type_G2() -> ExchangeMatrix:
    return _matrix(2, [(0, 1, 3, 1)])


def affine_A(p: int, q: int = 1) -> ExchangeMatrix:
    """Acyclic cycle with ``p`` arrows one way and ``q`` the other."""
    if p < 1 or q < 1:
        raise CatalogError("affine A needs p, q >= 1")
    n = p + q
    if n == 2:
        return _matrix(2, [(0, 1, 2, 2)])
    edges = [(i, i + 1) for i in range(p)]
    edges += [(0, n - 1)] if q == 1 else [(0, p + 1)] + [(p + j, p + j + 1) for j in range(1, q - 1)] + [(n - 1, p)]
    return _simple(n, edges)


def affine_B(n: int) -> ExchangeMatrix:
    """n+1 vertices: fork 1,2 -> 3 -> ... -> n, then a double arrow n => n+1."""
    if n < 3:
        raise CatalogError("affine B_n needs n >= 3")
    arrows = [(0, 2, 1, 1), (1, 2, 1, 1)]
    arrows += [(i, i + 1, 1, 1) for i in range(2, n - 1)]
    arrows += [(n - 1, n, 2, 1)]
    return _matrix(n + 1, arrows)


def affine_C(n: int) -> ExchangeMatrix:
    """n+1 vertices on a path with double arrows at both ends."""
    if n < 2:
        raise CatalogError("affine C_n needs n >= 2")
    arrows = [(0, 1, 1, 2)]
    arrows += [(i, i + 1, 1, 1) for i in range(1, n - 1)]
    arrows += [(n - 1, n, 2, 1)]
    return _matrix(n + 1, arrows)


def affine_D(n: int) -> ExchangeMatrix:
    if n < 4:
        raise CatalogError("affine D_n needs n >= 4")
    edges = [(0, 2), (1, 2)] + [(i, i + 1) for i in range(2, n - 2)]
    edges += [(n - 2, n - 1), (n - 2, n)]
    return _simple(n + 1, edges)


def affine_E(n: int) -> ExchangeMatrix:
    arms = {6: (2, 2, 2), 7: (3, 3, 1), 8: (5, 2, 1)}
    if n not in arms:
        raise CatalogError("affine E_n needs n in {6, 7, 8}")
    return _star(arms[n])


def affine_F4() -> ExchangeMatrix:
    """a2 -> a1 -> c => b1 -> b2 with symmetrizer (1,1,1,2,2)."""
    return _matrix(5, [(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 2, 1), (3, 4, 1, 1)])


def affine_G2() -> ExchangeMatrix:
    """1 -> 2 => 3 with symmetrizer (1,1,3)."""
    return _matrix(3, [(0, 1, 1, 1), (1, 2, 3, 1)])


# ---------------------------------------------------------------------------
# Elliptic and exceptional mutation-finite types


def elliptic_E(n: int) -> ExchangeMatrix:
    """E_n^(1,1): a weight-4 arrow A => B, each arm starting in a triangle.

    Vertex 0 is A, vertex 1 is B.  The first vertex x of every arm sits in
    the oriented triangle B -> x -> A; the remaining arm vertices form a
    path leaving x.
    """
    arms = {6: (2, 2, 2), 7: (1, 3, 3), 8: (1, 2, 5)}
    if n not in arms:
        raise CatalogError("E_n^(1,1) needs n in {6, 7, 8}")
    size = 2 + sum(arms[n])
    arrows = [(0, 1, 2, 2)]
    nxt = 2
    for length in arms[n]:
        x = nxt
        arrows += [(1, x, 1, 1), (x, 0, 1, 1)]
        nxt += 1
        prev = x
        for _ in range(length - 1):
            arrows.append((prev, nxt, 1, 1))
            prev = nxt
            nxt += 1
    return _matrix(size, arrows)


X6_MATRIX = (
    (0, -2, 1, 0, 0, 0),
    (2, 0, -1, 0, 0, 0),
    (-1, 1, 0, -1, 1, 1),
    (0, 0, 1, 0, -2, 0),
    (0, 0, -1, 2, 0, 0),
    (0, 0, -1, 0, 0, 0),
)


def type_X6() -> ExchangeMatrix:
    """Two weight-4 triangles sharing vertex 3, plus a pendant 3 -> 6."""
    return ExchangeMatrix(X6_MATRIX)


def type_X7() -> ExchangeMatrix:
    """Centre 1 with three triangles c -> a => b -> c (the double arrow has weight 4)."""
    arrows = []
    for t in range(3):
        a, b = 1 + 2 * t, 2 + 2 * t
        arrows += [(0, a, 1, 1), (a, b, 2, 2), (b, 0, 1, 1)]
    return _matrix(7, arrows)


G2_STAR_PLUS_31 = ((0, 1, 0, -1), (-1, 0, 1, 0), (0, -3, 0, 1), (3, 0, -1, 0))
G2_11 = ((0, 3, -2, 1), (-1, 0, 1, 0), (2, -3, 0, -1), (-1, 0, 1, 0))
G2_33 = ((0, -1, 2, -1), (3, 0, -3, 0), (-2, 1, 0, 1), (1, 0, -1, 0))
F4_STAR_PLUS = (
    (0, 1, 0, 0, 0, -1),
    (-2, 0, 1, 0, 0, 0),
    (0, -1, 0, 1, 0, 0),
    (0, 0, -1, 0, 2, 0),
    (0, 0, 0, -1, 0, 1),
    (1, 0, 0, 0, -1, 0),
)
F4_22 = (
    (0, -1, 0, 0, 0, 0),
    (1, 0, -1, 0, 0, 1),
    (0, 1, 0, -1, 0, 0),
    (0, 0, 2, 0, -1, 0),
    (0, 0, 0, 1, 0, -2),
    (0, -1, 0, 0, 1, 0),
)
F4_11 = tuple(zip(*F4_22))


def g2_star_plus(variant=(3, 1)) -> ExchangeMatrix:
    variant = tuple(variant)
    if variant == (3, 1):
        return ExchangeMatrix(G2_STAR_PLUS_31)
    if variant == (1, 3):
        return ExchangeMatrix(G2_STAR_PLUS_31).transpose()
    raise CatalogError("G2*+ variant must be (3,1) or (1,3)")


def g2_star_star(variant=(1, 1)) -> ExchangeMatrix:
    variant = tuple(variant)
    if variant == (1, 1):
        return ExchangeMatrix(G2_11)
    if variant == (3, 3):
        return ExchangeMatrix(G2_33)
    raise CatalogError("G2** variant must be (1,1) or (3,3)")


def f4_star_plus(which: int = 1) -> ExchangeMatrix:
    if which == 1:
        return ExchangeMatrix(F4_STAR_PLUS)
    if which == 2:
        return ExchangeMatrix(F4_STAR_PLUS).transpose()
    raise CatalogError("F4*+ matrix index must be 1 or 2")


def f4_star_star(variant=(1, 1)) -> ExchangeMatrix:
    variant = tuple(variant)
    if variant == (1, 1):
        return ExchangeMatrix(F4_11)
    if variant == (2, 2):
        return ExchangeMatrix(F4_22)
    raise CatalogError("F4** variant must be (1,1) or (2,2)")


def markov() -> ExchangeMatrix:
    return ExchangeMatrix(((0, 2, -2), (-2, 0, 2), (2, -2, 0)))


# ---------------------------------------------------------------------------
# Quadratic and cubic growth families (from triangulations)


def _subdivide(arrows: list, src: int, dst: int, extra: int, nxt: int):
    """Replace the arrow src -> dst by a path through ``extra`` new vertices.

    Inserting a marked point on a boundary segment splits the triangle that
    carries it; on the quiver this subdivides the arrow coming from that
    triangle.
    """
    arrows.remove((src, dst, 1, 1))
    prev = src
    for _ in range(extra):
        arrows.append((prev, nxt, 1, 1))
        prev = nxt
        nxt += 1
    arrows.append((prev, dst, 1, 1))
    return nxt


def gamma2(n1: int, n2: int) -> ExchangeMatrix:
    """Once-punctured annulus with n1 and n2 marked points on the boundaries.

    Vertices: 0 = g (arc joining the boundaries), 1 = s, 2 = t (the two sides
    of the punctured digon), 3 and 4 = the arcs to the puncture.  The arrows
    g -> s and g -> t come from the two triangles carrying boundary segments.
    """
    _need((n1, n2), 2, "Gamma(n1,n2)")
    arrows = [(0, 1, 1, 1), (0, 2, 1, 1), (2, 1, 1, 1),
              (1, 3, 1, 1), (3, 2, 1, 1), (1, 4, 1, 1), (4, 2, 1, 1)]
    nxt = _subdivide(arrows, 0, 1, n1 - 1, 5)
    nxt = _subdivide(arrows, 0, 2, n2 - 1, nxt)
    return _matrix(nxt, arrows)


def delta2(n1: int, n2: int) -> ExchangeMatrix:
    """Gamma(n1,n2) with the punctured digon replaced by an orbifold point.

    The two twin spikes merge into one vertex with symmetrizer entry 2, so
    Gamma(n1,n2) is an unfolding of this matrix.
    """
    _need((n1, n2), 2, "Delta(n1,n2)")
    arrows = [(0, 1, 1, 1), (0, 2, 1, 1), (2, 1, 1, 1),
              (1, 3, 2, 1), (3, 2, 1, 2)]
    nxt = _subdivide(arrows, 0, 1, n1 - 1, 4)
    nxt = _subdivide(arrows, 0, 2, n2 - 1, nxt)
    return _matrix(nxt, arrows)


def gamma3(n1: int, n2: int, n3: int) -> ExchangeMatrix:
    """Pair of pants with n1, n2, n3 marked points on the boundaries.

    Vertices 0..2 are the seams (oriented triangle), 3..5 the inner arcs
    (oriented triangle); arc 3+i meets seam i in a triangle with a boundary
    segment of boundary i.
    """
    _need((n1, n2, n3), 3, "Gamma(n1,n2,n3)")
    arrows = [(0, 2, 1, 1), (2, 1, 1, 1), (1, 0, 1, 1),
              (4, 5, 1, 1), (5, 3, 1, 1), (3, 4, 1, 1),
              (3, 2, 1, 1), (4, 0, 1, 1), (5, 1, 1, 1)]
    nxt = 6
    for (src, dst), extra in zip(((3, 2), (4, 0), (5, 1)), (n1, n2, n3)):
        nxt = _subdivide(arrows, src, dst, extra - 1, nxt)
    return _matrix(nxt, arrows)


# ---------------------------------------------------------------------------
# Name dispatch


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: tuple = ()


_ALIASES = {
    "A~": "Atilde", "B~": "Btilde", "C~": "Ctilde", "D~": "Dtilde",
    "E6~": "E6tilde", "E7~": "E7tilde", "E8~": "E8tilde",
    "F4~": "F4tilde", "G2~": "G2tilde",
    "E6^11": "E6^11", "E7^11": "E7^11", "E8^11": "E8^11",
    "G2*+": "G2*+", "G2**": "G2**", "F4*+": "F4*+", "F4**": "F4**",
    "Gamma2": "Gamma2", "Gamma": "Gamma2", "Delta": "Delta", "Gamma3": "Gamma3",
}

_BUILDERS = {
    "A": (type_A, 1), "B": (type_B, 1), "C": (type_C, 1), "D": (type_D, 1),
    "E6": (lambda: type_E(6), 0), "E7": (lambda: type_E(7), 0),
    "E8": (lambda: type_E(8), 0), "F4": (type_F4, 0), "G2": (type_G2, 0),
    "Atilde": (affine_A, None), "Btilde": (affine_B, 1),
    "Ctilde": (affine_C, 1), "Dtilde": (affine_D, 1),
    "E6tilde": (lambda: affine_E(6), 0), "E7tilde": (lambda: affine_E(7), 0),
    "E8tilde": (lambda: affine_E(8), 0),
    "F4tilde": (affine_F4, 0), "G2tilde": (affine_G2, 0),
    "E6^11": (lambda: elliptic_E(6), 0), "E7^11": (lambda: elliptic_E(7), 0),
    "E8^11": (lambda: elliptic_E(8), 0),
    "X6": (type_X6, 0), "X7": (type_X7, 0),
    "G2*+": (lambda *v: g2_star_plus(v or (3, 1)), None),
    "G2**": (lambda *v: g2_star_star(v or (1, 1)), None),
    "F4*+": (lambda *v: f4_star_plus(*(v or (1,))), None),
    "F4**": (lambda *v: f4_star_star(v or (1, 1)), None),
    "Gamma2": (gamma2, 2), "Delta": (delta2, 2), "Gamma3": (gamma3, 3),
    "Markov": (markov, 0),
}

FAMILY_NAMES = (
    "A", "B", "C", "D", "A~", "B~", "C~", "D~", "E6", "E7", "E8",
    "E6~", "E7~", "E8~", "E6^11", "E7^11", "E8^11", "X6", "X7", "F4", "G2",
    "F4~", "G2~", "G2*+", "G2**", "F4*+", "F4**", "Gamma2", "Delta", "Gamma3",
    "Markov",
)


def _canonical_name(name: str) -> str:
    name = name.strip()
    if name in _BUILDERS:
        return name
    if name in _ALIASES:
        return _ALIASES[name]
    m = re.fullmatch(r"([A-G])(\d)?~", name)
    if m and m.group(2):
        return f"{m.group(1)}{m.group(2)}tilde"
    raise CatalogError(f"unknown family {name!r}")


def make_family(name, *params) -> ExchangeMatrix:
    """Build a catalog matrix, e.g. ``make_family("D~", 4)``."""
    if isinstance(name, FamilySpec):
        name, params = name.name, tuple(name.params)
    key = _canonical_name(name)
    fn, arity = _BUILDERS[key]
    if arity is not None and len(params) != arity:
        raise CatalogError(f"{name} takes {arity} parameter(s), got {len(params)}")
    try:
        return fn(*params)
    except TypeError as exc:
        raise CatalogError(f"bad parameters for {name}: {exc}") from None


def family_diagram(name, *params) -> Diagram:
    return diagram_of_matrix(make_family(name, *params))


# ---------------------------------------------------------------------------
# The exceptional ping-pong cases


def _fr(xs) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


@dataclass(frozen=True)
class Display:
    """One printed linear-action formula.

    ``word`` is one of ``a``, ``b``, ``a^-1``, ``b^-1``; ``base`` names the
    vector the formula expands around.  ``form`` is ``"axis"`` for
    ``w(v + z) = v + P z`` and ``"point"`` for ``w(v + z) = v + z + P z``.
    For the two-parameter displays ``pin``/``qin`` and ``pout``/``qout``
    give input and output as ``T*p + nu*q``.
    """

    name: str
    word: str
    base: str = ""
    form: str = "axis"
    zmap: tuple = ()
    pin: tuple = ()
    qin: tuple = ()
    pout: tuple = ()
    qout: tuple = ()


@dataclass(frozen=True)
class WedgeSpec:
    """Set {T*p + nu*q : T > 0, 0 < nu < eps*T}."""

    p: tuple
    q: tuple


@dataclass(frozen=True)
class ReferenceCase:
    case_id: str
    matrix: tuple
    word_a: str
    word_b: str
    v_a: tuple
    v_b: tuple
    kappa_a: tuple = ()
    kappa_b: tuple = ()
    law_a: int = 1          # printed sign in w^r(v_z) = v_z +/- r kappa v
    law_b: int = 1
    period: int = 1         # translation law holds for r divisible by this
    epsilon: Fraction | None = None
    displays: tuple = ()
    wedges: dict = field(default_factory=dict)
    memberships: tuple = ()


def _z(rows):
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


REFERENCE_CASES: dict[str, ReferenceCase] = {}


def _register(case: ReferenceCase):
    REFERENCE_CASES[case.case_id] = case


_register(ReferenceCase(
    "X6", X6_MATRIX, "3,2,1^10", "3,5,4,2,6^4",
    v_a=_fr((1, -1, 0, 0, 0, 0)), v_b=_fr((0, 1, -1, 0, 0, 1)),
    epsilon=Fraction(1, 15),
    displays=(
        Display("X6.a", "a", pin=(1, -1, 0, 0, 0, 0), qin=(-1, 0, 0, 0, 0, 1),
                pout=(1, -1, 0, 0, 0, 0), qout=(14, -15, 0, 0, 0, 1)),
        Display("X6.a^-1", "a^-1", pin=(1, -1, 0, 0, 0, 0), qin=(0, 1, -1, 0, 0, 1),
                pout=(1, -1, 0, 0, 0, 0), qout=(15, -14, -1, 0, 0, 1)),
        Display("X6.b", "b", pin=(0, 1, -1, 0, 0, 1), qin=(1, -1, 0, 0, 0, 0),
                pout=(0, 1, -1, 0, 0, 1), qout=(-1, 2, -3, 0, 0, 3)),
        Display("X6.b^-1", "b^-1", pin=(0, 1, -1, 0, 0, 1), qin=(-1, -1, 1, 0, 0, 0),
                pout=(0, 1, -1, 0, 0, 1), qout=(-1, 2, -2, 0, 0, 3)),
    ),
    wedges={
        ("a", 1): WedgeSpec((1, -1, 0, 0, 0, 0), (-1, 0, 0, 0, 0, 1)),
        ("a", -1): WedgeSpec((1, -1, 0, 0, 0, 0), (0, 1, -1, 0, 0, 1)),
        ("b", 1): WedgeSpec((0, 1, -1, 0, 0, 1), (1, -1, 0, 0, 0, 0)),
        ("b", -1): WedgeSpec((0, 1, -1, 0, 0, 1), (-1, -1, 1, 0, 0, 0)),
    },
    memberships=(
        ("a", 10, (0, 1, -1, 0, 0, 1), ("a", 1)),
        ("a", -10, (0, 1, -1, 0, 0, 1), ("a", -1)),
        ("b", 10, (1, -1, 0, 0, 0, 0), ("b", 1)),
        ("b", -10, (1, -1, 0, 0, 0, 0), ("b", -1)),
    ),
))

_register(ReferenceCase(
    "G2*+", G2_STAR_PLUS_31, "1,2,3^2", "2,3,4^2",
    v_a=_fr((-1, -1, 3, 0)), v_b=_fr((0, -1, 1, 1)),
    kappa_a=_fr((1, 2, 1, 0)), kappa_b=_fr((0, 1, Fraction(2, 3), Fraction(1, 3))),
    law_a=1, law_b=1,
    displays=(
        Display("V4a", "a", "v_a", zmap=_z([[2, 2, 1, 0], [1, 3, 1, 0], [-3, -6, -2, 0], [0, 0, 0, 1]])),
        Display("V4b", "b", "v_b", zmap=_z([[1, 0, 0, 0], [0, 4, 2, 1], [0, -3, -1, -1], [0, -3, -2, 0]])),
    ),
))

_register(ReferenceCase(
    "G2^(1,1)", G2_11, "4,1,2^4", "4,3,2^4",
    v_a=_fr((-2, 1, 0, 1)), v_b=_fr((0, -1, 2, -1)),
    kappa_a=_fr((6, 9, 0, 3)), kappa_b=_fr((0, 9, 6, 3)),
    law_a=-1, law_b=1,
    displays=(
        Display("W4a", "a", "v_a", zmap=_z([[13, 18, 0, 6], [-6, -8, 0, -3], [0, 0, 1, 0], [-6, -9, 0, -2]])),
        Display("W4b", "b", "v_b", zmap=_z([[1, 0, 0, 0], [0, -8, -6, -3], [0, 18, 13, 6], [0, -9, -6, -2]])),
    ),
))

_register(ReferenceCase(
    "G2^(3,3)", G2_33, "4,1,2^4", "4,3,2^4",
    v_a=_fr((2, -3, 0, -1)), v_b=_fr((0, 3, -2, 1)),
    kappa_a=_fr((6, 3, 0, 3)), kappa_b=_fr((0, 3, 6, 3)),
    law_a=1, law_b=-1,
    displays=(
        Display("W4aa", "a", "v_a", zmap=_z([[13, 6, 0, 6], [-18, -8, 0, -9], [0, 0, 1, 0], [-6, -3, 0, -2]])),
        Display("W4bb", "b", "v_b", zmap=_z([[1, 0, 0, 0], [0, -8, -18, -9], [0, 6, 13, 6], [0, -3, -6, -2]])),
    ),
))

_h = Fraction(1, 2)
_t = Fraction(1, 3)

_register(ReferenceCase(
    "F4*+", F4_STAR_PLUS, "5,4,3,2,1", "2,1,6,5,4",
    v_a=_fr((-1, 0, 0, 0, 1, 0)), v_b=_fr((0, 1, 0, -1, 0, 0)),
    kappa_a=(_h, _h, _h, _h, _h, Fraction(0)),
    kappa_b=_fr((1, _h, 0, _h, 1, 1)),
    law_a=1, law_b=1, period=4,
    displays=(
        Display("Y6a", "a", "v_a", zmap=_z([
            [-1, -1, -1, -1, -2, 0], [2, 1, 1, 1, 2, 0], [0, 1, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0], [0, 0, 0, 1, 1, 0], [0, 0, 0, 0, 0, 1]])),
        Display("Y6b", "b", "v_b", form="point", zmap=_z([
            [0, 0, 0, 0, 0, 1], [2, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0],
            [-2, -2, 0, -1, -2, -2], [1, 1, 0, 1, 1, 1], [0, 0, 0, 0, 1, 0]])),
    ),
))

_register(ReferenceCase(
    "F4^(1,1)", F4_11, "1,2,3,4,5^2", "4,5,6,1,2^2",
    v_a=_fr((-1, -1, -1, 1, 1, 0)), v_b=_fr((-_h, 1, 0, -_h, -_h, _h)),
    kappa_a=_fr((_t, 2 * _t, 1, 4 * _t, 2 * _t, 0)),
    kappa_b=_fr((2 * _t, 4 * _t, 0, 4 * _t, 8 * _t, 2)),
    law_a=1, law_b=-1, period=3,
    displays=(
        Display("Z6a", "a", "v_a", zmap=_z([
            [0, 0, -1, -2, 0, 0], [-1, -1, -1, -2, -2, 0], [1, 0, 0, 0, 0, 0],
            [0, 1, 1, 2, 1, 0], [0, 0, 1, 1, 1, 0], [0, 0, 0, 0, 0, 1]])),
        Display("Z6b", "b", "v_b", zmap=_z([
            [0, 0, 0, 0, 2, 1], [0, -1, 0, -2, -4, -2], [0, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, 1, 1], [1, 1, 0, 1, 2, 1], [-1, 0, 0, 0, 0, 0]])),
    ),
))

_register(ReferenceCase(
    "F4^(2,2)", F4_22, "1,2,3,4,5^2", "4,5,6,1,2^2",
    v_a=_fr((1, 1, 1, -2, -2, 0)), v_b=_fr((1, -2, 0, 2, 2, -1)),
    kappa_a=_fr((_t, 2 * _t, 1, 2 * _t, _t, 0)),
    kappa_b=_fr((_t, 2 * _t, 0, _t, 2 * _t, 1)),
    law_a=1, law_b=-1, period=3,
    displays=(
        Display("Z6aa", "a", "v_a", zmap=_z([
            [0, 0, 1, 0, 0, 0], [1, 1, 1, 1, 0, 0], [1, 2, 2, 1, 1, 0],
            [-2, -2, -2, -1, -1, 0], [0, -2, -2, -1, 0, 0], [0, 0, 0, 0, 0, 1]])),
        Display("Z6bb", "b", "v_b", zmap=_z([
            [0, 0, 0, 0, 1, 1], [0, -1, 0, -1, -2, -2], [0, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, 1, 2], [2, 2, 0, 1, 2, 2], [-1, 0, 0, 0, 0, 0]])),
    ),
))

CASE_IDS = tuple(REFERENCE_CASES)


def reference_case(case_id: str) -> ReferenceCase:
    try:
        return REFERENCE_CASES[case_id]
    except KeyError:
        raise CatalogError(f"unknown case {case_id!r}; known: {', '.join(CASE_IDS)}") from None


def case_words(case: ReferenceCase) -> tuple[MutationWord, MutationWord]:
    return MutationWord.parse(case.word_a), MutationWord.parse(case.word_b)


# ---------------------------------------------------------------------------
# Blocks and gluing


@dataclass(frozen=True)
class Block:
    """Small diagram with designated outlets.

    ``edges`` are ``(source, target, weight)`` on local vertices 0..size-1.
    """

    kind: str
    size: int
    edges: tuple
    outlets: frozenset


def _block(kind, size, edges, outlets):
    return Block(kind, size, tuple(edges), frozenset(outlets))


BLOCKS: dict[str, Block] = {
    b.kind: b
    for b in (
        _block("I", 2, [(0, 1, 1)], {0, 1}),
        _block("II", 3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)], {0, 1, 2}),
        _block("IIIa", 3, [(0, 1, 1), (0, 2, 1)], {0}),
        _block("IIIb", 3, [(1, 0, 1), (2, 0, 1)], {0}),
        # outlets 0, 1; spikes 2, 3
        _block("IV", 4, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (1, 3, 1), (3, 0, 1)], {0, 1}),
        # outlet 0; twin pairs {1, 2} and {3, 4}
        _block("V", 5, [(0, 1, 1), (0, 2, 1), (1, 3, 1), (1, 4, 1),
                        (2, 3, 1), (2, 4, 1), (3, 0, 1), (4, 0, 1)], {0}),
        _block("IIIa~", 2, [(0, 1, 2)], {0}),
        _block("IIIb~", 2, [(1, 0, 2)], {0}),
        _block("IV~", 3, [(0, 1, 1), (1, 2, 2), (2, 0, 2)], {0, 1}),
        _block("V1~", 4, [(0, 1, 2), (1, 2, 2), (1, 3, 2), (2, 0, 1), (3, 0, 1)], {0}),
        _block("V2~", 4, [(0, 1, 1), (0, 2, 1), (1, 3, 2), (2, 3, 2), (3, 0, 2)], {0}),
        _block("V12~", 3, [(0, 1, 2), (1, 2, 4), (2, 0, 2)], {0}),
        # outlets 0, 1; two weight-2 spikes 2, 3
        _block("VI~", 4, [(0, 1, 1), (1, 2, 2), (2, 0, 2), (1, 3, 2), (3, 0, 2)], {0, 1}),
    )
}

BLOCK_ALIASES = {
    "ĨIIa": "IIIa~", "ĨIIb": "IIIb~", "ĨV": "IV~", "Ṽ1": "V1~",
    "Ṽ2": "V2~", "Ṽ12": "V12~", "ṼI": "VI~",
}


def get_block(kind: str) -> Block:
    kind = BLOCK_ALIASES.get(kind, kind)
    try:
        return BLOCKS[kind]
    except KeyError:
        raise CatalogError(f"unknown block {kind!r}") from None


def glue_blocks(blocks: Sequence, matching: Sequence) -> Diagram:
    """Glue blocks along a partial matching of outlets.

    ``matching`` holds pairs ``((block_index, vertex), (block_index, vertex))``.
    Parallel arrows combine by signed square roots: opposite unit arrows
    cancel, equal ones give weight 4.
    """
    from math import isqrt

    blocks = [get_block(b) if isinstance(b, str) else b for b in blocks]
    offsets = []
    total = 0
    for b in blocks:
        offsets.append(total)
        total += b.size
    parent = list(range(total))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    used = set()
    for pair in matching:
        (bi, vi), (bj, vj) = pair
        if bi == bj:
            raise CatalogError("outlets of the same block cannot be matched")
        for b, v in ((bi, vi), (bj, vj)):
            if not (0 <= b < len(blocks)) or v not in blocks[b].outlets:
                raise CatalogError(f"vertex {v} of block {b} is not an outlet")
            if (b, v) in used:
                raise CatalogError(f"outlet {v} of block {b} matched twice")
            used.add((b, v))
        parent[find(offsets[bi] + vi)] = find(offsets[bj] + vj)

    roots = sorted({find(x) for x in range(total)})
    index = {r: i for i, r in enumerate(roots)}
    n = len(roots)
    root_sum: dict[tuple[int, int], int] = {}
    plain: dict[tuple[int, int], int] = {}
    for off, b in zip(offsets, blocks):
        for s, t, w in b.edges:
            i, j = index[find(off + s)], index[find(off + t)]
            if i == j:
                raise CatalogError("gluing produced a loop")
            key, sgn = ((i, j), 1) if i < j else ((j, i), -1)
            r = isqrt(w)
            if r * r == w:
                root_sum[key] = root_sum.get(key, 0) + sgn * r
            else:
                if key in plain or key in root_sum:
                    raise CatalogError("non-square weights cannot be combined")
                plain[key] = sgn * w
    edges = []
    for (i, j), r in root_sum.items():
        if (i, j) in plain:
            raise CatalogError("non-square weights cannot be combined")
        if r > 0:
            edges.append((i, j, r * r))
        elif r < 0:
            edges.append((j, i, r * r))
    for (i, j), w in plain.items():
        edges.append((i, j, w) if w > 0 else (j, i, -w))
    return Diagram.from_edges(n, edges)
