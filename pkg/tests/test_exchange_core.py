import pytest

from clustergrowth.catalog import make_family
from clustergrowth.exchange_core import (
    EnhancedWord,
    ExchangeMatrix,
    MutationError,
    MutationWord,
    Seed,
    apply_enhanced,
    apply_word,
    apply_word_matrix,
    compose_enhanced,
    is_skew_symmetrizable,
    is_trivial_word,
    matrix_to_text,
    mutate_matrix,
    parse_matrix_text,
    rank2_symbolic_orbit,
)
from oracles import naive_mutate, naive_seed_mutate

MARKOV = ((0, 2, -2), (-2, 0, 2), (2, -2, 0))


def test_markov_single_mutation_negates():
    b = ExchangeMatrix(MARKOV)
    assert mutate_matrix(b, 1).entries == (-b).entries
    assert apply_word_matrix(b, "1,2").entries == b.entries


def test_mutation_matches_reference_formula():
    b = make_family("E6^11")
    for k in range(1, b.n + 1):
        assert [list(r) for r in mutate_matrix(b, k).entries] == naive_mutate(b.entries, k - 1)


def test_seed_matches_extended_matrix_reference():
    b = make_family("B~", 3)
    s = Seed.initial(b)
    bm, cm = [list(r) for r in b.entries], [[int(i == j) for j in range(4)] for i in range(4)]
    for k in (1, 3, 2, 4, 1, 2):
        s = s.mutate(k)
        bm, cm = naive_seed_mutate(bm, cm, k - 1)
        assert [list(r) for r in s.b.entries] == bm
        assert [list(r) for r in s.c] == cm


@pytest.mark.parametrize("m,d", [
    (((0, 1), (-2, 0)), (2, 1)),
    (((0, 1), (-3, 0)), (3, 1)),
    (((0, 2, -2), (-2, 0, 2), (2, -2, 0)), (1, 1, 1)),
])
def test_symmetrizer(m, d):
    s = is_skew_symmetrizable(m)
    assert s.d == d
    n = len(m)
    assert all(d[i] * m[i][j] == -d[j] * m[j][i] for i in range(n) for j in range(n))


@pytest.mark.parametrize("m", [
    ((0, 1), (1, 0)),            # same sign
    ((0, 1, 1), (-2, 0, 1), (-1, -1, 0)),  # cycle with inconsistent ratios
    ((1, 0), (0, 0)),            # nonzero diagonal
])
def test_not_symmetrizable(m):
    assert is_skew_symmetrizable(m) is None
    with pytest.raises(MutationError):
        ExchangeMatrix(m)


def test_word_parsing():
    w = MutationWord.parse("3,2,1^10")
    assert len(w) == 30 and w.letters[:4] == (3, 2, 1, 3)
    assert MutationWord.parse("[1,2]^2").letters == (1, 2, 1, 2)
    assert str(MutationWord.parse("")) == ""
    with pytest.raises(MutationError):
        MutationWord.parse("1,1")
    assert MutationWord.parse("1,1,2", reduce=True).letters == (2,)
    with pytest.raises(MutationError):
        MutationWord.parse("1,x")
    with pytest.raises(MutationError):
        MutationWord([0])


def test_word_out_of_range():
    with pytest.raises(MutationError):
        apply_word_matrix(ExchangeMatrix(MARKOV), "4")


def test_word_inverse_undoes():
    b = make_family("X6")
    w = MutationWord.parse("1,3,2,5,4,6,2")
    s = apply_word(apply_word(Seed.initial(b), w), w.inverse())
    assert s.b == b and s.c == Seed.initial(b).c


def test_trivial_words_rank2():
    # A2 has period 5 under alternating mutations, which needs 10 letters
    b = ((0, 1), (-1, 0))
    assert is_trivial_word(b, "1,2^5")
    assert not is_trivial_word(b, "1,2^2")


def test_enhanced_product_example():
    e = compose_enhanced(EnhancedWord("1", (2, 1)), EnhancedWord("1", (1, 2)))
    assert e.word.letters == (1, 2) and e.sigma == (2, 1)


def test_enhanced_inverse_and_identity():
    e = EnhancedWord("1,2,3", (2, 3, 1))
    assert compose_enhanced(e, e.inverse()) == EnhancedWord.identity(3)
    assert compose_enhanced(e, EnhancedWord.identity(3)) == e


def test_enhanced_product_matches_action():
    b = make_family("D~", 4)
    e1 = EnhancedWord("1,3,2", (2, 3, 1, 5, 4))
    e2 = EnhancedWord("4,5,1", (1, 3, 2, 4, 5))
    lhs = apply_enhanced(b, compose_enhanced(e1, e2))
    assert lhs == apply_enhanced(apply_enhanced(b, e1), e2)


def test_rank2_mapping_class_generator():
    # ((1) x swap)^5 = (1,2,1,2,1) x swap, and it preserves the A2 matrix
    g = EnhancedWord("1", (2, 1))
    p = g
    for _ in range(4):
        p = compose_enhanced(p, g)
    assert p.word.letters == (1, 2, 1, 2, 1) and p.sigma == (2, 1)
    a2 = ExchangeMatrix(((0, 1), (-1, 0)))
    assert apply_enhanced(a2, g) == a2


def test_matrix_text_roundtrip():
    b = make_family("G2*+")
    text = "# comment\n" + matrix_to_text(b)
    assert parse_matrix_text(text) == b
    with pytest.raises(MutationError):
        parse_matrix_text("2\n0 1\n")
    with pytest.raises(MutationError):
        parse_matrix_text("2\n0 a\n-1 0\n")


@pytest.mark.parametrize("p,q,period", [(1, 1, 5), (1, 2, 6), (2, 1, 6), (1, 3, 8), (3, 1, 8)])
def test_rank2_symbolic_periods(p, q, period):
    orb = rank2_symbolic_orbit(p, q)
    assert orb.status == "period" and orb.period == period


def test_rank2_symbolic_affine_has_no_short_period():
    assert rank2_symbolic_orbit(2, 2, max_steps=12).period is None
