import pytest

from clustergrowth.catalog import (
    CASE_IDS,
    FAMILY_NAMES,
    CatalogError,
    case_words,
    family_diagram,
    get_block,
    glue_blocks,
    make_family,
    reference_case,
)
from clustergrowth.diagram import is_realizable
from clustergrowth.exchange_core import apply_word_matrix


SIZES = {
    ("A", 4): 4, ("B~", 3): 4, ("C~", 3): 4, ("D~", 4): 5, ("E6~",): 7,
    ("E7~",): 8, ("E8~",): 9, ("F4~",): 5, ("G2~",): 3, ("X6",): 6, ("X7",): 7,
    ("E6^11",): 8, ("E7^11",): 9, ("E8^11",): 10, ("G2*+",): 4, ("G2**",): 4,
    ("F4*+",): 6, ("F4**",): 6, ("Markov",): 3, ("Gamma2", 1, 1): 5,
    ("Delta", 1, 1): 4, ("Gamma3", 1, 1, 1): 6, ("A~", 3, 1): 4,
}


@pytest.mark.parametrize("key,size", SIZES.items(), ids=lambda x: str(x))
def test_family_sizes(key, size):
    assert make_family(*key).n == size


def test_every_listed_family_builds():
    defaults = {"A": (3,), "B": (3,), "C": (3,), "D": (4,), "A~": (2, 1), "B~": (3,),
                "C~": (3,), "D~": (4,), "Gamma2": (1, 1), "Delta": (1, 1),
                "Gamma3": (1, 1, 1)}
    for name in FAMILY_NAMES:
        assert make_family(name, *defaults.get(name, ())).n >= 2


def test_unknown_family_and_bad_params():
    with pytest.raises(CatalogError):
        make_family("Q7")
    with pytest.raises(CatalogError):
        make_family("D~")


@pytest.mark.parametrize("case_id", CASE_IDS)
def test_case_words_fix_their_matrix(case_id):
    pc = reference_case(case_id)
    m = tuple(map(tuple, pc.matrix))
    for w in case_words(pc):
        assert apply_word_matrix(m, w).entries == m


def test_x6_case_uses_catalog_matrix():
    assert make_family("X6").entries == tuple(map(tuple, reference_case("X6").matrix))


def test_x6_words_are_long():
    wa, wb = case_words(reference_case("X6"))
    assert len(wa) == 30


def test_blocks_glue_to_realizable():
    d = glue_blocks(["II", "II"], [((0, 0), (1, 0))])
    assert d.n == 5 and is_realizable(d)
    # gluing two type I blocks head to tail gives A3
    d = glue_blocks(["I", "I"], [((0, 1), (1, 0))])
    assert d.n == 3 and len(d.edges) == 2
    with pytest.raises(CatalogError):
        glue_blocks(["IIIa", "I"], [((0, 1), (1, 0))])
    with pytest.raises(CatalogError):
        get_block("nope")


def test_gamma_family_triangles_oriented():
    d = family_diagram("Gamma2", 2, 2)
    assert is_realizable(d)
    assert make_family("Gamma2", 2, 3).n == 5 + 3
