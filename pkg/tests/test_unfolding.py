import pytest

from clustergrowth.catalog import make_family
from clustergrowth.unfolding import (
    UNFOLDING_PAIRS,
    UnfoldingError,
    UnfoldingSpec,
    candidate_unfoldings,
    check_unfolding_static,
    composite_mutate,
    corrupt,
    find_unfolding,
    load_pair,
    unfolding_dims,
    verify_unfolding,
)


@pytest.mark.parametrize("key", list(UNFOLDING_PAIRS))
def test_catalog_pairs_verify(key):
    spec = load_pair(key)
    assert check_unfolding_static(spec).ok
    res = verify_unfolding(spec, depth=5)
    assert res.verified and res.exit_code() == 0


# partition sizes |E_i| read off each frozen pair
DIMS = {
    "B~3->D~4": (1, 1, 1, 2), "G2*+->E6^11": (1, 1, 3, 3),
    "G2^(1,1)->E8^11": (3, 1, 3, 3), "F4*+->E7^11": (1, 2, 2, 2, 1, 1),
    "G2~->E6~": (3, 3, 1), "G2~->D4~": (1, 1, 3),
}


@pytest.mark.parametrize("key,dims", DIMS.items())
def test_dims_are_bd_symmetrizer(key, dims):
    spec = load_pair(key)
    assert spec.d == dims == unfolding_dims(spec.b)


@pytest.mark.parametrize("n", [1, 2, 4])
def test_trivial_unfolding_any_depth(n):
    b = make_family("E6^11") if n == 1 else make_family("D~", 4)
    res = verify_unfolding(UnfoldingSpec.trivial(b), depth=4 + n)
    assert res.verified


def test_trivial_needs_skew_symmetric():
    with pytest.raises(UnfoldingError):
        UnfoldingSpec.trivial(make_family("G2*+"))


def test_text_roundtrip():
    spec = load_pair("G2*+->E6^11")
    assert UnfoldingSpec.from_text(spec.to_text()) == spec
    with pytest.raises(UnfoldingError):
        UnfoldingSpec.from_text("B 2\n0 1\n-1 0\nC 2\n0 1\n-1 0\n")


def test_static_diagnostics_name_block():
    spec = load_pair("B~3->D~4")
    bad = corrupt(spec)
    st = check_unfolding_static(bad)
    assert not st.ok and st.diagnostics[0].startswith("block E")
    res = verify_unfolding(bad)
    assert not res.verified and res.witness is not None and len(res.witness) == 0


def test_corruption_found_by_mutation():
    spec = load_pair("G2^(1,1)->E8^11")
    bad = corrupt(spec)
    assert check_unfolding_static(bad).ok
    res = verify_unfolding(bad, depth=6)
    assert not res.verified and str(res.witness) == "1"


def test_bad_partition_rejected():
    spec = load_pair("B~3->D~4")
    broken = UnfoldingSpec(spec.b, ((0,), (1,), (2,), (3,)), spec.c)
    with pytest.raises(UnfoldingError):
        check_unfolding_static(broken)


def test_nonzero_diagonal_block_breaks_commutation():
    b = ((0, 2), (-1, 0))
    # E2 = {2, 3} with an arrow inside: mutations at 2 and 3 do not commute
    c = ((0, 1, 1), (-1, 0, 1), (-1, -1, 0))
    spec = UnfoldingSpec.make(b, ((1,), (2, 3)), c, one_based=True)
    with pytest.raises(UnfoldingError):
        composite_mutate(spec, 2)


def test_search_recovers_a_pair():
    b = make_family("G2~").transpose()
    spec = find_unfolding(b, make_family("D~", 4))
    assert spec is not None and spec.m == 5
    assert len(list(candidate_unfoldings(b))) == 1
