import json
import random
from fractions import Fraction

import pytest

from clustergrowth.catalog import CASE_IDS, make_family, reference_case
from clustergrowth.exchange_core import MutationError
from clustergrowth.tropical import (
    G_CONVENTION,
    Cone,
    LinearPieceError,
    Wedge,
    apply_word_tropical,
    certificate_for_case,
    check_pingpong,
    cones_disjoint,
    g_step,
    linear_piece_at,
    rank2_g_oracle,
    replay_certificate,
    verify_paper_action,
    wedges_disjoint,
)
from oracles import naive_mutate, rank2_g_vectors, tropical_step_reference


def test_convention_constant():
    assert G_CONVENTION == -1


def test_g_step_matches_reference_along_paths():
    rng = random.Random(11)
    b = make_family("E7^11")
    m = [list(r) for r in b.entries]
    g = [rng.randint(-5, 5) for _ in range(b.n)]
    for _ in range(40):
        k = rng.randrange(b.n)
        assert list(g_step(m, k + 1, g)) == tropical_step_reference(m, k, g)
        g = tropical_step_reference(m, k, g)
        m = naive_mutate(m, k)


def test_word_application_and_trace():
    b = make_family("G2*+")
    g, trace = apply_word_tropical(b, "1,2,3", (1, -2, 3, 0))
    assert len(trace) == 3 and trace.signs[0] == 1
    with pytest.raises(MutationError):
        g_step(b, 1, (1, 2))


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2)])
def test_rank2_oracle_agrees(p, q):
    recs = rank2_g_oracle(p, q, depth=5)
    assert recs and all(r["agree"] for r in recs)


@pytest.mark.parametrize("word", [(1,), (2, 1), (1, 2, 1), (2, 1, 2, 1)])
def test_package_oracle_matches_test_oracle(word):
    recs = [r for r in rank2_g_oracle(1, 2, depth=4) if r["word"] == word]
    mine = rank2_g_vectors(1, 2, list(word))
    assert [r["g_t0"] for r in recs] == [tuple(x) for x in mine]


def test_linear_piece_is_exact_near_point():
    b = make_family("X6")
    v = (3, 1, -2, 5, 1, -4)
    piece = linear_piece_at(b, "1,3,2,5", v)
    assert piece(v) == apply_word_tropical(b, "1,3,2,5", v)[0]
    nudge = tuple(Fraction(x) + Fraction(1, 1000) * (i % 3 - 1) for i, x in enumerate(v))
    assert piece(nudge) == apply_word_tropical(b, "1,3,2,5", nudge)[0]
    assert linear_piece_at(b, "", v).margin == 1


def test_linear_piece_kink_detected():
    b = ((0, 1), (-1, 0))
    with pytest.raises(LinearPieceError):
        linear_piece_at(b, "1", (0, 1))
    with pytest.raises(LinearPieceError):
        linear_piece_at(b, "1", (0, 0))


def test_cones():
    a = Cone((1, 0, 0), Fraction(1, 10), (0, 0, 0), 0)
    b = Cone((0, 1, 0), Fraction(1, 10), (0, 0, 0), 0)
    assert a.in_cone((100, 0, 9)) and not a.in_cone((10, 0, 1))
    assert cones_disjoint(a, b)
    assert not cones_disjoint(a, Cone((1, 1, 0), Fraction(1), (0, 0, 0), 0))


def test_wedges():
    w1 = Wedge((1, 0, 0), (0, 1, 0), Fraction(1, 4))
    w2 = Wedge((1, 0, 0), (0, -1, 0), Fraction(1, 4))
    assert w1.contains((8, 1, 0)) and not w1.contains((8, 3, 0))
    assert wedges_disjoint(w1, w2)
    assert not wedges_disjoint(w1, Wedge((8, 1, 0), (0, 1, 0), Fraction(1, 4)))


# frozen from the certificate runs: per-side epsilon and the common power N
FROZEN = {
    "X6": ((Fraction(1, 15), Fraction(1, 15)), 8),
    "G2*+": ((Fraction(1, 16), Fraction(1, 13)), 8),
    "G2^(1,1)": ((Fraction(1, 57), Fraction(1, 57)), 8),
    "G2^(3,3)": ((Fraction(1, 59), Fraction(1, 59)), 4),
    "F4*+": ((Fraction(1, 12), Fraction(1, 21)), 32),
    "F4^(1,1)": ((Fraction(1, 26), Fraction(1, 33)), 24),
    "F4^(2,2)": ((Fraction(1, 29), Fraction(1, 32)), 24),
}


@pytest.mark.parametrize("case_id", CASE_IDS)
def test_certificates(case_id):
    cert = certificate_for_case(case_id)
    assert cert.valid, cert.reasons
    eps, power = FROZEN[case_id]
    assert (cert.epsilon_a, cert.epsilon_b) == eps and cert.power == power
    doc = json.loads(cert.to_json())
    for key in ("case", "matrix", "words", "axes", "kappas", "epsilon", "N",
                "convention", "samples", "verdict"):
        assert key in doc
    again = replay_certificate(cert.to_json())
    assert again.to_json() == cert.to_json()


def test_same_word_twice_is_refuted():
    pc = reference_case("G2^(1,1)")
    cert = check_pingpong(pc.matrix, pc.word_a, pc.word_a, pc.v_a, pc.v_a,
                          pc.kappa_a, pc.kappa_a, pc.epsilon, case="degenerate")
    assert not cert.valid and cert.reasons


# derived translation coefficients and periods
LAWS = {
    "G2*+": [(-1, 1), (-3, 1)], "G2^(1,1)": [(-1, 1), (1, 1)],
    "G2^(3,3)": [(1, 1), (-1, 1)], "F4*+": [(1, 4), (1, 4)],
    "F4^(1,1)": [(-1, 3), (-1, 3)], "F4^(2,2)": [(1, 3), (1, 3)],
}


@pytest.mark.parametrize("case_id", CASE_IDS)
def test_action_reports(case_id):
    rep = verify_paper_action(case_id)
    assert rep.with_readings_ok
    assert [(l.derived_coefficient, l.period) for l in rep.laws] == LAWS.get(case_id, [])
    assert all(l.kappa_direction_match for l in rep.laws)


def test_known_errata_stay_visible():
    x6 = {d.name: d for d in verify_paper_action("X6").displays}
    assert not x6["X6.b"].literal_match
    assert x6["X6.b"].reading == "q-image (1, 2, -3, 0, 0, 3)"
    f4 = {d.name: d for d in verify_paper_action("F4*+").displays}
    assert f4["Y6b"].reading == "w(v+z) = v + P z"
    z = {d.name: d for d in verify_paper_action("F4^(1,1)").displays}
    assert z["Z6a"].reading == "a replaced by its inverse"


def test_x6_b_example_point():
    b = make_family("X6")
    w = reference_case("X6").word_b
    assert apply_word_tropical(b, w, (1, 15, -16, 0, 0, 16))[0] == (1, 18, -19, 0, 0, 19)
