import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hystoc import (
    ConfidentTranscript,
    ConfidentWord,
    FusionScheme,
    HystocError,
    Hypothesis,
    NBestList,
    RoverParams,
    build_confusion_network,
    extract_best,
    hystoc_fuse,
    normalize,
    rover_fuse,
)
from hystoc.fusion import _tolerant_order, pool_hypotheses

from tests.strategies import grid_scores, nbest_lists

unit = st.floats(0.0, 1.0)
confs = st.floats(0.01, 1.0)


def tr(text, *conf, utt="u"):
    words = text.split()
    conf = conf or (1.0,) * len(words)
    return ConfidentTranscript(utt, tuple(ConfidentWord(w, c) for w, c in zip(words, conf)))


@st.composite
def transcripts(draw, utt="u"):
    words = draw(st.lists(st.sampled_from("abcd"), max_size=6))
    return ConfidentTranscript(utt, tuple(ConfidentWord(w, draw(confs)) for w in words))


def nb(*pairs, utt="u"):
    return NBestList(utt, tuple(Hypothesis(tuple(t.split()), s) for t, s in pairs))


# rover

def test_rover_weighted_vote():
    out = rover_fuse([tr("x", 0.9), tr("x", 0.5), tr("y", 0.8)], RoverParams(alpha=0.5, eps_confidence=0.3))
    assert out.tokens == ("x",)
    # 0.5 * 2/3 + 0.5 * mean(0.9, 0.5), by hand
    assert out.confidences[0] == pytest.approx(0.5 * 2 / 3 + 0.5 * 0.7)


def test_rover_confidence_can_outvote_majority():
    out = rover_fuse([tr("x", 0.1), tr("x", 0.1), tr("y", 1.0)], RoverParams(alpha=0.2, eps_confidence=0.0))
    # x: 0.2*2/3 + 0.8*0.1 = 0.2133; y: 0.2/3 + 0.8 = 0.8667
    assert out.tokens == ("y",)


def test_rover_pure_majority_with_alpha_one():
    out = rover_fuse([tr("a b c", 0.1, 0.2, 0.3), tr("a z c", 0.9, 0.9, 0.9), tr("a b c", 0.2, 0.1, 0.2)],
                     RoverParams(alpha=1.0, eps_confidence=1.0))
    assert out.tokens == ("a", "b", "c")


def test_rover_epsilon_majority_drops_word():
    out = rover_fuse([tr("a b"), tr("a"), tr("a")], RoverParams(alpha=1.0, eps_confidence=0.5))
    assert out.tokens == ("a",)
    out = rover_fuse([tr("a b"), tr("a b"), tr("a")], RoverParams(alpha=1.0, eps_confidence=0.5))
    assert out.tokens == ("a", "b")


def test_rover_inserted_word_needs_support():
    out = rover_fuse([tr("a c"), tr("a b c"), tr("a b c")], RoverParams(alpha=1.0, eps_confidence=0.5))
    assert out.tokens == ("a", "b", "c")


def test_rover_tie_breaks_on_confidence_then_text():
    p = RoverParams(alpha=1.0, eps_confidence=0.5)
    assert rover_fuse([tr("x", 0.4), tr("y", 0.6)], p).tokens == ("y",)
    assert rover_fuse([tr("y", 0.5), tr("x", 0.5)], p).tokens == ("x",)


def test_rover_errors():
    with pytest.raises(HystocError):
        rover_fuse([])
    with pytest.raises(HystocError):
        rover_fuse([tr("a", utt="u1"), tr("a", utt="u2")])
    with pytest.raises(HystocError):
        RoverParams(alpha=1.5)
    with pytest.raises(HystocError):
        RoverParams(eps_confidence=-0.1)


@given(transcripts(), unit, unit)
def test_rover_single_system_is_identity(t, alpha, eps_conf):
    assert rover_fuse([t], RoverParams(alpha, eps_conf)).tokens == t.tokens


@given(transcripts(), st.integers(1, 4), unit, unit)
def test_rover_identical_systems_is_identity(t, k, alpha, eps_conf):
    assert rover_fuse([t] * k, RoverParams(alpha, eps_conf)).tokens == t.tokens


@given(st.lists(transcripts(), min_size=1, max_size=4), unit, unit)
def test_rover_output_never_has_epsilon(ts, alpha, eps_conf):
    out = rover_fuse(ts, RoverParams(alpha, eps_conf))
    assert "<eps>" not in out.tokens
    assert all(0.0 < c <= 1.0 for c in out.confidences)


@given(st.lists(st.sampled_from("abcd"), max_size=5), st.lists(confs, min_size=3, max_size=3))
def test_rover_unanimous_permutation_invariant(words, system_conf):
    systems = [ConfidentTranscript("u", tuple(ConfidentWord(w, c) for w in words)) for c in system_conf]
    outs = {rover_fuse(list(p), RoverParams(1.0, 0.5)).tokens for p in itertools.permutations(systems)}
    assert outs == {tuple(words)}


# hystoc fusion

def test_pool_orders():
    a = nb(("a", math.log(0.6)), ("b", math.log(0.4)))
    b = nb(("c", math.log(0.9) - 5), ("d", math.log(0.1) - 5))
    direct = pool_hypotheses([a, b], FusionScheme.DIRECT)
    assert [h.tokens[0] for h in direct] == ["a", "b", "c", "d"]
    norm = pool_hypotheses([a, b], FusionScheme.NORMALIZED)
    assert [h.tokens[0] for h in norm] == ["c", "a", "b", "d"]
    assert [h.score for h in norm] == pytest.approx([math.log(x) for x in (0.9, 0.6, 0.4, 0.1)])
    rr = pool_hypotheses([a, b], FusionScheme.NORMALIZED_ROUND_ROBIN)
    assert [h.tokens[0] for h in rr] == ["a", "c", "b", "d"]


def test_round_robin_uneven_depths():
    a = nb(("a", 0.0), ("b", -1.0), ("c", -2.0))
    b = nb(("x", 0.0))
    rr = pool_hypotheses([a, b], FusionScheme.NORMALIZED_ROUND_ROBIN)
    assert [h.tokens[0] for h in rr] == ["a", "x", "b", "c"]


@given(nbest_lists())
def test_direct_single_system_is_plain_hystoc(lst):
    cn, t = hystoc_fuse([lst], FusionScheme.DIRECT, 1.0)
    assert cn == build_confusion_network(lst, 1.0)
    assert t == extract_best(lst, 1.0)


def test_duplicated_system_keeps_posteriors():
    lst = nb(("a b", math.log(0.7)), ("a c", math.log(0.3)))
    single, _ = hystoc_fuse([lst], FusionScheme.NORMALIZED, 1.0)
    double, t = hystoc_fuse([lst, lst], FusionScheme.NORMALIZED, 1.0)
    assert t.tokens == ("a", "b")
    assert t.confidences == pytest.approx((1.0, 0.7))
    for p, q in zip(normalize(single), normalize(double)):
        assert q == pytest.approx(p)


@given(nbest_lists(), st.integers(1, 3), st.sampled_from(list(FusionScheme)))
def test_fused_mass_counts_every_copy(lst, k, scheme):
    cn, _ = hystoc_fuse([lst] * k, scheme, 1.0)
    if scheme is FusionScheme.DIRECT:
        expected = math.log(k) + math.log(math.fsum(math.exp(h.score) for h in lst))
    else:
        expected = math.log(k)
    assert cn.aligned_mass == pytest.approx(expected, abs=1e-9)


@given(st.lists(nbest_lists(scores=grid_scores), min_size=1, max_size=3),
       st.sampled_from([FusionScheme.NORMALIZED, FusionScheme.NORMALIZED_ROUND_ROBIN]),
       st.data())
def test_normalized_schemes_ignore_per_system_shift(systems, scheme, data):
    shifts = [data.draw(st.integers(-50, 50)) for _ in systems]
    shifted = [NBestList(s.utterance_id, tuple(Hypothesis(h.tokens, h.score + c) for h in s))
               for s, c in zip(systems, shifts)]
    cn_a, t_a = hystoc_fuse(systems, scheme, 1.0)
    cn_b, t_b = hystoc_fuse(shifted, scheme, 1.0)
    assert t_a.tokens == t_b.tokens
    for p, q in zip(normalize(cn_a), normalize(cn_b)):
        assert set(p) == set(q)
        for token in p:
            assert q[token] == pytest.approx(p[token], abs=1e-12)


def test_tolerant_order_keeps_input_order_on_near_ties():
    assert _tolerant_order([-1.0, 0.0, -1.0 + 1e-15, -2.0]) == [1, 0, 2, 3]
    assert _tolerant_order([-1.0 + 1e-15, -1.0]) == [0, 1]
    assert _tolerant_order([-1.0, -1.0 + 1e-9]) == [1, 0]


def test_equal_normalized_scores_stay_in_system_order():
    # equal in real arithmetic; a shift moves the rounding of one system only
    def system(word):
        return nb(*[("", 0.0)] * 4, (word, 0.0), ("", -0.125))
    a, b = system("a"), system("b")
    base = normalize(hystoc_fuse([a, b], FusionScheme.NORMALIZED)[0])
    shifted = NBestList("u", tuple(Hypothesis(h.tokens, h.score + 7) for h in a))
    moved = normalize(hystoc_fuse([shifted, b], FusionScheme.NORMALIZED)[0])
    assert [set(p) for p in moved] == [set(p) for p in base]
    for p, q in zip(base, moved):
        assert q == pytest.approx(p, abs=1e-12)


def test_direct_is_not_shift_invariant():
    a = nb(("x", math.log(0.9)), ("y", math.log(0.1)))
    for shift, direct in ((-10.0, "x"), (0.0, "y"), (10.0, "y")):
        b = nb(("y", math.log(0.9) + shift), ("z", math.log(0.1) + shift))
        assert hystoc_fuse([a, b], FusionScheme.DIRECT)[1].tokens == (direct,)
        # normalized: y gets 0.1 + 0.9 against x's 0.9, whatever the shift
        assert hystoc_fuse([a, b], FusionScheme.NORMALIZED)[1].tokens == ("y",)


@given(st.lists(nbest_lists(), min_size=1, max_size=3))
def test_normalized_and_round_robin_align_the_same_pool(systems):
    norm = pool_hypotheses(systems, FusionScheme.NORMALIZED)
    rr = pool_hypotheses(systems, FusionScheme.NORMALIZED_ROUND_ROBIN)
    key = lambda h: (h.tokens, h.score)
    assert sorted(map(key, norm)) == sorted(map(key, rr))


@given(st.lists(nbest_lists(), min_size=1, max_size=3), st.sampled_from(list(FusionScheme)),
       st.sampled_from([0.5, 1.0, 3.0]))
def test_pooled_mass_invariant(systems, scheme, temperature):
    cn, _ = hystoc_fuse(systems, scheme, temperature)
    pooled = pool_hypotheses(systems, scheme)
    target = math.log(math.fsum(math.exp(h.score / temperature) for h in pooled))
    for b in cn.bins:
        assert abs(math.expm1(b.total() - target)) < 1e-9


def test_hystoc_fuse_errors():
    with pytest.raises(HystocError):
        hystoc_fuse([], FusionScheme.DIRECT)
    with pytest.raises(HystocError):
        hystoc_fuse([nb(("a", 0.0), utt="u1"), nb(("a", 0.0), utt="u2")], FusionScheme.DIRECT)
    with pytest.raises(HystocError):
        hystoc_fuse([nb(("a", 0.0))], FusionScheme.DIRECT, 0.0)
