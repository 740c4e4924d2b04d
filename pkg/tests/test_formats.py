import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hystoc import ConfidentTranscript, ConfidentWord, HystocError, build_confusion_network
from hystoc.formats import (
    FormatError,
    format_nbest,
    format_reference,
    format_sausages,
    format_transcripts,
    parse_aux,
    parse_nbest,
    parse_reference,
    parse_sausages,
    parse_transcripts,
    write_text,
)

from tests.strategies import nbest_lists

utt_ids = st.sampled_from(["u1", "u2", "utt-3", "s_4"])
words = st.sampled_from(["a", "b", "é", "naïve", "x1"])


def put(tmp_path, text, name="f.txt"):
    path = tmp_path / name
    path.write_bytes(text.encode("utf-8") if isinstance(text, str) else text)
    return path


def test_parse_worked_nbest(tmp_path):
    path = put(tmp_path, "u1 -0.357 A B C\nu1 -1.609 A B\n# comment\n\nu1 -2.303 A C\n")
    [nb] = parse_nbest(path)
    assert nb.utterance_id == "u1"
    assert [h.tokens for h in nb] == [("A", "B", "C"), ("A", "B"), ("A", "C")]
    assert nb.scores == pytest.approx([math.log(0.7), math.log(0.2), math.log(0.1)], abs=1e-3)


def test_parse_sorts_and_groups(tmp_path):
    path = put(tmp_path, "u2 -1 b\nu1 -2 a\nu2 0 c\nu1 -1\n")
    nbs = parse_nbest(path, system_id="s")
    assert [nb.utterance_id for nb in nbs] == ["u1", "u2"]
    assert nbs[0].hypotheses[0].tokens == ()
    assert [h.tokens for h in nbs[1]] == [("c",), ("b",)]
    assert nbs[0].system_id == "s"


def test_empty_file(tmp_path):
    assert parse_nbest(put(tmp_path, "")) == []


@pytest.mark.parametrize("text, line", [
    ("u1 abc A\n", 1),
    ("u1 -1 A\nu1 nan A\n", 2),
    ("u1 -1  A\n", 1),
    ("u1 -1 A \n", 1),
    ("u1 -1 A <eps>\n", 1),
    ("u1\n", 1),
])
def test_bad_nbest_lines(tmp_path, text, line):
    with pytest.raises(FormatError) as err:
        parse_nbest(put(tmp_path, text))
    assert err.value.line == line


def test_non_utf8(tmp_path):
    with pytest.raises(FormatError, match="UTF-8"):
        parse_nbest(put(tmp_path, b"u1 -1 \xff\n"))


def test_tab_separator(tmp_path):
    [nb] = parse_nbest(put(tmp_path, "u1\t-1\ta b\n"))
    assert nb.hypotheses[0].tokens == ("a", "b")


def test_reference(tmp_path):
    refs = parse_reference(put(tmp_path, "u2 c d\nu1 a\nu3\n"))
    assert refs == {"u1": ("a",), "u2": ("c", "d"), "u3": ()}
    with pytest.raises(FormatError, match="duplicate"):
        parse_reference(put(tmp_path, "u1 a\nu1 b\n"))


def test_aux(tmp_path):
    assert parse_aux(put(tmp_path, "u1 0 -1.5\nu1 1 -2\n")) == {"u1": {0: -1.5, 1: -2.0}}
    with pytest.raises(FormatError):
        parse_aux(put(tmp_path, "u1 0 -1\nu1 0 -2\n"))
    with pytest.raises(FormatError):
        parse_aux(put(tmp_path, "u1 -1 -2\n"))


def test_transcript_errors(tmp_path):
    with pytest.raises(FormatError, match="increasing"):
        parse_transcripts(put(tmp_path, "u 1 a 0.5\nu 0 b 0.5\n"))
    with pytest.raises(FormatError, match="outside"):
        parse_transcripts(put(tmp_path, "u 0 a 1.5\n"))
    with pytest.raises(FormatError):
        parse_transcripts(put(tmp_path, "u 0 a\n"))


def test_sausage_errors(tmp_path):
    with pytest.raises(HystocError, match="sum"):
        parse_sausages(put(tmp_path, "u 0 a 0.5\nu 0 <eps> 0.4\n"))
    with pytest.raises(FormatError, match="order"):
        parse_sausages(put(tmp_path, "u 0 a 1.0\nu 2 a 1.0\n"))
    with pytest.raises(FormatError, match="duplicate"):
        parse_sausages(put(tmp_path, "u 0 a 0.5\nu 0 a 0.5\n"))


def test_worked_sausage_text(worked_nbest):
    text = format_sausages([build_confusion_network(worked_nbest, 1.0)])
    assert text == ("u1 0 A 1.000000\n"
                    "u1 1 B 0.900000\nu1 1 <eps> 0.100000\n"
                    "u1 2 C 0.800000\nu1 2 <eps> 0.200000\n")


def test_write_text_uses_lf(tmp_path):
    path = tmp_path / "out.txt"
    write_text(path, "a\nb\n")
    assert path.read_bytes() == b"a\nb\n"


# round trips

@st.composite
def nbest_corpora(draw):
    ids = draw(st.lists(utt_ids, min_size=0, max_size=4, unique=True))
    return [draw(nbest_lists(utt=u, alphabet=["a", "b", "é", "x1"])) for u in ids]


@st.composite
def transcript_corpora(draw):
    ids = draw(st.lists(utt_ids, max_size=4, unique=True))
    return [ConfidentTranscript(u, tuple(ConfidentWord(draw(words), draw(st.floats(1e-6, 1.0)))
                                         for _ in range(draw(st.integers(0, 5)))))
            for u in ids]


@given(nbest_corpora())
def test_nbest_round_trip(tmp_path_factory, corpus):
    path = tmp_path_factory.mktemp("nb") / "nbest.txt"
    text = format_nbest(corpus)
    write_text(path, text)
    parsed = parse_nbest(path)
    assert parsed == sorted(corpus, key=lambda nb: nb.utterance_id)
    assert format_nbest(parsed) == text


@given(transcript_corpora())
def test_transcript_round_trip(tmp_path_factory, corpus):
    path = tmp_path_factory.mktemp("tr") / "best.txt"
    text = format_transcripts(corpus)
    write_text(path, text)
    parsed = parse_transcripts(path)
    assert [t.utterance_id for t in parsed] == sorted(t.utterance_id for t in corpus)
    assert format_transcripts(parsed) == text
    by_id = {t.utterance_id: t for t in corpus}
    for t in parsed:
        assert t.tokens == by_id[t.utterance_id].tokens
        assert t.confidences == pytest.approx(by_id[t.utterance_id].confidences, abs=5e-7)


@given(st.dictionaries(utt_ids, st.lists(words, max_size=5).map(tuple), max_size=4))
def test_reference_round_trip(tmp_path_factory, refs):
    path = tmp_path_factory.mktemp("ref") / "ref.txt"
    write_text(path, format_reference(refs))
    assert parse_reference(path) == refs


@given(nbest_corpora(), st.sampled_from([0.5, 1.0, 3.0]))
def test_sausage_round_trip(tmp_path_factory, corpus, temperature):
    networks = [build_confusion_network(nb, temperature) for nb in corpus]
    path = tmp_path_factory.mktemp("cn") / "sausage.txt"
    text = format_sausages(networks)
    write_text(path, text)
    parsed = parse_sausages(path)
    assert list(parsed) == sorted(cn.utterance_id for cn in networks if cn.bins)
    rebuilt = "".join(f"{u} {b} {t} {p:.6f}\n" for u, bins in parsed.items()
                      for b, posts in enumerate(bins) for t, p in posts.items())
    assert rebuilt == text
