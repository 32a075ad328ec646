from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmorph.annotate import segment_sentences, tokenize
from kmorph.enumeration import enumerate_all
from kmorph.hangul import decompose_text
from kmorph.link import compile_lexicon
from kmorph.resources import format_stem_lexicon, validate
from kmorph.synth import slot_sizes, synthesize, synthetic_corpus


@given(st.integers(1, 20000))
def test_slot_sizes(n):
    a, b, c, r = slot_sizes(n)
    assert a * b * c + r == n
    assert 0 <= r < max(a * b, 1) or c == n


def test_small_example():
    res = synthesize(10, 3, 2, seed=0)
    assert len(format_stem_lexicon(res.stems).splitlines()) == 10
    assert sorted(e.root for e in res.cs.values()) == ["Root_0", "Root_1"]
    assert validate(res) == []


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 50), st.integers(1, 400), st.integers(1, 6), st.integers(0, 99))
def test_exact_ending_counts(n, m, k, seed):
    res = synthesize(n, m, k, seed)
    endings = enumerate_all(res.rtn, res.cs)
    assert {cs: len(v) for cs, v in endings.items()} == {cs: m for cs in res.cs}
    assert len(res.stems) == n
    assert len({s.base_form for s in res.stems}) == n


def test_deterministic_per_seed():
    a = synthesize(100, 50, 3, seed=5)
    b = synthesize(100, 50, 3, seed=5)
    c = synthesize(100, 50, 3, seed=6)
    assert a.digest() == b.digest() != c.digest()


def test_invalid_sizes():
    with pytest.raises(ValueError):
        synthesize(0, 1, 1)


def test_corpus_words_are_known():
    res = synthesize(50, 20, 3, seed=1)
    lex = compile_lexicon(res)
    text = synthetic_corpus(res, 500, seed=2, words_per_sentence=10)
    sentences = segment_sentences(text)
    assert len(sentences) == 50
    words = [t.text for s in sentences for t in tokenize(s.text) if t.kind == "word"]
    assert len(words) == 500
    assert all(lex.lookup(decompose_text(w)) for w in words)
    assert synthetic_corpus(res, 500, seed=2, words_per_sentence=10) == text


def test_zipf_skews_frequencies():
    res = synthesize(200, 50, 2, seed=1)
    skewed = Counter(synthetic_corpus(res, 3000, seed=3, zipf=1.2).split())
    flat = Counter(synthetic_corpus(res, 3000, seed=3, zipf=0).split())
    assert skewed.most_common(1)[0][1] > 3 * flat.most_common(1)[0][1]
