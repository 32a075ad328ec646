from __future__ import annotations

import struct
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmorph.enumeration import CyclePolicy, enumerate_all
from kmorph.fst import BadMagic, ChecksumMismatch, FormatError, TruncatedInput, VersionMismatch
from kmorph.hangul import compose_letters, decompose_text
from kmorph.link import (
    BuildReport,
    CompileError,
    WordLexicon,
    compile_lexicon,
    generate_stem_forms,
    lookup,
    lookup_hanja,
)
from kmorph.synth import synthesize

from .oracles import brute_force_analyses


def lexicon_table(lex, words) -> Counter:
    table: Counter = Counter()
    for word in words:
        for a in lex.lookup(word):
            table[(word, a.morphemes)] += 1
    return table


def render(analysis):
    return " + ".join(f"{compose_letters(m.surface)}/{compose_letters(m.base)}.{m.tag}" for m in analysis.morphemes)


def analyses(lex, word):
    return [render(a) for a in lookup(lex, decompose_text(word))]


def test_toy_matches_brute_force(toy, toy_lex):
    forms = generate_stem_forms(toy)
    endings = enumerate_all(toy.rtn, toy.cs)
    expected = brute_force_analyses(forms, endings)
    words = {w for w, _ in expected}
    assert lexicon_table(toy_lex, words) == expected
    assert sum(expected.values()) == toy_lex.meta["word_forms"]


def test_no_spurious_words(toy, toy_lex):
    forms = generate_stem_forms(toy)
    endings = enumerate_all(toy.rtn, toy.cs)
    words = {w for w, _ in brute_force_analyses(forms, endings)}
    # every proper prefix and one-letter extension that is not itself a word gets nothing
    probes = {w[:i] for w in words for i in range(len(w))} | {w + "ᄀ" for w in words}
    for probe in probes - words:
        assert toy_lex.lookup(probe) == []


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 40), st.integers(1, 30), st.integers(1, 4), st.integers(0, 1000))
def test_synthetic_matches_brute_force(n_stems, n_endings, n_cs, seed):
    res = synthesize(n_stems, n_endings, n_cs, seed)
    lex = compile_lexicon(res)
    forms = generate_stem_forms(res)
    endings = enumerate_all(res.rtn, res.cs)
    expected = brute_force_analyses(forms, endings)
    assert lexicon_table(lex, {w for w, _ in expected}) == expected


def test_contraction(toy_lex):
    [a] = lookup(toy_lex, decompose_text("하셨다"))
    surfaces = [compose_letters(m.surface) for m in a.morphemes]
    bases = [compose_letters(m.base) for m in a.morphemes]
    assert surfaces == ["하", "셨", "", "다"]
    assert bases == ["하", "으시", "었", "다"]
    assert str(a.morphemes[1].tag) == "Morph+hon=y" and str(a.morphemes[2].tag) == "Morph+past=y"


def test_homographs_both_reported(toy_lex):
    assert analyses(toy_lex, "배가") == [
        "배/배.N+sem=fruit + 가/가.Post+case=nom",
        "배/배.N+sem=vehicle + 가/가.Post+case=nom",
    ]


def test_multiple_split_points_ordered_by_split(toy_lex):
    # 사시다: 사(V)+시+다 and 사시(N)+다(copula)
    got = lookup(toy_lex, decompose_text("사시다"))
    assert [a.split for a in got] == sorted(a.split for a in got)
    assert len(got) == 2
    assert {a.stem_morphemes for a in got} == {1}


def test_irregular_and_derived(toy_lex):
    assert analyses(toy_lex, "컸다") == ["ㅋ/크.A + ㅓㅆ/었.Morph+past=y + 다/다.St+decl=y"]
    assert analyses(toy_lex, "크게") == ["크/크.A + 게/게.Sfx"]
    assert analyses(toy_lex, "크게도") == ["크/크.A + 게/게.Sfx + 도/도.Post+case=add"]
    assert analyses(toy_lex, "먹으셨다") == [
        "먹/먹.V + 으셨/으시.Morph+hon=y + /었.Morph+past=y + 다/다.St+decl=y"]
    assert analyses(toy_lex, "xyz") == [] and analyses(toy_lex, "먹") == []


def test_empty_ending(toy_lex):
    assert analyses(toy_lex, "새") == ["새/새.DET"]
    assert analyses(toy_lex, "학교") == ["학교/학교.N+sem=place"]


def test_hanja(toy_lex):
    [a] = lookup_hanja(toy_lex, "學校")
    assert [(m.surface, compose_letters(m.base), str(m.tag)) for m in a.morphemes] == [
        ("學校", "학교", "N+sem=place")]
    assert len(lookup_hanja(toy_lex, "樂")) == 2
    assert lookup_hanja(toy_lex, "無") == []
    joint = toy_lex.lookup_hanja_word("學校", decompose_text("에"))
    assert [render(x) for x in joint] == ["學校/학교.N+sem=place + 에/에.Post+case=loc"]


def test_bytes_roundtrip(toy_lex, tmp_path):
    data = toy_lex.to_bytes()
    again = WordLexicon.from_bytes(data)
    assert again.to_bytes() == data
    path = tmp_path / "toy.klex"
    toy_lex.save(path)
    loaded = WordLexicon.load(path)
    for word in ("하셨다", "배가", "사시다", "컸다"):
        assert loaded.lookup(decompose_text(word)) == toy_lex.lookup(decompose_text(word))
    assert loaded.lookup_hanja("樂") == toy_lex.lookup_hanja("樂")
    assert [p.name for p in tmp_path.iterdir()] == ["toy.klex"]


def test_corrupt_lexicon(toy_lex):
    data = toy_lex.to_bytes()
    with pytest.raises(BadMagic):
        WordLexicon.from_bytes(b"XXXX" + data[4:])
    with pytest.raises(VersionMismatch):
        WordLexicon.from_bytes(data[:4] + struct.pack("<H", 7) + data[6:])
    with pytest.raises(TruncatedInput):
        WordLexicon.from_bytes(data[:8])
    flipped = bytearray(data)
    flipped[len(data) // 2] ^= 1
    with pytest.raises(ChecksumMismatch):
        WordLexicon.from_bytes(bytes(flipped))
    with pytest.raises(FormatError):
        WordLexicon.from_bytes(data[:-10])


def test_deterministic_bytes(toy, monkeypatch):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    assert compile_lexicon(toy).to_bytes() == compile_lexicon(toy).to_bytes()
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    lex = compile_lexicon(toy)
    assert lex.meta["built"] == 1700000000


def test_report(toy):
    report = BuildReport()
    lex = compile_lexicon(toy, report=report)
    assert list(report.timings) == ["1 decompose", "2 generate", "3 stem automaton", "4 ending automata", "5 link"]
    assert report.word_forms == lex.meta["word_forms"] == 311
    assert report.minimal["stems"].serialized_bytes < report.trie["stems"].serialized_bytes
    for name, minimal in report.minimal.items():
        assert minimal.serialized_bytes <= report.trie[name].serialized_bytes
    assert lex.stats()["stems"] == report.minimal["stems"]
    assert [w.code for w in report.warnings] == []


def test_vacuous_link_warning(toy):
    from dataclasses import replace

    from kmorph.resources import SuffixRtn, parse_graph
    from kmorph.tagset import FeatureRegistry

    rtn = SuffixRtn(dict(toy.rtn.graphs))
    rtn.graphs["NONE"] = parse_graph("states 2 initial 0 final 1\n", "NONE", FeatureRegistry())
    report = BuildReport(measure_trie=False)
    compile_lexicon(replace(toy, rtn=rtn), report=report)
    assert [w.code for w in report.warnings] == ["VacuousLink"]


def test_compile_error_names_step(toy):
    from dataclasses import replace

    with pytest.raises(CompileError) as info:
        compile_lexicon(toy, cap=3)
    assert info.value.step in (2, 4)
    assert "PathExplosion" in str(info.value)
    bad_cs = dict(toy.cs)
    bad_cs.pop("CS_ADV")
    from kmorph.resources import CsRegistry

    with pytest.raises(CompileError) as info:
        compile_lexicon(replace(toy, cs=CsRegistry(bad_cs)))
    assert info.value.step == 2


def test_unroll_policy_grows_lexicon(toy):
    small = compile_lexicon(toy, CyclePolicy(0))
    big = compile_lexicon(toy, CyclePolicy(1))
    assert big.meta["word_forms"] > small.meta["word_forms"]
    assert lookup(small, decompose_text("학교도만")) == []
    assert len(lookup(big, decompose_text("학교도만"))) == 1
