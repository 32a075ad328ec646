from __future__ import annotations

import csv

from kmorph.link import BuildReport, compile_lexicon
from kmorph.report import ENDINGS_FIGURE, SIZE_FIGURE, STATS_FILE, lexicon_report, stats_rows, write_report


def test_write_report(toy, tmp_path):
    report = BuildReport()
    compile_lexicon(toy, report=report)
    paths = write_report(report, tmp_path / "out")
    assert sorted(p.name for p in paths) == sorted([STATS_FILE, SIZE_FIGURE, ENDINGS_FIGURE])
    for p in paths:
        assert p.stat().st_size > 0
    assert (tmp_path / "out" / SIZE_FIGURE).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    with open(tmp_path / "out" / STATS_FILE, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh, delimiter="\t"))
    assert rows[0]["automaton"] == "stems"
    assert int(rows[0]["min_bytes"]) < int(rows[0]["trie_bytes"])
    assert len(rows) == 1 + len(toy.cs)


def test_lexicon_report_matches_build_report(toy, toy_lex):
    built = BuildReport()
    compile_lexicon(toy, report=built)
    recovered = lexicon_report(toy_lex)
    assert recovered.stems_per_cs == built.stems_per_cs
    assert recovered.endings_per_cs == built.endings_per_cs
    assert recovered.word_forms == built.word_forms
    assert recovered.minimal == built.minimal
    assert [r["min_bytes"] for r in stats_rows(recovered)] == [r["min_bytes"] for r in stats_rows(built)]
