"""Lexicon statistics as a TSV table plus matplotlib figures."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .fileio import atomic_write
from .fst import Stats
from .link import BuildReport, WordLexicon

STATS_FILE = "stats.tsv"
SIZE_FIGURE = "sizes.png"
ENDINGS_FIGURE = "endings_per_cs.png"


def lexicon_report(lex: WordLexicon) -> BuildReport:
    """Counts and minimal sizes recovered from a loaded lexicon (no trie figures)."""
    report = BuildReport(measure_trie=False)
    report.minimal = lex.stats()
    stems_per_cs: dict[str, int] = {}
    for _, payloads in lex.stems.items():
        for p in payloads:
            cs = lex.stem_cs(p)
            stems_per_cs[cs] = stems_per_cs.get(cs, 0) + 1
    report.stems_per_cs = dict(sorted(stems_per_cs.items()))
    report.stem_forms = sum(stems_per_cs.values())
    report.endings_per_cs = {cs: sum(len(p) for _, p in a.items()) for cs, a in lex.endings.items()}
    return report


def stats_rows(report: BuildReport) -> list[dict]:
    """One row per automaton: trie and minimal sizes side by side."""
    rows = []
    for name in sorted(report.minimal, key=lambda n: (n != "stems", n)):
        m: Stats = report.minimal[name]
        t: Stats | None = report.trie.get(name)
        cs = name[4:] if name.startswith("end:") else ""
        rows.append({
            "automaton": name,
            "stems": report.stems_per_cs.get(cs, report.stem_forms if name == "stems" else 0),
            "endings": report.endings_per_cs.get(cs, 0),
            "trie_states": t.states if t else "",
            "trie_transitions": t.transitions if t else "",
            "trie_bytes": t.serialized_bytes if t else "",
            "min_states": m.states,
            "min_transitions": m.transitions,
            "min_bytes": m.serialized_bytes,
        })
    return rows


def stats_tsv(report: BuildReport) -> str:
    rows = stats_rows(report)
    buf = io.StringIO()
    fields = list(rows[0]) if rows else ["automaton"]
    writer = csv.DictWriter(buf, fields, delimiter="\t", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _png(fig) -> bytes:
    buf = io.BytesIO()
    # fixed metadata keeps the figures byte-stable across runs
    fig.savefig(buf, format="png", dpi=100, metadata={"Software": None})
    return buf.getvalue()


def write_report(report: BuildReport, outdir: str | Path) -> list[Path]:
    """Write the stats table and the two figures; return the written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    written = []
    path = outdir / STATS_FILE
    atomic_write(path, stats_tsv(report).encode("utf-8"))
    written.append(path)

    rows = stats_rows(report)
    names = [r["automaton"] for r in rows]
    fig, ax = plt.subplots(figsize=(max(4, 0.6 * len(names) + 2), 3.5))
    xs = range(len(names))
    trie = [r["trie_bytes"] or 0 for r in rows]
    minimal = [r["min_bytes"] for r in rows]
    ax.bar([x - 0.2 for x in xs], trie, width=0.4, label="trie")
    ax.bar([x + 0.2 for x in xs], minimal, width=0.4, label="minimal")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("serialized bytes")
    ax.legend()
    fig.tight_layout()
    path = outdir / SIZE_FIGURE
    atomic_write(path, _png(fig))
    plt.close(fig)
    written.append(path)

    cs_ids = sorted(report.endings_per_cs)
    fig, ax = plt.subplots(figsize=(max(4, 0.5 * len(cs_ids) + 2), 3.5))
    ax.bar(range(len(cs_ids)), [report.endings_per_cs[c] for c in cs_ids], label="endings")
    ax.plot(range(len(cs_ids)), [report.stems_per_cs.get(c, 0) for c in cs_ids], "o", color="C1",
            label="stem forms")
    ax.set_xticks(range(len(cs_ids)))
    ax.set_xticklabels(cs_ids, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    path = outdir / ENDINGS_FIGURE
    atomic_write(path, _png(fig))
    plt.close(fig)
    written.append(path)
    return written
