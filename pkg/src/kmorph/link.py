"""Compile resources into a word lexicon and look words up in it.

The lexicon is a minimal stem automaton plus one minimal ending automaton
per CS.  A stem final carries payload records naming the CS; lookup
switches to that CS's ending automaton at every stem final it passes, so
every stem/ending split of the word is found.

Payload records store morphemes relative to the key they are attached to
(length of each morpheme's surface, letters to strip from it, letters to
append to get the base form, tag), which lets unrelated words share
records and therefore states after minimization.
"""

from __future__ import annotations

import json
import os
import struct
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from . import __version__
from .enumeration import DEFAULT_CAP, CyclePolicy, EndingSequence, EnumerationError, enumerate_all
from .fst import (
    Automaton,
    BadMagic,
    ChecksumMismatch,
    FormatError,
    Stats,
    TruncatedInput,
    VersionMismatch,
    build_trie,
    deserialize,
    minimize,
    serialize,
    stats,
)
from .fileio import atomic_write
from .generate import GenerationError, StemForm, generate_allomorphs, generate_derived
from .resources import Diagnostic, Morpheme, Resources
from .tagset import StructuredTag, TagError, format_tag, parse_tag

MAGIC = b"KLEX"
VERSION = 1
MEMO_LIMIT = 1 << 18


class CompileError(Exception):
    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


class Analysis(NamedTuple):
    morphemes: tuple[Morpheme, ...]
    split: int  # letters consumed by the stem
    stem_morphemes: int  # how many leading morphemes belong to the stem


@dataclass
class BuildReport:
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[Diagnostic] = field(default_factory=list)
    stem_forms: int = 0
    stems_per_cs: dict[str, int] = field(default_factory=dict)
    endings_per_cs: dict[str, int] = field(default_factory=dict)
    trie: dict[str, Stats] = field(default_factory=dict)
    minimal: dict[str, Stats] = field(default_factory=dict)
    measure_trie: bool = True

    @property
    def word_forms(self) -> int:
        return sum(n * self.endings_per_cs.get(cs, 0) for cs, n in self.stems_per_cs.items())


# -- payload records --------------------------------------------------------


def _codes(morphemes: tuple[Morpheme, ...]) -> list:
    codes = []
    for m in morphemes:
        n = len(m.surface)
        p = 0
        while p < n and p < len(m.base) and m.surface[p] == m.base[p]:
            p += 1
        codes.append([n, n - p, m.base[p:], format_tag(m.tag)])
    return codes


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True)


def stem_record(form: StemForm) -> str:
    record = {"cs": form.cs, "m": _codes(form.morphemes)}
    if form.hanja:
        record["h"] = form.hanja
    return _dumps(record)


def ending_record(ending: EndingSequence) -> str:
    return _dumps(_codes(ending.morphemes))


class _Interner:
    """Payload table: identical records share one index."""

    def __init__(self):
        self.index: dict[str, int] = {}
        self.records: list[str] = []

    def __call__(self, record: str) -> int:
        i = self.index.get(record)
        if i is None:
            i = self.index[record] = len(self.records)
            self.records.append(record)
        return i


# -- the lexicon ------------------------------------------------------------


class WordLexicon:
    """Compiled, immutable lookup artifact; safe to share between threads."""

    def __init__(self, stems: Automaton, endings: dict[str, Automaton],
                 hanja: dict[str, list], meta: dict):
        self.stems = stems
        self.endings = dict(sorted(endings.items()))
        self.hanja = hanja
        self.meta = meta
        self._tags: dict[str, StructuredTag] = {}
        self._stem_records = [self._decode_stem(r) for r in stems.payloads]
        self._ending_records = {cs: [self._decode_codes(json.loads(r)) for r in a.payloads]
                                for cs, a in self.endings.items()}
        # expansions are pure functions of (record, key); memoized up to a bound
        self._memo: dict[tuple, tuple] = {}

    def _tag(self, text: str) -> StructuredTag:
        tag = self._tags.get(text)
        if tag is None:
            try:
                tag = self._tags[text] = parse_tag(text)
            except TagError as exc:
                raise FormatError(f"bad tag in payload: {exc}") from None
        return tag

    def _decode_codes(self, codes: list) -> tuple:
        return tuple((n, strip, tail, self._tag(tag)) for n, strip, tail, tag in codes)

    def _decode_stem(self, record: str):
        obj = json.loads(record)
        return obj["cs"], self._decode_codes(obj["m"]), obj.get("h")

    @staticmethod
    def _expand(codes: tuple, key: str) -> tuple[Morpheme, ...]:
        out = []
        pos = 0
        for n, strip, tail, tag in codes:
            surface = key[pos:pos + n]
            pos += n
            base = (surface[:n - strip] if strip else surface) + tail
            out.append(Morpheme(surface, base, tag))
        return tuple(out)

    def _remember(self, key: tuple, value: tuple) -> tuple:
        if len(self._memo) >= MEMO_LIMIT:
            self._memo.clear()
        self._memo[key] = value
        return value

    def _stem_morphemes(self, p: int, prefix: str) -> tuple[str, tuple[Morpheme, ...]]:
        key = (p, prefix)
        hit = self._memo.get(key)
        if hit is None:
            cs, codes, _ = self._stem_records[p]
            hit = self._remember(key, (cs, self._expand(codes, prefix)))
        return hit

    def _ending_morphemes(self, cs: str, rest: str) -> tuple[tuple[Morpheme, ...], ...]:
        key = (cs, rest)
        hit = self._memo.get(key)
        if hit is None:
            automaton = self.endings.get(cs)
            t = automaton.walk(rest) if automaton is not None else None
            if t is None:
                hit = ()
            else:
                records = self._ending_records[cs]
                hit = tuple(self._expand(records[q], rest) for q in automaton.finals.get(t, ()))
            self._remember(key, hit)
        return hit

    def _endings(self, cs: str, rest: str, stem: tuple[Morpheme, ...], split: int, out: list) -> None:
        n = len(stem)
        for ending in self._ending_morphemes(cs, rest):
            out.append(Analysis(stem + ending, split, n))

    def stem_cs(self, payload: int) -> str:
        return self._stem_records[payload][0]

    def stem_matches(self, word: str) -> list[tuple[int, tuple[int, ...]]]:
        """(split, stem payloads) for every prefix of ``word`` that is a stem form."""
        out = []
        trans = self.stems.transitions
        finals = self.stems.finals
        s = self.stems.initial
        for i, ch in enumerate(word):
            s = trans[s].get(ch)
            if s is None:
                break
            payloads = finals.get(s)
            if payloads:
                out.append((i + 1, payloads))
        return out

    def lookup(self, word: str) -> list[Analysis]:
        """Every stem/ending decomposition of a jamo-letter word, by split point then payload."""
        out: list[Analysis] = []
        trans = self.stems.transitions
        finals = self.stems.finals
        memo = self._memo
        s = self.stems.initial
        for i, ch in enumerate(word):
            s = trans[s].get(ch)
            if s is None:
                break
            payloads = finals.get(s)
            if payloads:
                split = i + 1
                prefix, rest = word[:split], word[split:]
                for p in payloads:
                    hit = memo.get((p, prefix))
                    cs, stem = hit if hit is not None else self._stem_morphemes(p, prefix)
                    endings = memo.get((cs, rest))
                    if endings is None:
                        endings = self._ending_morphemes(cs, rest)
                    n = len(stem)
                    for ending in endings:
                        out.append(Analysis(stem + ending, split, n))
        return out

    def lookup_hanja(self, token: str) -> list[Analysis]:
        """Stem-only analyses for every stem spelled ``token`` in ideograms."""
        return [Analysis(stem, len(token), 1) for stem, _ in self._hanja_stems(token)]

    def lookup_hanja_word(self, token: str, rest: str) -> list[Analysis]:
        """Analyses of an ideogram stem followed by a hangul ending (``rest`` in letters)."""
        out: list[Analysis] = []
        for stem, cs in self._hanja_stems(token):
            self._endings(cs, rest, stem, len(token), out)
        return out

    def _hanja_stems(self, token: str):
        for base, p in self.hanja.get(token, ()):
            cs, codes, _ = self._stem_records[p]
            morphemes = self._expand(codes, base)
            head = morphemes[0]
            yield (Morpheme(token, head.base, head.tag),) + morphemes[1:], cs

    # -- persistence --------------------------------------------------------

    def sections(self) -> list[tuple[str, bytes]]:
        out = [
            ("meta", _dumps(self.meta).encode("utf-8")),
            ("stems", serialize(self.stems)),
            ("hanja", _dumps(self.hanja).encode("utf-8")),
        ]
        for cs, automaton in self.endings.items():
            out.append((f"end:{cs}", serialize(automaton)))
        return out

    def to_bytes(self) -> bytes:
        sections = self.sections()
        header = bytearray(MAGIC)
        header += struct.pack("<HI", VERSION, len(sections))
        table_size = sum(2 + len(name.encode()) + 16 for name, _ in sections)
        offset = len(header) + table_size
        for name, data in sections:
            raw = name.encode("utf-8")
            header += struct.pack("<H", len(raw)) + raw + struct.pack("<QQ", offset, len(data))
            offset += len(data)
        blob = bytes(header) + b"".join(data for _, data in sections)
        return blob + struct.pack("<I", zlib.crc32(blob))

    @classmethod
    def from_bytes(cls, data: bytes) -> WordLexicon:
        if len(data) < 14:
            raise TruncatedInput("lexicon file is shorter than its header")
        if data[:4] != MAGIC:
            raise BadMagic(repr(data[:4]))
        version, count = struct.unpack_from("<HI", data, 4)
        if version != VERSION:
            raise VersionMismatch(f"lexicon version {version}, expected {VERSION}")
        if zlib.crc32(data[:-4]) != struct.unpack("<I", data[-4:])[0]:
            raise ChecksumMismatch("lexicon CRC-32 does not match")
        pos = 10
        sections = {}
        try:
            for _ in range(count):
                (n,) = struct.unpack_from("<H", data, pos)
                name = data[pos + 2:pos + 2 + n].decode("utf-8")
                offset, length = struct.unpack_from("<QQ", data, pos + 2 + n)
                pos += 2 + n + 16
                sections[name] = data[offset:offset + length]
            meta = json.loads(sections["meta"])
            hanja = json.loads(sections["hanja"])
            stems = deserialize(sections["stems"])
            endings = {name[4:]: deserialize(blob) for name, blob in sections.items()
                       if name.startswith("end:")}
        except (struct.error, KeyError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"corrupt lexicon: {exc!r}") from None
        return cls(stems, endings, hanja, meta)

    def save(self, path: str | Path) -> None:
        """Write atomically: a failed write never leaves a partial file behind."""
        atomic_write(path, self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> WordLexicon:
        return cls.from_bytes(Path(path).read_bytes())

    def stats(self) -> dict[str, Stats]:
        out = {"stems": stats(self.stems)}
        for cs, automaton in self.endings.items():
            out[f"end:{cs}"] = stats(automaton)
        return out


def lookup(lex: WordLexicon, word: str) -> list[Analysis]:
    return lex.lookup(word)


def lookup_hanja(lex: WordLexicon, token: str) -> list[Analysis]:
    return lex.lookup_hanja(token)


# -- compilation ------------------------------------------------------------


def generate_stem_forms(res: Resources, policy: CyclePolicy = CyclePolicy(), cap: int = DEFAULT_CAP,
                        warnings: list[Diagnostic] | None = None) -> list[StemForm]:
    """Identity forms, allomorphs and derived stems of every lexicon entry, in canonical order."""
    warnings = [] if warnings is None else warnings

    def skipped(entry, exc):
        warnings.append(Diagnostic("warning", "RuleSkipped",
                                   f"{entry.base_form}: {type(exc).__name__}: {exc}",
                                   entry.source, entry.line))

    forms: list[StemForm] = []
    for entry in res.stems:
        cs = res.cs.get(entry.cs)
        if cs is None:
            raise GenerationError(f"stem {entry.base_form} has unknown CS {entry.cs!r}")
        graph = res.allomorphs.get(cs.allomorph) if cs.allomorph else None
        forms.extend(generate_allomorphs(entry, graph, strict=False, on_skip=skipped))
    forms = generate_derived(forms, res.rtn, res.cs, policy, cap)
    kept = []
    for form in forms:
        if not form.surface:
            warnings.append(Diagnostic("warning", "EmptyStem", f"allomorph of {form.base} has no letters"))
        elif form.cs not in res.cs:
            raise GenerationError(f"stem form {form.base} assigned unknown CS {form.cs!r}")
        else:
            kept.append(form)
    return kept


def compile_lexicon(res: Resources, policy: CyclePolicy = CyclePolicy(), cap: int = DEFAULT_CAP,
                    report: BuildReport | None = None) -> WordLexicon:
    """Run the five compilation steps and return the linked word lexicon."""
    report = BuildReport(measure_trie=False) if report is None else report
    clock = time.perf_counter

    t0 = clock()
    try:
        identity = [StemForm.identity(e) for e in res.stems]
    except Exception as exc:  # noqa: BLE001 - annotate with the step number
        raise CompileError(1, str(exc)) from exc
    report.timings["1 decompose"] = clock() - t0

    t0 = clock()
    try:
        forms = generate_stem_forms(res, policy, cap, report.warnings)
    except (GenerationError, EnumerationError, TagError) as exc:
        raise CompileError(2, f"{type(exc).__name__}: {exc}") from exc
    report.timings["2 generate"] = clock() - t0
    report.stem_forms = len(forms)

    t0 = clock()
    table = _Interner()
    entries = [(form.surface, table(stem_record(form))) for form in forms]
    stem_trie = build_trie(entries, table.records)
    stem_min = minimize(stem_trie)
    if report.measure_trie:
        report.trie["stems"] = stats(stem_trie)
        report.minimal["stems"] = stats(stem_min)
    del stem_trie
    hanja: dict[str, list] = {}
    for form, (_, p) in zip(forms, entries):
        if form.hanja and len(form.morphemes) == 1 and form.surface == form.base:
            hanja.setdefault(form.hanja, []).append([form.base, p])
    report.timings["3 stem automaton"] = clock() - t0

    t0 = clock()
    try:
        endings = enumerate_all(res.rtn, res.cs, policy, cap)
    except EnumerationError as exc:
        raise CompileError(4, f"{type(exc).__name__}: {exc}") from exc
    automata: dict[str, Automaton] = {}
    built: dict[str, tuple[Automaton, Stats | None, Stats | None]] = {}
    for cs, entry in res.cs.items():
        if entry.root not in built:
            table = _Interner()
            trie = build_trie(((e.surface, table(ending_record(e))) for e in endings[cs]), table.records)
            minimal = minimize(trie)
            if report.measure_trie:
                built[entry.root] = (minimal, stats(trie), stats(minimal))
            else:
                built[entry.root] = (minimal, None, None)
        automata[cs], trie_stats, min_stats = built[entry.root]
        if report.measure_trie:
            report.trie[f"end:{cs}"] = trie_stats
            report.minimal[f"end:{cs}"] = min_stats
        report.endings_per_cs[cs] = len(endings[cs])
    report.timings["4 ending automata"] = clock() - t0

    t0 = clock()
    per_cs: dict[str, int] = {}
    for form in forms:
        per_cs[form.cs] = per_cs.get(form.cs, 0) + 1
    report.stems_per_cs = dict(sorted(per_cs.items()))
    for cs, n in report.stems_per_cs.items():
        if not endings[cs]:
            report.warnings.append(Diagnostic(
                "warning", "VacuousLink", f"{n} stem form(s) with CS {cs} match no word: empty ending list"))
    meta = {
        "built": int(os.environ.get("SOURCE_DATE_EPOCH", "0") or 0),
        "generator": f"kmorph {__version__}",
        "max_unroll": policy.max_unroll,
        "resources_sha256": res.digest(),
        "stem_forms": len(forms),
        "word_forms": report.word_forms,
    }
    lex = WordLexicon(stem_min, automata, hanja, meta)
    report.timings["5 link"] = clock() - t0
    return lex
