"""Text to morpheme lattices.

Each sentence becomes one acyclic graph from a source node to a sink node.
A word contributes one parallel chain of morpheme nodes per analysis;
separators, punctuation and unknown tokens contribute a single node.  No
analysis is ever dropped: disambiguation is left to later processing.
"""

from __future__ import annotations

import gc
import json
import re
import threading
import time
import unicodedata
import weakref
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

from .hangul import compose_letters, decompose_text
from .link import Analysis, WordLexicon
from .resources import Morpheme

_HANGUL = "\uAC00-\uD7A3\u1100-\u11FF\u3130-\u318F"
_HANJA = "\u3400-\u4DBF\u4E00-\u9FFF\uF900-\uFAFF\U00020000-\U0002FA1F"
_TOKEN = re.compile(rf"([{_HANGUL}]+)|([{_HANJA}]+)|(\s+)|(.)", re.S)
_BOUNDARY = re.compile(r"[.?!…]+(?=\s|$)|\n[^\S\n]*\n")


class LexiconNotLoaded(RuntimeError):
    pass


class UnsupportedFormat(ValueError):
    pass


class Sentence(NamedTuple):
    text: str
    offset: int


class Token(NamedTuple):
    text: str
    kind: str  # word | separator | punctuation | hanja-word | other
    offset: int


class Node(NamedTuple):
    id: int
    kind: str  # source | sink | morpheme | separator | punctuation | unknown
    surface: str = ""
    base: str = ""
    tag: str = ""
    span: tuple[int, int] = (0, 0)
    path: int = 0  # analysis index within the token


@dataclass
class Lattice:
    text: str
    offset: int
    nodes: list[Node]
    edges: list[tuple[int, int]]
    words: int = 0  # word, hanja-word and unknown spans


def segment_sentences(text: str) -> list[Sentence]:
    """Split after sentence-final punctuation followed by whitespace or the end, and at blank lines."""
    cuts = []
    for m in _BOUNDARY.finditer(text):
        cuts.append(m.end() if m.group()[0] != "\n" else m.start())
    sentences = []
    start = 0
    for end in cuts + [len(text)]:
        chunk = text[start:end]
        stripped = chunk.strip()
        if stripped:
            sentences.append(Sentence(stripped, start + len(chunk) - len(chunk.lstrip())))
        start = max(start, end)
    return sentences


_GROUP_KINDS = (None, "word", "hanja-word", "separator")


def tokenize(sentence: str) -> list[Token]:
    tokens: list[Token] = []
    append = tokens.append
    for m in _TOKEN.finditer(sentence):
        group = m.lastindex
        if group < 4:
            append(tuple.__new__(Token, (m.group(), _GROUP_KINDS[group], m.start())))
            continue
        char = m.group()
        start = m.start()
        if unicodedata.category(char).startswith("P"):
            append(Token(char, "punctuation", start))
        elif tokens and tokens[-1].kind == "other" and tokens[-1].offset + len(tokens[-1].text) == start:
            last = tokens[-1]
            tokens[-1] = Token(last.text + char, "other", last.offset)
        else:
            append(Token(char, "other", start))
    return tokens


def analyze_token(lex: WordLexicon, token: Token, following: Token | None = None) -> tuple[list[Analysis], int]:
    """Analyses for a token and how many tokens they cover.

    An ideogram stem written directly before hangul (``學校에``) is looked up
    together with the hangul ending; if that fails the tokens are analysed
    separately.
    """
    if token.kind == "word":
        return lex.lookup(decompose_text(token.text)), 1
    if token.kind == "hanja-word":
        if following is not None and following.kind == "word":
            joint = lex.lookup_hanja_word(token.text, decompose_text(following.text))
            if joint:
                return joint, 2
        return lex.lookup_hanja(token.text), 1
    return [], 1


# morphemes repeat heavily across words; each is converted for display once
@lru_cache(maxsize=1 << 17)
def _display(m: Morpheme) -> tuple[str, str, str]:
    return compose_letters(m.surface), compose_letters(m.base), m.tag.text


def _chains(analyses: list[Analysis]) -> tuple[tuple[tuple[str, str, str], ...], ...]:
    return tuple(tuple(_display(m) for m in a.morphemes) for a in analyses)


class _DisplayLookup:
    """Word lookup producing display chains directly.

    Same analyses, in the same order, as ``WordLexicon.lookup``, but stem and
    ending parts are converted for display once per (payload, prefix) and per
    (CS, remainder) instead of once per word.
    """

    LIMIT = 1 << 18

    def __init__(self, lex: WordLexicon):
        self.lex = lex
        self.stems: dict = {}
        self.endings: dict = {}

    def __call__(self, word: str) -> list[tuple[tuple[str, str, str], ...]]:
        lex = self.lex
        stems = self.stems
        endings = self.endings
        out = []
        for split, payloads in lex.stem_matches(word):
            prefix, rest = word[:split], word[split:]
            for p in payloads:
                stem = stems.get((p, prefix))
                if stem is None:
                    if len(stems) >= self.LIMIT:
                        stems.clear()
                    cs, ms = lex._stem_morphemes(p, prefix)
                    stem = stems[(p, prefix)] = (cs, tuple(_display(m) for m in ms))
                cs, shown = stem
                tails = endings.get((cs, rest))
                if tails is None:
                    if len(endings) >= self.LIMIT:
                        endings.clear()
                    tails = endings[(cs, rest)] = tuple(
                        tuple(_display(m) for m in e) for e in lex._ending_morphemes(cs, rest))
                out.extend([shown + t for t in tails])
        return out


_lookups: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _display_lookup(lex: WordLexicon) -> _DisplayLookup:
    found = _lookups.get(lex)
    if found is None:
        found = _lookups[lex] = _DisplayLookup(lex)
    return found


_new = tuple.__new__


def _build(lex: WordLexicon, sentence: Sentence) -> Lattice:
    text = sentence.text
    nodes = [Node(0, "source")]
    edges: list[tuple[int, int]] = []
    ends = [0]
    tokens = tokenize(text)
    n_tokens = len(tokens)
    display_lookup = _display_lookup(lex)
    words = 0
    i = 0
    while i < n_tokens:
        tok = tokens[i]
        kind = tok.kind
        if kind == "separator" or kind == "punctuation":
            i += 1
            nid = len(nodes)
            start = tok.offset
            nodes.append(_new(Node, (nid, kind, tok.text, tok.text, "", (start, start + len(tok.text)), 0)))
            edges.extend([(e, nid) for e in ends])
            ends = [nid]
            continue
        if tok.kind == "word":
            i += 1
            chains = display_lookup(decompose_text(tok.text))
            span = (tok.offset, tok.offset + len(tok.text))
            single = None if chains else "unknown"
            words += 1
        else:
            following = tokens[i + 1] if i + 1 < n_tokens else None
            analyses, used = analyze_token(lex, tok, following)
            chains = _chains(analyses)
            last = tokens[i + used - 1]
            span = (tok.offset, last.offset + len(last.text))
            i += used
            single = None if chains else "unknown"
            words += 1
        if single is not None:
            surface = text[span[0]:span[1]]
            chains = (((surface, surface, ""),),)
        new_ends = []
        kind = single or "morpheme"
        for path, chain in enumerate(chains):
            prev = -1
            for surface, base, tag in chain:
                nid = len(nodes)
                nodes.append(_new(Node, (nid, kind, surface, base, tag, span, path)))
                if prev < 0:
                    edges.extend([(e, nid) for e in ends])
                else:
                    edges.append((prev, nid))
                prev = nid
            new_ends.append(prev)
        ends = new_ends
    sink = Node(len(nodes), "sink", span=(len(text), len(text)))
    nodes.append(sink)
    edges.extend([(e, sink.id) for e in ends])
    return Lattice(text, sentence.offset, nodes, edges, words)


_gc_lock = threading.Lock()
_gc_depth = 0
_gc_was_enabled = [True]


@contextmanager
def _cyclic_gc_paused():
    """Lattices hold no reference cycles, so reference counting frees them;
    running the cycle collector over millions of fresh nodes only costs time."""
    global _gc_depth
    with _gc_lock:
        if _gc_depth == 0:
            _gc_was_enabled[0] = gc.isenabled()
            gc.disable()
        _gc_depth += 1
    try:
        yield
    finally:
        with _gc_lock:
            _gc_depth -= 1
            if _gc_depth == 0 and _gc_was_enabled[0]:
                gc.enable()


def annotate(lex: WordLexicon | None, text: str, threads: int = 1) -> list[Lattice]:
    """One lattice per sentence, in input order."""
    if lex is None:
        raise LexiconNotLoaded("no lexicon loaded")
    sentences = segment_sentences(text)
    with _cyclic_gc_paused():
        if threads > 1 and len(sentences) > 1:
            with ThreadPoolExecutor(threads) as pool:
                return list(pool.map(lambda s: _build(lex, s), sentences, chunksize=64))
        return [_build(lex, s) for s in sentences]


def benchmark(lex: WordLexicon, text: str) -> tuple[int, float]:
    """(words, seconds) for annotating ``text`` with lattices discarded as they are built."""
    clock = time.perf_counter
    start = clock()
    words = 0
    with _cyclic_gc_paused():
        for sentence in segment_sentences(text):
            words += _build(lex, sentence).words
    return words, clock() - start


def count_words(lattices: Iterable[Lattice]) -> int:
    """Number of word and hanja-word spans (the unit of throughput figures)."""
    total = 0
    for lat in lattices:
        spans = {n.span for n in lat.nodes if n.kind in ("morpheme", "unknown")}
        total += len(spans)
    return total


# -- output -----------------------------------------------------------------

_MARKERS = {"separator": "SEP", "punctuation": "PUNCT", "unknown": "UNK"}


def _tsv_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def write_lattice(lattices: Iterable[Lattice], fmt: str = "tsv") -> bytes:
    """Serialize lattices as one JSON document or as TSV, one morpheme per line.

    TSV columns: sentence index, analysis index within the token, surface,
    base, tag.  Separators, punctuation and unknown tokens carry ``SEP``,
    ``PUNCT`` and ``UNK`` in the tag column.
    """
    if fmt == "json":
        doc = [
            {
                "text": lat.text,
                "offset": lat.offset,
                "nodes": [
                    {"id": n.id, "kind": n.kind, "surface": n.surface, "base": n.base,
                     "tag": n.tag, "span": list(n.span), "path": n.path}
                    for n in lat.nodes
                ],
                "edges": [list(e) for e in lat.edges],
            }
            for lat in lattices
        ]
        return (json.dumps(doc, ensure_ascii=False, indent=1) + "\n").encode("utf-8")
    if fmt == "tsv":
        lines = []
        for si, lat in enumerate(lattices):
            for n in lat.nodes:
                if n.kind in ("source", "sink"):
                    continue
                tag = n.tag if n.kind == "morpheme" else _MARKERS[n.kind]
                lines.append(f"{si}\t{n.path}\t{_tsv_escape(n.surface)}\t{_tsv_escape(n.base)}\t{tag}\n")
        return "".join(lines).encode("utf-8")
    raise UnsupportedFormat(fmt)


def read_lattice_json(data: bytes | str) -> list[Lattice]:
    doc = json.loads(data)
    return [
        Lattice(
            s["text"],
            s["offset"],
            [Node(n["id"], n["kind"], n["surface"], n["base"], n["tag"], tuple(n["span"]), n.get("path", 0))
             for n in s["nodes"]],
            [tuple(e) for e in s["edges"]],
            len({tuple(n["span"]) for n in s["nodes"] if n["kind"] in ("morpheme", "unknown")}),
        )
        for s in doc
    ]
