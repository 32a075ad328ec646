"""Synthetic resource sets and corpora for scale and throughput testing.

Stems are random 2-3 syllable hangul strings.  Every CS root graph chains
three shared slot subgraphs (one syllable each) and has a fourth branch of
single-syllable endings, sized so that each CS enumerates exactly the
requested number of endings.
"""

from __future__ import annotations

import itertools
import random

from .enumeration import CyclePolicy, enumerate_all
from .hangul import LEADING, VOWELS, compose_letters
from .resources import (
    Arc,
    CallArc,
    CsEntry,
    CsRegistry,
    Graph,
    Morpheme,
    Resources,
    StemEntry,
    SuffixRtn,
)
from .tagset import FeatureRegistry, StructuredTag

STEM_TAGS = ("N", "V", "A", "ADV", "PRO", "NI")
SLOT_TAGS = ("Morph", "Suf", "St", "Sc")
_CODAS = "ᆫᆯᆷᆼᆨ"
VARIANTS = 3


def _syllables() -> list[str]:
    open_ = [lead + vowel for lead in LEADING for vowel in VOWELS]
    closed = [s + coda for s in open_ for coda in _CODAS]
    return open_ + closed


def slot_sizes(n: int) -> tuple[int, int, int, int]:
    """(a, b, c, r) with a*b*c + r == n and r < a*b."""
    if n < 1:
        raise ValueError("need at least one ending per CS")
    a = max(1, round(n ** (1 / 3)))
    c = n // (a * a)
    if c == 0:
        return 1, 1, n, 0
    return a, a, c, n - a * a * c


def _slot_graph(name: str, syllables: list[str], general: str) -> Graph:
    arcs = []
    for i, syl in enumerate(syllables):
        tag = StructuredTag(general, (("f", "ab"[i % 2]),))
        arcs.append(Arc(0, 1, Morpheme(syl, syl, tag)))
    return Graph(name, 2, 0, frozenset({1}), arcs, f"<synth:{name}>")


def synthesize(n_stems: int, endings_per_cs: int, n_cs: int, seed: int = 0) -> Resources:
    if min(n_stems, endings_per_cs, n_cs) < 1:
        raise ValueError("stems, endings per CS and CS count must all be >= 1")
    rng = random.Random(seed)
    pool = _syllables()
    rng.shuffle(pool)
    a, b, c, r = slot_sizes(endings_per_cs)

    features = FeatureRegistry({"f": ("a", "b")})
    rtn = SuffixRtn()
    cursor = 0

    def take(k: int) -> list[str]:
        nonlocal cursor
        chunk = pool[cursor:cursor + k]
        cursor += k
        return chunk

    variants = min(VARIANTS, n_cs)
    for v in range(variants):
        for slot, size, general in zip(("S1", "S2", "S3", "R"), (a, b, c, r), SLOT_TAGS):
            name = f"{slot}_{v}"
            rtn.graphs[name] = _slot_graph(name, take(size), general)

    cs = CsRegistry()
    for k in range(n_cs):
        root = f"Root_{k}"
        arcs = [
            Arc(0, 1, CallArc(f"S1_{k % variants}")),
            Arc(1, 2, CallArc(f"S2_{(k + 1) % variants}")),
            Arc(2, 3, CallArc(f"S3_{(k + 2) % variants}")),
        ]
        if r:
            arcs.append(Arc(0, 3, CallArc(f"R_{k % variants}")))
        rtn.graphs[root] = Graph(root, 4, 0, frozenset({3}), arcs, f"<synth:{root}>")
        cs[f"CS{k:02d}"] = CsEntry(f"CS{k:02d}", root)
    # slot graphs with an empty remainder are never called
    for name in [g for g, graph in rtn.graphs.items() if not graph.arcs]:
        del rtn.graphs[name]

    stem_pool = _syllables()
    seen: set[str] = set()
    stems = []
    cs_ids = list(cs)
    while len(stems) < n_stems:
        word = "".join(rng.choice(stem_pool) for _ in range(rng.choice((2, 2, 3))))
        if word in seen:
            continue
        seen.add(word)
        k = len(stems) % n_cs
        text = compose_letters(word)
        stems.append(StemEntry(text, StructuredTag(STEM_TAGS[k % len(STEM_TAGS)]), cs_ids[k]))
    return Resources(features, cs, stems, rtn, {})


def _zipf_weights(n: int, exponent: float) -> list[float]:
    weights = [1.0 / (rank + 1) ** exponent for rank in range(n)]
    return list(itertools.accumulate(weights))


def synthetic_corpus(res: Resources, n_words: int, seed: int = 0, words_per_sentence: int = 12,
                     policy: CyclePolicy = CyclePolicy(), zipf: float = 1.0) -> str:
    """Text of ``n_words`` known words: stem forms followed by endings of their CS.

    Stems and endings are drawn with Zipf-distributed frequencies over a
    random ranking (``zipf=0`` draws uniformly), which mimics the heavy
    repetition of word types in running text.
    """
    from .link import generate_stem_forms

    rng = random.Random(seed)
    forms = generate_stem_forms(res, policy)
    endings = enumerate_all(res.rtn, res.cs, policy)
    endings = {k: [e.surface for e in v] for k, v in endings.items() if v}
    forms = [f for f in forms if f.cs in endings]
    if not forms:
        raise ValueError("no stem has a non-empty ending list")
    rng.shuffle(forms)
    for surfaces in endings.values():
        rng.shuffle(surfaces)
    stem_cum = _zipf_weights(len(forms), zipf)
    ending_cum = {k: _zipf_weights(len(v), zipf) for k, v in endings.items()}
    stems = rng.choices(forms, cum_weights=stem_cum, k=n_words)
    out = []
    sentence = []
    for form in stems:
        ending = rng.choices(endings[form.cs], cum_weights=ending_cum[form.cs])[0]
        sentence.append(compose_letters(form.surface + ending))
        if len(sentence) == words_per_sentence:
            out.append(" ".join(sentence) + ".\n")
            sentence = []
    if sentence:
        out.append(" ".join(sentence) + ".\n")
    return "".join(out)
