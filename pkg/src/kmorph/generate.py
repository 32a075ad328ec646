"""Stem allomorphs and derived stems from base-form stem entries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .enumeration import DEFAULT_CAP, CyclePolicy, enumerate_paths
from .hangul import as_leading, as_trailing, as_vowel, is_jamo, is_trailing, is_vowel, normalize_letters, to_compat
from .resources import CsRegistry, EditArc, Graph, Morpheme, OutputArc, StemEntry, SuffixRtn
from .tagset import StructuredTag


class GenerationError(ValueError):
    pass


class EditUnderflow(GenerationError):
    pass


class RemoveMismatch(GenerationError):
    pass


@dataclass(frozen=True)
class StemForm:
    surface: str
    base: str
    tag: StructuredTag
    cs: str
    hanja: str | None = None
    morphemes: tuple[Morpheme, ...] = ()

    @classmethod
    def identity(cls, entry: StemEntry) -> StemForm:
        letters = normalize_letters(entry.base_form)
        return cls(letters, letters, entry.tag, entry.cs, entry.hanja,
                   (Morpheme(letters, letters, entry.tag),))


def _append(letters: list[str], letter: str) -> None:
    prev = letters[-1] if letters else ""
    vowel = as_vowel(letter)
    if vowel:
        # a vowel after a closing consonant re-syllabifies it as the next onset
        if prev and is_trailing(prev) and as_leading(prev):
            letters[-1] = as_leading(prev)
        letters.append(vowel)
    elif is_jamo(letter):
        letters.append(letter)
    elif prev and is_vowel(prev) and as_trailing(letter):
        letters.append(as_trailing(letter))
    else:
        letters.append(as_leading(letter) or as_trailing(letter))


def apply_edits(letters: str, edits: Iterable[EditArc]) -> str:
    """Apply remove/append operations at the end of a letter string, in order."""
    out = list(letters)
    for edit in edits:
        if edit.op == "-":
            if not out:
                raise EditUnderflow(f"cannot remove {edit.letter} from an empty string")
            if to_compat(out[-1]) != to_compat(edit.letter):
                raise RemoveMismatch(f"last letter is {to_compat(out[-1])}, not {to_compat(edit.letter)}")
            out.pop()
        else:
            _append(out, edit.letter)
    return "".join(out)


def rule_paths(graph: Graph) -> list[tuple[list[EditArc], OutputArc | None]]:
    """Accepting paths of an acyclic rule graph as (edit script, output) pairs, in arc order."""
    paths = []

    def walk(state, edits, output):
        if state in graph.finals:
            paths.append((list(edits), output))
        for arc in graph.outgoing(state):
            label = arc.label
            if isinstance(label, EditArc):
                walk(arc.dst, edits + [label], output)
            elif isinstance(label, OutputArc):
                walk(arc.dst, edits, label)

    walk(graph.initial, [], None)
    return paths


def generate_allomorphs(entry: StemEntry, graph: Graph | None, *, strict: bool = True,
                        on_skip: Callable[[StemEntry, Exception], None] | None = None) -> list[StemForm]:
    """Identity form followed by one form per accepting path of the rule graph.

    With ``strict=False`` a path whose edits do not fit the stem is skipped
    (and reported to ``on_skip``) instead of raising.
    """
    base = StemForm.identity(entry)
    forms = [base]
    if graph is None:
        return forms
    for edits, output in rule_paths(graph):
        if output is None:
            raise GenerationError(f"rule graph {graph.name} has a path without output")
        try:
            surface = apply_edits(base.base, edits)
        except GenerationError as exc:
            if strict:
                raise
            if on_skip:
                on_skip(entry, exc)
            continue
        tag = entry.tag.with_features(output.features)
        forms.append(StemForm(surface, base.base, tag, output.cs, entry.hanja,
                              (Morpheme(surface, base.base, tag),)))
    return forms


def generate_derived(stems: list[StemForm], derivation: SuffixRtn, cs_registry: CsRegistry,
                     policy: CyclePolicy = CyclePolicy(), cap: int = DEFAULT_CAP) -> list[StemForm]:
    """Append one derived stem per (stem, derivation path); the input list comes first.

    The derivation root of a stem is the one its CS names in the registry.
    """
    cache: dict[str, list] = {}
    derived = []
    for stem in stems:
        entry = cs_registry.get(stem.cs)
        if entry is None or not entry.derivation or entry.derivation not in derivation:
            continue
        root = entry.derivation
        if root not in cache:
            cache[root] = enumerate_paths(derivation, root, policy, cap)
        for path in cache[root]:
            out = path.output
            if out is None:
                raise GenerationError(f"derivation path through {root} assigns no CS")
            if out.tag is not None:
                tag = out.tag
            elif path.morphemes:
                tag = path.morphemes[-1].tag.with_features(out.features)
            else:
                tag = stem.tag.with_features(out.features)
            derived.append(StemForm(
                stem.surface + path.surface,
                stem.base + "".join(m.base for m in path.morphemes),
                tag,
                out.cs,
                None,
                stem.morphemes + path.morphemes,
            ))
    return list(stems) + derived
