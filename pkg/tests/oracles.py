"""Brute-force reference implementations used by several test modules."""

from __future__ import annotations

from collections import Counter


def right_language_state_count(entries: dict[str, tuple[int, ...]]) -> int:
    """States of the minimal trimmed DFA: one per distinct residual language.

    Each prefix of a key has the residual {(suffix, payloads)}; prefixes with
    equal residuals are Myhill-Nerode equivalent.  The empty language still
    has its initial state.
    """
    prefixes = {k[:i] for k in entries for i in range(len(k) + 1)} or {""}
    residuals = set()
    for p in prefixes:
        residuals.add(frozenset((k[len(p):], entries[k]) for k in entries if k.startswith(p)))
    return len(residuals)


def brute_force_analyses(forms, endings) -> Counter:
    """Concatenate every generated stem form with every ending of its CS."""
    table: Counter = Counter()
    for form in forms:
        for ending in endings.get(form.cs, ()):
            table[(form.surface + ending.surface, form.morphemes + ending.morphemes)] += 1
    return table
