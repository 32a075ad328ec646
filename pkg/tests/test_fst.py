from __future__ import annotations

import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmorph.fst import (
    Automaton,
    BadMagic,
    ChecksumMismatch,
    CyclicInput,
    FormatError,
    TruncatedInput,
    VersionMismatch,
    build_trie,
    deserialize,
    minimize,
    serialize,
    stats,
)

from .oracles import right_language_state_count

WORDS = ["tap", "taps", "top", "tops", "stop", "stops", "star", "stars"]


def payload_map(a: Automaton) -> dict[str, tuple[int, ...]]:
    return dict(a.items())


def make(entries):
    return build_trie(entries, [f"p{i}" for i in range(10)])


def test_trie_accepts_exactly_the_keys():
    a = make((w, 0) for w in WORDS)
    assert sorted(k for k, _ in a.items()) == sorted(WORDS)
    assert "ta" not in a and "taps" in a
    assert a.get("zzz") == ()


def test_repeated_keys_merge_payloads():
    a = make([("ab", 2), ("ab", 1), ("ab", 2)])
    assert a.get("ab") == (1, 2)


def test_minimize_known_example():
    # all 8 words end in the same suffix set {"", "s"} after t?p / st?p
    m = minimize(make((w, 0) for w in WORDS))
    assert m.n_states == right_language_state_count({w: (0,) for w in WORDS})
    assert payload_map(m) == {w: (0,) for w in WORDS}


def test_payloads_block_merging():
    same = minimize(make([("ax", 0), ("bx", 0)]))
    different = minimize(make([("ax", 0), ("bx", 1)]))
    assert same.n_states < different.n_states


def test_empty_key_and_empty_automaton():
    a = minimize(make([("", 3)]))
    assert a.get("") == (3,)
    empty = minimize(make([]))
    assert empty.n_states == 1 and not list(empty.items())


def test_minimize_is_idempotent_and_canonical():
    m = minimize(make((w, i % 2) for i, w in enumerate(WORDS)))
    assert minimize(m) == m
    shuffled = list(enumerate(WORDS))
    random.Random(1).shuffle(shuffled)
    assert minimize(make((w, i % 2) for i, w in shuffled)) == m


def test_cycle_rejected():
    a = Automaton([{"a": 1}, {"b": 0}], {1: (0,)}, ["x"])
    with pytest.raises(CyclicInput):
        minimize(a)


keysets = st.dictionaries(
    st.text(alphabet="abc", max_size=8),
    st.integers(0, 2),
    max_size=100,
)


@settings(max_examples=150, deadline=None)
@given(keysets)
def test_minimize_against_right_language_oracle(entries):
    trie = make(entries.items())
    m = minimize(trie)
    expected = {k: (v,) for k, v in entries.items()}
    assert payload_map(m) == expected
    assert payload_map(trie) == expected
    assert m.n_states == right_language_state_count(expected)
    assert stats(m).serialized_bytes <= stats(trie).serialized_bytes


@settings(max_examples=60, deadline=None)
@given(keysets)
def test_serialize_roundtrip(entries):
    m = minimize(make(entries.items()))
    data = serialize(m)
    assert deserialize(data) == m
    assert serialize(deserialize(data)) == data


def _valid():
    return serialize(minimize(make((w, 1) for w in WORDS)))


def test_bad_magic():
    data = bytearray(_valid())
    data[0:4] = b"XXXX"
    with pytest.raises(BadMagic):
        deserialize(bytes(data))


def test_version_mismatch():
    data = bytearray(_valid())
    data[4:6] = struct.pack("<H", 99)
    with pytest.raises(VersionMismatch):
        deserialize(bytes(data))


def test_truncated():
    with pytest.raises(TruncatedInput):
        deserialize(_valid()[:5])
    with pytest.raises(FormatError):
        deserialize(_valid()[:-7])


def test_checksum():
    data = bytearray(_valid())
    data[20] ^= 0xFF
    with pytest.raises(ChecksumMismatch):
        deserialize(bytes(data))


@given(st.integers(min_value=6, max_value=200), st.integers(0, 255))
def test_any_single_byte_corruption_is_detected(pos, value):
    data = bytearray(_valid())
    pos %= len(data)
    if data[pos] == value:
        return
    data[pos] = value
    with pytest.raises(FormatError):
        deserialize(bytes(data))
