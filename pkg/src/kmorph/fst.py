"""Deterministic acyclic letter automata with payload indices at final states.

Automata are always kept in canonical numbering (breadth-first from the
initial state, letters in code point order), so structurally equal
automata compare equal and serialize to identical bytes.
"""

from __future__ import annotations

import struct
import zlib
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

MAGIC = b"KFST"
VERSION = 1


class FormatError(ValueError):
    pass


class BadMagic(FormatError):
    pass


class VersionMismatch(FormatError):
    pass


class TruncatedInput(FormatError):
    pass


class ChecksumMismatch(FormatError):
    pass


class CyclicInput(ValueError):
    pass


@dataclass
class Automaton:
    transitions: list[dict[str, int]] = field(default_factory=lambda: [{}])
    finals: dict[int, tuple[int, ...]] = field(default_factory=dict)
    payloads: list[str] = field(default_factory=list)
    initial: int = 0

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    @property
    def n_transitions(self) -> int:
        return sum(len(t) for t in self.transitions)

    def walk(self, key: str, state: int | None = None) -> int | None:
        """State reached from ``state`` (default: initial) by reading ``key``, or None."""
        s = self.initial if state is None else state
        trans = self.transitions
        for ch in key:
            s = trans[s].get(ch)
            if s is None:
                return None
        return s

    def get(self, key: str) -> tuple[int, ...]:
        s = self.walk(key)
        if s is None:
            return ()
        return self.finals.get(s, ())

    def __contains__(self, key: str) -> bool:
        return bool(self.get(key))

    def items(self) -> Iterator[tuple[str, tuple[int, ...]]]:
        """Every accepted key with its payload indices, in lexicographic order."""
        stack = [(self.initial, "")]
        while stack:
            s, prefix = stack.pop()
            if s in self.finals:
                yield prefix, self.finals[s]
            for ch in sorted(self.transitions[s], reverse=True):
                stack.append((self.transitions[s][ch], prefix + ch))


@dataclass(frozen=True)
class Stats:
    states: int
    transitions: int
    serialized_bytes: int


def _canonical(transitions: list[dict[str, int]], finals: dict[int, tuple[int, ...]],
               initial: int, payloads: list[str]) -> Automaton:
    order = {initial: 0}
    queue = deque([initial])
    new_trans: list[dict[str, int]] = []
    while queue:
        s = queue.popleft()
        row = {}
        for ch in sorted(transitions[s]):
            t = transitions[s][ch]
            if t not in order:
                order[t] = len(order)
                queue.append(t)
            row[ch] = order[t]
        new_trans.append(row)
    new_finals = {order[s]: p for s, p in finals.items() if s in order}
    return Automaton(new_trans, dict(sorted(new_finals.items())), list(payloads), 0)


def build_trie(entries: Iterable[tuple[str, int]], payloads: Iterable[str] = ()) -> Automaton:
    """Prefix tree over ``(key, payload index)`` pairs; repeated keys merge their payloads."""
    trans: list[dict[str, int]] = [{}]
    finals: dict[int, set[int]] = {}
    for key, payload in entries:
        s = 0
        for ch in key:
            nxt = trans[s].get(ch)
            if nxt is None:
                nxt = len(trans)
                trans[s][ch] = nxt
                trans.append({})
            s = nxt
        finals.setdefault(s, set()).add(payload)
    frozen = {s: tuple(sorted(p)) for s, p in finals.items()}
    return _canonical(trans, frozen, 0, list(payloads))


def _heights(a: Automaton) -> list[int]:
    """Longest distance to a leaf for every state; raises on a cycle."""
    n = a.n_states
    height = [-1] * n
    on_stack = [False] * n
    for root in range(n):
        if height[root] >= 0:
            continue
        stack = [(root, iter(a.transitions[root].values()))]
        on_stack[root] = True
        while stack:
            s, it = stack[-1]
            t = next(it, None)
            if t is None:
                stack.pop()
                on_stack[s] = False
                height[s] = max((height[c] + 1 for c in a.transitions[s].values()), default=0)
                continue
            if on_stack[t]:
                raise CyclicInput(f"cycle through state {t}")
            if height[t] < 0:
                on_stack[t] = True
                stack.append((t, iter(a.transitions[t].values())))
    return height


def minimize(a: Automaton) -> Automaton:
    """Revuz's acyclic minimization: merge states level by level on (payloads, transitions)."""
    height = _heights(a)
    levels: dict[int, list[int]] = {}
    for s, h in enumerate(height):
        levels.setdefault(h, []).append(s)
    rep = [0] * a.n_states
    new_trans: list[dict[str, int]] = []
    new_finals: dict[int, tuple[int, ...]] = {}
    for h in sorted(levels):
        register: dict[tuple, int] = {}
        for s in levels[h]:
            row = a.transitions[s]
            sig = (a.finals.get(s), tuple(sorted((ch, rep[t]) for ch, t in row.items())))
            r = register.get(sig)
            if r is None:
                r = len(new_trans)
                register[sig] = r
                new_trans.append({ch: rep[t] for ch, t in row.items()})
                if s in a.finals:
                    new_finals[r] = a.finals[s]
            rep[s] = r
    return _canonical(new_trans, new_finals, rep[a.initial], a.payloads)


# -- serialization ----------------------------------------------------------


def _varint(n: int, out: bytearray) -> None:
    while n >= 0x80:
        out.append((n & 0x7F) | 0x80)
        n >>= 7
    out.append(n)


def _zigzag(n: int) -> int:
    return (n << 1) if n >= 0 else ((-n << 1) - 1)


def _unzigzag(n: int) -> int:
    return (n >> 1) if not n & 1 else -((n + 1) >> 1)


class _Reader:
    def __init__(self, data: bytes, pos: int = 0, end: int | None = None):
        self.data = data
        self.pos = pos
        self.end = len(data) if end is None else end

    def take(self, n: int) -> bytes:
        if self.pos + n > self.end:
            raise TruncatedInput(f"need {n} bytes at offset {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def varint(self) -> int:
        shift = result = 0
        data, pos, end = self.data, self.pos, self.end
        while True:
            if pos >= end:
                raise TruncatedInput(f"varint runs past offset {end}")
            b = data[pos]
            pos += 1
            result |= (b & 0x7F) << shift
            if b < 0x80:
                break
            shift += 7
        self.pos = pos
        return result


def serialize(a: Automaton) -> bytes:
    """Binary image: header, alphabet, states, finals, payloads, CRC-32 trailer."""
    alphabet = sorted({ch for row in a.transitions for ch in row})
    letter_id = {ch: i for i, ch in enumerate(alphabet)}
    out = bytearray(MAGIC)
    out += struct.pack("<HI", VERSION, len(alphabet))
    for ch in alphabet:
        out += struct.pack("<I", ord(ch))
    out += struct.pack("<II", a.n_states, a.initial)
    for s, row in enumerate(a.transitions):
        _varint(len(row), out)
        for ch in sorted(row, key=letter_id.__getitem__):
            _varint(letter_id[ch], out)
            _varint(_zigzag(row[ch] - s), out)
    out += struct.pack("<I", len(a.finals))
    for s in sorted(a.finals):
        _varint(s, out)
        _varint(len(a.finals[s]), out)
        for p in a.finals[s]:
            _varint(p, out)
    out += struct.pack("<I", len(a.payloads))
    for record in a.payloads:
        raw = record.encode("utf-8")
        _varint(len(raw), out)
        out += raw
    out += struct.pack("<I", zlib.crc32(out))
    return bytes(out)


def deserialize(data: bytes) -> Automaton:
    if len(data) < len(MAGIC) + 2 + 4:
        raise TruncatedInput(f"{len(data)} bytes is shorter than the header")
    if data[:4] != MAGIC:
        raise BadMagic(repr(data[:4]))
    version = struct.unpack_from("<H", data, 4)[0]
    if version != VERSION:
        raise VersionMismatch(f"format version {version}, expected {VERSION}")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise ChecksumMismatch("CRC-32 does not match")
    try:
        r = _Reader(body, 6)
        alphabet = [chr(r.u32()) for _ in range(r.u32())]
        n_states, initial = r.u32(), r.u32()
        transitions = []
        for s in range(n_states):
            row = {}
            for _ in range(r.varint()):
                letter = alphabet[r.varint()]
                row[letter] = s + _unzigzag(r.varint())
            transitions.append(row)
        finals = {}
        for _ in range(r.u32()):
            s = r.varint()
            finals[s] = tuple(r.varint() for _ in range(r.varint()))
        payloads = []
        for _ in range(r.u32()):
            payloads.append(r.take(r.varint()).decode("utf-8"))
        if r.pos != len(body):
            raise FormatError(f"{len(body) - r.pos} trailing bytes")
    except (IndexError, UnicodeDecodeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"corrupt automaton image: {exc}") from None
    return Automaton(transitions, finals, payloads, initial)


def stats(a: Automaton) -> Stats:
    return Stats(a.n_states, a.n_transitions, len(serialize(a)))
