"""Flatten suffix RTNs into finite lists of ending sequences.

Call arcs are inlined during a depth-first walk.  Cycles are broken at back
edges: inside a graph, an arc is a back edge when a depth-first search from
the graph's initial state (call arcs counted as plain src->dst edges) meets
its target on the stack; across graphs, a call is a back edge when the
callee is already active on the call stack.  Each back edge may be taken at
most ``max_unroll`` times on one path.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterable

from .hangul import compose_letters
from .resources import CallArc, CsRegistry, EditArc, Graph, Morpheme, OutputArc, SuffixRtn
from .tagset import format_tag

DEFAULT_CAP = 10**7


class EnumerationError(Exception):
    pass


class RootNotFound(EnumerationError):
    pass


class PathExplosion(EnumerationError):
    pass


@dataclass(frozen=True)
class CyclePolicy:
    max_unroll: int = 0

    def __post_init__(self):
        if self.max_unroll < 0:
            raise ValueError("max_unroll must be non-negative")


@dataclass(frozen=True)
class EndingSequence:
    surface: str
    morphemes: tuple[Morpheme, ...]
    output: OutputArc | None = None  # set on derivation paths only

    def sort_key(self):
        return (self.surface, tuple((m.surface, m.base, format_tag(m.tag)) for m in self.morphemes),
                _output_key(self.output))


def _output_key(output: OutputArc | None):
    if output is None:
        return ()
    return (output.cs, output.features, format_tag(output.tag) if output.tag else "")


def back_edges(graph: Graph) -> frozenset[int]:
    """Indices (into ``graph.arcs``) of the arcs closing a cycle in DFS preorder."""
    index = {id(arc): i for i, arc in enumerate(graph.arcs)}
    color = [0] * graph.n_states  # 0 white, 1 on stack, 2 done
    found = set()
    color[graph.initial] = 1
    stack = [(graph.initial, iter(graph.outgoing(graph.initial)))]
    while stack:
        state, arcs = stack[-1]
        arc = next(arcs, None)
        if arc is None:
            color[state] = 2
            stack.pop()
            continue
        if color[arc.dst] == 1:
            found.add(index[id(arc)])
        elif color[arc.dst] == 0:
            color[arc.dst] = 1
            stack.append((arc.dst, iter(graph.outgoing(arc.dst))))
    return frozenset(found)


class _Enumerator:
    def __init__(self, rtn: SuffixRtn, policy: CyclePolicy, cap: int):
        self.rtn = rtn
        self.limit = policy.max_unroll
        self.cap = cap
        self.counts: dict[tuple, int] = {}
        self.results: set = set()
        self.emitted = 0
        # per graph: list per state of (arc, arc key, is intra-graph back edge)
        self.plan: dict[str, list[list[tuple]]] = {}

    def _plan(self, name: str):
        plan = self.plan.get(name)
        if plan is None:
            graph = self.rtn[name]
            back = back_edges(graph)
            plan = [[] for _ in range(graph.n_states)]
            for i, arc in enumerate(graph.arcs):
                plan[arc.src].append((arc, (name, i), i in back))
            self.plan[name] = plan
        return plan

    def _take(self, key) -> bool:
        n = self.counts.get(key, 0)
        if n >= self.limit:
            return False
        self.counts[key] = n + 1
        return True

    def _release(self, key) -> None:
        self.counts[key] -= 1

    def run(self, frames: tuple, name: str, state: int, morphs: tuple, output) -> None:
        graph = self.rtn[name]
        if state in graph.finals:
            if frames:
                (caller, ret), rest = frames[-1], frames[:-1]
                self.run(rest, caller, ret, morphs, output)
            else:
                self.emitted += 1
                if self.emitted > self.cap:
                    raise PathExplosion(f"more than {self.cap} paths")
                self.results.add((morphs, output))
        for arc, key, is_back in self._plan(name)[state]:
            label = arc.label
            if isinstance(label, CallArc):
                active = label.graph == name or any(f[0] == label.graph for f in frames)
                is_back = is_back or active
            if is_back and not self._take(key):
                continue
            if isinstance(label, Morpheme):
                self.run(frames, name, arc.dst, morphs + (label,), output)
            elif isinstance(label, CallArc):
                callee = self.rtn[label.graph]
                self.run(frames + ((name, arc.dst),), label.graph, callee.initial, morphs, output)
            elif isinstance(label, OutputArc):
                self.run(frames, name, arc.dst, morphs, label)
            elif isinstance(label, EditArc):
                raise EnumerationError(f"edit arc in RTN graph {name}")
            if is_back:
                self._release(key)


def enumerate_paths(rtn: SuffixRtn, root: str, policy: CyclePolicy = CyclePolicy(),
                    cap: int = DEFAULT_CAP) -> list[EndingSequence]:
    """All accepting paths of ``root`` with calls inlined and cycles broken.

    Duplicates (same surface and same decomposition) are dropped; the list is
    sorted by surface, then decomposition.
    """
    if root not in rtn:
        raise RootNotFound(root)
    walker = _Enumerator(rtn, policy, cap)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        walker.run((), root, rtn[root].initial, (), None)
    finally:
        sys.setrecursionlimit(limit)
    endings = [
        EndingSequence("".join(m.surface for m in morphs), morphs, output)
        for morphs, output in walker.results
    ]
    endings.sort(key=EndingSequence.sort_key)
    return endings


def enumerate_all(rtn: SuffixRtn, cs_registry: CsRegistry, policy: CyclePolicy = CyclePolicy(),
                  cap: int = DEFAULT_CAP) -> dict[str, list[EndingSequence]]:
    """One ending list per CS; CSs sharing a root graph share the enumeration work."""
    by_root: dict[str, list[EndingSequence]] = {}
    result = {}
    for cs, entry in cs_registry.items():
        if entry.root not in by_root:
            try:
                by_root[entry.root] = enumerate_paths(rtn, entry.root, policy, cap)
            except EnumerationError as exc:
                raise type(exc)(f"CS {cs}: {exc}") from exc
        result[cs] = list(by_root[entry.root])
    return result


def format_endings(endings: Iterable[EndingSequence]) -> str:
    """Debug dump: ``surface<TAB>base1.tag1+base2.tag2+...`` per ending."""
    lines = []
    for e in endings:
        analysis = "+".join(f"{compose_letters(m.base)}.{format_tag(m.tag)}" for m in e.morphemes)
        lines.append(f"{compose_letters(e.surface)}\t{analysis}\n")
    return "".join(lines)
