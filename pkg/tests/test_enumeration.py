from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmorph.enumeration import (
    CyclePolicy,
    PathExplosion,
    RootNotFound,
    back_edges,
    enumerate_all,
    enumerate_paths,
    format_endings,
)
from kmorph.hangul import compose_letters, decompose_text
from kmorph.resources import Arc, CallArc, FeatureRegistry, Graph, Morpheme, SuffixRtn, parse_graph
from kmorph.tagset import StructuredTag

FEATS = FeatureRegistry({})
TAG = StructuredTag("Sfx")


def rtn_of(**graphs: str) -> SuffixRtn:
    return SuffixRtn({name: parse_graph(text, name, FEATS) for name, text in graphs.items()})


def surfaces(endings):
    return [compose_letters(e.surface) for e in endings]


def test_acyclic_branches():
    rtn = rtn_of(R="states 2 initial 0 final 1\n0\t1\tm:다/다.St\n0\t1\tm:고/고.Sc\n")
    assert surfaces(enumerate_paths(rtn, "R")) == ["고", "다"]


def test_empty_ending_from_final_initial_state():
    rtn = rtn_of(R="states 2 initial 0 final 0,1\n0\t1\tm:가/가.Post\n")
    endings = enumerate_paths(rtn, "R")
    assert surfaces(endings) == ["", "가"]
    assert endings[0].morphemes == ()


def test_calls_are_inlined():
    rtn = rtn_of(
        R="states 3 initial 0 final 2\n0\t1\tm:시/시.Morph\n1\t2\tc:F\n0\t2\tc:F\n",
        F="states 2 initial 0 final 1\n0\t1\tm:다/다.St\n0\t1\tm:고/고.Sc\n",
    )
    assert surfaces(enumerate_paths(rtn, "R")) == ["고", "다", "시고", "시다"]


def test_zero_surface_morpheme_contraction():
    rtn = rtn_of(R="states 3 initial 0 final 2\n0\t1\tm:셨/으시.Morph\n1\t2\tm:0/었.Morph\n")
    [e] = enumerate_paths(rtn, "R")
    assert compose_letters(e.surface) == "셨"
    assert [compose_letters(m.base) for m in e.morphemes] == ["으시", "었"]
    assert e.morphemes[1].surface == ""


def test_duplicate_paths_collapse():
    rtn = rtn_of(R="states 3 initial 0 final 2\n0\t1\tm:가/가.St\n0\t1\tm:가/가.St\n1\t2\tm:다/다.St\n")
    assert len(enumerate_paths(rtn, "R")) == 1


def test_self_loop_unrolling():
    rtn = rtn_of(R="states 2 initial 0 final 1\n0\t1\tm:아/아.Sfx\n1\t1\tm:요/요.Sfx\n")
    for k in range(4):
        got = surfaces(enumerate_paths(rtn, "R", CyclePolicy(k)))
        assert got == ["아" + "요" * i for i in range(k + 1)]


def test_recursive_call_counts_as_back_edge(toy):
    # Aux: particle, then optionally Aux again
    zero = surfaces(enumerate_paths(toy.rtn, "Aux", CyclePolicy(0)))
    assert zero == ["도", "만"]
    one = surfaces(enumerate_paths(toy.rtn, "Aux", CyclePolicy(1)))
    assert sorted(one) == sorted(["도", "만", "도도", "도만", "만도", "만만"])


def test_mutual_recursion_terminates():
    rtn = rtn_of(
        A="states 3 initial 0 final 1,2\n0\t1\tm:가/가.Sfx\n1\t2\tc:B\n",
        B="states 3 initial 0 final 1,2\n0\t1\tm:나/나.Sfx\n1\t2\tc:A\n",
    )
    assert surfaces(enumerate_paths(rtn, "A")) == ["가", "가나"]
    assert surfaces(enumerate_paths(rtn, "A", CyclePolicy(1))) == ["가", "가나", "가나가", "가나가나"]


def test_back_edges_static_dfs():
    g = parse_graph("states 3 initial 0 final 2\n0\t1\tm:가/가.Sfx\n1\t0\tm:나/나.Sfx\n1\t2\tm:다/다.Sfx\n",
                    "G", FEATS)
    assert back_edges(g) == frozenset({1})


def test_unknown_root():
    with pytest.raises(RootNotFound):
        enumerate_paths(rtn_of(R="states 1 initial 0 final 0\n"), "X")


def test_cap():
    rtn = rtn_of(R="states 2 initial 0 final 1\n0\t1\tm:아/아.Sfx\n1\t1\tm:요/요.Sfx\n")
    with pytest.raises(PathExplosion):
        enumerate_paths(rtn, "R", CyclePolicy(10), cap=5)
    assert len(enumerate_paths(rtn, "R", CyclePolicy(4), cap=5)) == 5


def test_enumerate_all_shares_roots(toy):
    endings = enumerate_all(toy.rtn, toy.cs)
    assert set(endings) == set(toy.cs)
    assert endings["CS_V1"] == endings["CS_V3"]
    assert endings["CS_DET"][0].surface == "" and len(endings["CS_DET"]) == 1


def test_format_endings(toy):
    text = format_endings(enumerate_paths(toy.rtn, "Final"))
    assert text.splitlines() == ["고\t고.Sc", "다\t다.St+decl=y", "지만\t지만.Sc"]


# -- brute-force oracle on random acyclic RTNs ---------------------------------

SYLLABLES = [decompose_text(s) for s in "가나다라마바사"]


def oracle(rtn: SuffixRtn, name: str) -> set:
    """Every accepting path's morpheme tuple, expanding calls recursively (acyclic only)."""
    graph = rtn[name]
    out = set()

    def walk(state, morphs):
        if state in graph.finals:
            out.add(morphs)
        for arc in graph.outgoing(state):
            if isinstance(arc.label, CallArc):
                for sub in oracle(rtn, arc.label.graph):
                    walk(arc.dst, morphs + sub)
            else:
                walk(arc.dst, morphs + (arc.label,))

    walk(graph.initial, ())
    return out


@st.composite
def acyclic_rtns(draw):
    n_graphs = draw(st.integers(1, 4))
    graphs = {}
    for gi in reversed(range(n_graphs)):
        n = draw(st.integers(1, 4))
        arcs = []
        for src in range(n):
            for dst in range(src + 1, n):
                for _ in range(draw(st.integers(0, 2))):
                    if gi + 1 < n_graphs and draw(st.booleans()):
                        label = CallArc(f"G{draw(st.integers(gi + 1, n_graphs - 1))}")
                    else:
                        syl = draw(st.sampled_from(SYLLABLES))
                        label = Morpheme(syl, syl, TAG)
                    arcs.append(Arc(src, dst, label))
        finals = frozenset(draw(st.sets(st.integers(0, n - 1), min_size=1)))
        graphs[f"G{gi}"] = Graph(f"G{gi}", n, 0, finals, arcs)
    return SuffixRtn(graphs)


@settings(max_examples=120, deadline=None)
@given(acyclic_rtns())
def test_matches_brute_force_on_acyclic_rtns(rtn):
    got = enumerate_paths(rtn, "G0")
    assert {e.morphemes for e in got} == oracle(rtn, "G0")
    assert len(got) == len({e.morphemes for e in got})
    assert all(e.surface == "".join(m.surface for m in e.morphemes) for e in got)
    assert [e.sort_key() for e in got] == sorted(e.sort_key() for e in got)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_unroll_is_monotone_on_toy(toy, k):
    for root in toy.rtn.graphs:
        low = {e.morphemes for e in enumerate_paths(toy.rtn, root, CyclePolicy(k))}
        high = {e.morphemes for e in enumerate_paths(toy.rtn, root, CyclePolicy(k + 1))}
        assert low <= high


@settings(max_examples=60, deadline=None)
@given(acyclic_rtns(), st.integers(1, 3))
def test_unroll_changes_nothing_without_cycles(rtn, k):
    assert enumerate_paths(rtn, "G0", CyclePolicy(k)) == enumerate_paths(rtn, "G0")
