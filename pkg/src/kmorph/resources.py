"""Readable resource files: feature and CS registries, stem lexicons, graphs.

All files are UTF-8, tab-separated, with ``#`` comments and blank lines
ignored.  A resource directory looks like::

    tags.feats          feature<TAB>v1,v2,...
    classes.cs          cs_id<TAB>root_graph[<TAB>allomorph_graph|-[<TAB>derivation_graph]]
    *.stems             base_form<TAB>tag<TAB>cs_id[<TAB>hanja]
    rtn/*.grf           suffix and derivation graphs (one namespace)
    allomorph/*.grf     allomorph rule graphs

A ``.grf`` file holds one graph named after the file stem::

    states 4 initial 0 final 3
    0<TAB>1<TAB>m:셨/으시.Morph+hon=y
    1<TAB>2<TAB>m:0/었.Morph+past=y
    2<TAB>3<TAB>c:Final

Arc labels: ``m:surface/base.tag`` (``0`` writes the empty string),
``c:graph``, ``e:-j`` / ``e:+j`` (remove / append a jamo), and
``o:cs[+feat=val...]`` or ``o:cs>TAG`` (output assignment).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Union

from .hangul import (
    compose_letters,
    is_ideograph,
    letter_class,
    normalize_letters,
)
from .fileio import atomic_write
from .tagset import FeatureRegistry, StructuredTag, TagError, format_tag, parse_tag


class Morpheme(NamedTuple):
    surface: str  # conjoining jamo
    base: str  # conjoining jamo
    tag: StructuredTag


@dataclass(frozen=True)
class CallArc:
    graph: str


@dataclass(frozen=True)
class EditArc:
    op: str  # "+" append, "-" remove last
    letter: str


@dataclass(frozen=True)
class OutputArc:
    cs: str
    features: tuple[tuple[str, str], ...] = ()
    tag: StructuredTag | None = None  # full replacement, derivation graphs only


Label = Union[Morpheme, CallArc, EditArc, OutputArc]


@dataclass(frozen=True)
class Arc:
    src: int
    dst: int
    label: Label
    line: int = field(default=0, compare=False)


@dataclass
class Graph:
    name: str
    n_states: int
    initial: int
    finals: frozenset[int]
    arcs: list[Arc]
    source: str = field(default="<string>", compare=False)

    def __post_init__(self):
        self._out: list[list[Arc]] = [[] for _ in range(self.n_states)]
        for arc in self.arcs:
            self._out[arc.src].append(arc)

    def outgoing(self, state: int) -> list[Arc]:
        return self._out[state]


@dataclass
class SuffixRtn:
    graphs: dict[str, Graph] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Graph:
        return self.graphs[name]

    def __contains__(self, name: str) -> bool:
        return name in self.graphs


@dataclass(frozen=True)
class CsEntry:
    cs: str
    root: str
    allomorph: str | None = None
    derivation: str | None = None
    line: int = field(default=0, compare=False)
    source: str = field(default="<string>", compare=False)


class CsRegistry(dict):
    """Maps CS identifiers to their :class:`CsEntry`, in file order."""

    def root(self, cs: str) -> str:
        return self[cs].root


@dataclass(frozen=True)
class StemEntry:
    base_form: str
    tag: StructuredTag
    cs: str
    hanja: str | None = None
    line: int = field(default=0, compare=False)
    source: str = field(default="<string>", compare=False)


@dataclass
class Resources:
    features: FeatureRegistry
    cs: CsRegistry
    stems: list[StemEntry]
    rtn: SuffixRtn
    allomorphs: dict[str, Graph]

    def digest(self) -> str:
        """SHA-256 of the canonical text of every resource; independent of file layout."""
        h = hashlib.sha256()
        h.update(format_features(self.features).encode())
        h.update(format_cs_registry(self.cs).encode())
        h.update(format_stem_lexicon(self.stems).encode())
        for kind, graphs in (("rtn", self.rtn.graphs), ("allo", self.allomorphs)):
            for name in sorted(graphs):
                h.update(f"\0{kind}:{name}\0".encode())
                h.update(format_graph(graphs[name]).encode())
        return h.hexdigest()


class ResourceError(ValueError):
    def __init__(self, message: str, source: str = "<string>", line: int = 0):
        self.message = message
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


class ResourceSyntaxError(ResourceError):
    pass


class UnknownCS(ResourceError):
    pass


class InvalidTag(ResourceError):
    pass


class DuplicateGraphName(ResourceError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    source: str = ""
    line: int = 0

    def __str__(self) -> str:
        where = self.source + (f":{self.line}" if self.line else "")
        return f"{where}: {self.severity}: {self.code}: {self.message}" if where else \
            f"{self.severity}: {self.code}: {self.message}"


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield number, line


def _read(path: Path) -> str:
    try:
        return path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ResourceSyntaxError(f"not valid UTF-8 ({exc.reason})", str(path)) from None


def _parse_tag(text: str, features: FeatureRegistry, source: str, line: int) -> StructuredTag:
    try:
        return parse_tag(text, features)
    except TagError as exc:
        raise InvalidTag(f"bad tag {text!r}: {type(exc).__name__} {exc}", source, line) from None


# -- registries -------------------------------------------------------------


def parse_features(text: str, source: str = "<string>") -> FeatureRegistry:
    registry = FeatureRegistry()
    for number, line in _lines(text):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ResourceSyntaxError("expected feature<TAB>values", source, number)
        try:
            registry.add(cols[0].strip(), [v.strip() for v in cols[1].split(",")])
        except ValueError as exc:
            raise ResourceSyntaxError(str(exc), source, number) from None
    return registry


def format_features(registry: FeatureRegistry) -> str:
    return "".join(f"{name}\t{','.join(values)}\n" for name, values in registry.features.items())


def parse_cs_registry(text: str, source: str = "<string>") -> CsRegistry:
    registry = CsRegistry()
    for number, line in _lines(text):
        cols = [c.strip() for c in line.split("\t")]
        if not 2 <= len(cols) <= 4 or not all(cols[:2]):
            raise ResourceSyntaxError("expected cs_id<TAB>root_graph[<TAB>allomorph[<TAB>derivation]]",
                                      source, number)
        cs, root = cols[0], cols[1]
        extra = [None if c in ("", "-") else c for c in cols[2:]] + [None, None]
        if cs in registry:
            raise ResourceSyntaxError(f"duplicate CS {cs!r}", source, number)
        registry[cs] = CsEntry(cs, root, extra[0], extra[1], number, source)
    return registry


def format_cs_registry(registry: CsRegistry) -> str:
    out = []
    for entry in registry.values():
        cols = [entry.cs, entry.root]
        if entry.allomorph or entry.derivation:
            cols.append(entry.allomorph or "-")
        if entry.derivation:
            cols.append(entry.derivation)
        out.append("\t".join(cols) + "\n")
    return "".join(out)


# -- stems ------------------------------------------------------------------


def parse_stem_lexicon(text: str, cs_registry: CsRegistry, features: FeatureRegistry,
                       source: str = "<string>") -> list[StemEntry]:
    entries = []
    for number, line in _lines(text):
        cols = line.split("\t")
        if len(cols) not in (3, 4):
            raise ResourceSyntaxError("expected base_form<TAB>tag<TAB>cs_id[<TAB>hanja]", source, number)
        base, tag_text, cs = (c.strip() for c in cols[:3])
        hanja = cols[3].strip() if len(cols) == 4 else ""
        if not base:
            raise ResourceSyntaxError("empty base form", source, number)
        if any(letter_class(ch) is None and not _is_syllable(ch) for ch in base):
            raise ResourceSyntaxError(f"base form {base!r} is not hangul", source, number)
        if hanja and not all(is_ideograph(ch) for ch in hanja):
            raise ResourceSyntaxError(f"hanja field {hanja!r} holds non-ideographs", source, number)
        tag = _parse_tag(tag_text, features, source, number)
        if cs not in cs_registry:
            raise UnknownCS(f"unknown CS {cs!r}", source, number)
        entries.append(StemEntry(base, tag, cs, hanja or None, number, source))
    return entries


def _is_syllable(ch: str) -> bool:
    return 0xAC00 <= ord(ch) <= 0xD7A3


def format_stem_lexicon(entries: Iterable[StemEntry]) -> str:
    out = []
    for e in entries:
        cols = [e.base_form, format_tag(e.tag), e.cs]
        if e.hanja:
            cols.append(e.hanja)
        out.append("\t".join(cols) + "\n")
    return "".join(out)


# -- graphs -----------------------------------------------------------------


def _field(text: str) -> str:
    return "" if text == "0" else normalize_letters(text)


def _parse_label(arc: str, features: FeatureRegistry, source: str, number: int) -> Label:
    kind, sep, body = arc.partition(":")
    if not sep or not body:
        raise ResourceSyntaxError(f"malformed arc {arc!r}", source, number)
    if kind == "m":
        surface, sep, rest = body.partition("/")
        base, sep2, tag_text = rest.partition(".")
        if not sep or not sep2 or not surface or not base:
            raise ResourceSyntaxError(f"expected m:surface/base.tag, got {arc!r}", source, number)
        surface, base = _field(surface), _field(base)
        if not surface and not base:
            raise ResourceSyntaxError("morpheme arc with empty surface and base", source, number)
        for letters in (surface, base):
            if any(letter_class(ch) is None for ch in letters):
                raise ResourceSyntaxError(f"non-hangul letters in {arc!r}", source, number)
        return Morpheme(surface, base, _parse_tag(tag_text, features, source, number))
    if kind == "c":
        return CallArc(body)
    if kind == "e":
        op, letter = body[:1], body[1:]
        if op not in ("+", "-") or len(letter) != 1 or letter_class(letter) is None:
            raise ResourceSyntaxError(f"expected e:-j or e:+j with one jamo, got {arc!r}", source, number)
        return EditArc(op, letter)
    if kind == "o":
        if ">" in body:
            cs, _, tag_text = body.partition(">")
            if not cs:
                raise ResourceSyntaxError(f"missing CS in {arc!r}", source, number)
            return OutputArc(cs, (), _parse_tag(tag_text, features, source, number))
        cs, *parts = body.split("+")
        if not cs:
            raise ResourceSyntaxError(f"missing CS in {arc!r}", source, number)
        feats = []
        for part in parts:
            name, eq, value = part.partition("=")
            if not eq or not name or not value:
                raise ResourceSyntaxError(f"malformed feature {part!r}", source, number)
            if name not in features or value not in features.features[name]:
                raise InvalidTag(f"unknown feature value {part!r}", source, number)
            feats.append((name, value))
        return OutputArc(cs, tuple(feats))
    raise ResourceSyntaxError(f"unknown arc kind {kind!r}", source, number)


def parse_graph(text: str, name: str, features: FeatureRegistry, source: str = "<string>") -> Graph:
    lines = _lines(text)
    try:
        number, header = next(lines)
    except StopIteration:
        raise ResourceSyntaxError("missing header line", source, 1) from None
    words = header.split()
    if len(words) != 6 or (words[0], words[2], words[4]) != ("states", "initial", "final"):
        raise ResourceSyntaxError("expected 'states N initial I final f1,f2,...'", source, number)
    try:
        n_states = int(words[1])
        initial = int(words[3])
        finals = frozenset(int(f) for f in words[5].split(","))
    except ValueError:
        raise ResourceSyntaxError("non-integer state id in header", source, number) from None
    if n_states < 1 or not 0 <= initial < n_states or any(not 0 <= f < n_states for f in finals):
        raise ResourceSyntaxError("header state ids out of range", source, number)
    arcs = []
    for number, line in lines:
        cols = line.split("\t")
        if len(cols) != 3:
            raise ResourceSyntaxError("expected src<TAB>dst<TAB>arc", source, number)
        try:
            src, dst = int(cols[0]), int(cols[1])
        except ValueError:
            raise ResourceSyntaxError("non-integer state id", source, number) from None
        if not (0 <= src < n_states and 0 <= dst < n_states):
            raise ResourceSyntaxError(f"undeclared state in {src}->{dst}", source, number)
        arcs.append(Arc(src, dst, _parse_label(cols[2].strip(), features, source, number), number))
    return Graph(name, n_states, initial, finals, arcs, source)


def _letters_out(letters: str) -> str:
    return compose_letters(letters, lone="conjoining") if letters else "0"


def format_label(label: Label) -> str:
    if isinstance(label, Morpheme):
        return f"m:{_letters_out(label.surface)}/{_letters_out(label.base)}.{format_tag(label.tag)}"
    if isinstance(label, CallArc):
        return f"c:{label.graph}"
    if isinstance(label, EditArc):
        return f"e:{label.op}{label.letter}"
    if label.tag is not None:
        return f"o:{label.cs}>{format_tag(label.tag)}"
    return "o:" + "+".join([label.cs] + [f"{k}={v}" for k, v in label.features])


def format_graph(graph: Graph) -> str:
    finals = ",".join(str(f) for f in sorted(graph.finals))
    out = [f"states {graph.n_states} initial {graph.initial} final {finals}\n"]
    for arc in graph.arcs:
        out.append(f"{arc.src}\t{arc.dst}\t{format_label(arc.label)}\n")
    return "".join(out)


def parse_rtn(paths: Iterable[Path], features: FeatureRegistry) -> SuffixRtn:
    """Load one graph per ``.grf`` file; calls are resolved later by :func:`validate`."""
    rtn = SuffixRtn()
    for path in sorted(Path(p) for p in paths):
        name = path.stem
        if name in rtn.graphs:
            raise DuplicateGraphName(f"graph {name!r} already defined in {rtn.graphs[name].source}",
                                     str(path))
        rtn.graphs[name] = parse_graph(_read(path), name, features, str(path))
    return rtn


# -- directories ------------------------------------------------------------


def load_resources(root: str | Path) -> Resources:
    root = Path(root)
    if not root.is_dir():
        raise ResourceError("resource directory not found", str(root))
    features = FeatureRegistry()
    for path in sorted(root.glob("*.feats")):
        for name, values in parse_features(_read(path), str(path)).features.items():
            try:
                features.add(name, values)
            except ValueError as exc:
                raise ResourceSyntaxError(str(exc), str(path)) from None
    cs = CsRegistry()
    for path in sorted(root.glob("*.cs")):
        for key, entry in parse_cs_registry(_read(path), str(path)).items():
            if key in cs:
                raise ResourceSyntaxError(f"duplicate CS {key!r}", str(path), entry.line)
            cs[key] = entry
    stems = []
    for path in sorted(root.glob("*.stems")):
        stems.extend(parse_stem_lexicon(_read(path), cs, features, str(path)))
    rtn = parse_rtn((root / "rtn").glob("*.grf"), features)
    allomorphs = parse_rtn((root / "allomorph").glob("*.grf"), features).graphs
    return Resources(features, cs, stems, rtn, allomorphs)


def write_resources(resources: Resources, root: str | Path, name: str = "lexicon") -> None:
    """Canonical writer; ``load_resources`` of the result equals ``resources``."""
    root = Path(root)
    (root / "rtn").mkdir(parents=True, exist_ok=True)
    (root / "allomorph").mkdir(parents=True, exist_ok=True)
    files = {
        root / f"{name}.feats": format_features(resources.features),
        root / f"{name}.cs": format_cs_registry(resources.cs),
        root / f"{name}.stems": format_stem_lexicon(resources.stems),
    }
    for sub, graphs in (("rtn", resources.rtn.graphs), ("allomorph", resources.allomorphs)):
        for gname, graph in graphs.items():
            files[root / sub / f"{gname}.grf"] = format_graph(graph)
    for path, text in files.items():
        atomic_write(path, text.encode("utf-8"))


# -- validation -------------------------------------------------------------


def _reachable_graphs(rtn: SuffixRtn, roots: Iterable[str]) -> set[str]:
    seen: set[str] = set()
    todo = [r for r in roots if r in rtn]
    while todo:
        name = todo.pop()
        if name in seen:
            continue
        seen.add(name)
        for arc in rtn[name].arcs:
            if isinstance(arc.label, CallArc) and arc.label.graph in rtn:
                todo.append(arc.label.graph)
    return seen


def _is_acyclic(graph: Graph) -> bool:
    indegree = [0] * graph.n_states
    for arc in graph.arcs:
        indegree[arc.dst] += 1
    todo = [s for s in range(graph.n_states) if indegree[s] == 0]
    done = 0
    while todo:
        s = todo.pop()
        done += 1
        for arc in graph.outgoing(s):
            indegree[arc.dst] -= 1
            if indegree[arc.dst] == 0:
                todo.append(arc.dst)
    return done == graph.n_states


def _output_counts(graph: Graph) -> set[int]:
    """Number of output arcs on each accepting path of an acyclic graph."""
    counts: set[int] = set()

    def walk(state: int, n: int) -> None:
        if state in graph.finals:
            counts.add(n)
        for arc in graph.outgoing(state):
            walk(arc.dst, n + isinstance(arc.label, OutputArc))

    walk(graph.initial, 0)
    return counts


def validate(res: Resources) -> list[Diagnostic]:
    """Cross-reference and well-formedness checks; an empty list means all invariants hold."""
    diags: list[Diagnostic] = []

    def add(severity, code, message, source="", line=0):
        diags.append(Diagnostic(severity, code, message, source, line))

    suffix_roots, deriv_roots = set(), set()
    for entry in res.cs.values():
        if entry.root not in res.rtn:
            add("error", "DanglingRootGraph", f"CS {entry.cs} names missing root graph {entry.root!r}",
                entry.source, entry.line)
        else:
            suffix_roots.add(entry.root)
        if entry.allomorph and entry.allomorph not in res.allomorphs:
            add("error", "DanglingAllomorphGraph",
                f"CS {entry.cs} names missing allomorph graph {entry.allomorph!r}", entry.source, entry.line)
        if entry.derivation:
            if entry.derivation not in res.rtn:
                add("error", "DanglingDerivationGraph",
                    f"CS {entry.cs} names missing derivation graph {entry.derivation!r}",
                    entry.source, entry.line)
            else:
                deriv_roots.add(entry.derivation)

    for stem in res.stems:
        if stem.cs not in res.cs:
            add("error", "UnknownCS", f"stem {stem.base_form} has unknown CS {stem.cs!r}",
                stem.source, stem.line)

    for graph in res.rtn.graphs.values():
        for arc in graph.arcs:
            label = arc.label
            if isinstance(label, CallArc) and label.graph not in res.rtn:
                add("error", "DanglingCall", f"{graph.name} calls missing graph {label.graph!r}",
                    graph.source, arc.line)
            elif isinstance(label, EditArc):
                add("error", "MisplacedEdit", f"edit arc in RTN graph {graph.name}", graph.source, arc.line)
            elif isinstance(label, OutputArc) and label.cs not in res.cs:
                add("error", "UnknownCS", f"output arc names unknown CS {label.cs!r}", graph.source, arc.line)

    suffix_graphs = _reachable_graphs(res.rtn, suffix_roots)
    deriv_graphs = _reachable_graphs(res.rtn, deriv_roots)
    for name in sorted(suffix_graphs):
        graph = res.rtn[name]
        for arc in graph.arcs:
            if isinstance(arc.label, OutputArc):
                add("error", "MisplacedOutput", f"output arc in suffix graph {name}", graph.source, arc.line)
    for name in sorted(set(res.rtn.graphs) - suffix_graphs - deriv_graphs):
        add("warning", "UnreachableGraph", f"graph {name} is not reachable from any CS root",
            res.rtn[name].source)

    used_allomorphs = {e.allomorph for e in res.cs.values() if e.allomorph}
    for name, graph in sorted(res.allomorphs.items()):
        if name not in used_allomorphs:
            add("warning", "UnreachableGraph", f"allomorph graph {name} is not used by any CS", graph.source)
        bad = [a for a in graph.arcs if not isinstance(a.label, (EditArc, OutputArc))]
        for arc in bad:
            add("error", "MisplacedArc", f"allomorph graph {name} may only hold e: and o: arcs",
                graph.source, arc.line)
        if not _is_acyclic(graph):
            add("error", "CyclicAllomorphGraph", f"allomorph graph {name} has a cycle", graph.source)
            continue
        for arc in graph.arcs:
            if isinstance(arc.label, OutputArc):
                if arc.label.cs not in res.cs:
                    add("error", "UnknownCS", f"output arc names unknown CS {arc.label.cs!r}",
                        graph.source, arc.line)
                if arc.label.tag is not None:
                    add("error", "TagReplacement", "allomorph graphs may adjust features only",
                        graph.source, arc.line)
        if _output_counts(graph) - {1}:
            add("error", "OutputCount", f"every accepting path of {name} must carry exactly one o: arc",
                graph.source)
    return diags


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diags)
