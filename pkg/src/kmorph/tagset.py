"""Structured tags: a general part-of-speech tag plus up to four features."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

GENERAL_TAGS = (
    "A", "ADV", "DET", "N", "NI", "PRO", "V", "INT",
    "Sfx", "Morph", "Post", "Sc", "Sd", "Sncomp", "St", "Suf",
)
GENERAL_TAG_NAMES = {
    "A": "adjective",
    "ADV": "adverb",
    "DET": "determiner",
    "N": "noun",
    "NI": "bound noun",
    "PRO": "pronoun",
    "V": "verb",
    "INT": "interjection",
    "Sfx": "derivational suffix",
    "Morph": "pre-final verb/adj. ending",
    "Post": "postposition",
    "Sc": "conjunctive suffix",
    "Sd": "determinative suffix",
    "Sncomp": "nominalization suffix",
    "St": "final ending",
    "Suf": "pre-final nominal ending",
}
MAX_FEATURES = 4

_GENERAL_SET = frozenset(GENERAL_TAGS)


class TagError(ValueError):
    pass


class UnknownGeneralTag(TagError):
    pass


class UnknownFeature(TagError):
    pass


class UnknownFeatureValue(TagError):
    pass


class TooManyFeatures(TagError):
    pass


class DuplicateFeature(TagError):
    pass


class FeatureRegistry:
    """Allowed feature names and their value sets, in declaration order."""

    def __init__(self, features: Mapping[str, Iterable[str]] | None = None):
        self.features: dict[str, tuple[str, ...]] = {}
        for name, values in (features or {}).items():
            self.add(name, values)

    def add(self, name: str, values: Iterable[str]) -> None:
        values = tuple(values)
        if not name:
            raise ValueError("empty feature name")
        if name in self.features:
            raise ValueError(f"duplicate feature {name!r}")
        if not values or any(not v for v in values):
            raise ValueError(f"feature {name!r} needs at least one non-empty value")
        if len(set(values)) != len(values):
            raise ValueError(f"feature {name!r} lists a value twice")
        self.features[name] = values

    def check(self, name: str, value: str) -> None:
        if name not in self.features:
            raise UnknownFeature(name)
        if value not in self.features[name]:
            raise UnknownFeatureValue(f"{name}={value}")

    def __contains__(self, name: str) -> bool:
        return name in self.features

    def __len__(self) -> int:
        return len(self.features)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FeatureRegistry) and self.features == other.features

    def __repr__(self) -> str:
        return f"FeatureRegistry({self.features!r})"


@dataclass(frozen=True, eq=False)
class StructuredTag:
    """General tag plus ordered features.

    Order is kept for formatting; equality and hashing ignore it.
    """

    general: str
    features: tuple[tuple[str, str], ...] = field(default=())
    _key: tuple = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    text: str = field(init=False, repr=False)

    def __post_init__(self):
        key = (self.general, frozenset(self.features))
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "text", "+".join([self.general] + [f"{k}={v}" for k, v in self.features]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StructuredTag):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return self.text

    def feature(self, name: str) -> str | None:
        for key, value in self.features:
            if key == name:
                return value
        return None

    def with_features(self, updates: Iterable[tuple[str, str]]) -> StructuredTag:
        """Set features, replacing an existing value in place or appending."""
        feats = list(self.features)
        for name, value in updates:
            for i, (key, _) in enumerate(feats):
                if key == name:
                    feats[i] = (name, value)
                    break
            else:
                feats.append((name, value))
        if len(feats) > MAX_FEATURES:
            raise TooManyFeatures(format_tag(StructuredTag(self.general, tuple(feats))))
        return StructuredTag(self.general, tuple(feats))


def parse_tag(text: str, registry: FeatureRegistry | None = None) -> StructuredTag:
    """Parse ``GENERAL(+name=value)*``.

    Without a registry only the general tag and the tag shape are checked;
    that is enough for tags read back from a compiled lexicon.
    """
    general, *parts = text.split("+")
    if general not in _GENERAL_SET:
        raise UnknownGeneralTag(general)
    if len(parts) > MAX_FEATURES:
        raise TooManyFeatures(text)
    features = []
    seen = set()
    for part in parts:
        name, sep, value = part.partition("=")
        if not sep or not name or not value:
            raise TagError(f"malformed feature {part!r} in {text!r}")
        if name in seen:
            raise DuplicateFeature(name)
        seen.add(name)
        if registry is not None:
            registry.check(name, value)
        features.append((name, value))
    return StructuredTag(general, tuple(features))


def format_tag(tag: StructuredTag) -> str:
    return tag.text
