"""Conversion between hangul syllables and conjoining jamo letters.

Lexicon keys are strings of modern conjoining jamo (U+1100 block): leading
consonants, vowels and trailing consonants each have their own codepoint, so
a letter string always knows how it syllabifies.  Characters outside hangul
pass through untouched.
"""

from __future__ import annotations

SYLLABLE_BASE = 0xAC00
SYLLABLE_LAST = 0xD7A3
LEADING_BASE = 0x1100
VOWEL_BASE = 0x1161
TRAILING_BASE = 0x11A7  # trailing index 0 means "no trailing consonant"

N_LEADING = 19
N_VOWEL = 21
N_TRAILING = 28
N_SYLLABLES = N_LEADING * N_VOWEL * N_TRAILING  # 11172

# compatibility jamo, indexed like the conjoining classes
_COMPAT_LEADING = "ㄱㄲㄴㄷㄸㄹㅁㅂㅃㅅㅆㅇㅈㅉㅊㅋㅌㅍㅎ"
_COMPAT_VOWEL = "ㅏㅐㅑㅒㅓㅔㅕㅖㅗㅘㅙㅚㅛㅜㅝㅞㅟㅠㅡㅢㅣ"
_COMPAT_TRAILING = "ㄱㄲㄳㄴㄵㄶㄷㄹㄺㄻㄼㄽㄾㄿㅀㅁㅂㅄㅅㅆㅇㅈㅊㅋㅌㅍㅎ"

LEADING = tuple(chr(LEADING_BASE + i) for i in range(N_LEADING))
VOWELS = tuple(chr(VOWEL_BASE + i) for i in range(N_VOWEL))
TRAILING = tuple(chr(TRAILING_BASE + i) for i in range(1, N_TRAILING))

_TO_COMPAT: dict[str, str] = {}
_TO_COMPAT.update(zip(LEADING, _COMPAT_LEADING))
_TO_COMPAT.update(zip(VOWELS, _COMPAT_VOWEL))
_TO_COMPAT.update(zip(TRAILING, _COMPAT_TRAILING))

_COMPAT_TO_LEADING = dict(zip(_COMPAT_LEADING, LEADING))
_COMPAT_TO_VOWEL = dict(zip(_COMPAT_VOWEL, VOWELS))
_COMPAT_TO_TRAILING = dict(zip(_COMPAT_TRAILING, TRAILING))


def is_syllable(ch: str) -> bool:
    return SYLLABLE_BASE <= ord(ch) <= SYLLABLE_LAST


def is_leading(ch: str) -> bool:
    return LEADING_BASE <= ord(ch) < LEADING_BASE + N_LEADING


def is_vowel(ch: str) -> bool:
    return VOWEL_BASE <= ord(ch) < VOWEL_BASE + N_VOWEL


def is_trailing(ch: str) -> bool:
    return TRAILING_BASE < ord(ch) < TRAILING_BASE + N_TRAILING


def is_jamo(ch: str) -> bool:
    """True for a modern conjoining jamo (any of the three positional classes)."""
    return is_leading(ch) or is_vowel(ch) or is_trailing(ch)


def is_compat_jamo(ch: str) -> bool:
    return 0x3131 <= ord(ch) <= 0x3163


def is_hangul(ch: str) -> bool:
    """Syllables, conjoining jamo (any, including archaic) and compatibility jamo."""
    o = ord(ch)
    return (
        SYLLABLE_BASE <= o <= SYLLABLE_LAST
        or 0x1100 <= o <= 0x11FF
        or 0x3130 <= o <= 0x318F
    )


def decompose_syllable(ch: str) -> str:
    """Split one precomposed syllable into its 2 or 3 conjoining jamo.

    Anything that is not a precomposed syllable is returned unchanged.
    """
    index = ord(ch) - SYLLABLE_BASE
    if not 0 <= index < N_SYLLABLES:
        return ch
    lead, rest = divmod(index, N_VOWEL * N_TRAILING)
    vowel, trail = divmod(rest, N_TRAILING)
    letters = chr(LEADING_BASE + lead) + chr(VOWEL_BASE + vowel)
    if trail:
        letters += chr(TRAILING_BASE + trail)
    return letters


_DECOMPOSE_TABLE = {
    SYLLABLE_BASE + i: decompose_syllable(chr(SYLLABLE_BASE + i))
    for i in range(N_SYLLABLES)
}


def decompose_text(text: str) -> str:
    """Decompose every syllable of ``text``; other characters are kept as is."""
    return text.translate(_DECOMPOSE_TABLE)


def _syllable(lead: str, vowel: str, trail: str | None = None) -> str:
    t = ord(trail) - TRAILING_BASE if trail else 0
    index = ((ord(lead) - LEADING_BASE) * N_VOWEL + ord(vowel) - VOWEL_BASE) * N_TRAILING + t
    return chr(SYLLABLE_BASE + index)


def compose_letters(letters: str, *, lone: str = "compat") -> str:
    """Greedy left-to-right recomposition of L V (T) groups into syllables.

    A jamo that cannot head or extend a syllable is emitted as compatibility
    jamo (``lone="compat"``, the display form) or left as the conjoining
    codepoint (``lone="conjoining"``, which decomposes back losslessly).
    """
    out = []
    i, n = 0, len(letters)
    while i < n:
        ch = letters[i]
        if is_leading(ch) and i + 1 < n and is_vowel(letters[i + 1]):
            if i + 2 < n and is_trailing(letters[i + 2]):
                out.append(_syllable(ch, letters[i + 1], letters[i + 2]))
                i += 3
            else:
                out.append(_syllable(ch, letters[i + 1]))
                i += 2
            continue
        if lone == "compat":
            out.append(_TO_COMPAT.get(ch, ch))
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def to_compat(letters: str) -> str:
    """Position-free view of a letter string: every jamo mapped to compatibility form.

    Two texts are equal up to jamo/syllable recomposition iff their
    ``to_compat(decompose_text(...))`` images are equal.
    """
    return "".join(_TO_COMPAT.get(ch, ch) for ch in letters)


def letter_class(ch: str) -> str | None:
    """'L', 'V' or 'T' for conjoining jamo; 'C' or 'W' for compatibility consonant/vowel."""
    if is_leading(ch):
        return "L"
    if is_vowel(ch):
        return "V"
    if is_trailing(ch):
        return "T"
    if ch in _COMPAT_TO_VOWEL:
        return "W"
    if ch in _COMPAT_TO_LEADING or ch in _COMPAT_TO_TRAILING:
        return "C"
    return None


def as_leading(ch: str) -> str | None:
    """Leading-position form of a consonant given in any form, or None."""
    if is_leading(ch):
        return ch
    return _COMPAT_TO_LEADING.get(_TO_COMPAT.get(ch, ch))


def as_trailing(ch: str) -> str | None:
    if is_trailing(ch):
        return ch
    return _COMPAT_TO_TRAILING.get(_TO_COMPAT.get(ch, ch))


def as_vowel(ch: str) -> str | None:
    if is_vowel(ch):
        return ch
    return _COMPAT_TO_VOWEL.get(ch)


def normalize_letters(text: str) -> str:
    """Convert resource text (syllables, conjoining or compatibility jamo) to conjoining jamo.

    Compatibility consonants take leading position when a vowel follows and
    trailing position otherwise, which is how a morpheme boundary inside a
    syllable is written (``ㄴ다`` after a vowel stem, ``ㅓㅆ`` after ``ㅋ``).
    ㄸ, ㅃ and ㅉ have no trailing form and stay leading.
    """
    letters = decompose_text(text)
    if not any(is_compat_jamo(ch) for ch in letters):
        return letters
    out = []
    for i, ch in enumerate(letters):
        cls = letter_class(ch)
        if cls == "W":
            out.append(_COMPAT_TO_VOWEL[ch])
        elif cls == "C":
            nxt = letters[i + 1] if i + 1 < len(letters) else ""
            followed_by_vowel = bool(nxt) and letter_class(nxt) in ("V", "W")
            lead = _COMPAT_TO_LEADING.get(ch)
            trail = _COMPAT_TO_TRAILING.get(ch)
            if (followed_by_vowel and lead) or not trail:
                out.append(lead)
            else:
                out.append(trail)
        else:
            out.append(ch)
    return "".join(out)


def is_ideograph(ch: str) -> bool:
    """CJK unified ideographs (incl. extensions A-F) and compatibility ideographs."""
    o = ord(ch)
    return (
        0x4E00 <= o <= 0x9FFF
        or 0x3400 <= o <= 0x4DBF
        or 0xF900 <= o <= 0xFAFF
        or 0x20000 <= o <= 0x2FA1F
    )
