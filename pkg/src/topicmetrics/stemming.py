"""Porter suffix-stripping stemmer (the original 1980 algorithm).

Dependency-free so the preprocessing pipeline stays deterministic.  Tokens
that are not plain a-z words (after an optional leading '#' or '@') are
returned unchanged; suffix rules over non-letters are undefined.
"""

from __future__ import annotations

_VOWELS = "aeiou"


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        # y is a consonant at the start, or when the previous letter is a vowel
        return True if i == 0 else not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Count VC sequences: the m in [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        vowel = not _is_cons(stem, i)
        if prev_vowel and not vowel:
            m += 1
        prev_vowel = vowel
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(stem: str) -> bool:
    return (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and _is_cons(stem, len(stem) - 1)
    )


def _ends_cvc(stem: str) -> bool:
    """True when the stem ends consonant-vowel-consonant, last not w/x/y."""
    if len(stem) < 3:
        return False
    i = len(stem) - 1
    return (
        _is_cons(stem, i)
        and not _is_cons(stem, i - 1)
        and _is_cons(stem, i - 2)
        and stem[i] not in "wxy"
    )


def _rule(word: str, suffix: str, replacement: str, min_m: int) -> tuple[str, bool]:
    """Apply ``suffix -> replacement`` when the stem measure exceeds min_m.

    Returns (word, matched).  Per the original algorithm, a matching suffix
    consumes the step even when the measure condition fails.
    """
    if not word.endswith(suffix):
        return word, False
    stem = word[: len(word) - len(suffix)]
    if _measure(stem) > min_m:
        return stem + replacement, True
    return word, True


_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)

_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)

_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def _step1a(word: str) -> str:
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ies"):
        return word[:-2]
    if word.endswith("ss"):
        return word
    if word.endswith("s"):
        return word[:-1]
    return word


def _step1b(word: str) -> str:
    if word.endswith("eed"):
        stem = word[:-3]
        return stem + "ee" if _measure(stem) > 0 else word
    cleanup = False
    if word.endswith("ed") and _has_vowel(word[:-2]):
        word = word[:-2]
        cleanup = True
    elif word.endswith("ing") and _has_vowel(word[:-3]):
        word = word[:-3]
        cleanup = True
    if not cleanup:
        return word
    if word.endswith(("at", "bl", "iz")):
        return word + "e"
    if _ends_double_cons(word) and word[-1] not in "lsz":
        return word[:-1]
    if _measure(word) == 1 and _ends_cvc(word):
        return word + "e"
    return word


def _step1c(word: str) -> str:
    if word.endswith("y") and _has_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


def _step5a(word: str) -> str:
    if not word.endswith("e"):
        return word
    stem = word[:-1]
    m = _measure(stem)
    if m > 1 or (m == 1 and not _ends_cvc(stem)):
        return stem
    return word


def _step5b(word: str) -> str:
    if _measure(word) > 1 and _ends_double_cons(word) and word.endswith("l"):
        return word[:-1]
    return word


def porter_stem(token: str) -> str:
    """Stem a token; a leading '#' or '@' is preserved untouched."""
    prefix = ""
    word = token
    if word[:1] in "#@":
        prefix, word = word[0], word[1:]
    if len(word) <= 2 or not word.isascii() or not word.isalpha():
        return prefix + word

    word = _step1a(word)
    word = _step1b(word)
    word = _step1c(word)
    for suffix, repl in _STEP2:
        word, matched = _rule(word, suffix, repl, 0)
        if matched:
            break
    for suffix, repl in _STEP3:
        word, matched = _rule(word, suffix, repl, 0)
        if matched:
            break
    for suffix in _STEP4:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if suffix == "ion" and not stem.endswith(("s", "t")):
                continue
            if _measure(stem) > 1:
                word = stem
            break
    word = _step5a(word)
    word = _step5b(word)
    return prefix + word
