"""Word structures with a one-rewrite order, parameterised by n.

The carrier is every finite word over the n+2 characters t, s_0, ..., s_n
(elements are plain tuples of character strings; the empty word is ()).
The strict order rewrites only the final character of a word, by one step
of the rule set

    s_0 -> s_n        s_i -> s_{i+1} t   (i < n)

so alpha < beta holds exactly when beta is alpha with its last character
rewritten once.  Three facts shape everything downstream: there are no
chains a < b < c, every word has at most one strict predecessor, and the
upward closure of a word has at most three members.  Concatenation is
monotone on the left but deliberately not on the right — appending to a
word never preserves strict comparisons (alpha * beta >= alpha forces
beta to be empty).

Words are kept lazy: no carrier is ever materialised, and the order is
decided by inspecting final characters only.
"""

from __future__ import annotations

import re

Word = tuple[str, ...]

EMPTY: Word = ()
EMPTY_MARK = "^"  # printable stand-in for the empty word

_CHAR_RE = re.compile(r"t|s(\d+)")


def alphabet(n: int) -> tuple[str, ...]:
    if n < 0:
        raise ValueError("n must not be negative")
    return ("t",) + tuple(f"s{i}" for i in range(n + 1))


def check_word(n: int, word: Word) -> Word:
    for ch in word:
        if ch == "t":
            continue
        m = _CHAR_RE.fullmatch(ch)
        if m is None or int(m.group(1)) > n:
            raise ValueError(f"bad character {ch!r} for alphabet of s0..s{n}, t")
    return tuple(word)


def parse_word(n: int, text: str) -> Word:
    """Inverse of format_word; characters are juxtaposed, "^" is empty."""
    if text == EMPTY_MARK:
        return EMPTY
    out = []
    pos = 0
    while pos < len(text):
        m = _CHAR_RE.match(text, pos)
        if m is None:
            raise ValueError(f"bad word {text!r} at offset {pos}")
        out.append(m.group(0))
        pos = m.end()
    return check_word(n, tuple(out))


def format_word(word: Word) -> str:
    return "".join(word) if word else EMPTY_MARK


def successors(n: int, word: Word) -> tuple[Word, ...]:
    """Words one rewrite above, in a fixed order."""
    if not word:
        return ()
    head, last = word[:-1], word[-1]
    if last == "t":
        return ()
    i = int(last[1:])
    out = []
    if i == 0 and n >= 1:
        out.append(head + (f"s{n}",))
    if i < n:
        out.append(head + (f"s{i + 1}", "t"))
    return tuple(out)


def predecessor(n: int, word: Word) -> Word | None:
    """The unique word strictly below, if any."""
    if word and word[-1] == f"s{n}" and n >= 1:
        return word[:-1] + ("s0",)
    if len(word) >= 2 and word[-1] == "t" and word[-2] != "t":
        i = int(word[-2][1:])
        if 1 <= i <= n:
            return word[:-2] + (f"s{i - 1}",)
    return None


def an_lt(n: int, a: Word, b: Word) -> bool:
    return check_word(n, b) in successors(n, check_word(n, a))


def an_leq(n: int, a: Word, b: Word) -> bool:
    a = check_word(n, a)
    b = check_word(n, b)
    return a == b or b in successors(n, a)


def an_upclose(n: int, word: Word) -> frozenset[Word]:
    word = check_word(n, word)
    return frozenset((word,) + successors(n, word))


def upclose_set(n: int, words) -> frozenset[Word]:
    out = set()
    for w in words:
        out |= an_upclose(n, w)
    return frozenset(out)


def minimal_generators(n: int, words) -> frozenset[Word]:
    """Drop words already above another generator (same upward closure)."""
    ws = {check_word(n, w) for w in words}
    return frozenset(w for w in ws
                     if not any(o != w and an_leq(n, o, w) for o in ws))


def words_up_to(n: int, length: int):
    """All words of at most the given length, shortest first (lexicographic
    within a length)."""
    sigma = sorted(alphabet(n))
    frontier = [EMPTY]
    for _ in range(length + 1):
        yield from frontier
        frontier = [w + (c,) for w in frontier for c in sigma]
