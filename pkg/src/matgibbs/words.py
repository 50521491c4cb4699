"""Finite words over the alphabet {0, ..., M-1} and enumeration helpers.

Words are plain tuples of ints; the empty tuple denotes the full space.
Enumeration order is lexicographic everywhere.
"""

from __future__ import annotations

import itertools

from .errors import BudgetExceededError, InvalidWordError

Word = tuple


def parse_word(text: str) -> Word:
    """Parse a digit string like ``"0110"`` into a word; ``""`` is the empty word."""
    try:
        return tuple(int(c) for c in text.strip())
    except ValueError as exc:
        raise InvalidWordError(f"cannot parse word {text!r}: digits expected") from exc


def word_str(word: Word) -> str:
    """Inverse of :func:`parse_word`."""
    return "".join(str(s) for s in word)


def validate_word(word: Word, alphabet_size: int) -> None:
    for s in word:
        if not 0 <= int(s) < alphabet_size:
            raise InvalidWordError(
                f"symbol {s} out of range for alphabet of size {alphabet_size}"
            )


def count_words(alphabet_size: int, length: int) -> int:
    return alphabet_size**length


def count_words_up_to(alphabet_size: int, max_len: int, include_empty: bool = True) -> int:
    total = sum(alphabet_size**n for n in range(1, max_len + 1))
    return total + 1 if include_empty else total


def iter_words(alphabet_size: int, length: int):
    """All words of exactly the given length, lexicographically."""
    return itertools.product(range(alphabet_size), repeat=length)


def iter_words_up_to(alphabet_size: int, max_len: int, include_empty: bool = False):
    """All words of length <= max_len, by length then lexicographically."""
    if include_empty:
        yield ()
    for n in range(1, max_len + 1):
        yield from iter_words(alphabet_size, n)


def word_index(word: Word, alphabet_size: int) -> int:
    """Position of the word in the lexicographic enumeration of its length."""
    idx = 0
    for s in word:
        idx = idx * alphabet_size + int(s)
    return idx


def ensure_budget(count: int, budget: int) -> None:
    """Guard an enumeration of `count` words against the configured budget."""
    if count > budget:
        raise BudgetExceededError(
            f"enumeration of {count} words exceeds budget {budget}"
        )
