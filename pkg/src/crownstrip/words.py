"""Words in a free group on generators ``1..rank``; ``-i`` is the inverse of ``i``."""

from __future__ import annotations

from collections.abc import Iterator, Sequence

import numpy as np

Word = tuple[int, ...]

EMPTY: Word = ()


def reduce(word: Sequence[int]) -> Word:
    """Free reduction (cancel adjacent ``i, -i``)."""
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("0 is not a generator index")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(int(letter))
    return tuple(out)


def inverse(word: Sequence[int]) -> Word:
    return tuple(-letter for letter in reversed(word))


def multiply(*words: Sequence[int]) -> Word:
    return reduce([letter for w in words for letter in w])


def cyclic_reduce(word: Sequence[int]) -> Word:
    w = list(reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def letter_order(word: Sequence[int]) -> tuple:
    """Sort key ordering letters ``1 < -1 < 2 < -2 < ...``."""
    return tuple((abs(x), x < 0) for x in word)


def _least_rotation(word: Word) -> Word:
    if not word:
        return word
    return min((word[i:] + word[:i] for i in range(len(word))), key=letter_order)


def conjugacy_key(word: Sequence[int]) -> Word:
    """Lexicographically least cyclic rotation of the cyclic reduction."""
    return _least_rotation(cyclic_reduce(word))


def unoriented_key(word: Sequence[int]) -> Word:
    """Key identifying a class with the class of its inverse."""
    return min(conjugacy_key(word), conjugacy_key(inverse(word)), key=letter_order)


def primitive_root(word: Sequence[int]) -> tuple[Word, int]:
    """``(root, k)`` with ``word == root**k`` for a cyclically reduced word."""
    w = tuple(word)
    n = len(w)
    for size in range(1, n + 1):
        if n % size == 0 and w[:size] * (n // size) == w:
            return w[:size], n // size
    return w, 1


def enumerate_reduced(rank: int, max_len: int) -> Iterator[Word]:
    """All nontrivial reduced words of length at most ``max_len`` in shortlex order."""
    letters = [i for g in range(1, rank + 1) for i in (g, -g)]
    layer: list[Word] = [EMPTY]
    for _ in range(max_len):
        nxt: list[Word] = []
        for w in layer:
            for letter in letters:
                if w and w[-1] == -letter:
                    continue
                nxt.append(w + (letter,))
        yield from nxt
        layer = nxt


def conjugacy_representatives(rank: int, max_len: int, unoriented: bool = True) -> list[Word]:
    """One cyclically reduced representative per conjugacy class up to ``max_len``."""
    seen: set[Word] = set()
    reps: list[Word] = []
    for w in enumerate_reduced(rank, max_len):
        if cyclic_reduce(w) != w:
            continue
        key = unoriented_key(w) if unoriented else conjugacy_key(w)
        if key in seen:
            continue
        seen.add(key)
        reps.append(key)
    return reps


def evaluate(word: Sequence[int], generators: Sequence[np.ndarray]) -> np.ndarray:
    """Product of generator matrices (inverses for negative letters)."""
    m = np.eye(2)
    for letter in word:
        g = np.asarray(generators[abs(letter) - 1], dtype=float)
        if letter < 0:
            det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
            g = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det
        m = m @ g
    return m


def to_str(word: Sequence[int]) -> str:
    """Readable form such as ``g1 g2^-1``; the identity prints as ``e``."""
    if not word:
        return "e"
    return " ".join(f"g{abs(x)}" if x > 0 else f"g{abs(x)}^-1" for x in word)
