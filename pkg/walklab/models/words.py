"""
Reduced words in a free group of rank k.

Generators are the lowercase letters a, b, c, ...; the inverse of a letter is
the same letter upper-cased. The empty string is the identity. Power
notation ("b^5a^-2") is accepted by parse_word.
"""
import re
from string import ascii_lowercase
from typing import Iterator, List

from ..core.errors import InvalidPointError

_POWER = re.compile(r"([A-Za-z])(?:\^(-?\d+))?")


def alphabet(rank: int) -> str:
    """Letters of the rank-k free group in canonical order a, A, b, B, ..."""
    if not 1 <= rank <= len(ascii_lowercase):
        raise ValueError(f"Unsupported free group rank: {rank}")
    return "".join(g + g.upper() for g in ascii_lowercase[:rank])


def letter_inverse(letter: str) -> str:
    return letter.swapcase()


def is_reduced(word: str) -> bool:
    return all(word[i] != word[i + 1].swapcase() for i in range(len(word) - 1))


def validate_word(word: str, rank: int) -> str:
    if not isinstance(word, str):
        raise InvalidPointError(f"Tree points are words, got {type(word).__name__}")
    letters = alphabet(rank)
    bad = set(word) - set(letters)
    if bad:
        raise InvalidPointError(f"Word {word!r} uses letters outside F_{rank}: {''.join(sorted(bad))}")
    if not is_reduced(word):
        raise InvalidPointError(f"Word {word!r} is not freely reduced")
    return word


def reduce_word(word: str) -> str:
    stack: List[str] = []
    for letter in word:
        if stack and stack[-1] == letter.swapcase():
            stack.pop()
        else:
            stack.append(letter)
    return "".join(stack)


def inverse(word: str) -> str:
    return word[::-1].swapcase()


def multiply(u: str, v: str) -> str:
    """Reduced product of two reduced words."""
    k = 0
    limit = min(len(u), len(v))
    while k < limit and u[len(u) - 1 - k] == v[k].swapcase():
        k += 1
    return u[: len(u) - k] + v[k:]


def power(word: str, exponent: int) -> str:
    if exponent < 0:
        word, exponent = inverse(word), -exponent
    result = ""
    for _ in range(exponent):
        result = multiply(result, word)
    return result


def common_prefix_length(u: str, v: str) -> int:
    n = 0
    for x, y in zip(u, v):
        if x != y:
            break
        n += 1
    return n


def parse_word(text: str) -> str:
    """
    Parse "b^5a^-2", "bbbbbAA" or "" into a reduced word.

    Exponents apply to the single letter before the caret.
    """
    text = (text or "").replace(" ", "")
    pos = 0
    pieces = []
    while pos < len(text):
        match = _POWER.match(text, pos)
        if not match:
            raise InvalidPointError(f"Cannot parse word {text!r} at position {pos}")
        letter, exp = match.group(1), match.group(2)
        pieces.append(power(letter, int(exp)) if exp is not None else letter)
        pos = match.end()
    return reduce_word("".join(pieces))


def shortlex_key(word: str):
    """Sort key: length first, then letters in the order a < A < b < B < ..."""
    return (len(word), [2 * (ord(c.lower()) - 97) + c.isupper() for c in word])


def ball(rank: int, radius: int, letters: str = None) -> Iterator[str]:
    """
    All reduced words of length <= radius in shortlex order.

    letters restricts the alphabet (inverses included automatically), which
    enumerates a ball of a letter subgroup.
    """
    if letters is None:
        allowed = alphabet(rank)
    else:
        allowed = "".join(sorted(set(letters.lower() + letters.upper()),
                                 key=lambda c: 2 * (ord(c.lower()) - 97) + c.isupper()))
    layer = [""]
    yield ""
    for _ in range(radius):
        nxt = []
        for word in layer:
            for letter in allowed:
                if word and word[-1] == letter.swapcase():
                    continue
                nxt.append(word + letter)
        for word in nxt:
            yield word
        layer = nxt
