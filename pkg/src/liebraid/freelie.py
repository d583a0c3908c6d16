"""Free Lie algebra tools: Lyndon bases, bracket expansion and Hopf-style tests."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from .freealg import (
    Alphabet,
    Series,
    TensorSeries,
    alphabet_from_json,
    alphabet_to_json,
    letter_to_json,
    shuffle_coproduct,
    word_key,
)

__all__ = [
    "Bracket",
    "LieElement",
    "lyndon_words",
    "standard_bracketing",
    "lyndon_basis",
    "bracket_expand",
    "bracket_word",
    "is_lyndon",
    "is_primitive",
    "is_grouplike",
    "shuffle_violations",
    "series_to_lie",
    "mobius",
    "lie_dimension",
    "lie_to_json",
    "lie_from_json",
]


@dataclass(frozen=True)
class Bracket:
    left: "Node"
    right: "Node"

    def __repr__(self):
        return f"[{self.left!r},{self.right!r}]"


Node = Union[int, tuple, Bracket]


def bracket_word(node: Node) -> tuple:
    """Foliage of a bracketing, i.e. the underlying word."""
    if isinstance(node, Bracket):
        return bracket_word(node.left) + bracket_word(node.right)
    return (node,)


def is_lyndon(word: tuple) -> bool:
    n = len(word)
    return n > 0 and all(word < word[i:] for i in range(1, n))


def lyndon_words(letters: Iterable, max_degree: int) -> list[tuple]:
    """Lyndon words of length <= max_degree over the ordered letters (Duval's generator)."""
    letters = sorted(letters)
    k = len(letters)
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(letters[i] for i in w))
        m = len(w)
        while len(w) < max_degree:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


def standard_bracketing(word: tuple) -> Node:
    """Bracket a Lyndon word via its longest proper Lyndon suffix."""
    if len(word) == 1:
        return word[0]
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return Bracket(standard_bracketing(word[:i]), standard_bracketing(word[i:]))
    raise ValueError(f"{word} is not a Lyndon word")


def lyndon_basis(num_generators: int, degree: int, alphabet: Alphabet | None = None) -> list[Node]:
    """Standard bracketings of the Lyndon words of one degree, in lexicographic order."""
    if alphabet is None:
        alphabet = Alphabet.free(num_generators)
    words = [w for w in lyndon_words(alphabet.letters, degree) if len(w) == degree]
    return [standard_bracketing(w) for w in sorted(words)]


@lru_cache(maxsize=None)
def _expand_node(node: Node) -> tuple:
    if not isinstance(node, Bracket):
        return (((node,), 1),)
    a = dict(_expand_node(node.left))
    b = dict(_expand_node(node.right))
    out: dict = {}
    for u, cu in a.items():
        for v, cv in b.items():
            out[u + v] = out.get(u + v, 0) + cu * cv
            out[v + u] = out.get(v + u, 0) - cu * cv
    return tuple((w, c) for w, c in out.items() if c)


class LieElement:
    """Rational combination of bracketed Lyndon words over a declared alphabet."""

    __slots__ = ("alphabet", "terms")

    def __init__(self, alphabet: Alphabet, terms: Mapping[Node, object] | None = None):
        self.alphabet = alphabet
        clean: dict = {}
        for node, c in (terms or {}).items():
            node = self._normalize(node)
            word = bracket_word(node)
            if not is_lyndon(word) or standard_bracketing(word) != node:
                raise ValueError(f"{node!r} is not a standard Lyndon bracketing")
            c = Fraction(c)
            if c:
                clean[node] = clean.get(node, 0) + c
        self.terms = {k: v for k, v in clean.items() if v}

    def _normalize(self, node):
        if isinstance(node, Bracket):
            return Bracket(self._normalize(node.left), self._normalize(node.right))
        return self.alphabet.normalize_letter(node)

    @classmethod
    def generator(cls, alphabet: Alphabet, letter, coeff=1) -> "LieElement":
        return cls(alphabet, {letter: coeff})

    @classmethod
    def from_words(cls, alphabet: Alphabet, terms: Mapping[tuple, object]) -> "LieElement":
        """Build from Lyndon words (bracketed with the standard factorization)."""
        return cls(alphabet, {standard_bracketing(alphabet.normalize_word(w)): c for w, c in terms.items()})

    @property
    def max_degree(self) -> int:
        return max((len(bracket_word(k)) for k in self.terms), default=0)

    def __add__(self, other: "LieElement") -> "LieElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LieElement(self.alphabet, out)

    def __neg__(self):
        return LieElement(self.alphabet, {k: -c for k, c in self.terms.items()})

    def scale(self, c) -> "LieElement":
        return LieElement(self.alphabet, {k: v * Fraction(c) for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, LieElement) and self.alphabet == other.alphabet and self.terms == other.terms

    def __repr__(self):
        return f"LieElement({self.terms!r})"

    def expand(self, N: int) -> Series:
        return bracket_expand(self, N)


def bracket_expand(e: LieElement, N: int) -> Series:
    """Expand ``[a, b] -> ab - ba`` recursively into a series truncated at ``N``."""
    if e.max_degree > N:
        raise ValueError(f"Lie element of degree {e.max_degree} exceeds truncation {N}")
    out: dict = {}
    for node, c in e.terms.items():
        for w, k in _expand_node(node):
            out[w] = out.get(w, 0) + c * k
    return Series._raw(e.alphabet, N, {w: Fraction(c) for w, c in out.items() if c})


def series_to_lie(s: Series) -> LieElement:
    """Coordinates of a primitive series in the Lyndon basis.

    Uses triangularity: the standard bracketing of a Lyndon word ``w`` expands
    to ``w`` plus lexicographically larger words of the same degree.
    """
    rest = dict(s.items())
    if rest.get((), 0):
        raise ValueError("a Lie element has no constant term")
    terms: dict = {}
    while rest:
        w = min(rest, key=word_key)
        if not is_lyndon(w):
            raise ValueError(f"series is not a Lie element (leading word {w} is not Lyndon)")
        c = rest[w]
        node = standard_bracketing(w)
        terms[node] = c
        for u, k in _expand_node(node):
            v = rest.get(u, 0) - c * k
            if v:
                rest[u] = v
            else:
                rest.pop(u, None)
    return LieElement(s.alphabet, terms)


def is_primitive(s: Series) -> bool:
    """``delta(s) == s (x) 1 + 1 (x) s`` at the truncation order."""
    one = Series.one(s.alphabet, s.N)
    expected = TensorSeries.product(s, one) + TensorSeries.product(one, s)
    return shuffle_coproduct(s) == expected


def shuffle_violations(s: Series, limit: int | None = None) -> list[dict]:
    """Failed shuffle equations ``c_v c_w = sum_{u in v sh w} c_u``.

    Comparing ``delta(s)`` with ``s (x) s`` coefficient-wise is exactly the set
    of these equations, one per pair ``(v, w)`` with ``deg v + deg w <= N``;
    only pairs where the two sides differ are listed, in canonical order.
    """
    diff = shuffle_coproduct(s) - TensorSeries.product(s, s)
    out = []
    for v, w in diff.keys_sorted():
        lhs = s[v] * s[w]
        out.append({"v": v, "w": w, "lhs": lhs, "rhs": lhs + diff[(v, w)]})
        if limit is not None and len(out) >= limit:
            break
    return out


def is_grouplike(s: Series) -> bool:
    """Constant term 1 and every shuffle equation of total degree <= N holds.

    For a Kohno series, the input must be in good-word normal form; the shuffle
    coproduct of a good word splits it into good words, so the same test applies.
    """
    return s.constant == 1 and not shuffle_violations(s, limit=1)


def mobius(d: int) -> int:
    result, p = 1, 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            result = -result
        p += 1
    return -result if d > 1 else result


def lie_dimension(m: int, k: int) -> int:
    """Necklace count ``(1/k) sum_{d | k} mu(d) m^(k/d)``."""
    if m < 1 or k < 1:
        raise ValueError("lie_dimension needs m >= 1 and k >= 1")
    total = sum(mobius(d) * m ** (k // d) for d in range(1, k + 1) if k % d == 0)
    assert total % k == 0
    return total // k


# --- JSON -----------------------------------------------------------------------


def _node_to_json(node: Node):
    if isinstance(node, Bracket):
        return [_node_to_json(node.left), _node_to_json(node.right)]
    return letter_to_json(node)


def _node_from_json(doc, alphabet: Alphabet):
    if alphabet.kind == "free":
        if isinstance(doc, list):
            if len(doc) != 2:
                raise ValueError("a bracket must have exactly two entries")
            return Bracket(_node_from_json(doc[0], alphabet), _node_from_json(doc[1], alphabet))
        return alphabet.normalize_letter(doc)
    # Kohno letters are pairs of integers; brackets are pairs of nodes
    if isinstance(doc, list) and len(doc) == 2 and all(isinstance(x, int) for x in doc):
        return alphabet.normalize_letter(doc)
    if isinstance(doc, list) and len(doc) == 2:
        return Bracket(_node_from_json(doc[0], alphabet), _node_from_json(doc[1], alphabet))
    raise ValueError(f"cannot read Lie node {doc!r}")


def lie_to_json(e: LieElement) -> dict:
    terms = sorted(e.terms.items(), key=lambda kv: word_key(bracket_word(kv[0])))
    return {
        "alphabet": alphabet_to_json(e.alphabet),
        "terms": [{"lyndon": _node_to_json(k), "coeff": str(c)} for k, c in terms],
    }


def lie_from_json(doc: Mapping | str) -> LieElement:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if "alphabet" not in doc:
        raise ValueError("lie element: missing field 'alphabet'")
    alphabet = alphabet_from_json(doc["alphabet"])
    terms: dict = {}
    for k, term in enumerate(doc.get("terms", [])):
        try:
            node = _node_from_json(term["lyndon"], alphabet)
            c = Fraction(term["coeff"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"lie element: terms[{k}] is malformed ({exc})") from None
        terms[node] = terms.get(node, 0) + c
    return LieElement(alphabet, terms)
