"""The enveloping algebra of the Kohno Lie algebra ``br_n`` in the good-word basis.

A word in the letters ``r_ij`` (``i < j``) is *good* when the first indices of
its letters never decrease from left to right, i.e. it splits into blocks
``w_1 w_2 ... w_{n-1}`` where block ``k`` only uses letters ``r_k*``.

Rewriting rules for an adjacent disorder ``x y`` with ``x = r_ab``,
``y = r_cd``, ``c < a`` (all derived from the defining relations):

* disjoint indices: ``r_ab r_cd = r_cd r_ab``
* ``d == a``: ``r_ab r_ca = r_ca r_ab + r_ca r_cb - r_cb r_ca``
* ``d == b``: ``r_ab r_cb = r_cb r_ab + r_cb r_ca - r_ca r_cb``

Each step either removes an inversion or replaces a block-``a`` letter by a
block-``c`` letter with ``c < a``, so rewriting terminates.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .freealg import Alphabet, Series, geometric_inverse, series_mul, word_key

__all__ = [
    "KohnoAlgebra",
    "block",
    "is_good",
    "rewrite_step",
    "normal_form",
    "kohno_mul",
    "kohno_letters_of_block",
    "project_forget",
    "lift_shift",
    "factorize",
    "universal_dimension",
    "universal_dimensions",
    "kohno_lie_dimension",
    "enumerate_good_words",
    "block_of_series",
]


class KohnoAlgebra:
    """``U(br_n)``: generators ``r_ij`` for ``1 <= i < j <= n``."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("the Kohno algebra needs n >= 2")
        self.n = n
        self.alphabet = Alphabet.kohno(n)

    @property
    def generators(self) -> tuple:
        return self.alphabet.letters

    def one(self, N: int) -> Series:
        return Series.one(self.alphabet, N)

    def r(self, i: int, j: int, N: int, coeff=1) -> Series:
        return Series.letter(self.alphabet, N, (i, j), coeff)

    def mul(self, a: Series, b: Series) -> Series:
        return kohno_mul(a, b)

    def normal_form(self, s: Series) -> Series:
        return normal_form(s)

    def __repr__(self):
        return f"KohnoAlgebra(n={self.n})"


def block(letter: tuple) -> int:
    return letter[0]


def is_good(word: tuple) -> bool:
    return all(word[i][0] <= word[i + 1][0] for i in range(len(word) - 1))


def rewrite_step(word: tuple, pos: int) -> list[tuple[tuple, int]]:
    """Resolve the disorder between positions ``pos`` and ``pos + 1``."""
    x, y = word[pos], word[pos + 1]
    a, b = x
    c, d = y
    if not c < a:
        raise ValueError(f"no disorder at position {pos} of {word}")
    head, tail = word[:pos], word[pos + 2 :]
    if d not in (a, b):
        return [(head + (y, x) + tail, 1)]
    # x y = y x + p q - q p, with p the letter y and q its block-c partner
    p = y
    q = (c, b) if d == a else (c, a)
    return [
        (head + (y, x) + tail, 1),
        (head + (p, q) + tail, 1),
        (head + (q, p) + tail, -1),
    ]


def _disorders(word: tuple):
    return [i for i in range(len(word) - 1) if word[i][0] > word[i + 1][0]]


@lru_cache(maxsize=None)
def _nf_left(word: tuple) -> tuple:
    bad = _disorders(word)
    if not bad:
        return ((word, 1),)
    return _combine(_nf_left, rewrite_step(word, bad[0]))


@lru_cache(maxsize=None)
def _nf_right(word: tuple) -> tuple:
    bad = _disorders(word)
    if not bad:
        return ((word, 1),)
    return _combine(_nf_right, rewrite_step(word, bad[-1]))


def _combine(nf, pieces) -> tuple:
    out: dict = {}
    for w, c in pieces:
        for u, k in nf(w):
            out[u] = out.get(u, 0) + c * k
    return tuple((u, k) for u, k in out.items() if k)


_STRATEGIES = {"left": _nf_left, "right": _nf_right}


def normal_form(s: Series, strategy: str = "left") -> Series:
    """Rewrite every word of a Kohno series as a combination of good words.

    ``strategy`` picks which disorder is resolved first (leftmost or
    rightmost); both must give the same answer.
    """
    if s.alphabet.kind != "kohno":
        raise ValueError("normal_form needs a Kohno series")
    nf = _STRATEGIES[strategy]
    out: dict = {}
    for w, c in s.items():
        if is_good(w):
            out[w] = out.get(w, 0) + c
            continue
        for u, k in nf(w):
            out[u] = out.get(u, 0) + c * k
    return Series._raw(s.alphabet, s.N, {w: Fraction(c) for w, c in out.items() if c})


def kohno_mul(a: Series, b: Series) -> Series:
    """Product in ``U(br_n)``, returned in normal form."""
    if a.alphabet.kind != "kohno":
        raise ValueError("kohno_mul needs Kohno series")
    return normal_form(series_mul(a, b))


def kohno_letters_of_block(n: int, k: int) -> tuple:
    return tuple((k, j) for j in range(k + 1, n + 1))


def block_of_series(s: Series) -> set:
    return {x[0] for w in s for x in w}


def project_forget(s: Series, alpha: int) -> Series:
    """Kill every ``r_ij`` with ``i <= alpha`` and relabel indices down by ``alpha``.

    Applied to the normal form, so this is the homomorphism
    ``U(br_n) -> U(br_{n - alpha})`` forgetting the first ``alpha`` strands.
    """
    n = s.alphabet.size
    if not 1 <= alpha <= n - 2:
        raise ValueError(f"alpha must satisfy 1 <= alpha <= n-2 (n={n}), got {alpha}")
    nf = normal_form(s)
    target = Alphabet.kohno(n - alpha)
    out = {}
    for w, c in nf.items():
        if all(x[0] > alpha for x in w):
            out[tuple((i - alpha, j - alpha) for i, j in w)] = c
    return Series._raw(target, s.N, out)


def lift_shift(s: Series, n: int, shift: int = 1) -> Series:
    """Embed ``U(br_m)`` into ``U(br_n)`` by adding ``shift`` to every index."""
    m = s.alphabet.size
    if m + shift > n:
        raise ValueError("lift does not fit into the target algebra")
    target = Alphabet.kohno(n)
    return Series._raw(
        target, s.N, {tuple((i + shift, j + shift) for i, j in w): c for w, c in s.items()}
    )


def factorize(s: Series) -> list[Series]:
    """Split a group element of ``U(br_n)`` as ``T_1 T_2 ... T_{n-1}``.

    ``T_k`` only involves the letters ``r_k*``.  The first factor is
    ``S * L(pi(S))^{-1}`` where ``pi`` forgets the first strand and ``L``
    shifts indices back up; the rest is the factorization of ``pi(S)``, lifted.
    Raises ``ValueError`` if the constant term is not 1 or if the input does not
    split (it is not a group element).
    """
    if s.constant != 1:
        raise ValueError(f"factorize needs constant term 1, got {s.constant}")
    n = s.alphabet.size
    s = normal_form(s)
    if n == 2:
        return [s]
    rest = project_forget(s, 1)
    lifted = lift_shift(rest, n, 1)
    first = kohno_mul(s, geometric_inverse(lifted, kohno_mul))
    stray = block_of_series(first) - {1}
    if stray:
        raise ValueError(f"input is not a group element: first factor uses blocks {sorted(stray)}")
    return [first] + [lift_shift(t, n, 1) for t in factorize(rest)]


def universal_dimensions(n: int, max_k: int) -> list[int]:
    """Coefficients of ``prod_{j=1}^{n-1} (1 - j t)^{-1}`` up to ``t^max_k``."""
    if n < 2:
        raise ValueError("n >= 2 required")
    coeffs = [1] + [0] * max_k
    for j in range(1, n):
        # multiply by 1/(1 - j t): c_k += j c_{k-1}
        for k in range(1, max_k + 1):
            coeffs[k] += j * coeffs[k - 1]
    return coeffs


def universal_dimension(n: int, k: int) -> int:
    if k < 0:
        raise ValueError("k >= 0 required")
    return universal_dimensions(n, k)[k]


def kohno_lie_dimension(n: int, k: int) -> int:
    from .freelie import lie_dimension

    if n < 2 or k < 1:
        raise ValueError("n >= 2 and k >= 1 required")
    return sum(lie_dimension(m, k) for m in range(1, n))


def enumerate_good_words(n: int, k: int) -> list[tuple]:
    """All good words of degree ``k`` in ``U(br_n)``, canonically sorted."""
    if n < 2 or k < 0:
        raise ValueError("n >= 2 and k >= 0 required")
    blocks = [kohno_letters_of_block(n, b) for b in range(1, n)]
    words = []
    for split in _compositions(k, n - 1):
        pieces = [itertools.product(blocks[b], repeat=split[b]) for b in range(n - 1)]
        for combo in itertools.product(*pieces):
            words.append(tuple(itertools.chain.from_iterable(combo)))
    return sorted(words, key=word_key)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
