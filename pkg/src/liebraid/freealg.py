"""Truncated graded series over a free associative algebra.

A :class:`Series` is a finite map from words to exact rationals together with
a mandatory truncation order ``N``.  Letters are either integers ``1..m``
(free alphabet) or pairs ``(i, j)`` with ``i < j`` standing for the Kohno
generator ``r_ij`` (Kohno alphabet).  Multiplication here is plain
concatenation; products in the Kohno algebra itself live in
:mod:`liebraid.kohno`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

__all__ = [
    "Alphabet",
    "Series",
    "TensorSeries",
    "series_add",
    "series_mul",
    "shuffle_coproduct",
    "antipode",
    "apply_entire",
    "exp_coefficients",
    "log1p_coefficients",
    "series_exp",
    "series_log",
    "geometric_inverse",
    "grading_rescale",
    "ell1_norm_by_degree",
    "change_basis",
    "word_key",
    "series_to_json",
    "series_from_json",
    "alphabet_to_json",
    "alphabet_from_json",
]


@dataclass(frozen=True)
class Alphabet:
    """Either ``Alphabet("free", m)`` or ``Alphabet("kohno", n)``."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("free", "kohno"):
            raise ValueError(f"unknown alphabet kind {self.kind!r}")
        if self.kind == "free" and self.size < 1:
            raise ValueError("free alphabet needs at least one generator")
        if self.kind == "kohno" and self.size < 2:
            raise ValueError("Kohno alphabet needs n >= 2")

    @classmethod
    def free(cls, m: int) -> "Alphabet":
        return cls("free", m)

    @classmethod
    def kohno(cls, n: int) -> "Alphabet":
        return cls("kohno", n)

    @property
    def letters(self) -> tuple:
        if self.kind == "free":
            return tuple(range(1, self.size + 1))
        return tuple(itertools.combinations(range(1, self.size + 1), 2))

    def normalize_letter(self, letter):
        if self.kind == "free":
            if isinstance(letter, bool) or not isinstance(letter, int):
                raise ValueError(f"free letter must be an integer, got {letter!r}")
            if not 1 <= letter <= self.size:
                raise ValueError(f"free letter {letter} outside 1..{self.size}")
            return letter
        try:
            i, j = letter
            i, j = int(i), int(j)
        except (TypeError, ValueError):
            raise ValueError(f"Kohno letter must be a pair, got {letter!r}") from None
        if i == j or not (1 <= i <= self.size and 1 <= j <= self.size):
            raise ValueError(f"invalid Kohno letter {letter!r} for n={self.size}")
        return (i, j) if i < j else (j, i)

    def normalize_word(self, word: Iterable) -> tuple:
        return tuple(self.normalize_letter(x) for x in word)

    def words(self, degree: int):
        """All words of the given length, in canonical order."""
        return itertools.product(self.letters, repeat=degree)


def word_key(word: tuple):
    """Canonical order: degree first, then lexicographic on letters."""
    return (len(word), word)


def _check_compatible(a: "Series", b: "Series"):
    if a.alphabet != b.alphabet:
        raise ValueError(f"alphabet mismatch: {a.alphabet} vs {b.alphabet}")
    if a.N != b.N:
        raise ValueError(f"truncation mismatch: N={a.N} vs N={b.N}")


class Series:
    """Immutable truncated series ``sum c_w w`` with ``deg w <= N``."""

    __slots__ = ("alphabet", "N", "_c")

    def __init__(self, alphabet: Alphabet, N: int, coeffs: Mapping | None = None):
        if N < 0:
            raise ValueError("truncation order must be nonnegative")
        c = {}
        for word, value in (coeffs or {}).items():
            word = alphabet.normalize_word(word)
            if len(word) > N:
                raise ValueError(f"word {word} has degree {len(word)} > N={N}")
            value = Fraction(value)
            if value:
                c[word] = c.get(word, 0) + value
                if not c[word]:
                    del c[word]
        self.alphabet = alphabet
        self.N = N
        self._c = c

    @classmethod
    def _raw(cls, alphabet: Alphabet, N: int, coeffs: dict) -> "Series":
        # trusted constructor: normalized words, Fraction values, zeros already pruned
        s = object.__new__(cls)
        s.alphabet = alphabet
        s.N = N
        s._c = coeffs
        return s

    @classmethod
    def zero(cls, alphabet: Alphabet, N: int) -> "Series":
        return cls._raw(alphabet, N, {})

    @classmethod
    def one(cls, alphabet: Alphabet, N: int) -> "Series":
        return cls._raw(alphabet, N, {(): Fraction(1)})

    @classmethod
    def word(cls, alphabet: Alphabet, N: int, word: Iterable, coeff=1) -> "Series":
        return cls(alphabet, N, {tuple(word): coeff})

    @classmethod
    def letter(cls, alphabet: Alphabet, N: int, letter, coeff=1) -> "Series":
        return cls(alphabet, N, {(letter,): coeff})

    # --- mapping protocol -------------------------------------------------
    def __getitem__(self, word) -> Fraction:
        return self._c.get(self.alphabet.normalize_word(word), Fraction(0))

    def coeff(self, word) -> Fraction:
        return self[word]

    def items(self):
        return self._c.items()

    def terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self._c.items(), key=lambda kv: word_key(kv[0]))

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    @property
    def constant(self) -> Fraction:
        return self._c.get((), Fraction(0))

    def is_zero(self) -> bool:
        return not self._c

    def degree_part(self, p: int) -> "Series":
        return Series._raw(self.alphabet, self.N, {w: c for w, c in self._c.items() if len(w) == p})

    def max_degree(self) -> int:
        return max((len(w) for w in self._c), default=-1)

    def truncate(self, N: int) -> "Series":
        """Explicit re-truncation to a (usually smaller) order."""
        return Series._raw(self.alphabet, N, {w: c for w, c in self._c.items() if len(w) <= N})

    def map_words(self, fn: Callable[[tuple], tuple], alphabet: Alphabet | None = None) -> "Series":
        alphabet = alphabet or self.alphabet
        out: dict = {}
        for w, c in self._c.items():
            w2 = fn(w)
            out[w2] = out.get(w2, 0) + c
        return Series._raw(alphabet, self.N, {w: c for w, c in out.items() if c})

    # --- arithmetic ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.alphabet == other.alphabet and self.N == other.N and self._c == other._c

    def __hash__(self):
        return hash((self.alphabet, self.N, frozenset(self._c.items())))

    def __add__(self, other):
        if isinstance(other, Series):
            return series_add(self, other)
        return self + Series.one(self.alphabet, self.N).scale(other)

    __radd__ = __add__

    def __neg__(self):
        return Series._raw(self.alphabet, self.N, {w: -c for w, c in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series):
            return series_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Series":
        c = Fraction(c)
        if not c:
            return Series.zero(self.alphabet, self.N)
        return Series._raw(self.alphabet, self.N, {w: c * v for w, v in self._c.items()})

    def __repr__(self):
        if not self._c:
            return f"Series(0, N={self.N})"
        return f"Series({format_series(self)}, N={self.N})"


def _letter_str(letter) -> str:
    if isinstance(letter, tuple):
        return f"r{letter[0]}{letter[1]}" if max(letter) < 10 else f"r({letter[0]},{letter[1]})"
    return f"w{letter}"


def format_series(s: Series) -> str:
    parts = []
    for word, c in s.terms():
        mono = "*".join(_letter_str(x) for x in word) or "1"
        if word and c == 1:
            parts.append(mono)
        elif word and c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}" + ("" if not word else "*" + mono))
    return " + ".join(parts).replace("+ -", "- ")


def series_add(a: Series, b: Series) -> Series:
    _check_compatible(a, b)
    out = dict(a._c)
    for w, c in b._c.items():
        v = out.get(w, 0) + c
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return Series._raw(a.alphabet, a.N, out)


def _by_degree(coeffs: dict) -> dict[int, list]:
    grouped: dict[int, list] = {}
    for w, c in coeffs.items():
        grouped.setdefault(len(w), []).append((w, c))
    return grouped


def series_mul(a: Series, b: Series) -> Series:
    """Concatenation product truncated at the common order ``N``."""
    _check_compatible(a, b)
    N = a.N
    bd = _by_degree(b._c)
    out: dict = {}
    for u, cu in a._c.items():
        room = N - len(u)
        if room < 0:
            continue
        for q, terms in bd.items():
            if q > room:
                continue
            for v, cv in terms:
                w = u + v
                out[w] = out.get(w, 0) + cu * cv
    return Series._raw(a.alphabet, N, {w: c for w, c in out.items() if c})


# --- coproduct --------------------------------------------------------------


class TensorSeries:
    """Element of the completed tensor square, truncated at total degree ``N``."""

    __slots__ = ("alphabet", "N", "_c")

    def __init__(self, alphabet: Alphabet, N: int, coeffs: Mapping | None = None):
        self.alphabet = alphabet
        self.N = N
        self._c = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}
        for (u, v) in self._c:
            if len(u) + len(v) > N:
                raise ValueError("tensor term exceeds truncation")

    @classmethod
    def _raw(cls, alphabet, N, coeffs):
        t = object.__new__(cls)
        t.alphabet, t.N, t._c = alphabet, N, coeffs
        return t

    @classmethod
    def product(cls, a: Series, b: Series) -> "TensorSeries":
        """``a (x) b`` truncated at total degree ``min(a.N, b.N)``."""
        N = min(a.N, b.N)
        out = {}
        for u, cu in a.items():
            for v, cv in b.items():
                if len(u) + len(v) <= N:
                    out[(u, v)] = cu * cv
        return cls._raw(a.alphabet, N, out)

    def items(self):
        return self._c.items()

    def __getitem__(self, key) -> Fraction:
        return self._c.get(key, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, TensorSeries):
            return NotImplemented
        return self.alphabet == other.alphabet and self.N == other.N and self._c == other._c

    def __add__(self, other: "TensorSeries") -> "TensorSeries":
        out = dict(self._c)
        for k, c in other._c.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return TensorSeries._raw(self.alphabet, min(self.N, other.N), out)

    def __sub__(self, other: "TensorSeries") -> "TensorSeries":
        return self + TensorSeries._raw(other.alphabet, other.N, {k: -c for k, c in other._c.items()})

    def __mul__(self, other: "TensorSeries") -> "TensorSeries":
        if other.alphabet != self.alphabet or other.N != self.N:
            raise ValueError("tensor product operands must share alphabet and truncation")
        N = self.N
        out: dict = {}
        for (u1, v1), c1 in self._c.items():
            for (u2, v2), c2 in other._c.items():
                if len(u1) + len(v1) + len(u2) + len(v2) > N:
                    continue
                k = (u1 + u2, v1 + v2)
                out[k] = out.get(k, 0) + c1 * c2
        return TensorSeries._raw(self.alphabet, N, {k: c for k, c in out.items() if c})

    def keys_sorted(self):
        return sorted(self._c, key=lambda k: (len(k[0]) + len(k[1]), word_key(k[0]), word_key(k[1])))

    def __repr__(self):
        return f"TensorSeries({len(self._c)} terms, N={self.N})"


def _splits(word: tuple):
    """Every way of colouring the letters of ``word`` into a left and a right subword."""
    m = len(word)
    for mask in range(1 << m):
        left = tuple(word[i] for i in range(m) if mask >> i & 1)
        right = tuple(word[i] for i in range(m) if not mask >> i & 1)
        yield left, right


def shuffle_coproduct(s: Series) -> TensorSeries:
    """Algebra morphism extending ``x -> x (x) 1 + 1 (x) x`` on letters.

    On a word this is the sum over all ways of splitting its letters into two
    complementary subwords.
    """
    out: dict = {}
    for w, c in s.items():
        for key in _splits(w):
            out[key] = out.get(key, 0) + c
    return TensorSeries._raw(s.alphabet, s.N, {k: c for k, c in out.items() if c})


def antipode(s: Series) -> Series:
    """Reverse every word and multiply by ``(-1)^degree``."""
    return Series._raw(
        s.alphabet, s.N, {w[::-1]: (-c if len(w) % 2 else c) for w, c in s.items()}
    )


# --- power series in one variable ---------------------------------------------


def exp_coefficients(N: int) -> list[Fraction]:
    return [Fraction(1, math.factorial(j)) for j in range(N + 1)]


def log1p_coefficients(N: int) -> list[Fraction]:
    return [Fraction(0)] + [Fraction((-1) ** (j + 1), j) for j in range(1, N + 1)]


Mul = Callable[[Series, Series], Series]


def apply_entire(h: Sequence | Callable[[int], Fraction], z: Series, mul: Mul = series_mul) -> Series:
    """Evaluate ``sum_j h_j z^j`` up to the truncation order of ``z``.

    ``h`` is a coefficient sequence (missing tail treated as zero) or a function
    ``j -> h_j``.  ``z`` must have zero constant term.
    """
    if z.constant:
        raise ValueError("apply_entire needs a series with zero constant term")
    N = z.N
    if callable(h):
        coeffs = [Fraction(h(j)) for j in range(N + 1)]
    else:
        coeffs = [Fraction(c) for c in list(h)[: N + 1]]
        coeffs += [Fraction(0)] * (N + 1 - len(coeffs))
    one = Series.one(z.alphabet, N)
    result = one.scale(coeffs[N])
    for j in range(N - 1, -1, -1):
        result = mul(result, z) + one.scale(coeffs[j])
    return result


def series_exp(z: Series, mul: Mul = series_mul) -> Series:
    return apply_entire(exp_coefficients(z.N), z, mul)


def series_log(g: Series, mul: Mul = series_mul) -> Series:
    """``log g`` for ``g`` with constant term 1."""
    if g.constant != 1:
        raise ValueError("log needs constant term 1")
    return apply_entire(log1p_coefficients(g.N), g - 1, mul)


def geometric_inverse(s: Series, mul: Mul = series_mul) -> Series:
    """Inverse of a series with constant term 1 via ``sum_k (1 - s)^k``."""
    if s.constant != 1:
        raise ValueError(f"geometric_inverse needs constant term 1, got {s.constant}")
    return apply_entire([1] * (s.N + 1), 1 - s, mul)


def grading_rescale(s: Series, tau) -> Series:
    """Multiply every degree-p coefficient by ``tau**p``."""
    tau = Fraction(tau)
    out = {}
    for w, c in s.items():
        v = c * tau ** len(w) if w else c
        if v:
            out[w] = v
    return Series._raw(s.alphabet, s.N, out)


def ell1_norm_by_degree(s: Series) -> list[Fraction]:
    norms = [Fraction(0)] * (s.N + 1)
    for w, c in s.items():
        norms[len(w)] += abs(c)
    return norms


def change_basis(s: Series, matrix: Sequence[Sequence]) -> Series:
    """Substitute ``letter_k -> sum_j matrix[j][k] letter_j`` (free alphabet only)."""
    if s.alphabet.kind != "free":
        raise ValueError("change_basis acts on free alphabets")
    m = s.alphabet.size
    images = []
    for k in range(m):
        images.append([(j + 1, Fraction(matrix[j][k])) for j in range(m) if matrix[j][k]])
    out: dict = {}
    for w, c in s.items():
        for choice in itertools.product(*(images[x - 1] for x in w)):
            word = tuple(l for l, _ in choice)
            coef = c
            for _, a in choice:
                coef *= a
            out[word] = out.get(word, 0) + coef
    return Series._raw(s.alphabet, s.N, {w: c for w, c in out.items() if c})


# --- JSON interchange -----------------------------------------------------------


def alphabet_to_json(alphabet: Alphabet) -> dict:
    if alphabet.kind == "free":
        return {"kind": "free", "size": alphabet.size}
    return {"kind": "kohno", "n": alphabet.size}


def alphabet_from_json(doc: Mapping) -> Alphabet:
    if not isinstance(doc, Mapping):
        raise ValueError("alphabet: expected an object")
    kind = doc.get("kind")
    key = {"free": "size", "kohno": "n"}.get(kind)
    if key is None:
        raise ValueError(f"alphabet.kind: expected 'free' or 'kohno', got {kind!r}")
    try:
        size = int(doc[key])
    except KeyError:
        raise ValueError(f"alphabet: missing field {key!r}") from None
    except (TypeError, ValueError):
        raise ValueError(f"alphabet.{key}: expected an integer, got {doc[key]!r}") from None
    return Alphabet.free(size) if kind == "free" else Alphabet.kohno(size)


def letter_to_json(letter):
    return list(letter) if isinstance(letter, tuple) else letter


def series_to_json(s: Series) -> dict:
    return {
        "alphabet": alphabet_to_json(s.alphabet),
        "truncation": s.N,
        "terms": [
            {"word": [letter_to_json(x) for x in w], "coeff": str(c)} for w, c in s.terms()
        ],
    }


def series_from_json(doc: Mapping | str) -> Series:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if "alphabet" not in doc:
        raise ValueError("series: missing field 'alphabet'")
    alphabet = alphabet_from_json(doc["alphabet"])
    if "truncation" not in doc:
        raise ValueError("series: missing field 'truncation'")
    N = int(doc["truncation"])
    coeffs: dict = {}
    for k, term in enumerate(doc.get("terms", [])):
        try:
            word = alphabet.normalize_word(term["word"])
            c = Fraction(term["coeff"])
        except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"series: terms[{k}] is malformed ({exc})") from None
        coeffs[word] = coeffs.get(word, 0) + c
    return Series(alphabet, N, coeffs)
