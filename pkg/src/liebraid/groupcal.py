"""Group calculus in completed enveloping algebras.

Ordered exponentials are computed exactly: on each path segment the generator
is a polynomial in local time per word, so ``E' = E gamma`` is integrated
degree by degree with rational polynomial antiderivatives.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .freealg import (
    Alphabet,
    Series,
    alphabet_from_json,
    alphabet_to_json,
    antipode,
    geometric_inverse,
    letter_to_json,
    series_exp,
    series_log,
    series_mul,
    word_key,
)
from .freelie import LieElement, _node_from_json, bracket_expand, is_grouplike
from .kohno import kohno_mul, normal_form

__all__ = [
    "GroupElement",
    "PathSegment",
    "PiecewisePath",
    "multiplication_for",
    "as_series",
    "lie_exp",
    "bch",
    "group_inverse",
    "grouplike_test",
    "ordered_exp",
    "ordered_exp_factorize",
    "path_to_json",
    "path_from_json",
]


def multiplication_for(alphabet: Alphabet):
    return kohno_mul if alphabet.kind == "kohno" else series_mul


def as_series(x: LieElement | Series, N: int) -> Series:
    """Expand a Lie element (normal form for Kohno alphabets)."""
    s = x if isinstance(x, Series) else bracket_expand(x, N)
    if s.N != N:
        s = s.truncate(N) if s.N > N else Series(s.alphabet, N, dict(s.items()))
    return normal_form(s) if s.alphabet.kind == "kohno" else s


def lie_exp(x: LieElement | Series, N: int) -> Series:
    s = as_series(x, N)
    return series_exp(s, multiplication_for(s.alphabet))


def grouplike_test(s: Series) -> bool:
    if s.alphabet.kind == "kohno":
        s = normal_form(s)
    return is_grouplike(s)


@dataclass(frozen=True)
class GroupElement:
    series: Series
    verified: bool = False

    def __post_init__(self):
        if self.series.constant != 1:
            raise ValueError("a group element has constant term 1")

    @classmethod
    def checked(cls, s: Series) -> "GroupElement":
        return cls(s, grouplike_test(s))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        mul = multiplication_for(self.series.alphabet)
        return GroupElement(mul(self.series, other.series), self.verified and other.verified)

    def inverse(self) -> "GroupElement":
        return group_inverse(self)


def bch(x: LieElement | Series, y: LieElement | Series, N: int) -> Series:
    """``log(exp(x) exp(y))`` truncated at ``N``."""
    X, Y = as_series(x, N), as_series(y, N)
    mul = multiplication_for(X.alphabet)
    return series_log(mul(series_exp(X, mul), series_exp(Y, mul)), mul)


def group_inverse(g: GroupElement | Series) -> GroupElement:
    """Antipode of a group-like element; geometric inverse with a warning otherwise."""
    s = g.series if isinstance(g, GroupElement) else g
    kohno = s.alphabet.kind == "kohno"
    if grouplike_test(s):
        inv = antipode(normal_form(s) if kohno else s)
        return GroupElement(normal_form(inv) if kohno else inv, True)
    warnings.warn("input is not group-like; using the geometric-series inverse", RuntimeWarning, stacklevel=2)
    return GroupElement(geometric_inverse(s, multiplication_for(s.alphabet)), False)


# --- polynomials in t with rational coefficients (index = power) -------------------

Poly = tuple


def _poly(values: Iterable) -> Poly:
    p = [Fraction(v) for v in values]
    while p and not p[-1]:
        p.pop()
    return tuple(p)


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    return _poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly(out)


def _pscale(a: Poly, c) -> Poly:
    return _poly(x * c for x in a)


def _pintegrate(a: Poly) -> Poly:
    return _poly([0] + [x / (k + 1) for k, x in enumerate(a)])


def _peval(a: Poly, t: Fraction) -> Fraction:
    acc = Fraction(0)
    for x in reversed(a):
        acc = acc * t + x
    return acc


def _preflect(a: Poly, T: Fraction) -> Poly:
    """``t -> a(T - t)``."""
    out = [Fraction(0)] * len(a)
    for k, x in enumerate(a):
        for i in range(k + 1):
            out[i] += x * comb(k, i) * T ** (k - i) * (-1) ** i
    return _poly(out)


# PolySeries: dict word -> Poly, words of length <= N


def _ps_add_into(acc: dict, word: tuple, p: Poly):
    q = _padd(acc.get(word, ()), p)
    if q:
        acc[word] = q
    else:
        acc.pop(word, None)


def _ps_mul(a: dict, b: dict, N: int) -> dict:
    out: dict = {}
    for u, p in a.items():
        for v, q in b.items():
            if len(u) + len(v) <= N:
                _ps_add_into(out, u + v, _pmul(p, q))
    return out


def _ps_const(s: Series) -> dict:
    return {w: (c,) for w, c in s.items()}


def _ps_eval(a: dict, t: Fraction, alphabet: Alphabet, N: int) -> Series:
    return Series._raw(alphabet, N, {w: v for w, p in a.items() if (v := _peval(p, t))})


def _ps_normal_form(a: dict, alphabet: Alphabet, N: int) -> dict:
    # normal form is linear: apply word by word and carry the polynomial along
    out: dict = {}
    for w, p in a.items():
        nf = normal_form(Series._raw(alphabet, N, {w: Fraction(1)}))
        for u, c in nf.items():
            _ps_add_into(out, u, _pscale(p, c))
    return out


def _ps_antipode(a: dict) -> dict:
    return {w[::-1]: (_pscale(p, -1) if len(w) % 2 else p) for w, p in a.items()}


def _solve_right(gen: dict, N: int) -> dict:
    """Solve ``F' = F gen``, ``F(0) = 1`` degree by degree (concatenation product)."""
    by_deg: dict[int, list] = {}
    for w, p in gen.items():
        if not w:
            raise ValueError("path generator has a constant (degree-0) term")
        by_deg.setdefault(len(w), []).append((w, p))
    levels: list[dict] = [{(): (Fraction(1),)}]
    for j in range(1, N + 1):
        acc: dict = {}
        for i in range(j):
            for v, q in by_deg.get(j - i, ()):
                for u, p in levels[i].items():
                    _ps_add_into(acc, u + v, _pmul(p, q))
        levels.append({w: _pintegrate(p) for w, p in acc.items()})
    out: dict = {}
    for lvl in levels:
        out.update({w: p for w, p in lvl.items() if p})
    return out


# --- paths ------------------------------------------------------------------------


@dataclass(frozen=True)
class PathSegment:
    """``gamma(t) = sum_w poly_w(t) w`` for local time ``t`` in ``[0, duration]``."""

    duration: Fraction
    terms: Mapping  # word -> Poly

    def __post_init__(self):
        if Fraction(self.duration) <= 0:
            raise ValueError("segment duration must be positive")
        for w in self.terms:
            if not w:
                raise ValueError("gamma has no degree-0 component")

    @property
    def max_degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)


class PiecewisePath:
    """A piecewise-polynomial path in the completed Lie algebra."""

    def __init__(self, alphabet: Alphabet, segments: Sequence[PathSegment]):
        self.alphabet = alphabet
        self.segments = tuple(segments)

    @staticmethod
    def segment(
        alphabet: Alphabet,
        duration,
        components: Sequence[tuple[LieElement | Series, Sequence]],
    ) -> PathSegment:
        """Build a segment from ``(element, polynomial-in-t coefficients)`` pairs."""
        terms: dict = {}
        for elem, poly in components:
            if isinstance(elem, LieElement):
                s = bracket_expand(elem, max(elem.max_degree, 1))
            else:
                s = elem
            p = _poly(poly)
            for w, c in s.items():
                _ps_add_into(terms, alphabet.normalize_word(w), _pscale(p, c))
        return PathSegment(Fraction(duration), terms)

    @classmethod
    def constant(cls, x: LieElement | Series, duration=1) -> "PiecewisePath":
        return cls(x.alphabet, [cls.segment(x.alphabet, duration, [(x, [1])])])

    def then(self, other: "PiecewisePath") -> "PiecewisePath":
        if other.alphabet != self.alphabet:
            raise ValueError("alphabet mismatch")
        return PiecewisePath(self.alphabet, self.segments + other.segments)

    def reversed(self) -> "PiecewisePath":
        """Time reversal with negated generator; its ordered exponential is the inverse."""
        segs = []
        for seg in reversed(self.segments):
            T = Fraction(seg.duration)
            segs.append(PathSegment(T, {w: _pscale(_preflect(p, T), -1) for w, p in seg.terms.items()}))
        return PiecewisePath(self.alphabet, segs)

    @property
    def max_degree(self) -> int:
        return max((s.max_degree for s in self.segments), default=0)


def ordered_exp(path: PiecewisePath, N: int) -> GroupElement:
    """Solve ``E' = E gamma``, ``E(0) = 1`` exactly and return ``E`` at the end of the path."""
    if path.max_degree > N:
        raise ValueError(f"path has degree {path.max_degree} > N={N}")
    alphabet = path.alphabet
    mul = multiplication_for(alphabet)
    E = Series.one(alphabet, N)
    for seg in path.segments:
        # solved in the free algebra on the letters, then projected
        F = _ps_eval(_solve_right(dict(seg.terms), N), Fraction(seg.duration), alphabet, N)
        if alphabet.kind == "kohno":
            F = normal_form(F)
        E = mul(E, F)
    return GroupElement(E, False)


def ordered_exp_factorize(path: PiecewisePath, N: int) -> list[GroupElement]:
    """Cascade ``U_1, ..., U_{n-1}`` with ``E = U_{n-1} ... U_1``.

    ``U_j`` lives in block ``n - j`` (letters ``r_{n-j,*}``), so ``U_1`` is the
    one-generator factor and ``U_{n-1}`` the block-1 factor.  Each ``U_j``
    solves ``U_j' = U_j (P gamma_j P^{-1})`` with ``P = U_{j-1} ... U_1``.
    The list is returned in that order: ``[U_1, ..., U_{n-1}]``.
    """
    alphabet = path.alphabet
    if alphabet.kind != "kohno":
        raise ValueError("ordered_exp_factorize needs a Kohno path")
    if path.max_degree > N:
        raise ValueError(f"path has degree {path.max_degree} > N={N}")
    n = alphabet.size
    U = [Series.one(alphabet, N) for _ in range(n - 1)]  # U[j-1] is U_j
    for seg in path.segments:
        T = Fraction(seg.duration)
        gen = _ps_normal_form(dict(seg.terms), alphabet, N)
        parts: dict[int, dict] = {}
        for w, p in gen.items():
            blocks = {x[0] for x in w}
            if len(blocks) != 1:
                raise ValueError(f"generator word {w} mixes blocks; gamma is not a Lie element")
            parts.setdefault(blocks.pop(), {})[w] = p
        current: list[dict] = []  # U_k(t) on this segment
        for j in range(1, n):
            b = n - j
            g = parts.get(b, {})
            if current and g:
                P = current[0]
                for k in range(1, len(current)):
                    P = _ps_normal_form(_ps_mul(current[k], P, N), alphabet, N)
                Pinv = _ps_antipode(current[0])
                for k in range(1, len(current)):
                    Pinv = _ps_normal_form(_ps_mul(Pinv, _ps_antipode(current[k]), N), alphabet, N)
                g = _ps_normal_form(_ps_mul(_ps_mul(P, g, N), Pinv, N), alphabet, N)
                stray = {x[0] for w in g for x in w} - {b}
                if stray:
                    raise ArithmeticError(f"conjugated generator left block {b}: {sorted(stray)}")
            V = _solve_right(g, N) if g else {(): (Fraction(1),)}
            current.append(_ps_mul(_ps_const(U[j - 1]), V, N))
        U = [_ps_eval(u, T, alphabet, N) for u in current]
    return [GroupElement(u, False) for u in U]


# --- JSON -----------------------------------------------------------------------------


def path_to_json(path: PiecewisePath) -> dict:
    segs = []
    for seg in path.segments:
        comps: dict[int, list] = {}
        for w in sorted(seg.terms, key=word_key):
            comps.setdefault(len(w), []).append(
                {"word": [letter_to_json(x) for x in w], "poly": [str(c) for c in seg.terms[w]]}
            )
        segs.append(
            {
                "duration": str(Fraction(seg.duration)),
                "components": [{"degree": d, "terms": comps[d]} for d in sorted(comps)],
            }
        )
    return {"alphabet": alphabet_to_json(path.alphabet), "segments": segs}


def path_from_json(doc: Mapping | str, alphabet: Alphabet | None = None) -> PiecewisePath:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if "alphabet" in doc:
        alphabet = alphabet_from_json(doc["alphabet"])
    if alphabet is None:
        raise ValueError("path: missing field 'alphabet'")
    segs = []
    for si, seg in enumerate(doc.get("segments", [])):
        if "duration" not in seg:
            raise ValueError(f"path: segments[{si}].duration missing")
        terms: dict = {}
        for ci, comp in enumerate(seg.get("components", [])):
            degree = int(comp["degree"])
            for ti, term in enumerate(comp.get("terms", [])):
                where = f"path: segments[{si}].components[{ci}].terms[{ti}]"
                if "poly" not in term:
                    raise ValueError(f"{where}.poly missing")
                p = _poly(Fraction(c) for c in term["poly"])
                if "word" in term:
                    s = {alphabet.normalize_word(term["word"]): Fraction(1)}
                elif "lyndon" in term:
                    lie = LieElement(alphabet, {_node_from_json(term["lyndon"], alphabet): 1})
                    s = dict(bracket_expand(lie, lie.max_degree).items())
                else:
                    raise ValueError(f"{where} needs 'word' or 'lyndon'")
                for w, c in s.items():
                    if len(w) != degree:
                        raise ValueError(f"{where} has degree {len(w)}, component says {degree}")
                    _ps_add_into(terms, w, _pscale(p, c))
        segs.append(PathSegment(Fraction(seg["duration"]), terms))
    return PiecewisePath(alphabet, segs)
