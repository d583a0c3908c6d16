"""Norms and growth diagnostics for the completion classes of ``U(g)``.

Everything is exact except the quotient norm, which is a linear program
(L1 minimisation over the graded component of the relation ideal).  Growth
classification is a diagnostic at a finite truncation, never a proof.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .freealg import Alphabet, Series, ell1_norm_by_degree, series_mul, word_key

__all__ = [
    "kohno_relations",
    "ideal_graded_basis",
    "QuotientNorm",
    "quotient_norm",
    "seminorm_family",
    "shriek_norm",
    "GrowthReport",
    "growth_classify",
    "log_summand",
    "LP_TOLERANCE",
]

LP_TOLERANCE = 1e-9


def kohno_relations(n: int) -> list[dict]:
    """Defining quadratic relations of ``U(br_n)`` as free-algebra elements (word -> coeff)."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    rels = []
    for p, q in itertools.combinations(pairs, 2):
        if len(set(p) | set(q)) == 4:
            rels.append({(p, q): 1, (q, p): -1})

    def r(a, b):
        return (min(a, b), max(a, b))

    for i, j in pairs:
        for k in range(1, n + 1):
            if k in (i, j):
                continue
            # [r_ij, r_ik + r_jk]
            rel: dict = {}
            for other in (r(i, k), r(j, k)):
                rel[((i, j), other)] = rel.get(((i, j), other), 0) + 1
                rel[(other, (i, j))] = rel.get((other, (i, j)), 0) - 1
            rels.append(rel)
    return rels


def ideal_graded_basis(n: int, p: int) -> list[Series]:
    """Spanning set ``u * rho * v`` (``deg u + 2 + deg v = p``) of the degree-``p`` ideal component."""
    if p < 2:
        raise ValueError("relations are quadratic: p >= 2")
    alphabet = Alphabet.kohno(n)
    if n == 2:
        return []
    rels = kohno_relations(n)
    out = []
    for left in range(p - 1):
        right = p - 2 - left
        for u in alphabet.words(left):
            for v in alphabet.words(right):
                for rel in rels:
                    out.append(Series._raw(alphabet, p, {u + w + v: Fraction(c) for w, c in rel.items()}))
    return out


@dataclass
class QuotientNorm:
    value: float | Fraction
    status: str
    ell1: Fraction
    degree: int

    @property
    def ok(self) -> bool:
        return self.status in ("exact", "optimal")


def quotient_norm(z: Series, algebra: Alphabet | None = None) -> QuotientNorm:
    """``inf ||z + j||_1`` over ``j`` in the degree-``p`` ideal component.

    ``z`` must be homogeneous.  For a free alphabet (or ``br_2``) the ideal is
    zero and the value is the exact l1 norm.  Otherwise HiGHS solves the LP;
    an LP failure or a value outside ``[0, ||z||_1]`` is reported in ``status``.
    """
    alphabet = algebra or z.alphabet
    degrees = {len(w) for w in z}
    if len(degrees) > 1:
        raise ValueError("quotient_norm needs a homogeneous element")
    p = degrees.pop() if degrees else 0
    ell1 = sum((abs(c) for _, c in z.items()), Fraction(0))
    if alphabet.kind == "free" or alphabet.size == 2 or p < 2:
        return QuotientNorm(ell1, "exact", ell1, p)
    gens = ideal_graded_basis(alphabet.size, p)
    words = sorted({w for g in gens for w in g} | set(z), key=word_key)
    index = {w: i for i, w in enumerate(words)}
    W, K = len(words), len(gens)
    J = np.zeros((W, K))
    for k, g in enumerate(gens):
        for w, c in g.items():
            J[index[w], k] = float(c)
    zv = np.zeros(W)
    for w, c in z.items():
        zv[index[w]] = float(c)
    # variables [lambda (free, K), t (>= 0, W)]: min sum t, -t <= z + J lambda <= t
    I = np.eye(W)
    A_ub = np.block([[J, -I], [-J, -I]])
    b_ub = np.concatenate([-zv, zv])
    cost = np.concatenate([np.zeros(K), np.ones(W)])
    bounds = [(None, None)] * K + [(0, None)] * W
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return QuotientNorm(float("nan"), f"lp-failure: {res.message}", ell1, p)
    value = float(res.fun)
    if value < -LP_TOLERANCE or value > float(ell1) + LP_TOLERANCE:
        return QuotientNorm(value, "inconsistent", ell1, p)
    return QuotientNorm(max(value, 0.0), "optimal", ell1, p)


def seminorm_family(z: Series, base, N: int | None = None) -> Fraction:
    """``max_{p <= N} ||z^[p]|| * base^p``; ``base`` is a rational stand-in for ``e^C``."""
    base = Fraction(base)
    norms = ell1_norm_by_degree(z)[: (z.N if N is None else N) + 1]
    return max((c * base**p for p, c in enumerate(norms)), default=Fraction(0))


def shriek_norm(z: Series, a, N: int | None = None) -> Fraction:
    """``max_{p <= N} ||z^[p]|| * p! * a^(-p)``."""
    a = Fraction(a)
    if a <= 0:
        raise ValueError("shriek_norm needs a > 0")
    norms = ell1_norm_by_degree(z)[: (z.N if N is None else N) + 1]
    return max((c * math.factorial(p) / a**p for p, c in enumerate(norms)), default=Fraction(0))


SHRIEK_TAG = "U-shriek candidate with radius estimate {a:.4g}"
FAILS_SHRIEK = "fails U-shriek growth"
CIRCLE_TAG = "U-circle candidate"
FAILS_CIRCLE = "fails U-circle growth"
INCONCLUSIVE = "inconclusive"

# log-log slope of the radius estimates (||z^[p]|| p!)^(1/p) against p
SLOPE_FLAT = 0.15
# slope of log ||z^[p]||^(1/p) against log p; super-exponential decay keeps it clearly negative
ROOT_DECAY = -0.15


@dataclass
class GrowthReport:
    truncation: int
    norms: list
    tag: str
    radius_estimate: float | None
    shriek_slope: float | None
    circle_tag: str
    root_slope: float | None
    tracked: dict = field(default_factory=dict)
    caveat: str = ""

    def to_json(self) -> dict:
        return {
            "truncation": self.truncation,
            "phi_coefficients": [str(x) for x in self.norms],
            "tag": self.tag,
            "radius_estimate": self.radius_estimate,
            "shriek_slope": self.shriek_slope,
            "circle_tag": self.circle_tag,
            "root_slope": self.root_slope,
            "tracked": {k: [str(c) for c in v] for k, v in self.tracked.items()},
            "caveat": self.caveat,
        }


def _fit_slope(xs, ys) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    x = x - x.mean()
    return float((x * (y - y.mean())).sum() / (x * x).sum())


def growth_classify(z: Series, N: int | None = None, track: dict | None = None) -> GrowthReport:
    """Fit the per-degree l1 norms against factorial and root-test growth.

    The shriek test uses ``a_p = (||z^[p]|| p!)^(1/p)``: a flat tail (log-log
    slope below ``SLOPE_FLAT``) reads as factorial decay with radius ``a``; a
    growing tail fails.  The circle test fits ``log ||z^[p]||^(1/p)`` against
    ``log p`` on the upper half of the support.  ``track`` maps labels to
    word sequences whose coefficients are copied into the report.
    """
    N = z.N if N is None else N
    if N < 4:
        raise ValueError("growth_classify needs N >= 4")
    norms = ell1_norm_by_degree(z)[: N + 1]
    support = [p for p in range(1, N + 1) if norms[p]]
    tail = support[len(support) // 2 :] if len(support) >= 4 else support
    caveat = f"diagnostic at truncation N={N}; membership cannot be decided from finitely many degrees"
    tracked = {label: [z[w] for w in words] for label, words in (track or {}).items()}
    if len(tail) < 2:
        return GrowthReport(N, norms, INCONCLUSIVE, None, None, INCONCLUSIVE, None, tracked, caveat)
    log_radius = [(math.log(norms[p]) + math.lgamma(p + 1)) / p for p in tail]
    slope = _fit_slope([math.log(p) for p in tail], log_radius)
    log_root = [math.log(norms[p]) / p for p in tail]
    root_slope = _fit_slope([math.log(p) for p in tail], log_root)
    circle = CIRCLE_TAG if root_slope < ROOT_DECAY else FAILS_CIRCLE
    if slope < SLOPE_FLAT:
        radius = math.exp(log_radius[-1])
        return GrowthReport(N, norms, SHRIEK_TAG.format(a=radius), radius, slope, circle, root_slope, tracked, caveat)
    return GrowthReport(N, norms, FAILS_SHRIEK, None, slope, circle, root_slope, tracked, caveat)


def log_summand(z: Series, m: int) -> Series:
    """The ``m``-th term ``(-1)^(m+1) (z - 1)^m / m`` of ``log z``.

    ``log z`` is the sum of these over ``m >= 1``; a single coefficient of
    ``log z`` usually collects contributions from several ``m``.
    """
    if z.constant != 1:
        raise ValueError("log_summand needs constant term 1")
    if m < 1:
        raise ValueError("m >= 1 required")
    x = z - Series.one(z.alphabet, z.N)
    power = x
    for _ in range(m - 1):
        power = series_mul(power, x)
    return power.scale(Fraction((-1) ** (m + 1), m))
