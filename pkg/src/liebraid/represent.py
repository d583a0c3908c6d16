"""Matrix representations of ``br_n`` built from mixed Casimirs.

For a simple Lie algebra with basis ``e_a`` and trace-form dual basis ``e^a``,
``Delta_ij = sum_a e_a^(i) e^a^(j)`` acting on ``V_1 (x) ... (x) V_n`` satisfies
the Kohno relations.  Dual bases keep every entry rational.  Exact matrices
are numpy object arrays of :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg
import sympy

from .freealg import Series
from .freelie import LieElement, bracket_expand

__all__ = [
    "MatrixRep",
    "sl2_irrep",
    "sl2_invariant_form",
    "slm_defining",
    "build_casimir_rep",
    "evaluate",
    "integrate_group_element",
    "unitarity_check",
    "check_kohno_relations",
    "exact_identity",
    "exact_zeros",
    "matrix_to_json",
    "matrix_from_json",
]


def exact_zeros(d: int, e: int | None = None) -> np.ndarray:
    out = np.empty((d, e if e is not None else d), dtype=object)
    out[...] = Fraction(0)
    return out


def exact_identity(d: int) -> np.ndarray:
    out = exact_zeros(d)
    for i in range(d):
        out[i, i] = Fraction(1)
    return out


def _parse_spin(label) -> Fraction:
    j = Fraction(str(label))
    if j < 0 or (2 * j).denominator != 1:
        raise ValueError(f"unsupported sl2 irrep label {label!r}")
    return j


def sl2_irrep(spin) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(e, f, h)`` in the spin-``j`` irrep on ``v_0..v_2j``.

    ``h v_k = (2j - 2k) v_k``, ``f v_k = v_{k+1}``, ``e v_k = k (2j - k + 1) v_{k-1}``.
    """
    j = _parse_spin(spin)
    d = int(2 * j) + 1
    e, f, h = exact_zeros(d), exact_zeros(d), exact_zeros(d)
    for k in range(d):
        h[k, k] = 2 * j - 2 * k
        if k + 1 < d:
            f[k + 1, k] = Fraction(1)
        if k >= 1:
            e[k - 1, k] = k * (2 * j - k + 1)
    return e, f, h


def sl2_invariant_form(spin) -> list[Fraction]:
    """Diagonal Hermitian form making ``e* = f`` in the basis of :func:`sl2_irrep`."""
    j = _parse_spin(spin)
    g = [Fraction(1)]
    for k in range(1, int(2 * j) + 1):
        g.append(g[-1] * k * (2 * j - k + 1))
    return g


def slm_defining(m: int) -> list[np.ndarray]:
    """A basis of ``sl_m`` in its defining representation: ``E_ij`` (i != j) then ``E_kk - E_k+1,k+1``."""
    basis = []
    for i, j in itertools.permutations(range(m), 2):
        E = exact_zeros(m)
        E[i, j] = Fraction(1)
        basis.append(E)
    for k in range(m - 1):
        H = exact_zeros(m)
        H[k, k], H[k + 1, k + 1] = Fraction(1), Fraction(-1)
        basis.append(H)
    return basis


def _trace(a: np.ndarray) -> Fraction:
    return sum((a[i, i] for i in range(a.shape[0])), Fraction(0))


def _dual_basis(basis: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Dual basis with respect to ``(x, y) -> tr(x y)`` in the given matrices."""
    k = len(basis)
    gram = sympy.Matrix(k, k, lambda a, b: sympy.Rational(str(_trace(basis[a].dot(basis[b])))))
    inv = gram.inv()
    dual = []
    for a in range(k):
        acc = exact_zeros(basis[0].shape[0])
        for b in range(k):
            c = Fraction(str(inv[a, b]))
            if c:
                acc = acc + basis[b] * c
        dual.append(acc)
    return dual


def _kron_chain(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@dataclass(frozen=True)
class MatrixRep:
    """Exact matrices ``Delta_ij`` for every pair ``i < j`` on a tensor-product space."""

    n: int
    dim: int
    deltas: dict
    algebra: str = "custom"
    factors: tuple = ()
    twist: complex | Fraction | None = None
    form: tuple = field(default=(), repr=False)  # diagonal invariant Hermitian form, if known

    def delta(self, i: int, j: int) -> np.ndarray:
        return self.deltas[(min(i, j), max(i, j))]

    def with_delta(self, pair: tuple, matrix: np.ndarray) -> "MatrixRep":
        deltas = dict(self.deltas)
        deltas[pair] = matrix
        return MatrixRep(self.n, self.dim, deltas, self.algebra, self.factors, self.twist, self.form)

    def float_deltas(self) -> dict:
        scale = complex(self.twist) if self.twist is not None else 1.0
        return {k: scale * v.astype(float) for k, v in self.deltas.items()}


def build_casimir_rep(algebra: str, factors: Sequence, n: int | None = None) -> MatrixRep:
    """Mixed-Casimir representation of ``br_n`` on a tensor product of irreps.

    ``algebra`` is ``"sl2"`` (factor labels are spins such as ``"1/2"``, ``1``,
    ``"3/2"``) or ``"slM"`` / ``"sl_M"`` (factors must all be ``"defining"``).
    """
    factors = tuple(str(f) for f in factors)
    if n is None:
        n = len(factors)
    if len(factors) != n:
        raise ValueError(f"expected {n} factor labels, got {len(factors)}")
    if n < 2:
        raise ValueError("need at least two tensor factors")
    if algebra == "sl2":
        reps = []
        for label in factors:
            j = _parse_spin(label)
            if j > Fraction(3, 2) or j == 0:
                raise ValueError(f"unsupported sl2 spin {label!r} (supported: 1/2, 1, 3/2)")
            reps.append(list(sl2_irrep(j)))
        # trace form on sl2 (defining rep): dual pairs e<->f, h<->h/2
        duals = [[r[1], r[0], r[2] * Fraction(1, 2)] for r in reps]
        form = []
        for g in itertools.product(*(sl2_invariant_form(f) for f in factors)):
            prod = Fraction(1)
            for x in g:
                prod *= x
            form.append(prod)
    else:
        m = _parse_slm(algebra)
        if any(f not in ("defining", "fund", "1") for f in factors):
            raise ValueError(f"{algebra}: only the defining representation is supported")
        basis = slm_defining(m)
        reps = [basis] * n
        duals = [_dual_basis(basis)] * n
        form = [Fraction(1)] * (m**n)
    dims = [r[0].shape[0] for r in reps]
    eyes = [exact_identity(d) for d in dims]
    total = int(np.prod(dims))
    deltas = {}
    for i, j in itertools.combinations(range(n), 2):
        acc = exact_zeros(total)
        for a in range(len(reps[i])):
            mats = list(eyes)
            mats[i] = reps[i][a]
            mats[j] = duals[j][a]
            acc = acc + _kron_chain(mats)
        deltas[(i + 1, j + 1)] = acc
    return MatrixRep(n, total, deltas, algebra, factors, None, tuple(form))


def _parse_slm(algebra: str) -> int:
    name = algebra.replace("_", "")
    if name.startswith("sl") and name[2:].isdigit() and int(name[2:]) >= 2:
        return int(name[2:])
    raise ValueError(f"unsupported algebra {algebra!r}")


def evaluate(s: Series, rep: MatrixRep) -> np.ndarray:
    """Substitute ``Delta_ij`` for ``r_ij`` in every word and sum, exactly."""
    if s.alphabet.kind != "kohno" or s.alphabet.size != rep.n:
        raise ValueError("series and representation disagree on n")
    # clear denominators once so word products run on Python ints
    den = math.lcm(*(Fraction(x).denominator for M in rep.deltas.values() for x in M.flat))
    ints = {pair: np.array([[int(Fraction(x) * den) for x in row] for row in M], dtype=object)
            for pair, M in rep.deltas.items()}
    eye = np.array([[int(i == j) for j in range(rep.dim)] for i in range(rep.dim)], dtype=object)
    cache: dict = {(): eye}

    def word_matrix(w: tuple) -> np.ndarray:
        if w not in cache:
            cache[w] = word_matrix(w[:-1]).dot(ints[w[-1]])
        return cache[w]

    acc = exact_zeros(rep.dim)
    for w, c in sorted(s.items(), key=lambda kv: len(kv[0])):
        acc = acc + word_matrix(w) * (Fraction(c) / den ** len(w))
    return acc


def integrate_group_element(
    factors: Sequence[LieElement | Series], rep: MatrixRep, twist: complex | None = None
) -> np.ndarray:
    """``prod_k expm(rho(x_k))`` in double precision (scipy's Pade expm, ~1e-14 relative).

    ``twist`` multiplies every generator, e.g. ``1j`` for the anti-Hermitian form.
    """
    U = np.eye(rep.dim, dtype=complex)
    fd = rep.float_deltas()
    tw = 1.0 if twist is None else complex(twist)
    for x in factors:
        s = x if isinstance(x, Series) else bracket_expand(x, max(x.max_degree, 1))
        M = np.zeros((rep.dim, rep.dim), dtype=complex)
        for w, c in s.items():
            if not w:
                raise ValueError("Lie elements have no constant term")
            W = np.eye(rep.dim, dtype=complex)
            for letter in w:
                W = W @ (tw * fd[letter])
            M += float(c) * W
        U = U @ scipy.linalg.expm(M)
    return U


def unitarity_check(
    factors: Sequence[LieElement | Series], rep: MatrixRep, imaginary_twist: bool = True, tol: float = 1e-10
) -> dict:
    """Integrate with generators ``i*Delta`` (or ``Delta``) and test unitarity.

    Unitarity is measured after conjugating by the square root of the
    invariant Hermitian form, so that the compact real form acts by
    anti-Hermitian matrices.
    """
    U = integrate_group_element(factors, rep, 1j if imaginary_twist else None)
    if rep.form:
        g = np.sqrt(np.array([float(x) for x in rep.form]))
        U = (g[:, None] * U) / g[None, :]
    dev = float(np.max(np.abs(U.conj().T @ U - np.eye(rep.dim))))
    return {"unitary": dev < tol, "deviation": dev, "tolerance": tol}


def _commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a.dot(b) - b.dot(a)


def _max_abs(a: np.ndarray):
    return max((abs(x) for x in a.flat), default=0)


def check_kohno_relations(rep: MatrixRep) -> dict:
    """Exhaustively test ``[D_ij, D_kl] = 0`` (disjoint) and ``[D_ij, D_ik + D_jk] = 0``.

    Also checks that ``sum_{i<j} D_ij`` commutes with every ``D_ij``.
    """
    failures = []
    checked = 0
    worst = Fraction(0)
    pairs = list(itertools.combinations(range(1, rep.n + 1), 2))
    for (i, j), (k, l) in itertools.combinations(pairs, 2):
        if len({i, j, k, l}) == 4:
            dev = _max_abs(_commutator(rep.delta(i, j), rep.delta(k, l)))
            checked += 1
            worst = max(worst, dev)
            if dev:
                failures.append({"relation": f"[r{i}{j}, r{k}{l}] = 0", "deviation": str(dev)})
    for i, j in pairs:
        for k in range(1, rep.n + 1):
            if k in (i, j):
                continue
            dev = _max_abs(_commutator(rep.delta(i, j), rep.delta(i, k) + rep.delta(j, k)))
            checked += 1
            worst = max(worst, dev)
            if dev:
                a, b = sorted((i, k)), sorted((j, k))
                failures.append(
                    {
                        "relation": f"[r{i}{j}, r{a[0]}{a[1]} + r{b[0]}{b[1]}] = 0",
                        "deviation": str(dev),
                    }
                )
    total = sum((rep.delta(i, j) for i, j in pairs[1:]), rep.delta(*pairs[0]))
    central_dev = Fraction(0)
    for i, j in pairs:
        dev = _max_abs(_commutator(total, rep.delta(i, j)))
        checked += 1
        central_dev = max(central_dev, dev)
        if dev:
            failures.append({"relation": f"[sum Delta, r{i}{j}] = 0", "deviation": str(dev)})
    worst = max(worst, central_dev)
    return {
        "pass": not failures,
        "checked": checked,
        "max_deviation": str(worst),
        "central_sum_deviation": str(central_dev),
        "failures": failures,
    }


def matrix_to_json(M: np.ndarray) -> dict:
    if M.dtype == object:
        return {"kind": "exact", "rows": [[str(Fraction(x)) for x in row] for row in M]}
    if np.iscomplexobj(M):
        return {
            "kind": "complex",
            "real": [[float(x) for x in row] for row in M.real],
            "imag": [[float(x) for x in row] for row in M.imag],
        }
    return {"kind": "float", "rows": [[float(x) for x in row] for row in M]}


def matrix_from_json(doc: dict) -> np.ndarray:
    kind = doc.get("kind")
    if kind == "exact":
        rows = doc["rows"]
        out = exact_zeros(len(rows), len(rows[0]) if rows else 0)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                out[i, j] = Fraction(x)
        return out
    if kind == "complex":
        return np.array(doc["real"], dtype=float) + 1j * np.array(doc["imag"], dtype=float)
    if kind == "float":
        return np.array(doc["rows"], dtype=float)
    raise ValueError(f"matrix: unknown kind {kind!r}")
