"""Exact linear Poisson brackets on polynomial algebras.

Two structures are supported:

* ``so3^n``: variables ``x_i, y_i, z_i`` with ``{x,y} = z``, ``{y,z} = x``,
  ``{z,x} = y`` inside each particle and zero between particles;
* ``gl(m)``: variables ``x_ij`` with ``{x_ij, x_kl} = d_jk x_il - d_li x_kj``.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Mapping

__all__ = [
    "PoissonStructure",
    "PolyFunction",
    "poisson_bracket",
    "build_hamiltonians",
    "verify_kohno_poisson",
    "hamiltonian_vector_field",
    "poly_to_json",
    "poly_from_json",
]


class PoissonStructure:
    """Variables plus the table of brackets between coordinate functions."""

    def __init__(self, kind: str, size: int):
        if kind == "so3":
            if size < 1:
                raise ValueError("so3^n needs n >= 1")
            self.variables = tuple(f"{c}{i}" for i in range(1, size + 1) for c in "xyz")
        elif kind == "gl":
            if size < 1:
                raise ValueError("gl(m) needs m >= 1")
            self.variables = tuple(f"x{i}_{j}" for i in range(1, size + 1) for j in range(1, size + 1))
        else:
            raise ValueError(f"unknown Poisson structure {kind!r}")
        self.kind = kind
        self.size = size
        self.index = {v: k for k, v in enumerate(self.variables)}
        self._table: dict[tuple[int, int], "PolyFunction"] = {}
        self._build_table()

    @property
    def name(self) -> str:
        return f"so3^{self.size}" if self.kind == "so3" else f"gl({self.size})"

    @classmethod
    def from_name(cls, name: str) -> "PoissonStructure":
        if name.startswith("so3^"):
            return cls("so3", int(name[4:]))
        if name.startswith("gl(") and name.endswith(")"):
            return cls("gl", int(name[3:-1]))
        raise ValueError(f"unknown structure name {name!r}")

    def __eq__(self, other):
        return isinstance(other, PoissonStructure) and (self.kind, self.size) == (other.kind, other.size)

    def __hash__(self):
        return hash((self.kind, self.size))

    def var(self, name: str) -> "PolyFunction":
        exps = [0] * len(self.variables)
        exps[self.index[name]] = 1
        return PolyFunction(self, {tuple(exps): 1})

    def gl_var(self, i: int, j: int) -> "PolyFunction":
        return self.var(f"x{i}_{j}")

    def _build_table(self):
        nv = len(self.variables)
        if self.kind == "so3":
            for p in range(self.size):
                x, y, z = 3 * p, 3 * p + 1, 3 * p + 2
                for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                    self._table[(a, b)] = self._linear(c, 1)
                    self._table[(b, a)] = self._linear(c, -1)
        else:
            m = self.size
            for i, j, k, l in itertools.product(range(1, m + 1), repeat=4):
                terms: dict = {}
                if j == k:
                    e = self._unit(f"x{i}_{l}")
                    terms[e] = terms.get(e, 0) + 1
                if l == i:
                    e = self._unit(f"x{k}_{j}")
                    terms[e] = terms.get(e, 0) - 1
                f = PolyFunction(self, terms)
                if not f.is_zero():
                    self._table[(self.index[f"x{i}_{j}"], self.index[f"x{k}_{l}"])] = f
        self.zero = PolyFunction(self, {})
        self.nvars = nv

    def _unit(self, name: str) -> tuple:
        exps = [0] * len(self.variables)
        exps[self.index[name]] = 1
        return tuple(exps)

    def _linear(self, k: int, c) -> "PolyFunction":
        exps = [0] * len(self.variables)
        exps[k] = 1
        return PolyFunction(self, {tuple(exps): c})

    def coordinate_bracket(self, a: int, b: int) -> "PolyFunction":
        return self._table.get((a, b), self.zero)


class PolyFunction:
    """Commutative polynomial: exponent tuple -> exact rational coefficient."""

    __slots__ = ("structure", "terms")

    def __init__(self, structure: PoissonStructure, terms: Mapping | None = None):
        self.structure = structure
        self.terms = {tuple(e): Fraction(c) for e, c in (terms or {}).items() if c}

    @classmethod
    def constant(cls, structure: PoissonStructure, c) -> "PolyFunction":
        return cls(structure, {(0,) * len(structure.variables): c})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "PolyFunction"):
        if self.structure != other.structure:
            raise ValueError(f"structure mismatch: {self.structure.name} vs {other.structure.name}")

    def __add__(self, other):
        if not isinstance(other, PolyFunction):
            other = PolyFunction.constant(self.structure, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return PolyFunction(self.structure, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyFunction(self.structure, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PolyFunction):
            return PolyFunction(self.structure, {e: c * Fraction(other) for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return PolyFunction(self.structure, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolyFunction):
            return NotImplemented
        return self.structure == other.structure and self.terms == other.terms

    def derivative(self, k: int) -> "PolyFunction":
        out: dict = {}
        for e, c in self.terms.items():
            if e[k]:
                e2 = e[:k] + (e[k] - 1,) + e[k + 1 :]
                out[e2] = out.get(e2, 0) + c * e[k]
        return PolyFunction(self.structure, out)

    def variables_used(self) -> set:
        return {k for e in self.terms for k, x in enumerate(e) if x}

    def __call__(self, point) -> float:
        """Evaluate at a sequence of coordinates or a mapping from variable names."""
        if isinstance(point, Mapping):
            point = [point[v] for v in self.structure.variables]
        total = 0.0
        for e, c in self.terms.items():
            term = float(c)
            for k, x in enumerate(e):
                if x:
                    term *= point[k] ** x
            total += term
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        names = self.structure.variables
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(n if x == 1 else f"{n}^{x}" for n, x in zip(names, e) if x)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def poisson_bracket(f: PolyFunction, g: PolyFunction) -> PolyFunction:
    """``{f, g} = sum_{a,b} {u_a, u_b} df/du_a dg/du_b``."""
    f._check(g)
    st = f.structure
    out = st.zero
    df = {a: f.derivative(a) for a in f.variables_used()}
    dg = {b: g.derivative(b) for b in g.variables_used()}
    for a, fa in df.items():
        for b, gb in dg.items():
            br = st.coordinate_bracket(a, b)
            if not br.is_zero():
                out = out + br * fa * gb
    return out


def build_hamiltonians(structure: PoissonStructure) -> dict:
    """``Delta_ij`` for ``i < j``: ``<r_i, r_j>`` on so3^n, ``2 x_ij x_ji`` on gl(m)."""
    H = {}
    for i, j in itertools.combinations(range(1, structure.size + 1), 2):
        if structure.kind == "so3":
            H[(i, j)] = sum(
                (structure.var(f"{c}{i}") * structure.var(f"{c}{j}") for c in "xyz"), structure.zero
            )
        else:
            H[(i, j)] = structure.gl_var(i, j) * structure.gl_var(j, i) * 2
    return H


def verify_kohno_poisson(structure: PoissonStructure, hamiltonians: Mapping | None = None) -> dict:
    """Exact check of both relation families among the ``Delta_ij`` under the bracket."""
    H = dict(hamiltonians) if hamiltonians is not None else build_hamiltonians(structure)
    n = structure.size

    def D(a, b):
        return H[(min(a, b), max(a, b))]

    failures = []
    checked = 0
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for p, q in itertools.combinations(pairs, 2):
        if len(set(p) | set(q)) == 4:
            checked += 1
            br = poisson_bracket(D(*p), D(*q))
            if not br.is_zero():
                failures.append({"relation": f"{{D{p[0]}{p[1]}, D{q[0]}{q[1]}}} = 0", "bracket": repr(br)})
    for i, j in pairs:
        for k in range(1, n + 1):
            if k in (i, j):
                continue
            checked += 1
            br = poisson_bracket(D(i, j), D(i, k) + D(j, k))
            if not br.is_zero():
                a, b = sorted((i, k)), sorted((j, k))
                failures.append(
                    {"relation": f"{{D{i}{j}, D{a[0]}{a[1]} + D{b[0]}{b[1]}}} = 0", "bracket": repr(br)}
                )
    return {"structure": structure.name, "pass": not failures, "checked": checked, "failures": failures}


def hamiltonian_vector_field(H: PolyFunction) -> dict:
    """``v -> {v, H}`` for every coordinate ``v``."""
    st = H.structure
    return {name: poisson_bracket(st.var(name), H) for name in st.variables}


def poly_to_json(f: PolyFunction) -> dict:
    names = f.structure.variables
    terms = []
    for e, c in sorted(f.terms.items(), key=lambda kv: (sum(kv[0]), [-x for x in kv[0]])):
        terms.append({"exps": {names[k]: x for k, x in enumerate(e) if x}, "coeff": str(c)})
    return {"structure": f.structure.name, "terms": terms}


def poly_from_json(doc: Mapping | str) -> PolyFunction:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if "structure" not in doc:
        raise ValueError("poly: missing field 'structure'")
    st = PoissonStructure.from_name(doc["structure"])
    terms: dict = {}
    for k, term in enumerate(doc.get("terms", [])):
        exps = [0] * len(st.variables)
        try:
            for name, x in term.get("exps", {}).items():
                exps[st.index[name]] = int(x)
            c = Fraction(term["coeff"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"poly: terms[{k}] is malformed ({exc})") from None
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + c
    return PolyFunction(st, terms)
