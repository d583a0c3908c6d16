"""Numerical layer: KZ monodromy of pure-braid loops and Hamiltonian spin flows.

Loop convention (recorded in ``ConfigLoop.metadata``): the base point is
``xi_j = j`` on the real axis.  The generator ``A_rs`` moves point ``s``
straight up to ``s + i/2``, left to ``r + 1/4 + i/2``, down to ``r + 1/4``,
once counterclockwise around ``r`` on the circle of radius 1/4, and back the
same way.  Monodromy solves ``E' = E * Omega`` so that the monodromy of a
concatenated loop is the product in the same order.  With these choices the
four pure-braid relation families hold as written and ``A_12 A_13 A_23`` is
central for ``n = 3``; passing below instead (still counterclockwise) breaks
both.
"""

from __future__ import annotations

import cmath
import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import logm

from . import kernels
from .represent import MatrixRep

__all__ = [
    "LoopSegment",
    "ConfigLoop",
    "pure_braid_loop",
    "unit_circle_loop",
    "trivial_rep",
    "kz_monodromy",
    "pure_braid_monodromies",
    "check_pure_braid_relations",
    "leading_log_check",
    "SphereConfig",
    "FlowResult",
    "parse_hamiltonian",
    "klyachko_flow",
    "rk4_halving_ratio",
    "random_configs",
    "flow_compose_check",
    "loop_to_json",
    "loop_from_json",
]

LOOP_CONVENTION = (
    "base xi_j = j; A_rs: point s rises to s + i/2, runs left to r + 1/4 + i/2, drops to r + 1/4, "
    "circles r counterclockwise at radius 1/4, then retraces; E' = E * Omega"
)


def _cq(z) -> complex:
    return complex(float(z[0]), float(z[1]))


def _frac_pair(z) -> tuple:
    if isinstance(z, complex):
        return (Fraction(z.real), Fraction(z.imag))
    return (Fraction(z[0]), Fraction(z[1]))


@dataclass(frozen=True)
class LoopSegment:
    """One point moving along a straight line or a circular arc, others fixed.

    Lines run ``start -> end``.  Arcs run around ``center`` at ``radius``
    from angle ``2 pi start_turn`` through ``turns`` full turns (negative is
    clockwise).  All data is rational.
    """

    point: int
    kind: str
    start: tuple = (Fraction(0), Fraction(0))
    end: tuple = (Fraction(0), Fraction(0))
    center: tuple = (Fraction(0), Fraction(0))
    radius: Fraction = Fraction(0)
    start_turn: Fraction = Fraction(0)
    turns: Fraction = Fraction(0)

    @classmethod
    def line(cls, point: int, start, end) -> "LoopSegment":
        return cls(point, "line", start=_frac_pair(start), end=_frac_pair(end))

    @classmethod
    def arc(cls, point: int, center, radius, start_turn, turns) -> "LoopSegment":
        if Fraction(radius) <= 0:
            raise ValueError("arc radius must be positive")
        return cls(
            point, "arc", center=_frac_pair(center), radius=Fraction(radius),
            start_turn=Fraction(start_turn), turns=Fraction(turns),
        )

    def endpoints(self) -> tuple[complex, complex]:
        if self.kind == "line":
            return _cq(self.start), _cq(self.end)
        c = _cq(self.center)
        r = float(self.radius)
        a0 = 2 * math.pi * float(self.start_turn)
        a1 = a0 + 2 * math.pi * float(self.turns)
        return c + r * cmath.exp(1j * a0), c + r * cmath.exp(1j * a1)

    def reversed(self) -> "LoopSegment":
        if self.kind == "line":
            return LoopSegment.line(self.point, self.end, self.start)
        return LoopSegment.arc(self.point, self.center, self.radius, self.start_turn + self.turns, -self.turns)

    def kernel_params(self, warp: float) -> np.ndarray:
        if self.kind == "line":
            a, b = _cq(self.start), _cq(self.end)
            return np.array([0.0, a.real, a.imag, b.real, b.imag, 0.0, warp])
        c = _cq(self.center)
        return np.array([
            1.0, c.real, c.imag, float(self.radius),
            2 * math.pi * float(self.start_turn), 2 * math.pi * float(self.turns), warp,
        ])

    def sample(self, u: np.ndarray, warp: float = 0.0) -> np.ndarray:
        phi = u - warp * np.sin(2 * np.pi * u) / (2 * np.pi)
        if self.kind == "line":
            a, b = _cq(self.start), _cq(self.end)
            return a + (b - a) * phi
        c = _cq(self.center)
        ang = 2 * np.pi * (float(self.start_turn) + float(self.turns) * phi)
        return c + float(self.radius) * np.exp(1j * ang)


@dataclass
class ConfigLoop:
    """A closed loop in the configuration space of ``n`` distinct points of C.

    ``warp`` in ``[0, 1)`` reparametrizes every segment by
    ``u -> u - warp sin(2 pi u) / (2 pi)``; the monodromy must not depend on it.
    """

    n: int
    base: tuple
    segments: tuple
    warp: float = 0.0
    metadata: dict = field(default_factory=dict)
    min_separation: float = 0.1

    def __post_init__(self):
        self.base = tuple(_frac_pair(b) for b in self.base)
        self.segments = tuple(self.segments)
        if len(self.base) != self.n:
            raise ValueError(f"base point has {len(self.base)} entries, expected {self.n}")
        if not 0 <= self.warp < 1:
            raise ValueError("warp must lie in [0, 1)")
        self.validate()

    def positions(self) -> list[complex]:
        return [_cq(b) for b in self.base]

    def validate(self) -> None:
        pos = self.positions()
        for k, seg in enumerate(self.segments):
            if not 1 <= seg.point <= self.n:
                raise ValueError(f"segment {k}: point {seg.point} out of range")
            a, b = seg.endpoints()
            if abs(a - pos[seg.point - 1]) > 1e-12:
                raise ValueError(f"segment {k} does not start at the current position of point {seg.point}")
            pos[seg.point - 1] = b
        if max(abs(p - q) for p, q in zip(pos, self.positions())) > 1e-12:
            raise ValueError("loop does not close: final configuration differs from the base point")
        sep = self.separation()
        if sep <= self.min_separation:
            raise ValueError(f"points come within {sep:.3g} of each other (minimum {self.min_separation})")

    def _walk(self, samples: int = 400):
        """Yield, per segment, the moving point's samples and the fixed positions."""
        pos = self.positions()
        u = np.linspace(0.0, 1.0, samples)
        for seg in self.segments:
            traj = seg.sample(u, self.warp)
            yield seg, traj, list(pos)
            pos[seg.point - 1] = seg.endpoints()[1]

    def separation(self, samples: int = 400) -> float:
        best = math.inf
        base = self.positions()
        for p, q in itertools.combinations(base, 2):
            best = min(best, abs(p - q))
        for seg, traj, pos in self._walk(samples):
            for l, q in enumerate(pos):
                if l != seg.point - 1:
                    best = min(best, float(np.abs(traj - q).min()))
        return best

    def winding_numbers(self, samples: int = 2000) -> dict:
        """Winding number of ``mu_l - mu_k`` for every pair ``k < l``."""
        total = {pair: 0.0 for pair in itertools.combinations(range(1, self.n + 1), 2)}
        for seg, traj, pos in self._walk(samples):
            s = seg.point
            for l in range(1, self.n + 1):
                if l == s:
                    continue
                diff = traj - pos[l - 1] if s > l else pos[l - 1] - traj
                angle = np.unwrap(np.angle(diff))
                total[(min(s, l), max(s, l))] += angle[-1] - angle[0]
        return {pair: int(round(v / (2 * math.pi))) for pair, v in total.items()}

    def reversed(self) -> "ConfigLoop":
        return ConfigLoop(
            self.n, self.base, tuple(s.reversed() for s in reversed(self.segments)),
            self.warp, dict(self.metadata, reversed=True), self.min_separation,
        )

    def then(self, other: "ConfigLoop") -> "ConfigLoop":
        if other.n != self.n or other.base != self.base:
            raise ValueError("loops must share the base point")
        return ConfigLoop(
            self.n, self.base, self.segments + other.segments, self.warp,
            {"composite": [self.metadata, other.metadata]}, self.min_separation,
        )

    def with_warp(self, warp: float) -> "ConfigLoop":
        return ConfigLoop(self.n, self.base, self.segments, warp, dict(self.metadata), self.min_separation)


def pure_braid_loop(n: int, r: int, s: int) -> ConfigLoop:
    """The standard loop for the pure-braid generator ``A_rs`` (see module docstring)."""
    if not 1 <= r < s <= n:
        raise ValueError(f"need 1 <= r < s <= n, got r={r}, s={s}, n={n}")
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    p0 = (Fraction(s), Fraction(0))
    p1 = (Fraction(s), half)
    p2 = (r + quarter, half)
    p3 = (r + quarter, Fraction(0))
    out = [
        LoopSegment.line(s, p0, p1),
        LoopSegment.line(s, p1, p2),
        LoopSegment.line(s, p2, p3),
    ]
    circle = LoopSegment.arc(s, (Fraction(r), Fraction(0)), quarter, 0, 1)
    segments = out + [circle] + [seg.reversed() for seg in reversed(out)]
    base = [(Fraction(j), Fraction(0)) for j in range(1, n + 1)]
    meta = {"generator": [r, s], "convention": LOOP_CONVENTION}
    return ConfigLoop(n, base, segments, metadata=meta)


def unit_circle_loop() -> ConfigLoop:
    """Two points: ``xi_1 = e^(2 pi i t)`` circles ``xi_2 = 0`` once."""
    seg = LoopSegment.arc(1, (0, 0), 1, 0, 1)
    return ConfigLoop(2, [(1, 0), (0, 0)], [seg], metadata={"generator": "unit circle"})


def trivial_rep(n: int, dim: int = 1) -> MatrixRep:
    zero = np.array([[Fraction(0)] * dim for _ in range(dim)], dtype=object)
    deltas = {pair: zero for pair in itertools.combinations(range(1, n + 1), 2)}
    return MatrixRep(n, dim, deltas, algebra="trivial")


def _deltas_of(rep) -> tuple[int, int, dict]:
    if isinstance(rep, MatrixRep):
        return rep.n, rep.dim, rep.float_deltas()
    deltas = {k: np.asarray(v, dtype=complex) for k, v in rep.items()}
    n = max(j for _, j in deltas)
    return n, next(iter(deltas.values())).shape[0], deltas


def kz_monodromy(loop: ConfigLoop, rep, hbar: float = 0.1, tol: float = 1e-10,
                 return_stats: bool = False):
    """Transport ``E' = E * hbar sum Delta_kl d log(mu_k - mu_l)`` around ``loop``.

    Raises ``FloatingPointError`` if the adaptive step size underflows.
    """
    n, dim, deltas = _deltas_of(rep)
    if n != loop.n:
        raise ValueError(f"representation has n={n} but the loop has n={loop.n}")
    loop.validate()
    E = np.eye(dim, dtype=complex)
    pos = loop.positions()
    accepted = rejected = 0
    for seg in loop.segments:
        k = seg.point
        others = [l for l in range(1, n + 1) if l != k]
        D = np.ascontiguousarray(
            np.array([deltas[(min(k, l), max(k, l))] for l in others], dtype=complex)
        )
        xi = np.array([pos[l - 1] for l in others], dtype=complex)
        E, a, r = kernels.kz_segment(
            np.ascontiguousarray(E), D, xi, np.ascontiguousarray(seg.kernel_params(loop.warp)),
            float(hbar), float(tol),
        )
        accepted += a
        rejected += r
        pos[k - 1] = seg.endpoints()[1]
    if return_stats:
        return E, {"accepted_steps": accepted, "rejected_steps": rejected}
    return E


def pure_braid_monodromies(rep, hbar: float = 0.1, tol: float = 1e-10) -> dict:
    n = _deltas_of(rep)[0]
    return {
        (r, s): kz_monodromy(pure_braid_loop(n, r, s), rep, hbar, tol)
        for r, s in itertools.combinations(range(1, n + 1), 2)
    }


def _comm(a, b):
    return a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)


def _dev(a, b) -> float:
    return float(np.abs(a - b).max())


def full_twist(monodromies: Mapping, n: int) -> np.ndarray:
    """``(A_12)(A_13 A_23)...(A_1n ... A_{n-1,n})``."""
    dim = next(iter(monodromies.values())).shape[0]
    out = np.eye(dim, dtype=complex)
    for s in range(2, n + 1):
        for r in range(1, s):
            out = out @ monodromies[(r, s)]
    return out


def check_pure_braid_relations(monodromies: Mapping, n: int, tol: float = 1e-6) -> dict:
    """Evaluate the pure-braid relation families and full-twist centrality.

    Families (``{a, b} = a b a^-1 b^-1``):

    1. ``{A_rs, A_ik} = 1`` if ``s < i`` or ``k < r``;
    2. ``{A_ks, A_ik} = {A_is^-1, A_ik}`` if ``i < k < s``;
    3. ``{A_rk, A_ik} = {A_ik^-1, A_ir^-1}`` if ``i < r < k``;
    4. ``{A_rs, A_ik} = {{A_is^-1, A_ir^-1}, A_ik}`` if ``i < r < k < s``.
    """
    A = {k: np.asarray(v, dtype=complex) for k, v in monodromies.items()}
    missing = [p for p in itertools.combinations(range(1, n + 1), 2) if p not in A]
    if missing:
        raise ValueError(f"missing monodromies for {missing}")
    inv = {k: np.linalg.inv(v) for k, v in A.items()}
    dim = next(iter(A.values())).shape[0]
    I = np.eye(dim)
    rels: list[dict] = []
    idx = range(1, n + 1)

    def add(family, label, lhs, rhs):
        rels.append({"family": family, "relation": label, "deviation": _dev(lhs, rhs)})

    for (r, s), (i, k) in itertools.permutations(itertools.combinations(idx, 2), 2):
        if s < i or k < r:
            if (r, s) < (i, k):
                add(1, f"{{A{r}{s},A{i}{k}}} = 1", _comm(A[(r, s)], A[(i, k)]), I)
    for i, k, s in itertools.combinations(idx, 3):
        add(2, f"{{A{k}{s},A{i}{k}}} = {{A{i}{s}^-1,A{i}{k}}}",
            _comm(A[(k, s)], A[(i, k)]), _comm(inv[(i, s)], A[(i, k)]))
    for i, r, k in itertools.combinations(idx, 3):
        add(3, f"{{A{r}{k},A{i}{k}}} = {{A{i}{k}^-1,A{i}{r}^-1}}",
            _comm(A[(r, k)], A[(i, k)]), _comm(inv[(i, k)], inv[(i, r)]))
    for i, r, k, s in itertools.combinations(idx, 4):
        add(4, f"{{A{r}{s},A{i}{k}}} = {{{{A{i}{s}^-1,A{i}{r}^-1}},A{i}{k}}}",
            _comm(A[(r, s)], A[(i, k)]), _comm(_comm(inv[(i, s)], inv[(i, r)]), A[(i, k)]))
    Z = full_twist(A, n)
    for pair in sorted(A):
        add("twist", f"full twist commutes with A{pair[0]}{pair[1]}", Z @ A[pair], A[pair] @ Z)

    for rel in rels:
        rel["pass"] = rel["deviation"] < tol
    families: dict = {}
    for rel in rels:
        key = str(rel["family"])
        fam = families.setdefault(key, {"checked": 0, "max_deviation": 0.0, "pass": True})
        fam["checked"] += 1
        fam["max_deviation"] = max(fam["max_deviation"], rel["deviation"])
        fam["pass"] = fam["pass"] and rel["pass"]
    return {
        "n": n,
        "tolerance": tol,
        "pass": all(rel["pass"] for rel in rels),
        "max_deviation": max((rel["deviation"] for rel in rels), default=0.0),
        "families": families,
        "relations": rels,
    }


def leading_log_check(monodromy, rep, hbar: float, pair: tuple, tol: float = 1e-10,
                      loop: ConfigLoop | None = None) -> dict:
    """Compare ``log M`` with ``2 pi i hbar Delta_rs`` and measure the order of the residual.

    The monodromy is recomputed at ``hbar / 2`` along ``loop`` (default: the
    standard ``A_rs`` loop); a residual of order ``hbar^2`` gives a ratio near 4.
    """
    n, _, deltas = _deltas_of(rep)
    r, s = pair
    loop = loop or pure_braid_loop(n, r, s)
    D = deltas[(r, s)]

    def residual(M, h):
        M = np.asarray(M, dtype=complex)
        gap = float(np.linalg.norm(M - np.eye(M.shape[0]), 2))
        if gap >= 1:
            raise ValueError(f"||M - I|| = {gap:.3g} >= 1: principal logarithm not safe, reduce hbar")
        L = logm(M)
        if not np.all(np.isfinite(L)):
            raise ValueError("matrix logarithm failed")
        return float(np.abs(L - 2j * math.pi * h * D).max())

    res = residual(monodromy, hbar)
    res_half = residual(kz_monodromy(loop, rep, hbar / 2, tol), hbar / 2)
    floor = 100 * tol
    if res < floor and res_half < floor:
        ratio, ok = None, True
    else:
        ratio = res / res_half if res_half > 0 else math.inf
        ok = 3.5 <= ratio <= 4.5
    return {
        "pair": list(pair),
        "hbar": hbar,
        "residual": res,
        "residual_half": res_half,
        "ratio": ratio,
        "pass": ok,
        "orientation": LOOP_CONVENTION,
    }


# ------------------------------------------------------------------ spin flows


@dataclass
class SphereConfig:
    """``n`` vectors in R^3; the radii are recorded at construction."""

    r: np.ndarray
    radii: np.ndarray = field(init=False)

    def __post_init__(self):
        self.r = np.array(self.r, dtype=float)
        if self.r.ndim != 2 or self.r.shape[1] != 3:
            raise ValueError("SphereConfig needs an (n, 3) array")
        self.radii = np.linalg.norm(self.r, axis=1)

    @property
    def n(self) -> int:
        return self.r.shape[0]

    def to_json(self) -> dict:
        return {"vectors": self.r.tolist()}

    @classmethod
    def from_json(cls, doc) -> "SphereConfig":
        if isinstance(doc, str):
            doc = json.loads(doc)
        if "vectors" not in doc:
            raise ValueError("sphere config: missing field 'vectors'")
        return cls(doc["vectors"])


def parse_hamiltonian(terms_or_text, n: int) -> np.ndarray:
    """Symmetric coupling matrix ``C`` of ``H = sum_{i<j} c_ij Delta_ij``.

    ``terms_or_text`` is a mapping ``(i, j) -> c`` or a string like ``"D12"`` or
    ``"D12 - 0.5*D34"``.  Indices are 1-based.
    """
    if isinstance(terms_or_text, str):
        terms: dict = {}
        text = terms_or_text.replace(" ", "").replace("-", "+-")
        for part in filter(None, text.split("+")):
            coeff, _, name = part.rpartition("*")
            sign = 1.0
            if not coeff and name.startswith("-"):
                sign, name = -1.0, name[1:]
            if not name.startswith("D") or len(name) != 3:
                raise ValueError(f"cannot parse Hamiltonian term {part!r} (expected e.g. 2*D13)")
            pair = (int(name[1]), int(name[2]))
            c = sign * (float(coeff) if coeff else 1.0)
            terms[pair] = terms.get(pair, 0.0) + c
        terms_or_text = terms
    C = np.zeros((n, n))
    for (i, j), c in terms_or_text.items():
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ValueError(f"bad pair {(i, j)} for n={n}")
        C[i - 1, j - 1] += float(c)
        C[j - 1, i - 1] += float(c)
    return C


def _energy(C: np.ndarray, r: np.ndarray) -> np.ndarray:
    G = np.einsum("ij,...jc->...ic", np.triu(C, 1), r)
    return np.einsum("...ic,...ic->...", G, r)


@dataclass
class FlowResult:
    times: np.ndarray
    trajectory: np.ndarray
    drift: dict
    step: float
    backend: str

    @property
    def final(self) -> SphereConfig:
        return SphereConfig(self.trajectory[-1])

    def to_csv(self) -> str:
        n = self.trajectory.shape[1]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = [f"{c}{k}" for k in range(1, n + 1) for c in "xyz"]
        w.writerow(["t"] + cols + ["radius_drift", "energy_drift", "momentum_drift"])
        for t, row, a, e, m in zip(
            self.times, self.trajectory, self.drift["radius_series"],
            self.drift["energy_series"], self.drift["momentum_series"],
        ):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in row.ravel()] + [repr(a), repr(e), repr(m)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "step": self.step,
            "duration": float(self.times[-1]),
            "backend": self.backend,
            "final": self.trajectory[-1].tolist(),
            **{k: v for k, v in self.drift.items() if not k.endswith("_series")},
        }


def _steps(T: float, step: float) -> tuple[int, float]:
    if step <= 0:
        raise ValueError("step must be positive")
    nsteps = max(1, int(round(abs(T) / step)))
    return nsteps, T / nsteps


def klyachko_flow(config: SphereConfig, hamiltonian, T: float, step: float = 1e-3,
                  record_every: int = 1) -> FlowResult:
    """RK4 for ``dr_k/dt = {r_k, H}`` with ``H = sum c_ij <r_i, r_j>``.

    Tracks drift of every ``|r_k|``, of ``H``, and of each pair sum
    ``r_i + r_j`` for the pairs present in ``H`` (the total ``sum r_k`` when
    ``H`` couples more than one pair).
    """
    C = hamiltonian if isinstance(hamiltonian, np.ndarray) else parse_hamiltonian(hamiltonian, config.n)
    nsteps, h = _steps(T, step)
    times, traj = kernels.sphere_rk4_trajectory(
        np.ascontiguousarray(C, dtype=float), np.ascontiguousarray(config.r), h, nsteps, record_every
    )
    radius = np.abs(np.linalg.norm(traj, axis=2) - config.radii).max(axis=1)
    energy = np.abs(_energy(C, traj) - _energy(C, config.r))
    pairs = [(i, j) for i in range(config.n) for j in range(i + 1, config.n) if C[i, j] != 0]
    if len(pairs) == 1:
        i, j = pairs[0]
        mom = traj[:, i] + traj[:, j]
        mom0 = config.r[i] + config.r[j]
    else:
        mom = traj.sum(axis=1)
        mom0 = config.r.sum(axis=0)
    momentum = np.abs(mom - mom0).max(axis=1)
    drift = {
        "radius_drift": float(radius.max()),
        "energy_drift": float(energy.max()),
        "momentum_drift": float(momentum.max()),
        "radius_series": radius.tolist(),
        "energy_series": energy.tolist(),
        "momentum_series": momentum.tolist(),
    }
    return FlowResult(times, traj, drift, h, kernels.BACKEND)


def _flow_batch(C: np.ndarray, configs: np.ndarray, T: float, step: float) -> np.ndarray:
    nsteps, h = _steps(T, step)
    return kernels.sphere_rk4(np.ascontiguousarray(C, dtype=float), np.ascontiguousarray(configs), h, nsteps)


def rk4_halving_ratio(config: SphereConfig, hamiltonian, T: float, step: float, exact=None) -> dict:
    """Error ratio of RK4 at ``step`` and ``step / 2`` at time ``T``.

    ``exact`` is the true final state; when omitted a run at ``step / 64``
    is used as the reference.  Fourth order gives a ratio near 16.
    """
    C = hamiltonian if isinstance(hamiltonian, np.ndarray) else parse_hamiltonian(hamiltonian, config.n)
    r0 = config.r[None]
    ref = np.asarray(exact, dtype=float) if exact is not None else _flow_batch(C, r0, T, step / 64)[0]
    e1 = float(np.abs(_flow_batch(C, r0, T, step)[0] - ref).max())
    e2 = float(np.abs(_flow_batch(C, r0, T, step / 2)[0] - ref).max())
    return {"step": step, "error": e1, "error_half": e2, "ratio": e1 / e2 if e2 else math.inf}


def random_configs(n: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` configurations of ``n`` unit vectors, seeded."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, n, 3))
    return v / np.linalg.norm(v, axis=2, keepdims=True)


def flow_compose_check(word: Sequence, configs, tol: float = 1e-7, step: float = 1e-3) -> dict:
    """Apply the flows of ``word = [(hamiltonian, duration), ...]`` in order to every configuration."""
    configs = np.array(configs, dtype=float)
    if configs.ndim == 2:
        configs = configs[None]
    n = configs.shape[1]
    state = configs.copy()
    for ham, duration in word:
        C = ham if isinstance(ham, np.ndarray) else parse_hamiltonian(ham, n)
        state = _flow_batch(C, state, float(duration), step)
    disp = np.abs(state - configs).max(axis=(1, 2))
    return {
        "configs": int(configs.shape[0]),
        "max_displacement": float(disp.max()),
        "mean_displacement": float(disp.mean()),
        "tolerance": tol,
        "pass": bool(disp.max() < tol),
    }


# ------------------------------------------------------------------ JSON


def _pair_json(z) -> list:
    return [str(z[0]), str(z[1])]


def loop_to_json(loop: ConfigLoop) -> dict:
    segs = []
    for s in loop.segments:
        if s.kind == "line":
            segs.append({"point": s.point, "kind": "line", "from": _pair_json(s.start), "to": _pair_json(s.end)})
        else:
            segs.append({
                "point": s.point, "kind": "arc", "center": _pair_json(s.center), "radius": str(s.radius),
                "start_turn": str(s.start_turn), "turns": str(s.turns),
            })
    return {
        "n": loop.n,
        "base": [_pair_json(b) for b in loop.base],
        "warp": loop.warp,
        "segments": segs,
        "metadata": loop.metadata,
    }


def loop_from_json(doc) -> ConfigLoop:
    if isinstance(doc, str):
        doc = json.loads(doc)
    for key in ("n", "base", "segments"):
        if key not in doc:
            raise ValueError(f"loop: missing field {key!r}")
    segs = []
    for k, s in enumerate(doc["segments"]):
        try:
            if s["kind"] == "line":
                segs.append(LoopSegment.line(int(s["point"]), s["from"], s["to"]))
            elif s["kind"] == "arc":
                segs.append(LoopSegment.arc(int(s["point"]), s["center"], s["radius"], s["start_turn"], s["turns"]))
            else:
                raise ValueError(f"unknown kind {s['kind']!r}")
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"loop: segments[{k}] is malformed ({exc})") from None
    return ConfigLoop(int(doc["n"]), doc["base"], segs, float(doc.get("warp", 0.0)), dict(doc.get("metadata", {})))
