"""Pure-Python/numpy versions of the compiled kernels, same algorithms and signatures."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["sphere_rk4", "sphere_rk4_trajectory", "kz_segment"]


def _sphere_rhs(C: np.ndarray, r: np.ndarray) -> np.ndarray:
    # r has shape (batch, n, 3); G_k = sum_{j != k} C_kj r_j
    Cz = C - np.diag(np.diag(C))
    G = np.einsum("kj,bjc->bkc", Cz, r)
    return np.cross(G, r)


def _rk4_step(C, r, h):
    k1 = _sphere_rhs(C, r)
    k2 = _sphere_rhs(C, r + 0.5 * h * k1)
    k3 = _sphere_rhs(C, r + 0.5 * h * k2)
    k4 = _sphere_rhs(C, r + h * k3)
    return r + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def sphere_rk4(C, configs, h: float, nsteps: int) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    r = np.array(configs, dtype=float)
    for _ in range(nsteps):
        r = _rk4_step(C, r, h)
    return r


def sphere_rk4_trajectory(C, r0, h: float, nsteps: int, every: int):
    C = np.asarray(C, dtype=float)
    r = np.array(r0, dtype=float)[None]
    times, traj = [0.0], [r[0].copy()]
    for s in range(1, nsteps + 1):
        r = _rk4_step(C, r, h)
        if s % every == 0 or s == nsteps:
            times.append(s * h)
            traj.append(r[0].copy())
    return np.array(times), np.array(traj)


_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_C = (0.0, 0.2, 0.3, 0.8, 8 / 9, 1.0)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _path(seg, u):
    kind, a_re, a_im, b_re, b_im, sweep, w = seg
    phi = u - w * math.sin(2 * math.pi * u) / (2 * math.pi)
    dphi = 1.0 - w * math.cos(2 * math.pi * u)
    a = complex(a_re, a_im)
    if kind == 0.0:
        b = complex(b_re, b_im)
        return a + (b - a) * phi, (b - a) * dphi
    e = np.exp(1j * (b_im + sweep * phi))
    return a + b_re * e, 1j * b_re * sweep * dphi * e


def kz_segment(E0, D, xi, seg, hbar: float, tol: float, h0: float = 0.01,
               hmin: float = 1e-14, max_steps: int = 1000000):
    D = np.asarray(D, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    seg = tuple(float(x) for x in seg)

    def rhs(u, E):
        mu, dmu = _path(seg, u)
        with np.errstate(divide="ignore", invalid="ignore"):
            omega = np.tensordot(hbar * dmu / (mu - xi), D, axes=1)
        return E @ omega

    y = np.array(E0, dtype=complex)
    u, h = 0.0, h0
    accepted = rejected = 0
    k1 = rhs(u, y)
    while u < 1.0:
        if accepted + rejected >= max_steps or h < hmin:
            raise FloatingPointError(
                f"KZ step size underflow at u={u:.6g} (h={h:.3g}); points too close or tolerance too tight"
            )
        h = min(h, 1.0 - u)
        ks = [k1]
        for s in range(1, 6):
            ks.append(rhs(u + _C[s] * h, y + h * sum(a * k for a, k in zip(_A[s], ks))))
        ynew = y + h * sum(b * k for b, k in zip(_B, ks))
        k7 = rhs(u + h, ynew)
        ks.append(k7)
        e = np.abs(h * sum(c * k for c, k in zip(_E, ks)))
        sc = tol + tol * np.maximum(np.abs(y), np.abs(ynew))
        err = math.sqrt(float(np.mean((e / sc) ** 2)))
        if err <= 1.0:
            u += h
            accepted += 1
            y, k1 = ynew, k7
            fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= fac
    return y, accepted, rejected
