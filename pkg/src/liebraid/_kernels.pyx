# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels: RK4 for spin-chain flows, DOPRI5 for KZ transport."""

import numpy as np
from libc.math cimport sin, cos, sqrt, pi, fmax, fmin, pow
from libc.string cimport memcpy

cdef extern from "complex.h":
    double complex cexp(double complex) nogil
    double cabs(double complex) nogil


# ---------------------------------------------------------------- sphere flows

cdef inline void _sphere_rhs(const double[:, ::1] C, const double* r, double* out, int n) noexcept nogil:
    cdef int k, j
    cdef double gx, gy, gz, c
    for k in range(n):
        gx = 0.0
        gy = 0.0
        gz = 0.0
        for j in range(n):
            c = C[k, j]
            if c != 0.0 and j != k:
                gx += c * r[3 * j]
                gy += c * r[3 * j + 1]
                gz += c * r[3 * j + 2]
        # G_k x r_k
        out[3 * k] = gy * r[3 * k + 2] - gz * r[3 * k + 1]
        out[3 * k + 1] = gz * r[3 * k] - gx * r[3 * k + 2]
        out[3 * k + 2] = gx * r[3 * k + 1] - gy * r[3 * k]


cdef void _rk4_step(const double[:, ::1] C, double* r, double h, int n,
                    double* k1, double* k2, double* k3, double* k4, double* tmp) noexcept nogil:
    cdef int i, m = 3 * n
    _sphere_rhs(C, r, k1, n)
    for i in range(m):
        tmp[i] = r[i] + 0.5 * h * k1[i]
    _sphere_rhs(C, tmp, k2, n)
    for i in range(m):
        tmp[i] = r[i] + 0.5 * h * k2[i]
    _sphere_rhs(C, tmp, k3, n)
    for i in range(m):
        tmp[i] = r[i] + h * k3[i]
    _sphere_rhs(C, tmp, k4, n)
    for i in range(m):
        r[i] += h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0


def sphere_rk4(double[:, ::1] C, double[:, :, ::1] configs, double h, long nsteps):
    """Advance every configuration (shape ``(batch, n, 3)``) by ``nsteps`` RK4 steps."""
    cdef Py_ssize_t batch = configs.shape[0]
    cdef int n = <int>configs.shape[1]
    out_arr = np.array(configs, dtype=np.float64, copy=True)
    cdef double[:, :, ::1] out = out_arr
    work_arr = np.zeros(5 * 3 * n, dtype=np.float64)
    cdef double[::1] work = work_arr
    cdef Py_ssize_t b
    cdef long s
    cdef int m = 3 * n
    with nogil:
        for b in range(batch):
            for s in range(nsteps):
                _rk4_step(C, &out[b, 0, 0], h, n, &work[0], &work[m], &work[2 * m],
                          &work[3 * m], &work[4 * m])
    return out_arr


def sphere_rk4_trajectory(double[:, ::1] C, double[:, ::1] r0, double h, long nsteps, long every):
    """RK4 trajectory sampled every ``every`` steps (first and last state always included)."""
    cdef int n = <int>r0.shape[0]
    cdef int m = 3 * n
    nrec = nsteps // every + 1 + (1 if nsteps % every else 0)
    traj_arr = np.zeros((nrec, n, 3), dtype=np.float64)
    times_arr = np.zeros(nrec, dtype=np.float64)
    cdef double[:, :, ::1] traj = traj_arr
    cdef double[::1] times = times_arr
    state_arr = np.array(r0, dtype=np.float64, copy=True)
    cdef double[:, ::1] state = state_arr
    work_arr = np.zeros(5 * m, dtype=np.float64)
    cdef double[::1] work = work_arr
    cdef long s
    cdef int rec = 1
    memcpy(&traj[0, 0, 0], &state[0, 0], m * sizeof(double))
    with nogil:
        for s in range(1, nsteps + 1):
            _rk4_step(C, &state[0, 0], h, n, &work[0], &work[m], &work[2 * m],
                      &work[3 * m], &work[4 * m])
            if s % every == 0 or s == nsteps:
                memcpy(&traj[rec, 0, 0], &state[0, 0], m * sizeof(double))
                times[rec] = s * h
                rec += 1
    return times_arr, traj_arr


# ---------------------------------------------------------------- KZ transport

# Dormand-Prince 5(4) tableau
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176
cdef double A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9


cdef inline void _path(const double[::1] seg, double u, double complex* mu, double complex* dmu) noexcept nogil:
    # seg = [kind, a_re, a_im, b_re, b_im, sweep, warp]; kind 0 = line a->b, 1 = arc
    cdef double w = seg[6]
    cdef double phi = u - w * sin(2.0 * pi * u) / (2.0 * pi)
    cdef double dphi = 1.0 - w * cos(2.0 * pi * u)
    cdef double complex a = seg[1] + 1j * seg[2]
    cdef double complex e
    if seg[0] == 0.0:
        mu[0] = a + (seg[3] + 1j * seg[4] - a) * phi
        dmu[0] = (seg[3] + 1j * seg[4] - a) * dphi
    else:
        # arc around centre a, radius seg[3], start angle seg[4], sweep seg[5] radians
        e = cexp(1j * (seg[4] + seg[5] * phi))
        mu[0] = a + seg[3] * e
        dmu[0] = 1j * seg[3] * seg[5] * dphi * e


cdef void _kz_rhs(const double complex[:, :, ::1] D, const double complex[::1] xi,
                  const double[::1] seg, double hbar, double u,
                  const double complex* E, double complex* out, double complex* omega, int d) noexcept nogil:
    cdef int m = <int>D.shape[0]
    cdef int l, i, j, k
    cdef double complex mu, dmu, c, acc
    _path(seg, u, &mu, &dmu)
    for i in range(d * d):
        omega[i] = 0.0
    for l in range(m):
        c = hbar * dmu / (mu - xi[l])
        for i in range(d):
            for j in range(d):
                omega[i * d + j] = omega[i * d + j] + c * D[l, i, j]
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc = acc + E[i * d + k] * omega[k * d + j]
            out[i * d + j] = acc


def kz_segment(double complex[:, ::1] E0, double complex[:, :, ::1] D, double complex[::1] xi,
               double[::1] seg, double hbar, double tol, double h0=0.01,
               double hmin=1e-14, long max_steps=1000000):
    """Integrate ``E' = E * Omega(u)`` over ``u`` in ``[0, 1]`` with adaptive DOPRI5.

    Returns ``(E(1), accepted, rejected)``; raises ``FloatingPointError`` on
    step-size underflow.
    """
    cdef int d = <int>E0.shape[0]
    cdef int N = d * d
    buf_arr = np.zeros((10, N), dtype=np.complex128)
    cdef double complex[:, ::1] buf = buf_arr
    cdef double complex* y = &buf[0, 0]
    cdef double complex* k1 = &buf[1, 0]
    cdef double complex* k2 = &buf[2, 0]
    cdef double complex* k3 = &buf[3, 0]
    cdef double complex* k4 = &buf[4, 0]
    cdef double complex* k5 = &buf[5, 0]
    cdef double complex* k6 = &buf[6, 0]
    cdef double complex* k7 = &buf[7, 0]
    cdef double complex* tmp = &buf[8, 0]
    cdef double complex* omega = &buf[9, 0]
    ynew_arr = np.zeros(N, dtype=np.complex128)
    cdef double complex[::1] ynew = ynew_arr
    cdef double u = 0.0, h = h0, err, sc, e, fac
    cdef long accepted = 0, rejected = 0
    cdef int i
    cdef bint underflow = False
    for i in range(N):
        y[i] = E0[i // d, i % d]
    with nogil:
        _kz_rhs(D, xi, seg, hbar, u, y, k1, omega, d)
        while u < 1.0:
            if accepted + rejected >= max_steps or h < hmin:
                underflow = True
                break
            if u + h > 1.0:
                h = 1.0 - u
            for i in range(N):
                tmp[i] = y[i] + h * A21 * k1[i]
            _kz_rhs(D, xi, seg, hbar, u + C2 * h, tmp, k2, omega, d)
            for i in range(N):
                tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
            _kz_rhs(D, xi, seg, hbar, u + C3 * h, tmp, k3, omega, d)
            for i in range(N):
                tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            _kz_rhs(D, xi, seg, hbar, u + C4 * h, tmp, k4, omega, d)
            for i in range(N):
                tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            _kz_rhs(D, xi, seg, hbar, u + C5 * h, tmp, k5, omega, d)
            for i in range(N):
                tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
            _kz_rhs(D, xi, seg, hbar, u + h, tmp, k6, omega, d)
            for i in range(N):
                ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
            _kz_rhs(D, xi, seg, hbar, u + h, &ynew[0], k7, omega, d)
            err = 0.0
            for i in range(N):
                e = cabs(h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
                sc = tol + tol * fmax(cabs(y[i]), cabs(ynew[i]))
                err += (e / sc) * (e / sc)
            err = sqrt(err / N)
            if err <= 1.0:
                u += h
                accepted += 1
                for i in range(N):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                fac = 5.0 if err == 0.0 else fmin(5.0, 0.9 * pow(err, -0.2))
            else:
                rejected += 1
                fac = fmax(0.2, 0.9 * pow(err, -0.2))
            h *= fac
    if underflow:
        raise FloatingPointError(
            f"KZ step size underflow at u={u:.6g} (h={h:.3g}); points too close or tolerance too tight"
        )
    out = np.empty((d, d), dtype=np.complex128)
    for i in range(N):
        out[i // d, i % d] = y[i]
    return out, accepted, rejected
