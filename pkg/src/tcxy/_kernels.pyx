# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: manifold coefficient evaluation and density accumulation.

Semantics mirror ``kernels_py`` exactly; see that module for the contract.
"""

import numpy as np


cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex csinh(double complex)
    double cabs(double complex)
    double complex conj(double complex)


cdef inline double complex _growth(double complex x, double t, double complex ext) nogil:
    # (e^{x t} - 1) / x; sinh half-argument form kills the cancellation at
    # small |x t|, the series branch only guards sinh(z)/z at z -> 0.
    cdef double complex z = 0.5 * x * t
    cdef double complex ratio
    cdef double az = cabs(z)
    if az < 0.25:
        if az < 1e-4:
            ratio = 1.0 + z * z / 6.0
        else:
            ratio = csinh(z) / z
        return t * cexp(z) * ratio
    return (ext - 1.0) / x


def evolve_blocks(object roots_in, object deltas_in, object init_in,
                  object alpha_in, object beta_in, double detuning,
                  double lam2, object times_in):
    """Evaluate every manifold's coefficients on a time grid; see ``kernels_py``."""
    cdef const double complex[:, ::1] roots = np.ascontiguousarray(roots_in, dtype=np.complex128)
    cdef const double complex[:, ::1] deltas = np.ascontiguousarray(deltas_in, dtype=np.complex128)
    cdef const double complex[:, ::1] init = np.ascontiguousarray(init_in, dtype=np.complex128)
    cdef const double[::1] alpha = np.ascontiguousarray(alpha_in, dtype=np.float64)
    cdef const double[::1] beta = np.ascontiguousarray(beta_in, dtype=np.float64)
    cdef const double[::1] times = np.ascontiguousarray(times_in, dtype=np.float64)

    cdef Py_ssize_t nm = roots.shape[0]
    cdef Py_ssize_t nt = times.shape[0]
    out_a = np.empty((nm, nt), dtype=np.complex128)
    out_b = np.empty((nm, nt), dtype=np.complex128)
    out_c = np.empty((nm, nt), dtype=np.complex128)
    out_d = np.empty((nm, nt), dtype=np.complex128)
    cdef double complex[:, ::1] va = out_a
    cdef double complex[:, ::1] vb = out_b
    cdef double complex[:, ::1] vc = out_c
    cdef double complex[:, ::1] vd = out_d

    cdef Py_ssize_t n, it, j
    cdef double t, al, be
    cdef double complex m[3]
    cdef double complex dl[3]
    cdef double complex xa[3]
    cdef double complex xd[3]
    cdef double complex a0, d0, bc0, pha, el2, emt, ksum, fa, fd

    with nogil:
        for n in range(nm):
            for j in range(3):
                m[j] = roots[n, j]
                dl[j] = deltas[n, j]
                xa[j] = m[j] + 1j * detuning
                xd[j] = m[j] - 1j * detuning
            a0 = init[n, 0]
            bc0 = init[n, 1] - init[n, 2]
            d0 = init[n, 3]
            al = alpha[n]
            be = beta[n]
            for it in range(nt):
                t = times[it]
                pha = cexp(1j * detuning * t)
                el2 = cexp(1j * lam2 * t)
                ksum = 0.0
                fa = 0.0
                fd = 0.0
                for j in range(3):
                    emt = cexp(m[j] * t)
                    ksum = ksum + dl[j] * emt
                    fa = fa + dl[j] * _growth(xa[j], t, emt * pha)
                    fd = fd + dl[j] * _growth(xd[j], t, emt * conj(pha))
                va[n, it] = a0 - 1j * al * fa
                vd[n, it] = d0 - 1j * be * fd
                vb[n, it] = 0.5 * (bc0 * el2 + ksum)
                vc[n, it] = 0.5 * (-bc0 * el2 + ksum)
    return out_a, out_b, out_c, out_d


def rdm_series(object a_in, object b_in, object c_in, object d_in, object frozen_in):
    """Photon-matched two-qubit reduced density matrices; see ``kernels_py``."""
    cdef const double complex[:, ::1] a = np.ascontiguousarray(a_in, dtype=np.complex128)
    cdef const double complex[:, ::1] b = np.ascontiguousarray(b_in, dtype=np.complex128)
    cdef const double complex[:, ::1] c = np.ascontiguousarray(c_in, dtype=np.complex128)
    cdef const double complex[:, ::1] d = np.ascontiguousarray(d_in, dtype=np.complex128)
    cdef const double complex[:, ::1] frozen = np.ascontiguousarray(frozen_in, dtype=np.complex128)

    cdef Py_ssize_t nm = a.shape[0]
    cdef Py_ssize_t nt = a.shape[1]
    rho_out = np.empty((nt, 4, 4), dtype=np.complex128)
    cdef double complex[:, :, ::1] rho = rho_out

    cdef Py_ssize_t n, it
    cdef double complex b0, c0, d0, d1
    cdef double complex r11, r22, r33, r44, r12, r13, r14, r23, r24, r34
    cdef double complex an, bn, cn, dn

    with nogil:
        for it in range(nt):
            b0 = frozen[0, it]
            c0 = frozen[1, it]
            d0 = frozen[2, it]
            d1 = frozen[3, it]
            r11 = 0.0
            r22 = b0 * conj(b0)
            r33 = c0 * conj(c0)
            r44 = d0 * conj(d0) + d1 * conj(d1)
            r12 = a[0, it] * conj(b0)
            r13 = a[0, it] * conj(c0)
            r14 = a[0, it] * conj(d0)
            if nm >= 2:
                r14 = r14 + a[1, it] * conj(d1)
            r23 = b0 * conj(c0)
            r24 = b0 * conj(d0) + b[0, it] * conj(d1)
            r34 = c0 * conj(d0) + c[0, it] * conj(d1)
            for n in range(nm):
                an = a[n, it]
                bn = b[n, it]
                cn = c[n, it]
                dn = d[n, it]
                r11 = r11 + an * conj(an)
                r22 = r22 + bn * conj(bn)
                r33 = r33 + cn * conj(cn)
                r44 = r44 + dn * conj(dn)
                r23 = r23 + bn * conj(cn)
                if n + 1 < nm:
                    r12 = r12 + a[n + 1, it] * conj(bn)
                    r13 = r13 + a[n + 1, it] * conj(cn)
                    r24 = r24 + b[n + 1, it] * conj(dn)
                    r34 = r34 + c[n + 1, it] * conj(dn)
                if n + 2 < nm:
                    r14 = r14 + a[n + 2, it] * conj(dn)
            rho[it, 0, 0] = r11
            rho[it, 1, 1] = r22
            rho[it, 2, 2] = r33
            rho[it, 3, 3] = r44
            rho[it, 0, 1] = r12
            rho[it, 0, 2] = r13
            rho[it, 0, 3] = r14
            rho[it, 1, 2] = r23
            rho[it, 1, 3] = r24
            rho[it, 2, 3] = r34
            rho[it, 1, 0] = conj(r12)
            rho[it, 2, 0] = conj(r13)
            rho[it, 3, 0] = conj(r14)
            rho[it, 2, 1] = conj(r23)
            rho[it, 3, 1] = conj(r24)
            rho[it, 3, 2] = conj(r34)
    return rho_out
