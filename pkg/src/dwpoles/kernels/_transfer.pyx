# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled constant-potential transfer step (same contract as transfer_py)."""
import numpy as np

cdef extern from "<complex.h>" nogil:
    double complex csqrt(double complex)
    double complex ccos(double complex)
    double complex csin(double complex)
    double cabs(double complex)

cdef double SERIES_RADIUS = 0.5
cdef int NTERMS = 12


cdef inline void _entire_cs(double complex z, double complex* c,
                            double complex* S, double complex* dS) nogil:
    cdef double complex r, tc, ts, ts_prev
    cdef int n
    if cabs(z) < SERIES_RADIUS:
        c[0] = 0
        S[0] = 0
        dS[0] = 0
        tc = 1
        ts = 1
        ts_prev = 0
        for n in range(NTERMS):
            c[0] += tc
            S[0] += ts
            if n >= 1:
                dS[0] += n * ts_prev * (-1.0 / ((2 * n) * (2 * n + 1)))
            ts_prev = ts
            tc = tc * (-z) / ((2 * n + 1) * (2 * n + 2))
            ts = ts * (-z) / ((2 * n + 2) * (2 * n + 3))
    else:
        r = csqrt(z)
        c[0] = ccos(r)
        S[0] = csin(r) / r
        dS[0] = (c[0] - S[0]) / (2.0 * z)


def transfer(widths, heights, energies, psi0=0.0, dpsi0=1.0, bint derivative=False):
    cdef double[::1] w = np.ascontiguousarray(widths, dtype=np.float64)
    cdef double[::1] h = np.ascontiguousarray(heights, dtype=np.float64)
    cdef double complex[::1] E = np.ascontiguousarray(
        np.atleast_1d(np.asarray(energies, dtype=complex)))
    cdef Py_ssize_t n = E.shape[0], nseg = w.shape[0], i, j
    out_arr = np.empty((4 if derivative else 2, n), dtype=complex)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex p0 = psi0, dp0 = dpsi0
    cdef double complex psi, dpsi, pe, dpe, q, c, S, dS, s, m21
    cdef double complex dm11, dm12, dm21, t0, t1
    cdef double d

    with nogil:
        for i in range(n):
            psi = p0
            dpsi = dp0
            pe = 0
            dpe = 0
            for j in range(nseg):
                d = w[j]
                if d <= 0.0:
                    continue
                q = 2.0 * (E[i] - h[j])
                _entire_cs(q * d * d, &c, &S, &dS)
                s = d * S
                m21 = -q * s
                if derivative:
                    dm11 = -d * d * S
                    dm12 = 2.0 * d * d * d * dS
                    dm21 = -2.0 * s - q * dm12
                    t0 = dm11 * psi + c * pe + dm12 * dpsi + s * dpe
                    t1 = dm21 * psi + m21 * pe + dm11 * dpsi + c * dpe
                    pe = t0
                    dpe = t1
                t0 = c * psi + s * dpsi
                t1 = m21 * psi + c * dpsi
                psi = t0
                dpsi = t1
            out[0, i] = psi
            out[1, i] = dpsi
            if derivative:
                out[2, i] = pe
                out[3, i] = dpe
    return out_arr
