# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled phase-search kernels.

Same algorithm as ``_coset_py.py``; the realigned matrix, its SVD (LAPACK
zgesdd through scipy) and the gradient are evaluated without touching Python
objects, so the whole descent runs with the GIL released.
"""
import numpy as np

from libc.math cimport cos, sin
from libc.string cimport memset
from scipy.linalg.cython_lapack cimport zgesdd


cdef struct Work:
    int K
    int P
    int Q
    int mn
    int lwork
    const double complex *T
    double complex *a
    double *s
    double complex *u
    double complex *vt
    double complex *work
    double *rwork
    int *iwork
    double complex *e


cdef class _Buffers:
    """Owns the numpy arrays backing a Work struct."""
    cdef object arrays
    cdef Work w

    def __init__(self, const double complex[:, :, ::1] T):
        cdef int K = T.shape[0], P = T.shape[1], Q = T.shape[2]
        cdef int mn = min(P, Q), mx = max(P, Q)
        cdef int lrwork = max(5 * mn * mn + 5 * mn, 2 * mx * mn + 2 * mn * mn + mn)
        cdef double complex[::1] a = np.zeros(P * Q, dtype=np.complex128)
        cdef double[::1] s = np.zeros(mn, dtype=np.float64)
        cdef double complex[::1] u = np.zeros(P * mn, dtype=np.complex128)
        cdef double complex[::1] vt = np.zeros(mn * Q, dtype=np.complex128)
        cdef double complex[::1] query = np.zeros(1, dtype=np.complex128)
        cdef double[::1] rwork = np.zeros(max(lrwork, 1), dtype=np.float64)
        cdef int[::1] iwork = np.zeros(8 * mn, dtype=np.intc)
        cdef double complex[::1] e = np.zeros(K, dtype=np.complex128)
        cdef char jobz = b'S'
        cdef int lwork = -1, info = 0, ldvt = mn
        zgesdd(&jobz, &P, &Q, &a[0], &P, &s[0], &u[0], &P, &vt[0], &ldvt,
               &query[0], &lwork, &rwork[0], &iwork[0], &info)
        lwork = max(<int>query[0].real, 1)
        cdef double complex[::1] work = np.zeros(lwork, dtype=np.complex128)
        self.arrays = (T, a, s, u, vt, work, rwork, iwork, e)
        self.w.K = K
        self.w.P = P
        self.w.Q = Q
        self.w.mn = mn
        self.w.lwork = lwork
        self.w.T = &T[0, 0, 0]
        self.w.a = &a[0]
        self.w.s = &s[0]
        self.w.u = &u[0]
        self.w.vt = &vt[0]
        self.w.work = &work[0]
        self.w.rwork = &rwork[0]
        self.w.iwork = &iwork[0]
        self.w.e = &e[0]


cdef int _eval(Work *w, const double *th, double *grad, double *f,
               double *s1, double *s2) noexcept nogil:
    cdef int K = w.K, P = w.P, Q = w.Q, mn = w.mn
    cdef int k, p, q, i, info = 0
    cdef char jobz = b'S'
    cdef int ldvt = mn, lwork = w.lwork
    cdef double complex ek, acc, row, cu
    cdef const double complex *Tk
    for k in range(K):
        w.e[k] = cos(th[k]) + 1j * sin(th[k])
    memset(w.a, 0, P * Q * sizeof(double complex))
    # a is column-major: a[p + q*P]
    for k in range(K):
        ek = w.e[k]
        Tk = w.T + k * P * Q
        for p in range(P):
            for q in range(Q):
                w.a[p + q * P] += ek * Tk[p * Q + q]
    zgesdd(&jobz, &P, &Q, w.a, &P, w.s, w.u, &P, w.vt, &ldvt,
           w.work, &lwork, w.rwork, w.iwork, &info)
    if info != 0:
        return info
    f[0] = 0.0
    for i in range(1, mn):
        f[0] += w.s[i] * w.s[i]
    s1[0] = w.s[0]
    s2[0] = w.s[1] if mn > 1 else 0.0
    # grad_k = 2 s1 Im(e_k u^H T_k v), u = U[:, 0], v^H = VT[0, :]
    for k in range(K):
        Tk = w.T + k * P * Q
        acc = 0.0
        for p in range(P):
            cu = w.u[p].conjugate()
            row = 0.0
            for q in range(Q):
                row += Tk[p * Q + q] * w.vt[q * mn].conjugate()
            acc += cu * row
        grad[k] = 2.0 * w.s[0] * (w.e[k] * acc).imag
    return 0


def objective_gradient(const double complex[:, :, ::1] terms, const double[::1] theta):
    cdef _Buffers buf = _Buffers(terms)
    cdef double[::1] grad = np.zeros(terms.shape[0], dtype=np.float64)
    cdef double f = 0.0, s1 = 0.0, s2 = 0.0
    cdef int info
    if theta.shape[0] != terms.shape[0]:
        raise ValueError("theta length does not match number of terms")
    with nogil:
        info = _eval(&buf.w, &theta[0], &grad[0], &f, &s1, &s2)
    if info != 0:
        raise np.linalg.LinAlgError(f"zgesdd failed with info={info}")
    return f, s1, s2, np.asarray(grad)


def descend(const double complex[:, :, ::1] terms, theta0, int max_iters=500,
            double step0=1.0, double step_max=10.0, double grow=2.0,
            double shrink=0.5, double armijo=1e-4, double min_step=1e-14,
            double f_stop=1e-26, double gap_tol=1e-12):
    cdef _Buffers buf = _Buffers(terms)
    cdef int K = terms.shape[0]
    cdef double[::1] th = np.array(theta0, dtype=np.float64)
    cdef double[::1] thn = np.zeros(K, dtype=np.float64)
    cdef double[::1] g = np.zeros(K, dtype=np.float64)
    cdef double[::1] gn = np.zeros(K, dtype=np.float64)
    cdef double f = 0.0, s1 = 0.0, s2 = 0.0, fn = 0.0, s1n = 0.0, s2n = 0.0
    cdef double t = step0, gg
    cdef int evals = 0, it = 0, info = 0, k
    cdef bint accepted
    if th.shape[0] != K:
        raise ValueError("theta length does not match number of terms")
    with nogil:
        info = _eval(&buf.w, &th[0], &g[0], &f, &s1, &s2)
        evals = 1
        g[0] = 0.0
        while info == 0 and it < max_iters:
            if f <= f_stop:
                break
            gg = 0.0
            for k in range(K):
                gg += g[k] * g[k]
            if gg == 0.0:
                break
            if s1 - s2 < gap_tol:
                t *= 0.5
            accepted = False
            while t >= min_step:
                for k in range(K):
                    thn[k] = th[k] - t * g[k]
                info = _eval(&buf.w, &thn[0], &gn[0], &fn, &s1n, &s2n)
                evals += 1
                if info != 0:
                    break
                if fn <= f - armijo * t * gg:
                    accepted = True
                    break
                t *= shrink
            if not accepted:
                break
            gn[0] = 0.0
            for k in range(K):
                th[k] = thn[k]
                g[k] = gn[k]
            f = fn
            s1 = s1n
            s2 = s2n
            t = min(t * grow, step_max)
            it += 1
    if info != 0:
        raise np.linalg.LinAlgError(f"zgesdd failed with info={info}")
    return np.asarray(th), f, evals, it
