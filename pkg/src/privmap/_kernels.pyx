# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: trace norms of channel outputs on embedded operators.

For Kraus operators V_j (r, e, d), isometries W_t (T, d, k) and operators
X_g (m, k, k) on the code space, computes

    out[t, g] = || sum_j V_j W_t X_g W_t^dag V_j^dag ||_tr

assuming each X_g is Hermitian (so the output is Hermitian and the trace
norm is the sum of absolute eigenvalues, taken with LAPACK zheev).
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()


def output_trace_norms(kraus, isos, ops):
    cdef const double complex[:, :, ::1] V = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef const double complex[:, :, ::1] W = np.ascontiguousarray(isos, dtype=np.complex128)
    cdef const double complex[:, :, ::1] X = np.ascontiguousarray(ops, dtype=np.complex128)
    cdef Py_ssize_t r = V.shape[0], e = V.shape[1], d = V.shape[2], T = W.shape[0], k = W.shape[2]
    cdef Py_ssize_t m = X.shape[0]
    if W.shape[1] != d or X.shape[1] != k or X.shape[2] != k:
        raise ValueError("incompatible kernel operand shapes")

    out_arr = np.zeros((T, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double complex[:, :, ::1] K = np.empty((r, e, k), dtype=np.complex128)
    cdef double complex[:, ::1] KX = np.empty((e, k), dtype=np.complex128)
    cdef double complex[:, ::1] Y = np.empty((e, e), dtype=np.complex128)
    cdef double[::1] evals = np.empty(e, dtype=np.float64)
    cdef double[::1] rwork = np.empty(max(1, 3 * e - 2), dtype=np.float64)
    cdef int n = <int>e, lda = <int>e, info = 0
    cdef int lwork = max(1, 2 * n - 1) * 4
    cdef double complex[::1] work = np.empty(lwork, dtype=np.complex128)
    cdef char jobz = b'N'
    cdef char uplo = b'L'  # row-major upper triangle == column-major lower
    cdef Py_ssize_t t, j, a, b, c, g
    cdef double complex acc
    cdef double total

    with nogil:
        for t in range(T):
            # K_j = V_j W_t
            for j in range(r):
                for a in range(e):
                    for c in range(k):
                        acc = 0
                        for b in range(d):
                            acc = acc + V[j, a, b] * W[t, b, c]
                        K[j, a, c] = acc
            for g in range(m):
                for a in range(e):
                    for b in range(e):
                        Y[a, b] = 0
                for j in range(r):
                    # KX = K_j X_g
                    for a in range(e):
                        for c in range(k):
                            acc = 0
                            for b in range(k):
                                acc = acc + K[j, a, b] * X[g, b, c]
                            KX[a, c] = acc
                    # Y += KX K_j^dag (upper triangle suffices for zheev)
                    for a in range(e):
                        for b in range(a, e):
                            acc = 0
                            for c in range(k):
                                acc = acc + KX[a, c] * K[j, b, c].conjugate()
                            Y[a, b] = Y[a, b] + acc
                zheev(&jobz, &uplo, &n, &Y[0, 0], &lda, &evals[0], &work[0], &lwork, &rwork[0], &info)
                if info != 0:
                    with gil:
                        raise RuntimeError(f"zheev failed with info={info}")
                total = 0
                for a in range(e):
                    total = total + fabs(evals[a])
                out[t, g] = total
    return out_arr
