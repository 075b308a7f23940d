# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot kernel.

Semantics are identical to geomoment._simplex_py (same pivot rules, same
elementwise arithmetic); the module exists purely to take the interpreter
out of the inner loop.
"""

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def simplex_iterate(double[:, ::1] T, long long[::1] basis, double pivot_tol,
                    long long max_iters, long long stall_threshold):
    """See geomoment._simplex_py.simplex_iterate."""
    cdef Py_ssize_t k = T.shape[0] - 1
    cdef Py_ssize_t m = T.shape[1] - 1
    cdef long long iters = 0
    cdef long long stall = 0
    cdef Py_ssize_t i, j, l, ip
    cdef double best, ratio, best_ratio, piv, f, prev
    cdef long long best_basis

    while iters < max_iters:
        # entering column
        if stall >= stall_threshold:
            j = -1
            for l in range(m):
                if T[k, l] < -pivot_tol:
                    j = l
                    break
            if j < 0:
                return OPTIMAL, iters
        else:
            j = 0
            best = T[k, 0]
            for l in range(1, m):
                if T[k, l] < best:
                    best = T[k, l]
                    j = l
            if best >= -pivot_tol:
                return OPTIMAL, iters

        # ratio test, ties to the smallest basis index
        ip = -1
        best_ratio = 0.0
        best_basis = 0
        for i in range(k):
            if T[i, j] > pivot_tol:
                ratio = T[i, m] / T[i, j]
                if ip < 0 or ratio < best_ratio or \
                        (ratio == best_ratio and basis[i] < best_basis):
                    ip = i
                    best_ratio = ratio
                    best_basis = basis[i]
        if ip < 0:
            return UNBOUNDED, iters

        prev = T[k, m]
        piv = T[ip, j]
        for l in range(m + 1):
            T[ip, l] /= piv
        for i in range(k + 1):
            if i == ip:
                continue
            f = T[i, j]
            if f != 0.0:
                for l in range(m + 1):
                    T[i, l] -= f * T[ip, l]
            T[i, j] = 0.0
        T[ip, j] = 1.0
        basis[ip] = j
        iters += 1
        if T[k, m] > prev:
            stall = 0
        else:
            stall = stall + 1
    return ITERATION_LIMIT, iters
