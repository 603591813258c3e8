# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels.

Same contracts as ``_core_py``; see that module for the reference versions.
"""

import numpy as np

from libc.math cimport sqrt, fabs, INFINITY

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)


cdef double _off_norm(double complex[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q
    cdef double total = 0.0
    cdef double complex z
    for p in range(n - 1):
        for q in range(p + 1, n):
            z = a[p, q]
            total += creal(z) * creal(z) + cimag(z) * cimag(z)
    return sqrt(2.0 * total)


cdef double _fro(double complex[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    cdef double complex z
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            z = a[i, j]
            total += creal(z) * creal(z) + cimag(z) * cimag(z)
    return sqrt(total)


cdef int _jacobi(double complex[:, ::1] a, double complex[:, ::1] v, double[::1] w,
                 double off_tol, int max_sweeps) noexcept nogil:
    """In-place cyclic Jacobi; ``a`` is destroyed. Returns sweeps or -1."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef double r, app, aqq, zeta, t, c, s
    cdef double complex apq, phase, cph, sph, xp, xq
    cdef int sweeps = 0

    for p in range(n):
        for q in range(n):
            v[p, q] = 1.0 if p == q else 0.0
        a[p, p] = creal(a[p, p])
    while _off_norm(a) > off_tol:
        if sweeps >= max_sweeps:
            sweeps = -1
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = cabs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app = creal(a[p, p])
                aqq = creal(a[q, q])
                zeta = (aqq - app) / (2.0 * r)
                t = 1.0 / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                if zeta < 0.0:
                    t = -t
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                cph = conj(phase)
                sph = s * cph
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - sph * xq
                    a[k, q] = s * xp + c * cph * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - s * phase * xq
                    a[q, k] = s * xp + c * phase * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp - sph * xq
                    v[k, q] = s * xp + c * cph * xq
    for k in range(n):
        w[k] = creal(a[k, k])
    return sweeps


cdef int _herm_eig_copy(double complex[:, ::1] m, double complex[:, ::1] work,
                        double complex[:, ::1] v, double[::1] w,
                        double off_tol_rel, int max_sweeps) noexcept nogil:
    """Symmetrized copy of ``m`` into ``work``, then Jacobi."""
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t i, j
    cdef double scale
    for i in range(n):
        for j in range(n):
            work[i, j] = 0.5 * (m[i, j] + conj(m[j, i]))
    scale = _fro(work)
    if scale < 1.0:
        scale = 1.0
    return _jacobi(work, v, w, off_tol_rel * scale, max_sweeps)


def jacobi_eigh(a_in, double off_tol, int max_sweeps):
    cdef double complex[:, ::1] a = np.array(a_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.empty((n, n), dtype=np.complex128)
    w_arr = np.empty(n, dtype=np.float64)
    cdef double complex[:, ::1] v = v_arr
    cdef double[::1] w = w_arr
    cdef int sweeps
    with nogil:
        sweeps = _jacobi(a, v, w, off_tol, max_sweeps)
    return w_arr, v_arr, sweeps, _off_norm(a)


def joint_table(sq_in, rr_in, sigma_in):
    cdef double complex[:, :, ::1] sq = np.array(sq_in, dtype=np.complex128, order="C")
    cdef double complex[:, :, :, ::1] rr = np.array(rr_in, dtype=np.complex128, order="C")
    cdef double complex[:, :, ::1] sigma = np.array(sigma_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t na = sq.shape[0]
    cdef Py_ssize_t d = sq.shape[1]
    cdef Py_ssize_t nb = sigma.shape[0]
    out_arr = np.zeros((na, rr.shape[1], nb), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double complex[:, ::1] tmp = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] sand = np.empty((d, d), dtype=np.complex128)
    cdef Py_ssize_t x, y, b, i, j
    with nogil:
        for x in range(na):
            for b in range(nb):
                _sandwich(sq[x], sigma[b], tmp, sand)
                for y in range(rr.shape[1]):
                    out[x, y, b] = _re_trace_prod(rr[x, y], sand)
    return out_arr


cdef void _sandwich(double complex[:, ::1] s, double complex[:, ::1] m,
                    double complex[:, ::1] tmp, double complex[:, ::1] out) noexcept nogil:
    """``out = s @ m @ s``."""
    cdef Py_ssize_t d = s.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc = acc + s[i, k] * m[k, j]
            tmp[i, j] = acc
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc = acc + tmp[i, k] * s[k, j]
            out[i, j] = acc


cdef double _re_trace_prod(double complex[:, ::1] a, double complex[:, ::1] b) noexcept nogil:
    """``Re Tr(a @ b)``."""
    cdef Py_ssize_t d = a.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex acc = 0.0
    for i in range(d):
        for j in range(d):
            acc = acc + a[i, j] * b[j, i]
    return creal(acc)


cdef int _normalize(double complex[:, :, ::1] gram, double complex[:, :, ::1] elems,
                    double complex[:, ::1] total, double complex[:, ::1] work,
                    double complex[:, ::1] v, double complex[:, ::1] c,
                    double complex[:, ::1] tmp, double[::1] w, double[::1] inv_root,
                    int[::1] keep, double kernel_ratio, double off_tol_rel,
                    int max_sweeps, double* lowest) noexcept nogil:
    """``elems_x = L^{-1/2} gram_x L^{-1/2}`` with ``L = sum_x gram_x``; kernel split evenly."""
    cdef Py_ssize_t n = gram.shape[0]
    cdef Py_ssize_t d = gram.shape[1]
    cdef Py_ssize_t x, i, j, k
    cdef double complex acc
    cdef double top = 0.0
    cdef int sweeps
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for x in range(n):
                acc = acc + gram[x, i, j]
            total[i, j] = acc
    sweeps = _herm_eig_copy(total, work, v, w, off_tol_rel, max_sweeps)
    lowest[0] = INFINITY
    for i in range(d):
        if w[i] > top:
            top = w[i]
        if w[i] < lowest[0]:
            lowest[0] = w[i]
    for i in range(d):
        keep[i] = 1 if (top > 0.0 and w[i] > kernel_ratio * top) else 0
        inv_root[i] = 1.0 / sqrt(w[i]) if keep[i] else 0.0
    for x in range(n):
        # c = diag(inv_root) v^dag gram_x v diag(inv_root) (+ kernel share)
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for k in range(d):
                    acc = acc + gram[x, i, k] * v[k, j]
                tmp[i, j] = acc
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for k in range(d):
                    acc = acc + conj(v[k, i]) * tmp[k, j]
                c[i, j] = acc * inv_root[i] * inv_root[j]
            if not keep[i]:
                c[i, i] = c[i, i] + 1.0 / n
        # elems_x = v c v^dag
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for k in range(d):
                    acc = acc + v[i, k] * c[k, j]
                tmp[i, j] = acc
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for k in range(d):
                    acc = acc + tmp[i, k] * conj(v[j, k])
                work[i, j] = acc
        for i in range(d):
            for j in range(d):
                elems[x, i, j] = 0.5 * (work[i, j] + conj(work[j, i]))
    return sweeps


def povm_from_raw(raw_in, double kernel_ratio, double off_tol_rel, int max_sweeps):
    cdef double complex[:, :, ::1] raw = np.array(raw_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = raw.shape[0]
    cdef Py_ssize_t d = raw.shape[1]
    gram_arr = np.empty((n, d, d), dtype=np.complex128)
    mid_arr = np.empty((n, d, d), dtype=np.complex128)
    elems_arr = np.empty((n, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] gram = gram_arr
    cdef double complex[:, :, ::1] mid = mid_arr
    cdef double complex[:, :, ::1] elems = elems_arr
    cdef double complex[:, ::1] total = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] work = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] v = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] c = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((d, d), dtype=np.complex128)
    cdef double[::1] w = np.empty(d, dtype=np.float64)
    cdef double[::1] inv_root = np.empty(d, dtype=np.float64)
    cdef int[::1] keep = np.empty(d, dtype=np.intc)
    cdef Py_ssize_t x, i, j, k
    cdef double complex acc
    cdef double lowest, ignored
    cdef int s1, s2

    with nogil:
        for x in range(n):
            for i in range(d):
                for j in range(d):
                    acc = 0.0
                    for k in range(d):
                        acc = acc + conj(raw[x, k, i]) * raw[x, k, j]
                    gram[x, i, j] = acc
        s1 = _normalize(gram, mid, total, work, v, c, tmp, w, inv_root, keep,
                        kernel_ratio, off_tol_rel, max_sweeps, &lowest)
        # second pass: L is now ~1, which removes round-off amplified by cond(L)
        s2 = _normalize(mid, elems, total, work, v, c, tmp, w, inv_root, keep,
                        kernel_ratio, off_tol_rel, max_sweeps, &ignored)
    if s1 < 0 or s2 < 0:
        raise ArithmeticError("Jacobi iteration did not converge")
    return elems_arr, lowest


cdef int _psd_sqrt_into(double complex[:, ::1] m, double complex[:, ::1] out,
                        double complex[:, ::1] work, double complex[:, ::1] v,
                        double complex[:, ::1] tmp, double[::1] w,
                        double snap, double off_tol_rel, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t d = m.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double top = 0.0
    cdef double complex acc
    cdef int sweeps = _herm_eig_copy(m, work, v, w, off_tol_rel, max_sweeps)
    for i in range(d):
        if w[i] < 0.0:
            w[i] = 0.0
        if w[i] > top:
            top = w[i]
    if top < 1e-300:
        top = 1e-300
    for i in range(d):
        if w[i] <= snap * d * top:
            w[i] = 0.0
        w[i] = sqrt(w[i])
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc = acc + v[i, k] * w[k] * conj(v[j, k])
            tmp[i, j] = acc
    for i in range(d):
        for j in range(d):
            out[i, j] = 0.5 * (tmp[i, j] + conj(tmp[j, i]))
    return sweeps


def raw_witness(rho_in, alice_in, bob_in, double snap, double off_tol_rel, int max_sweeps):
    cdef double complex[:, ::1] rho = np.array(rho_in, dtype=np.complex128, order="C")
    cdef double complex[:, :, ::1] alice = np.array(alice_in, dtype=np.complex128, order="C")
    cdef double complex[:, :, ::1] bob = np.array(bob_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t na = alice.shape[0]
    cdef Py_ssize_t da = alice.shape[1]
    cdef Py_ssize_t nb = bob.shape[0]
    cdef Py_ssize_t db = bob.shape[1]
    cdef double complex[:, :, ::1] sigma = np.zeros((nb, da, da), dtype=np.complex128)
    cdef double complex[:, :, ::1] sq = np.empty((na, da, da), dtype=np.complex128)
    cdef double complex[:, ::1] work = np.empty((da, da), dtype=np.complex128)
    cdef double complex[:, ::1] v = np.empty((da, da), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((da, da), dtype=np.complex128)
    cdef double complex[:, ::1] sand = np.empty((da, da), dtype=np.complex128)
    cdef double[::1] w = np.empty(da, dtype=np.float64)
    cdef double[:, ::1] delta = np.zeros((na, nb), dtype=np.float64)
    cdef Py_ssize_t x, y, b, i, j, k, l
    cdef double complex acc
    cdef double total = 0.0
    cdef int failed = 0

    with nogil:
        for b in range(nb):
            for i in range(da):
                for j in range(da):
                    acc = 0.0
                    for k in range(db):
                        for l in range(db):
                            acc = acc + bob[b, l, k] * rho[i * db + k, j * db + l]
                    sigma[b, i, j] = acc
        for x in range(na):
            if _psd_sqrt_into(alice[x], sq[x], work, v, tmp, w, snap, off_tol_rel, max_sweeps) < 0:
                failed = 1
        for y in range(na):
            for b in range(nb):
                delta[y, b] = -_re_trace_prod(alice[y], sigma[b])
        for x in range(na):
            for b in range(nb):
                _sandwich(sq[x], sigma[b], tmp, sand)
                for y in range(na):
                    delta[y, b] += _re_trace_prod(alice[y], sand)
        for y in range(na):
            for b in range(nb):
                total += fabs(delta[y, b])
    if failed:
        raise ArithmeticError("Jacobi iteration did not converge")
    return total
