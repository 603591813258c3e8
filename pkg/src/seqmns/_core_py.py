"""Pure-Python/numpy implementations of the numerical kernels.

Mirrors ``_core.pyx`` function for function. Used when the compiled
extension is unavailable or when ``SEQMNS_PURE_PYTHON=1`` is set.
"""

from __future__ import annotations

import math

import numpy as np


def _off_norm(a):
    n = a.shape[0]
    total = 0.0
    for p in range(n - 1):
        row = a[p, p + 1:]
        total += float(np.vdot(row, row).real)
    return math.sqrt(2.0 * total)


def jacobi_eigh(a, off_tol, max_sweeps):
    """Cyclic complex Jacobi on a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps, off_norm)``; eigenvalues are
    unsorted, eigenvectors are the columns of the accumulated rotation.
    ``sweeps`` is -1 when ``max_sweeps`` was exhausted.
    """
    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    for k in range(n):
        a[k, k] = a[k, k].real

    sweeps = 0
    off = _off_norm(a)
    while off > off_tol:
        if sweeps >= max_sweeps:
            return a.diagonal().real.copy(), v, -1, off
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                zeta = (aqq - app) / (2.0 * r)
                t = 1.0 / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                if zeta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sph = s * phase.conjugate()

                # columns: A <- A G
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - sph * col_q
                a[:, q] = s * col_p + c * phase.conjugate() * col_q
                # rows: A <- G^H A
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * row_p + c * phase * row_q

                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - sph * vq
                v[:, q] = s * vp + c * phase.conjugate() * vq
        off = _off_norm(a)
    return a.diagonal().real.copy(), v, sweeps, off


def joint_table(sq, rr, sigma):
    """``p[a0, a1, b] = Re Tr(rr[a0, a1] @ sq[a0] @ sigma[b] @ sq[a0])``."""
    sandwiched = np.einsum("xij,bjk,xkl->xbil", sq, sigma, sq)
    return np.einsum("xyij,xbji->xyb", rr, sandwiched).real.copy()


def _herm_eig(m, off_tol_rel, max_sweeps):
    m = 0.5 * (m + m.conj().T)
    off_tol = off_tol_rel * max(1.0, float(np.linalg.norm(m)))
    w, v, sweeps, _ = jacobi_eigh(m, off_tol, max_sweeps)
    if sweeps < 0:
        raise ArithmeticError("Jacobi iteration did not converge")
    return w, v


def _normalize(gram, kernel_ratio, off_tol_rel, max_sweeps):
    n, d = gram.shape[0], gram.shape[1]
    w, v = _herm_eig(gram.sum(axis=0), off_tol_rel, max_sweeps)
    top = max(float(w.max()), 0.0)
    keep = w > kernel_ratio * top if top > 0.0 else np.zeros(d, dtype=bool)
    inv_root = np.zeros(d)
    inv_root[keep] = 1.0 / np.sqrt(w[keep])
    c = np.einsum("ji,xjk,kl->xil", v.conj(), gram, v) * np.outer(inv_root, inv_root)
    c = c + np.diag((~keep).astype(float)) / n
    elems = np.einsum("ij,xjk,lk->xil", v, c, v.conj())
    return 0.5 * (elems + elems.conj().transpose(0, 2, 1)), float(w.min())


def povm_from_raw(raw, kernel_ratio, off_tol_rel, max_sweeps):
    """POVM ``L^{-1/2} A_x^dag A_x L^{-1/2}`` from raw matrices ``A_x``.

    Eigen-directions of ``L`` below ``kernel_ratio`` times its largest
    eigenvalue are split evenly between the outcomes. Also returns the
    smallest eigenvalue of ``L``.
    """
    gram = np.einsum("xji,xjk->xik", raw.conj(), raw)
    elems, lowest = _normalize(gram, kernel_ratio, off_tol_rel, max_sweeps)
    # second pass: L is now ~1, which removes round-off amplified by cond(L)
    elems, _ = _normalize(elems, kernel_ratio, off_tol_rel, max_sweeps)
    return elems, lowest


def _psd_sqrt(m, snap, off_tol_rel, max_sweeps):
    w, v = _herm_eig(m, off_tol_rel, max_sweeps)
    w = np.clip(w, 0.0, None)
    w[w <= snap * len(w) * max(float(w.max()), 1e-300)] = 0.0
    s = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def raw_witness(rho, alice, bob, snap, off_tol_rel, max_sweeps):
    """Witness value straight from a density matrix and stacked POVM elements."""
    na, da = alice.shape[0], alice.shape[1]
    db = bob.shape[1]
    sigma = np.einsum("blk,ikjl->bij", bob, rho.reshape(da, db, da, db))
    sq = np.stack([_psd_sqrt(e, snap, off_tol_rel, max_sweeps) for e in alice])
    joint = joint_table(sq, np.broadcast_to(alice, (na,) + alice.shape), sigma)
    single = np.einsum("yij,bji->yb", alice, sigma).real
    return float(np.abs(joint.sum(axis=0) - single).sum())
