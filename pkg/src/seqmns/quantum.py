"""Validated states, measurements and two-party scenarios.

Objects validate eagerly in ``__post_init__``; an invalid state or POVM cannot
be constructed. The bipartite tensor ordering is Alice (x) Bob everywhere, and
outcome labels are zero-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import matcore
from .errors import (
    CompletenessError,
    DimensionError,
    HermitianityError,
    NotPsdError,
    TraceError,
    UnitarityError,
)
from .matcore import DEFAULT_TOL


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=np.complex128)
    m.setflags(write=False)
    return m


def _check_psd(m: np.ndarray, tol: float, what: str) -> None:
    herm = matcore.hermiticity_residual(m)
    if herm > tol:
        raise HermitianityError(f"{what} is not Hermitian (residual {herm:.3e})", herm)
    lowest = float(matcore.herm_eig(m, tol).eigenvalues[0])
    if lowest < -tol:
        raise NotPsdError(f"{what} is not PSD (lowest eigenvalue {lowest:.3e})", -lowest)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        m = matcore.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        _check_psd(m, self.tol, "state")
        tr = matcore.trace(m)
        residual = abs(tr - 1.0)
        if residual > self.tol:
            raise TraceError(f"state trace is {tr.real:.12g}, not 1 (residual {residual:.3e})", residual)
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple[np.ndarray, ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if len(self.elements) < 2:
            raise DimensionError(f"a POVM needs at least 2 elements, got {len(self.elements)}")
        mats = [matcore.as_matrix(e) for e in self.elements]
        dim = mats[0].shape[0]
        for i, e in enumerate(mats):
            if e.shape != (dim, dim):
                raise DimensionError(f"element {i} has shape {e.shape}, expected {(dim, dim)}")
            _check_psd(e, self.tol, f"POVM element {i}")
        residual = matcore.max_abs_diff(sum(mats), np.eye(dim))
        if residual > self.tol:
            raise CompletenessError(
                f"POVM elements do not sum to identity (residual {residual:.3e})", residual
            )
        object.__setattr__(self, "elements", tuple(_frozen(e) for e in mats))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.elements[i]

    @cached_property
    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)

    @cached_property
    def sqrt_elements(self) -> np.ndarray:
        return np.stack([matcore.psd_sqrt(e, self.tol) for e in self.elements])


@dataclass(frozen=True, eq=False)
class Scenario:
    """Bipartite state plus Alice's (sequentially repeated) and Bob's POVMs.

    ``post_unitaries[a0]`` is applied after Alice's first outcome ``a0``;
    ``None`` means the Lüders update with no extra unitary.
    """

    state: DensityMatrix
    alice_povm: Povm
    bob_povm: Povm
    post_unitaries: tuple[np.ndarray, ...] | None = None
    tol: float = field(default=DEFAULT_TOL)

    def __post_init__(self) -> None:
        if self.state.dim != self.alice_dim * self.bob_dim:
            raise DimensionError(
                f"state dimension {self.state.dim} != {self.alice_dim} x {self.bob_dim}"
            )
        if self.post_unitaries is not None:
            us = tuple(matcore.as_matrix(u) for u in self.post_unitaries)
            if len(us) != len(self.alice_povm):
                raise DimensionError(
                    f"{len(us)} post-measurement unitaries for {len(self.alice_povm)} outcomes"
                )
            ident = np.eye(self.alice_dim)
            for i, u in enumerate(us):
                if u.shape != ident.shape:
                    raise DimensionError(f"unitary {i} has shape {u.shape}")
                residual = matcore.max_abs_diff(u.conj().T @ u, ident)
                if residual > self.tol:
                    raise UnitarityError(f"post unitary {i} is not unitary (residual {residual:.3e})", residual)
            object.__setattr__(self, "post_unitaries", tuple(_frozen(u) for u in us))

    @property
    def alice_dim(self) -> int:
        return self.alice_povm.dim

    @property
    def bob_dim(self) -> int:
        return self.bob_povm.dim

    @property
    def n_alice(self) -> int:
        return len(self.alice_povm)

    @property
    def n_bob(self) -> int:
        return len(self.bob_povm)

    @cached_property
    def bob_conditioned(self) -> np.ndarray:
        """``sigma[b] = Tr_B[(1 (x) M_b) rho]`` so that ``Tr((X (x) M_b) rho) = Tr(X sigma[b])``."""
        da, db = self.alice_dim, self.bob_dim
        rho4 = self.state.matrix.reshape(da, db, da, db)
        return np.einsum("blk,ikjl->bij", self.bob_povm.stacked, rho4)


def validate_state(m, tol: float = DEFAULT_TOL) -> DensityMatrix:
    return DensityMatrix(np.asarray(m, dtype=np.complex128), tol)


def validate_povm(elements: Sequence, tol: float = DEFAULT_TOL) -> Povm:
    if len(elements) == 0:
        raise DimensionError("a POVM needs at least 2 elements, got 0")
    return Povm(tuple(np.asarray(e, dtype=np.complex128) for e in elements), tol)


def is_self_commuting(p: Povm, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether all POVM elements pairwise commute, with the largest commutator entry."""
    worst = 0.0
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            worst = max(worst, matcore.max_abs(matcore.commutator(p[i], p[j])))
    return worst <= tol, worst


def is_scaled_projector_povm(p: Povm, tol: float = DEFAULT_TOL) -> bool:
    """Whether every element is a positive multiple of a projector."""
    for e in p:
        w = matcore.herm_eig(e, tol).eigenvalues
        nonzero = w[w > tol]
        if nonzero.size and nonzero.max() - nonzero.min() > tol:
            return False
    return True
