"""Explicit states and measurements that violate macroscopic no-signalling.

* the qubit trine POVM with a classically correlated two-qubit state and Bob
  measuring ``sigma_z``;
* its ``2d``-outcome generalization: half-weighted projectors onto the
  computational basis and onto the Fourier basis, with the ``d x d``
  classically correlated state and Bob measuring in the computational basis.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DimensionError
from .matcore import SIGMA_X, SIGMA_Z
from .quantum import DensityMatrix, Povm, Scenario

ONE = np.eye(2, dtype=np.complex128)


def _require_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise DimensionError(f"dimension must be an integer >= 2, got {d!r}")


def trine_povm() -> Povm:
    h = math.sqrt(3.0) / 2.0
    return Povm(
        (
            (ONE + SIGMA_Z) / 3.0,
            (ONE - 0.5 * SIGMA_Z + h * SIGMA_X) / 3.0,
            (ONE - 0.5 * SIGMA_Z - h * SIGMA_X) / 3.0,
        )
    )


def classical_corr_state(d: int) -> DensityMatrix:
    """``(1/d) sum_i |ii><ii|``.

    Weighted ``1/d`` for unit trace; a uniform weight of ``1/2`` only
    normalizes for ``d = 2``.
    """
    _require_dim(d)
    rho = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        rho[i * d + i, i * d + i] = 1.0 / d
    return DensityMatrix(rho)


def fourier_vector(d: int, i: int) -> np.ndarray:
    """``|mu_i> = d^{-1/2} sum_k w^{(2d - i) k} |k>`` with ``w = exp(2 pi i / d)``, for ``d <= i < 2d``."""
    _require_dim(d)
    if not d <= i < 2 * d:
        raise DimensionError(f"Fourier index must lie in [{d}, {2 * d}), got {i}")
    return np.array(
        [cmath.exp(2j * math.pi * (((2 * d - i) * k) % d) / d) for k in range(d)],
        dtype=np.complex128,
    ) / math.sqrt(d)


def dual_basis_povm(d: int) -> Povm:
    """``2d`` outcomes: ``|i><i|/2`` for ``i < d``, then ``|mu_i><mu_i|/2``."""
    _require_dim(d)
    elements = []
    for i in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[i, i] = 0.5
        elements.append(e)
    for i in range(d, 2 * d):
        mu = fourier_vector(d, i)
        elements.append(0.5 * np.outer(mu, mu.conj()))
    return Povm(tuple(elements))


def computational_povm(d: int) -> Povm:
    _require_dim(d)
    elements = []
    for b in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[b, b] = 1.0
        elements.append(e)
    return Povm(tuple(elements))


def build_scenario(kind: str, d: int = 2) -> Scenario:
    """``"trine"`` (qubits only) or ``"dual_basis"`` for any ``d >= 2``."""
    kind = kind.replace("-", "_")
    if kind == "trine":
        if d != 2:
            raise DimensionError(f"the trine scenario is two-qubit only, got d={d}")
        return Scenario(classical_corr_state(2), trine_povm(), computational_povm(2))
    if kind == "dual_basis":
        _require_dim(d)
        return Scenario(classical_corr_state(d), dual_basis_povm(d), computational_povm(d))
    raise ValueError(f"unknown construction {kind!r}; expected 'trine' or 'dual_basis'")


def analytic_sd(d: int) -> float:
    """Witness value of the dual-basis construction, ``(1 - 1/d) / 2``."""
    return 0.5 * (1.0 - 1.0 / d)
