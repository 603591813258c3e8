"""Sequential-measurement statistics and macroscopic no-signalling tests.

Two experiments are derived from one :class:`~seqmns.quantum.Scenario`:

* sequential: Alice measures twice (outcomes ``a0`` then ``a1``), Bob once
  (``b``), giving ``p(a0, a1, b)``;
* single-time: Alice measures once (``a1``), Bob once, giving ``p(a1, b)``.

Under macroscopic no-signalling, marginalizing ``a0`` from the sequential
table must reproduce the single-time table. The witness sums the absolute
deviations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend, matcore
from .errors import DegenerateError, DimensionError, ShapeError
from .quantum import Povm, Scenario

CLAMP = 1e-12
FEASIBILITY_TOL = 1e-9


def _clamped(p: np.ndarray) -> np.ndarray:
    out = np.where((p < 0.0) & (p >= -CLAMP), 0.0, p)
    return np.where((out > 1.0) & (out <= 1.0 + CLAMP), 1.0, out)


@dataclass(frozen=True, eq=False)
class JointTable:
    """``p[a0, a1, b]`` of the sequential experiment."""

    p: np.ndarray

    @property
    def n_a(self) -> int:
        return self.p.shape[0]

    @property
    def n_b(self) -> int:
        return self.p.shape[2]

    @property
    def clamped(self) -> np.ndarray:
        return _clamped(self.p)

    def alice_marginal(self) -> np.ndarray:
        """``p(a0, a1)`` summed over Bob."""
        return self.p.sum(axis=2)


@dataclass(frozen=True, eq=False)
class SingleTimeTable:
    """``p[a1, b]`` of the single-time experiment."""

    p: np.ndarray

    @property
    def n_a(self) -> int:
        return self.p.shape[0]

    @property
    def n_b(self) -> int:
        return self.p.shape[1]

    @property
    def clamped(self) -> np.ndarray:
        return _clamped(self.p)


@dataclass(frozen=True, eq=False)
class WitnessReport:
    value: float
    residuals: np.ndarray
    nsit_residual: float


@dataclass(frozen=True, eq=False)
class MnsModel:
    """Shared-randomness model with per-label Alice and Bob distributions.

    ``alice_dists[l, a0, a1]`` is ``p(a0, a1 | l)``; ``bob_dists[l, b]`` is
    ``p(b | l)``. Alice's two time marginals must agree for every label.
    """

    weights: np.ndarray
    alice_dists: np.ndarray
    bob_dists: np.ndarray
    labels: tuple = ()

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        a = np.asarray(self.alice_dists, dtype=float)
        b = np.asarray(self.bob_dists, dtype=float)
        if w.ndim != 1 or a.shape[0] != w.size or b.shape[0] != w.size or a.ndim != 3 or b.ndim != 2:
            raise ShapeError("inconsistent model shapes")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must be a distribution (sum {w.sum():.15g})")
        if np.any(a < -CLAMP) or np.any(b < -CLAMP):
            raise ValueError("negative conditional probabilities")
        if np.max(np.abs(a.sum(axis=(1, 2)) - 1.0)) > 1e-12 or np.max(np.abs(b.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("conditional distributions must be normalized")
        drift = np.max(np.abs(a.sum(axis=1) - a.sum(axis=2)))
        if drift > 1e-12:
            raise ValueError(f"Alice's two time marginals differ for some label ({drift:.3e})")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "alice_dists", a)
        object.__setattr__(self, "bob_dists", b)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(w.size)))

    def single_alice(self) -> np.ndarray:
        """``p(a | l)`` for a measurement at either time alone."""
        return self.alice_dists.sum(axis=1)

    def tables(self) -> tuple[JointTable, SingleTimeTable]:
        joint = np.einsum("l,lxy,lb->xyb", self.weights, self.alice_dists, self.bob_dists)
        single = np.einsum("l,ly,lb->yb", self.weights, self.single_alice(), self.bob_dists)
        return JointTable(joint), SingleTimeTable(single)

    def reconstruction_error(self, joint: JointTable, single: SingleTimeTable) -> float:
        j, s = self.tables()
        return max(matcore.max_abs_diff(j.p, joint.p), matcore.max_abs_diff(s.p, single.p))


@dataclass(frozen=True)
class Infeasible:
    """No shared-randomness model fits; ``value`` is the witness that rules it out."""

    value: float
    reason: str = "witness exceeds tolerance"


def _alice_operators(s: Scenario) -> np.ndarray:
    """``rr[a0, a1] = U_a0^dagger R_a1 U_a0``."""
    r = s.alice_povm.stacked
    n = len(r)
    if s.post_unitaries is None:
        return np.ascontiguousarray(np.broadcast_to(r, (n,) + r.shape))
    u = np.stack(s.post_unitaries)
    return np.einsum("xji,yjk,xkl->xyil", u.conj(), r, u)


def sequential_joint(s: Scenario) -> JointTable:
    p = _backend.joint_table(s.alice_povm.sqrt_elements, _alice_operators(s), s.bob_conditioned)
    return JointTable(np.asarray(p))


def single_time(s: Scenario) -> SingleTimeTable:
    p = np.einsum("yij,bji->yb", s.alice_povm.stacked, s.bob_conditioned).real
    return SingleTimeTable(p)


def _check_shapes(joint: JointTable, single: SingleTimeTable) -> None:
    if joint.p.ndim != 3 or joint.p.shape[0] != joint.p.shape[1]:
        raise ShapeError(f"joint table has shape {joint.p.shape}, expected (n_a, n_a, n_b)")
    if single.p.shape != joint.p.shape[1:]:
        raise ShapeError(
            f"single-time table shape {single.p.shape} does not match joint {joint.p.shape}"
        )


def nsit_from_tables(joint: JointTable, single: SingleTimeTable) -> float:
    """Largest violation of no-signalling in time, over both time orderings."""
    _check_shapes(joint, single)
    pa = joint.alice_marginal()
    later = single.p.sum(axis=1)
    forward = np.max(np.abs(pa.sum(axis=0) - later))
    backward = np.max(np.abs(pa.sum(axis=1) - later))
    return float(max(forward, backward))


def nsit_residual(s: Scenario) -> float:
    return nsit_from_tables(sequential_joint(s), single_time(s))


def mns_residuals(joint: JointTable, single: SingleTimeTable) -> np.ndarray:
    """``delta[a1, b] = sum_a0 p(a0, a1, b) - p(a1, b)``."""
    _check_shapes(joint, single)
    return joint.p.sum(axis=0) - single.p


def witness(joint: JointTable, single: SingleTimeTable) -> WitnessReport:
    delta = mns_residuals(joint, single)
    return WitnessReport(float(np.abs(delta).sum()), delta, nsit_from_tables(joint, single))


def evaluate_scenario(s: Scenario) -> WitnessReport:
    return witness(sequential_joint(s), single_time(s))


def construct_mns_model(
    joint: JointTable, single: SingleTimeTable, tol: float = FEASIBILITY_TOL
) -> MnsModel | Infeasible:
    """Shared-randomness model with one label per Bob outcome, or :class:`Infeasible`.

    Labels whose weight vanishes are dropped.
    """
    report = witness(joint, single)
    if report.value > tol:
        return Infeasible(report.value)
    p = joint.clamped
    backward = float(np.max(np.abs(p.sum(axis=1) - single.clamped)))
    if backward > tol:
        return Infeasible(report.value, f"first-time marginal deviates by {backward:.3e}")

    weights = p.sum(axis=(0, 1))
    if weights.sum() <= 0.0:
        raise DegenerateError("joint table has no probability mass")
    labels = [b for b in range(p.shape[2]) if weights[b] > 0.0]
    w = weights[labels]
    alice = np.stack([_equalize_marginals(p[:, :, b] / weights[b]) for b in labels])
    if np.any(alice < -CLAMP):
        return Infeasible(report.value, "no nonnegative conditional distribution fits")
    alice = np.clip(alice, 0.0, None)
    bob = np.zeros((len(labels), p.shape[2]))
    for k, b in enumerate(labels):
        bob[k, b] = 1.0
    return MnsModel(w / w.sum(), alice, bob, tuple(labels))


def _equalize_marginals(q: np.ndarray) -> np.ndarray:
    """Smallest-form additive correction giving ``q`` equal row and column sums.

    Both sums are moved to their average; the correction is of the order of
    the marginal mismatch, itself bounded by the witness value.
    """
    n = q.shape[0]
    rows, cols = q.sum(axis=1), q.sum(axis=0)
    target = 0.5 * (rows + cols)
    return q + (np.add.outer(target - rows, target - cols)) / n


def dual_basis_identity_check(p: Povm, tol: float = matcore.DEFAULT_TOL) -> float:
    """Max deviation of ``sum_a0 sqrt(R_a0) R_a1 sqrt(R_a0)`` from ``1/(4d) + R_a1^2``."""
    d = p.dim
    if len(p) != 2 * d:
        raise DimensionError(f"expected {2 * d} elements on dimension {d}, got {len(p)}")
    sq = p.sqrt_elements
    worst = 0.0
    for r in p:
        lhs = sum(s @ r @ s for s in sq)
        rhs = np.eye(d) / (4 * d) + r @ r
        worst = max(worst, matcore.max_abs_diff(lhs, rhs))
    return worst
