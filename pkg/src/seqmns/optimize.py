"""Heuristic maximization of the witness over states and measurements.

Parameters are unconstrained real vectors; :func:`decode` maps every vector
to a valid scenario:

* state: a complex amplitude vector on the joint space, turned into a pure
  density matrix (the witness is convex in the state, so pure states suffice);
* POVM: raw complex matrices ``A_i`` give ``B_i = L^{-1/2} A_i^dag A_i L^{-1/2}``
  with ``L = sum_i A_i^dag A_i``. Directions where ``L`` is (numerically)
  singular are shared evenly between the outcomes, so the map is total;
* projective Alice: eigenvectors of ``G + G^dag`` for a raw complex ``G``,
  assigned round-robin to the outcomes.

Each restart runs an independent Nelder-Mead search from a start point drawn
from ``SeedSequence([seed, restart])``, so results do not depend on how the
restarts are scheduled.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _backend, matcore
from .constructions import classical_corr_state, dual_basis_povm, trine_povm
from .correlations import evaluate_scenario
from .errors import DimensionError, ParamCountError
from .quantum import DensityMatrix, Povm, Scenario

MODES = ("full", "fixed_state", "fixed_alice", "projective_alice")

# below this ratio to the largest eigenvalue, a direction of L counts as kernel
KERNEL_RATIO = 1e-7
# starts whose L has an eigenvalue below this are redrawn
DEGENERATE_EIG = 1e-12
SIMPLEX_STEP = 0.1
MAX_REDRAWS = 100


@dataclass(frozen=True)
class OptConfig:
    alice_dim: int = 2
    bob_dim: int = 2
    n_alice_outcomes: int = 3
    n_bob_outcomes: int = 2
    restarts: int = 10
    max_iters: int = 2000
    seed: int = 0
    tol: float = 1e-10
    mode: str = "full"
    reference: Scenario | None = field(default=None, compare=False)
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("alice_dim", "bob_dim", "restarts", "max_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_alice_outcomes < 2 or self.n_bob_outcomes < 2:
            raise ValueError("measurements need at least 2 outcomes")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        ref = self.reference
        if ref is not None and (
            ref.alice_dim != self.alice_dim
            or ref.bob_dim != self.bob_dim
            or ref.n_alice != self.n_alice_outcomes
            or ref.n_bob != self.n_bob_outcomes
        ):
            raise DimensionError("reference scenario does not match the configured dimensions")
        if ref is None and self.mode == "fixed_alice" and not (
            (self.alice_dim, self.n_alice_outcomes) == (2, 3)
            or self.n_alice_outcomes == 2 * self.alice_dim
        ):
            raise ValueError("fixed_alice mode needs a reference scenario for this outcome count")


@dataclass(frozen=True, eq=False)
class OptResult:
    best_value: float
    best_scenario: Scenario
    best_params: np.ndarray
    best_restart: int
    per_restart_values: tuple[float, ...]
    iterations_used: tuple[int, ...]


def _layout(cfg: OptConfig) -> list[tuple[str, int]]:
    da, db, na, nb = cfg.alice_dim, cfg.bob_dim, cfg.n_alice_outcomes, cfg.n_bob_outcomes
    state = ("state", 2 * da * db)
    alice = ("alice", 2 * na * da * da)
    bob = ("bob", 2 * nb * db * db)
    return {
        "full": [state, alice, bob],
        "fixed_state": [alice, bob],
        "fixed_alice": [state, bob],
        "projective_alice": [state, ("alice_basis", 2 * da * da), bob],
    }[cfg.mode]


def param_count(cfg: OptConfig) -> int:
    return sum(n for _, n in _layout(cfg))


def _split(params, cfg: OptConfig) -> dict[str, np.ndarray]:
    x = np.asarray(params, dtype=float)
    expected = param_count(cfg)
    if x.ndim != 1 or x.size != expected:
        raise ParamCountError(f"mode {cfg.mode!r} needs {expected} parameters, got {x.size}")
    parts, pos = {}, 0
    for name, n in _layout(cfg):
        chunk = x[pos:pos + n]
        parts[name] = chunk[0::2] + 1j * chunk[1::2]
        pos += n
    return parts


# -- raw decoding (no validation; shared by the objective and decode) ------


def _raw_state(amps: np.ndarray) -> np.ndarray:
    norm2 = float(np.vdot(amps, amps).real)
    if norm2 < 1e-24:
        return np.eye(amps.size, dtype=np.complex128) / amps.size
    return np.outer(amps, amps.conj()) / norm2


def _raw_povm(raw: np.ndarray, n: int, dim: int) -> tuple[np.ndarray, float]:
    """POVM elements from raw matrices, plus the smallest eigenvalue of ``L``."""
    elems, lowest = _backend.povm_from_raw(
        raw.reshape(n, dim, dim), KERNEL_RATIO, matcore.OFF_DIAGONAL_TOL, matcore.MAX_SWEEPS
    )
    return np.asarray(elems), float(lowest)


def _raw_projective(raw: np.ndarray, n: int, dim: int) -> np.ndarray:
    g = raw.reshape(dim, dim)
    vecs = matcore.herm_eig(g + g.conj().T).eigenvectors
    elems = np.zeros((n, dim, dim), dtype=np.complex128)
    for k in range(dim):
        elems[k % n] += np.outer(vecs[:, k], vecs[:, k].conj())
    return elems


def _reference(cfg: OptConfig) -> Scenario | None:
    if cfg.reference is not None:
        return cfg.reference
    return _default_reference(cfg)


def _default_reference(cfg: OptConfig) -> Scenario | None:
    da, db = cfg.alice_dim, cfg.bob_dim
    if cfg.mode == "fixed_state":
        if da == db:
            state = classical_corr_state(da)
        else:
            state = DensityMatrix(np.eye(da * db) / (da * db))
        return _with_state(state, cfg)
    if cfg.mode == "fixed_alice":
        if (da, cfg.n_alice_outcomes) == (2, 3):
            alice = trine_povm()
        elif cfg.n_alice_outcomes == 2 * da:
            alice = dual_basis_povm(da)
        else:
            raise ValueError(
                "fixed_alice mode needs a reference scenario for this outcome count"
            )
        return _with_alice(alice, cfg)
    return None


def _uniform_povm(n: int, dim: int) -> Povm:
    return Povm(tuple(np.eye(dim) / n for _ in range(n)))


def _with_state(state: DensityMatrix, cfg: OptConfig) -> Scenario:
    return Scenario(
        state,
        _uniform_povm(cfg.n_alice_outcomes, cfg.alice_dim),
        _uniform_povm(cfg.n_bob_outcomes, cfg.bob_dim),
    )


def _with_alice(alice: Povm, cfg: OptConfig) -> Scenario:
    d = cfg.alice_dim * cfg.bob_dim
    return Scenario(
        DensityMatrix(np.eye(d) / d), alice, _uniform_povm(cfg.n_bob_outcomes, cfg.bob_dim)
    )


def _decode_raw(params, cfg: OptConfig, ref: Scenario | None):
    parts = _split(params, cfg)
    da, db = cfg.alice_dim, cfg.bob_dim
    na, nb = cfg.n_alice_outcomes, cfg.n_bob_outcomes
    min_eig = math.inf
    if "state" in parts:
        rho = _raw_state(parts["state"])
    else:
        rho = np.asarray(ref.state.matrix)
    if "alice" in parts:
        alice, lo = _raw_povm(parts["alice"], na, da)
        min_eig = min(min_eig, lo)
    elif "alice_basis" in parts:
        alice = _raw_projective(parts["alice_basis"], na, da)
    else:
        alice = np.asarray(ref.alice_povm.stacked)
    bob, lo = _raw_povm(parts["bob"], nb, db)
    min_eig = min(min_eig, lo)
    return rho, alice, bob, min_eig


def _raw_witness(rho: np.ndarray, alice: np.ndarray, bob: np.ndarray) -> float:
    return _backend.raw_witness(
        rho, alice, bob, matcore.ROUNDOFF_SNAP, matcore.OFF_DIAGONAL_TOL, matcore.MAX_SWEEPS
    )


# -- public surface ----------------------------------------------------------


def decode(params, cfg: OptConfig) -> Scenario:
    """Validated scenario encoded by ``params`` under ``cfg``."""
    rho, alice, bob, _ = _decode_raw(params, cfg, _reference(cfg))
    return Scenario(
        DensityMatrix(rho),
        Povm(tuple(alice)),
        Povm(tuple(bob)),
    )


def evaluate(params, cfg: OptConfig) -> float:
    """Witness value of the scenario encoded by ``params``."""
    return _evaluate(params, cfg, _reference(cfg))


def _evaluate(params, cfg: OptConfig, ref: Scenario | None) -> float:
    rho, alice, bob, _ = _decode_raw(params, cfg, ref)
    return _raw_witness(rho, alice, bob)


def encode(s: Scenario, cfg: OptConfig) -> np.ndarray:
    """Parameters whose decoding reproduces ``s`` in ``full`` mode.

    Mixed states are replaced by their leading eigenvector. ``sqrt(E_i)`` is
    used as the raw matrix for each POVM element, so ``L = 1``.
    """
    if cfg.mode != "full":
        raise ValueError("encode supports full mode only")
    if (s.alice_dim, s.bob_dim, s.n_alice, s.n_bob) != (
        cfg.alice_dim, cfg.bob_dim, cfg.n_alice_outcomes, cfg.n_bob_outcomes
    ):
        raise DimensionError("scenario does not match the configured dimensions")
    amps = matcore.herm_eig(s.state.matrix).eigenvectors[:, -1]
    chunks = [amps]
    chunks += [matcore.psd_sqrt(e).ravel() for e in s.alice_povm]
    chunks += [matcore.psd_sqrt(e).ravel() for e in s.bob_povm]
    z = np.concatenate(chunks)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def _start_point(cfg: OptConfig, restart: int, ref: Scenario | None) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, restart]))
    n = param_count(cfg)
    for _ in range(MAX_REDRAWS):
        x = rng.standard_normal(n)
        if _decode_raw(x, cfg, ref)[3] >= DEGENERATE_EIG:
            return x
    return x


def _run_restart(cfg: OptConfig, restart: int) -> tuple[np.ndarray, float, int]:
    ref = _reference(cfg)
    x0 = _start_point(cfg, restart, ref)
    simplex = np.vstack([x0, x0 + SIMPLEX_STEP * np.eye(x0.size)])
    res = minimize(
        lambda x: -_evaluate(x, cfg, ref),
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.max_iters,
            "maxfev": 10**9,
            "xatol": cfg.tol,
            "fatol": cfg.tol,
            "initial_simplex": simplex,
            "adaptive": False,
        },
    )
    return np.asarray(res.x), float(-res.fun), int(res.nit)


def maximize(cfg: OptConfig) -> OptResult:
    """Best witness value found over ``cfg.restarts`` seeded Nelder-Mead runs.

    The value is a lower bound on the true maximum, nothing more.
    """
    restarts = range(cfg.restarts)
    if cfg.workers > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(_run_restart, [cfg] * cfg.restarts, restarts))
    else:
        runs = [_run_restart(cfg, r) for r in restarts]

    values = []
    scenarios = []
    for x, _, _ in runs:
        s = decode(x, cfg)
        scenarios.append(s)
        values.append(evaluate_scenario(s).value)
    best = max(range(len(values)), key=lambda r: (values[r], -r))
    return OptResult(
        best_value=values[best],
        best_scenario=scenarios[best],
        best_params=runs[best][0],
        best_restart=best,
        per_restart_values=tuple(values),
        iterations_used=tuple(it for _, _, it in runs),
    )


def default_workers() -> int:
    return os.cpu_count() or 1
