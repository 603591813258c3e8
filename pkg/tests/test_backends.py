"""The compiled core and the numpy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from seqmns import _backend, _core_py, matcore
from seqmns.constructions import build_scenario
from seqmns.optimize import KERNEL_RATIO

import randops

IMPLS = _backend.implementations()


def test_backend_selected():
    assert _backend.BACKEND in IMPLS


@pytest.fixture(params=sorted(IMPLS))
def impl(request):
    return IMPLS[request.param]


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_jacobi(impl, d):
    h = randops.hermitian(np.random.default_rng(d), d)
    w, v, sweeps, off = impl.jacobi_eigh(h, 1e-13, 100)
    assert sweeps >= 0 and off <= 1e-13
    assert matcore.max_abs_diff((v * w) @ v.conj().T, h) <= 1e-12
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(h), atol=1e-12)


def test_jacobi_reports_non_convergence(impl):
    h = randops.hermitian(np.random.default_rng(0), 4)
    assert impl.jacobi_eigh(h, 1e-13, 0)[2] == -1


def test_kernels_agree():
    if "cython" not in IMPLS:
        pytest.skip("compiled core not built")
    fast, slow = IMPLS["cython"], _core_py
    rng = np.random.default_rng(5)
    for da, db, na, nb in [(2, 2, 3, 2), (3, 2, 4, 3), (2, 3, 2, 2)]:
        raw = rng.normal(size=(na, da, da)) + 1j * rng.normal(size=(na, da, da))
        ea, la = fast.povm_from_raw(raw, KERNEL_RATIO, 1e-13, 100)
        eb, lb = slow.povm_from_raw(raw, KERNEL_RATIO, 1e-13, 100)
        assert matcore.max_abs_diff(ea, eb) <= 1e-12 and abs(la - lb) <= 1e-12
        s = randops.scenario(rng, da, db, na, nb)
        args = (s.state.matrix, s.alice_povm.stacked, s.bob_povm.stacked, matcore.ROUNDOFF_SNAP, 1e-13, 100)
        assert abs(fast.raw_witness(*args) - slow.raw_witness(*args)) <= 1e-12
        sq, rr, sig = s.alice_povm.sqrt_elements, np.broadcast_to(s.alice_povm.stacked, (na, na, da, da)), s.bob_conditioned
        assert matcore.max_abs_diff(fast.joint_table(sq, rr, sig), slow.joint_table(sq, rr, sig)) <= 1e-14


def test_raw_witness_on_trine(impl):
    s = build_scenario("trine")
    value = impl.raw_witness(
        s.state.matrix, s.alice_povm.stacked, s.bob_povm.stacked, matcore.ROUNDOFF_SNAP, 1e-13, 100
    )
    assert value == pytest.approx(1 / 3, abs=1e-12)


def test_kernels_accept_read_only_inputs(impl):
    s = build_scenario("trine")
    assert not s.state.matrix.flags.writeable
    impl.raw_witness(s.state.matrix, s.alice_povm.stacked, s.bob_povm.stacked, 1e-15, 1e-13, 100)


def test_env_forces_fallback():
    env = dict(os.environ, SEQMNS_PURE_PYTHON="1")
    code = "import numpy as np; from seqmns import _backend, optimize; print(_backend.BACKEND, optimize.evaluate(list(np.linspace(-1, 1, 48)), optimize.OptConfig()))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, value = out.stdout.split()
    assert name == "python"
    from seqmns import optimize

    assert float(value) == pytest.approx(optimize.evaluate(list(np.linspace(-1, 1, 48)), optimize.OptConfig()), abs=1e-12)
