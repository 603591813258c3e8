import numpy as np
import pytest

from seqmns.constructions import (
    analytic_sd,
    classical_corr_state,
    computational_povm,
    dual_basis_povm,
    fourier_vector,
    build_scenario,
    trine_povm,
)
from seqmns.correlations import evaluate_scenario, nsit_residual
from seqmns.errors import DimensionError
from seqmns.matcore import partial_trace
from seqmns.quantum import Scenario, is_self_commuting

import randops


def test_trine_elements():
    p = trine_povm()
    assert np.allclose(p[0], np.diag([2 / 3, 0]), atol=1e-15)
    assert np.allclose(sum(p), np.eye(2), atol=1e-15)
    for e in p:
        assert np.allclose(np.linalg.eigvalsh(e), [0, 2 / 3], atol=1e-15)
        assert np.trace(e).real == pytest.approx(2 / 3)


@pytest.mark.parametrize("d", range(2, 7))
def test_classical_state(d):
    rho = classical_corr_state(d).matrix
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(partial_trace(rho, (d, d), keep=0), np.eye(d) / d)


@pytest.mark.parametrize("d", range(2, 9))
def test_dual_basis_structure(d):
    p = dual_basis_povm(d)
    assert len(p) == 2 * d
    assert np.allclose(sum(p.elements[:d]), np.eye(d) / 2, atol=1e-14)
    assert np.allclose(sum(p.elements[d:]), np.eye(d) / 2, atol=1e-14)
    for i in range(d, 2 * d):
        mu = fourier_vector(d, i)
        assert np.allclose(np.abs(mu) ** 2, 1 / d)
    assert not is_self_commuting(p)[0]


def test_dual_basis_d2_vectors():
    s = 1 / np.sqrt(2)
    vecs = {tuple(np.round(fourier_vector(2, i), 12)) for i in (2, 3)}
    assert vecs == {tuple(np.round([s, s], 12)), tuple(np.round([s, -s], 12))}


def test_fourier_index_range():
    with pytest.raises(DimensionError):
        fourier_vector(3, 2)


def test_computational_povm():
    p = computational_povm(3)
    assert np.array_equal(p[1], np.diag([0, 1, 0]).astype(complex))


def test_construction_values():
    assert evaluate_scenario(build_scenario("trine")).value == pytest.approx(1 / 3, abs=1e-12)
    assert evaluate_scenario(build_scenario("dual-basis", 4)).value == pytest.approx(3 / 8, abs=1e-12)
    assert evaluate_scenario(build_scenario("dual_basis", 2)).value == pytest.approx(1 / 4, abs=1e-12)
    assert analytic_sd(4) == 3 / 8


def test_bad_constructions():
    with pytest.raises(DimensionError):
        build_scenario("trine", 3)
    with pytest.raises(DimensionError):
        dual_basis_povm(1)
    with pytest.raises(ValueError):
        build_scenario("pentagon")


def test_classical_state_gives_nsit_for_any_alice():
    rng = np.random.default_rng(8)
    for _ in range(20):
        d = int(rng.integers(2, 5))
        s = Scenario(classical_corr_state(d), randops.povm(rng, d, 3), computational_povm(d))
        assert nsit_residual(s) <= 1e-12
