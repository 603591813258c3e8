import numpy as np
import pytest

from seqmns.constructions import build_scenario
from seqmns.correlations import evaluate_scenario
from seqmns.errors import ParamCountError
from seqmns.optimize import OptConfig, decode, encode, evaluate, maximize, param_count

SMALL = dict(restarts=3, max_iters=300, seed=1)


def _assert_valid(s, tol=1e-9):
    assert abs(np.trace(s.state.matrix) - 1) <= tol
    for p in (s.alice_povm, s.bob_povm):
        assert np.abs(sum(p) - np.eye(p.dim)).max() <= tol
        for e in p:
            assert np.linalg.eigvalsh(e).min() >= -tol


@pytest.mark.parametrize("mode", ["full", "fixed_state", "fixed_alice", "projective_alice"])
def test_decode_degenerate_params(mode):
    cfg = OptConfig(mode=mode)
    for x in (np.zeros(param_count(cfg)), np.full(param_count(cfg), 0.7)):
        _assert_valid(decode(x, cfg))


def test_decode_random_params_always_valid():
    rng = np.random.default_rng(0)
    cfg = OptConfig(alice_dim=2, bob_dim=3, n_alice_outcomes=4, n_bob_outcomes=2)
    for _ in range(1000):
        x = rng.normal(scale=rng.choice([1e-3, 1.0, 30.0]), size=param_count(cfg))
        _assert_valid(decode(x, cfg))


def test_param_count_error():
    with pytest.raises(ParamCountError):
        decode(np.zeros(3), OptConfig())


def test_evaluate_agrees_with_validated_path():
    rng = np.random.default_rng(3)
    cfg = OptConfig()
    for _ in range(20):
        x = rng.normal(size=param_count(cfg))
        assert evaluate(x, cfg) == pytest.approx(evaluate_scenario(decode(x, cfg)).value, abs=1e-12)


def test_encode_trine():
    cfg = OptConfig()
    x = encode(build_scenario("trine"), cfg)
    assert evaluate(x, cfg) == pytest.approx(1 / 3, abs=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        OptConfig(mode="nope")
    with pytest.raises(ValueError):
        OptConfig(n_alice_outcomes=1)
    with pytest.raises(ValueError):
        OptConfig(restarts=0)


def test_no_violation_without_interference():
    assert maximize(OptConfig(n_alice_outcomes=2, **SMALL)).best_value <= 1e-9
    assert maximize(OptConfig(mode="projective_alice", **SMALL)).best_value <= 1e-9


def test_deterministic_and_schedule_independent():
    a = maximize(OptConfig(**SMALL))
    b = maximize(OptConfig(**SMALL))
    c = maximize(OptConfig(workers=2, **SMALL))
    assert a.per_restart_values == b.per_restart_values == c.per_restart_values
    assert np.array_equal(a.best_params, c.best_params)
    assert a.best_restart == c.best_restart


def test_more_restarts_never_worse():
    few = maximize(OptConfig(restarts=2, max_iters=300, seed=4))
    more = maximize(OptConfig(restarts=4, max_iters=300, seed=4))
    assert more.per_restart_values[:2] == few.per_restart_values
    assert more.best_value >= few.best_value


def test_best_value_is_recomputed_witness():
    r = maximize(OptConfig(**SMALL))
    assert r.best_value == evaluate_scenario(r.best_scenario).value
    assert r.best_value == max(r.per_restart_values)
    assert r.per_restart_values.index(r.best_value) == r.best_restart


def test_full_beats_projective():
    full = maximize(OptConfig(**SMALL)).best_value
    proj = maximize(OptConfig(mode="projective_alice", **SMALL)).best_value
    assert full >= proj


def test_fixed_alice_trine_reaches_one_third():
    r = maximize(OptConfig(mode="fixed_alice", restarts=4, max_iters=1500, seed=0))
    assert r.best_value >= 1 / 3 - 1e-3


@pytest.mark.slow
def test_four_outcomes_exceed_quarter():
    r = maximize(OptConfig(n_alice_outcomes=4, restarts=10, max_iters=2000, seed=7))
    assert r.best_value >= 1 / 4 - 1e-3
