"""Loop orchestration, the registry and the canonical metric."""

import numpy as np
import pytest

from tensorid.monodromy import (
    SolutionRegistry,
    StopPolicy,
    canonical_distance,
    draw_loop,
    solve,
    triangle_loop,
)
from tensorid.waring import (
    Decomposition,
    Summand,
    WaringSpec,
    build_system,
    decomposition_sampler,
    enumerate_decompositions,
    random_real_start,
    sylvester_oracle,
    tracking_settings,
)


def _dec(*pairs):
    return Decomposition(tuple(Summand((complex(l),), complex(lam)) for l, lam in pairs))


def test_canonical_distance_permutation_invariant():
    a = _dec((1.0, 2.0), (3.0, -1.0), (0.5j, 4.0))
    b = Decomposition(tuple(reversed(a.summands)))
    assert canonical_distance(a, b) == 0.0


def test_canonical_distance_single_perturbation():
    # all coordinates below 1: the size normalization keeps the distance
    # within a factor 2 of the raw perturbation
    a = _dec((0.3, 0.7), (-0.2, 0.4))
    b = _dec((0.3, 0.7 + 1e-3), (-0.2, 0.4))
    d = canonical_distance(a, b)
    assert 5e-4 <= d <= 2e-3


def test_canonical_distance_shape_mismatch():
    a = _dec((1.0, 2.0))
    b = _dec((1.0, 2.0), (2.0, 1.0))
    with pytest.raises(ValueError):
        canonical_distance(a, b)


def test_canonical_distance_conjugate_detects_autoconjugacy():
    # multiset closed under conjugation but not real
    a = _dec((1j, 2.0), (-1j, 2.0))
    assert canonical_distance(a, a.conjugate()) == 0.0
    b = _dec((1j, 2.0), (0.5j, 1.0))
    assert canonical_distance(b, b.conjugate()) > 1e-3


def test_stop_policy_validation():
    with pytest.raises(ValueError):
        StopPolicy(stable_loops=0)
    with pytest.raises(ValueError):
        StopPolicy(target_count=0)


def test_registry_idempotent_and_rejects_non_solutions():
    spec = WaringSpec(3, 1, 2)
    start, tensor = random_real_start(spec, seed=2)
    sys_ = build_system(spec)
    reg = SolutionRegistry(sys_, np.asarray(tensor.coeffs), n=1)
    assert reg.insert(start)
    assert not reg.insert(start)  # duplicate
    assert len(reg) == 1
    junk = Decomposition(
        (Summand((0.123,), 1.0 + 0j), Summand((4.56,), -2.0 + 0j))
    )
    assert not reg.insert(junk)
    assert len(reg) == 1


def test_registry_serialize_shape():
    spec = WaringSpec(3, 1, 2)
    start, tensor = random_real_start(spec, seed=2)
    reg = SolutionRegistry(build_system(spec), np.asarray(tensor.coeffs), n=1)
    reg.insert(start)
    reg.history.append((0, 1))
    blob = reg.serialize(d=3)
    assert blob["r"] == 2 and blob["n"] == 1 and blob["d"] == 3
    assert len(blob["solutions"]) == 1
    summand = blob["solutions"][0]["summands"][0]
    assert len(summand["l"]) == 1 and len(summand["l"][0]) == 2
    assert blob["history"] == [{"loop": 0, "new": 1}]


def test_draw_loop_uses_sampler_and_twist():
    rng = np.random.default_rng(0)
    base = np.ones(4, dtype=complex)
    calls = []

    def sampler(r):
        calls.append(1)
        return np.full(4, 2.0 + 1.0j)

    loop = draw_loop(base, rng, twist_exit=True, sampler=sampler)
    assert len(calls) == 2
    assert np.allclose(loop.aux_params[0], 2.0 + 1.0j)
    assert abs(abs(loop.gamma_out) - 1.0) < 1e-12
    plain = draw_loop(base, rng, twist_exit=False)
    assert plain.gamma_out == 1.0 + 0j


def test_binary_cubic_loops_find_nothing_new():
    # unique decomposition: every loop after the first returns 0 new
    spec = WaringSpec(3, 1, 2)
    start, tensor = random_real_start(spec, seed=4)
    reg = enumerate_decompositions(
        spec, start, tensor, policy=StopPolicy(stable_loops=5, max_loops=50), seed=4
    )
    assert len(reg) == 1
    assert all(new == 0 for _, new in reg.history)
    oracle = sylvester_oracle(tensor, 2)
    assert canonical_distance(oracle, reg.solutions[0]) < 1e-6


def test_binary_quintic_matches_oracle():
    spec = WaringSpec(5, 1, 3)
    start, tensor = random_real_start(spec, seed=7)
    reg = enumerate_decompositions(
        spec, start, tensor, policy=StopPolicy(stable_loops=5, max_loops=50), seed=7
    )
    assert len(reg) == 1
    oracle = sylvester_oracle(tensor, 3)
    assert canonical_distance(oracle, reg.solutions[0]) < 1e-6


def test_solve_seed_determinism():
    spec = WaringSpec(5, 1, 3)
    start, tensor = random_real_start(spec, seed=11)
    kw = dict(policy=StopPolicy(stable_loops=3, max_loops=20), seed=123)
    a = enumerate_decompositions(spec, start, tensor, **kw)
    b = enumerate_decompositions(spec, start, tensor, **kw)
    assert a.history == b.history
    assert len(a) == len(b)
    for da, db in zip(a.solutions, b.solutions):
        assert canonical_distance(da, db) == 0.0


def test_solve_rejects_bad_start():
    spec = WaringSpec(3, 1, 2)
    _, tensor = random_real_start(spec, seed=1)
    bad = Decomposition((Summand((1.0,), 1.0 + 0j), Summand((2.0,), 1.0 + 0j)))
    with pytest.raises(ValueError):
        solve(build_system(spec), np.asarray(tensor.coeffs), bad)


def test_registry_monotone_history():
    spec = WaringSpec(5, 1, 3)
    start, tensor = random_real_start(spec, seed=5)
    reg = enumerate_decompositions(
        spec, start, tensor, policy=StopPolicy(stable_loops=3, max_loops=20), seed=5
    )
    assert all(new >= 0 for _, new in reg.history)
    assert [i for i, _ in reg.history] == list(range(len(reg.history)))


def test_triangle_loop_transports_all_solutions():
    spec = WaringSpec(5, 1, 3)
    start, tensor = random_real_start(spec, seed=6)
    sys_ = build_system(spec)
    base = np.asarray(tensor.coeffs)
    reg = SolutionRegistry(sys_, base, n=1)
    reg.insert(start)
    rng = np.random.default_rng(0)
    loop = draw_loop(base, rng, twist_exit=True, sampler=decomposition_sampler(spec, start))
    new = triangle_loop(reg, loop, tracking_settings())
    assert new >= 0
    assert len(reg) >= 1  # the start never disappears
