import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brownian_search.search_lab import (
    SearchStats,
    ToyFunction,
    VerificationError,
    bht_predicted_queries,
    bht_toy_run,
    brownian_preimage,
    default_dp_bits,
    exhaustive_preimage,
    grover_closed_form,
    grover_iterations,
    grover_simulate,
    grover_state,
    verify_collision,
    verify_preimage,
    vow_collision,
)
from brownian_search.walk_engine import build_tree_chain, exact_hitting_time


# ----------------------------------------------------------------------------
# toy functions


@settings(max_examples=50)
@given(st.integers(1, 30), st.integers(0, 2**32), st.lists(st.integers(0, 2**30 - 1), min_size=1, max_size=30))
def test_toy_function_vector_matches_scalar(bits, seed, xs):
    f = ToyFunction(bits, seed)
    xs = [x % f.size for x in xs]
    assert list(f.evaluate(xs)) == [f(x) for x in xs]
    assert all(0 <= f(x) < f.size for x in xs)


def test_toy_function_kinds():
    assert ToyFunction(8, kind="identity")(37) == 37
    assert ToyFunction(8, kind="constant")(37) == 0
    assert ToyFunction(12, seed=1)(5) != ToyFunction(12, seed=2)(5) or ToyFunction(12, 1)(6) != ToyFunction(12, 2)(6)
    with pytest.raises(ValueError):
        ToyFunction(8, kind="hash")


def test_random_function_looks_random():
    f = ToyFunction(16, seed=4)
    image = np.unique(f.evaluate(np.arange(f.size)))
    # a random map covers about 1 - 1/e of its range
    assert image.size / f.size == pytest.approx(1 - 1 / math.e, abs=0.01)


def test_verifiers():
    f = ToyFunction(8, kind="identity")
    verify_preimage(f, 3, 3)
    with pytest.raises(VerificationError):
        verify_preimage(f, 3, 4)
    with pytest.raises(VerificationError):
        verify_collision(f, 1, 2)
    with pytest.raises(VerificationError):
        verify_collision(ToyFunction(8, kind="constant"), 1, 1)


# ----------------------------------------------------------------------------
# vOW


def test_default_dp_bits():
    assert default_dp_bits(20, 4) == 8
    assert default_dp_bits(20, 64) == 4
    assert default_dp_bits(2, 64) == 0
    assert default_dp_bits(21, 1) == 11


def test_vow_constant_function():
    s = vow_collision(ToyFunction(2, kind="constant"), workers=2)
    assert s.found and s.serial_depth <= 2
    verify_collision(ToyFunction(2, kind="constant"), *s.result)


def test_vow_identity_not_found():
    s = vow_collision(ToyFunction(8, kind="identity"), workers=4)
    assert not s.found and s.result is None


@pytest.mark.parametrize("seed", range(10))
def test_vow_random_collisions_verify(seed):
    f = ToyFunction(16, seed=seed)
    s = vow_collision(f, workers=8, seed=seed)
    assert s.found
    verify_collision(f, *s.result)
    assert s.oracle_queries >= s.serial_depth


def test_vow_deterministic():
    f = ToyFunction(14, seed=3)
    a, b = vow_collision(f, 4, seed=9), vow_collision(f, 4, seed=9)
    assert a == b


def test_vow_depth_shrinks_with_workers():
    depth = {}
    for M in (2, 32):
        runs = [vow_collision(ToyFunction(16, seed=s), M, seed=s) for s in range(20)]
        depth[M] = np.mean([r.serial_depth for r in runs])
    assert depth[32] < depth[2] / 4


# ----------------------------------------------------------------------------
# exhaustive


def test_exhaustive_identity():
    s = exhaustive_preimage(ToyFunction(4, kind="identity"), 7, workers=1)
    assert s.result == 7 and s.oracle_queries == 8 and s.serial_depth == 8


def test_exhaustive_full_parallel():
    f = ToyFunction(10, seed=1)
    s = exhaustive_preimage(f, f(123), workers=f.size)
    assert s.serial_depth == 1 and s.found


def test_exhaustive_partition_bound():
    f = ToyFunction(16, seed=2)
    target = f(40_000)
    s = exhaustive_preimage(f, target, workers=16)
    assert s.serial_depth <= 2**12
    verify_preimage(f, s.result, target)
    # least preimage
    assert s.result == int(np.flatnonzero(f.evaluate(np.arange(f.size)) == target)[0])


def test_exhaustive_not_found():
    s = exhaustive_preimage(ToyFunction(6, kind="constant"), 5, workers=4)
    assert not s.found and s.oracle_queries == 64 and s.serial_depth == 16


# ----------------------------------------------------------------------------
# Brownian preimage


def test_brownian_small_matches_exact():
    f = ToyFunction(1, kind="identity")
    s = brownian_preimage(f, 1, check_chain=1, trials=100_000, seed=1)
    exact = exact_hitting_time(build_tree_chain(1, 1, marked_leaves=(1,)))
    hit = s.details["hitting"]
    assert abs(hit.mean - exact) <= 4 * hit.ci95_half_width
    assert s.result == 1


def test_brownian_bound_h10():
    f = ToyFunction(10, seed=6)
    s = brownian_preimage(f, f(17), check_chain=4, trials=200, seed=2)
    g = s.details["graph"]
    assert s.details["bound"] == 2 * (g.num_vertices - 1) * 14
    assert s.details["bound_ok"] and s.details["hitting"].mean <= s.details["bound"]
    for x in s.details["preimages"]:
        verify_preimage(f, x, f(17))


def test_brownian_h0_is_chain():
    f = ToyFunction(0, kind="identity")
    s = brownian_preimage(f, 0, check_chain=5, trials=20_000, seed=3)
    hit = s.details["hitting"]
    assert exact_hitting_time(s.details["graph"]) == pytest.approx(25.0, rel=1e-9)
    assert abs(hit.mean - 25.0) <= 4 * hit.ci95_half_width


def test_brownian_requires_preimage():
    with pytest.raises(ValueError, match="no preimage"):
        brownian_preimage(ToyFunction(4, kind="constant"), 3, 2, 10)


# ----------------------------------------------------------------------------
# Grover and BHT


def test_grover_iterations_examples():
    assert grover_iterations(2**10, 1) == 25
    assert grover_iterations(16, 16) == 0
    assert bht_predicted_queries(8, 2) == 3


def test_grover_examples():
    assert grover_simulate(3, [5], 0) == pytest.approx(1 / 8, abs=1e-15)
    assert grover_simulate(2, [1], 1) == pytest.approx(1.0, abs=1e-15)
    assert grover_closed_form(4, 1, 1) == pytest.approx(1.0, abs=1e-15)
    assert grover_simulate(10, [77], 25) >= 0.99


@pytest.mark.parametrize("n", [3, 6, 9])
def test_grover_state_normalized(n):
    psi = grover_state(n, [0, 3], grover_iterations(2**n, 2))
    assert float(psi @ psi) == pytest.approx(1.0, abs=1e-10)


def test_grover_errors():
    with pytest.raises(ValueError):
        grover_simulate(21, [0], 1)
    with pytest.raises(ValueError):
        grover_simulate(3, [8], 1)
    with pytest.raises(ValueError):
        grover_simulate(3, [], 1)


def test_bht_constant():
    s = bht_toy_run(ToyFunction(6, kind="constant"), 1, seed=0)
    assert s.found and s.oracle_queries <= 2
    verify_collision(ToyFunction(6, kind="constant"), *s.result)


def test_bht_identity_not_found():
    s = bht_toy_run(ToyFunction(8, kind="identity"), 4)
    assert not s.found and s.result is None


@pytest.mark.parametrize("seed", range(5))
def test_bht_random(seed):
    f = ToyFunction(12, seed=seed)
    s = bht_toy_run(f, 16, seed=seed)
    if s.details["marked"] == 0:
        pytest.skip("table has no collision partner for this seed")
    assert s.found and s.details["success_probability"] >= 0.5
    verify_collision(f, *s.result)


def test_search_stats_is_plain_record():
    s = SearchStats("x", 1, 1, 1, None, 1)
    assert s.found and s.details == {}
