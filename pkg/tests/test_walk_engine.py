import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brownian_search import rng
from brownian_search.walk_engine import (
    GraphSizeError,
    WalkGraph,
    WalkParams,
    build_chain,
    build_tree,
    build_tree_chain,
    error_probability,
    estimate_hitting_time,
    exact_hitting_time,
    forward_bias,
    simulate_walk,
    trial_keys,
)

from conftest import tree_hitting_oracle


def reference_walk(graph, params, seed, trial=0):
    """Plain-Python walk using the documented stream rule; oracle for the kernel."""
    key = rng.stream_key(seed, trial)
    p_fwd, _ = forward_bias(params.epsilon, params.kT)
    v = graph.start
    if v in graph.finish:
        return 0
    for s in range(params.budget_for(graph)):
        m = rng.draw(key, s) >> 11
        u = m / 2.0**53
        nb = graph.neighbors[v]
        w = graph.forward[v]
        if params.epsilon > 0 and w >= 0:
            v = w if u < p_fwd else (nb[0] if nb[1] == w else nb[1])
        else:
            v = nb[(m * len(nb)) >> 53]
        if v in graph.finish:
            return s + 1
    return -1


def biased_chain_oracle(length, p, q):
    """Sum of expected one-step advance times with a reflecting start."""
    total, step = 0.0, 1.0
    for i in range(length):
        if i > 0:
            step = (1.0 + q * step) / p
        total += step
    return total


# ----------------------------------------------------------------------------
# builders


def test_chain_shapes():
    g0 = build_chain(0)
    assert g0.num_vertices == 1 and g0.start in g0.finish
    g1 = build_chain(1)
    assert g1.num_vertices == 2 and g1.num_edges == 1
    g10 = build_chain(10)
    assert g10.num_vertices == 11 and g10.finish == {10} and g10.start == 0


def test_tree_shapes():
    assert build_tree(0).num_vertices == 1
    g1 = build_tree(1)
    assert g1.num_vertices == 3 and g1.finish == {1}
    g4 = build_tree(4)
    assert g4.num_vertices == 31
    assert sum(1 for nb in g4.neighbors if len(nb) == 1) == 16


@pytest.mark.parametrize("h,l", [(0, 0), (0, 5), (1, 3), (3, 2), (4, 0), (5, 7)])
def test_tree_chain_vertex_count(h, l):
    g = build_tree_chain(h, l)
    assert g.num_vertices == 2 ** (h + 1) - 1 + 2**h * l
    assert len(g.finish) == 1
    assert max(len(nb) for nb in g.neighbors) <= 10


def test_tree_chain_degenerate_cases():
    assert exact_hitting_time(build_tree_chain(0, 5)) == pytest.approx(exact_hitting_time(build_chain(5)), rel=1e-12)
    assert exact_hitting_time(build_tree_chain(2, 0)) == pytest.approx(exact_hitting_time(build_tree(2)), rel=1e-12)
    powered = WalkParams(epsilon=0.5)
    assert exact_hitting_time(build_tree_chain(0, 5), powered) == pytest.approx(
        exact_hitting_time(build_chain(5), powered), rel=1e-12)


def test_graph_validation():
    with pytest.raises(ValueError, match="degree"):
        WalkGraph(((1,) * 11, *(((0,),) * 11)), 0, frozenset({1}))
    with pytest.raises(ValueError, match="connected"):
        WalkGraph(((1,), (0,), (3,), (2,)), 0, frozenset({3}))
    with pytest.raises(ValueError, match="symmetric"):
        WalkGraph(((1,), ()), 0, frozenset({1}))
    with pytest.raises(ValueError):
        build_chain(-1)
    with pytest.raises(ValueError):
        build_tree(2, marked_leaves=(4,))


def test_text_round_trip():
    for g in (build_chain(4), build_tree(2), build_tree_chain(2, 3, marked_leaves=(1, 2))):
        text = g.to_text()
        assert WalkGraph.from_text(text) == g
        assert len(text.splitlines()) == g.num_vertices + 1


def test_step_table_layout():
    g = build_chain(3)
    plain, biased = g.step_table(False), g.step_table(True)
    assert plain.tolist() == [[1, 1, 0], [2, 0, 2], [2, 1, ~3], [1, 2, 0]]
    assert biased[1].tolist() == [0, 0, 2] and biased[2].tolist() == [0, 1, ~3]
    with pytest.raises(ValueError):
        plain[0, 0] = 5


@given(st.floats(0.0, 1.0), st.integers(0, 2**53 - 1))
def test_forward_threshold_is_exact(p, m):
    from brownian_search.walk_engine import forward_threshold
    assert (m < forward_threshold(p)) == (m / 2.0**53 < p)


# ----------------------------------------------------------------------------
# bias


def test_forward_bias_examples():
    assert forward_bias(0.0, 1.0) == (0.5, 0.5)
    pf, pb = forward_bias(math.log(3), 1.0)
    assert pf == pytest.approx(0.75, abs=1e-15) and pb == pytest.approx(0.25, abs=1e-15)
    assert forward_bias(1e6, 1.0) == (1.0, 0.0)


@given(st.floats(min_value=0, max_value=50), st.floats(min_value=1e-3, max_value=1e3))
def test_forward_bias_ratio(eps, kT):
    pf, pb = forward_bias(eps, kT)
    assert pf + pb == pytest.approx(1.0, abs=1e-15)
    if eps / kT < 30:
        assert pf / pb == pytest.approx(math.exp(eps / kT), rel=1e-12)
    assert pf - pb == pytest.approx(math.tanh(eps / (2 * kT)), abs=1e-15)


def test_drift_proportional_to_eps_over_kT():
    x = 0.01
    pf, pb = forward_bias(x, 1.0)
    assert abs((pf - pb) / x / 0.5 - 1) < 0.01


# ----------------------------------------------------------------------------
# simulation


def test_simulate_trivial_cases():
    assert simulate_walk(build_chain(0), WalkParams(), 7) == simulate_walk(build_chain(0), WalkParams(), 1)
    assert simulate_walk(build_chain(0), WalkParams(), 7).steps == 0
    for seed in range(5):
        out = simulate_walk(build_chain(1), WalkParams(), seed)
        assert out.finished and out.steps == 1


def test_simulate_deterministic():
    g = build_chain(4)
    a = [simulate_walk(g, WalkParams(), s) for s in range(20)]
    b = [simulate_walk(g, WalkParams(), s) for s in range(20)]
    assert a == b
    assert len({o.steps for o in a}) > 1


@pytest.mark.parametrize("graph,params", [
    (build_chain(6), WalkParams()),
    (build_chain(6), WalkParams(epsilon=0.7)),
    (build_tree(3), WalkParams()),
    (build_tree_chain(2, 3), WalkParams(epsilon=0.3)),
])
def test_kernel_matches_reference(graph, params):
    for seed in range(10):
        assert simulate_walk(graph, params, seed).steps == reference_walk(graph, params, seed)


def test_trial_streams_order_independent():
    g, p = build_tree(3), WalkParams()
    full = estimate_hitting_time(g, p, 500, seed=11)
    # evaluate the same trials individually, in reverse order
    keys = trial_keys(11, 500)
    again = [reference_walk(g, p, 11, trial=i) for i in reversed(range(500))]
    assert keys.shape == (500,)
    assert np.mean(again) == pytest.approx(full.mean, rel=1e-12)


def test_budget_exhaustion_is_reported():
    g = build_chain(20)
    out = simulate_walk(g, WalkParams(tau_max=5), 0)
    assert not out.finished and out.steps == 5
    # fewer steps than the distance to the finish: nothing can complete
    stats = estimate_hitting_time(g, WalkParams(tau_max=19), 200, seed=0)
    assert stats.censored == 200 and math.isnan(stats.mean)
    stats = estimate_hitting_time(g, WalkParams(tau_max=400), 2000, seed=0)
    assert 0 < stats.censored < 2000
    assert stats.censored_fraction == stats.censored / 2000


def test_hitting_stats_chain_one():
    s = estimate_hitting_time(build_chain(1), WalkParams(), 100, seed=3)
    assert s.mean == 1.0 and s.variance == 0.0 and s.ci95_half_width == 0.0


def test_ci_definition():
    s = estimate_hitting_time(build_chain(5), WalkParams(), 1000, seed=2)
    assert s.ci95_half_width == pytest.approx(1.96 * math.sqrt(s.variance / s.trials), rel=1e-15)


# ----------------------------------------------------------------------------
# exact solver


@pytest.mark.parametrize("length", [1, 2, 3, 10, 33, 64])
def test_chain_law(length):
    assert exact_hitting_time(build_chain(length)) == pytest.approx(length**2, rel=1e-9)


def test_tree_one_hand_solved():
    # E_root = 1 + E_sibling / 2, E_sibling = 1 + E_root
    assert exact_hitting_time(build_tree(1)) == pytest.approx(3.0, rel=1e-12)


@pytest.mark.parametrize("graph", [build_tree(h) for h in range(1, 9)]
                         + [build_tree_chain(h, l) for h in (1, 3, 5) for l in (1, 4)])
def test_exact_matches_tree_oracle(graph):
    assert exact_hitting_time(graph) == pytest.approx(tree_hitting_oracle(graph), rel=1e-9)


def test_biased_chain_matches_recursion():
    pf, pb = 0.75, 0.25
    params = WalkParams(epsilon=math.log(3))
    value = exact_hitting_time(build_chain(20), params)
    assert value == pytest.approx(biased_chain_oracle(20, pf, pb), rel=1e-9)
    # drift limit: l / (p - q) up to the reflecting-start correction
    assert value == pytest.approx(20 / (pf - pb), rel=0.05)


def test_chain_hitting_time_strictly_decreasing_in_epsilon():
    g = build_chain(12)
    values = [exact_hitting_time(g, WalkParams(epsilon=e)) for e in np.linspace(0, 3, 13)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_tree_bounds():
    for h in range(1, 11):
        g = build_tree(h)
        e = exact_hitting_time(g)
        assert e <= 2 * (g.num_vertices - 1) * h
        assert e < 4 * 2**h * h


def test_exact_size_limit():
    with pytest.raises(GraphSizeError):
        exact_hitting_time(build_tree(14))


def test_exact_accepts_custom_graph():
    # 4-cycle, start 0, finish opposite corner: 4 steps expected
    g = WalkGraph(((1, 3), (0, 2), (1, 3), (2, 0)), 0, frozenset({2}))
    assert exact_hitting_time(g) == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("graph,params", [
    (build_chain(10), WalkParams()),
    (build_tree(4), WalkParams()),
    (build_tree_chain(2, 3), WalkParams()),
    (build_chain(20), WalkParams(epsilon=math.log(3))),
    (build_tree_chain(3, 4), WalkParams(epsilon=0.2)),
])
def test_monte_carlo_agrees_with_exact(graph, params):
    stats = estimate_hitting_time(graph, params, 100_000, seed=5)
    exact = exact_hitting_time(graph, params)
    assert stats.censored == 0
    assert abs(stats.mean - exact) <= 4 * stats.ci95_half_width


# ----------------------------------------------------------------------------
# error model


def test_error_probability_examples():
    assert error_probability(WalkParams(epsilon_th=0, tau_max=1, s_max=1)) == 1.0
    p = error_probability(WalkParams(kT=2.0, epsilon_th=40.0, tau_max=1000, s_max=100))
    assert p == pytest.approx(1e5 * math.exp(-20), rel=1e-12)
    assert p == pytest.approx(2.06e-4, rel=1e-3)


def test_required_threshold_examples():
    from brownian_search.walk_engine import required_threshold
    assert required_threshold(1.0, 1, 1, 0.0) == 0.0
    assert required_threshold(1.0, 10**6, 10**3, 10.0) == pytest.approx(math.log(1e9) + 10, rel=1e-12)
    assert required_threshold(1.0, 10**6, 10**3, 10.0) == pytest.approx(30.72, abs=0.01)
    kT = 3.0
    eth = required_threshold(kT, 50, 20, 4.0)
    assert error_probability(WalkParams(kT=kT, epsilon_th=eth, tau_max=50, s_max=20)) == pytest.approx(
        math.exp(-4.0), rel=1e-12)


@settings(max_examples=300)
@given(st.integers(1, 10**12), st.integers(1, 10**9), st.floats(0, 200), st.floats(1e-25, 1e3))
def test_threshold_round_trip(tau, s, c0, kT):
    from brownian_search.walk_engine import required_threshold
    eth = required_threshold(kT, tau, s, c0)
    p = error_probability(WalkParams(kT=kT, epsilon_th=eth, tau_max=tau, s_max=s))
    assert p <= math.exp(-c0)
    assert eth == pytest.approx(kT * (math.log(tau) + math.log(s) + c0), rel=1e-12)
