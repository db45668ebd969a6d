# pylint: disable=missing-docstring

import math
import pytest
from test.mock_data import CHAIN, DEAD, DIAMOND, make_graph
from rumor_block.diffusion import exact_opt
from rumor_block.estimation import estimate_opt, lambda3, log_binomial, opt_schedule

def test_log_binomial():
    for n, k in [(5, 0), (5, 2), (10, 10), (100, 2), (2500, 20)]:
        assert log_binomial(n, k) == pytest.approx(math.log(math.comb(n, k)), rel=1e-12, abs=1e-12)
    with pytest.raises(ValueError):
        log_binomial(3, 4)
    with pytest.raises(ValueError):
        log_binomial(3, -1)

def test_lambda3():
    n, k, delta, big_n = 100, 3, 0.2, 100
    expected = n * 2.2 * math.log(big_n * math.comb(n, k) * math.log2(n)) / 0.04
    assert lambda3(n, k, delta, big_n) == pytest.approx(expected, rel=1e-12)

def test_opt_schedule():
    schedule = opt_schedule(1000, 5, 0.1, 1000)
    assert len(schedule) == math.ceil(math.log2(999))
    assert schedule[0][0] == 500.0
    for (x_a, l_a), (x_b, l_b) in zip(schedule, schedule[1:]):
        assert x_b == pytest.approx(x_a / 2)
        assert l_b == pytest.approx(2 * l_a)
    assert opt_schedule(2, 1, 0.1, 2) == []

def test_estimation_argument_errors():
    for args in [(0.0, 10), (1.0, 10), (0.1, 0)]:
        with pytest.raises(ValueError):
            estimate_opt(DIAMOND, [0], 1, args[0], args[1], seed=1)
    with pytest.raises(ValueError):
        estimate_opt(DIAMOND, [0], 7, 0.1, 10, seed=1)
    with pytest.raises(ValueError):
        estimate_opt(make_graph(1, []), [0], 1, 0.1, 10, seed=1)

def test_dead_graph_triggers_at_first_threshold():
    estimate, samples = estimate_opt(DEAD, [0], 1, 0.3, 50, seed=3)
    assert estimate.triggered is True
    assert estimate.iterations == 1
    assert estimate.tuples_used == len(samples) == math.ceil(opt_schedule(6, 1, 0.3, 50)[0][1])
    assert 1.0 <= estimate.opt_star <= DEAD.n

def test_two_node_graph_falls_back():
    g = make_graph(2, [(0, 1)])
    estimate, samples = estimate_opt(g, [0], 1, 0.1, 10, seed=1)
    assert estimate.opt_star == 1.0
    assert estimate.triggered is False
    assert estimate.iterations == 0
    assert len(samples) == 0

def test_estimate_is_deterministic():
    first, _ = estimate_opt(DIAMOND, [0], 2, 0.3, 50, seed=8)
    second, _ = estimate_opt(DIAMOND, [0], 2, 0.3, 50, seed=8, threads=3)
    assert first == second

def test_estimate_sandwiches_opt():
    delta, big_n = 0.3, 50
    cases = [(CHAIN, [0], 1), (DIAMOND, [0], 1), (DIAMOND, [0], 2)]
    for g, rumor, k in cases:
        opt, _ = exact_opt(g, rumor, k)
        lower = (1 - 1 / math.e) * opt / (2 * (1 + delta) ** 2)
        failures = 0
        for seed in range(100):
            estimate, _ = estimate_opt(g, rumor, k, delta, big_n, seed=seed)
            failures += int(not opt >= estimate.opt_star >= lower)
        assert failures <= 3 / big_n * 100 + 5
