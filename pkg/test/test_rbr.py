# pylint: disable=missing-docstring

import math
import pytest
import numpy as np
from test.mock_data import CHAIN, DEAD, DIAMOND, random_graph
from rumor_block.diffusion import exact_f, exact_opt
from rumor_block.helpers import NS_EVALUATE, timed
from rumor_block.graph import degree_top_k, generate_power_law
from rumor_block.baselines import greedy_mc, proximity
from rumor_block.rtuple import generate_sample_set
from rumor_block.rbr import (
    GREEDY_FACTOR, RbrParams, RbrReport, choose_delta1, evaluate_many, evaluate_monte_carlo,
    evaluate_on, evaluate_tuples, format_report, report_row, run_rbr, sample_size_bounds, sample_sizes
)

def objective(delta1, delta2=0.1, n=2500, k=20, big_n=2500):
    return max(sample_size_bounds(n, k, delta1, delta2, big_n, 1.0))

def test_choose_delta1_is_feasible_and_minimal():
    for delta2, n, k in [(0.1, 2500, 20), (0.3, 50, 2), (0.05, 10 ** 6, 50)]:
        delta1 = choose_delta1(delta2, n, k, n)
        assert delta2 - GREEDY_FACTOR * delta1 > 0
        assert objective(delta1, delta2, n, k, n) <= objective(delta2, delta2, n, k, n)

def test_choose_delta1_refinement_is_close_to_fine_grid():
    delta1 = choose_delta1(0.1, 2500, 20, 2500)
    upper = 0.1 / GREEDY_FACTOR
    grid = np.linspace(upper * 1e-6, upper * (1 - 1e-6), 100000)
    finest = min(objective(d) for d in grid)
    assert objective(delta1) <= finest * 1.001

def test_choose_delta1_errors():
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            choose_delta1(bad, 100, 2, 100)

def test_sample_sizes_closed_form():
    n, k, d1, d2, big_n, opt = 100, 2, 0.05, 0.1, 100, 10
    slack = d2 - (1 - 1 / math.e) * d1
    l1 = 2 * n * math.log(big_n) / (d1 ** 2 * opt)
    l2 = (2 + slack) * n * math.log(big_n * math.comb(n, k)) / (slack ** 2 * opt)
    expected = (math.ceil(l1), math.ceil(l2))
    assert sample_sizes(n, k, d1, d2, big_n, opt) == expected + (max(expected),)

def test_sample_sizes_scale_with_opt():
    l1, l2 = sample_size_bounds(500, 5, 0.05, 0.1, 500, 4.0)
    h1, h2 = sample_size_bounds(500, 5, 0.05, 0.1, 500, 8.0)
    assert h1 == pytest.approx(l1 / 2)
    assert h2 == pytest.approx(l2 / 2)

def test_sample_sizes_degenerate_log():
    l1, l2, l_star = sample_sizes(100, 2, 0.05, 0.1, 1, 10)
    assert l1 == 0
    assert l_star == l2 > 0

def test_sample_sizes_errors():
    with pytest.raises(ValueError):
        sample_sizes(100, 2, 0.2, 0.1, 100, 10)
    with pytest.raises(ValueError):
        sample_sizes(100, 2, 0.05, 0.1, 100, 0.5)

def test_params_validation():
    assert RbrParams(k=5).delta2 == 0.1
    for kwargs in [dict(k=0), dict(k=1, delta2=1.0), dict(k=1, delta3=0.0),
                   dict(k=1, delta1=0.2, delta2=0.1), dict(k=1, big_n=0.5),
                   dict(k=1, max_tuples=0), dict(k=1, l_star=0)]:
        with pytest.raises(ValueError):
            RbrParams(**kwargs)

def test_run_rbr_chain():
    report = run_rbr(CHAIN, [0], RbrParams(k=1, delta2=0.3, delta3=0.3, big_n=50), seed=2)
    assert report.seeds == (1,)
    assert report.l_star == max(report.l1, report.l2)
    assert report.tuples_total == report.estimation_tuples + report.l_star
    assert report.clamped is False
    assert set(report.wall_times) == {'estimate', 'sample', 'select'}
    assert report.coverage_estimate == pytest.approx(2.0, abs=0.3)

def test_run_rbr_dead_graph():
    report = run_rbr(DEAD, [0, 3], RbrParams(k=2, delta2=0.3, delta3=0.3), seed=5)
    # b = True tuples have empty v_star, so nothing is worth picking
    assert report.seeds == ()
    stderr = DEAD.n * math.sqrt((2 / 3) * (1 / 3) / report.l_star)
    assert abs(report.coverage_estimate - (DEAD.n - 2)) <= 4 * stderr

def test_run_rbr_pad():
    params = RbrParams(k=2, delta2=0.3, delta3=0.3, pad=True)
    report = run_rbr(DEAD, [0, 3], params, seed=5)
    assert report.seeds == (1, 2)

def test_run_rbr_is_deterministic():
    rng = np.random.default_rng(12)
    g = random_graph(rng, 40, 120, probs=(0.1, 0.3))
    params = RbrParams(k=3, delta2=0.3, delta3=0.3)
    one = run_rbr(g, [0, 1], params, seed=9, threads=1)
    three = run_rbr(g, [0, 1], params, seed=9, threads=3)
    for field in ('opt_star', 'l1', 'l2', 'l_star', 'delta1_used', 'seeds',
                  'coverage_estimate', 'tuples_total', 'edges_tested'):
        assert getattr(one, field) == getattr(three, field)

def test_run_rbr_clamps():
    params = RbrParams(k=1, delta2=0.3, delta3=0.3, max_tuples=50)
    report = run_rbr(DIAMOND, [0], params, seed=1)
    assert report.clamped is True
    assert report.l_star == 50

def test_run_rbr_fixed_l_star():
    report = run_rbr(DIAMOND, [0], RbrParams(k=2, l_star=500), seed=1)
    assert report.l_star == 500
    assert report.estimation_tuples == 0
    assert report.tuples_total == 500
    assert math.isnan(report.opt_star)
    assert 'estimate' not in report.wall_times

def test_run_rbr_needs_rumor_seeds():
    with pytest.raises(ValueError):
        run_rbr(DIAMOND, [], RbrParams(k=1), seed=1)

def test_rbr_approximation_on_tiny_graphs():
    delta2 = 0.3
    params = RbrParams(k=2, delta2=delta2, delta3=0.3, big_n=50)
    opt, _ = exact_opt(DIAMOND, [0], 2)
    successes = 0
    for seed in range(100):
        report = run_rbr(DIAMOND, [0], params, seed=seed)
        successes += int(exact_f(DIAMOND, [0], report.seeds) >= (1 - 1 / math.e - delta2) * opt)
    assert successes >= 85

def test_tuple_count_grows_with_accuracy():
    rng = np.random.default_rng(30)
    g = random_graph(rng, 30, 90, probs=(0.2, 0.5))
    totals = []
    for delta2 in (0.4, 0.2, 0.1):
        report = run_rbr(g, [0], RbrParams(k=2, delta2=delta2, delta3=0.3), seed=4)
        totals.append(report.tuples_total)
    # halving delta2 should cost at most about 4x (times slack 2)
    for small, large in zip(totals, totals[1:]):
        assert small < large <= 8 * small

def test_format_report():
    report = RbrReport(
        opt_star=3.5, l1=10, l2=20, l_star=20, delta1_used=0.05, seeds=(4, 1),
        coverage_estimate=5.25, wall_times={'select': 0.002}, tuples_total=30,
    )
    text = format_report(report, labels={4: 40, 1: 10})
    lines = text.splitlines()
    assert 'seeds=40 10' in lines
    assert 'l_star=20' in lines
    assert 'clamped=false' in lines
    assert 'wall_ms.select=2.000' in lines
    assert 'wall_ms' not in format_report(report, timings=False)

def test_report_row():
    report = RbrReport(
        opt_star=3.5, l1=10, l2=20, l_star=20, delta1_used=0.05, seeds=(4, 1),
        coverage_estimate=5.25, wall_times={'sample': 0.5, 'select': 0.25}, tuples_total=30,
    )
    row = report_row(report, dataset='toy')
    assert row.shape[0] == 1
    assert row.columns[0] == 'dataset'
    assert row.loc[0, 'seeds'] == '4 1'
    assert row.loc[0, 'wall_ms'] == pytest.approx(750.0)

def test_evaluate_tuples_dead_graph():
    f, stderr = evaluate_tuples(DEAD, [0], [], 6000, seed=2)
    assert abs(f - 5.0) <= 4 * DEAD.n * math.sqrt((5 / 6) * (1 / 6) / 6000)
    assert stderr > 0

def test_evaluations_agree_with_exact():
    for seeds in ([], [2], [3, 5]):
        exact = exact_f(DIAMOND, [0], seeds)
        f_t, se_t = evaluate_tuples(DIAMOND, [0], seeds, 40000, seed=3)
        f_m, se_m = evaluate_monte_carlo(DIAMOND, [0], seeds, 20000, seed=3)
        assert abs(f_t - exact) <= 3.5 * se_t + 1e-9
        assert abs(f_m - exact) <= 3.5 * se_m + 1e-9

def test_evaluate_on_matches_evaluate_tuples():
    samples = generate_sample_set(DIAMOND, [0], 3000, seed=6, namespace=NS_EVALUATE)
    expected = evaluate_tuples(DIAMOND, [0], [2, 5], 3000, seed=6)
    assert evaluate_on(samples, [2, 5]) == pytest.approx(expected)
    with pytest.raises(ValueError):
        evaluate_on(generate_sample_set(DIAMOND, [0], 0, seed=6), [2])

def test_evaluation_error_shrinks_with_count():
    _, small = evaluate_tuples(DIAMOND, [0], [2], 5000, seed=1)
    _, large = evaluate_tuples(DIAMOND, [0], [2], 20000, seed=1)
    assert large == pytest.approx(small / 2, rel=0.1)

@pytest.mark.slow
def test_power_law_comparison():
    g = generate_power_law(2500, 10.4, 2.5, seed=7)
    rumor = degree_top_k(g, 20)
    durations = {}
    with timed(durations, 'rbr'):
        report = run_rbr(g, rumor, RbrParams(k=20), seed=1)
    with timed(durations, 'greedy'):
        greedy = greedy_mc(g, rumor, 20, sims=500, seed=1)
    near = proximity(g, rumor, 20)

    scores = evaluate_many(g, rumor, [report.seeds, greedy, near, []], 200000, seed=2)
    (f_rbr, se_rbr), (f_greedy, _), (f_near, _), (f_none, _) = scores
    assert f_rbr >= 0.95 * f_greedy - 3 * se_rbr
    assert f_rbr > f_near > f_none
    assert durations['rbr'] < 30
    assert durations['greedy'] >= 100 * durations['rbr']
