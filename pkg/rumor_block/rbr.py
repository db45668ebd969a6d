'''
R-tuple based randomized rumor blocking

run_rbr estimates OPT_k*, sizes a fresh SampleSet from it, and picks the
positive seeds by greedy maximum coverage.
'''

import math
import logging
import dataclasses
import numpy as np
import pandas as pd
from rumor_block.helpers import NS_EVALUATE, NS_FINAL, NS_MONTE_CARLO, as_nodes, stream, timed
from rumor_block.rtuple import TupleSampler, cached_sample_set, coverage
from rumor_block.coverage import select_nodes
from rumor_block.estimation import estimate_opt, log_binomial
from rumor_block.diffusion import simulate_cascades

logger = logging.getLogger(__name__)

GREEDY_FACTOR = 1.0 - 1.0 / math.e
DELTA1_GRID = 1000
DEFAULT_MAX_TUPLES = 20000000

# evaluation tuples are drawn and scored in chunks of this many
EVAL_CHUNK = 65536

@dataclasses.dataclass(frozen=True)
class RbrParams:
    ''' Tunables of a run

    delta1 None means chosen to minimise l*; big_n None means N = n.
    l_star set explicitly skips OPT_k estimation and the sample-size
    formulas (tuple-budget runs).
    '''
    k: int
    delta1: float = None
    delta2: float = 0.1
    delta3: float = 0.1
    big_n: float = None
    max_tuples: int = DEFAULT_MAX_TUPLES
    pad: bool = False
    l_star: int = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1, got {k}".format(k=self.k))
        for name in ('delta2', 'delta3'):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError("{name} must lie in (0, 1), got {v}".format(name=name, v=value))
        if self.delta1 is not None:
            if not 0.0 < self.delta1 < 1.0:
                raise ValueError("delta1 must lie in (0, 1), got {v}".format(v=self.delta1))
            if not self.delta2 > GREEDY_FACTOR * self.delta1:
                raise ValueError(
                    "delta2 must exceed (1 - 1/e) * delta1 ({d2} <= {bound:.6g})".format(
                        d2=self.delta2, bound=GREEDY_FACTOR * self.delta1
                    )
                )
        if self.big_n is not None and not self.big_n >= 1:
            raise ValueError("N must be at least 1, got {N}".format(N=self.big_n))
        if self.max_tuples < 1:
            raise ValueError("max_tuples must be positive, got {m}".format(m=self.max_tuples))
        if self.l_star is not None and self.l_star < 1:
            raise ValueError("l_star must be positive, got {l}".format(l=self.l_star))

@dataclasses.dataclass(frozen=True)
class RbrReport:
    ''' Record of one run; wall_times holds seconds per phase '''
    opt_star: float
    l1: int
    l2: int
    l_star: int
    delta1_used: float
    seeds: tuple
    coverage_estimate: float
    wall_times: dict
    tuples_total: int
    estimation_tuples: int = 0
    edges_tested: int = 0
    opt_triggered: bool = False
    clamped: bool = False

def sample_size_bounds(n, k, delta1, delta2, big_n, opt_star):
    ''' l1 and l2 before rounding

    l1 = 2 n ln N / (delta1^2 OPT_k*)
    l2 = (2 + d) n ln(N C(n, k)) / (d^2 OPT_k*), d = delta2 - (1 - 1/e) delta1

    Raises
    ------
    ValueError if delta2 <= (1 - 1/e) delta1 or opt_star < 1
    '''
    slack = delta2 - GREEDY_FACTOR * delta1
    if not slack > 0.0:
        raise ValueError(
            "Infeasible deltas: delta2={d2} must exceed (1 - 1/e) * delta1={d1}".format(
                d2=delta2, d1=delta1
            )
        )
    if not opt_star >= 1.0:
        raise ValueError("OPT_k* must be at least 1, got {o}".format(o=opt_star))
    l1 = 2.0 * n * math.log(big_n) / (delta1 ** 2 * opt_star)
    l2 = (2.0 + slack) * n * (math.log(big_n) + log_binomial(n, k)) / (slack ** 2 * opt_star)
    return l1, l2

def sample_sizes(n, k, delta1, delta2, big_n, opt_star):
    ''' (l1, l2, l_star) rounded up, l_star = max(l1, l2)

    Examples
    --------
    >>> sample_sizes(100, 2, 0.05, 0.1, 1, 10)[0]
    0
    '''
    l1, l2 = sample_size_bounds(n, k, delta1, delta2, big_n, opt_star)
    l1, l2 = int(math.ceil(l1)), int(math.ceil(l2))
    return l1, l2, max(l1, l2)

def _l_star_objective(delta1, delta2, log_n1, log_n2):
    ''' max(l1, l2) with the factor n / OPT_k* dropped '''
    slack = delta2 - GREEDY_FACTOR * delta1
    return np.maximum(2.0 * log_n1 / delta1 ** 2, (2.0 + slack) * log_n2 / slack ** 2)

def choose_delta1(delta2, n, k, big_n):
    ''' The delta1 in (0, delta2 / (1 - 1/e)) minimising l* = max(l1, l2)

    OPT_k* and n scale l1 and l2 alike, so only ln N and ln C(n, k) matter.
    A 1000-point grid locates the minimiser; a second 1000-point grid over
    the two neighbouring cells refines it.

    Raises
    ------
    ValueError if delta2 is outside (0, 1)
    '''
    if not 0.0 < delta2 < 1.0:
        raise ValueError("delta2 must lie in (0, 1), got {d}".format(d=delta2))
    log_n1 = math.log(big_n)
    log_n2 = math.log(big_n) + log_binomial(n, k)
    upper = delta2 / GREEDY_FACTOR
    eps = upper * 1e-6
    lo, hi = eps, upper - eps
    for _ in range(2):
        grid = np.linspace(lo, hi, DELTA1_GRID)
        best = int(np.argmin(_l_star_objective(grid, delta2, log_n1, log_n2)))
        lo, hi = grid[max(best - 1, 0)], grid[min(best + 1, DELTA1_GRID - 1)]
    return float(grid[best])

def run_rbr(g, rumor_seeds, params, seed, threads=1, cache=None):
    ''' Select up to k positive seeds that block the rumor cascade

    Parameters
    ----------
    g : Graph
    rumor_seeds : node ids of S_r, nonempty
    params : RbrParams
    seed : master seed
    threads : worker cap; the report does not depend on it
    cache : optional SampleSet cache file for the final tuples

    Returns
    -------
    RbrReport

    Raises
    ------
    ValueError if S_r is empty or a parameter is out of range
    '''
    n = g.n
    rumor = as_nodes(rumor_seeds, n)
    if rumor.size == 0:
        raise ValueError("At least one rumor seed required")
    big_n = float(n if params.big_n is None else params.big_n)
    durations = {}

    if params.l_star is None:
        with timed(durations, 'estimate'):
            estimate, est_samples = estimate_opt(
                g, rumor, min(params.k, n), params.delta3, big_n, seed, threads
            )
        opt_star, opt_triggered = estimate.opt_star, estimate.triggered
        estimation_tuples = len(est_samples)
        delta1 = params.delta1
        if delta1 is None:
            delta1 = choose_delta1(params.delta2, n, min(params.k, n), big_n)
        l1, l2, l_star = sample_sizes(n, min(params.k, n), delta1, params.delta2, big_n, opt_star)
        # N = 1 with k = n zeroes both bounds
        l_star = max(l_star, 1)
    else:
        opt_star, opt_triggered, estimation_tuples = float('nan'), False, 0
        delta1 = float('nan') if params.delta1 is None else params.delta1
        l1 = l2 = 0
        l_star = params.l_star
    logger.info("OPT_k*=%.6g delta1=%.6g l1=%d l2=%d l*=%d", opt_star, delta1, l1, l2, l_star)

    clamped = l_star > params.max_tuples
    if clamped:
        logger.warning("l*=%d exceeds max_tuples; clamped to %d", l_star, params.max_tuples)
        l_star = params.max_tuples

    with timed(durations, 'sample'):
        samples = cached_sample_set(g, rumor, l_star, seed, NS_FINAL, threads, cache)
    with timed(durations, 'select'):
        selected = select_nodes(samples, params.k, rumor, pad=params.pad)

    return RbrReport(
        opt_star=opt_star,
        l1=l1,
        l2=l2,
        l_star=l_star,
        delta1_used=delta1,
        seeds=selected.seeds,
        coverage_estimate=n * selected.covered / l_star,
        wall_times=durations,
        tuples_total=estimation_tuples + l_star,
        estimation_tuples=estimation_tuples,
        edges_tested=samples.edges_tested,
        opt_triggered=opt_triggered,
        clamped=clamped,
    )

def format_report(report, labels=None, timings=True):
    ''' Flat key=value text block; seeds shown as labels when given

    timings False leaves out the wall_ms lines, so the block only depends on
    the inputs and the master seed.
    '''
    seeds = report.seeds if labels is None else [labels[s] for s in report.seeds]
    fields = [
        ('opt_star', '{:.6g}'.format(report.opt_star)),
        ('opt_triggered', str(report.opt_triggered).lower()),
        ('delta1', '{:.6g}'.format(report.delta1_used)),
        ('l1', report.l1),
        ('l2', report.l2),
        ('l_star', report.l_star),
        ('clamped', str(report.clamped).lower()),
        ('estimation_tuples', report.estimation_tuples),
        ('tuples_total', report.tuples_total),
        ('edges_tested', report.edges_tested),
        ('coverage_estimate', '{:.6g}'.format(report.coverage_estimate)),
        ('seeds', ' '.join(str(s) for s in seeds)),
    ]
    if timings:
        fields.extend(
            ('wall_ms.' + phase, '{:.3f}'.format(1000.0 * secs))
            for phase, secs in sorted(report.wall_times.items())
        )
    return ''.join('{k}={v}\n'.format(k=k, v=v) for k, v in fields)

def report_row(report, **extra):
    ''' The report as a one-row DataFrame; extra keyword columns come first

    Examples
    --------
    >>> report_row(report, dataset='g.txt').columns[0]
    'dataset'
    '''
    row = dict(extra)
    row.update(
        opt_star=report.opt_star,
        opt_triggered=report.opt_triggered,
        delta1=report.delta1_used,
        l1=report.l1,
        l2=report.l2,
        l_star=report.l_star,
        clamped=report.clamped,
        tuples_total=report.tuples_total,
        edges_tested=report.edges_tested,
        coverage_estimate=report.coverage_estimate,
        seeds=' '.join(str(s) for s in report.seeds),
        wall_ms=1000.0 * sum(report.wall_times.values()),
    )
    return pd.DataFrame([row], columns=list(row))

def _stderr(n, hits, count):
    share = hits / count
    return n * math.sqrt(share * (1.0 - share) / count)

def evaluate_many(g, rumor_seeds, seed_sets, count, seed, threads=1):
    ''' Estimate f for several seed sets from count fresh evaluation tuples

    Tuples come from the evaluation namespace, so they are independent of
    any tuples used for selection; they are scored chunk by chunk and never
    all held in memory.

    Returns
    -------
    List of (n * F(S, R) / count, standard error), one per seed set
    '''
    if count < 1:
        raise ValueError("Evaluation count must be at least 1, got {c}".format(c=count))
    n = g.n
    rumor = as_nodes(rumor_seeds, n)
    seed_sets = [set(as_nodes(s, n).tolist()) for s in seed_sets]
    sampler = TupleSampler(g, rumor, seed, NS_EVALUATE, threads)
    hits = [0] * len(seed_sets)
    remaining = int(count)
    while remaining:
        chunk = sampler.draw(min(EVAL_CHUNK, remaining))
        remaining -= len(chunk)
        for t in chunk:
            if not t.b:
                hits = [h + 1 for h in hits]
                continue
            for i, seeds in enumerate(seed_sets):
                if not seeds.isdisjoint(t.v_star):
                    hits[i] += 1
    return [(n * h / count, _stderr(n, h, count)) for h in hits]

def evaluate_tuples(g, rumor_seeds, seeds, count, seed, threads=1):
    ''' (f estimate, standard error) of one seed set from fresh evaluation tuples

    Examples
    --------
    >>> # p = 0 everywhere: every tuple rooted outside S_r has b = False
    >>> evaluate_tuples(g, [0], [], 1000, seed=1)[0] <= g.n - 1
    True
    '''
    return evaluate_many(g, rumor_seeds, [seeds], count, seed, threads)[0]

def evaluate_on(samples, seeds):
    ''' (n * F(S, R) / l, standard error) on an existing SampleSet '''
    count = len(samples)
    if count == 0:
        raise ValueError("Cannot evaluate on an empty SampleSet")
    hits = coverage(seeds, samples)
    return samples.n * hits / count, _stderr(samples.n, hits, count)

def evaluate_monte_carlo(g, rumor_seeds, seeds, trials, seed):
    ''' Forward-simulation estimate of f(seeds) with its standard error '''
    counts = simulate_cascades(g, rumor_seeds, seeds, trials, stream(seed, NS_MONTE_CARLO))
    spread = float(counts.std(ddof=1)) if trials > 1 else 0.0
    return float(counts.mean()), spread / math.sqrt(trials)
