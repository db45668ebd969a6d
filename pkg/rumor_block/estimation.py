'''
Lower-bound estimation of OPT_k

Thresholds x_i = n / 2^i are tested in turn against the greedy coverage of a
growing SampleSet of l_i = lambda_3 / x_i tuples; the first threshold the
scaled coverage clears by a factor (1 + delta) yields OPT_k*.
'''

import math
import logging
import dataclasses
import numpy as np
from rumor_block.helpers import NS_ESTIMATE, as_nodes
from rumor_block.rtuple import SampleSet, TupleSampler
from rumor_block.coverage import select_nodes

logger = logging.getLogger(__name__)

@dataclasses.dataclass(frozen=True)
class OptEstimate:
    ''' OPT_k*, the thresholds tested, tuples generated, and whether the test fired '''
    opt_star: float
    iterations: int
    tuples_used: int
    triggered: bool

def log_binomial(n, k):
    ''' ln C(n, k) as sum_{i=1..k} [ln(n - k + i) - ln i]

    Raises
    ------
    ValueError unless 0 <= k <= n

    Examples
    --------
    >>> log_binomial(5, 0)
    0.0
    >>> round(math.exp(log_binomial(5, 2)), 9)
    10.0
    '''
    if not 0 <= k <= n:
        raise ValueError("log_binomial needs 0 <= k <= n, got n={n}, k={k}".format(n=n, k=k))
    k = min(k, n - k)
    if k == 0:
        return 0.0
    i = np.arange(1, k + 1, dtype=np.float64)
    return float(np.sum(np.log(n - k + i) - np.log(i)))

def _check_estimation_args(n, k, delta, big_n):
    if n < 2:
        raise ValueError("Estimation needs at least 2 nodes, got {n}".format(n=n))
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1), got {d}".format(d=delta))
    if not big_n > 0:
        raise ValueError("N must be positive, got {N}".format(N=big_n))
    if not 1 <= k <= n:
        raise ValueError("k must be in 1..{n}, got {k}".format(n=n, k=k))

def lambda3(n, k, delta, big_n):
    ''' n (2 + delta) ln(N C(n, k) log2 n) / delta^2, summed in log space '''
    _check_estimation_args(n, k, delta, big_n)
    log_term = math.log(big_n) + log_binomial(n, k) + math.log(math.log2(n))
    return n * (2.0 + delta) * log_term / delta ** 2

def opt_schedule(n, k, delta, big_n):
    ''' The thresholds of the search as (x_i, l_i) pairs, l_i unrounded

    i runs over 1..ceil(log2(n - 1)); l_i doubles from one step to the next.
    '''
    lam = lambda3(n, k, delta, big_n)
    steps = int(math.ceil(math.log2(n - 1))) if n > 2 else 0
    return [(n / 2.0 ** i, lam * 2.0 ** i / n) for i in range(1, steps + 1)]

def estimate_opt(g, rumor_seeds, k, delta, big_n, seed, threads=1):
    ''' Estimate a lower bound OPT_k* of the optimal blocking value

    Tuples persist across thresholds: each step only tops the SampleSet up
    to ceil(l_i). When no threshold fires, OPT_k* falls back to 1, which is
    always a valid lower bound.

    Parameters
    ----------
    g : Graph
    rumor_seeds : node ids of S_r, nonempty
    k : budget
    delta : accuracy, in (0, 1)
    big_n : N, positive; failure probability budget is 3/N
    seed : master seed (tuples use the estimation namespace)
    threads : worker cap

    Returns
    -------
    (OptEstimate, SampleSet)

    Raises
    ------
    ValueError if a parameter is out of range
    '''
    n = g.n
    _check_estimation_args(n, k, delta, big_n)
    rumor = as_nodes(rumor_seeds, n)
    sampler = TupleSampler(g, rumor, seed, NS_ESTIMATE, threads)
    samples = SampleSet(n, [])

    schedule = opt_schedule(n, k, delta, big_n)
    for i, (x_i, l_real) in enumerate(schedule, start=1):
        l_i = int(math.ceil(l_real))
        samples = samples.extended(sampler.draw(l_i - len(samples)))
        selected = select_nodes(samples, k, rumor)
        scaled = n * selected.covered / l_i
        logger.info(
            "OPT_k search step %d: x=%.4g l=%d n*F/l=%.4g", i, x_i, l_i, scaled
        )
        if scaled >= (1.0 + delta) * x_i:
            opt_star = max(1.0, scaled / (1.0 + delta))
            return OptEstimate(opt_star, i, len(samples), True), samples

    logger.warning(
        "OPT_k search exhausted %d thresholds; falling back to OPT_k* = 1", len(schedule)
    )
    return OptEstimate(1.0, len(schedule), len(samples), False), samples
