'''
Greedy max-coverage node selection over a SampleSet
'''

import heapq
import itertools
import dataclasses
import numpy as np
from rumor_block.helpers import GuardError
from rumor_block.rtuple import coverage

BRUTEFORCE_CANDIDATE_GUARD = 20
BRUTEFORCE_BUDGET_GUARD = 4

@dataclasses.dataclass(frozen=True)
class SelectionResult:
    ''' Seeds in pick order, the marginal coverage of each pick, and F(seeds, R) '''
    seeds: tuple
    gains: tuple
    covered: int

def _check_selection_args(samples, k, forbidden):
    if k < 1:
        raise ValueError("Budget k must be at least 1, got {k}".format(k=k))
    forbidden = set(int(v) for v in forbidden)
    if len(forbidden) >= samples.n:
        raise ValueError("Every node is forbidden; nothing to select")
    clash = forbidden.intersection(samples.inverted)
    assert not clash, "Forbidden nodes appear in v_star: {c}".format(c=sorted(clash)[:5])
    return forbidden

def _pad(samples, seeds, gains, k, forbidden):
    taken = set(seeds) | forbidden
    for u in range(samples.n):
        if len(seeds) >= k:
            break
        if u not in taken:
            seeds.append(u)
            gains.append(0)

def select_nodes(samples, k, forbidden=(), pad=False):
    ''' Greedy maximum coverage with lazy (stale upper bound) evaluation

    Each round picks the node that covers the most not-yet-covered b = True
    tuples, ties to the lowest id. b = False tuples add count_b0 to covered
    whatever is picked. Selection stops early when the best marginal gain is
    0, unless pad is set, in which case the lowest-id unused nodes fill the
    budget with gain 0.

    Parameters
    ----------
    samples : SampleSet
    k : budget, at least 1
    forbidden : node ids that may not be picked (the rumor seeds)
    pad : fill up to k seeds after an early stop

    Returns
    -------
    SelectionResult

    Raises
    ------
    ValueError if k < 1 or every node is forbidden

    Examples
    --------
    >>> # b = True tuples with v_star {3, 4}, {3}, {5}
    >>> select_nodes(samples, 1).seeds
    (3,)
    '''
    forbidden = _check_selection_args(samples, k, forbidden)
    covered = np.zeros(len(samples), dtype=bool)

    # (-gain, node, round in which gain was computed)
    heap = [(-len(idx), u, 0) for u, idx in samples.inverted.items()]
    heapq.heapify(heap)

    seeds, gains = [], []
    for rnd in range(k):
        pick = None
        while heap:
            neg_gain, u, stamp = heapq.heappop(heap)
            if stamp == rnd:
                pick = (u, -neg_gain)
                break
            gain = int(np.count_nonzero(~covered[samples.inverted[u]]))
            heapq.heappush(heap, (-gain, u, rnd))
        if pick is None or pick[1] == 0:
            break
        u, gain = pick
        covered[samples.inverted[u]] = True
        seeds.append(u)
        gains.append(gain)

    if pad:
        _pad(samples, seeds, gains, k, forbidden)
    return SelectionResult(tuple(seeds), tuple(gains), samples.count_b0 + sum(gains))

def select_nodes_naive(samples, k, forbidden=(), pad=False):
    ''' Greedy maximum coverage recomputing every marginal gain each round '''
    forbidden = _check_selection_args(samples, k, forbidden)
    covered = np.zeros(len(samples), dtype=bool)
    candidates = sorted(samples.inverted)
    seeds, gains = [], []
    for _ in range(k):
        best, best_gain = None, 0
        for u in candidates:
            gain = int(np.count_nonzero(~covered[samples.inverted[u]]))
            if gain > best_gain:
                best, best_gain = u, gain
        if best is None:
            break
        covered[samples.inverted[best]] = True
        seeds.append(best)
        gains.append(best_gain)
    if pad:
        _pad(samples, seeds, gains, k, forbidden)
    return SelectionResult(tuple(seeds), tuple(gains), samples.count_b0 + sum(gains))

def optimal_coverage_bruteforce(samples, k, forbidden=()):
    ''' Exact maximum of F(S, R) over node sets of size at most k

    Only nodes that appear in some v_star can add coverage, so those are the
    candidates.

    Raises
    ------
    GuardError if there are more than 20 candidates or k exceeds 4
    ValueError if k < 1
    '''
    if k < 1:
        raise ValueError("Budget k must be at least 1, got {k}".format(k=k))
    forbidden = set(int(v) for v in forbidden)
    candidates = [u for u in samples.inverted if u not in forbidden]
    if len(candidates) > BRUTEFORCE_CANDIDATE_GUARD or k > BRUTEFORCE_BUDGET_GUARD:
        raise GuardError(
            "Brute force needs <= {c} candidates and k <= {b}, got {n} and {k}".format(
                c=BRUTEFORCE_CANDIDATE_GUARD, b=BRUTEFORCE_BUDGET_GUARD,
                n=len(candidates), k=k
            )
        )
    size = min(k, len(candidates))
    return max(coverage(subset, samples) for subset in itertools.combinations(candidates, size))
