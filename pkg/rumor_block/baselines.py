'''
Comparison seed selectors: Monte Carlo greedy, proximity, random, unblocking
'''

import logging
import dataclasses
import concurrent.futures
import numpy as np
from rumor_block.helpers import NS_GREEDY, NS_RANDOM, as_nodes, stream
from rumor_block.diffusion import estimate_f_monte_carlo, exact_f_table

logger = logging.getLogger(__name__)

ALGORITHMS = ('rbr', 'greedy', 'proximity', 'random', 'unblocking')
DEFAULT_SIMULATIONS = 2000

@dataclasses.dataclass(frozen=True)
class BaselineKind:
    ''' A comparison algorithm; sims only matters for 'greedy' '''
    name: str
    sims: int = DEFAULT_SIMULATIONS

    def __post_init__(self):
        if self.name not in ALGORITHMS[1:]:
            raise ValueError("Unknown baseline: {n!r}".format(n=self.name))
        if self.name == 'greedy' and self.sims < 1:
            raise ValueError("Greedy needs at least 1 simulation, got {s}".format(s=self.sims))

def _candidates(n, rumor, chosen):
    taken = np.union1d(rumor, np.asarray(chosen, dtype=np.int64))
    return np.setdiff1d(np.arange(n, dtype=np.int64), taken, assume_unique=True)

def greedy_mc(g, rumor_seeds, k, sims, seed, threads=1):
    ''' Hill climbing on Monte Carlo estimates of f

    Each of k rounds adds the candidate v maximising the estimate of
    f(chosen + [v]) from sims forward simulations; ties go to the lowest id.
    Every candidate estimate draws from its own stream keyed by round and
    candidate, so the picks do not depend on threads.

    Parameters
    ----------
    g : Graph
    rumor_seeds : node ids of S_r
    k : budget, k = 0 gives []
    sims : simulations per estimate, at least 1
    seed : master seed
    threads : worker cap

    Returns
    -------
    List of node ids in pick order

    Raises
    ------
    ValueError if sims < 1 or k < 0
    '''
    if sims < 1:
        raise ValueError("sims must be at least 1, got {s}".format(s=sims))
    if k < 0:
        raise ValueError("k must be non-negative, got {k}".format(k=k))
    rumor = as_nodes(rumor_seeds, g.n)
    chosen = []

    for rnd in range(k):
        cands = _candidates(g.n, rumor, chosen).tolist()
        if not cands:
            break

        def estimate(v, rnd=rnd):
            rng = stream(seed, NS_GREEDY, rnd, v)
            return estimate_f_monte_carlo(g, rumor, chosen + [v], sims, rng)

        if threads > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(estimate, cands))
        else:
            values = [estimate(v) for v in cands]

        # argmax returns the first maximum; cands are ascending
        best = int(np.argmax(values))
        chosen.append(cands[best])
        logger.info("Greedy round %d: picked %d (f ~ %.6g)", rnd + 1, cands[best], values[best])
    return chosen

def exact_greedy(g, rumor_seeds, k):
    ''' Hill climbing on exact f (enumerates realizations; tiny graphs only)

    Raises
    ------
    GuardError if the graph has too many edges to enumerate
    '''
    rumor = as_nodes(rumor_seeds, g.n)
    chosen = []
    for _ in range(k):
        cands = _candidates(g.n, rumor, chosen).tolist()
        if not cands:
            break
        values = exact_f_table(g, rumor, [chosen + [v] for v in cands])
        chosen.append(cands[int(np.argmax(values))])
    return chosen

def proximity(g, rumor_seeds, k):
    ''' Out-neighbours of the rumor seeds, highest id first

    Falls back to the highest-id remaining nodes when the rumor seeds have
    fewer than k eligible out-neighbours.

    Examples
    --------
    >>> # S_r = {0} with out-neighbours 3, 7, 5
    >>> proximity(g, [0], 2)
    [7, 5]
    '''
    rumor = as_nodes(rumor_seeds, g.n)
    eids, _ = g.gather_out(rumor)
    near = np.setdiff1d(np.unique(g.dst[eids]), rumor)[::-1].tolist()
    picks = near[:k]
    if len(picks) < k:
        filler = _candidates(g.n, rumor, picks)[::-1].tolist()
        picks.extend(filler[:k - len(picks)])
    return picks

def random_seeds(g, rumor_seeds, k, rng):
    ''' k nodes drawn uniformly without replacement from V minus S_r

    Raises
    ------
    ValueError if k exceeds the number of non-rumor nodes
    '''
    cands = _candidates(g.n, as_nodes(rumor_seeds, g.n), [])
    if not 0 <= k <= len(cands):
        raise ValueError(
            "Cannot draw {k} random seeds from {c} non-rumor nodes".format(k=k, c=len(cands))
        )
    return rng.choice(cands, size=k, replace=False).tolist()

def unblocking(g, rumor_seeds, k):  # pylint: disable=unused-argument
    ''' No positive cascade at all '''
    return []

def run_baseline(kind, g, rumor_seeds, k, seed, threads=1):
    ''' Dispatch a BaselineKind to its selector '''
    if kind.name == 'greedy':
        return greedy_mc(g, rumor_seeds, k, kind.sims, seed, threads)
    if kind.name == 'proximity':
        return proximity(g, rumor_seeds, k)
    if kind.name == 'random':
        return random_seeds(g, rumor_seeds, k, stream(seed, NS_RANDOM, k))
    return unblocking(g, rumor_seeds, k)
