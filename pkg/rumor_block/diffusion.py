'''
Competitive independent cascade diffusion

Two cascades spread from disjoint seed sets: rumor (S_r) and positive (S_p).
A node keeps the first cascade that reaches it; simultaneous arrival resolves
to rumor.
'''

import itertools
import dataclasses
import numpy as np
from rumor_block.helpers import GuardError, as_nodes, check_disjoint

INACTIVE = 0
RUMOR = 1
POSITIVE = 2

EXACT_EDGE_GUARD = 20

# (trials x nodes) cells simulated per vectorised batch
BATCH_CELLS = 1 << 22

@dataclasses.dataclass(frozen=True, eq=False)
class Realization:
    ''' Deterministic sample of a graph: the edges present with probability 1 '''
    graph: object
    present: np.ndarray

    def __post_init__(self):
        assert len(self.present) == self.graph.m, "Edge mask length must equal m"

@dataclasses.dataclass(frozen=True, eq=False)
class DiffusionOutcome:
    ''' Per-node state (INACTIVE, RUMOR, POSITIVE) and activation step (inf if never) '''
    state: np.ndarray
    activation_time: np.ndarray

    @property
    def saved(self):
        ''' Nodes not activated by rumor '''
        return self.state != RUMOR

def sample_realization(g, rng):
    ''' Flip every edge once: edge e is present iff rand_e < p_e '''
    return Realization(g, rng.random(g.m) < g.prob)

def _seed_arrays(g, rumor_seeds, positive_seeds):
    rumor = as_nodes(rumor_seeds, g.n)
    positive = as_nodes(positive_seeds, g.n)
    check_disjoint(rumor, positive)
    return rumor, positive

def _live_targets(g, present, nodes):
    eids, _ = g.gather_out(nodes)
    return g.dst[eids[present[eids]]]

def diffuse_on_realization(r, rumor_seeds, positive_seeds):
    ''' Run competitive IC on a fixed realization in synchronous rounds

    At step t every node activated at t - 1 tries each of its live
    out-edges; an inactive node reached by both cascades in the same round
    becomes RUMOR.

    Parameters
    ----------
    r : Realization
    rumor_seeds : node ids of S_r
    positive_seeds : node ids of S_p

    Returns
    -------
    DiffusionOutcome

    Raises
    ------
    ValueError if the seed sets overlap

    Examples
    --------
    >>> # v3 -> v5, v4 -> v5, both live; rumor from v4, positive from v3
    >>> out = diffuse_on_realization(r, [4], [3])
    >>> out.state[5] == RUMOR, out.activation_time[5]
    (True, 1.0)
    '''
    g = r.graph
    rumor, positive = _seed_arrays(g, rumor_seeds, positive_seeds)

    state = np.full(g.n, INACTIVE, dtype=np.int8)
    when = np.full(g.n, np.inf)
    state[rumor], when[rumor] = RUMOR, 0.0
    state[positive], when[positive] = POSITIVE, 0.0

    step = 0
    while rumor.size or positive.size:
        step += 1
        reached_r = np.unique(_live_targets(g, r.present, rumor))
        reached_p = np.unique(_live_targets(g, r.present, positive))
        rumor = reached_r[state[reached_r] == INACTIVE]
        positive = reached_p[state[reached_p] == INACTIVE]
        positive = np.setdiff1d(positive, rumor, assume_unique=True)
        state[rumor], when[rumor] = RUMOR, step
        state[positive], when[positive] = POSITIVE, step
    return DiffusionOutcome(state, when)

def live_distances(r, sources):
    ''' Multi-source BFS hop distance over live edges (inf if unreachable) '''
    g = r.graph
    dist = np.full(g.n, np.inf)
    frontier = as_nodes(sources, g.n)
    dist[frontier] = 0.0
    hop = 0
    while frontier.size:
        hop += 1
        reached = np.unique(_live_targets(g, r.present, frontier))
        frontier = reached[np.isinf(dist[reached])]
        dist[frontier] = hop
    return dist

def rumor_free_count_condition(r, rumor_seeds, positive_seeds):
    ''' Shortest-path test for "not activated by rumor"

    u is saved iff dis(S_p, u) < dis(S_r, u) or dis(S_r, u) is infinite;
    ties go to rumor.

    Returns
    -------
    numpy.ndarray(bool) of length n

    Raises
    ------
    ValueError if the seed sets overlap
    '''
    rumor, positive = _seed_arrays(r.graph, rumor_seeds, positive_seeds)
    dist_r = live_distances(r, rumor)
    dist_p = live_distances(r, positive)
    return (dist_p < dist_r) | np.isinf(dist_r)

def simulate_cascades(g, rumor_seeds, positive_seeds, trials, rng):
    ''' Stochastic competitive IC, many independent trials at once

    Edges are flipped lazily: an edge (u, v) is tried once, in the round
    after u activates, which is equivalent to pre-sampling a realization.

    Parameters
    ----------
    g : Graph
    rumor_seeds, positive_seeds : node ids
    trials : count, at least 1
    rng : numpy.random.Generator

    Returns
    -------
    numpy.ndarray(int) of per-trial counts of nodes not activated by rumor
    '''
    if trials < 1:
        raise ValueError("trials must be at least 1, got {t}".format(t=trials))
    rumor, positive = _seed_arrays(g, rumor_seeds, positive_seeds)
    n = g.n
    batch = max(1, BATCH_CELLS // max(n, 1))
    counts = []
    for start in range(0, trials, batch):
        size = min(batch, trials - start)
        counts.append(_simulate_batch(g, rumor, positive, size, rng))
    return np.concatenate(counts)

def _simulate_batch(g, rumor, positive, trials, rng):
    n = g.n
    state = np.zeros(trials * n, dtype=np.int8)
    base = np.arange(trials, dtype=np.int64) * n
    frontier_r = (base[:, None] + rumor[None, :]).ravel()
    frontier_p = (base[:, None] + positive[None, :]).ravel()
    state[frontier_r] = RUMOR
    state[frontier_p] = POSITIVE

    def attempt(cells):
        eids, degrees = g.gather_out(cells % n)
        live = rng.random(len(eids)) < g.prob[eids]
        trial_base = np.repeat(cells - cells % n, degrees)
        return trial_base[live] + g.dst[eids[live]]

    while frontier_r.size or frontier_p.size:
        reached_r = np.unique(attempt(frontier_r))
        reached_p = np.unique(attempt(frontier_p))
        frontier_r = reached_r[state[reached_r] == INACTIVE]
        frontier_p = reached_p[state[reached_p] == INACTIVE]
        frontier_p = np.setdiff1d(frontier_p, frontier_r, assume_unique=True)
        state[frontier_r] = RUMOR
        state[frontier_p] = POSITIVE

    return n - np.count_nonzero(state.reshape(trials, n) == RUMOR, axis=1)

def estimate_f_monte_carlo(g, rumor_seeds, positive_seeds, trials, rng):
    ''' Monte Carlo estimate of f(S_p): mean count of nodes not rumor-activated '''
    return float(simulate_cascades(g, rumor_seeds, positive_seeds, trials, rng).mean())

def enumerate_realizations(g):
    ''' Yield (Pr[g], Realization) for every realization of positive probability

    Raises
    ------
    GuardError if m exceeds EXACT_EDGE_GUARD
    '''
    if g.m > EXACT_EDGE_GUARD:
        raise GuardError(
            "Exact enumeration needs m <= {guard}, got {m}".format(guard=EXACT_EDGE_GUARD, m=g.m)
        )
    bits = np.arange(g.m)
    for mask in range(1 << g.m):
        present = ((mask >> bits) & 1).astype(bool)
        weight = float(np.prod(np.where(present, g.prob, 1.0 - g.prob)))
        if weight > 0.0:
            yield weight, Realization(g, present)

def exact_f(g, rumor_seeds, positive_seeds):
    ''' f(S_p) by full enumeration of the 2^m realizations

    Raises
    ------
    GuardError if m exceeds EXACT_EDGE_GUARD
    ValueError if the seed sets overlap
    '''
    rumor, positive = _seed_arrays(g, rumor_seeds, positive_seeds)
    total = 0.0
    for weight, r in enumerate_realizations(g):
        outcome = diffuse_on_realization(r, rumor, positive)
        total += weight * np.count_nonzero(outcome.saved)
    return total

def exact_f_table(g, rumor_seeds, seed_sets):
    ''' Exact f for many positive seed sets, sharing one enumeration

    Returns
    -------
    numpy.ndarray of f values, one per seed set
    '''
    rumor = as_nodes(rumor_seeds, g.n)
    seed_sets = [as_nodes(s, g.n) for s in seed_sets]
    for s in seed_sets:
        check_disjoint(rumor, s)
    totals = np.zeros(len(seed_sets))
    for weight, r in enumerate_realizations(g):
        dist_r = live_distances(r, rumor)
        dist = np.vstack([live_distances(r, [u]) for u in range(g.n)])
        for i, s in enumerate(seed_sets):
            dist_s = dist[s].min(axis=0) if s.size else np.full(g.n, np.inf)
            totals[i] += weight * np.count_nonzero((dist_s < dist_r) | np.isinf(dist_r))
    return totals

def exact_opt(g, rumor_seeds, k):
    ''' OPT_k and an optimal seed set, by enumerating all k-subsets

    Returns
    -------
    (OPT_k, list of node ids)
    '''
    rumor = as_nodes(rumor_seeds, g.n)
    candidates = np.setdiff1d(np.arange(g.n), rumor)
    size = min(k, len(candidates))
    subsets = [list(c) for c in itertools.combinations(candidates.tolist(), size)]
    values = exact_f_table(g, rumor, subsets)
    best = int(np.argmax(values))
    return float(values[best]), subsets[best]
