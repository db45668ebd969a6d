'''
Small hand-built graphs and SampleSets for unit tests
'''

import numpy as np
from rumor_block.graph import build_graph
from rumor_block.rtuple import RTuple, SampleSet

def make_graph(n, edges, p=1.0):
    ''' Graph from (u, v) or (u, v, p) tuples; p fills missing probabilities '''
    src = [e[0] for e in edges]
    dst = [e[1] for e in edges]
    prob = [e[2] if len(e) > 2 else p for e in edges]
    return build_graph(n, src, dst, prob)

# v3 -> v5 and v4 -> v5, all live; ids 0 = v3, 1 = v4, 2 = v5
TIE_GADGET = make_graph(3, [(0, 2), (1, 2)])

# r -> a -> b, all live
CHAIN = make_graph(3, [(0, 1), (1, 2)])

# rumor seed 0 with out-neighbours 3, 7, 5
STAR = make_graph(9, [(0, 3), (0, 7), (0, 5), (2, 4), (6, 8)])

# no edge ever fires
DEAD = make_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], p=0.0)

# two routes into node 4 with mixed probabilities; m = 7
DIAMOND = make_graph(6, [
    (0, 1, 0.5), (0, 2, 0.8), (1, 3, 0.6), (2, 3, 0.3),
    (3, 4, 0.9), (5, 4, 0.5), (2, 5, 0.4),
])

EDGE_LINES = [
    '# toy graph',
    '10 20 0.5',
    '20 30',
    '',
    '10 20 0.9',
    '40 40',
    '30 10 1.0  # back edge',
]

def random_graph(rng, n, m, probs=(0.2, 0.5, 0.9, 1.0)):
    ''' Random simple digraph with m distinct edges and probabilities from probs '''
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    pick = rng.choice(len(pairs), size=min(m, len(pairs)), replace=False)
    edges = [pairs[i] + (float(rng.choice(probs)),) for i in sorted(pick)]
    return make_graph(n, edges)

def random_sample_set(rng, n, count, max_len=4, b0_share=0.2, forbidden=()):
    ''' SampleSet of hand-made tuples over nodes 0..n-1 minus forbidden '''
    nodes = np.setdiff1d(np.arange(n), np.asarray(forbidden, dtype=np.int64))
    tuples = []
    for _ in range(count):
        root = int(rng.integers(n))
        if rng.random() < b0_share:
            tuples.append(RTuple(root, (), False))
            continue
        size = int(rng.integers(0, max_len + 1))
        v_star = tuple(sorted(rng.choice(nodes, size=min(size, len(nodes)), replace=False).tolist()))
        tuples.append(RTuple(root, v_star, True))
    return SampleSet(n, tuples)
