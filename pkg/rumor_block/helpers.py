'''
Helpers
'''

import time
import contextlib
import numpy as np

# Integer namespaces for derived random streams. Streams drawn under
# different namespaces never overlap, whatever the master seed.
NS_ESTIMATE = 1
NS_FINAL = 2
NS_EVALUATE = 3
NS_MONTE_CARLO = 4
NS_GREEDY = 5
NS_RANDOM = 6
NS_CELL = 7

class GuardError(RuntimeError):
    ''' A resource guard refused an input that is too large '''

def stream(master_seed, *key):
    ''' Derive an independent random stream

    Parameters
    ----------
    master_seed : int
    *key : non-negative ints naming the stream

    Returns
    -------
    numpy.random.Generator

    Examples
    --------
    >>> a = stream(7, NS_FINAL, 3).random()
    >>> b = stream(7, NS_FINAL, 3).random()
    >>> a == b
    True
    '''
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(x) for x in key))
    return np.random.Generator(np.random.PCG64(seq))

def derive_seed(master_seed, *key):
    ''' Derive a child master seed (an int) from a master seed and a key

    Examples
    --------
    >>> derive_seed(1, 2) == derive_seed(1, 2)
    True
    >>> derive_seed(1, 2) == derive_seed(1, 3)
    False
    '''
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(x) for x in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))

def as_nodes(nodes, n):
    ''' Normalise a node collection to a sorted, duplicate-free int array

    Parameters
    ----------
    nodes : iterable of internal node ids (or None)
    n : node count

    Returns
    -------
    numpy.ndarray(int64)

    Raises
    ------
    ValueError if a node id is outside 0..n-1
    '''
    if nodes is None:
        return np.empty(0, dtype=np.int64)
    arr = np.unique(np.asarray(list(nodes), dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= n):
        raise ValueError("Node id out of range 0..{m}".format(m=n - 1))
    return arr

def node_mask(nodes, n):
    ''' Boolean membership mask of length n '''
    mask = np.zeros(n, dtype=bool)
    mask[as_nodes(nodes, n)] = True
    return mask

def check_disjoint(rumor_seeds, positive_seeds):
    ''' Raise ValueError if the two seed sets overlap

    Examples
    --------
    >>> check_disjoint([1, 2], [3])
    >>> check_disjoint([1, 2], [2])
    Traceback (most recent call last):
    ...
    ValueError: Rumor and positive seed sets overlap: 2
    '''
    overlap = sorted(set(int(v) for v in rumor_seeds) & set(int(v) for v in positive_seeds))
    if overlap:
        raise ValueError(
            "Rumor and positive seed sets overlap: {nodes}".format(
                nodes=", ".join(str(v) for v in overlap)
            )
        )

@contextlib.contextmanager
def timed(durations, phase):
    ''' Record the wall time of a block in durations[phase] (seconds) '''
    start = time.perf_counter()
    try:
        yield
    finally:
        durations[phase] = durations.get(phase, 0.0) + time.perf_counter() - start
