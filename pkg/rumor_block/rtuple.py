'''
Reverse R-tuple sampling

An R-tuple is grown by reverse breadth-first search from a root until a
rumor seed shows up in the frontier (b = True) or the frontier empties
(b = False). v_star holds the nodes strictly closer to the root than the
nearest rumor seed; a positive seed set S saves the root iff S meets v_star
or b is False.
'''

import io
import os
import logging
import struct
import hashlib
import dataclasses
import concurrent.futures
from collections import defaultdict
import numpy as np
from rumor_block.helpers import NS_FINAL, node_mask, stream

logger = logging.getLogger(__name__)

# tuples per random stream; tuple j is draw j % BLOCK of stream j // BLOCK
BLOCK = 256

MAGIC = b'RBRS'
VERSION = 2

@dataclasses.dataclass(frozen=True)
class RTuple:
    ''' One reverse sample

    e_t / e_f (edge ids tested live / dead) are kept only in verification
    mode; tested counts the edge flips either way.
    '''
    root: int
    v_star: tuple
    b: bool
    e_t: tuple = None
    e_f: tuple = None
    tested: int = 0

def _grow(g, rumor, root, flip, verify):
    ''' Reverse BFS from root; flip(edge ids) -> bool array of live edges '''
    frontier = np.asarray([root], dtype=np.int64)
    seen = {root}
    levels = []
    e_t, e_f = ([], []) if verify else (None, None)
    tested = 0
    while True:
        if rumor[frontier].any():
            b = True
            break
        if frontier.size == 0:
            b = False
            break
        levels.append(frontier)

        # only in-edges of the newly added level are tested, once each
        eids = g.gather_in(frontier)
        live = flip(eids)
        tested += eids.size
        if verify:
            e_t.extend(eids[live].tolist())
            e_f.extend(eids[~live].tolist())

        nxt = []
        for u in g.src[eids[live]].tolist():
            if u not in seen:
                seen.add(u)
                nxt.append(u)
        frontier = np.asarray(nxt, dtype=np.int64)

    v_star = tuple(sorted(np.concatenate(levels).tolist())) if levels else ()
    return RTuple(
        root=int(root), v_star=v_star, b=b,
        e_t=tuple(e_t) if verify else None,
        e_f=tuple(e_f) if verify else None,
        tested=tested,
    )

def _rumor_mask(g, rumor_seeds):
    mask = node_mask(rumor_seeds, g.n)
    if not mask.any():
        raise ValueError("At least one rumor seed required")
    return mask

def _stochastic_flip(g, rng):
    return lambda eids: rng.random(eids.size) < g.prob[eids]

def sample_rtuple_of(g, rumor_seeds, v, rng, verify=False):
    ''' Random R-tuple of root v

    Parameters
    ----------
    g : Graph
    rumor_seeds : node ids of S_r, nonempty
    v : root node id
    rng : numpy.random.Generator
    verify : keep the tested edge sets e_t / e_f

    Returns
    -------
    RTuple

    Raises
    ------
    ValueError if v is out of range or S_r is empty

    Examples
    --------
    >>> # chain 0 -> 1 -> 2, all p = 1, S_r = {0}
    >>> sample_rtuple_of(g, [0], 2, rng).v_star
    (1, 2)
    '''
    if not 0 <= v < g.n:
        raise ValueError("Root {v} out of range 0..{m}".format(v=v, m=g.n - 1))
    return _grow(g, _rumor_mask(g, rumor_seeds), int(v), _stochastic_flip(g, rng), verify)

def sample_rtuple(g, rumor_seeds, rng, verify=False):
    ''' Random R-tuple with a root drawn uniformly from all n nodes '''
    root = int(rng.integers(g.n))
    return _grow(g, _rumor_mask(g, rumor_seeds), root, _stochastic_flip(g, rng), verify)

def rtuple_from_realization(r, rumor_seeds, v, verify=False):
    ''' The R-tuple of root v determined by a fixed realization '''
    g = r.graph
    return _grow(g, _rumor_mask(g, rumor_seeds), int(v), lambda eids: r.present[eids], verify)

def x_indicator(seeds, t):
    ''' 1 if seeds intersect t.v_star or t.b is False, else 0

    Examples
    --------
    >>> x_indicator(set(), RTuple(0, (), False))
    1
    >>> x_indicator({1}, RTuple(0, (0, 1), True))
    1
    >>> x_indicator(set(), RTuple(0, (0,), True))
    0
    '''
    seeds = seeds if isinstance(seeds, (set, frozenset)) else set(seeds)
    return int(not t.b or not seeds.isdisjoint(t.v_star))

class SampleSet:
    ''' An ordered collection of R-tuples with an inverted coverage index

    inverted maps a node to the sorted indices of the b = True tuples whose
    v_star contains it. b = False tuples are counted in count_b0 only.
    '''

    def __init__(self, n, tuples):
        self.n = n
        self.tuples = tuple(tuples)
        lists = defaultdict(list)
        count_b0 = 0
        edges_tested = 0
        for i, t in enumerate(self.tuples):
            edges_tested += t.tested
            if not t.b:
                count_b0 += 1
                continue
            for u in t.v_star:
                lists[u].append(i)
        self.count_b0 = count_b0
        self.edges_tested = edges_tested
        self.inverted = {
            u: np.asarray(idx, dtype=np.int64) for u, idx in sorted(lists.items())
        }

    def __len__(self):
        return len(self.tuples)

    def extended(self, tuples):
        ''' A new SampleSet holding these tuples followed by more '''
        return SampleSet(self.n, self.tuples + tuple(tuples))

    def count_b1_empty(self):
        ''' Number of b = True tuples with empty v_star (never coverable) '''
        return sum(1 for t in self.tuples if t.b and not t.v_star)

def coverage(seeds, samples):
    ''' F(S, R): number of tuples t with x(S, t) = 1

    Examples
    --------
    >>> coverage([], samples) == samples.count_b0
    True
    '''
    hits = [samples.inverted[u] for u in set(int(v) for v in seeds) if u in samples.inverted]
    if not hits:
        return samples.count_b0
    return samples.count_b0 + int(np.unique(np.concatenate(hits)).size)

class TupleSampler:
    ''' Deterministic, resumable source of random R-tuples

    Tuple j is the (j % BLOCK)-th draw of stream(seed, namespace, j // BLOCK),
    so the tuples produced never depend on how draws are split into calls or
    on the number of worker threads.
    '''

    def __init__(self, g, rumor_seeds, seed, namespace=NS_FINAL, threads=1, verify=False):
        self.g = g
        self.rumor = _rumor_mask(g, rumor_seeds)
        self.seed = int(seed)
        self.namespace = int(namespace)
        self.threads = max(1, int(threads))
        self.verify = verify
        self.produced = 0
        self._open = None

    def _draw(self, rng, count):
        g, rumor, verify = self.g, self.rumor, self.verify
        flip = _stochastic_flip(g, rng)
        return [_grow(g, rumor, int(rng.integers(g.n)), flip, verify) for _ in range(count)]

    def _block(self, index):
        return self._draw(stream(self.seed, self.namespace, index), BLOCK)

    def draw(self, count):
        ''' The next count tuples '''
        out = []
        if count > 0 and self._open is not None:
            take = min(count, BLOCK - self.produced % BLOCK)
            out.extend(self._draw(self._open, take))
            self.produced += take
            count -= take
            if self.produced % BLOCK == 0:
                self._open = None

        full = count // BLOCK
        if full:
            first = self.produced // BLOCK
            blocks = range(first, first + full)
            if self.threads > 1 and full > 1:
                with concurrent.futures.ThreadPoolExecutor(max_workers=self.threads) as pool:
                    for chunk in pool.map(self._block, blocks):
                        out.extend(chunk)
            else:
                for index in blocks:
                    out.extend(self._block(index))
            self.produced += full * BLOCK
            count -= full * BLOCK

        if count:
            self._open = stream(self.seed, self.namespace, self.produced // BLOCK)
            out.extend(self._draw(self._open, count))
            self.produced += count
        return out

def generate_sample_set(g, rumor_seeds, count, seed, namespace=NS_FINAL, threads=1,
                        verify=False):
    ''' A fresh SampleSet of count random R-tuples

    Parameters
    ----------
    g : Graph
    rumor_seeds : node ids of S_r, nonempty
    count : number of tuples
    seed : master seed
    namespace : stream namespace (keeps selection and evaluation tuples apart)
    threads : worker cap; the result does not depend on it
    verify : keep e_t / e_f

    Returns
    -------
    SampleSet
    '''
    sampler = TupleSampler(g, rumor_seeds, seed, namespace, threads, verify)
    logger.debug("Generating %d R-tuples (namespace %d)", count, namespace)
    return SampleSet(g.n, sampler.draw(int(count)))

def _write_varint(buf, value):
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return

def _read_varint(data, pos):
    value, shift = 0, 0
    while True:
        if pos >= len(data):
            raise RuntimeError("Truncated sample set file")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7

def sample_set_key(g, rumor_seeds, seed, namespace=NS_FINAL):
    ''' (seed, namespace, fingerprint of graph and rumor seeds) naming a SampleSet

    Two SampleSets with equal keys and lengths hold the same tuples.
    '''
    digest = hashlib.blake2b(digest_size=8)
    for arr in (g.src, g.dst, g.prob, np.flatnonzero(node_mask(rumor_seeds, g.n))):
        digest.update(np.ascontiguousarray(arr).tobytes())
    return int(seed), int(namespace), int.from_bytes(digest.digest(), 'little')

def dump_sample_set(samples, path, key=(0, 0, 0)):
    ''' Write a SampleSet cache file

    Layout: magic 'RBRS', version byte, then varints n, l, count_b0, the
    three key fields, and per tuple: root, 2 * len(v_star) + b, tested, then
    the sorted v_star as deltas. Tested edge sets are not stored.
    '''
    buf = bytearray(MAGIC + struct.pack('B', VERSION))
    for value in (samples.n, len(samples), samples.count_b0) + tuple(key):
        _write_varint(buf, value)
    for t in samples.tuples:
        _write_varint(buf, t.root)
        _write_varint(buf, 2 * len(t.v_star) + int(t.b))
        _write_varint(buf, t.tested)
        prev = 0
        for u in t.v_star:
            _write_varint(buf, u - prev)
            prev = u
    with io.open(path, 'wb') as fh:
        fh.write(bytes(buf))

def read_sample_set(path):
    ''' (SampleSet, key) from a cache file written by dump_sample_set

    Raises
    ------
    RuntimeError on a bad magic, unknown version, or inconsistent header
    '''
    with io.open(path, 'rb') as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise RuntimeError("Not a sample set file: {p}".format(p=path))
    if data[4:5] != struct.pack('B', VERSION):
        raise RuntimeError("Unsupported sample set version in {p}".format(p=path))
    pos = 5
    header = []
    for _ in range(6):
        value, pos = _read_varint(data, pos)
        header.append(value)
    n, count, count_b0 = header[:3]
    tuples = []
    for _ in range(count):
        root, pos = _read_varint(data, pos)
        head, pos = _read_varint(data, pos)
        tested, pos = _read_varint(data, pos)
        v_star, prev = [], 0
        for _ in range(head >> 1):
            delta, pos = _read_varint(data, pos)
            prev += delta
            v_star.append(prev)
        tuples.append(RTuple(root=root, v_star=tuple(v_star), b=bool(head & 1), tested=tested))
    samples = SampleSet(n, tuples)
    if samples.count_b0 != count_b0:
        raise RuntimeError("Sample set header disagrees with its tuples: {p}".format(p=path))
    return samples, tuple(header[3:])

def load_sample_set(path):
    ''' Read a SampleSet cache file written by dump_sample_set '''
    return read_sample_set(path)[0]

def cached_sample_set(g, rumor_seeds, count, seed, namespace=NS_FINAL, threads=1, cache=None):
    ''' generate_sample_set, reusing the cache file when it holds the same tuples

    A cache file whose n, length or key differ (or that cannot be read) is
    regenerated and overwritten.
    '''
    if cache is None:
        return generate_sample_set(g, rumor_seeds, count, seed, namespace, threads)
    key = sample_set_key(g, rumor_seeds, seed, namespace)
    if os.path.exists(cache):
        try:
            samples, stored = read_sample_set(cache)
        except RuntimeError as err:
            logger.warning("Ignoring sample cache %s: %s", cache, err)
        else:
            if stored == key and samples.n == g.n and len(samples) == count:
                logger.info("Loaded %d R-tuples from %s", count, cache)
                return samples
            logger.info("Sample cache %s does not match this run; regenerating", cache)
    samples = generate_sample_set(g, rumor_seeds, count, seed, namespace, threads)
    dump_sample_set(samples, cache, key)
    logger.info("Wrote %d R-tuples to %s", count, cache)
    return samples

def naive_coverage(seeds, samples):
    ''' F(S, R) as a plain sum of x_indicator over the tuples '''
    seeds = set(int(v) for v in seeds)
    return sum(x_indicator(seeds, t) for t in samples.tuples)
