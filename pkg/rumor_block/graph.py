'''
Directed graphs with per-edge propagation probabilities
'''

import io
import dataclasses
import networkx as nx
import numpy as np
from rumor_block.parsers import parse_edge_lines

@dataclasses.dataclass(frozen=True)
class WeightingModel:
    ''' How edge probabilities are assigned

    kind is 'constant' (every edge gets p), 'wc' (weighted cascade,
    p_(u,v) = 1/in-degree(v)) or 'file' (third column of the edge list).
    '''
    kind: str
    p: float = 0.1

    def __post_init__(self):
        if self.kind not in ('constant', 'wc', 'file'):
            raise ValueError("Unknown weighting model: {k!r}".format(k=self.kind))
        if self.kind == 'constant' and not 0.0 <= self.p <= 1.0:
            raise ValueError("Constant probability must be in [0, 1], got {p}".format(p=self.p))

    @classmethod
    def constant(cls, p=0.1):
        return cls('constant', float(p))

    @classmethod
    def weighted_cascade(cls):
        return cls('wc')

    @classmethod
    def from_file(cls):
        return cls('file')

    @classmethod
    def parse(cls, text):
        ''' Parse 'cp', 'cp:<p>', 'wc' or 'file'

        Examples
        --------
        >>> WeightingModel.parse('cp:0.05')
        WeightingModel(kind='constant', p=0.05)
        '''
        name, _, arg = text.strip().lower().partition(':')
        if name in ('cp', 'constant'):
            try:
                return cls.constant(float(arg) if arg else 0.1)
            except ValueError as err:
                raise ValueError("Bad constant probability in {t!r}: {e}".format(t=text, e=err))
        if name == 'wc' and not arg:
            return cls.weighted_cascade()
        if name == 'file' and not arg:
            return cls.from_file()
        raise ValueError("Unknown weighting model: {t!r}".format(t=text))

    @property
    def label(self):
        ''' Short name used in reports ('CP', 'CP0.05', 'WC', 'FILE') '''
        if self.kind == 'constant':
            return 'CP' if self.p == 0.1 else 'CP{p:g}'.format(p=self.p)
        return 'WC' if self.kind == 'wc' else 'FILE'

    def weigh(self, n, dst, file_probs=None):
        ''' Probabilities for deduplicated edges with targets dst '''
        if self.kind == 'constant':
            return np.full(len(dst), self.p, dtype=np.float64)
        if self.kind == 'wc':
            in_deg = np.bincount(dst, minlength=n)
            return 1.0 / in_deg[dst] if len(dst) else np.empty(0, dtype=np.float64)
        assert file_probs is not None, "File weighting requires probabilities"
        return np.asarray(file_probs, dtype=np.float64)

@dataclasses.dataclass(frozen=True, eq=False)
class Graph:
    ''' Immutable directed graph in compressed sparse row form

    Edge ids 0..m-1 follow the out-CSR order, so the out-edges of u are the
    ids out_ptr[u]:out_ptr[u + 1] and dst/prob are indexed by edge id.
    in_eid lists edge ids grouped by target, in_ptr delimits the groups.
    labels maps internal ids to the original node labels.
    '''
    n: int
    src: np.ndarray
    dst: np.ndarray
    prob: np.ndarray
    out_ptr: np.ndarray
    in_ptr: np.ndarray
    in_eid: np.ndarray
    labels: np.ndarray

    @property
    def m(self):
        return len(self.dst)

    def out_edges(self, u):
        ''' (targets, probabilities) of the out-edges of u '''
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        return self.dst[lo:hi], self.prob[lo:hi]

    def in_edges(self, v):
        ''' (edge ids, sources, probabilities) of the in-edges of v '''
        eids = self.in_eid[self.in_ptr[v]:self.in_ptr[v + 1]]
        return eids, self.src[eids], self.prob[eids]

    def gather_out(self, nodes):
        ''' Edge ids of all out-edges of nodes, grouped by node

        Returns
        -------
        (edge ids, per-node out-degree) as int arrays
        '''
        nodes = np.asarray(nodes, dtype=np.int64)
        starts = self.out_ptr[nodes]
        counts = self.out_ptr[nodes + 1] - starts
        total = int(counts.sum())
        if total == 0:
            return np.empty(0, dtype=np.int64), counts
        before = np.cumsum(counts) - counts
        return np.arange(total, dtype=np.int64) + np.repeat(starts - before, counts), counts

    def gather_in(self, nodes):
        ''' Edge ids of all in-edges of nodes, grouped by node '''
        nodes = np.asarray(nodes, dtype=np.int64)
        starts = self.in_ptr[nodes]
        counts = self.in_ptr[nodes + 1] - starts
        total = int(counts.sum())
        if total == 0:
            return np.empty(0, dtype=np.int64)
        before = np.cumsum(counts) - counts
        return self.in_eid[np.arange(total, dtype=np.int64) + np.repeat(starts - before, counts)]

    @property
    def out_adj(self):
        return [list(zip(*(arr.tolist() for arr in self.out_edges(u)))) for u in range(self.n)]

    @property
    def in_adj(self):
        return [list(zip(*(arr.tolist() for arr in self.in_edges(v)[1:]))) for v in range(self.n)]

    def out_degree(self):
        return np.diff(self.out_ptr)

    def in_degree(self):
        return np.diff(self.in_ptr)

    def index_of(self, labels):
        ''' Internal ids of original labels

        Raises
        ------
        RuntimeError if a label is not a node of the graph
        '''
        labels = np.asarray(list(labels), dtype=np.int64)
        pos = np.searchsorted(self.labels, labels)
        pos = np.minimum(pos, max(self.n - 1, 0))
        missing = labels[(self.n == 0) | (self.labels[pos] != labels)]
        if missing.size:
            raise RuntimeError(
                "Unknown node labels: {labels}".format(
                    labels=", ".join(str(x) for x in missing[:10])
                )
            )
        return pos.astype(np.int64)

    def label_of(self, nodes):
        ''' Original labels of internal ids, as a list of ints '''
        return [int(x) for x in self.labels[np.asarray(list(nodes), dtype=np.int64)]]

def build_graph(n, src, dst, prob, labels=None):
    ''' Build a Graph from parallel edge arrays

    Parameters
    ----------
    n : node count
    src, dst : edge endpoints as internal ids 0..n-1
    prob : edge probabilities
    labels : original labels, sorted ascending (default 0..n-1)

    Returns
    -------
    Graph

    Raises
    ------
    ValueError if an endpoint is out of range, a probability is outside
    [0, 1], or the edges contain self-loops or duplicates
    '''
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    prob = np.asarray(prob, dtype=np.float64)

    if not len(src) == len(dst) == len(prob):
        raise ValueError("Edge arrays differ in length")
    if n < 0 or (len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n)):
        raise ValueError("Edge endpoint out of range 0..{m}".format(m=n - 1))
    if len(prob) and not (np.all(prob >= 0.0) and np.all(prob <= 1.0)):
        raise ValueError("Edge probabilities must lie in [0, 1]")
    if np.any(src == dst):
        raise ValueError("Self-loops are not allowed")

    order = np.lexsort((dst, src))
    src, dst, prob = src[order], dst[order], prob[order]
    if len(src) > 1 and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
        raise ValueError("Duplicate edges are not allowed")

    out_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=out_ptr[1:])
    in_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=in_ptr[1:])
    in_eid = np.argsort(dst, kind='stable').astype(np.int64)

    if labels is None:
        labels = np.arange(n, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    assert len(labels) == n, "One label per node required"

    for arr in (src, dst, prob, out_ptr, in_ptr, in_eid, labels):
        arr.setflags(write=False)
    return Graph(n, src, dst, prob, out_ptr, in_ptr, in_eid, labels)

def read_edge_list(lines, model):
    ''' Build a Graph from edge-list lines (see load_edge_list) '''
    parsed = parse_edge_lines(lines)

    if model.kind == 'file':
        missing = [lineno for _, _, p, lineno in parsed if p is None]
        if missing:
            raise RuntimeError(
                "Probability column missing on line {lineno}".format(lineno=missing[0])
            )

    node_labels = sorted(set(u for u, _, _, _ in parsed) | set(v for _, v, _, _ in parsed))
    if not node_labels:
        raise RuntimeError("Edge list contains no nodes")
    labels = np.asarray(node_labels, dtype=np.int64)

    # self-loops dropped, first occurrence of each ordered pair kept
    seen = set()
    edges = []
    for u, v, p, _ in parsed:
        if u == v or (u, v) in seen:
            continue
        seen.add((u, v))
        edges.append((u, v, p))

    n = len(labels)
    src = np.searchsorted(labels, np.asarray([e[0] for e in edges], dtype=np.int64))
    dst = np.searchsorted(labels, np.asarray([e[1] for e in edges], dtype=np.int64))
    file_probs = [e[2] for e in edges] if model.kind == 'file' else None
    prob = model.weigh(n, dst, file_probs)
    return build_graph(n, src, dst, prob, labels)

def load_edge_list(path, model):
    ''' Load a graph from an edge-list file

    Lines are "u v" or "u v p", whitespace separated; '#' lines are comments.
    Self-loops are dropped (their endpoint stays a node), duplicate ordered
    pairs keep their first occurrence, and the weighting model is applied
    after deduplication. Labels are remapped to dense ids in ascending label
    order.

    Parameters
    ----------
    path : file path
    model : WeightingModel

    Returns
    -------
    Graph

    Raises
    ------
    RuntimeError if a line is malformed, a probability is outside [0, 1], the
    file model lacks a probability column, or the file has no nodes
    OSError if the file cannot be read

    Examples
    --------
    >>> g = load_edge_list('g.txt', WeightingModel.constant(0.1))
    >>> g.n, g.m
    (3, 2)
    '''
    with io.open(path, encoding='utf-8') as fh:
        return read_edge_list(fh, model)

def write_edge_list(g, path):
    ''' Write g as "u v p" lines with original labels, p to 6 decimals

    Nodes without edges are written as "v v p" self-loop lines, which the
    loader keeps as nodes and drops as edges.
    '''
    lines = ["# nodes {n} edges {m}\n".format(n=g.n, m=g.m)]
    labels = g.labels
    for s, d, p in zip(g.src.tolist(), g.dst.tolist(), g.prob.tolist()):
        lines.append("{u} {v} {p:.6f}\n".format(u=labels[s], v=labels[d], p=p))
    isolated = np.flatnonzero((g.out_degree() == 0) & (g.in_degree() == 0))
    for v in isolated.tolist():
        lines.append("{u} {u} {p:.6f}\n".format(u=labels[v], p=0.0))
    with io.open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.writelines(lines)

def power_law_weights(n, mean_degree, exponent):
    ''' Chung-Lu expected degrees w_i ~ (i + i0)^(-1/(exponent - 1))

    The offset i0 grows until the largest weight is at most the square root of
    the weight total, so no pair probability w_u * w_v / sum(w) exceeds 1.
    '''
    alpha = 1.0 / (exponent - 1.0)
    ranks = np.arange(n, dtype=np.float64)
    offset = 1.0
    for _ in range(200):
        w = (ranks + offset) ** -alpha
        w *= mean_degree / w.mean()
        if w[0] <= np.sqrt(w.sum()):
            break
        offset *= 1.25
    return w

def generate_power_law(n, avg_out_degree, exponent=2.5, seed=0, model=None):
    ''' Directed Chung-Lu graph with a power-law expected degree sequence

    An undirected expected-degree graph with mean total degree
    2 * avg_out_degree is drawn, then every edge is oriented by a fair coin, so
    the expected edge count is n * avg_out_degree.

    Parameters
    ----------
    n : node count, at least 2
    avg_out_degree : target mean out-degree, positive
    exponent : power-law exponent, greater than 1
    seed : int, fixes the graph
    model : WeightingModel (default constant 0.1)

    Returns
    -------
    Graph

    Raises
    ------
    ValueError if a parameter is out of range
    '''
    if n < 2:
        raise ValueError("Power-law graph needs at least 2 nodes, got {n}".format(n=n))
    if not exponent > 1.0:
        raise ValueError("Exponent must be greater than 1, got {e}".format(e=exponent))
    if not avg_out_degree > 0.0:
        raise ValueError("Average out-degree must be positive, got {d}".format(d=avg_out_degree))
    if model is None:
        model = WeightingModel.constant(0.1)
    if model.kind == 'file':
        raise ValueError("Generated graphs need a constant or weighted cascade model")

    weights = power_law_weights(n, 2.0 * avg_out_degree, exponent)
    undirected = nx.expected_degree_graph(weights.tolist(), seed=int(seed), selfloops=False)
    pairs = np.asarray(sorted((min(a, b), max(a, b)) for a, b in undirected.edges()),
                       dtype=np.int64).reshape(-1, 2)

    rng = np.random.default_rng(int(seed))
    flip = rng.random(len(pairs)) < 0.5
    src = np.where(flip, pairs[:, 1], pairs[:, 0])
    dst = np.where(flip, pairs[:, 0], pairs[:, 1])
    return build_graph(n, src, dst, model.weigh(n, dst))

def degree_top_k(g, k, direction='out'):
    ''' The k nodes of highest degree, ties broken by lower internal id

    Parameters
    ----------
    g : Graph
    k : count, 1 <= k <= n
    direction : 'out', 'in' or 'total'

    Returns
    -------
    List of internal ids

    Raises
    ------
    ValueError if k is out of range or direction unknown
    '''
    if not 1 <= k <= g.n:
        raise ValueError("k must be in 1..{n}, got {k}".format(n=g.n, k=k))
    if direction == 'out':
        deg = g.out_degree()
    elif direction == 'in':
        deg = g.in_degree()
    elif direction == 'total':
        deg = g.out_degree() + g.in_degree()
    else:
        raise ValueError("Unknown degree direction: {d!r}".format(d=direction))
    order = np.lexsort((np.arange(g.n), -deg))
    return order[:k].tolist()
