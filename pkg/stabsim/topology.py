"""
Rooted undirected topologies.

Nodes are dense integers `0..n-1` and the root is always `0`. Builders tag nodes
with labels (`p_3`, `e.2`, `h.0`...) so scripts and schedules can address them.
Distances from the root and the diameter are computed once, at construction.
"""
from __future__ import annotations

import itertools
import logging
import random
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .error import GraphParseError, TopologyError

logger = logging.getLogger(__name__)

NodeRef = Union[int, str]


class Graph:
    """
    Immutable rooted graph with a cached BFS distance oracle.
    """
    __slots__ = ('_adjacency', '_labels', '_index', '_distances', '_diameter', '_nx')

    def __init__(self, adjacency: Sequence[Iterable[int]], labels: Optional[Sequence[Optional[str]]] = None) -> None:
        n = len(adjacency)
        if n < 2:
            raise TopologyError('a graph needs a root and at least one other process')
        rows = []
        for p, row in enumerate(adjacency):
            row = list(row)
            for q in row:
                if not isinstance(q, int) or not 0 <= q < n:
                    raise TopologyError('node %d has an unknown neighbor %r' % (p, q))
                if q == p:
                    raise TopologyError('self-loop at node %d' % p)
            if len(set(row)) != len(row):
                raise TopologyError('duplicated neighbor in the adjacency of node %d' % p)
            rows.append(tuple(sorted(row)))
        for p, row in enumerate(rows):
            for q in row:
                if p not in rows[q]:
                    raise TopologyError('asymmetric adjacency between %d and %d' % (p, q))
        self._adjacency: Tuple[Tuple[int, ...], ...] = tuple(rows)

        if labels is None:
            labels = [None] * n
        if len(labels) != n:
            raise TopologyError('expected %d labels, got %d' % (n, len(labels)))
        self._labels: Tuple[Optional[str], ...] = tuple(labels)
        self._index: Dict[str, int] = {}
        for p, label in enumerate(self._labels):
            if label is None:
                continue
            if label in self._index:
                raise TopologyError('label %r is used twice' % label)
            self._index[label] = p

        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from((p, q) for p, row in enumerate(rows) for q in row if p < q)
        nx.set_node_attributes(g, {p: p == 0 for p in range(n)}, 'root')
        if not nx.is_connected(g):
            raise TopologyError('graph is not connected')
        self._nx = g
        lengths = nx.single_source_shortest_path_length(g, 0)
        self._distances: Tuple[int, ...] = tuple(lengths[p] for p in range(n))
        self._diameter: int = nx.diameter(g)

    @property
    def node_count(self) -> int:
        return len(self._adjacency)

    @property
    def root(self) -> int:
        return 0

    @property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        return self._adjacency

    @property
    def labels(self) -> Tuple[Optional[str], ...]:
        return self._labels

    @property
    def distances(self) -> Tuple[int, ...]:
        """
        Hop distance of every node from the root
        """
        return self._distances

    @property
    def diameter(self) -> int:
        return self._diameter

    @property
    def processes(self) -> range:
        """
        Non-root node ids
        """
        return range(1, len(self._adjacency))

    def neighbors(self, p: int) -> Tuple[int, ...]:
        return self._adjacency[p]

    def degree(self, p: int) -> int:
        return len(self._adjacency[p])

    def distance(self, p: int) -> int:
        return self._distances[p]

    def edges(self) -> List[Tuple[int, int]]:
        return [(p, q) for p, row in enumerate(self._adjacency) for q in row if p < q]

    @property
    def edge_count(self) -> int:
        return sum(len(row) for row in self._adjacency) // 2

    def label(self, p: int) -> str:
        label = self._labels[p]
        return str(p) if label is None else label

    def node(self, ref: NodeRef) -> int:
        """
        Resolve a node id or a label to a node id.
        """
        if isinstance(ref, int) and not isinstance(ref, bool):
            if 0 <= ref < self.node_count:
                return ref
            raise TopologyError('unknown node id %d' % ref)
        ref = str(ref)
        if ref in self._index:
            return self._index[ref]
        if ref.isdigit():
            return self.node(int(ref))
        raise TopologyError('unknown node %r' % ref)

    def to_networkx(self) -> nx.Graph:
        return self._nx.copy()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adjacency == other._adjacency and self._labels == other._labels

    def __hash__(self) -> int:
        return hash((self._adjacency, self._labels))

    def __repr__(self) -> str:
        return 'Graph(n=%d, m=%d, diameter=%d)' % (self.node_count, self.edge_count, self._diameter)


def from_edges(node_count: int, edges: Iterable[Tuple[int, int]], labels: Optional[Sequence[Optional[str]]] = None) -> Graph:
    adjacency: List[List[int]] = [[] for _ in range(node_count)]
    seen = set()
    for u, v in edges:
        if u == v:
            raise TopologyError('self-loop at node %d' % u)
        key = frozenset((u, v))
        if key in seen:
            raise TopologyError('edge {%d, %d} is listed twice' % (u, v))
        seen.add(key)
        adjacency[u].append(v)
        adjacency[v].append(u)
    return Graph(adjacency, labels)


def build_line(length: int) -> Graph:
    """
    Path p_0 (root) .. p_length.
    """
    if length < 1:
        raise TopologyError('a line needs at least one edge, got length %d' % length)
    edges = [(i, i + 1) for i in range(length)]
    return from_edges(length + 1, edges, ['p_%d' % i for i in range(length + 1)])


def build_lollipop(diam: int) -> Graph:
    """
    Path p_0 .. p_{diam+1} closed by the chord {p_{diam+1}, p_{diam-1}}.
    """
    if diam < 2:
        raise TopologyError('a lollipop needs a diameter of at least 2, got %d' % diam)
    edges = [(i, i + 1) for i in range(diam + 1)]
    edges.append((diam + 1, diam - 1))
    return from_edges(diam + 2, edges, ['p_%d' % i for i in range(diam + 2)])


def build_gk(k: int) -> Graph:
    """
    Worst-case family for step complexity: 4k+3 nodes, diameter 2k+3.

    Level 1 holds R, f.0, e.1, f.1, h.0, g.1, h.1; every further level j adds
    e.j, f.j, g.j, h.j, hanging e.j on f.{j-1}.
    """
    if k < 1:
        raise TopologyError('k must be at least 1, got %d' % k)
    labels = ['R', 'f.0', 'e.1', 'f.1', 'h.0', 'g.1', 'h.1']
    for j in range(2, k + 1):
        labels += ['e.%d' % j, 'f.%d' % j, 'g.%d' % j, 'h.%d' % j]
    at = {label: p for p, label in enumerate(labels)}
    pairs = [('R', 'h.0'), ('h.0', 'f.0'), ('f.0', 'e.1'), ('e.1', 'f.1'), ('f.1', 'h.1'), ('g.1', 'e.1')]
    for j in range(2, k + 1):
        pairs += [('f.%d' % (j - 1), 'e.%d' % j), ('g.%d' % j, 'e.%d' % j),
                  ('e.%d' % j, 'f.%d' % j), ('f.%d' % j, 'h.%d' % j)]
    return from_edges(len(labels), [(at[a], at[b]) for a, b in pairs], labels)


def add_root_leaves(g: Graph, y: int) -> Graph:
    """
    Attach `y` new leaves v.1 .. v.y to the root.
    """
    if y < 0:
        raise TopologyError('cannot add a negative number of leaves')
    if y == 0:
        return g
    n = g.node_count
    labels = list(g.labels) + ['v.%d' % i for i in range(1, y + 1)]
    edges = g.edges() + [(0, n + i) for i in range(y)]
    return from_edges(n + y, edges, labels)


def build_random(n: int, p: float = 0.3, seed: int = 0) -> Graph:
    """
    Reproducible random connected graph: a random recursive tree plus extra edges.
    """
    if n < 2:
        raise TopologyError('a random graph needs at least 2 nodes, got %d' % n)
    if not 0.0 <= p <= 1.0:
        raise TopologyError('edge probability must lie in [0, 1], got %r' % p)
    rng = random.Random(seed)
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in edges and rng.random() < p:
            edges.add((u, v))
    return from_edges(n, sorted(edges))


def connected_graphs(max_nodes: int, dedup: bool = True, min_nodes: int = 2) -> Iterator[Graph]:
    """
    Every connected graph on 2..max_nodes nodes, rooted at 0. With `dedup`, only
    one representative per rooted isomorphism class is kept.
    """
    def same_root(a, b):
        return a['root'] == b['root']

    for n in range(max(min_nodes, 2), max_nodes + 1):
        kept: List[Graph] = []
        pairs = list(itertools.combinations(range(n), 2))
        for size in range(n - 1, len(pairs) + 1):
            for subset in itertools.combinations(pairs, size):
                candidate = nx.Graph(subset)
                if candidate.number_of_nodes() != n or not nx.is_connected(candidate):
                    continue
                g = from_edges(n, subset)
                if dedup and any(h.edge_count == g.edge_count and nx.is_isomorphic(
                        h._nx, g._nx, node_match=same_root) for h in kept):
                    continue
                kept.append(g)
                yield g
        logger.debug('%d connected graphs on %d nodes', len(kept), n)


def bfs_distances(g: Graph) -> Dict[int, int]:
    return dict(enumerate(g.distances))


def diameter(g: Graph) -> int:
    return g.diameter


def parse_graph(text: str) -> Graph:
    """
    Parse the edge-list format: `root <id>` first, then `<u> <v>` edges and
    optional `label <id> <string>` lines; `#` starts a comment. Ids are
    renumbered so that the root becomes 0 and the others keep their order.
    """
    root = None
    edges: List[Tuple[int, int]] = []
    seen = set()
    labels: Dict[int, str] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if root is None:
            if tokens[0] != 'root' or len(tokens) != 2 or not tokens[1].isdigit():
                raise GraphParseError('expected "root <id>" before anything else', number)
            root = int(tokens[1])
            continue
        if tokens[0] == 'root':
            raise GraphParseError('root declared twice', number)
        if tokens[0] == 'label':
            if len(tokens) < 3 or not tokens[1].isdigit():
                raise GraphParseError('expected "label <id> <string>"', number)
            labels[int(tokens[1])] = line.split(None, 2)[2]
            continue
        if len(tokens) != 2 or not (tokens[0].isdigit() and tokens[1].isdigit()):
            raise GraphParseError('expected "<u> <v>", got %r' % line, number)
        u, v = int(tokens[0]), int(tokens[1])
        if u == v:
            raise GraphParseError('self-loop at node %d' % u, number)
        key = frozenset((u, v))
        if key in seen:
            raise GraphParseError('edge {%d, %d} is listed twice' % (u, v), number)
        seen.add(key)
        edges.append((u, v))
    if root is None:
        raise GraphParseError('empty graph description: missing root')
    nodes = {root} | {p for edge in edges for p in edge}
    for p in labels:
        if p not in nodes:
            raise GraphParseError('label given for node %d which has no edge' % p)
    order = [root] + sorted(nodes - {root})
    renumber = {p: i for i, p in enumerate(order)}
    try:
        return from_edges(len(order), [(renumber[u], renumber[v]) for u, v in edges],
                          [labels.get(p) for p in order])
    except TopologyError as e:
        raise GraphParseError(str(e)) from e


def serialize_graph(g: Graph) -> str:
    lines = ['root 0']
    lines += ['label %d %s' % (p, label) for p, label in enumerate(g.labels) if label is not None]
    lines += ['%d %d' % edge for edge in g.edges()]
    return '\n'.join(lines) + '\n'
