"""
Legitimacy, BFS tree checks, attractor indexes and the configuration classes of
the G_k family.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, Optional, Tuple, Union

import networkx as nx
from networkx.utils import UnionFind

from .algorithms import Configuration
from .error import TopologyError, UsageError
from .topology import Graph

logger = logging.getLogger(__name__)


class TreeReason(Enum):
    CYCLE = 'cycle'
    NOT_SPANNING = 'not-spanning'
    NOT_SHORTEST = 'not-shortest'


@dataclass(frozen=True)
class TreeEdges:
    """
    Parent pointers of the non-root processes as (child, parent) arcs.
    """
    arcs: Tuple[Tuple[int, int], ...]

    @property
    def edges(self) -> FrozenSet[FrozenSet[int]]:
        return frozenset(frozenset(arc) for arc in self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    def __len__(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True)
class TreeCheck:
    ok: bool
    reason: Optional[TreeReason] = None

    def __bool__(self) -> bool:
        return self.ok


def is_legitimate(g: Graph, conf: Configuration) -> bool:
    dist = g.distances
    d = conf.d
    if d[0] != 0:
        return False
    for p in g.processes:
        if d[p] != dist[p] or d[p] != d[conf.par[p]] + 1:
            return False
    return True


def bfs_configuration(g: Graph) -> Configuration:
    """
    The legitimate configuration whose parents are the smallest BFS predecessors.
    """
    dist = g.distances
    par = [None] + [next(q for q in g.neighbors(p) if dist[q] == dist[p] - 1) for p in g.processes]
    return Configuration(dist, tuple(par))


def extract_tree(g: Graph, conf: Configuration) -> TreeEdges:
    return TreeEdges(tuple((p, conf.par[p]) for p in g.processes))


def verify_bfs_tree(g: Graph, edges: Union[TreeEdges, Iterable[Tuple[int, int]]]) -> TreeCheck:
    arcs = list(edges)
    forest = UnionFind(range(g.node_count))
    for u, v in arcs:
        if v not in g.neighbors(u):
            return TreeCheck(False, TreeReason.NOT_SPANNING)
        if forest[u] == forest[v]:
            return TreeCheck(False, TreeReason.CYCLE)
        forest.union(u, v)
    if len(arcs) != g.node_count - 1:
        return TreeCheck(False, TreeReason.NOT_SPANNING)
    tree = nx.Graph()
    tree.add_nodes_from(range(g.node_count))
    tree.add_edges_from(arcs)
    depth = nx.single_source_shortest_path_length(tree, 0)
    if any(depth[p] != g.distance(p) for p in range(g.node_count)):
        return TreeCheck(False, TreeReason.NOT_SHORTEST)
    return TreeCheck(True)


def _largest(holds: Callable[[int], bool], bound: int) -> int:
    i = 0
    while i < bound and holds(i + 1):
        i += 1
    return i


def _correct_node(g: Graph, conf: Configuration, i: int) -> bool:
    d, dist = conf.d, g.distances
    return all(d[p] == dist[p] == d[conf.par[p]] + 1 for p in g.processes if dist[p] <= i)


def _correct_d(g: Graph, conf: Configuration, i: int) -> bool:
    d, dist = conf.d, g.distances
    return all(d[p] == dist[p] for p in g.processes if dist[p] <= i)


def _sub_d(g: Graph, conf: Configuration, i: int) -> bool:
    d, dist = conf.d, g.distances
    return all(d[p] > i for p in g.processes if dist[p] > i)


def _ub_d(g: Graph, conf: Configuration, i: int) -> bool:
    d, dist = conf.d, g.distances
    for p in g.processes:
        if dist[p] <= i or d[p] > i:
            continue
        if d[p] != i or not any(d[q] <= i + 1 for q in g.neighbors(p)):
            return False
    return True


def att_index(g: Graph, conf: Configuration) -> int:
    """
    Largest i such that every process within distance i holds its final d and parent.
    """
    return _largest(lambda i: _correct_node(g, conf, i), g.diameter)


def att_b_index(g: Graph, conf: Configuration) -> int:
    return _largest(lambda i: _correct_node(g, conf, i) and _sub_d(g, conf, i), g.diameter)


def att_hc_index(g: Graph, conf: Configuration) -> int:
    return _largest(lambda i: _correct_d(g, conf, i) and _ub_d(g, conf, i), g.diameter)


def partition_by_distance_value(conf: Configuration) -> Dict[int, FrozenSet[int]]:
    parts = defaultdict(set)
    for p, d in enumerate(conf.d):
        parts[d].add(p)
    return {d: frozenset(ps) for d, ps in sorted(parts.items())}


@dataclass(frozen=True)
class AttractorRow:
    round: int
    step: int
    att: int
    att_b: int
    att_hc: int


@dataclass(frozen=True)
class AttractorReport:
    rows: Tuple[AttractorRow, ...]

    def column(self, name: str) -> Tuple[int, ...]:
        return tuple(getattr(row, name) for row in self.rows)


def attractor_report(trace) -> AttractorReport:
    """
    Attractor indexes of the initial configuration and after every closed round of a delta trace.
    """
    g = trace.graph
    rows = []
    for r, step in enumerate([0] + list(trace.round_boundaries)):
        conf = trace.configuration_at(step)
        rows.append(AttractorRow(r, step, att_index(g, conf), att_b_index(g, conf), att_hc_index(g, conf)))
    return AttractorReport(tuple(rows))


CONF_CLASSES = ('a', 'b', 'c', 'four')


def in_conf_class(g: Graph, conf: Configuration, cls: str, i: int, x: int, z: int) -> bool:
    """
    Membership of `conf` in the class Conf_<cls>_i(x, z) of the G_k family: the
    g/h fixtures hold z-1, e.j holds z exactly when it points to g.j, f.j holds z
    exactly when it points to h.j, and the class fixes the d of e and f nodes.
    """
    if cls not in CONF_CLASSES or i < 1 or (cls == 'a' and i == 1):
        raise UsageError('no configuration class %r at level %d' % (cls, i))
    try:
        g.node('e.%d' % i)
    except TopologyError as e:
        raise UsageError('graph has no level %d' % i) from e
    return _fixtures(g, conf, i, z) and _assignments(g, conf, cls, i, x, z)


def _fixtures(g: Graph, conf: Configuration, i: int, z: int) -> bool:
    at, d, par = g.node, conf.d, conf.par
    fixtures = ['h.0'] + ['%s.%d' % (name, j) for j in range(1, i + 1) for name in ('g', 'h')]
    if any(d[at(label)] != z - 1 for label in fixtures):
        return False
    for j in range(1, i + 1):
        e = at('e.%d' % j)
        if (d[e] == z) != (par[e] == at('g.%d' % j)):
            return False
    for j in range(0, i + 1):
        f = at('f.%d' % j)
        if (d[f] == z) != (par[f] == at('h.%d' % j)):
            return False
    return True


def _assignments(g: Graph, conf: Configuration, cls: str, i: int, x: int, z: int) -> bool:
    at, d = g.node, conf.d
    e, f = d[at('e.%d' % i)], d[at('f.%d' % i)]
    if i == 1:
        f0 = d[at('f.0')]
        if cls == 'b':
            return e == z and f == z and f0 == x
        if cls == 'c':
            return e == x and f == z and f0 == z
        return e == z and f0 == z and f == x
    if cls == 'a':
        return _assignments(g, conf, 'c', i - 1, x, z) and e == x and f == z
    if cls == 'b':
        return _assignments(g, conf, 'four', i - 1, x, z) and e == z and f == z
    if cls == 'c':
        return _assignments(g, conf, 'c', i - 1, z, z) and e == x and f == z
    return _assignments(g, conf, 'c', i - 1, z, z) and e == z and f == x
