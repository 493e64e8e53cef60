"""
Exhaustive exploration of the bounded variants on small graphs.

The transition graph has one node per configuration and an arc for every
possible step: any nonempty subset of enabled processes, each executing any one
of its enabled rules.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import reduce
from operator import mul
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

import networkx as nx

from .algorithms import AlgorithmSpec, Configuration, enabled_map
from .engine import step
from .error import CapExceeded, StabsimError, UsageError
from .scheduler import EnabledMap, Move
from .topology import Graph
from .utils import load_settings
from .verifier import is_legitimate

logger = logging.getLogger(__name__)


def state_space_size(spec: AlgorithmSpec, g: Graph) -> int:
    if not spec.bounded:
        raise UsageError('U has an infinite state space')
    return reduce(mul, (spec.D * g.degree(p) for p in g.processes), 1)


def state_space_bound(spec: AlgorithmSpec, g: Graph) -> int:
    """
    The general step bound: product of the local state space sizes, minus 2.
    """
    bound = state_space_size(spec, g) - 2
    if bound < 0:
        logger.info('degenerate instance %r under %s: step bound clamped to 0', g, spec.name)
        return 0
    return bound


def enumerate_configurations(spec: AlgorithmSpec, g: Graph, cap: Optional[int] = None) -> List[Configuration]:
    size = state_space_size(spec, g)
    cap = load_settings()["explore_cap"] if cap is None else cap
    if size > cap:
        raise CapExceeded(size, cap)
    local = [[(d, q) for d in range(1, spec.D + 1) for q in g.neighbors(p)] for p in g.processes]
    configurations = []
    for states in itertools.product(*local):
        configurations.append(Configuration((0,) + tuple(s[0] for s in states),
                                            (None,) + tuple(s[1] for s in states)))
    return configurations


def daemon_choices(enabled: EnabledMap) -> Iterator[Tuple[Move, ...]]:
    """
    Every move-set a distributed daemon may select from `enabled`.
    """
    processes = sorted(enabled)
    for size in range(1, len(processes) + 1):
        for subset in itertools.combinations(processes, size):
            options = [sorted(enabled[p], key=lambda r: r.value) for p in subset]
            for rules in itertools.product(*options):
                yield tuple(Move(p, rule) for p, rule in zip(subset, rules))


@dataclass
class TransitionGraph:
    spec: AlgorithmSpec
    graph: Graph
    configurations: List[Configuration]
    index: Dict[Configuration, int]
    successors: List[FrozenSet[int]]

    def sinks(self) -> List[int]:
        return [i for i, succ in enumerate(self.successors) if not succ]

    def digraph(self) -> nx.DiGraph:
        dg = nx.DiGraph()
        dg.add_nodes_from(range(len(self.configurations)))
        dg.add_edges_from((i, j) for i, succ in enumerate(self.successors) for j in succ)
        return dg


def build_transition_graph(spec: AlgorithmSpec, g: Graph, cap: Optional[int] = None) -> TransitionGraph:
    configurations = enumerate_configurations(spec, g, cap)
    index = {conf: i for i, conf in enumerate(configurations)}
    successors = []
    for conf in configurations:
        enabled = enabled_map(spec, g, conf)
        succ = set()
        for moves in daemon_choices(enabled):
            following = step(spec, g, conf, moves, check=False)
            try:
                succ.add(index[following])
            except KeyError:
                raise StabsimError('step %s leaves the domain of %s' % (
                    ', '.join(map(str, moves)), spec.name)) from None
        successors.append(frozenset(succ))
    return TransitionGraph(spec, g, configurations, index, successors)


@dataclass(frozen=True)
class TerminationReport:
    acyclic: bool
    cycle: Tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.acyclic


def check_termination(tg: TransitionGraph) -> TerminationReport:
    """
    Every execution is finite iff the (finite) transition graph has no cycle;
    otherwise a cycle of configuration indexes is returned as witness.
    """
    try:
        arcs = nx.find_cycle(tg.digraph())
    except nx.NetworkXNoCycle:
        return TerminationReport(True)
    return TerminationReport(False, tuple(u for u, _ in arcs))


@dataclass(frozen=True)
class SinkReport:
    illegitimate_sinks: Tuple[int, ...]
    nonterminal_legitimate: Tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.illegitimate_sinks and not self.nonterminal_legitimate

    def __bool__(self) -> bool:
        return self.ok


def check_sinks(tg: TransitionGraph, g: Optional[Graph] = None) -> SinkReport:
    g = tg.graph if g is None else g
    bad_sinks, bad_legit = [], []
    for i, conf in enumerate(tg.configurations):
        sink = not tg.successors[i]
        legit = is_legitimate(g, conf)
        if sink and not legit:
            bad_sinks.append(i)
        elif legit and not sink:
            bad_legit.append(i)
    return SinkReport(tuple(bad_sinks), tuple(bad_legit))


def longest_path(tg: TransitionGraph) -> int:
    """
    Longest execution, in steps. Only defined on acyclic transition graphs.
    """
    return nx.dag_longest_path_length(tg.digraph())


@dataclass(frozen=True)
class ExplorationReport:
    spec: AlgorithmSpec
    graph: Graph
    config_count: int
    sink_count: int
    legitimate_count: int
    acyclic: bool
    sinks_ok: bool
    longest_path: Optional[int]
    bound: int
    cycle: Tuple[Configuration, ...] = ()

    @property
    def ok(self) -> bool:
        return self.acyclic and self.sinks_ok and self.longest_path <= self.bound

    def to_json(self) -> dict:
        return {"variant": self.spec.name, "nodes": self.graph.node_count, "edges": self.graph.edges(),
                "diameter": self.graph.diameter, "config_count": self.config_count,
                "sink_count": self.sink_count, "legitimate_count": self.legitimate_count,
                "acyclic": self.acyclic, "sinks_ok": self.sinks_ok,
                "longest_path": self.longest_path, "bound": self.bound,
                "cycle": [conf.to_json() for conf in self.cycle], "ok": self.ok}


def explore(spec: AlgorithmSpec, g: Graph, cap: Optional[int] = None) -> ExplorationReport:
    tg = build_transition_graph(spec, g, cap)
    termination = check_termination(tg)
    sinks = check_sinks(tg, g)
    report = ExplorationReport(
        spec, g,
        config_count=len(tg.configurations),
        sink_count=len(tg.sinks()),
        legitimate_count=sum(1 for conf in tg.configurations if is_legitimate(g, conf)),
        acyclic=termination.acyclic,
        sinks_ok=sinks.ok,
        longest_path=longest_path(tg) if termination else None,
        bound=state_space_bound(spec, g),
        cycle=tuple(tg.configurations[i] for i in termination.cycle))
    logger.info('%s on %r: %d configurations, acyclic=%s, sinks ok=%s, longest path %s/%d',
                spec.name, g, report.config_count, report.acyclic, report.sinks_ok,
                report.longest_path, report.bound)
    return report
