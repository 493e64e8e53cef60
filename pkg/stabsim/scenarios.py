"""
## Worst-case executions
Each constructor returns a `Scenario`: graph, algorithm, initial configuration,
daemon strategy and the counts the execution is expected to reach.

- `scenario_hc_slow(k)`: HC(2k) on R-a-b, k+1 rounds and 2k steps
- `scenario_sync_u_line(diam)`, `scenario_sync_b_lollipop(diam, D)`: diam rounds
- `scenario_sync_fhc_lollipop(diam)`: diam+1 rounds
- `scenario_unbounded_line(X)`: U on a 5-node line, at least X steps
- `scenario_exponential(k)`: HC2-only execution on G_k with at least (2k+2)(2^k-1) steps

Scripted schedules are checked move by move while they are built, so a scenario
that constructs at all replays without violation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algorithms import (AlgorithmSpec, Configuration, PriorityPolicy, RuleId, Variant,
                         d_ok, enabled_rules)
from .engine import ExecutionTrace, Outcome, run, step
from .error import RuleNotEnabled, ScenarioError, UsageError
from .scheduler import (CyclicSchedule, DaemonStrategy, Move, Scripted, Synchronous,
                        dump_schedule, load_schedule)
from .topology import Graph, add_root_leaves, build_gk, build_line, build_lollipop, from_edges, parse_graph, serialize_graph
from .verifier import in_conf_class

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Expected:
    """
    Expected counts; a non-exact count is a lower bound.
    """
    rounds: Optional[int] = None
    steps: Optional[int] = None
    rounds_exact: bool = True
    steps_exact: bool = True

    def problems(self, trace: ExecutionTrace) -> List[str]:
        found = []
        if trace.outcome is not Outcome.TERMINAL:
            found.append('outcome is %s' % trace.outcome.value)
        for name, want, exact in (('rounds', self.rounds, self.rounds_exact),
                                  ('steps', self.steps, self.steps_exact)):
            got = getattr(trace, name[:-1] + '_count')
            if want is None:
                continue
            if exact and got != want:
                found.append('%s: %d, expected exactly %d' % (name, got, want))
            elif not exact and got < want:
                found.append('%s: %d, expected at least %d' % (name, got, want))
        return found

    def to_json(self) -> dict:
        return {"rounds": self.rounds, "steps": self.steps,
                "rounds_exact": self.rounds_exact, "steps_exact": self.steps_exact}

    @classmethod
    def from_json(cls, data: dict) -> 'Expected':
        return cls(data.get("rounds"), data.get("steps"),
                   data.get("rounds_exact", True), data.get("steps_exact", True))


@dataclass
class Scenario:
    name: str
    spec: AlgorithmSpec
    graph: Graph
    init: Configuration
    expected: Expected
    schedule: Optional[Sequence[Sequence[Move]]] = None
    tail: bool = False
    step_budget: Optional[int] = None
    notes: Dict[str, object] = field(default_factory=dict)

    @property
    def strategy(self) -> DaemonStrategy:
        if self.schedule is None:
            return Synchronous()
        return Scripted(self.schedule, tail=Synchronous() if self.tail else None)

    def run(self, record: str = 'delta', on_step=None) -> ExecutionTrace:
        return run(self.spec, self.graph, self.init, self.strategy, self.step_budget, record, on_step)

    def to_bundle(self) -> dict:
        if isinstance(self.schedule, CyclicSchedule):
            schedule = {"pattern": dump_schedule(self.schedule.pattern, self.graph),
                        "length": len(self.schedule)}
        elif self.schedule is not None:
            schedule = dump_schedule(self.schedule, self.graph)
        else:
            schedule = None
        return {"name": self.name, "graph": serialize_graph(self.graph), "spec": self.spec.to_json(),
                "init": self.init.to_json(), "schedule": schedule, "tail": "sync" if self.tail else None,
                "budget": self.step_budget, "expected": self.expected.to_json()}

    @classmethod
    def from_bundle(cls, data: dict) -> 'Scenario':
        try:
            g = parse_graph(data["graph"])
            schedule = data.get("schedule")
            if isinstance(schedule, dict):
                schedule = CyclicSchedule(load_schedule(schedule["pattern"], g), schedule["length"])
            elif schedule is not None:
                schedule = load_schedule(schedule, g)
            return cls(data.get("name", "bundle"), AlgorithmSpec.from_json(data["spec"]), g,
                       Configuration.from_json(data["init"]), Expected.from_json(data.get("expected", {})),
                       schedule, data.get("tail") == "sync", data.get("budget"))
        except KeyError as e:
            raise UsageError('scenario bundle misses %s' % e) from e


def _sync_budget(g: Graph) -> int:
    return 4 * (g.diameter + 2)


def scenario_hc_slow(k: int) -> Scenario:
    """
    HC(2k) on the line R-a-b where the daemon favors HC1: b and a keep raising
    each other's d up to 2k before a takes its shortcut to R.
    """
    if k < 1:
        raise UsageError('k must be at least 1, got %d' % k)
    g = from_edges(3, [(0, 1), (1, 2)], ['R', 'a', 'b'])
    a, b = 1, 2
    spec = AlgorithmSpec(Variant.HC, 2 * k, priority_policy=PriorityPolicy.HC1_FIRST)
    schedule = [(Move(b, RuleId.HC1),), (Move(a, RuleId.HC1),)] * (k - 1)
    schedule += [(Move(a, RuleId.HC2),), (Move(b, RuleId.HC1),)]

    found = None
    for da in range(1, 2 * k + 1):
        for par_a in (0, b):
            for db in range(1, 2 * k + 1):
                init = Configuration((0, da, db), (None, par_a, a))
                trace = run(spec, g, init, Scripted(schedule), step_budget=2 * k, record='summary')
                if (trace.outcome is not Outcome.TERMINAL or trace.round_count != k + 1
                        or trace.step_count != 2 * k):
                    continue
                both = enabled_rules(spec, g, init, a) == {RuleId.HC1, RuleId.HC2}
                if found is None or (both and not found[1]):
                    found = (init, both)
                if both:
                    break
            if found is not None and found[1]:
                break
        if found is not None and found[1]:
            break
    if found is None:
        raise ScenarioError('no initial configuration of R-a-b yields %d rounds' % (k + 1))
    logger.debug('hc-slow k=%d starts from %s', k, found[0])
    return Scenario('hc-slow:k=%d' % k, spec, g, found[0], Expected(k + 1, 2 * k), schedule,
                    step_budget=2 * k, notes={"both_rules_at_a": found[1]})


def scenario_sync_u_line(diam: int, X: Optional[int] = None) -> Scenario:
    """
    Synchronous U on line(diam) with every d at X > diam: p_i settles in round i.
    """
    X = diam + 1 if X is None else X
    if X <= diam:
        raise UsageError('X must exceed the diameter %d, got %d' % (diam, X))
    g = build_line(diam)
    par = [None] + [p + 1 if p < diam else p - 1 for p in range(1, diam + 1)]
    init = Configuration((0,) + (X,) * diam, tuple(par))
    return Scenario('sync-u-line:diam=%d,X=%d' % (diam, X), AlgorithmSpec(Variant.U), g, init,
                    Expected(diam, diam), step_budget=_sync_budget(g))


def scenario_sync_b_lollipop(diam: int, D: Optional[int] = None) -> Scenario:
    """
    Synchronous B(D) on lollipop(diam), all d at D and the two far ends pointing
    at each other: one process settles per round, the last two together.
    """
    D = diam if D is None else D
    if D < diam:
        raise UsageError('D must be at least the diameter %d, got %d' % (diam, D))
    g = build_lollipop(diam)
    par = [None] + [p - 1 for p in range(1, diam)] + [diam + 1, diam]
    init = Configuration((0,) + (D,) * (diam + 1), tuple(par))
    return Scenario('sync-b-lollipop:diam=%d,D=%d' % (diam, D), AlgorithmSpec(Variant.B, D), g, init,
                    Expected(diam, diam), step_budget=_sync_budget(g))


def scenario_sync_fhc_lollipop(diam: int) -> Scenario:
    """
    Synchronous FHC(diam) on lollipop(diam) needing diam+1 rounds.
    """
    g = build_lollipop(diam)
    d = [0] + [diam] * (diam + 1)
    par = [None] + [p - 1 for p in range(1, diam + 2)]
    par[diam - 1] = diam + 1
    par[diam] = diam + 1
    par[diam + 1] = diam - 1
    d[diam + 1] = diam - 1
    return Scenario('sync-fhc-lollipop:diam=%d' % diam, AlgorithmSpec(Variant.FHC, diam), g,
                    Configuration(tuple(d), tuple(par)), Expected(diam + 1, diam + 1),
                    step_budget=_sync_budget(g))


def scenario_unbounded_line(X: int) -> Scenario:
    """
    U on the 5-node line: p_2 and p_3 take turns executing U1 and count up to X+1
    while p_1 and p_4 stay enabled at X. The number of steps grows with X alone.
    """
    if X < 5:
        raise UsageError('X must be at least 5, got %d' % X)
    g = build_line(4)
    init = Configuration((0, X, 1, 1, X), (None, 0, 3, 2, 3))
    schedule = CyclicSchedule([(Move(2, RuleId.U1),), (Move(3, RuleId.U1),)], X + 1)
    return Scenario('unbounded-line:X=%d' % X, AlgorithmSpec(Variant.U), g, init,
                    Expected(steps=X + 1, steps_exact=False), schedule, tail=True,
                    step_budget=X + 1 + _sync_budget(g), notes={"prefix_steps": X + 1})


class ScheduleAccumulator:
    """
    Configuration of G_k being driven by HC2 moves, with the schedule so far.
    """

    def __init__(self, spec: AlgorithmSpec, g: Graph, conf: Configuration) -> None:
        self.spec = spec
        self.graph = g
        self.conf = conf
        self.schedule: List[Tuple[Move, ...]] = []

    def play(self, labels: Sequence[str], phase: Tuple[int, int, int]) -> None:
        moves = tuple(sorted((Move(self.graph.node(label), RuleId.HC2) for label in labels),
                             key=lambda m: m.process))
        try:
            self.conf = step(self.spec, self.graph, self.conf, moves)
        except RuleNotEnabled as e:
            raise ScenarioError(str(e), phase) from e
        self.schedule.append(moves)

    def expect(self, cls: str, i: int, x: int, z: int, phase: Tuple[int, int, int]) -> None:
        if not in_conf_class(self.graph, self.conf, cls, i, x, z):
            raise ScenarioError('configuration is not in Conf_%s_%d(%d, %d)' % (cls, i, x, z), phase)


def exec_phase(i: int, v: int, z: int, acc: ScheduleAccumulator) -> int:
    """
    Drive G_i from Conf_c_i(v, z) to Conf_c_i(z, z), appending the steps to `acc`.
    Each advance raises e.i by 2: e.i and f.{i-1} execute, then e.i, e.{i-1} and
    f.{i-1}, and for i > 1 the subgraph G_{i-1} is driven back to Conf_c(z, z).
    Returns the number of steps appended.
    """
    start = len(acc.schedule)
    acc.expect('c', i, v, z, (i, v, z))
    while v < z:
        phase = (i, v, z)
        below = 'f.%d' % (i - 1)
        acc.play(['e.%d' % i, below], phase)
        acc.expect('b', i, v + 1, z, phase)
        if v + 2 < z:
            acc.play(['e.%d' % i, below] + (['e.%d' % (i - 1)] if i > 1 else []), phase)
            if i > 1:
                acc.expect('a', i, v + 2, z, phase)
                exec_phase(i - 1, v + 2, z, acc)
        else:
            # e.i and e.{i-1} already sit at z
            acc.play([below], phase)
        v += 2
        acc.expect('c', i, v, z, phase)
    return len(acc.schedule) - start


def conf_c_configuration(g: Graph, i: int, x: int, z: int, e_parent_side: str = 'f') -> Configuration:
    """
    Member of Conf_c_i(x, z) on G_k: fixtures at z-1, every f at z, e.i at x and the
    other e nodes at z, except that e.j for j > i is left at x too when `x` is 1.
    Root leaves sit at d=1.
    """
    d = [0] * g.node_count
    par: List[Optional[int]] = [None] * g.node_count
    at = g.node
    k = sum(1 for label in g.labels if label and label.startswith('e.'))
    for p in g.processes:
        label = g.label(p)
        if label.startswith('v.'):
            d[p], par[p] = 1, 0
    d[at('h.0')], par[at('h.0')] = z - 1, 0
    for j in range(0, k + 1):
        d[at('f.%d' % j)], par[at('f.%d' % j)] = z, at('h.%d' % j)
    for j in range(1, k + 1):
        for name in ('g', 'h'):
            p = at('%s.%d' % (name, j))
            d[p], par[p] = z - 1, g.neighbors(p)[0]
        e = at('e.%d' % j)
        value = x if j == i or (j > i and x == 1) else z
        if value == z:
            d[e], par[e] = z, at('g.%d' % j)
        else:
            side = 'f.%d' % j if e_parent_side == 'f' else 'f.%d' % (j - 1)
            d[e], par[e] = value, at(side)
    return Configuration(tuple(d), tuple(par))


def measure_phase(k: int, i: int, v: int, z: Optional[int] = None) -> int:
    """
    Steps taken by `exec_phase(i, v, z)` on G_k from a member of Conf_c_i(v, z).
    """
    z = 2 * k + 3 if z is None else z
    g = build_gk(k)
    acc = ScheduleAccumulator(AlgorithmSpec(Variant.HC, z), g, conf_c_configuration(g, i, v, z))
    return exec_phase(i, v, z, acc)


def map_to_b(spec: AlgorithmSpec, g: Graph, init: Configuration,
             schedule: Sequence[Sequence[Move]]) -> List[Tuple[Move, ...]]:
    """
    Rewrite an HC2-only schedule for B(D): each HC2 becomes B1 when d is wrong, B2 otherwise.
    """
    conf = init
    mapped = []
    for i, moves in enumerate(schedule):
        b_moves = tuple(Move(m.process, RuleId.B2 if d_ok(g, conf, m.process) else RuleId.B1) for m in moves)
        try:
            conf = step(spec, g, conf, b_moves)
        except RuleNotEnabled as e:
            raise ScenarioError('step %d has no B counterpart: %s' % (i, e)) from e
        mapped.append(b_moves)
    return mapped


def general_bound_graph(k: int, y: int = 0) -> Graph:
    """
    G_k with y extra leaves on the root: n = 4k+3+y nodes.
    """
    return add_root_leaves(build_gk(k), y)


def step_lower_bound(k: int) -> int:
    return (2 * k + 2) * (2 ** k - 1)


def scenario_exponential(k: int, D: Optional[int] = None, variant: Variant = Variant.HC,
                         leaves: int = 0) -> Scenario:
    """
    Concatenation of the phases e_1(k) .. e_k(k) on G_k, every move an HC2 (or
    its B1/B2 image under B), followed by a synchronous tail to termination.
    """
    if k < 1:
        raise UsageError('k must be at least 1, got %d' % k)
    variant = Variant(variant)
    if variant is Variant.U:
        raise UsageError('the exponential schedule runs under HC, FHC or B')
    g = general_bound_graph(k, leaves)
    z = 2 * k + 3
    D = max(z, g.diameter) if D is None else D
    if D < z:
        raise UsageError('D must be at least %d, got %d' % (z, D))
    hc = AlgorithmSpec(Variant.HC, D)

    failure = None
    for side in ('f', 'f-1'):
        init = conf_c_configuration(g, 1, 1, z, side)
        acc = ScheduleAccumulator(hc, g, init)
        try:
            phases = [exec_phase(level, 1, z, acc) for level in range(1, k + 1)]
            break
        except ScenarioError as e:
            logger.debug('parent choice %s failed: %s', side, e)
            failure = e
    else:
        raise failure

    spec = hc.with_variant(variant)
    schedule = acc.schedule
    if variant is Variant.B:
        schedule = map_to_b(spec, g, init, schedule)
    logger.debug('exponential k=%d: phases %s, %d steps', k, phases, len(schedule))
    return Scenario('exponential:k=%d,D=%d,variant=%s' % (k, D, variant.value), spec, g, init,
                    Expected(steps=len(schedule), steps_exact=False), schedule, tail=True,
                    step_budget=len(schedule) + 4 * g.node_count * D,
                    notes={"phase_steps": phases, "prefix_steps": len(schedule),
                           "lower_bound": step_lower_bound(k)})


SCENARIOS: Dict[str, Callable[..., Scenario]] = {
    "hc-slow": scenario_hc_slow,
    "sync-u-line": scenario_sync_u_line,
    "sync-b-lollipop": scenario_sync_b_lollipop,
    "sync-fhc-lollipop": scenario_sync_fhc_lollipop,
    "unbounded-line": scenario_unbounded_line,
    "exponential": scenario_exponential,
}
