"""
Execution loop with exact step and round accounting.

A step applies every chosen move against the pre-step configuration. Rounds are
tracked as in the model: the processes enabled when a round starts must each
execute or be neutralized (become disabled without executing) before it closes.
"""
from __future__ import annotations

import bisect
import logging
from array import array
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple

from .algorithms import (AlgorithmSpec, Configuration, RuleId, action, check_configuration,
                         enabled_map, enabled_rules, is_terminal)
from .error import RuleNotEnabled, ScheduleExhausted, ScheduleViolation, UsageError
from .scheduler import DaemonStrategy, Move
from .topology import Graph
from .utils import load_settings

logger = logging.getLogger(__name__)

_RULES = list(RuleId)
_RULE_CODE = {rule: i for i, rule in enumerate(_RULES)}

StepObserver = Callable[[int, Tuple[Move, ...], Configuration, bool], None]


class Outcome(Enum):
    TERMINAL = 'terminal'
    STEP_BUDGET_EXCEEDED = 'budget'
    SCHEDULE_VIOLATION = 'violation'
    SCHEDULE_EXHAUSTED = 'exhausted'


class RoundTracker:
    """
    Processes enabled at the start of the current round that have neither
    executed nor been neutralized yet.
    """

    def __init__(self) -> None:
        self.pending: Set[int] = set()

    def begin(self, enabled: Iterable[int]) -> None:
        self.pending = set(enabled)

    def observe(self, executed: Iterable[int], enabled_after) -> bool:
        """
        Account for one step; returns True when the round closes with it.
        """
        self.pending.difference_update(executed)
        self.pending = {p for p in self.pending if p in enabled_after}
        return not self.pending


class ExecutionTrace:
    """
    Record of one execution. In `delta` mode the moves and the resulting states of
    the moving processes are stored compactly for every step, with a full
    configuration snapshot every `snapshot_interval` steps; `summary` keeps counters only.
    """

    def __init__(self, spec: AlgorithmSpec, graph: Graph, initial: Configuration,
                 record: str = 'delta', snapshot_interval: Optional[int] = None) -> None:
        if record not in ('delta', 'summary'):
            raise UsageError('unknown record mode %r' % record)
        self.spec = spec
        self.graph = graph
        self.initial = initial
        self.record = record
        self.snapshot_interval = snapshot_interval or load_settings()["snapshot_interval"]
        self.final = initial
        self.step_count = 0
        self.round_count = 0
        self.round_boundaries: List[int] = []
        self.outcome: Optional[Outcome] = None
        self.error: Optional[Exception] = None
        self._moves = array('q')
        self._move_offsets = array('q', [0])
        self._deltas = array('q')
        self._delta_offsets = array('q', [0])
        self._snapshots: Dict[int, Configuration] = {0: initial}

    def _record(self, moves: Tuple[Move, ...], updates: Dict[int, Tuple[int, Optional[int]]],
                conf: Configuration) -> None:
        self.step_count += 1
        self.final = conf
        if self.record == 'summary':
            return
        for move in moves:
            self._moves.append(move.process * 16 + _RULE_CODE[move.rule])
        self._move_offsets.append(len(self._moves))
        for p, (d, par) in updates.items():
            self._deltas.extend((p, d, -1 if par is None else par))
        self._delta_offsets.append(len(self._deltas))
        if self.step_count % self.snapshot_interval == 0:
            self._snapshots[self.step_count] = conf

    def _require_steps(self) -> None:
        if self.record != 'delta':
            raise UsageError('per-step data is only kept in delta traces')

    def moves_at(self, i: int) -> Tuple[Move, ...]:
        self._require_steps()
        codes = self._moves[self._move_offsets[i]:self._move_offsets[i + 1]]
        return tuple(Move(code // 16, _RULES[code % 16]) for code in codes)

    @property
    def moves(self) -> List[Tuple[Move, ...]]:
        return [self.moves_at(i) for i in range(self.step_count)]

    def delta_at(self, i: int) -> Dict[int, Tuple[int, Optional[int]]]:
        """
        States written by step `i` (0-based), keyed by moving process.
        """
        self._require_steps()
        flat = self._deltas[self._delta_offsets[i]:self._delta_offsets[i + 1]]
        return {flat[j]: (flat[j + 1], None if flat[j + 2] < 0 else flat[j + 2])
                for j in range(0, len(flat), 3)}

    def configuration_at(self, i: int) -> Configuration:
        """
        Configuration reached after `i` steps.
        """
        if i == self.step_count:
            return self.final
        self._require_steps()
        if not 0 <= i <= self.step_count:
            raise IndexError(i)
        start = i - i % self.snapshot_interval
        conf = self._snapshots[start]
        for j in range(start, i):
            conf = conf.replace(self.delta_at(j))
        return conf

    def configurations(self) -> Iterator[Configuration]:
        self._require_steps()
        conf = self.initial
        yield conf
        for i in range(self.step_count):
            conf = conf.replace(self.delta_at(i))
            yield conf

    def round_of(self, i: int) -> int:
        """
        1-based round containing step `i` (0-based)
        """
        return 1 + bisect.bisect_right(self.round_boundaries, i)

    def edited(self, i: int, moves: Iterable[Move]) -> 'ExecutionTrace':
        """
        Copy of this trace whose step `i` claims other moves, the recorded states kept.
        """
        self._require_steps()
        copy = ExecutionTrace(self.spec, self.graph, self.initial, self.record, self.snapshot_interval)
        copy.__dict__.update({k: v for k, v in self.__dict__.items() if not k.startswith('_moves')})
        head = self._moves[:self._move_offsets[i]]
        tail = self._moves[self._move_offsets[i + 1]:]
        middle = array('q', [m.process * 16 + _RULE_CODE[m.rule] for m in moves])
        copy._moves = head + middle + tail
        shift = len(middle) - (self._move_offsets[i + 1] - self._move_offsets[i])
        copy._move_offsets = array('q', list(self._move_offsets[:i + 1]) +
                                   [o + shift for o in self._move_offsets[i + 1:]])
        return copy

    def summary(self) -> dict:
        return {"variant": self.spec.variant.value, "D": self.spec.D, "steps": self.step_count,
                "rounds": self.round_count, "outcome": self.outcome.value if self.outcome else None}


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    step: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def default_budget(spec: AlgorithmSpec, g: Graph) -> int:
    """
    One less than the number of configurations of a bounded variant: an execution
    that never repeats a configuration cannot take more steps. Refused above the
    configured cap.
    """
    if not spec.bounded:
        raise UsageError('U has no step bound: an explicit step budget is required')
    from .explorer import state_space_size
    budget = state_space_size(spec, g) - 1
    cap = load_settings()["budget_cap"]
    if budget >= cap:
        raise UsageError('state space of %d configurations exceeds %d: an explicit step budget is required'
                         % (budget + 1, cap))
    return budget


def step(spec: AlgorithmSpec, g: Graph, conf: Configuration, moves: Iterable[Move],
         check: bool = True) -> Configuration:
    """
    Apply all moves simultaneously: every action reads `conf`, the pre-step configuration.
    """
    updates = {}
    for move in moves:
        p = move.process
        if p in updates:
            raise UsageError('two moves for process %d in one step' % p)
        if check:
            enabled = enabled_rules(spec, g, conf, p)
            if move.rule not in enabled:
                raise RuleNotEnabled(p, move.rule, sorted(enabled, key=_RULE_CODE.__getitem__))
        updates[p] = action(spec, g, conf, p, move.rule)
    return conf.replace(updates)


def run(spec: AlgorithmSpec, g: Graph, init: Configuration, strategy: DaemonStrategy,
        step_budget: Optional[int] = None, record: str = 'delta',
        on_step: Optional[StepObserver] = None) -> ExecutionTrace:
    """
    Execute until a terminal configuration, the step budget, or a schedule failure.
    """
    check_configuration(spec, g, init)
    budget = default_budget(spec, g) if step_budget is None else step_budget
    trace = ExecutionTrace(spec, g, init, record)
    logger.debug('running %s on %r under %s, budget %d', spec.name, g, strategy.describe(), budget)

    conf = init
    enabled = enabled_map(spec, g, conf)
    tracker = RoundTracker()
    tracker.begin(enabled)
    outcome = Outcome.TERMINAL
    while enabled:
        if trace.step_count >= budget:
            outcome = Outcome.STEP_BUDGET_EXCEEDED
            break
        try:
            moves = strategy.choose(spec, g, conf, enabled, trace.step_count)
        except ScheduleViolation as e:
            outcome, trace.error = Outcome.SCHEDULE_VIOLATION, e
            break
        except ScheduleExhausted as e:
            outcome, trace.error = Outcome.SCHEDULE_EXHAUSTED, e
            break
        if not moves:
            raise AssertionError('strategy %s chose no move at step %d' % (strategy.describe(), trace.step_count))
        updates = {}
        for move in moves:
            p = move.process
            if p in updates or move.rule not in enabled.get(p, ()):
                raise RuleNotEnabled(p, move.rule, enabled.get(p, ()))
            updates[p] = action(spec, g, conf, p, move.rule)
        following = conf.replace(updates)

        # only the closed neighborhoods of changed processes can change enabledness
        affected = set()
        for p, (d, par) in updates.items():
            if conf.d[p] != d:
                affected.add(p)
                affected.update(g.neighbors(p))
            elif conf.par[p] != par:
                affected.add(p)
        affected.discard(0)
        conf = following
        for p in affected:
            rules = enabled_rules(spec, g, conf, p)
            if rules:
                enabled[p] = rules
            else:
                enabled.pop(p, None)

        closed = tracker.observe(updates, enabled)
        trace._record(moves, updates, conf)
        if closed:
            trace.round_count += 1
            trace.round_boundaries.append(trace.step_count)
            tracker.begin(enabled)
        if on_step is not None:
            on_step(trace.step_count, moves, conf, closed)

    trace.final = conf
    trace.outcome = outcome
    logger.debug('%s after %d steps and %d rounds', outcome.value, trace.step_count, trace.round_count)
    return trace


def replay(trace: ExecutionTrace, spec: Optional[AlgorithmSpec] = None,
           g: Optional[Graph] = None) -> ReplayResult:
    """
    Re-execute the recorded moves from the initial configuration and compare every
    written state, the snapshots, the round count and the outcome.
    """
    spec = trace.spec if spec is None else spec
    g = trace.graph if g is None else g
    if trace.record != 'delta':
        raise UsageError('only delta traces can be replayed')
    conf = trace.initial
    tracker = RoundTracker()
    enabled = enabled_map(spec, g, conf)
    tracker.begin(enabled)
    rounds = 0
    for i in range(trace.step_count):
        moves = trace.moves_at(i)
        try:
            following = step(spec, g, conf, moves)
        except (RuleNotEnabled, UsageError) as e:
            return ReplayResult(False, i, str(e))
        recorded = trace.delta_at(i)
        if set(recorded) != {m.process for m in moves}:
            return ReplayResult(False, i, 'moves do not match the recorded writers')
        for p, state in recorded.items():
            if (following.d[p], following.par[p]) != state:
                return ReplayResult(False, i, 'state of %s differs' % g.label(p))
        conf = following
        snapshot = trace._snapshots.get(i + 1)
        if snapshot is not None and snapshot != conf:
            return ReplayResult(False, i, 'snapshot differs')
        enabled = enabled_map(spec, g, conf)
        if tracker.observe(recorded, enabled):
            rounds += 1
            tracker.begin(enabled)
    if conf != trace.final:
        return ReplayResult(False, trace.step_count, 'final configuration differs')
    if trace.outcome is Outcome.TERMINAL and not is_terminal(spec, g, conf):
        return ReplayResult(False, trace.step_count, 'final configuration is not terminal')
    if rounds != trace.round_count:
        return ReplayResult(False, trace.step_count, 'round count %d differs from %d' % (rounds, trace.round_count))
    return ReplayResult(True)
