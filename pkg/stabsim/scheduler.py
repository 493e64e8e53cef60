"""
Daemon strategies. Every strategy refines the distributed unfair daemon: at each
step it picks a nonempty set of enabled processes and one enabled rule for each.
"""
from __future__ import annotations

import logging
import random
from collections.abc import Sequence as SequenceABC
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .algorithms import AlgorithmSpec, Configuration, PriorityPolicy, RuleId
from .error import ScheduleExhausted, ScheduleViolation, UsageError
from .topology import Graph

logger = logging.getLogger(__name__)

EnabledMap = Dict[int, FrozenSet[RuleId]]

_CANONICAL = {rule: i for i, rule in enumerate(RuleId)}


@dataclass(frozen=True)
class Move:
    """
    One process executing one rule. A scripted move may leave `rule` unset,
    the strategy's rule preference then decides.
    """
    process: int
    rule: Optional[RuleId] = None

    def to_json(self, g: Optional[Graph] = None) -> dict:
        p = self.process if g is None or g.labels[self.process] is None else g.labels[self.process]
        data = {"p": p}
        if self.rule is not None:
            data["rule"] = self.rule.value
        return data

    def __str__(self) -> str:
        return '(%d, %s)' % (self.process, self.rule.value if self.rule else '*')


def pick_rule(rules: FrozenSet[RuleId], pref: PriorityPolicy, rng: Optional[random.Random] = None) -> RuleId:
    if len(rules) == 1:
        return next(iter(rules))
    if pref is PriorityPolicy.HC1_FIRST and RuleId.HC1 in rules:
        return RuleId.HC1
    if pref is PriorityPolicy.HC2_FIRST and RuleId.HC2 in rules:
        return RuleId.HC2
    ordered = sorted(rules, key=_CANONICAL.__getitem__)
    if pref is PriorityPolicy.DAEMON_DECIDES and rng is not None:
        return rng.choice(ordered)
    return ordered[0]


class DaemonStrategy:
    """
    Base class. `choose` must be a function of its arguments and the strategy's
    own parameters only, so runs are reproducible.
    """
    name = 'daemon'
    default_pref = PriorityPolicy.HC2_FIRST

    def __init__(self, rule_pref: Optional[PriorityPolicy] = None) -> None:
        self.rule_pref = None if rule_pref is None else PriorityPolicy(rule_pref)

    def preference(self, spec: AlgorithmSpec) -> PriorityPolicy:
        if self.rule_pref is not None:
            return self.rule_pref
        if spec.priority_policy is not PriorityPolicy.DAEMON_DECIDES:
            return spec.priority_policy
        return self.default_pref

    def choose(self, spec: AlgorithmSpec, g: Graph, conf: Configuration,
               enabled: EnabledMap, step: int) -> Tuple[Move, ...]:
        raise NotImplementedError

    def describe(self) -> str:
        return self.name


class Synchronous(DaemonStrategy):
    """
    Every enabled process executes at every step.
    """
    name = 'sync'

    def choose(self, spec, g, conf, enabled, step):
        pref = self.preference(spec)
        return tuple(Move(p, pick_rule(enabled[p], pref)) for p in sorted(enabled))


class _Seeded(DaemonStrategy):
    def __init__(self, seed: int = 0, rule_pref: Optional[PriorityPolicy] = None) -> None:
        super().__init__(rule_pref)
        self.seed = int(seed)

    def _rng(self, step: int) -> random.Random:
        return random.Random(self.seed * 1000003 + step)

    def describe(self) -> str:
        return '%s(seed=%d)' % (self.name, self.seed)


class CentralRandom(_Seeded):
    name = 'central'

    def choose(self, spec, g, conf, enabled, step):
        rng = self._rng(step)
        p = rng.choice(sorted(enabled))
        return (Move(p, pick_rule(enabled[p], self.preference(spec), rng)),)


class DistributedRandom(_Seeded):
    """
    Each enabled process is activated with `activation_prob`; an empty draw
    falls back to one random enabled process.
    """
    name = 'distributed'

    def __init__(self, seed: int = 0, activation_prob: float = 0.5,
                 rule_pref: Optional[PriorityPolicy] = None) -> None:
        super().__init__(seed, rule_pref)
        if not 0.0 < activation_prob <= 1.0:
            raise UsageError('activation probability must lie in (0, 1], got %r' % activation_prob)
        self.activation_prob = activation_prob

    def choose(self, spec, g, conf, enabled, step):
        rng = self._rng(step)
        candidates = sorted(enabled)
        chosen = [p for p in candidates if rng.random() < self.activation_prob]
        if not chosen:
            chosen = [rng.choice(candidates)]
        pref = self.preference(spec)
        return tuple(Move(p, pick_rule(enabled[p], pref, rng)) for p in chosen)

    def describe(self) -> str:
        return '%s(seed=%d, p=%g)' % (self.name, self.seed, self.activation_prob)


class Scripted(DaemonStrategy):
    """
    Replays a schedule verbatim, rejecting any move that is not enabled. Once the
    schedule is used up, the optional `tail` strategy takes over.
    """
    name = 'scripted'

    def __init__(self, schedule: Sequence[Sequence[Move]], tail: Optional[DaemonStrategy] = None,
                 rule_pref: Optional[PriorityPolicy] = None) -> None:
        super().__init__(rule_pref)
        self.schedule = schedule
        self.tail = tail

    def choose(self, spec, g, conf, enabled, step):
        if step >= len(self.schedule):
            if self.tail is None:
                raise ScheduleExhausted(step)
            return self.tail.choose(spec, g, conf, enabled, step - len(self.schedule))
        moves = self.schedule[step]
        if not moves:
            raise ScheduleViolation(step, None, 'empty move-set')
        pref = self.preference(spec)
        chosen = []
        seen = set()
        for move in moves:
            p = move.process
            if p in seen:
                raise ScheduleViolation(step, move, 'two moves for one process')
            seen.add(p)
            rules = enabled.get(p)
            if rules is None:
                raise ScheduleViolation(step, move, 'process %s is not enabled' % g.label(p))
            if move.rule is None:
                move = Move(p, pick_rule(rules, pref))
            elif move.rule not in rules:
                raise ScheduleViolation(step, move, 'rule %s is not enabled at %s' % (move.rule.value, g.label(p)))
            chosen.append(move)
        return tuple(chosen)

    def describe(self) -> str:
        tail = '' if self.tail is None else ', tail=%s' % self.tail.describe()
        return '%s(%d steps%s)' % (self.name, len(self.schedule), tail)


class Priority(DaemonStrategy):
    """
    Lets `base` choose the processes, then imposes `rule_pref` on every rule choice.
    """
    name = 'priority'

    def __init__(self, base: DaemonStrategy, rule_pref: PriorityPolicy) -> None:
        super().__init__(rule_pref)
        self.base = base

    def choose(self, spec, g, conf, enabled, step):
        moves = self.base.choose(spec, g, conf, enabled, step)
        return tuple(Move(m.process, pick_rule(enabled[m.process], self.rule_pref)) for m in moves)

    def describe(self) -> str:
        return '%s(%s, %s)' % (self.name, self.base.describe(), self.rule_pref.value)


class CyclicSchedule(SequenceABC):
    """
    Lazy schedule repeating `pattern` until `length` steps, for very long scripts.
    """

    def __init__(self, pattern: Sequence[Sequence[Move]], length: int) -> None:
        if not pattern:
            raise UsageError('a cyclic schedule needs a nonempty pattern')
        self._pattern = tuple(tuple(moves) for moves in pattern)
        self._length = length

    @property
    def pattern(self) -> Tuple[Tuple[Move, ...], ...]:
        return self._pattern

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self._length))]
        if i < 0:
            i += self._length
        if not 0 <= i < self._length:
            raise IndexError(i)
        return self._pattern[i % len(self._pattern)]


def load_schedule(data: Iterable, g: Graph) -> List[Tuple[Move, ...]]:
    """
    Schedule from its JSON form: a list of steps, each a list of {"p", "rule"} objects.
    """
    schedule = []
    for i, step in enumerate(data):
        moves = []
        for entry in step:
            try:
                rule = entry.get("rule")
                moves.append(Move(g.node(entry["p"]), None if rule is None else RuleId(rule)))
            except (KeyError, ValueError, AttributeError) as e:
                raise UsageError('step %d: malformed move %r (%s)' % (i, entry, e)) from e
        schedule.append(tuple(moves))
    logger.debug('loaded a schedule of %d steps', len(schedule))
    return schedule


def dump_schedule(schedule: Sequence[Sequence[Move]], g: Optional[Graph] = None) -> list:
    return [[move.to_json(g) for move in moves] for moves in schedule]
