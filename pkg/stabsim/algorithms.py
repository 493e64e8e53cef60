"""
## Rule systems
Guards and actions of the four silent BFS spanning-tree algorithms:

- `U`: unbounded distances (rules U1, U2)
- `B`: distances bounded by D (rules B1, B2, B3)
- `HC`: parent-driven distance rule with a bound D (rules HC1, HC2)
- `FHC`: HC with the extra guard d_par = Min_d on its first rule (rules FHC1, HC2)

Every function here is pure: it reads a `Configuration` and never mutates it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from .defaults import __mutations__
from .error import ConfigurationError, RuleNotEnabled, UsageError
from .topology import Graph


class Variant(Enum):
    U = 'U'
    B = 'B'
    HC = 'HC'
    FHC = 'FHC'


class RuleId(Enum):
    U1 = 'U1'
    U2 = 'U2'
    B1 = 'B1'
    B2 = 'B2'
    B3 = 'B3'
    HC1 = 'HC1'
    HC2 = 'HC2'
    FHC1 = 'FHC1'


class TiePolicy(Enum):
    SMALLEST_ID = 'smallest-id'
    KEEP_CURRENT = 'keep-current'


class PriorityPolicy(Enum):
    HC1_FIRST = 'HC1-first'
    HC2_FIRST = 'HC2-first'
    DAEMON_DECIDES = 'daemon-decides'


RULES: Dict[Variant, Tuple[RuleId, ...]] = {
    Variant.U: (RuleId.U1, RuleId.U2),
    Variant.B: (RuleId.B1, RuleId.B2, RuleId.B3),
    Variant.HC: (RuleId.HC1, RuleId.HC2),
    Variant.FHC: (RuleId.FHC1, RuleId.HC2),
}

# rules whose action is update(p)
_UPDATES = frozenset((RuleId.U1, RuleId.B1, RuleId.HC2))
_NONE: FrozenSet[RuleId] = frozenset()


@dataclass(frozen=True)
class ProcessState:
    d: int
    par: Optional[int] = None


@dataclass(frozen=True)
class Configuration:
    """
    States of all processes. `d[0]` is the root's constant 0 and `par[0]` is None.
    """
    d: Tuple[int, ...]
    par: Tuple[Optional[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'd', tuple(self.d))
        object.__setattr__(self, 'par', tuple(self.par))
        if len(self.d) != len(self.par):
            raise ConfigurationError('d and par vectors differ in length')
        if not self.d or self.d[0] != 0 or self.par[0] is not None:
            raise ConfigurationError('the root state must be d=0 without parent')

    @classmethod
    def from_states(cls, states: Sequence[ProcessState]) -> 'Configuration':
        return cls(tuple(s.d for s in states), tuple(s.par for s in states))

    def __len__(self) -> int:
        return len(self.d)

    def state(self, p: int) -> ProcessState:
        return ProcessState(self.d[p], self.par[p])

    @property
    def states(self) -> Tuple[ProcessState, ...]:
        return tuple(ProcessState(d, par) for d, par in zip(self.d, self.par))

    def replace(self, updates: Mapping[int, Tuple[int, Optional[int]]]) -> 'Configuration':
        if not updates:
            return self
        d = list(self.d)
        par = list(self.par)
        for p, (dp, parp) in updates.items():
            d[p] = dp
            par[p] = parp
        return Configuration(tuple(d), tuple(par))

    def to_json(self) -> dict:
        return {"d": list(self.d), "par": list(self.par)}

    @classmethod
    def from_json(cls, data: Mapping) -> 'Configuration':
        try:
            return cls(tuple(int(x) for x in data["d"]),
                       tuple(None if x is None else int(x) for x in data["par"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationError('malformed configuration: %s' % e) from e


@dataclass(frozen=True)
class AlgorithmSpec:
    """
    Which rule system runs, with its bound `D`, the bestParent tie-break and the
    default rule choice for processes with several enabled rules.
    """
    variant: Variant
    D: Optional[int] = None
    tie_policy: TiePolicy = TiePolicy.SMALLEST_ID
    priority_policy: PriorityPolicy = PriorityPolicy.DAEMON_DECIDES
    mutations: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, 'variant', Variant(self.variant))
            object.__setattr__(self, 'tie_policy', TiePolicy(self.tie_policy))
            object.__setattr__(self, 'priority_policy', PriorityPolicy(self.priority_policy))
        except ValueError as e:
            raise UsageError(str(e)) from e
        object.__setattr__(self, 'mutations', frozenset(self.mutations))
        unknown = self.mutations - set(__mutations__)
        if unknown:
            raise UsageError('unknown mutation(s): %s' % ', '.join(sorted(unknown)))
        if self.variant is Variant.U:
            object.__setattr__(self, 'D', None)
        elif not isinstance(self.D, int) or self.D < 1:
            raise UsageError('%s needs a bound D >= 1, got %r' % (self.variant.value, self.D))

    @property
    def bounded(self) -> bool:
        return self.variant is not Variant.U

    @property
    def rules(self) -> Tuple[RuleId, ...]:
        dropped = {RuleId(m[len('drop-'):]) for m in self.mutations if m.startswith('drop-')}
        return tuple(r for r in RULES[self.variant] if r not in dropped)

    @property
    def name(self) -> str:
        name = self.variant.value if self.variant is Variant.U else '%s(%d)' % (self.variant.value, self.D)
        if self.mutations:
            name += '[%s]' % ','.join(sorted(self.mutations))
        return name

    def with_variant(self, variant: Variant) -> 'AlgorithmSpec':
        return AlgorithmSpec(variant, self.D, self.tie_policy, self.priority_policy, self.mutations)

    def to_json(self) -> dict:
        return {"variant": self.variant.value, "D": self.D, "tie_policy": self.tie_policy.value,
                "priority_policy": self.priority_policy.value, "mutations": sorted(self.mutations)}

    @classmethod
    def from_json(cls, data: Mapping) -> 'AlgorithmSpec':
        return cls(data["variant"], data.get("D"),
                   data.get("tie_policy", TiePolicy.SMALLEST_ID.value),
                   data.get("priority_policy", PriorityPolicy.DAEMON_DECIDES.value),
                   frozenset(data.get("mutations", ())))


def min_d(g: Graph, conf: Configuration, p: int) -> int:
    d = conf.d
    return min(d[q] for q in g.neighbors(p))


def best_parent(g: Graph, conf: Configuration, p: int, tie_policy: TiePolicy = TiePolicy.SMALLEST_ID) -> int:
    """
    A neighbor with the smallest d. Ties go to the smallest id, or to the
    current parent under the keep-current policy when it is among them.
    """
    d = conf.d
    m = min(d[q] for q in g.neighbors(p))
    if tie_policy is TiePolicy.KEEP_CURRENT:
        current = conf.par[p]
        if current is not None and d[current] == m:
            return current
    for q in g.neighbors(p):
        if d[q] == m:
            return q
    raise AssertionError('unreachable: a minimum always has a witness')


def d_ok(g: Graph, conf: Configuration, p: int) -> bool:
    return conf.d[p] == min_d(g, conf, p) + 1


def par_ok(conf: Configuration, p: int) -> bool:
    return conf.d[p] == conf.d[conf.par[p]] + 1


def enabled_rules(spec: AlgorithmSpec, g: Graph, conf: Configuration, p: int) -> FrozenSet[RuleId]:
    if p == 0:
        return _NONE
    d = conf.d
    dp = d[p]
    m = min(d[q] for q in g.neighbors(p))
    dpar = d[conf.par[p]]
    variant = spec.variant
    mutations = spec.mutations
    if variant is Variant.U:
        if dp != m + 1:
            return frozenset((RuleId.U1,))
        if dp != dpar + 1 and 'drop-U2' not in mutations:
            return frozenset((RuleId.U2,))
        return _NONE
    D = spec.D
    if variant is Variant.B:
        if m < D:
            if dp != m + 1:
                return frozenset((RuleId.B1,))
            if dp != dpar + 1 and 'drop-B2' not in mutations:
                return frozenset((RuleId.B2,))
            return _NONE
        if 'drop-B3' in mutations:
            return _NONE
        if dp != D or 'weaken-B3' in mutations:
            return frozenset((RuleId.B3,))
        return _NONE
    if variant is Variant.HC:
        rules = []
        if dp != dpar + 1 and dpar < D:
            rules.append(RuleId.HC1)
        if dpar > m:
            rules.append(RuleId.HC2)
        return frozenset(rules)
    # FHC: the two guards are disjoint
    if dp != dpar + 1 and dpar < D and dpar == m:
        return frozenset((RuleId.FHC1,))
    if dpar > m:
        return frozenset((RuleId.HC2,))
    return _NONE


def action(spec: AlgorithmSpec, g: Graph, conf: Configuration, p: int, rule: RuleId) -> Tuple[int, Optional[int]]:
    """
    New state of `p` after executing `rule` against `conf`, without checking the guard.
    """
    if rule in _UPDATES:
        return min_d(g, conf, p) + 1, best_parent(g, conf, p, spec.tie_policy)
    if rule is RuleId.U2 or rule is RuleId.B2:
        return conf.d[p], best_parent(g, conf, p, spec.tie_policy)
    if rule is RuleId.B3:
        return spec.D, conf.par[p]
    if rule is RuleId.HC1 or rule is RuleId.FHC1:
        return conf.d[conf.par[p]] + 1, conf.par[p]
    raise UsageError('unknown rule %r' % rule)


def apply_rule(spec: AlgorithmSpec, g: Graph, conf: Configuration, p: int, rule: RuleId) -> Configuration:
    enabled = enabled_rules(spec, g, conf, p)
    if rule not in enabled:
        raise RuleNotEnabled(p, rule, sorted(enabled, key=lambda r: r.value))
    return conf.replace({p: action(spec, g, conf, p, rule)})


def enabled_map(spec: AlgorithmSpec, g: Graph, conf: Configuration,
                processes: Optional[Iterable[int]] = None) -> Dict[int, FrozenSet[RuleId]]:
    """
    Enabled rules of every enabled process (all non-root processes, or only `processes`).
    """
    result = {}
    for p in (g.processes if processes is None else processes):
        rules = enabled_rules(spec, g, conf, p)
        if rules:
            result[p] = rules
    return result


def is_terminal(spec: AlgorithmSpec, g: Graph, conf: Configuration) -> bool:
    return not any(enabled_rules(spec, g, conf, p) for p in g.processes)


def check_configuration(spec: AlgorithmSpec, g: Graph, conf: Configuration) -> None:
    """
    Raise `ConfigurationError` unless `conf` fits the graph and the d-domain of `spec`.
    """
    if len(conf) != g.node_count:
        raise ConfigurationError('configuration has %d states for %d nodes' % (len(conf), g.node_count))
    for p in g.processes:
        if conf.par[p] not in g.neighbors(p):
            raise ConfigurationError('par of %s is %r, not a neighbor' % (g.label(p), conf.par[p]))
        if conf.d[p] < 1 or (spec.bounded and conf.d[p] > spec.D):
            raise ConfigurationError('d of %s is %d, outside the domain of %s' % (g.label(p), conf.d[p], spec.name))


def random_configuration(spec: AlgorithmSpec, g: Graph, seed: int, d_cap_for_U: Optional[int] = None) -> Configuration:
    """
    Uniform d in [1..D] (or [1..d_cap_for_U] under U) and uniform parent, per seed.
    """
    if spec.bounded:
        cap = spec.D
    else:
        if d_cap_for_U is None or d_cap_for_U < 1:
            raise UsageError('a d cap >= 1 is required for random configurations of U')
        cap = d_cap_for_U
    rng = random.Random(seed)
    d = [0]
    par = [None]
    for p in g.processes:
        d.append(rng.randint(1, cap))
        par.append(rng.choice(g.neighbors(p)))
    return Configuration(tuple(d), tuple(par))
