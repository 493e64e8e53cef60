"""Tests for daemon strategies and schedules."""
import logging

import pytest
from hypothesis import given, strategies as st

from stabsim.algorithms import AlgorithmSpec, Configuration, PriorityPolicy, RuleId, enabled_map
from stabsim.error import ScheduleExhausted, ScheduleViolation, UsageError
from stabsim.scheduler import (CentralRandom, CyclicSchedule, DistributedRandom, Move, Priority, Scripted,
                               Synchronous, dump_schedule, load_schedule, pick_rule)
from stabsim.topology import build_line, from_edges
from strategies import seeds

BOTH = frozenset((RuleId.HC1, RuleId.HC2))


@pytest.fixture
def slow_start():
    """HC(4) on R-a-b with both rules enabled at a and HC1 at b"""
    return Configuration((0, 2, 2), (None, 2, 1))


class TestPickRule:
    def test_preferences(self):
        assert pick_rule(BOTH, PriorityPolicy.HC1_FIRST) is RuleId.HC1
        assert pick_rule(BOTH, PriorityPolicy.HC2_FIRST) is RuleId.HC2

    def test_single_rule(self):
        assert pick_rule(frozenset((RuleId.B3,)), PriorityPolicy.HC1_FIRST) is RuleId.B3

    def test_daemon_decides_without_rng_is_canonical(self):
        assert pick_rule(BOTH, PriorityPolicy.DAEMON_DECIDES) is RuleId.HC1


class TestStrategies:
    def test_synchronous_moves_everyone(self, rab, hc4, slow_start):
        enabled = enabled_map(hc4, rab, slow_start)
        moves = Synchronous().choose(hc4, rab, slow_start, enabled, 0)
        assert [m.process for m in moves] == [1, 2]
        # daemon-decides specs fall back to HC2 first
        assert moves[0].rule is RuleId.HC2

    def test_spec_priority_is_used(self, rab, slow_start):
        spec = AlgorithmSpec('HC', 4, priority_policy='HC1-first')
        enabled = enabled_map(spec, rab, slow_start)
        assert Synchronous().choose(spec, rab, slow_start, enabled, 0)[0].rule is RuleId.HC1

    @given(seeds, st.integers(0, 1000))
    def test_central_is_reproducible(self, seed, step):
        g = from_edges(3, [(0, 1), (1, 2)])
        spec = AlgorithmSpec('HC', 4)
        c = Configuration((0, 2, 2), (None, 2, 1))
        enabled = enabled_map(spec, g, c)
        first = CentralRandom(seed).choose(spec, g, c, enabled, step)
        assert len(first) == 1
        assert first == CentralRandom(seed).choose(spec, g, c, enabled, step)

    @given(seeds, st.integers(0, 1000), st.sampled_from([0.1, 0.5, 1.0]))
    def test_distributed_picks_enabled_subset(self, seed, step, prob):
        g = build_line(4)
        spec = AlgorithmSpec('U')
        c = Configuration((0, 9, 9, 9, 9), (None, 0, 1, 2, 3))
        enabled = enabled_map(spec, g, c)
        moves = DistributedRandom(seed, prob).choose(spec, g, c, enabled, step)
        assert moves
        assert {m.process for m in moves} <= set(enabled)
        assert len({m.process for m in moves}) == len(moves)

    def test_distributed_probability_range(self):
        with pytest.raises(UsageError):
            DistributedRandom(0, 0.0)
        with pytest.raises(UsageError):
            DistributedRandom(0, 1.5)

    def test_priority_overrides_rules(self, rab, hc4, slow_start):
        enabled = enabled_map(hc4, rab, slow_start)
        moves = Priority(Synchronous(), PriorityPolicy.HC1_FIRST).choose(hc4, rab, slow_start, enabled, 0)
        assert moves[0] == Move(1, RuleId.HC1)


class TestScripted:
    def test_replays_moves(self, rab, hc4, slow_start):
        enabled = enabled_map(hc4, rab, slow_start)
        strategy = Scripted([(Move(2, RuleId.HC1),)])
        assert strategy.choose(hc4, rab, slow_start, enabled, 0) == (Move(2, RuleId.HC1),)

    def test_rule_left_to_preference(self, rab, hc4, slow_start):
        enabled = enabled_map(hc4, rab, slow_start)
        strategy = Scripted([(Move(1),)], rule_pref=PriorityPolicy.HC1_FIRST)
        assert strategy.choose(hc4, rab, slow_start, enabled, 0) == (Move(1, RuleId.HC1),)

    @pytest.mark.parametrize('moves', [
        (),
        (Move(2, RuleId.HC2),),
        (Move(1, RuleId.HC1), Move(1, RuleId.HC2)),
    ])
    def test_violations(self, rab, hc4, slow_start, moves):
        enabled = enabled_map(hc4, rab, slow_start)
        with pytest.raises(ScheduleViolation):
            Scripted([moves]).choose(hc4, rab, slow_start, enabled, 0)

    def test_disabled_process(self, rab, hc4):
        c = Configuration((0, 1, 3), (None, 0, 1))
        enabled = enabled_map(hc4, rab, c)
        with pytest.raises(ScheduleViolation) as info:
            Scripted([(Move(1, RuleId.HC1),)]).choose(hc4, rab, c, enabled, 0)
        assert info.value.step == 0

    def test_exhausted_and_tail(self, rab, hc4, slow_start):
        enabled = enabled_map(hc4, rab, slow_start)
        with pytest.raises(ScheduleExhausted):
            Scripted([]).choose(hc4, rab, slow_start, enabled, 0)
        tail = Scripted([], tail=Synchronous())
        assert len(tail.choose(hc4, rab, slow_start, enabled, 0)) == 2


class TestSchedules:
    def test_cyclic(self):
        a, b = (Move(2, RuleId.U1),), (Move(3, RuleId.U1),)
        schedule = CyclicSchedule([a, b], 5)
        assert len(schedule) == 5
        assert schedule[0] == a and schedule[3] == b and schedule[-1] == a
        assert schedule[1:3] == [b, a]
        with pytest.raises(IndexError):
            schedule[5]

    def test_cyclic_needs_pattern(self):
        with pytest.raises(UsageError):
            CyclicSchedule([], 3)

    def test_json_uses_labels(self, g1):
        schedule = [(Move(g1.node('e.1'), RuleId.HC2), Move(g1.node('f.0'), RuleId.HC2)), (Move(1),)]
        data = dump_schedule(schedule, g1)
        assert data[0][0] == {"p": "e.1", "rule": "HC2"}
        assert data[1] == [{"p": "f.0"}]
        assert load_schedule(data, g1) == schedule

    def test_malformed_move(self, g1):
        with pytest.raises(UsageError):
            load_schedule([[{"rule": "HC2"}]], g1)
        with pytest.raises(UsageError):
            load_schedule([[{"p": 1, "rule": "HC9"}]], g1)

    def test_loading_is_logged(self, g1, caplog):
        with caplog.at_level(logging.DEBUG, logger='stabsim.scheduler'):
            load_schedule([[{"p": "e.1"}], [{"p": "f.0", "rule": "HC2"}]], g1)
        assert 'loaded a schedule of 2 steps' in caplog.text
