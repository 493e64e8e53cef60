"""Tests for guards, actions and configurations."""
import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from stabsim.algorithms import (AlgorithmSpec, Configuration, PriorityPolicy, RuleId, TiePolicy, Variant,
                                action, apply_rule, best_parent, check_configuration, d_ok, enabled_map,
                                enabled_rules, is_terminal, min_d, par_ok, random_configuration)
from stabsim.error import ConfigurationError, RuleNotEnabled, UsageError
from stabsim.topology import from_edges
from stabsim.verifier import bfs_configuration
from strategies import random_graphs, seeds


def conf(d, par):
    return Configuration(tuple(d), tuple(par))


class TestAlgorithmSpec:
    def test_u_has_no_bound(self):
        assert AlgorithmSpec('U', 5).D is None
        assert not AlgorithmSpec('U').bounded

    @pytest.mark.parametrize('variant', ['B', 'HC', 'FHC'])
    def test_bounded_variants_need_d(self, variant):
        with pytest.raises(UsageError):
            AlgorithmSpec(variant, 0)
        with pytest.raises(UsageError):
            AlgorithmSpec(variant)

    def test_unknown_values(self):
        with pytest.raises(UsageError):
            AlgorithmSpec('X', 3)
        with pytest.raises(UsageError):
            AlgorithmSpec('B', 3, tie_policy='random')
        with pytest.raises(UsageError):
            AlgorithmSpec('B', 3, mutations={'drop-B9'})

    def test_mutated_rules_and_name(self):
        spec = AlgorithmSpec('B', 4, mutations={'drop-B3'})
        assert spec.rules == (RuleId.B1, RuleId.B2)
        assert spec.name == 'B(4)[drop-B3]'
        assert AlgorithmSpec('U').name == 'U'

    def test_json(self):
        spec = AlgorithmSpec('HC', 6, TiePolicy.KEEP_CURRENT, PriorityPolicy.HC1_FIRST)
        assert AlgorithmSpec.from_json(spec.to_json()) == spec

    def test_with_variant(self):
        assert AlgorithmSpec('HC', 7).with_variant(Variant.B) == AlgorithmSpec('B', 7)


class TestConfiguration:
    def test_root_state(self):
        with pytest.raises(ConfigurationError):
            conf((1, 1), (None, 0))
        with pytest.raises(ConfigurationError):
            conf((0, 1), (1, 0))

    def test_replace_is_a_copy(self):
        c = conf((0, 3, 3), (None, 0, 1))
        c2 = c.replace({1: (1, 0)})
        assert c.d == (0, 3, 3)
        assert c2.d == (0, 1, 3)

    def test_check_configuration(self, line2):
        spec = AlgorithmSpec('B', 2)
        check_configuration(spec, line2, conf((0, 1, 2), (None, 0, 1)))
        with pytest.raises(ConfigurationError):
            check_configuration(spec, line2, conf((0, 1, 3), (None, 0, 1)))
        with pytest.raises(ConfigurationError):
            check_configuration(spec, line2, conf((0, 1, 2), (None, 2, 0)))
        with pytest.raises(ConfigurationError):
            check_configuration(spec, line2, conf((0, 1), (None, 0)))

    def test_json(self):
        c = conf((0, 2, 1), (None, 2, 1))
        assert Configuration.from_json(c.to_json()) == c
        with pytest.raises(ConfigurationError):
            Configuration.from_json({"d": [0]})


class TestMacros:
    def test_min_and_best_parent(self, lollipop2):
        c = conf((0, 1, 1, 1), (None, 0, 3, 1))
        # p_2 sees p_1 and p_3, both at 1
        assert min_d(lollipop2, c, 2) == 1
        assert best_parent(lollipop2, c, 2) == 1
        assert best_parent(lollipop2, c, 2, TiePolicy.KEEP_CURRENT) == 3

    def test_keep_current_needs_a_minimal_parent(self, lollipop2):
        c = conf((0, 1, 2, 1), (None, 0, 1, 2))
        assert best_parent(lollipop2, c, 3, TiePolicy.KEEP_CURRENT) == 1

    def test_ok_predicates(self, line2):
        c = conf((0, 1, 3), (None, 0, 1))
        assert d_ok(line2, c, 1) and par_ok(c, 1)
        assert not d_ok(line2, c, 2) and not par_ok(c, 2)


class TestU:
    spec = AlgorithmSpec('U')

    def test_u1(self, line2):
        c = conf((0, 3, 1), (None, 0, 1))
        assert enabled_rules(self.spec, line2, c, 1) == {RuleId.U1}
        assert enabled_rules(self.spec, line2, c, 2) == {RuleId.U1}
        assert action(self.spec, line2, c, 2, RuleId.U1) == (4, 1)

    def test_u2(self, line2):
        c = conf((0, 1, 2), (None, 2, 1))
        assert enabled_rules(self.spec, line2, c, 1) == {RuleId.U2}
        assert action(self.spec, line2, c, 1, RuleId.U2) == (1, 0)

    def test_drop_u2(self, line2):
        spec = AlgorithmSpec('U', mutations={'drop-U2'})
        assert not enabled_rules(spec, line2, conf((0, 1, 2), (None, 2, 1)), 1)

    def test_root_never_enabled(self, line2):
        assert not enabled_rules(self.spec, line2, conf((0, 5, 5), (None, 2, 1)), 0)


class TestB:
    spec = AlgorithmSpec('B', 2)

    def test_b1(self, line2):
        c = conf((0, 2, 2), (None, 0, 1))
        assert enabled_map(self.spec, line2, c) == {1: {RuleId.B1}}

    def test_b2(self, lollipop2):
        c = conf((0, 1, 2, 2), (None, 0, 3, 1))
        assert enabled_rules(self.spec, lollipop2, c, 2) == {RuleId.B2}
        assert action(self.spec, lollipop2, c, 2, RuleId.B2) == (2, 1)

    def test_b3(self, line2):
        c = conf((0, 2, 1), (None, 0, 1))
        assert enabled_rules(self.spec, line2, c, 2) == {RuleId.B3}
        assert action(self.spec, line2, c, 2, RuleId.B3) == (2, 1)

    def test_b3_mutations(self, line2):
        c = conf((0, 2, 2), (None, 0, 1))
        weak = AlgorithmSpec('B', 2, mutations={'weaken-B3'})
        assert enabled_rules(self.spec, line2, c, 2) == frozenset()
        assert enabled_rules(weak, line2, c, 2) == {RuleId.B3}
        dropped = AlgorithmSpec('B', 2, mutations={'drop-B3'})
        assert not enabled_rules(dropped, line2, conf((0, 2, 1), (None, 0, 1)), 2)


class TestHC:
    def test_both_rules(self, rab, hc4):
        c = conf((0, 2, 2), (None, 2, 1))
        assert enabled_rules(hc4, rab, c, 1) == {RuleId.HC1, RuleId.HC2}
        assert action(hc4, rab, c, 1, RuleId.HC1) == (3, 2)
        assert action(hc4, rab, c, 1, RuleId.HC2) == (1, 0)

    def test_hc1_blocked_by_bound(self, rab, hc4):
        c = conf((0, 1, 4), (None, 0, 1))
        assert enabled_rules(hc4, rab, c, 2) == {RuleId.HC1}
        c = conf((0, 4, 3), (None, 2, 1))
        assert RuleId.HC1 not in enabled_rules(hc4, rab, c, 2)

    def test_fhc_guards_are_disjoint(self, rab):
        spec = AlgorithmSpec('FHC', 4)
        assert enabled_rules(spec, rab, conf((0, 2, 2), (None, 2, 1)), 1) == {RuleId.HC2}
        assert enabled_rules(spec, rab, conf((0, 3, 2), (None, 0, 1)), 1) == {RuleId.FHC1}
        assert action(spec, rab, conf((0, 3, 2), (None, 0, 1)), 1, RuleId.FHC1) == (1, 0)

    def test_apply_rule_checks_guard(self, rab, hc4):
        c = conf((0, 1, 2), (None, 0, 1))
        with pytest.raises(RuleNotEnabled):
            apply_rule(hc4, rab, c, 1, RuleId.HC2)
        assert apply_rule(hc4, rab, conf((0, 2, 2), (None, 2, 1)), 1, RuleId.HC2).d == (0, 1, 2)


class TestRandomConfigurations:
    def test_u_needs_a_cap(self, line3):
        with pytest.raises(UsageError):
            random_configuration(AlgorithmSpec('U'), line3, seed=1)

    @given(random_graphs(), seeds, st.sampled_from(['B', 'HC', 'FHC']), st.integers(1, 4))
    def test_in_domain_and_reproducible(self, g, seed, variant, extra):
        spec = AlgorithmSpec(variant, g.diameter + extra)
        c = random_configuration(spec, g, seed)
        check_configuration(spec, g, c)
        assert c == random_configuration(spec, g, seed)

    @given(random_graphs(), st.sampled_from(['U', 'B', 'HC', 'FHC']), st.integers(0, 2))
    def test_bfs_configuration_is_terminal(self, g, variant, extra):
        spec = AlgorithmSpec(variant, g.diameter + extra)
        assert is_terminal(spec, g, bfs_configuration(g))

    def test_parents_and_values_are_uniform(self):
        g = from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        spec = AlgorithmSpec('B', 3)
        draws = 10 ** 4
        parents, values = Counter(), Counter()
        for seed in range(draws):
            c = random_configuration(spec, g, seed)
            parents[c.par[1]] += 1
            values[c.d[1]] += 1
        # three outcomes each: within 5 sigma of draws / 3
        expected = draws / 3
        sigma = math.sqrt(draws * (1 / 3) * (2 / 3))
        for counts in (parents, values):
            assert len(counts) == 3
            assert all(abs(n - expected) < 5 * sigma for n in counts.values()), counts
