"""Tests for legitimacy, tree verification, attractors and configuration classes."""
import pytest
from hypothesis import given

from stabsim.algorithms import AlgorithmSpec, Configuration
from stabsim.engine import run
from stabsim.error import UsageError
from stabsim.scenarios import conf_c_configuration, scenario_sync_b_lollipop
from stabsim.scheduler import Synchronous
from stabsim.topology import build_gk
from stabsim.verifier import (TreeReason, att_b_index, att_hc_index, att_index, attractor_report,
                              bfs_configuration, extract_tree, in_conf_class, is_legitimate,
                              partition_by_distance_value, verify_bfs_tree)
from strategies import random_graphs


class TestLegitimacy:
    @given(random_graphs())
    def test_bfs_configuration(self, g):
        c = bfs_configuration(g)
        assert is_legitimate(g, c)
        assert verify_bfs_tree(g, extract_tree(g, c))

    def test_wrong_parent(self, lollipop2):
        # p_2 and p_3 both at distance 2, p_2 pointing at p_3
        c = Configuration((0, 1, 2, 2), (None, 0, 3, 1))
        assert not is_legitimate(lollipop2, c)

    def test_wrong_distance(self, line2):
        assert not is_legitimate(line2, Configuration((0, 1, 3), (None, 0, 1)))


class TestTreeCheck:
    def test_cycle(self, lollipop2):
        check = verify_bfs_tree(lollipop2, [(1, 0), (2, 3), (3, 2)])
        assert not check
        assert check.reason is TreeReason.CYCLE

    def test_not_spanning(self, line2):
        assert verify_bfs_tree(line2, [(1, 0)]).reason is TreeReason.NOT_SPANNING
        assert verify_bfs_tree(line2, [(1, 0), (2, 0)]).reason is TreeReason.NOT_SPANNING

    def test_not_shortest(self, lollipop3):
        check = verify_bfs_tree(lollipop3, [(1, 0), (2, 1), (3, 2), (4, 3)])
        assert check.reason is TreeReason.NOT_SHORTEST

    def test_extract_tree(self, line2):
        tree = extract_tree(line2, Configuration((0, 1, 2), (None, 0, 1)))
        assert list(tree) == [(1, 0), (2, 1)]
        assert len(tree.edges) == 2


class TestAttractors:
    def test_legitimate_is_full(self, line3):
        c = bfs_configuration(line3)
        assert att_index(line3, c) == att_b_index(line3, c) == att_hc_index(line3, c) == 3

    def test_att_b(self, line3):
        c = Configuration((0, 1, 5, 5), (None, 0, 1, 2))
        assert att_index(line3, c) == 1
        assert att_b_index(line3, c) == 1

    def test_att_b_needs_large_values_below(self, line3):
        c = Configuration((0, 1, 1, 5), (None, 0, 1, 2))
        assert att_index(line3, c) == 1
        assert att_b_index(line3, c) == 0

    def test_att_hc(self, line3):
        c = Configuration((0, 1, 2, 2), (None, 0, 1, 2))
        assert att_hc_index(line3, c) == 2

    def test_partition(self):
        parts = partition_by_distance_value(Configuration((0, 1, 2, 2), (None, 0, 1, 2)))
        assert parts == {0: {0}, 1: {1}, 2: {2, 3}}

    def test_report_per_round(self):
        trace = scenario_sync_b_lollipop(4).run()
        report = attractor_report(trace)
        assert len(report.rows) == trace.round_count + 1
        assert report.column('round') == tuple(range(trace.round_count + 1))
        assert report.column('att_b')[-1] == 4
        assert list(report.column('att_b')) == sorted(report.column('att_b'))


class TestConfClasses:
    def test_initial_g1(self, g1):
        c = conf_c_configuration(g1, 1, 1, 5)
        assert in_conf_class(g1, c, 'c', 1, 1, 5)
        assert not in_conf_class(g1, c, 'b', 1, 1, 5)
        assert not in_conf_class(g1, c, 'c', 1, 3, 5)

    def test_top_level_needs_lower_levels_done(self):
        g = build_gk(2)
        assert in_conf_class(g, conf_c_configuration(g, 2, 3, 7), 'c', 2, 3, 7)
        assert not in_conf_class(g, conf_c_configuration(g, 1, 3, 7), 'c', 2, 3, 7)

    def test_bad_class(self, g1):
        c = conf_c_configuration(g1, 1, 1, 5)
        with pytest.raises(UsageError):
            in_conf_class(g1, c, 'a', 1, 1, 5)
        with pytest.raises(UsageError):
            in_conf_class(g1, c, 'x', 1, 1, 5)
        with pytest.raises(UsageError):
            in_conf_class(g1, c, 'c', 2, 1, 5)

    def test_final_configuration_of_a_run_is_not_in_class(self, g1):
        c = conf_c_configuration(g1, 1, 1, 5)
        trace = run(AlgorithmSpec('HC', 5), g1, c, Synchronous(), 1000)
        assert is_legitimate(g1, trace.final)
        assert not in_conf_class(g1, trace.final, 'c', 1, 5, 5)
