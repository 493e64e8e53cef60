"""Mini-syntax parsing, trace files and CSV summaries."""
import io
import logging

import pytest

from stabsim.algorithms import AlgorithmSpec, Configuration
from stabsim.engine import run
from stabsim.error import ParenthesisError, UsageError
from stabsim.file import SUMMARY_FIELDS, read_trace, summary_row, write_summary, write_trace
from stabsim.process import check_balance, clever_split, convert, csl_process, parse_call
from stabsim.scenarios import scenario_hc_slow
from stabsim.scheduler import Synchronous
from stabsim.topology import build_line


class Recorder:
    def __init__(self):
        self.lines = []

    def __call__(self, text, color=None):
        self.lines.append(text)


class TestMiniSyntax:
    def test_clever_split(self):
        assert clever_split('a,(b,c),[d,e]') == ['a', '(b,c)', '[d,e]']
        assert clever_split('') == ['']

    def test_convert(self):
        assert convert(['1', ' 2.5', 'x', '[1, [2, 3]]', '()']) == [1, 2.5, 'x', [1, [2, 3]], []]

    def test_balance(self):
        check_balance('f:[1,(2)]')
        for bad in ('f:(1', 'f:1)', 'f:(1]'):
            with pytest.raises(ParenthesisError):
                check_balance(bad)

    @pytest.mark.parametrize('text, expected', [
        ('line:5', ('line', [5], {})),
        (' lollipop : 4 ', ('lollipop', [4], {})),
        ('random:n=6,p=0.4', ('random', [], {"n": 6, "p": 0.4})),
        ('gk:3,y=2', ('gk', [3], {"y": 2})),
        ('help', ('help', [], {})),
    ])
    def test_parse_call(self, text, expected):
        assert parse_call(text) == expected

    def test_bad_calls(self):
        with pytest.raises(SyntaxError):
            parse_call('gk:k=3,2')
        with pytest.raises(SyntaxError):
            parse_call(':3')


class TestCslProcess:
    builders = {"line": build_line}

    def test_call(self):
        g = csl_process('line:3', Recorder(), self.builders)
        assert g.node_count == 4

    def test_defaults_do_not_override(self):
        seen = {}

        def builder(**kwargs):
            seen.update(kwargs)
            return True

        assert csl_process('builder:seed=4', Recorder(), {"builder": builder}, {"seed": 1, "p": 0.5})
        assert seen == {"seed": 4, "p": 0.5}

    @pytest.mark.parametrize('text, prefix', [
        ('line:(3', 'SyntaxError: unmatched'),
        ('line:k=1,2', 'SyntaxError: incoherent'),
        ('ring:3', 'stabsim (most recent call last):'),
        ('line:3,4', 'ArgumentError'),
        ('line:0', 'UsageError'),
    ])
    def test_errors_are_reported(self, text, prefix):
        output = Recorder()
        assert csl_process(text, output, self.builders) is None
        assert output.lines[0].startswith(prefix)


class TestTraceFile:
    def test_round_trip(self):
        scenario = scenario_hc_slow(3)
        trace = scenario.run()
        out = io.StringIO()
        write_trace(trace, out, seed=7)
        lines = out.getvalue().splitlines()
        # header, one record per step, footer
        assert len(lines) == trace.step_count + 2
        loaded = read_trace(lines, 'hc.jsonl')
        assert loaded.graph == scenario.graph
        assert loaded.spec == scenario.spec
        assert loaded.init == scenario.init
        assert loaded.schedule == trace.moves
        assert (loaded.steps, loaded.rounds, loaded.outcome) == (6, 4, 'terminal')
        assert loaded.final == trace.final
        assert loaded.seed == 7

    def test_labels_in_step_records(self):
        out = io.StringIO()
        write_trace(scenario_hc_slow(1).run(), out)
        second = out.getvalue().splitlines()[1]
        assert '"p": "a"' in second and '"rule": "HC2"' in second

    def test_summary_trace_has_no_steps(self, line2):
        trace = run(AlgorithmSpec('U'), line2, Configuration((0, 3, 3), (None, 0, 1)), Synchronous(), 10,
                    record='summary')
        out = io.StringIO()
        write_trace(trace, out)
        loaded = read_trace(out.getvalue().splitlines())
        assert loaded.schedule == []
        assert loaded.steps == 2

    def test_errors_carry_the_line(self):
        text = io.StringIO()
        write_trace(scenario_hc_slow(2).run(), text)
        lines = text.getvalue().splitlines()
        lines[1] = '{"i": 0, "moves": [{"p": "a", "rule": "HC7"}], "round": 1}'
        with pytest.raises(UsageError, match='broken.jsonl:2:'):
            read_trace(lines, 'broken.jsonl')
        with pytest.raises(UsageError, match="no header"):
            read_trace(lines[-1:], "broken.jsonl")
        with pytest.raises(UsageError, match=':1:'):
            read_trace(['not json'], 'broken.jsonl')

    def test_reading_and_writing_are_logged(self, caplog):
        out = io.StringIO()
        with caplog.at_level(logging.DEBUG, logger='stabsim.file'):
            write_trace(scenario_hc_slow(2).run(), out)
            read_trace(out.getvalue().splitlines(), 'hc.jsonl')
        assert 'wrote delta trace of HC(4): 4 steps, 3 rounds' in caplog.text
        assert 'hc.jsonl: 4 recorded steps' in caplog.text

    def test_steps_must_follow_each_other(self):
        text = io.StringIO()
        write_trace(scenario_hc_slow(2).run(), text)
        lines = text.getvalue().splitlines()
        del lines[1]
        with pytest.raises(UsageError, match='expected step 0'):
            read_trace(lines)


class TestSummary:
    def test_rows(self, line2):
        spec = AlgorithmSpec('B', 2)
        trace = run(spec, line2, Configuration((0, 2, 2), (None, 0, 1)), Synchronous(), 10)
        row = summary_row('line:2', trace, 3, True)
        assert row == {"graph": 'line:2', "variant": 'B(2)', "D": 2, "seed": 3, "steps": 1, "rounds": 1,
                       "outcome": 'terminal', "legitimate": 1}
        out = io.StringIO()
        write_summary([row, summary_row('line:2', trace, None, None)], out)
        lines = out.getvalue().splitlines()
        assert lines[0] == ','.join(SUMMARY_FIELDS)
        assert lines[1] == 'line:2,B(2),2,3,1,1,terminal,1'
        assert lines[2] == 'line:2,B(2),2,,1,1,terminal,'

    def test_without_header(self):
        out = io.StringIO()
        write_summary([{"k": 1, "measured": 4, "bound": 4}], out, header=False, fields=('k', 'measured', 'bound'))
        assert out.getvalue() == '1,4,4\n'
