# -*- coding: utf-8 -*-
"""
Command-line front door: `stabsim <command> [options]`.

Machine output (JSONL traces, CSV rows, JSON reports) goes to files or standard
output; human-readable summaries go to standard error.
"""
import argparse
import json
import logging
import multiprocessing
import os
import sys
from dataclasses import dataclass, replace
from typing import IO, Callable, List, Optional, Sequence, Tuple

from .algorithms import AlgorithmSpec, Configuration, PriorityPolicy, TiePolicy, Variant, random_configuration
from .defaults import __colors__, __exit_codes__, __mutations__
from .engine import ExecutionTrace, Outcome, default_budget, run
from .error import (CapExceeded, ReplayDivergence, StabsimError, UsageError, os_error, stderr_output,
                    usage_error)
from .explorer import explore
from .file import read_trace, summary_row, write_summary, write_trace
from .process import csl_process
from .scenarios import (SCENARIOS, Scenario, general_bound_graph, scenario_exponential, scenario_hc_slow,
                        scenario_sync_b_lollipop, scenario_sync_fhc_lollipop, scenario_sync_u_line,
                        step_lower_bound)
from .scheduler import CentralRandom, DaemonStrategy, DistributedRandom, Scripted, Synchronous, load_schedule
from .topology import Graph, build_line, build_lollipop, build_random, connected_graphs, parse_graph
from .utils import Utils, load_settings
from .verifier import extract_tree, is_legitimate, verify_bfs_tree
from .version import __version__ as version

logger = logging.getLogger(__name__)

GRAPH_BUILDERS = {
    "line": build_line,
    "lollipop": build_lollipop,
    "gk": general_bound_graph,
    "random": build_random,
}

DAEMONS = ('sync', 'central', 'distributed', 'scripted')


def resolve_seed(flag: Optional[int]) -> int:
    """
    `--seed`, else the STABSIM_SEED environment variable, else the configured seed.
    """
    if flag is not None:
        return flag
    env = os.environ.get('STABSIM_SEED')
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError('STABSIM_SEED must be an integer, got %r' % env) from None
    return load_settings()["seed"]


def make_strategy(daemon: str, seed: int, activation_prob: float = 0.5,
                  schedule: Optional[Sequence] = None,
                  rule_pref: Optional[PriorityPolicy] = None) -> DaemonStrategy:
    if daemon == 'sync':
        return Synchronous(rule_pref)
    if daemon == 'central':
        return CentralRandom(seed, rule_pref)
    if daemon == 'distributed':
        return DistributedRandom(seed, activation_prob, rule_pref)
    if daemon == 'scripted':
        if schedule is None:
            raise UsageError('the scripted daemon needs --schedule or --scenario')
        return Scripted(schedule, rule_pref=rule_pref)
    raise UsageError('unknown daemon %r, expected one of %s' % (daemon, ', '.join(DAEMONS)))


@dataclass(frozen=True)
class RunJob:
    """
    Everything one repetition needs; picklable for the worker pool.
    """
    spec: AlgorithmSpec
    graph: Graph
    graph_name: str
    daemon: str
    seed: int
    activation_prob: float
    budget: int
    record: str = 'summary'
    schedule: Optional[Tuple] = None
    init: Optional[Configuration] = None
    u_cap: Optional[int] = None
    rule_pref: Optional[PriorityPolicy] = None


def verdict(trace: ExecutionTrace) -> Tuple[int, Optional[bool]]:
    """
    Exit code of a finished run and, when it terminated, whether the result is a legitimate BFS tree.
    """
    if trace.outcome is Outcome.STEP_BUDGET_EXCEEDED:
        return __exit_codes__["budget"], None
    if trace.outcome is not Outcome.TERMINAL:
        return __exit_codes__["violation"], None
    g = trace.graph
    legitimate = is_legitimate(g, trace.final) and bool(verify_bfs_tree(g, extract_tree(g, trace.final)))
    return (__exit_codes__["ok"] if legitimate else __exit_codes__["illegitimate"]), legitimate


def execute(job: RunJob) -> ExecutionTrace:
    init = job.init
    if init is None:
        init = random_configuration(job.spec, job.graph, job.seed, job.u_cap)
    strategy = make_strategy(job.daemon, job.seed, job.activation_prob, job.schedule, job.rule_pref)
    return run(job.spec, job.graph, init, strategy, job.budget, job.record)


def run_job(job: RunJob) -> Tuple[dict, int]:
    trace = execute(job)
    code, legitimate = verdict(trace)
    return summary_row(job.graph_name, trace, job.seed, legitimate), code


def worst(codes: Sequence[int]) -> int:
    """
    Most severe exit code: illegitimate, then violation, budget and check failure.
    """
    order = [__exit_codes__[name] for name in ("illegitimate", "violation", "budget", "check-failed")]
    for code in order:
        if code in codes:
            return code
    return __exit_codes__["ok"]


class Console:
    """
    Constructs and returns a new :class:`Console`.
    """
    def __init__(self, output: Callable = stderr_output, stream: Optional[IO[str]] = None) -> None:
        '''Main constructor.

        - param `output`:   callable(text, color) receiving human readable reports
        - param `stream`:   machine output, standard output by default'''
        self._output = output
        self._stream = sys.stdout if stream is None else stream
        self._settings = load_settings()
        self._utils = Utils(self._output)
        commands = {"run": self.run,
                    "replay": self.replay,
                    "table": self.table,
                    "explore": self.explore,
                    "scenario-dump": self.scenario_dump}
        defaults = {"usage": self._utils.usage,
                    "help": self._utils.help,
                    "license": self._utils.show_license}
        self._command_dictionary = {**commands, **defaults}
        self._utils.command_dictionary = self._command_dictionary

    @property
    def command_dictionary(self) -> dict:
        return self._command_dictionary

    def dispatch(self, args: argparse.Namespace) -> int:
        """
        Execute the command named by `args.command` and return its exit code.
        """
        executable = self._command_dictionary[args.command]
        try:
            if args.command == 'usage':
                return executable(args.name)
            if args.command in ('help', 'license'):
                return executable()
            return executable(args)
        except CapExceeded as e:
            usage_error(e, self._output)
            return __exit_codes__["budget"]
        except ReplayDivergence as e:
            self._output(str(e), __colors__["error"])
            return __exit_codes__["violation"]
        except StabsimError as e:
            usage_error(e, self._output)
            return __exit_codes__["usage"]
        except OSError as e:
            os_error(e, self._output)
            return __exit_codes__["usage"]

    # graph, algorithm and scenario arguments

    def _graph(self, args: argparse.Namespace, seed: int) -> Tuple[Graph, str]:
        if args.graph_file:
            with open(args.graph_file) as source:
                return parse_graph(source.read()), os.path.basename(args.graph_file)
        if not args.graph:
            raise UsageError('one of --graph, --graph-file or --scenario is required')
        name = args.graph.partition(':')[0].strip()
        defaults = {"seed": seed} if name == 'random' else None
        g = csl_process(args.graph, self._output, GRAPH_BUILDERS, defaults)
        if g is None:
            raise UsageError('cannot build graph %r' % args.graph)
        return g, args.graph

    def _spec(self, args: argparse.Namespace, g: Graph, variant: Optional[str] = None,
              D: Optional[int] = None) -> AlgorithmSpec:
        variant = Variant(variant or args.algo)
        if D is None:
            D = args.D if args.D is not None else g.diameter
        return AlgorithmSpec(variant, None if variant is Variant.U else D, args.tie, args.priority,
                             frozenset(args.mutation or ()))

    def _scenario(self, text: str) -> Scenario:
        scenario = csl_process(text, self._output, SCENARIOS)
        if scenario is None:
            raise UsageError('cannot build scenario %r' % text)
        return scenario

    def _write_trace(self, trace: ExecutionTrace, path: Optional[str], seed: Optional[int]) -> None:
        if path:
            with open(path, 'w') as target:
                write_trace(trace, target, seed)

    def _write_rows(self, rows: List[dict], path: Optional[str]) -> None:
        if path:
            with open(path, 'w', newline='') as target:
                write_summary(rows, target)
        else:
            write_summary(rows, self._stream)

    def _report(self, row: dict, code: int) -> None:
        color = __colors__["success"] if code == __exit_codes__["ok"] else __colors__["error"]
        self._output('%(graph)s %(variant)s seed=%(seed)s: %(outcome)s after %(steps)s steps, %(rounds)s rounds'
                     % row, color)

    # commands

    def run(self, args):
        '''
        Execute an algorithm from a random (or given) initial configuration under a
        daemon, or a built-in scenario, then verify the terminal configuration.
        Writes a JSONL trace (--trace) and CSV summary rows.
        '''
        seed = resolve_seed(args.seed)
        if args.scenario:
            return self._run_scenario(args, seed)
        g, graph_name = self._graph(args, seed)
        spec = self._spec(args, g)
        schedule = None
        if args.schedule:
            with open(args.schedule) as source:
                schedule = tuple(load_schedule(json.load(source), g))
        init = None
        if args.init:
            with open(args.init) as source:
                init = Configuration.from_json(json.load(source))
        budget = args.budget
        if budget is None:
            if spec.bounded:
                budget = default_budget(spec, g)
            else:
                budget = self._settings["budget_cap"]
                logger.info('no --budget for U: capping at %d steps', budget)
        activation = args.activation_prob if args.activation_prob is not None else self._settings["activation_prob"]
        u_cap = self._settings["u_cap_factor"] * g.diameter
        rule_pref = None if args.rule_pref is None else PriorityPolicy(args.rule_pref)
        jobs = [RunJob(spec, g, graph_name, args.daemon, seed + r, activation, budget,
                       schedule=schedule, init=init, u_cap=u_cap, rule_pref=rule_pref)
                for r in range(args.repetitions)]

        if len(jobs) == 1:
            job = jobs[0]
            trace = execute(replace(job, record=args.record))
            code, legitimate = verdict(trace)
            self._write_trace(trace, args.trace, job.seed)
            results = [(summary_row(graph_name, trace, job.seed, legitimate), code)]
        else:
            if args.trace:
                self._output('--trace is ignored with --repetitions > 1', __colors__["warning"])
            processes = args.jobs or self._settings["jobs"]
            if processes > 1:
                with multiprocessing.Pool(processes) as pool:
                    # map keeps repetition order
                    results = pool.map(run_job, jobs)
            else:
                results = [run_job(job) for job in jobs]
        for row, code in results:
            self._report(row, code)
        self._write_rows([row for row, _ in results], args.summary)
        return worst([code for _, code in results])

    def _run_scenario(self, args, seed: int) -> int:
        scenario = self._scenario(args.scenario)
        trace = scenario.run(record=args.record)
        code, legitimate = verdict(trace)
        self._write_trace(trace, args.trace, seed)
        row = summary_row(scenario.name, trace, None, legitimate)
        self._report(row, code)
        self._write_rows([row], args.summary)
        problems = scenario.expected.problems(trace)
        for problem in problems:
            self._output('%s: %s' % (scenario.name, problem), __colors__["warning"])
        if code == __exit_codes__["ok"] and problems:
            return __exit_codes__["check-failed"]
        return code

    def replay(self, args):
        '''
        Re-execute a JSONL trace or a scenario bundle and check that it reproduces
        the recorded steps, rounds and final configuration.
        '''
        with open(args.path) as source:
            text = source.read()
        try:
            data = json.loads(text)
        except ValueError:
            data = None
        if isinstance(data, dict) and "schedule" in data:
            scenario = Scenario.from_bundle(data)
            trace = scenario.run()
            code, _ = verdict(trace)
            problems = scenario.expected.problems(trace)
            for problem in problems:
                self._output('%s: %s' % (scenario.name, problem), __colors__["warning"])
            self._output('%s: %d steps, %d rounds' % (scenario.name, trace.step_count, trace.round_count),
                         __colors__["info"])
            if code == __exit_codes__["ok"] and problems:
                return __exit_codes__["check-failed"]
            return code

        recorded = read_trace(text.splitlines(), args.path)
        trace = run(recorded.spec, recorded.graph, recorded.init, Scripted(recorded.schedule),
                    len(recorded.schedule))
        expected_outcome = recorded.outcome
        if expected_outcome in (Outcome.SCHEDULE_VIOLATION.value, Outcome.SCHEDULE_EXHAUSTED.value):
            expected_outcome = Outcome.STEP_BUDGET_EXCEEDED.value
        if trace.outcome is Outcome.SCHEDULE_VIOLATION:
            raise ReplayDivergence(trace.error.step, str(trace.error))
        for what, got, want in (('steps', trace.step_count, recorded.steps),
                                ('rounds', trace.round_count, recorded.rounds),
                                ('outcome', trace.outcome.value, expected_outcome),
                                ('final configuration', trace.final, recorded.final)):
            if want is not None and got != want:
                raise ReplayDivergence(trace.step_count, '%s: %s, recorded %s' % (what, got, want))
        self._output('replayed %d steps, %d rounds' % (trace.step_count, trace.round_count), __colors__["success"])
        return verdict(trace)[0] if trace.outcome is Outcome.TERMINAL else __exit_codes__["ok"]

    def table(self, args):
        '''
        Emit a CSV bound table: `rounds` (diameter, U, B, FHC and HC-slow rounds of the
        worst-case scenarios) or `steps` (k, measured steps on G_k, (2k+2)(2^k-1)).
        '''
        if args.which == 'rounds':
            low, high = args.min or 2, args.max or 10
            if low < 2:
                raise UsageError('rounds tables start at diameter 2')
            fields = ('diameter', 'U', 'B', 'FHC', 'HC-slow')
            rows = []
            for diam in range(low, high + 1):
                slow = '—'
                if diam % 2 == 0:
                    slow = scenario_hc_slow(diam // 2).run('summary').round_count
                rows.append({"diameter": diam,
                             "U": scenario_sync_u_line(diam).run('summary').round_count,
                             "B": scenario_sync_b_lollipop(diam).run('summary').round_count,
                             "FHC": scenario_sync_fhc_lollipop(diam).run('summary').round_count,
                             "HC-slow": slow})
        elif args.which == 'steps':
            low, high = args.min or 1, args.max or 6
            if low < 1:
                raise UsageError('steps tables start at k = 1')
            fields = ('k', 'measured', 'bound')
            rows = [{"k": k, "measured": scenario_exponential(k).notes["prefix_steps"],
                     "bound": step_lower_bound(k)} for k in range(low, high + 1)]
        else:
            raise UsageError('unknown table %r, expected rounds or steps' % args.which)
        write_summary(rows, self._stream, fields=fields)
        return __exit_codes__["ok"]

    def explore(self, args):
        '''
        Exhaustively check termination, sinks and the step bound of the bounded
        variants, on one graph or on every connected graph up to --all-max-nodes nodes.
        Prints a JSON report list; exit 1 if a check fails, 2 if the cap is hit.
        '''
        seed = resolve_seed(args.seed)
        if args.all_max_nodes:
            graphs = [(g, 'connected:n=%d' % g.node_count) for g in connected_graphs(args.all_max_nodes)]
        else:
            graphs = [self._graph(args, seed)]
        variants = ['B', 'HC', 'FHC'] if args.algo in (None, 'all') else [args.algo]
        if 'U' in variants:
            raise UsageError('U has an infinite state space and cannot be explored')
        offsets = [int(x) for x in args.D_offsets.split(',')] if args.D_offsets else [0]
        cap = args.cap or self._settings["explore_cap"]
        reports, codes = [], []
        for g, name in graphs:
            bounds = [args.D] if args.D is not None else [g.diameter + offset for offset in offsets]
            for variant in variants:
                for D in bounds:
                    spec = self._spec(args, g, variant, D)
                    try:
                        report = explore(spec, g, cap)
                    except CapExceeded as e:
                        self._output('%s %s: %s' % (name, spec.name, e), __colors__["warning"])
                        codes.append(__exit_codes__["budget"])
                        continue
                    data = report.to_json()
                    data["graph"] = name
                    reports.append(data)
                    if not report.ok:
                        codes.append(__exit_codes__["check-failed"])
                        self._output('%s %s fails: acyclic=%s, sinks ok=%s' % (
                            name, spec.name, report.acyclic, report.sinks_ok), __colors__["error"])
                        if report.cycle:
                            self._output('cycle witness: ' + json.dumps(data["cycle"]), __colors__["error"])
        json.dump(reports, self._stream, indent=1)
        self._stream.write('\n')
        if __exit_codes__["check-failed"] in codes:
            return __exit_codes__["check-failed"]
        if codes:
            return __exit_codes__["budget"]
        self._output('%d instances explored, all checks hold' % len(reports), __colors__["success"])
        return __exit_codes__["ok"]

    def scenario_dump(self, args):
        '''
        Write a built-in scenario as a JSON bundle {graph, spec, init, schedule, expected},
        loadable by `replay`.
        '''
        bundle = self._scenario(args.scenario).to_bundle()
        if args.output:
            with open(args.output, 'w') as target:
                json.dump(bundle, target)
        else:
            json.dump(bundle, self._stream)
            self._stream.write('\n')
        return __exit_codes__["ok"]


def _add_algorithm_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--graph', help='builder mini-syntax: line:5, lollipop:4, gk:k=3,y=2, random:n=6,p=0.4')
    parser.add_argument('--graph-file', help='edge-list file with a "root <id>" line')
    parser.add_argument('--D', type=int, help='distance bound of B, HC and FHC (default: the diameter)')
    parser.add_argument('--tie', default=TiePolicy.SMALLEST_ID.value, choices=[t.value for t in TiePolicy])
    parser.add_argument('--priority', default=PriorityPolicy.DAEMON_DECIDES.value,
                        choices=[p.value for p in PriorityPolicy])
    parser.add_argument('--mutation', action='append', choices=sorted(__mutations__),
                        help='rule-set mutation, for negative controls')
    parser.add_argument('--seed', type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='stabsim', description='stabsim %s' % version)
    parser.add_argument('--verbose', '-v', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('run')
    _add_algorithm_options(p)
    p.add_argument('--algo', default='U', choices=[v.value for v in Variant])
    p.add_argument('--scenario', help='built-in scenario, e.g. hc-slow:k=3 or exponential:k=4')
    p.add_argument('--daemon', default='sync', choices=DAEMONS)
    p.add_argument('--schedule', help='JSON schedule for the scripted daemon')
    p.add_argument('--init', help='JSON initial configuration {"d": [...], "par": [...]}')
    p.add_argument('--rule-pref', choices=[pp.value for pp in PriorityPolicy])
    p.add_argument('--activation-prob', type=float)
    p.add_argument('--budget', type=int)
    p.add_argument('--record', default='delta', choices=('delta', 'summary'))
    p.add_argument('--trace', help='JSONL trace output')
    p.add_argument('--summary', help='CSV summary output (default: standard output)')
    p.add_argument('--repetitions', type=int, default=1)
    p.add_argument('--jobs', type=int)

    p = sub.add_parser('replay')
    p.add_argument('path', help='JSONL trace or JSON scenario bundle')

    p = sub.add_parser('table')
    p.add_argument('which', choices=('rounds', 'steps'))
    p.add_argument('--min', type=int)
    p.add_argument('--max', type=int)

    p = sub.add_parser('explore')
    _add_algorithm_options(p)
    p.add_argument('--algo', default='all', choices=['all'] + [v.value for v in Variant])
    p.add_argument('--all-max-nodes', type=int, help='sweep every connected graph up to this many nodes')
    p.add_argument('--D-offsets', help='comma separated offsets added to the diameter, e.g. 0,1,2')
    p.add_argument('--cap', type=int, help='largest state space to enumerate')

    p = sub.add_parser('scenario-dump')
    p.add_argument('--scenario', required=True)
    p.add_argument('--output')

    p = sub.add_parser('usage')
    p.add_argument('name')
    sub.add_parser('help')
    sub.add_parser('license')
    return parser


def main(argv: Optional[Sequence[str]] = None, stream: Optional[IO[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return __exit_codes__["usage"] if e.code else __exit_codes__["ok"]
    verbose = args.verbose or load_settings()["verbose"]
    logging.basicConfig(format='[%(name)s]: %(message)s', stream=sys.stderr,
                        level=logging.INFO if verbose else logging.WARNING)
    if getattr(args, 'repetitions', 1) < 1:
        usage_error('--repetitions must be at least 1', stderr_output)
        return __exit_codes__["usage"]
    return Console(stream=stream).dispatch(args)


if __name__ == '__main__':
    sys.exit(main())
