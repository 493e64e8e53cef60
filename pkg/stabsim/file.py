"""
Trace and summary files.

A trace is JSONL: a header record with the graph, the algorithm and the initial
configuration, one record per step `{"i": step, "moves": [...], "round": r}`, and a
footer with the final configuration and the counters. The CSV summary has one row
per run.
"""
import csv
import json
import logging
from dataclasses import dataclass
from typing import IO, Iterable, List, Optional, Tuple

from .algorithms import AlgorithmSpec, Configuration
from .engine import ExecutionTrace
from .error import StabsimError, UsageError
from .scheduler import Move, dump_schedule, load_schedule
from .topology import Graph, parse_graph, serialize_graph

logger = logging.getLogger(__name__)

SUMMARY_FIELDS = ('graph', 'variant', 'D', 'seed', 'steps', 'rounds', 'outcome', 'legitimate')


def write_trace(trace: ExecutionTrace, stream: IO[str], seed: Optional[int] = None) -> None:
    g = trace.graph
    header = {"type": "header", "graph": serialize_graph(g), "spec": trace.spec.to_json(),
              "init": trace.initial.to_json(), "seed": seed}
    stream.write(json.dumps(header) + '\n')
    if trace.record == 'delta':
        for i in range(trace.step_count):
            record = {"i": i, "moves": dump_schedule([trace.moves_at(i)], g)[0], "round": trace.round_of(i)}
            stream.write(json.dumps(record) + '\n')
    footer = {"type": "footer", "final": trace.final.to_json(), "steps": trace.step_count,
              "rounds": trace.round_count, "outcome": trace.outcome.value if trace.outcome else None,
              "recorded": trace.record == 'delta'}
    stream.write(json.dumps(footer) + '\n')
    logger.debug('wrote %s trace of %s: %d steps, %d rounds', trace.record, trace.spec.name,
                 trace.step_count, trace.round_count)


@dataclass
class TraceFile:
    graph: Graph
    spec: AlgorithmSpec
    init: Configuration
    schedule: List[Tuple[Move, ...]]
    final: Optional[Configuration]
    steps: Optional[int]
    rounds: Optional[int]
    outcome: Optional[str]
    seed: Optional[int] = None


def read_trace(stream: Iterable[str], name: str = '<trace>') -> TraceFile:
    """
    Parse a JSONL trace; errors carry the file name and line number.
    """
    header, footer, moves = None, None, []
    for number, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if record.get("type") == "header":
                header = record
                g = parse_graph(record["graph"])
            elif record.get("type") == "footer":
                footer = record
            else:
                if header is None:
                    raise UsageError('step record before the header')
                if record["i"] != len(moves):
                    raise UsageError('expected step %d, found %d' % (len(moves), record["i"]))
                moves.extend(load_schedule([record["moves"]], g))
        except (ValueError, KeyError, StabsimError) as e:
            raise UsageError('%s:%d: %s' % (name, number, e)) from e
    if header is None:
        raise UsageError('%s: no header record' % name)
    logger.debug('%s: %d recorded steps', name, len(moves))
    try:
        spec = AlgorithmSpec.from_json(header["spec"])
        init = Configuration.from_json(header["init"])
    except (KeyError, StabsimError) as e:
        raise UsageError('%s: bad header: %s' % (name, e)) from e
    footer = footer or {}
    final = Configuration.from_json(footer["final"]) if "final" in footer else None
    return TraceFile(g, spec, init, moves, final, footer.get("steps"), footer.get("rounds"),
                     footer.get("outcome"), header.get("seed"))


def summary_row(graph_name: str, trace: ExecutionTrace, seed: Optional[int], legitimate: Optional[bool]) -> dict:
    return {"graph": graph_name, "variant": trace.spec.name, "D": '' if trace.spec.D is None else trace.spec.D,
            "seed": '' if seed is None else seed, "steps": trace.step_count, "rounds": trace.round_count,
            "outcome": trace.outcome.value, "legitimate": '' if legitimate is None else int(legitimate)}


def write_summary(rows: Iterable[dict], stream: IO[str], header: bool = True,
                  fields: Tuple[str, ...] = SUMMARY_FIELDS) -> None:
    writer = csv.DictWriter(stream, fieldnames=fields, lineterminator='\n')
    if header:
        writer.writeheader()
    for row in rows:
        writer.writerow(row)
