"""
Matching engines: sequential DFA walk, speculative parallel DFA and
parallel SFA, plus the controller that compiles a pattern once and
dispatches matches to a worker pool.
"""
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from itertools import repeat
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from models.automata import Dfa, Nfa, build_nfa, minimize_dfa, subset_construct
from models.config_manager import EngineSettings
from models.records import (
    ChunkPlan, EngineTag, MatchOutcome, PhaseTimings, ReductionMode, SpeculativeTable, WorkerBackend,
    make_chunk_plan,
)
from models.regex_ast import RegexAst
from models.regex_parser import parse_regex
from models.pattern_families import substring_pattern
from models.sfa import MappingKind, Sfa, compose, correspondence_construct, mapping_apply

logger = logging.getLogger(__name__)

Automaton = Union[Dfa, Sfa]


# ==================== Chunk scans ====================

@dataclass
class PreparedTable:
    """Per-worker copy of a transition table in the shapes the scans use"""
    rows: List[List[int]]
    columns: List[np.ndarray]
    translation: bytes
    start: int

    @classmethod
    def from_automaton(cls, class_table: np.ndarray, translation: bytes, start: int) -> 'PreparedTable':
        columns = [np.ascontiguousarray(class_table[:, c]) for c in range(class_table.shape[1])]
        return cls(class_table.tolist(), columns, translation, start)


# Installed once per worker process by the pool initializer
_WORKER_TABLE: Optional[PreparedTable] = None


def _install_table(class_table: np.ndarray, translation: bytes, start: int):
    global _WORKER_TABLE
    _WORKER_TABLE = PreparedTable.from_automaton(class_table, translation, start)


def scan_chunk(chunk: bytes, instrument: bool = False,
               prepared: Optional[PreparedTable] = None) -> Tuple[int, int]:
    """Walk one chunk from the table's start state; returns (state, lookups)"""
    table = prepared or _WORKER_TABLE
    rows = table.rows
    state = table.start
    if not instrument:
        for class_id in chunk.translate(table.translation):
            state = rows[state][class_id]
        return state, len(chunk)

    lookups = 0
    for class_id in chunk.translate(table.translation):
        state = rows[state][class_id]
        lookups += 1
    return state, lookups


def speculate_chunk(chunk: bytes, instrument: bool = False,
                    prepared: Optional[PreparedTable] = None) -> Tuple[np.ndarray, int]:
    """Run one chunk from every DFA state at once; returns (T, lookups)"""
    table = prepared or _WORKER_TABLE
    columns = table.columns
    entries = np.arange(len(table.rows), dtype=columns[0].dtype if columns else np.int32)
    lookups = 0
    for class_id in chunk.translate(table.translation):
        entries = columns[class_id][entries]
        if instrument:
            lookups += len(entries)
    return entries, lookups


class WorkerPool:
    """
    Fixed pool of workers sharing one read-only transition table.

    `serial` runs tasks in the caller, `thread` and `process` use the
    matching concurrent.futures executor. Process workers receive the
    table once through the pool initializer.
    """

    def __init__(self, automaton: Automaton, workers: int, backend: WorkerBackend = WorkerBackend.PROCESS):
        self.backend = backend
        self.workers = workers
        self.logger = logging.getLogger(__name__)
        self._executor: Optional[Executor] = None
        self._prepared: Optional[PreparedTable] = None

        if backend is WorkerBackend.PROCESS:
            self._executor = ProcessPoolExecutor(
                max_workers=workers, initializer=_install_table,
                initargs=(automaton.class_table, automaton.translation, automaton.initial))
        else:
            self._prepared = PreparedTable.from_automaton(
                automaton.class_table, automaton.translation, automaton.initial)
            if backend is WorkerBackend.THREAD:
                self._executor = ThreadPoolExecutor(max_workers=workers)
        self.logger.debug(f"Started {backend.value} pool with {workers} workers")

    def run(self, task: Callable, chunks: Sequence[bytes], instrument: bool = False) -> list:
        """Run task over the chunks, results in chunk order"""
        if self.backend is WorkerBackend.PROCESS:
            return list(self._executor.map(task, chunks, repeat(instrument)))
        bound = partial(task, prepared=self._prepared)
        if self._executor is None:
            return [bound(chunk, instrument) for chunk in chunks]
        return list(self._executor.map(bound, chunks, repeat(instrument)))

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()


# ==================== Engines ====================

def run_dfa_sequential(dfa: Dfa, data: bytes, instrument: bool = False) -> MatchOutcome:
    """Left-to-right table walk; the reference for the parallel engines"""
    start = time.perf_counter_ns()
    prepared = PreparedTable(dfa.rows, [], dfa.translation, dfa.initial)
    state, lookups = scan_chunk(bytes(data), instrument, prepared)
    elapsed = time.perf_counter_ns() - start
    return MatchOutcome(
        accepted=state in dfa.finals,
        final_states=frozenset((state,)),
        engine=EngineTag.DFA_SEQ,
        timing=PhaseTimings(elapsed, elapsed, 0),
        lookups=lookups if instrument else None,
    )


def run_dfa_speculative(dfa: Dfa, data: bytes, plan: ChunkPlan,
                        reduction: ReductionMode = ReductionMode.SEQUENTIAL,
                        pool: Optional[WorkerPool] = None, instrument: bool = False) -> MatchOutcome:
    """Every chunk tracks all DFA states; results are chained or composed"""
    start = time.perf_counter_ns()
    with _pool_or_serial(pool, dfa) as workers:
        results = workers.run(speculate_chunk, plan.slices(data), instrument)
    scanned = time.perf_counter_ns()

    tables = [SpeculativeTable(entries) for entries, _ in results]
    lookups = sum(count for _, count in results)
    if reduction is ReductionMode.SEQUENTIAL:
        state = dfa.initial
        for table in tables:
            state = int(table.entries[state])
            lookups += 1
    else:
        combined, tree_lookups = _tree_reduce(tables, lambda a, b: a.then(b), dfa.state_count)
        state = int(combined.entries[dfa.initial])
        lookups += tree_lookups + 1
    finished = time.perf_counter_ns()

    return MatchOutcome(
        accepted=state in dfa.finals,
        final_states=frozenset((state,)),
        engine=EngineTag.DFA_SPEC,
        timing=PhaseTimings(finished - start, scanned - start, finished - scanned),
        lookups=lookups if instrument else None,
    )


def run_sfa_parallel(sfa: Sfa, data: bytes, plan: ChunkPlan,
                     reduction: ReductionMode = ReductionMode.SEQUENTIAL,
                     pool: Optional[WorkerPool] = None, instrument: bool = False) -> MatchOutcome:
    """Each chunk walks the SFA from the identity mapping, then the chunk mappings are reduced"""
    start = time.perf_counter_ns()
    with _pool_or_serial(pool, sfa) as workers:
        results = workers.run(scan_chunk, plan.slices(data), instrument)
    scanned = time.perf_counter_ns()

    chunk_states = tuple(state for state, _ in results)
    lookups = sum(count for _, count in results)
    origin_initial = sorted(sfa.origin.initial)
    if reduction is ReductionMode.SEQUENTIAL:
        final_states: FrozenSet[int] = frozenset(origin_initial)
        for state in chunk_states:
            lookups += len(final_states)
            final_states = mapping_apply(sfa.mapping(state), final_states)
    else:
        mappings = [sfa.mapping(state) for state in chunk_states]
        combined, tree_lookups = _tree_reduce(mappings, compose, sfa.origin.state_count)
        final_states = mapping_apply(combined, origin_initial)
        lookups += tree_lookups + len(origin_initial)
    finished = time.perf_counter_ns()

    return MatchOutcome(
        accepted=bool(final_states & sfa.origin.finals),
        final_states=final_states,
        engine=EngineTag.SFA_PAR,
        timing=PhaseTimings(finished - start, scanned - start, finished - scanned),
        lookups=lookups if instrument else None,
        chunk_states=chunk_states,
    )


def run_nsfa_parallel(sfa: Sfa, data: bytes, plan: ChunkPlan,
                      reduction: ReductionMode = ReductionMode.SEQUENTIAL,
                      pool: Optional[WorkerPool] = None, instrument: bool = False) -> MatchOutcome:
    """Same scan and reduction over an SFA built from an NFA"""
    if sfa.kind is not MappingKind.NONDETERMINISTIC:
        raise ValueError("run_nsfa_parallel needs an SFA built from an NFA")
    return run_sfa_parallel(sfa, data, plan, reduction, pool, instrument)


def _tree_reduce(items: list, combine: Callable, domain_size: int):
    """Balanced pairwise reduction; returns (result, mapping accesses)"""
    lookups = 0
    level = list(items)
    while len(level) > 1:
        paired = []
        for i in range(0, len(level) - 1, 2):
            paired.append(combine(level[i], level[i + 1]))
            lookups += domain_size
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0], lookups


class _SerialScope:
    def __init__(self, automaton: Automaton):
        self.pool = WorkerPool(automaton, 1, WorkerBackend.SERIAL)

    def __enter__(self) -> WorkerPool:
        return self.pool

    def __exit__(self, exc_type, exc, tb):
        self.pool.close()


class _BorrowedScope:
    def __init__(self, pool: WorkerPool):
        self.pool = pool

    def __enter__(self) -> WorkerPool:
        return self.pool

    def __exit__(self, exc_type, exc, tb):
        pass


def _pool_or_serial(pool: Optional[WorkerPool], automaton: Automaton):
    return _BorrowedScope(pool) if pool is not None else _SerialScope(automaton)


# ==================== Controller ====================

@dataclass
class CompiledPattern:
    """One pattern taken through every construction stage"""
    pattern: str
    ast: RegexAst
    nfa: Nfa
    dfa: Dfa
    min_dfa: Dfa
    sfa: Optional[Sfa]
    nsfa: Optional[Sfa] = None
    nfa_build_s: float = 0.0
    dfa_build_s: float = 0.0
    min_build_s: float = 0.0
    sfa_build_s: float = 0.0

    @property
    def sfa_states_per_second(self) -> float:
        sfa = self.nsfa or self.sfa
        if sfa is None or self.sfa_build_s <= 0:
            return 0.0
        return sfa.state_count / self.sfa_build_s


class MatchEngine:
    """Compiles patterns and runs the configured engine over inputs"""

    def __init__(self, settings: Optional[EngineSettings] = None):
        self.settings = settings or EngineSettings()
        self.logger = logging.getLogger(__name__)
        # Entries keep their automaton alive so its id stays unique
        self._pools: Dict[Tuple[int, EngineTag, int], Tuple[Automaton, WorkerPool]] = {}

    def compile_pattern(self, pattern: str, ignore_case: bool = False, substring: bool = False,
                        build_sfa: bool = True, nondeterministic: bool = False) -> CompiledPattern:
        """Parse, build the NFA, determinize, minimize and build the SFA"""
        source = substring_pattern(pattern) if substring else pattern
        ast = parse_regex(source, ignore_case)

        started = time.perf_counter()
        nfa = build_nfa(ast, self.settings.max_nfa_states)
        nfa_done = time.perf_counter()
        dfa = subset_construct(nfa, self.settings.max_dfa_states)
        dfa_done = time.perf_counter()
        min_dfa = minimize_dfa(dfa)
        min_done = time.perf_counter()

        sfa = nsfa = None
        if nondeterministic:
            nsfa = correspondence_construct(nfa, self.settings.max_sfa_states)
        elif build_sfa:
            sfa = correspondence_construct(min_dfa, self.settings.max_sfa_states)
        sfa_done = time.perf_counter()

        built = nsfa or sfa
        self.logger.info(f"Compiled {pattern!r}: nfa={nfa.state_count} dfa={dfa.state_count} "
                         f"min_dfa={min_dfa.state_count} sfa={built.state_count if built else '-'}")
        return CompiledPattern(pattern, ast, nfa, dfa, min_dfa, sfa, nsfa,
                               nfa_done - started, dfa_done - nfa_done, min_done - dfa_done,
                               sfa_done - min_done)

    def match(self, compiled: CompiledPattern, data: bytes, engine: Optional[EngineTag] = None,
              threads: Optional[int] = None, reduction: Optional[ReductionMode] = None,
              plan: Optional[ChunkPlan] = None, instrument: bool = False) -> MatchOutcome:
        """Run one match with the configured or given engine parameters"""
        engine = engine or self.settings.engine
        threads = threads or self.settings.threads
        reduction = reduction or self.settings.reduction

        if engine is EngineTag.DFA_SEQ:
            return run_dfa_sequential(compiled.min_dfa, data, instrument)

        plan = plan or make_chunk_plan(len(data), threads, self.settings.chunk_size)
        if engine is EngineTag.DFA_SPEC:
            pool = self._pool(compiled.min_dfa, engine, threads)
            return run_dfa_speculative(compiled.min_dfa, data, plan, reduction, pool, instrument)

        sfa = compiled.nsfa or compiled.sfa
        if sfa is None:
            sfa = compiled.sfa = correspondence_construct(compiled.min_dfa, self.settings.max_sfa_states)
        pool = self._pool(sfa, engine, threads)
        return run_sfa_parallel(sfa, data, plan, reduction, pool, instrument)

    def _pool(self, automaton: Automaton, engine: EngineTag, threads: int) -> WorkerPool:
        key = (id(automaton), engine, threads)
        if key not in self._pools:
            self._pools[key] = (automaton, WorkerPool(automaton, threads, self.settings.backend))
        return self._pools[key][1]

    def close(self):
        """Shut down every worker pool"""
        for _, pool in self._pools.values():
            pool.close()
        self._pools.clear()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()
