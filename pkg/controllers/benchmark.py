"""
Throughput benchmarks: thread sweeps per engine and the small-input
overhead sweep comparing the parallel SFA against the sequential DFA.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

from controllers.match_engine import CompiledPattern, MatchEngine
from models.errors import InputError, SfaRegexError
from models.records import BenchRecord, EngineTag, MatchOutcome
from models.word_generator import generate_accepted_word
from utils.helpers import median_int, parse_size
from utils.input_loader import load_input


@dataclass(frozen=True)
class InputSpec:
    """
    Where benchmark input comes from:
      accepted:<size>        a generated word the pattern accepts
      repeat:<text>:<size>   text repeated up to size bytes
      file:<path>            file contents
    """
    kind: str
    size: int = 0
    text: bytes = b''
    path: str = ''

    @classmethod
    def from_string(cls, spec: str) -> 'InputSpec':
        kind, _, rest = spec.partition(':')
        try:
            if kind == 'accepted':
                return cls('accepted', size=parse_size(rest))
            if kind == 'repeat':
                text, _, size = rest.rpartition(':')
                if not text:
                    raise ValueError("repeat needs non-empty text")
                return cls('repeat', size=parse_size(size), text=text.encode('utf-8'))
            if kind == 'file' and rest:
                return cls('file', path=rest)
        except ValueError as e:
            raise InputError(f"invalid input spec {spec!r}: {e}") from e
        raise InputError(f"invalid input spec {spec!r}")

    def materialize(self, compiled: CompiledPattern, seed: int = 0) -> bytes:
        if self.kind == 'accepted':
            return generate_accepted_word(compiled.min_dfa, self.size, seed)
        if self.kind == 'repeat':
            copies = -(-self.size // len(self.text))
            return (self.text * copies)[:self.size]
        return load_input(self.path)


class Benchmark:
    """Runs matches repeatedly and reports the median phase timings"""

    def __init__(self, engine: MatchEngine, repeats: int = 3, seed: int = 0):
        if repeats < 1:
            raise ValueError("repeats must be at least 1")
        self.engine = engine
        self.repeats = repeats
        self.seed = seed
        self.logger = logging.getLogger(__name__)

    def run_benchmark(self, pattern: str, input_spec: InputSpec, threads_list: Sequence[int],
                      engines: Sequence[EngineTag] = (EngineTag.SFA_PAR,),
                      compiled: Optional[CompiledPattern] = None) -> Iterator[BenchRecord]:
        """One record per (engine, threads); dfa-seq runs once with one thread"""
        compiled = compiled or self.engine.compile_pattern(pattern)
        data = input_spec.materialize(compiled, self.seed)
        self.logger.info(f"Benchmark input: {len(data)} bytes")

        reference = self.engine.match(compiled, data, EngineTag.DFA_SEQ)
        for engine in engines:
            for threads in ((1,) if engine is EngineTag.DFA_SEQ else threads_list):
                yield self.measure(compiled, data, engine, threads, reference)

    def measure(self, compiled: CompiledPattern, data: bytes, engine: EngineTag, threads: int,
                reference: Optional[MatchOutcome] = None) -> BenchRecord:
        """Warm-up run, then the median of `repeats` timed runs"""
        outcome = self.engine.match(compiled, data, engine, threads)
        if reference is not None and not agrees(compiled, outcome, reference):
            raise SfaRegexError(f"{engine.value} with {threads} threads disagrees with the sequential DFA")

        scans, reductions = [], []
        for _ in range(self.repeats):
            outcome = self.engine.match(compiled, data, engine, threads)
            scans.append(outcome.timing.scan_ns)
            reductions.append(outcome.timing.reduce_ns)

        record = BenchRecord(
            pattern=compiled.pattern,
            engine=engine,
            threads=threads,
            input_bytes=len(data),
            scan_ns=median_int(scans),
            reduce_ns=median_int(reductions),
            dfa_build_s=compiled.dfa_build_s + compiled.min_build_s,
            sfa_build_s=compiled.sfa_build_s,
            accepted=outcome.accepted,
        )
        self.logger.info(f"{engine.value} p={threads}: {record.throughput_bps / 1e6:.1f} MB/s")
        return record

    def run_overhead_sweep(self, pattern: str, sizes: Sequence[int], threads: int = 2,
                           compiled: Optional[CompiledPattern] = None) -> List[BenchRecord]:
        """dfa-seq and sfa-par records for each input size"""
        compiled = compiled or self.engine.compile_pattern(pattern)
        longest = generate_accepted_word(compiled.min_dfa, max(sizes), self.seed)
        records = []
        for size in sorted(sizes):
            data = longest[:size]
            reference = self.engine.match(compiled, data, EngineTag.DFA_SEQ)
            records.append(self.measure(compiled, data, EngineTag.DFA_SEQ, 1, reference))
            records.append(self.measure(compiled, data, EngineTag.SFA_PAR, threads, reference))
        return records


def find_crossover(records: Sequence[BenchRecord]) -> Optional[int]:
    """Smallest input size from which sfa-par stays faster than dfa-seq"""
    seq = {r.input_bytes: r.throughput_bps for r in records if r.engine is EngineTag.DFA_SEQ}
    par = {r.input_bytes: r.throughput_bps for r in records if r.engine is EngineTag.SFA_PAR}
    sizes = sorted(set(seq) & set(par))

    crossover = None
    for size in reversed(sizes):
        if par[size] <= seq[size]:
            break
        crossover = size
    return crossover


def agrees(compiled: CompiledPattern, outcome: MatchOutcome, reference: MatchOutcome) -> bool:
    """Same result as the sequential DFA reference"""
    if outcome.engine is EngineTag.SFA_PAR and compiled.nsfa is not None:
        # N-SFA final states are NFA positions, not DFA states
        return outcome.accepted == reference.accepted
    return outcome.final_states == reference.final_states
