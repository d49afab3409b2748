"""
Value types passed between the engines, the corpus tools and the writers.
Enums parse their command-line spellings through `from_string`.
"""
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from models.errors import InvalidThreadCount


class EngineTag(Enum):
    DFA_SEQ = 'dfa-seq'
    DFA_SPEC = 'dfa-spec'
    SFA_PAR = 'sfa-par'

    @classmethod
    def from_string(cls, tag_str: str) -> 'EngineTag':
        """Accepts the tag values and the short CLI names dfa / sfa"""
        tag_str = tag_str.lower().strip()
        aliases = {'dfa': cls.DFA_SEQ, 'sfa': cls.SFA_PAR, 'spec': cls.DFA_SPEC}
        if tag_str in aliases:
            return aliases[tag_str]
        return cls(tag_str)


class ReductionMode(Enum):
    SEQUENTIAL = 'seq'
    PARALLEL = 'par'

    @classmethod
    def from_string(cls, mode_str: str) -> 'ReductionMode':
        mode_str = mode_str.lower().strip()
        if mode_str in ('par', 'parallel', 'tree'):
            return cls.PARALLEL
        if mode_str in ('seq', 'sequential'):
            return cls.SEQUENTIAL
        raise ValueError(f"unknown reduction mode: {mode_str}")


class WorkerBackend(Enum):
    SERIAL = 'serial'
    THREAD = 'thread'
    PROCESS = 'process'

    @classmethod
    def from_string(cls, backend_str: str) -> 'WorkerBackend':
        return cls(backend_str.lower().strip())


class RatioClass(Enum):
    """Smallest power of |D| bounding |S_d|"""
    LINEAR = 'linear'
    SQUARE = 'square'
    CUBE = 'cube'
    QUARTIC = 'quartic'
    ABOVE = 'above'

    @classmethod
    def classify(cls, dfa_states: int, sfa_states: int) -> 'RatioClass':
        for power, ratio in ((1, cls.LINEAR), (2, cls.SQUARE), (3, cls.CUBE), (4, cls.QUARTIC)):
            if sfa_states <= dfa_states ** power:
                return ratio
        return cls.ABOVE


class RecordStatus(Enum):
    OK = 'ok'
    SKIPPED = 'skipped'
    CAPPED = 'capped'


# ==================== Engine values ====================

@dataclass(frozen=True)
class PhaseTimings:
    """Wall-clock nanoseconds per matching phase"""
    total_ns: int = 0
    scan_ns: int = 0
    reduce_ns: int = 0


@dataclass(frozen=True)
class MatchOutcome:
    accepted: bool
    final_states: FrozenSet[int]
    engine: EngineTag
    timing: PhaseTimings = field(default_factory=PhaseTimings)
    # Table and mapping accesses; only counted by instrumented runs
    lookups: Optional[int] = None
    # SFA state each chunk ended in, in chunk order
    chunk_states: Tuple[int, ...] = ()


@dataclass(frozen=True)
class SpeculativeTable:
    """Where one chunk sends every DFA state"""
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.size and int(self.entries.max()) >= len(self.entries):
            raise ValueError("speculative table entry out of range")

    def then(self, other: 'SpeculativeTable') -> 'SpeculativeTable':
        """This chunk followed by the other one"""
        return SpeculativeTable(other.entries[self.entries])


@dataclass(frozen=True)
class ChunkPlan:
    """Contiguous (offset, length) chunks covering the input exactly"""
    boundaries: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if not self.boundaries:
            raise ValueError("a chunk plan needs at least one chunk")
        offset = 0
        for start, length in self.boundaries:
            if start != offset or length < 0:
                raise ValueError(f"chunk ({start}, {length}) is not contiguous with offset {offset}")
            offset += length

    @property
    def thread_count(self) -> int:
        return len(self.boundaries)

    @property
    def input_len(self) -> int:
        start, length = self.boundaries[-1]
        return start + length

    def slices(self, data) -> List[bytes]:
        return [bytes(data[start:start + length]) for start, length in self.boundaries]

    @classmethod
    def from_cuts(cls, input_len: int, cuts: Sequence[int]) -> 'ChunkPlan':
        """Plan splitting at the given offsets; repeated cuts give empty chunks"""
        points = [0] + sorted(cuts) + [input_len]
        if points[1] < 0 or points[-2] > input_len:
            raise ValueError("cut outside the input")
        return cls(tuple((a, b - a) for a, b in zip(points, points[1:])))


def make_chunk_plan(input_len: int, threads: int, chunk_size: int = 0) -> ChunkPlan:
    """
    Even split into `threads` chunks, the remainder going to the leading ones.

    Short inputs get one single-byte chunk per byte, empty input one empty
    chunk. A positive chunk_size overrides the split with fixed-size chunks.
    """
    if threads < 1:
        raise InvalidThreadCount(threads)
    if input_len == 0:
        return ChunkPlan(((0, 0),))
    if chunk_size > 0:
        return ChunkPlan(tuple((start, min(chunk_size, input_len - start))
                               for start in range(0, input_len, chunk_size)))

    parts = min(threads, input_len)
    base, remainder = divmod(input_len, parts)
    boundaries = []
    offset = 0
    for i in range(parts):
        length = base + (1 if i < remainder else 0)
        boundaries.append((offset, length))
        offset += length
    return ChunkPlan(tuple(boundaries))


# ==================== Corpus values ====================

@dataclass
class SizeRecord:
    """Automaton sizes for one pattern; the plain counts exclude dead states"""
    pattern: str
    nfa_states: Optional[int] = None
    dfa_states: Optional[int] = None
    min_dfa_states: Optional[int] = None
    sfa_states: Optional[int] = None
    min_dfa_complete: Optional[int] = None
    sfa_complete: Optional[int] = None
    status: RecordStatus = RecordStatus.OK
    reason: str = ''
    dfa_build_s: float = 0.0
    sfa_build_s: float = 0.0

    @property
    def ratio_class(self) -> Optional[RatioClass]:
        if self.status is not RecordStatus.OK:
            return None
        return RatioClass.classify(self.min_dfa_states, self.sfa_states)

    @property
    def status_text(self) -> str:
        if self.reason:
            return f"{self.status.value}({self.reason})"
        return self.status.value

    def to_row(self) -> Dict[str, Any]:
        ratio = self.ratio_class
        return {
            'pattern': self.pattern,
            'nfa': self.nfa_states,
            'dfa': self.dfa_states,
            'min_dfa': self.min_dfa_states,
            'sfa': self.sfa_states,
            'ratio_class': ratio.value if ratio else '',
            'status': self.status_text,
            'min_dfa_complete': self.min_dfa_complete,
            'sfa_complete': self.sfa_complete,
        }


@dataclass
class BenchRecord:
    pattern: str
    engine: EngineTag
    threads: int
    input_bytes: int
    scan_ns: int
    reduce_ns: int
    dfa_build_s: float
    sfa_build_s: float
    accepted: bool = True

    @property
    def throughput_bps(self) -> float:
        if self.scan_ns <= 0:
            return float('inf')
        return self.input_bytes / (self.scan_ns / 1e9)

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row.pop('accepted')
        row['engine'] = self.engine.value
        row['throughput_bps'] = self.throughput_bps
        return {name: row[name] for name in BENCH_COLUMNS}


STATS_COLUMNS = ['pattern', 'nfa', 'dfa', 'min_dfa', 'sfa', 'ratio_class', 'status',
                 'min_dfa_complete', 'sfa_complete']
STATS_COUNT_COLUMNS = ['nfa', 'dfa', 'min_dfa', 'sfa', 'min_dfa_complete', 'sfa_complete']
BENCH_COLUMNS = ['pattern', 'engine', 'threads', 'input_bytes', 'scan_ns', 'reduce_ns',
                 'throughput_bps', 'dfa_build_s', 'sfa_build_s']


@dataclass(frozen=True)
class PatternEntry:
    """One pattern of a corpus list"""
    pattern: str
    ignore_case: bool = False
    line: int = 0
