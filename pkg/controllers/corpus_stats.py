"""Automaton-size study over a list of patterns"""
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional

from models.automata import build_nfa, live_state_count, minimize_dfa, subset_construct
from models.config_manager import EngineSettings
from models.errors import CapacityExceeded, RegexSyntaxError, SfaRegexError, UnsupportedFeature
from models.records import PatternEntry, RatioClass, RecordStatus, SizeRecord
from models.regex_parser import parse_regex
from models.sfa import correspondence_construct

LARGE_SFA_STATES = 10000


@dataclass
class CorpusSummary:
    """Aggregate view of a size study"""
    total: int = 0
    ok: int = 0
    skipped: int = 0
    capped: int = 0
    over_square: int = 0
    over_cube: int = 0
    over_large: int = 0
    ratio_counts: Dict[RatioClass, int] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Iterable[SizeRecord]) -> 'CorpusSummary':
        summary = cls()
        ratios = Counter()
        for record in records:
            summary.total += 1
            if record.status is RecordStatus.SKIPPED:
                summary.skipped += 1
                continue
            if record.status is RecordStatus.CAPPED:
                summary.capped += 1
                continue
            summary.ok += 1
            d, s = record.min_dfa_states, record.sfa_states
            summary.over_square += s > d ** 2
            summary.over_cube += s > d ** 3
            summary.over_large += s > LARGE_SFA_STATES
            ratios[record.ratio_class] += 1
        summary.ratio_counts = {ratio: ratios.get(ratio, 0) for ratio in RatioClass}
        return summary

    def _fraction(self, count: int) -> float:
        return count / self.ok if self.ok else 0.0

    @property
    def fraction_over_square(self) -> float:
        return self._fraction(self.over_square)

    @property
    def fraction_over_cube(self) -> float:
        return self._fraction(self.over_cube)

    @property
    def fraction_over_large(self) -> float:
        return self._fraction(self.over_large)

    def describe(self) -> str:
        ratios = ' '.join(f"{ratio.value}={count}" for ratio, count in self.ratio_counts.items())
        return (f"patterns={self.total} ok={self.ok} skipped={self.skipped} capped={self.capped} "
                f"over_square={self.over_square} ({self.fraction_over_square:.2%}) "
                f"over_cube={self.over_cube} ({self.fraction_over_cube:.2%}) "
                f"sfa_over_{LARGE_SFA_STATES}={self.over_large} ({self.fraction_over_large:.2%}) {ratios}")


class CorpusStats:
    """Builds every automaton for each pattern and records the sizes"""

    def __init__(self, settings: Optional[EngineSettings] = None, max_dfa_states: int = 1000,
                 max_sfa_states: int = 1 << 20, jobs: int = 1):
        self.settings = settings or EngineSettings()
        self.max_dfa_states = max_dfa_states
        self.max_sfa_states = max_sfa_states
        self.jobs = jobs
        self.logger = logging.getLogger(__name__)

    def run(self, entries: Iterable[PatternEntry]) -> Iterator[SizeRecord]:
        """One record per pattern, in input order"""
        if self.jobs <= 1:
            for entry in entries:
                yield self.measure(entry)
            return

        with ProcessPoolExecutor(max_workers=self.jobs) as executor:
            yield from executor.map(self.measure, list(entries), chunksize=4)

    def measure(self, entry: PatternEntry) -> SizeRecord:
        """Sizes for one pattern; failures become skipped or capped records"""
        record = SizeRecord(entry.pattern)
        try:
            ast = parse_regex(entry.pattern, entry.ignore_case)
            nfa = build_nfa(ast, self.settings.max_nfa_states)
            record.nfa_states = nfa.state_count

            started = time.perf_counter()
            dfa = subset_construct(nfa, self.settings.max_dfa_states)
            min_dfa = minimize_dfa(dfa)
            record.dfa_build_s = time.perf_counter() - started
            record.dfa_states = live_state_count(dfa)
            record.min_dfa_states = live_state_count(min_dfa)
            record.min_dfa_complete = min_dfa.state_count

            if record.min_dfa_states > self.max_dfa_states:
                return self._capped(record, f"min DFA has {record.min_dfa_states} states > {self.max_dfa_states}")

            started = time.perf_counter()
            sfa = correspondence_construct(min_dfa, self.max_sfa_states)
            record.sfa_build_s = time.perf_counter() - started
            record.sfa_states = sfa.live_state_count
            record.sfa_complete = sfa.state_count
        except (UnsupportedFeature, RegexSyntaxError) as e:
            record.status = RecordStatus.SKIPPED
            record.reason = str(e)
            self.logger.warning(f"Line {entry.line}: skipped {entry.pattern!r}: {e}")
        except CapacityExceeded as e:
            return self._capped(record, f"{e.stage} > {e.limit}")
        except (SfaRegexError, ValueError, RecursionError) as e:
            record.status = RecordStatus.SKIPPED
            record.reason = f"error: {e}"
            self.logger.warning(f"Line {entry.line}: failed on {entry.pattern!r}: {e}")
        return record

    def _capped(self, record: SizeRecord, reason: str) -> SizeRecord:
        record.status = RecordStatus.CAPPED
        record.reason = reason
        self.logger.warning(f"Capped {record.pattern!r}: {reason}")
        return record


def corpus_stats(entries: Iterable[PatternEntry], max_dfa_states: int = 1000,
                 max_sfa_states: int = 1 << 20, settings: Optional[EngineSettings] = None,
                 jobs: int = 1) -> List[SizeRecord]:
    """Convenience function for one-shot size studies"""
    return list(CorpusStats(settings, max_dfa_states, max_sfa_states, jobs).run(entries))
