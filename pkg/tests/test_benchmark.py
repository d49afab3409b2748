import pytest

from controllers.benchmark import Benchmark, InputSpec, find_crossover
from models.automata import build_nfa, dfa_accepts, minimize_dfa, subset_construct
from models.errors import EmptyLanguage, InputError, NoLongWord
from models.pattern_families import overhead_pattern, scalability_pattern, stuck_state_pattern
from models.records import BenchRecord, EngineTag
from models.regex_parser import parse_regex
from models.word_generator import WordGenerator, generate_accepted_word


def minimal(pattern: str):
    return minimize_dfa(subset_construct(build_nfa(parse_regex(pattern))))


class TestWordGenerator:
    @pytest.mark.parametrize('pattern', [
        '(ab)*', scalability_pattern(5), overhead_pattern(), '.*(abc).*', 'x(ab)*y',
    ])
    def test_generated_word_is_accepted(self, pattern):
        dfa = minimal(pattern)
        word = generate_accepted_word(dfa, 1000, seed=1)
        assert len(word) >= 1000
        assert dfa_accepts(dfa, word)

    def test_same_seed_same_word(self):
        dfa = minimal('[a-z]*')
        assert WordGenerator(dfa, 4).generate(64) == WordGenerator(dfa, 4).generate(64)

    def test_empty_language(self):
        with pytest.raises(EmptyLanguage) as info:
            generate_accepted_word(minimal('[]'), 10)
        assert info.value.exit_code == 5

    def test_finite_language_falls_back_to_longest_word(self):
        assert generate_accepted_word(minimal('abc|de'), 3) == b'abc'
        with pytest.raises(NoLongWord) as info:
            generate_accepted_word(minimal('abc|de'), 10)
        assert info.value.longest == 3

    def test_long_finite_language(self):
        dfa = minimal('a{3000}|b')
        assert generate_accepted_word(dfa, 10) == b'a' * 3000
        with pytest.raises(NoLongWord) as info:
            generate_accepted_word(dfa, 5000)
        assert info.value.longest == 3000

    def test_longest_branch_wins(self):
        assert generate_accepted_word(minimal('x(ab|cde)y|z'), 1) == b'xcdey'


class TestInputSpec:
    def test_parse(self):
        assert InputSpec.from_string('accepted:64K') == InputSpec('accepted', size=65536)
        assert InputSpec.from_string('repeat:ab:10') == InputSpec('repeat', size=10, text=b'ab')
        assert InputSpec.from_string('file:/tmp/x') == InputSpec('file', path='/tmp/x')

    @pytest.mark.parametrize('spec', ['accepted:lots', 'repeat::10', 'file:', 'other:1'])
    def test_invalid(self, spec):
        with pytest.raises(InputError):
            InputSpec.from_string(spec)

    def test_materialize(self, engine, tmp_path):
        compiled = engine.compile_pattern('(ab)*')
        assert InputSpec.from_string('repeat:ab:5').materialize(compiled) == b'ababa'
        path = tmp_path / 'input.txt'
        path.write_bytes(b'abab')
        assert InputSpec('file', path=str(path)).materialize(compiled) == b'abab'
        accepted = InputSpec('accepted', size=100).materialize(compiled)
        assert len(accepted) >= 100


class TestBenchmark:
    def test_one_record_per_engine_and_thread_count(self, engine):
        bench = Benchmark(engine, repeats=1)
        records = list(bench.run_benchmark(scalability_pattern(5), InputSpec('accepted', size=4096), [1, 2, 4]))
        assert [r.threads for r in records] == [1, 2, 4]
        assert all(r.engine is EngineTag.SFA_PAR for r in records)
        assert all(r.accepted for r in records)
        assert all(r.throughput_bps > 0 for r in records)

    def test_sequential_dfa_runs_once(self, engine):
        bench = Benchmark(engine, repeats=1)
        records = list(bench.run_benchmark('(ab)*', InputSpec('accepted', size=512), [1, 2],
                                           [EngineTag.DFA_SEQ, EngineTag.DFA_SPEC]))
        assert [(r.engine, r.threads) for r in records] == [
            (EngineTag.DFA_SEQ, 1), (EngineTag.DFA_SPEC, 1), (EngineTag.DFA_SPEC, 2)]

    def test_stuck_state_input(self, engine):
        bench = Benchmark(engine, repeats=1)
        records = list(bench.run_benchmark(stuck_state_pattern(5), InputSpec('repeat', size=4096, text=b'a'), [2]))
        assert records[0].accepted

    def test_rejects_bad_repeats(self, engine):
        with pytest.raises(ValueError):
            Benchmark(engine, repeats=0)

    def test_empty_language_input(self, engine):
        bench = Benchmark(engine, repeats=1)
        with pytest.raises(EmptyLanguage):
            list(bench.run_benchmark('[]', InputSpec('accepted', size=16), [1]))

    def test_overhead_sweep_records(self, engine):
        bench = Benchmark(engine, repeats=1)
        records = bench.run_overhead_sweep(overhead_pattern(), [100, 1000], threads=2)
        assert [(r.engine, r.input_bytes) for r in records] == [
            (EngineTag.DFA_SEQ, 100), (EngineTag.SFA_PAR, 100),
            (EngineTag.DFA_SEQ, 1000), (EngineTag.SFA_PAR, 1000)]

    def test_nfa_built_sfa_is_checked_by_verdict(self, engine):
        compiled = engine.compile_pattern('(a|ab)(c|bcd)*', nondeterministic=True)
        bench = Benchmark(engine, repeats=1)
        records = list(bench.run_benchmark(compiled.pattern, InputSpec('accepted', size=256), [1, 3],
                                           [EngineTag.SFA_PAR, EngineTag.DFA_SPEC], compiled))
        assert [(r.engine, r.threads) for r in records] == [
            (EngineTag.SFA_PAR, 1), (EngineTag.SFA_PAR, 3), (EngineTag.DFA_SPEC, 1), (EngineTag.DFA_SPEC, 3)]
        assert all(r.accepted for r in records)


def record(engine: EngineTag, size: int, scan_ns: int) -> BenchRecord:
    return BenchRecord('p', engine, 2, size, scan_ns, 0, 0.0, 0.0)


class TestCrossover:
    def test_smallest_size_from_which_parallel_stays_faster(self):
        records = [
            record(EngineTag.DFA_SEQ, 1000, 10), record(EngineTag.SFA_PAR, 1000, 50),
            record(EngineTag.DFA_SEQ, 2000, 20), record(EngineTag.SFA_PAR, 2000, 10),
            record(EngineTag.DFA_SEQ, 3000, 30), record(EngineTag.SFA_PAR, 3000, 60),
            record(EngineTag.DFA_SEQ, 4000, 40), record(EngineTag.SFA_PAR, 4000, 20),
            record(EngineTag.DFA_SEQ, 5000, 50), record(EngineTag.SFA_PAR, 5000, 25),
        ]
        assert find_crossover(records) == 4000

    def test_no_crossover(self):
        records = [record(EngineTag.DFA_SEQ, 1000, 10), record(EngineTag.SFA_PAR, 1000, 50)]
        assert find_crossover(records) is None
