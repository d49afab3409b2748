import pytest

from models.records import EngineTag, MatchOutcome, PhaseTimings
from views.dot_export import DotExporter, export_dot
from views.mapping_dump import dump_mappings, mapping_frame
from views.report import outcome_line, summary_line, timing_line, verdict_line


@pytest.fixture
def ab_star(engine):
    return engine.compile_pattern('(ab)*')


class TestSummaryLine:
    def test_ab_star(self, ab_star):
        assert summary_line(ab_star) == 'nfa=3 dfa=4 min_dfa=3 sfa=6 live_dfa=3 live_min_dfa=2 live_sfa=5'

    def test_empty_pattern(self, engine):
        line = summary_line(engine.compile_pattern(''))
        assert line.startswith('nfa=1 dfa=2 min_dfa=2 sfa=2 ')

    def test_nsfa_is_marked(self, engine):
        line = summary_line(engine.compile_pattern('(ab)*', nondeterministic=True))
        assert line.endswith(' kind=n-sfa')

    def test_timing_line(self, ab_star):
        assert timing_line(ab_star).startswith('nfa_s=')


class TestOutcomeLines:
    def test_verdict_and_timing(self):
        outcome = MatchOutcome(True, frozenset({0}), EngineTag.SFA_PAR, PhaseTimings(30, 20, 10))
        assert verdict_line(outcome) == 'accept'
        assert outcome_line(outcome, 14) == (
            'engine=sfa-par input_bytes=14 total_ns=30 scan_ns=20 reduce_ns=10 final_states=0')

    def test_reject(self):
        outcome = MatchOutcome(False, frozenset({1, 2}), EngineTag.DFA_SEQ)
        assert verdict_line(outcome) == 'reject'
        assert outcome_line(outcome, 0).endswith('final_states=1,2')


class TestMappingDump:
    def test_one_column_per_state(self, ab_star):
        df = mapping_frame(ab_star.sfa)
        assert list(df.columns) == ['f0', 'f1', 'f2', 'f3', 'f4', 'f5']
        assert list(df.index) == ['0', '1', '2', 'final']
        assert df['f2'].tolist() == ['{2}', '{1}', '{1}', 'no']
        assert df.loc['final', 'f4'] == 'yes'

    def test_truncated_dump(self, ab_star):
        text = dump_mappings(ab_star.sfa, max_states=2)
        assert 'f1' in text
        assert 'f2' not in text

    def test_relation_mappings(self, engine):
        compiled = engine.compile_pattern('a|ab', nondeterministic=True)
        df = mapping_frame(compiled.nsfa)
        assert df.loc['0', 'f0'] == '{0}'


class TestDotExport:
    def test_dfa_graph(self, ab_star):
        graph = DotExporter().dfa_graph(ab_star.min_dfa)
        source = graph.source
        assert '__start__ -> 0' in source
        assert '0 [label=0 shape=doublecircle]' in source
        assert '2 -> 0 [label=b]' in source

    def test_sfa_graph_labels(self, ab_star):
        source = DotExporter().sfa_graph(ab_star.sfa).source
        assert '4 [label=f4 shape=doublecircle]' in source
        assert '2 -> 4 [label=b]' in source

    def test_hide_dead_states(self, ab_star):
        source = DotExporter(hide_dead=True).dfa_graph(ab_star.min_dfa).source
        assert '1 [' not in source

    def test_nfa_graph(self, ab_star):
        source = DotExporter().nfa_graph(ab_star.nfa).source
        assert '0 -> 1 [label=a]' in source
        assert '1 -> 2 [label=b]' in source

    def test_large_automata_are_skipped(self, ab_star):
        assert DotExporter(max_states=2).dfa_graph(ab_star.min_dfa) is None

    def test_save(self, ab_star, tmp_path):
        exporter = DotExporter()
        path = exporter.save(exporter.sfa_graph(ab_star.sfa), str(tmp_path / 'dot'), 'sfa')
        assert path.endswith('sfa.dot')
        assert (tmp_path / 'dot' / 'sfa.dot').read_text(encoding='utf-8').startswith('digraph sfa')

    def test_negated_edge_label(self, ab_star):
        source = DotExporter().dfa_graph(ab_star.min_dfa).source
        # Every byte but a leads from the start state to the sink
        assert '0 -> 1 [label="[^a]"]' in source

    def test_export_dot_dispatches_on_type(self, ab_star):
        assert export_dot(ab_star.sfa).startswith('digraph sfa')
        assert export_dot(ab_star.min_dfa, 'min_dfa').startswith('digraph min_dfa')
        assert export_dot(ab_star.nfa).startswith('digraph nfa')
        assert '1 [' not in export_dot(ab_star.min_dfa, hide_dead=True)
