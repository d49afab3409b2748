import io
import json

import pandas as pd
import pytest

from controllers.file_io import FileIO
from models.errors import InputError
from models.records import BenchRecord, EngineTag, PatternEntry, RecordStatus, SizeRecord
from utils.helpers import parse_size, parse_thread_list
from utils.input_loader import InputLoader, load_input


@pytest.fixture
def file_io():
    return FileIO()


@pytest.fixture
def size_records():
    return [
        SizeRecord('(ab)*', 3, 3, 2, 5, 3, 6),
        SizeRecord('big', 201, 201, 200, 1000999, 201, 1001000),
        SizeRecord('^x', status=RecordStatus.SKIPPED, reason='anchor'),
    ]


class TestPatternList:
    def test_comments_and_blank_lines_are_ignored(self, file_io, tmp_path):
        path = tmp_path / 'patterns.txt'
        path.write_text('# header\n(ab)*\n\n  a|b  \n', encoding='utf-8')
        assert file_io.load_pattern_list(str(path)) == [PatternEntry('(ab)*', False, 2), PatternEntry('a|b', False, 4)]

    def test_pcre_options_are_extracted(self, file_io, tmp_path):
        path = tmp_path / 'rules.txt'
        path.write_text(
            'alert tcp any any -> any any (msg:"x"; pcre:"/foo[0-9]+/i"; sid:1;)\n'
            'alert tcp any any -> any any (pcre:"!/bar/"; pcre:"/baz/smR"; sid:2;)\n',
            encoding='utf-8')
        assert file_io.load_pattern_list(str(path)) == [
            PatternEntry('foo[0-9]+', True, 1),
            PatternEntry('baz', False, 2),
        ]

    def test_missing_file(self, file_io, tmp_path):
        with pytest.raises(InputError) as info:
            file_io.load_pattern_list(str(tmp_path / 'missing.txt'))
        assert info.value.exit_code == 4


class TestRecordTables:
    def test_stats_csv_keeps_integer_counts(self, file_io, size_records):
        out = io.StringIO()
        file_io.write_csv(file_io.stats_frame(size_records), stream=out)
        lines = out.getvalue().splitlines()
        assert lines[0] == 'pattern,nfa,dfa,min_dfa,sfa,ratio_class,status,min_dfa_complete,sfa_complete'
        assert lines[1] == '(ab)*,3,3,2,5,cube,ok,3,6'
        assert lines[2] == 'big,201,201,200,1000999,cube,ok,201,1001000'
        assert lines[3] == '^x,,,,,,skipped(anchor),,'

    def test_bench_columns(self, file_io):
        records = [BenchRecord('(ab)*', EngineTag.SFA_PAR, 2, 1000, 1000, 10, 0.5, 0.25)]
        df = file_io.bench_frame(records)
        assert list(df.columns) == ['pattern', 'engine', 'threads', 'input_bytes', 'scan_ns', 'reduce_ns',
                                    'throughput_bps', 'dfa_build_s', 'sfa_build_s']
        assert df.loc[0, 'engine'] == 'sfa-par'
        assert df.loc[0, 'throughput_bps'] == pytest.approx(1e9)

    def test_save_by_extension(self, file_io, size_records, tmp_path):
        df = file_io.stats_frame(size_records)
        file_io.save(df, str(tmp_path / 'stats.csv'))
        file_io.save(df, str(tmp_path / 'stats.json'))
        file_io.save(df, str(tmp_path / 'stats.xlsx'))
        file_io.save(df, str(tmp_path / 'stats.dat'))

        assert len(pd.read_csv(tmp_path / 'stats.csv')) == 3
        data = json.loads((tmp_path / 'stats.json').read_text(encoding='utf-8'))
        assert data['columns'][0] == 'pattern'
        assert data['data'][0]['sfa'] == 5
        assert len(pd.read_excel(tmp_path / 'stats.xlsx')) == 3
        dat = (tmp_path / 'stats.dat').read_text(encoding='utf-8').splitlines()
        assert dat == ['# min_dfa sfa', '2 5', '200 1000999']

    def test_gnuplot_throughput_blocks(self, file_io, tmp_path):
        records = [
            BenchRecord('p', EngineTag.DFA_SEQ, 1, 1000, 1000, 0, 0.0, 0.0),
            BenchRecord('p', EngineTag.SFA_PAR, 1, 1000, 2000, 0, 0.0, 0.0),
            BenchRecord('p', EngineTag.SFA_PAR, 2, 1000, 1000, 0, 0.0, 0.0),
        ]
        path = tmp_path / 'bench.dat'
        file_io.save_to_gnuplot(file_io.bench_frame(records), str(path))
        text = path.read_text(encoding='utf-8')
        assert text.count('# engine') == 2
        assert '# engine sfa-par\n# threads throughput_bps\n1 5e+08\n2 1e+09\n' in text


class TestInputLoader:
    def test_mapped_file(self, tmp_path):
        path = tmp_path / 'input.bin'
        path.write_bytes(b'abab' * 100)
        with InputLoader() as loader:
            buffer = loader.load(str(path))
            assert len(buffer) == 400
            assert buffer[:4] == b'abab'

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'empty.bin'
        path.write_bytes(b'')
        assert load_input(str(path)) == b''

    @pytest.mark.parametrize('name', ['missing.bin', '.'])
    def test_unreadable_paths(self, tmp_path, name):
        with pytest.raises(InputError):
            load_input(str(tmp_path / name))


class TestHelpers:
    def test_thread_lists(self):
        assert parse_thread_list('4') == [4]
        assert parse_thread_list('1,2,4') == [1, 2, 4]
        assert parse_thread_list('1-3') == [1, 2, 3]
        with pytest.raises(ValueError):
            parse_thread_list(',')

    def test_sizes(self):
        assert parse_size('4096') == 4096
        assert parse_size('600K') == 600 * 1024
        assert parse_size('64MiB') == 64 * 1024 * 1024
        with pytest.raises(ValueError):
            parse_size('fast')
