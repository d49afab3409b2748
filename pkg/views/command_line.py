import argparse
import dataclasses
import logging
import sys
from typing import IO, List, Optional

from controllers.benchmark import Benchmark, InputSpec, find_crossover
from controllers.corpus_stats import CorpusStats, CorpusSummary
from controllers.file_io import FileIO
from controllers.match_engine import CompiledPattern, MatchEngine
from models.config_manager import ConfigManager, EngineSettings
from models.errors import InputError, InvalidThreadCount, SfaRegexError
from models.records import EngineTag, PatternEntry, RecordStatus, ReductionMode, WorkerBackend
from utils.helpers import parse_size_list, parse_thread_list
from utils.input_loader import InputLoader
from views.dot_export import DotExporter
from views.mapping_dump import dump_mappings
from views.report import outcome_line, summary_line, timing_line, verdict_line

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2


def configure_logging(verbose: bool):
    """Diagnostics go to stderr so stdout stays machine-parseable"""
    logging.basicConfig(
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(logging.DEBUG if verbose else logging.WARNING)


class CommandLineApp:
    """compile / match / stats / bench subcommands"""

    def __init__(self, stdout: Optional[IO] = None, stderr: Optional[IO] = None):
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.logger = logging.getLogger(__name__)
        self.parser = self.build_parser()

    def build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--config', default='config.ini', help="INI settings file")
        common.add_argument('--verbose', '-v', action='store_true', help="debug logging on stderr")
        common.add_argument('--pattern-file', help="read the pattern from a file instead of the command line")
        common.add_argument('--ignore-case', action='store_true', help="ASCII case-insensitive pattern")
        common.add_argument('--substring', action='store_true', help="match anywhere (wraps as .*(pattern).*)")
        common.add_argument('--nsfa', action='store_true', help="build the SFA from the NFA")
        common.add_argument('--engine', help="dfa, dfa-spec or sfa (bench takes a comma list)")
        common.add_argument('--threads', help="worker count, or a list such as 1,2,4 for bench")
        common.add_argument('--reduction', choices=['seq', 'par'])
        common.add_argument('--backend', choices=[b.value for b in WorkerBackend])
        common.add_argument('--chunk-size', type=int)
        common.add_argument('--max-nfa-states', type=int)
        common.add_argument('--max-dfa-states', type=int)
        common.add_argument('--max-sfa-states', type=int)
        common.add_argument('--seed', type=int)
        common.add_argument('--csv', help="CSV output file (default stdout)")
        common.add_argument('--xlsx', help="also write an XLSX workbook")
        common.add_argument('--json', help="also write a JSON table")
        common.add_argument('--dat', help="also write a gnuplot data file")

        parser = argparse.ArgumentParser(prog='sfaregex', description="SFA-based parallel regex matcher")
        subparsers = parser.add_subparsers(dest='command', required=True)

        compile_cmd = subparsers.add_parser('compile', parents=[common], help="build and summarize automata")
        compile_cmd.add_argument('pattern', nargs='?')
        compile_cmd.add_argument('--dot', metavar='DIR', help="write DOT graphs to DIR")
        compile_cmd.add_argument('--dump-mappings', metavar='FILE', help="write the SFA mapping table ('-' for stdout)")

        match_cmd = subparsers.add_parser('match', parents=[common], help="match input files (stdin if none)")
        match_cmd.add_argument('items', nargs='*', metavar='PATTERN [INPUT ...]')

        stats_cmd = subparsers.add_parser('stats', parents=[common], help="automaton sizes for a pattern list")
        stats_cmd.add_argument('pattern_list')
        stats_cmd.add_argument('--jobs', type=int, default=1)

        bench_cmd = subparsers.add_parser('bench', parents=[common], help="throughput benchmark")
        bench_cmd.add_argument('pattern', nargs='?')
        bench_cmd.add_argument('--input-spec', help="accepted:<size>, repeat:<text>:<size> or file:<path>")
        bench_cmd.add_argument('--repeats', type=int)
        bench_cmd.add_argument('--sizes', help="input sizes for an overhead sweep, e.g. 1K,64K,1M")
        return parser

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Parse arguments, dispatch, and map errors to exit codes"""
        args = self.parser.parse_args(argv)
        configure_logging(args.verbose)
        handlers = {
            'compile': self.cmd_compile,
            'match': self.cmd_match,
            'stats': self.cmd_stats,
            'bench': self.cmd_bench,
        }
        try:
            config = ConfigManager(args.config)
            return handlers[args.command](args, config)
        except SfaRegexError as e:
            print(f"error: {e}", file=self.stderr)
            return e.exit_code
        except ValueError as e:
            print(f"error: {e}", file=self.stderr)
            return EXIT_USAGE

    # ==================== Settings ====================

    def _settings(self, args, config: ConfigManager) -> EngineSettings:
        """Config file and environment, then command-line flags"""
        overrides = {}
        if args.engine:
            overrides['engine'] = self._engines(args.engine)[0]
        if args.threads:
            overrides['threads'] = parse_thread_list(args.threads)[0]
        if args.reduction:
            overrides['reduction'] = ReductionMode.from_string(args.reduction)
        if args.backend:
            overrides['backend'] = WorkerBackend.from_string(args.backend)
        for name in ('chunk_size', 'max_nfa_states', 'max_dfa_states', 'max_sfa_states', 'seed'):
            value = getattr(args, name)
            if value is not None:
                overrides[name] = value

        settings = dataclasses.replace(config.engine_settings(), **overrides)
        if settings.threads < 1:
            raise InvalidThreadCount(settings.threads)
        for name in ('max_nfa_states', 'max_dfa_states', 'max_sfa_states'):
            if getattr(settings, name) < 1:
                raise ValueError(f"{name.replace('_', '-')} must be at least 1")
        return settings

    @staticmethod
    def _engines(text: str) -> List[EngineTag]:
        return [EngineTag.from_string(part) for part in text.split(',') if part.strip()]

    def _pattern(self, args, pattern: Optional[str]) -> PatternEntry:
        """Exactly one pattern source: the argument or --pattern-file"""
        if args.pattern_file and pattern is not None:
            raise ValueError("give either a pattern or --pattern-file, not both")
        if args.pattern_file:
            entries = FileIO().load_pattern_list(args.pattern_file)
            if not entries:
                raise InputError(f"no pattern in {args.pattern_file}")
            entry = entries[0]
            return PatternEntry(entry.pattern, entry.ignore_case or args.ignore_case, entry.line)
        if pattern is None:
            raise ValueError("a pattern is required")
        return PatternEntry(pattern, args.ignore_case)

    def _compile(self, engine: MatchEngine, entry: PatternEntry, args) -> CompiledPattern:
        return engine.compile_pattern(entry.pattern, ignore_case=entry.ignore_case,
                                      substring=args.substring, nondeterministic=args.nsfa)

    def _write_tables(self, df, args, file_io: FileIO):
        file_io.write_csv(df, args.csv, stream=self.stdout)
        for path in (args.xlsx, args.json, args.dat):
            if path:
                file_io.save(df, path)

    # ==================== Subcommands ====================

    def cmd_compile(self, args, config: ConfigManager) -> int:
        """Print the automaton summary; optionally write DOT graphs and the mapping table"""
        entry = self._pattern(args, args.pattern)
        with MatchEngine(self._settings(args, config)) as engine:
            compiled = self._compile(engine, entry, args)

        print(summary_line(compiled), file=self.stdout)
        self.logger.info(timing_line(compiled))
        sfa = compiled.nsfa or compiled.sfa

        if args.dot:
            exporter = DotExporter()
            graphs = {
                'nfa': exporter.nfa_graph(compiled.nfa),
                'dfa': exporter.dfa_graph(compiled.dfa),
                'min_dfa': exporter.dfa_graph(compiled.min_dfa, 'min_dfa'),
                'sfa': exporter.sfa_graph(sfa),
            }
            for name, graph in graphs.items():
                if graph is not None:
                    exporter.save(graph, args.dot, name)

        if args.dump_mappings:
            table = dump_mappings(sfa)
            if args.dump_mappings == '-':
                print(table, file=self.stdout)
            else:
                with open(args.dump_mappings, 'w', encoding='utf-8') as f:
                    f.write(table + '\n')
        return EXIT_OK

    def cmd_match(self, args, config: ConfigManager) -> int:
        """accept/reject per input; exit 0 only when every input is accepted"""
        items = list(args.items)
        pattern = None if args.pattern_file else (items.pop(0) if items else None)
        entry = self._pattern(args, pattern)
        settings = self._settings(args, config)

        all_accepted = True
        with MatchEngine(settings) as engine, InputLoader() as loader:
            compiled = self._compile(engine, entry, args)
            sources = items or ['-']
            for source in sources:
                try:
                    data = sys.stdin.buffer.read() if source == '-' else loader.load(source)
                except OSError as e:
                    raise InputError(f"cannot read input {source}: {e}") from e
                outcome = engine.match(compiled, data)
                all_accepted = all_accepted and outcome.accepted
                prefix = f"{source}: " if len(sources) > 1 else ''
                print(f"{prefix}{verdict_line(outcome)}", file=self.stdout)
                print(f"{prefix}{outcome_line(outcome, len(data))}", file=self.stdout)
        return EXIT_OK if all_accepted else EXIT_REJECT

    def cmd_stats(self, args, config: ConfigManager) -> int:
        """One CSV row per pattern; summary on stderr"""
        file_io = FileIO(config.get_csv_float_format())
        entries = file_io.load_pattern_list(args.pattern_list)
        if args.ignore_case:
            entries = [dataclasses.replace(e, ignore_case=True) for e in entries]

        stats = CorpusStats(
            self._settings(args, config),
            max_dfa_states=args.max_dfa_states or config.get_corpus_max_dfa_states(),
            max_sfa_states=args.max_sfa_states or config.get_corpus_max_sfa_states(),
            jobs=args.jobs,
        )
        records = list(stats.run(entries))
        self._write_tables(file_io.stats_frame(records), args, file_io)

        summary = CorpusSummary.from_records(records)
        print(summary.describe(), file=self.stderr)
        if records and all(r.status is not RecordStatus.OK for r in records):
            return EXIT_REJECT
        return EXIT_OK

    def cmd_bench(self, args, config: ConfigManager) -> int:
        """Thread sweep, or an overhead sweep over --sizes"""
        entry = self._pattern(args, args.pattern)
        settings = self._settings(args, config)
        file_io = FileIO(config.get_csv_float_format())
        threads_list = parse_thread_list(args.threads) if args.threads else [settings.threads]
        if min(threads_list) < 1:
            raise InvalidThreadCount(min(threads_list))
        engines = self._engines(args.engine) if args.engine else [settings.engine]
        repeats = args.repeats or config.get_bench_repeats()

        with MatchEngine(settings) as engine:
            bench = Benchmark(engine, repeats, settings.seed)
            compiled = self._compile(engine, entry, args)
            if args.sizes:
                records = bench.run_overhead_sweep(entry.pattern, parse_size_list(args.sizes),
                                                   threads_list[0], compiled)
                crossover = find_crossover(records)
                print(f"crossover_bytes={crossover if crossover is not None else 'none'}", file=self.stderr)
            else:
                spec = InputSpec.from_string(args.input_spec or f"accepted:{config.get_bench_input_bytes()}")
                records = list(bench.run_benchmark(entry.pattern, spec, threads_list, engines, compiled))

        self._write_tables(file_io.bench_frame(records), args, file_io)
        return EXIT_OK
