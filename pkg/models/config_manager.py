import configparser
import logging
import os
from dataclasses import dataclass

from models.errors import InputError
from models.records import EngineTag, ReductionMode, WorkerBackend
from utils.helpers import physical_cores

ENV_PREFIX = 'SFAREGEX_'
DEFAULT_CAP = 1 << 20


@dataclass(frozen=True)
class EngineSettings:
    """Snapshot of the settings the controllers read"""
    engine: EngineTag = EngineTag.SFA_PAR
    threads: int = 1
    reduction: ReductionMode = ReductionMode.SEQUENTIAL
    backend: WorkerBackend = WorkerBackend.PROCESS
    chunk_size: int = 0
    max_nfa_states: int = DEFAULT_CAP
    max_dfa_states: int = DEFAULT_CAP
    max_sfa_states: int = DEFAULT_CAP
    seed: int = 0


class ConfigManager:
    """
    INI-backed settings with SFAREGEX_<KEY> environment overrides.
    Command-line flags are applied on top by the caller.
    """

    # section -> key -> default (as written to the file)
    DEFAULTS = {
        'EngineSettings': {
            'engine': 'sfa',
            'threads': '0',  # 0 = physical cores
            'reduction': 'seq',
            'worker_backend': 'process',
            'chunk_size': '0',
        },
        'LimitSettings': {
            'max_nfa_states': str(DEFAULT_CAP),
            'max_dfa_states': str(DEFAULT_CAP),
            'max_sfa_states': str(DEFAULT_CAP),
        },
        'CorpusSettings': {
            'corpus_max_dfa_states': '1000',
            'corpus_max_sfa_states': str(DEFAULT_CAP),
        },
        'BenchSettings': {
            'bench_repeats': '3',
            'bench_input_bytes': str(64 * 1024 * 1024),
            'seed': '0',
        },
        'OutputSettings': {
            'csv_float_format': '%.6g',
        },
    }

    def __init__(self, config_file="config.ini"):
        self.config_file = config_file
        self.config = configparser.ConfigParser(interpolation=None)
        self.logger = logging.getLogger(__name__)
        self.load_config()

    def load_config(self):
        """Load configuration from file or fall back to defaults"""
        self.create_default_config()
        if self.config_file and os.path.exists(self.config_file):
            try:
                self.config.read(self.config_file, encoding='utf-8')
            except configparser.Error as e:
                raise InputError(f"cannot read config {self.config_file}: {e}") from e
            self.logger.debug(f"Loaded config from {self.config_file}")

    def create_default_config(self):
        """Populate defaults in memory"""
        for section, values in self.DEFAULTS.items():
            self.config[section] = dict(values)

    def save_config(self):
        """Save configuration to file"""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                self.config.write(f)
        except OSError as e:
            self.logger.error(f"Error saving config: {e}")

    # ==================== Raw access ====================

    def _raw(self, section: str, key: str) -> str:
        env_value = os.environ.get(ENV_PREFIX + key.upper())
        if env_value is not None:
            return env_value
        return self.config.get(section, key, fallback=self.DEFAULTS[section][key])

    def _get_int(self, section: str, key: str, minimum: int = 0) -> int:
        default = int(self.DEFAULTS[section][key])
        try:
            value = int(self._raw(section, key))
        except (ValueError, TypeError):
            self.logger.warning(f"Invalid {key} setting, using {default}")
            return default
        if value < minimum:
            self.logger.warning(f"{key} must be at least {minimum}, using {default}")
            return default
        return value

    def _set(self, section: str, key: str, value):
        if not self.config.has_section(section):
            self.config.add_section(section)
        self.config.set(section, key, str(value))
        self.save_config()

    # ==================== Engine settings ====================

    def get_engine(self) -> EngineTag:
        """Get matching engine"""
        try:
            return EngineTag.from_string(self._raw('EngineSettings', 'engine'))
        except ValueError:
            self.logger.warning("Invalid engine setting, using sfa")
            return EngineTag.SFA_PAR

    def set_engine(self, engine: EngineTag):
        self._set('EngineSettings', 'engine', engine.value)

    def get_threads(self) -> int:
        """Get worker count (0 in the file means physical cores)"""
        threads = self._get_int('EngineSettings', 'threads')
        return threads or physical_cores()

    def set_threads(self, threads: int):
        self._set('EngineSettings', 'threads', threads)

    def get_reduction(self) -> ReductionMode:
        try:
            return ReductionMode.from_string(self._raw('EngineSettings', 'reduction'))
        except ValueError:
            self.logger.warning("Invalid reduction setting, using seq")
            return ReductionMode.SEQUENTIAL

    def set_reduction(self, reduction: ReductionMode):
        self._set('EngineSettings', 'reduction', reduction.value)

    def get_worker_backend(self) -> WorkerBackend:
        try:
            return WorkerBackend.from_string(self._raw('EngineSettings', 'worker_backend'))
        except ValueError:
            self.logger.warning("Invalid worker_backend setting, using process")
            return WorkerBackend.PROCESS

    def set_worker_backend(self, backend: WorkerBackend):
        self._set('EngineSettings', 'worker_backend', backend.value)

    def get_chunk_size(self) -> int:
        return self._get_int('EngineSettings', 'chunk_size')

    def set_chunk_size(self, chunk_size: int):
        self._set('EngineSettings', 'chunk_size', chunk_size)

    # ==================== Limits ====================

    def get_max_nfa_states(self) -> int:
        return self._get_int('LimitSettings', 'max_nfa_states', minimum=1)

    def set_max_nfa_states(self, cap: int):
        self._set('LimitSettings', 'max_nfa_states', cap)

    def get_max_dfa_states(self) -> int:
        return self._get_int('LimitSettings', 'max_dfa_states', minimum=1)

    def set_max_dfa_states(self, cap: int):
        self._set('LimitSettings', 'max_dfa_states', cap)

    def get_max_sfa_states(self) -> int:
        return self._get_int('LimitSettings', 'max_sfa_states', minimum=1)

    def set_max_sfa_states(self, cap: int):
        self._set('LimitSettings', 'max_sfa_states', cap)

    def get_corpus_max_dfa_states(self) -> int:
        """Get the DFA cap of the size study (patterns above it are skipped)"""
        return self._get_int('CorpusSettings', 'corpus_max_dfa_states', minimum=1)

    def set_corpus_max_dfa_states(self, cap: int):
        self._set('CorpusSettings', 'corpus_max_dfa_states', cap)

    def get_corpus_max_sfa_states(self) -> int:
        return self._get_int('CorpusSettings', 'corpus_max_sfa_states', minimum=1)

    def set_corpus_max_sfa_states(self, cap: int):
        self._set('CorpusSettings', 'corpus_max_sfa_states', cap)

    # ==================== Benchmarks ====================

    def get_bench_repeats(self) -> int:
        return self._get_int('BenchSettings', 'bench_repeats', minimum=1)

    def set_bench_repeats(self, repeats: int):
        self._set('BenchSettings', 'bench_repeats', repeats)

    def get_bench_input_bytes(self) -> int:
        return self._get_int('BenchSettings', 'bench_input_bytes', minimum=1)

    def set_bench_input_bytes(self, size: int):
        self._set('BenchSettings', 'bench_input_bytes', size)

    def get_seed(self) -> int:
        return self._get_int('BenchSettings', 'seed')

    def set_seed(self, seed: int):
        self._set('BenchSettings', 'seed', seed)

    def get_csv_float_format(self) -> str:
        return self._raw('OutputSettings', 'csv_float_format')

    def set_csv_float_format(self, float_format: str):
        self._set('OutputSettings', 'csv_float_format', float_format)

    def engine_settings(self) -> EngineSettings:
        """Snapshot for the controllers"""
        return EngineSettings(
            engine=self.get_engine(),
            threads=self.get_threads(),
            reduction=self.get_reduction(),
            backend=self.get_worker_backend(),
            chunk_size=self.get_chunk_size(),
            max_nfa_states=self.get_max_nfa_states(),
            max_dfa_states=self.get_max_dfa_states(),
            max_sfa_states=self.get_max_sfa_states(),
            seed=self.get_seed(),
        )
