import json
import logging
import re
import sys
from typing import IO, Iterable, List, Optional, Sequence

import pandas as pd

from models.errors import InputError
from models.records import (
    BENCH_COLUMNS, STATS_COLUMNS, STATS_COUNT_COLUMNS, BenchRecord, PatternEntry, SizeRecord,
)

# Rule files wrap expressions as pcre:"/expr/flags"; a leading ! negates the match
PCRE_OPTION = re.compile(r'pcre:\s*"(!?)/(.*?)/([A-Za-z]*)"')


class FileIO:
    """Reads pattern lists and writes record tables in the supported formats"""

    def __init__(self, float_format: str = '%.6g'):
        self.float_format = float_format
        self.logger = logging.getLogger(__name__)

    # ==================== Pattern lists ====================

    def load_pattern_list(self, file_path: str) -> List[PatternEntry]:
        """One pattern per line; blank lines and # comments are ignored"""
        try:
            with open(file_path, 'r', encoding='utf-8', errors='replace') as f:
                lines = f.read().splitlines()
        except OSError as e:
            raise InputError(f"cannot read pattern list {file_path}: {e}") from e

        entries = []
        for line_no, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith('#'):
                continue
            if 'pcre:' in stripped:
                entries.extend(self.extract_pcre(stripped, line_no))
            else:
                entries.append(PatternEntry(stripped, False, line_no))

        self.logger.info(f"Loaded {len(entries)} patterns from {file_path}")
        return entries

    def extract_pcre(self, rule: str, line_no: int = 0) -> List[PatternEntry]:
        """Expressions of every pcre option in a rule line"""
        entries = []
        for negated, expression, flags in PCRE_OPTION.findall(rule):
            if negated:
                self.logger.debug(f"Line {line_no}: skipping negated pcre option")
                continue
            entries.append(PatternEntry(expression, 'i' in flags, line_no))
        return entries

    # ==================== Record tables ====================

    @staticmethod
    def stats_frame(records: Iterable[SizeRecord]) -> pd.DataFrame:
        df = pd.DataFrame([r.to_row() for r in records], columns=STATS_COLUMNS)
        # Nullable integers keep large counts out of float formatting
        return df.astype({name: 'Int64' for name in STATS_COUNT_COLUMNS})

    @staticmethod
    def bench_frame(records: Iterable[BenchRecord]) -> pd.DataFrame:
        return pd.DataFrame([r.to_row() for r in records], columns=BENCH_COLUMNS)

    def write_csv(self, df: pd.DataFrame, file_path: Optional[str] = None, stream: Optional[IO] = None):
        """CSV with one header row; stdout when no path is given"""
        if file_path and file_path != '-':
            df.to_csv(file_path, index=False, float_format=self.float_format)
            self.logger.info(f"Wrote {len(df)} rows to {file_path}")
        else:
            df.to_csv(stream or sys.stdout, index=False, float_format=self.float_format)

    def save_to_xlsx(self, df: pd.DataFrame, file_path: str, sheet_name: str = 'Data'):
        """Save a table to XLSX with auto-adjusted column widths"""
        with pd.ExcelWriter(file_path, engine='openpyxl') as writer:
            df.to_excel(writer, sheet_name=sheet_name, index=False)

            worksheet = writer.sheets[sheet_name]
            for column in worksheet.columns:
                max_length = max(len(str(cell.value)) if cell.value is not None else 0 for cell in column)
                worksheet.column_dimensions[column[0].column_letter].width = min(max_length + 2, 50)
        self.logger.info(f"Wrote {len(df)} rows to {file_path}")

    def save_to_json(self, df: pd.DataFrame, file_path: str):
        data = {
            "version": 1,
            "columns": list(df.columns),
            "data": json.loads(df.to_json(orient='records')),
        }
        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2)
        self.logger.info(f"Wrote {len(df)} rows to {file_path}")

    def save(self, df: pd.DataFrame, file_path: str):
        """Pick the writer from the file extension"""
        if file_path.endswith('.xlsx'):
            self.save_to_xlsx(df, file_path)
        elif file_path.endswith('.json'):
            self.save_to_json(df, file_path)
        elif file_path.endswith('.dat'):
            self.save_to_gnuplot(df, file_path)
        else:
            self.write_csv(df, file_path)

    # ==================== gnuplot ====================

    def save_to_gnuplot(self, df: pd.DataFrame, file_path: str, columns: Optional[Sequence[str]] = None):
        """
        Whitespace-separated data file with a # header. Size tables default
        to min_dfa vs sfa, benchmark tables to threads vs throughput per engine.
        """
        if columns is None:
            if 'throughput_bps' in df.columns:
                return self._save_throughput_blocks(df, file_path)
            columns = ['min_dfa', 'sfa']
        subset = df[list(columns)].dropna()
        with open(file_path, 'w', encoding='utf-8') as f:
            f.write('# ' + ' '.join(columns) + '\n')
            subset.to_csv(f, sep=' ', header=False, index=False, float_format=self.float_format)

    def _save_throughput_blocks(self, df: pd.DataFrame, file_path: str):
        # One block per engine, separated by two blank lines (gnuplot `index`)
        with open(file_path, 'w', encoding='utf-8') as f:
            for engine, group in df.groupby('engine', sort=False):
                f.write(f'# engine {engine}\n# threads throughput_bps\n')
                summary = group.groupby('threads')['throughput_bps'].median().reset_index()
                summary.to_csv(f, sep=' ', header=False, index=False, float_format=self.float_format)
                f.write('\n\n')
