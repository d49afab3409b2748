import os
import re
import statistics
from typing import List, Sequence

import psutil

SIZE_SUFFIXES = {'': 1, 'K': 1024, 'M': 1024 ** 2, 'G': 1024 ** 3}


def physical_cores() -> int:
    """Physical core count, falling back to logical CPUs"""
    return psutil.cpu_count(logical=False) or os.cpu_count() or 1


def parse_thread_list(text: str) -> List[int]:
    """Parse '4' or '1,2,4' or '1-4' into a list of thread counts"""
    threads = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        if '-' in part:
            low, high = (int(x) for x in part.split('-', 1))
            threads.extend(range(low, high + 1))
        else:
            threads.append(int(part))
    if not threads:
        raise ValueError(f"no thread counts in {text!r}")
    return threads


def parse_size(text: str) -> int:
    """Parse a byte count such as 4096, 600K or 64M"""
    match = re.fullmatch(r'\s*(\d+)\s*([KMG]?)i?B?\s*', text, re.IGNORECASE)
    if not match:
        raise ValueError(f"invalid size: {text!r}")
    return int(match.group(1)) * SIZE_SUFFIXES[match.group(2).upper()]


def parse_size_list(text: str) -> List[int]:
    return [parse_size(part) for part in text.split(',') if part.strip()]


def median_int(values: Sequence[int]) -> int:
    return int(statistics.median(values))
