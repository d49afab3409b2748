import logging
import mmap
import os
from typing import Union

from models.errors import InputError

InputBuffer = Union[bytes, mmap.mmap]


class InputLoader:
    """Opens match inputs as in-memory buffers; regular files are memory-mapped"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self._open = []

    def load(self, file_path: str) -> InputBuffer:
        """Map a file read-only, or read it whole when mapping is not possible"""
        if not self._validate_path(file_path):
            raise InputError(f"cannot read input file: {file_path}")

        try:
            with open(file_path, 'rb') as f:
                if os.fstat(f.fileno()).st_size == 0:
                    return b''
                try:
                    buffer = mmap.mmap(f.fileno(), 0, access=mmap.ACCESS_READ)
                except (ValueError, OSError):
                    # Pipes and special files cannot be mapped
                    return f.read()
        except OSError as e:
            raise InputError(f"cannot read input file {file_path}: {e}") from e

        self._open.append(buffer)
        self.logger.debug(f"Mapped {len(buffer)} bytes from {file_path}")
        return buffer

    def _validate_path(self, file_path: str) -> bool:
        if not file_path:
            self.logger.error("Input path cannot be empty")
            return False
        if not os.path.exists(file_path):
            self.logger.error(f"Input file does not exist: {file_path}")
            return False
        if os.path.isdir(file_path):
            self.logger.error(f"Input path is a directory: {file_path}")
            return False
        return True

    def close(self):
        for buffer in self._open:
            buffer.close()
        self._open.clear()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()


def load_input(file_path: str) -> bytes:
    """Convenience function returning the file contents as bytes"""
    with InputLoader() as loader:
        return bytes(loader.load(file_path))
