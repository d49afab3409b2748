from .helpers import parse_size, parse_thread_list, physical_cores
from .input_loader import InputLoader, load_input

__all__ = ['parse_size', 'parse_thread_list', 'physical_cores', 'InputLoader', 'load_input']
