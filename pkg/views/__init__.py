"""
Views package for sfaregex: command line, DOT graphs and text reports
"""
from .command_line import CommandLineApp
from .dot_export import DotExporter, export_dot
from .mapping_dump import dump_mappings, mapping_frame

__all__ = [
    'CommandLineApp',
    'DotExporter',
    'export_dot',
    'dump_mappings',
    'mapping_frame',
]
