"""
DOT rendering of NFAs, DFAs and SFAs.

States are circles, final states double circles, and an invisible node
points at the initial state. Parallel edges are merged into one edge
labelled with the byte set in class syntax.
"""
import logging
import os
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

import graphviz
import numpy as np

from models.automata import Dfa, Nfa
from models.regex_ast import ALL_BYTES
from models.regex_parser import format_byte_set
from models.sfa import Sfa

DEFAULT_MAX_STATES = 2000


class DotExporter:
    """Builds graphviz.Digraph objects; writing needs no Graphviz binary"""

    def __init__(self, max_states: int = DEFAULT_MAX_STATES, hide_dead: bool = False):
        self.max_states = max_states
        self.hide_dead = hide_dead
        self.logger = logging.getLogger(__name__)

    def nfa_graph(self, nfa: Nfa, name: str = 'nfa') -> Optional[graphviz.Digraph]:
        edges = []
        for source, state_row in enumerate(nfa.transitions):
            for class_id, targets in enumerate(state_row):
                edges.extend((source, target, class_id) for target in targets)
        return self._graph(name, nfa.state_count, nfa.initial, nfa.finals, edges, nfa.byte_to_class)

    def dfa_graph(self, dfa: Dfa, name: str = 'dfa') -> Optional[graphviz.Digraph]:
        return self._graph(name, dfa.state_count, (dfa.initial,), dfa.finals,
                           self._table_edges(dfa.rows), dfa.byte_to_class)

    def sfa_graph(self, sfa: Sfa, name: str = 'sfa') -> Optional[graphviz.Digraph]:
        labels = {s: f"f{s}" for s in range(sfa.state_count)}
        return self._graph(name, sfa.state_count, (sfa.initial,), sfa.finals,
                           self._table_edges(sfa.rows), sfa.byte_to_class, labels)

    def save(self, graph: graphviz.Digraph, directory: str, name: str) -> str:
        os.makedirs(directory, exist_ok=True)
        path = graph.save(filename=f"{name}.dot", directory=directory)
        self.logger.info(f"Wrote {path}")
        return path

    # ==================== Internals ====================

    @staticmethod
    def _table_edges(rows: List[List[int]]) -> List[Tuple[int, int, int]]:
        return [(source, target, class_id)
                for source, row in enumerate(rows) for class_id, target in enumerate(row)]

    def _graph(self, name: str, state_count: int, initial: Iterable[int], finals: Iterable[int],
               edges: List[Tuple[int, int, int]], byte_to_class: np.ndarray,
               labels: Optional[Dict[int, str]] = None) -> Optional[graphviz.Digraph]:
        if state_count > self.max_states:
            self.logger.warning(f"Not rendering {name}: {state_count} states exceed {self.max_states}")
            return None

        class_members = [frozenset(np.flatnonzero(byte_to_class == c).tolist())
                         for c in range(int(byte_to_class.max()) + 1)]
        finals = set(finals)
        hidden = self._dead_states(state_count, finals, edges) if self.hide_dead else set()

        dot = graphviz.Digraph(name=name)
        dot.attr(rankdir='LR')
        dot.node('__start__', label='', shape='none', width='0', height='0')
        for state in range(state_count):
            if state in hidden:
                continue
            label = labels[state] if labels else str(state)
            dot.node(str(state), label=label, shape='doublecircle' if state in finals else 'circle')
        for state in initial:
            dot.edge('__start__', str(state))

        merged: Dict[Tuple[int, int], Set[int]] = {}
        for source, target, class_id in edges:
            if source in hidden or target in hidden:
                continue
            merged.setdefault((source, target), set()).update(class_members[class_id])
        for (source, target), members in merged.items():
            dot.edge(str(source), str(target), label=self._edge_label(members))
        return dot

    @staticmethod
    def _edge_label(members: Set[int]) -> str:
        if members == ALL_BYTES:
            return '.'
        if len(members) == 1:
            return format_byte_set(members)
        if len(members) > 128:
            return f"[^{format_byte_set(ALL_BYTES - members)}]"
        return f"[{format_byte_set(members)}]"

    @staticmethod
    def _dead_states(state_count: int, finals: Set[int], edges: List[Tuple[int, int, int]]) -> Set[int]:
        predecessors: Dict[int, Set[int]] = {}
        for source, target, _ in edges:
            predecessors.setdefault(target, set()).add(source)
        live = set(finals)
        frontier = list(finals)
        while frontier:
            state = frontier.pop()
            for source in predecessors.get(state, ()):
                if source not in live:
                    live.add(source)
                    frontier.append(source)
        return set(range(state_count)) - live


def export_dot(automaton: Union[Nfa, Dfa, Sfa], name: Optional[str] = None, hide_dead: bool = False) -> str:
    """DOT source for any automaton; empty when it is too large to render"""
    exporter = DotExporter(hide_dead=hide_dead)
    if isinstance(automaton, Sfa):
        graph = exporter.sfa_graph(automaton, name or 'sfa')
    elif isinstance(automaton, Dfa):
        graph = exporter.dfa_graph(automaton, name or 'dfa')
    else:
        graph = exporter.nfa_graph(automaton, name or 'nfa')
    return graph.source if graph is not None else ''
