"""
Accepted-word generation for benchmark inputs.

A word is built as prefix · cycle^k · suffix: the shortest path to the
first live state lying on a cycle, that cycle pumped k times, then the
shortest path on to a final state. Languages without a pumpable cycle
fall back to their longest word.
"""
import logging
from collections import deque
from typing import Dict, List, Optional, Tuple

import numpy as np

from models.automata import Dfa, dfa_live_mask
from models.errors import EmptyLanguage, NoLongWord


class WordGenerator:
    """Produces accepted inputs of a requested length for one DFA"""

    def __init__(self, dfa: Dfa, seed: int = 0):
        self.dfa = dfa
        self.seed = seed
        self.logger = logging.getLogger(__name__)
        self.live = dfa_live_mask(dfa)
        self.rows = dfa.rows

    def generate(self, target_len: int) -> bytes:
        """Accepted word of at least target_len bytes"""
        if not self.live[self.dfa.initial]:
            raise EmptyLanguage()

        prefixes = self._shortest_paths_from(self.dfa.initial)
        for state in prefixes:
            cycle = self._shortest_cycle(state)
            if cycle is None:
                continue
            prefix = prefixes[state]
            suffix = self._shortest_path_to_final(state)
            missing = target_len - len(prefix) - len(suffix)
            repeats = max(0, -(-missing // len(cycle)))
            self.logger.debug(f"Pumping a {len(cycle)}-byte cycle {repeats} times")
            classes = np.concatenate([
                np.asarray(prefix, dtype=np.int32),
                np.tile(np.asarray(cycle, dtype=np.int32), repeats),
                np.asarray(suffix, dtype=np.int32),
            ])
            return self._to_bytes(classes)

        longest = self._longest_word()
        if len(longest) < target_len:
            raise NoLongWord(len(longest), target_len)
        return self._to_bytes(np.asarray(longest, dtype=np.int32))

    # ==================== Graph searches over live states ====================

    def _live_successors(self, state: int):
        for class_id, target in enumerate(self.rows[state]):
            if self.live[target]:
                yield class_id, target

    def _shortest_paths_from(self, start: int) -> Dict[int, List[int]]:
        """BFS-ordered dict of live state -> class path from start"""
        paths = {start: []}
        queue = deque((start,))
        while queue:
            state = queue.popleft()
            for class_id, target in self._live_successors(state):
                if target not in paths:
                    paths[target] = paths[state] + [class_id]
                    queue.append(target)
        return paths

    def _shortest_cycle(self, state: int) -> Optional[List[int]]:
        parents: Dict[int, Tuple[int, int]] = {}
        queue = deque()
        for class_id, target in self._live_successors(state):
            if target == state:
                return [class_id]
            if target not in parents:
                parents[target] = (state, class_id)
                queue.append(target)

        while queue:
            current = queue.popleft()
            for class_id, target in self._live_successors(current):
                if target == state:
                    path = [class_id]
                    while current != state:
                        current, step = parents[current]
                        path.append(step)
                    return path[::-1]
                if target not in parents:
                    parents[target] = (current, class_id)
                    queue.append(target)
        return None

    def _shortest_path_to_final(self, start: int) -> List[int]:
        paths = self._shortest_paths_from(start)
        finals = [q for q in paths if q in self.dfa.finals]
        return paths[finals[0]]

    def _longest_word(self) -> List[int]:
        """Longest accepted class path; the live part of the graph is acyclic here"""
        reachable = list(self._shortest_paths_from(self.dfa.initial))
        indegree = dict.fromkeys(reachable, 0)
        for state in reachable:
            for _, target in self._live_successors(state):
                indegree[target] += 1

        order = []
        ready = deque(q for q in reachable if indegree[q] == 0)
        while ready:
            state = ready.popleft()
            order.append(state)
            for _, target in self._live_successors(state):
                indegree[target] -= 1
                if indegree[target] == 0:
                    ready.append(target)

        # Longest accepted tail per state, filled in reverse topological order
        length: Dict[int, int] = {}
        step: Dict[int, Tuple[int, int]] = {}
        for state in reversed(order):
            best = 0 if state in self.dfa.finals else -1
            for class_id, target in self._live_successors(state):
                if length[target] >= 0 and length[target] + 1 > best:
                    best = length[target] + 1
                    step[state] = (class_id, target)
            length[state] = best

        path = []
        state = self.dfa.initial
        for _ in range(max(length.get(state, 0), 0)):
            class_id, state = step[state]
            path.append(class_id)
        return path

    def _to_bytes(self, classes: np.ndarray) -> bytes:
        """Pick a member byte for every class occurrence"""
        rng = np.random.default_rng(self.seed)
        out = np.empty(len(classes), dtype=np.uint8)
        for class_id in np.unique(classes):
            members = np.flatnonzero(self.dfa.byte_to_class == class_id)
            where = classes == class_id
            out[where] = rng.choice(members, size=int(where.sum()))
        return out.tobytes()


def generate_accepted_word(dfa: Dfa, target_len: int, seed: int = 0) -> bytes:
    return WordGenerator(dfa, seed).generate(target_len)
