"""
Finite automata over the byte alphabet: position NFA, subset construction
and Hopcroft minimization.

Every automaton stores its transitions per byte class. Bytes that no
pattern position tells apart share a class id; ids are assigned in order
of each class's smallest byte, so walking classes in id order visits
targets in the same order as walking the 256 bytes.
"""
import logging
import time
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

import numpy as np

from models.errors import CapacityExceeded
from models.regex_ast import (
    ALPHABET_SIZE, Class, Concat, Empty, Epsilon, Literal, RegexAst, Repeat, Star, Union,
    expand_repeats, position_count,
)

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 1 << 20


def compute_byte_classes(member_sets: Iterable[FrozenSet[int]]) -> Tuple[np.ndarray, int]:
    """Coarsest partition of the 256 bytes respecting every member set"""
    labels = np.zeros(ALPHABET_SIZE, dtype=np.int64)
    for members in set(member_sets):
        mask = np.zeros(ALPHABET_SIZE, dtype=np.int64)
        mask[list(members)] = 1
        _, labels = np.unique(labels * 2 + mask, return_inverse=True)
        labels = labels.reshape(-1)

    # Renumber by first occurrence so class 0 holds byte 0
    _, first_index, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first_index)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[inverse.reshape(-1)].astype(np.int32), len(order)


def narrow_state_dtype(state_count: int) -> np.dtype:
    """Smallest unsigned dtype able to hold every state id"""
    return np.min_scalar_type(max(state_count - 1, 0))


class TransitionTable:
    """Shared read access for automata holding a (state × class) table"""

    @property
    def class_count(self) -> int:
        return int(self.class_table.shape[1])

    @property
    def table(self) -> np.ndarray:
        """Dense (state × 256) view of the transition function"""
        return self.class_table[:, self.byte_to_class]

    def step(self, state: int, byte: int) -> int:
        return int(self.class_table[state, self.byte_to_class[byte]])

    @cached_property
    def translation(self) -> bytes:
        """Table for bytes.translate mapping each byte to its class id"""
        return bytes(self.byte_to_class.astype(np.uint8))

    @cached_property
    def rows(self) -> List[List[int]]:
        return self.class_table.tolist()


@dataclass(frozen=True, eq=False)
class Nfa:
    """Epsilon-free NFA; transitions[state][class] is a set of states"""
    state_count: int
    byte_to_class: np.ndarray
    transitions: Tuple[Tuple[FrozenSet[int], ...], ...]
    initial: FrozenSet[int]
    finals: FrozenSet[int]

    def __post_init__(self):
        for state_row in self.transitions:
            for targets in state_row:
                if any(t >= self.state_count for t in targets):
                    raise ValueError("transition target out of range")
        if any(q >= self.state_count for q in self.initial | self.finals):
            raise ValueError("initial or final state out of range")

    @cached_property
    def class_count(self) -> int:
        return int(self.byte_to_class.max()) + 1

    def successors(self, state: int, byte: int) -> FrozenSet[int]:
        return self.transitions[state][self.byte_to_class[byte]]

    def step_set(self, states: Iterable[int], class_id: int) -> FrozenSet[int]:
        return frozenset().union(*(self.transitions[q][class_id] for q in states))

    @property
    def is_deterministic(self) -> bool:
        return len(self.initial) == 1 and all(
            len(targets) == 1 for state_row in self.transitions for targets in state_row)


@dataclass(frozen=True, eq=False)
class Dfa(TransitionTable):
    """Complete DFA; class_table[state, class] is the target state"""
    class_table: np.ndarray
    byte_to_class: np.ndarray
    initial: int
    finals: FrozenSet[int]
    # Which NFA subset each state stands for, when built by subset construction
    subsets: Tuple[FrozenSet[int], ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.class_table.ndim != 2 or self.class_table.shape[0] == 0:
            raise ValueError("a DFA needs a non-empty (state × class) table")
        if int(self.class_table.max()) >= self.state_count or int(self.class_table.min()) < 0:
            raise ValueError("transition target out of range")
        if not 0 <= self.initial < self.state_count:
            raise ValueError("initial state out of range")

    @property
    def state_count(self) -> int:
        return int(self.class_table.shape[0])

    @cached_property
    def final_mask(self) -> np.ndarray:
        mask = np.zeros(self.state_count, dtype=bool)
        mask[list(self.finals)] = True
        return mask


# ==================== Position automaton ====================

class _PositionBuilder:
    """Computes nullable/first/last/follow over the positions of a tree"""

    def __init__(self):
        self.members: List[FrozenSet[int]] = [frozenset()]  # index 0 is the initial state
        self.follow: List[Set[int]] = [set()]

    def visit(self, node: RegexAst) -> Tuple[bool, Set[int], Set[int]]:
        if isinstance(node, Empty):
            return False, set(), set()
        if isinstance(node, Epsilon):
            return True, set(), set()
        if isinstance(node, (Literal, Class)):
            position = len(self.members)
            self.members.append(node.members)
            self.follow.append(set())
            return False, {position}, {position}
        if isinstance(node, Union):
            nullable, first, last = False, set(), set()
            for item in node.items:
                n, f, l = self.visit(item)
                nullable = nullable or n
                first |= f
                last |= l
            return nullable, first, last
        if isinstance(node, Concat):
            nullable, first, last = True, set(), set()
            for item in node.items:
                n, f, l = self.visit(item)
                for p in last:
                    self.follow[p] |= f
                if nullable:
                    first |= f
                last = (last | l) if n else set(l)
                nullable = nullable and n
            return nullable, first, last
        if isinstance(node, Star):
            _, first, last = self.visit(node.child)
            for p in last:
                self.follow[p] |= first
            return True, first, last
        raise TypeError(f"unexpected node {node!r}")


def build_nfa(ast: RegexAst, max_states: int = DEFAULT_STATE_CAP) -> Nfa:
    """Position (Glushkov) automaton with a dedicated initial state 0"""
    if any(isinstance(n, Repeat) for n in _walk(ast)):
        ast = expand_repeats(ast)
    if position_count(ast) + 1 > max_states:
        logger.error(f"NFA would need {position_count(ast) + 1} states, cap is {max_states}")
        raise CapacityExceeded("NFA", max_states)

    builder = _PositionBuilder()
    nullable, first, last = builder.visit(ast)
    builder.follow[0] = first

    byte_to_class, class_count = compute_byte_classes(builder.members[1:])
    position_classes = [frozenset(byte_to_class[list(m)].tolist()) for m in builder.members]

    transitions = []
    for state in range(len(builder.members)):
        per_class: List[Set[int]] = [set() for _ in range(class_count)]
        for target in builder.follow[state]:
            for class_id in position_classes[target]:
                per_class[class_id].add(target)
        transitions.append(tuple(frozenset(t) for t in per_class))

    finals = set(last)
    if nullable:
        finals.add(0)
    nfa = Nfa(len(builder.members), byte_to_class, tuple(transitions), frozenset((0,)), frozenset(finals))
    logger.debug(f"NFA: {nfa.state_count} states, {class_count} byte classes")
    return nfa


def _walk(node: RegexAst):
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        if isinstance(current, (Concat, Union)):
            stack.extend(current.items)
        elif isinstance(current, (Star, Repeat)):
            stack.append(current.child)


def dfa_to_nfa(dfa: Dfa) -> Nfa:
    """View a DFA as an NFA with singleton transitions"""
    transitions = tuple(
        tuple(frozenset((int(t),)) for t in row) for row in dfa.class_table)
    return Nfa(dfa.state_count, dfa.byte_to_class, transitions,
               frozenset((dfa.initial,)), frozenset(dfa.finals))


# ==================== Determinization ====================

def subset_construct(nfa: Nfa, max_states: int = DEFAULT_STATE_CAP) -> Dfa:
    """Accessible-subset DFA; the empty subset, when reached, is the sink"""
    start_time = time.perf_counter()
    start = frozenset(nfa.initial)
    index: Dict[FrozenSet[int], int] = {start: 0}
    subsets = [start]
    rows = []

    i = 0
    while i < len(subsets):
        current = subsets[i]
        row = []
        for class_id in range(nfa.class_count):
            target = nfa.step_set(current, class_id)
            target_id = index.get(target)
            if target_id is None:
                if len(subsets) >= max_states:
                    logger.error(f"Subset construction hit the cap of {max_states} states")
                    raise CapacityExceeded("DFA", max_states)
                target_id = len(subsets)
                index[target] = target_id
                subsets.append(target)
            row.append(target_id)
        rows.append(row)
        i += 1

    finals = frozenset(i for i, s in enumerate(subsets) if s & nfa.finals)
    dfa = Dfa(np.array(rows, dtype=np.int32), nfa.byte_to_class, 0, finals, tuple(subsets))
    logger.info(f"Subset construction: {dfa.state_count} states in {time.perf_counter() - start_time:.3f}s")
    return dfa


def minimize_dfa(dfa: Dfa) -> Dfa:
    """Hopcroft partition refinement, renumbered in BFS order from the initial state"""
    reachable = _bfs_order(dfa.rows, dfa.initial, dfa.class_count)
    local = {state: i for i, state in enumerate(reachable)}
    table = [[local[t] for t in dfa.rows[state]] for state in reachable]
    finals = {local[q] for q in dfa.finals if q in local}
    n = len(reachable)

    # inverse[c][t] = states reaching t on class c
    inverse: List[Dict[int, List[int]]] = [dict() for _ in range(dfa.class_count)]
    for source, row in enumerate(table):
        for class_id, target in enumerate(row):
            inverse[class_id].setdefault(target, []).append(source)

    blocks: List[Set[int]] = [b for b in (set(finals), set(range(n)) - finals) if b]
    block_of = [0] * n
    for block_id, block in enumerate(blocks):
        for q in block:
            block_of[q] = block_id

    waiting: List[int] = []
    if len(blocks) == 2:
        waiting.append(0 if len(blocks[0]) <= len(blocks[1]) else 1)
    in_waiting = set(waiting)

    while waiting:
        splitter = waiting.pop()
        in_waiting.discard(splitter)
        splitter_states = list(blocks[splitter])
        for class_id in range(dfa.class_count):
            predecessors: Dict[int, Set[int]] = {}
            for target in splitter_states:
                for source in inverse[class_id].get(target, ()):
                    predecessors.setdefault(block_of[source], set()).add(source)

            for block_id, inside in predecessors.items():
                if len(inside) == len(blocks[block_id]):
                    continue
                outside = blocks[block_id] - inside
                blocks[block_id] = inside
                new_id = len(blocks)
                blocks.append(outside)
                for q in outside:
                    block_of[q] = new_id
                if block_id in in_waiting:
                    waiting.append(new_id)
                    in_waiting.add(new_id)
                else:
                    smaller = block_id if len(inside) <= len(outside) else new_id
                    waiting.append(smaller)
                    in_waiting.add(smaller)

    block_table = [[block_of[t] for t in table[next(iter(block))]] for block in blocks]
    order = _bfs_order(block_table, block_of[0], dfa.class_count)
    renumber = {block_id: i for i, block_id in enumerate(order)}
    class_table = np.array([[renumber[t] for t in block_table[b]] for b in order], dtype=np.int32)
    min_finals = frozenset(renumber[block_of[q]] for q in finals)

    minimal = Dfa(class_table, dfa.byte_to_class, 0, min_finals)
    logger.debug(f"Minimized {dfa.state_count} -> {minimal.state_count} states")
    return minimal


def _bfs_order(rows: Sequence[Sequence[int]], start: int, class_count: int) -> List[int]:
    seen = {start}
    order = [start]
    queue = deque((start,))
    while queue:
        state = queue.popleft()
        for class_id in range(class_count):
            target = rows[state][class_id]
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
    return order


# ==================== Queries ====================

def nfa_accepts(nfa: Nfa, word: bytes) -> bool:
    """Set-of-states stepping; the reference oracle"""
    current = frozenset(nfa.initial)
    for byte in word:
        current = nfa.step_set(current, nfa.byte_to_class[byte])
        if not current:
            return False
    return bool(current & nfa.finals)


def dfa_run(dfa: Dfa, word: bytes) -> int:
    rows = dfa.rows
    state = dfa.initial
    for class_id in word.translate(dfa.translation):
        state = rows[state][class_id]
    return state


def dfa_accepts(dfa: Dfa, word: bytes) -> bool:
    return dfa_run(dfa, word) in dfa.finals


def live_mask(rows: Sequence[Sequence[int]], finals: Iterable[int], state_count: int) -> np.ndarray:
    """States from which some final state is reachable"""
    predecessors: List[List[int]] = [[] for _ in range(state_count)]
    for source, row in enumerate(rows):
        for target in set(row):
            predecessors[target].append(source)

    live = np.zeros(state_count, dtype=bool)
    queue = deque(finals)
    live[list(finals)] = True
    while queue:
        state = queue.popleft()
        for source in predecessors[state]:
            if not live[source]:
                live[source] = True
                queue.append(source)
    return live


def dfa_live_mask(dfa: Dfa) -> np.ndarray:
    return live_mask(dfa.rows, dfa.finals, dfa.state_count)


def nfa_live_mask(nfa: Nfa) -> np.ndarray:
    rows = [sorted(frozenset().union(*state_row)) for state_row in nfa.transitions]
    return live_mask(rows, nfa.finals, nfa.state_count)


def live_state_count(dfa: Dfa) -> int:
    """Size without dead states such as the sink"""
    return int(dfa_live_mask(dfa).sum())
