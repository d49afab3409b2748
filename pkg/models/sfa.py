"""
Simultaneous finite automata.

An SFA state is a mapping from the states of a source automaton to sets
of its states. Built from a DFA every image is a single state and the
mapping is stored as an id vector (D-SFA); built from an NFA it is a
boolean matrix whose row q is the set q maps to (N-SFA).

Mappings compose left to right: compose(f, g) applies f first, then g.
"""
import logging
import time
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Union

import numpy as np

from models.automata import (
    DEFAULT_STATE_CAP, Dfa, Nfa, TransitionTable, dfa_live_mask, dfa_to_nfa, narrow_state_dtype,
    nfa_live_mask,
)
from models.errors import CapacityExceeded, DomainMismatch

logger = logging.getLogger(__name__)


class MappingKind(Enum):
    DETERMINISTIC = 'd'
    NONDETERMINISTIC = 'n'


class StateMapping:
    """One SFA state: a vector of state ids or a boolean relation matrix"""

    def __init__(self, image: np.ndarray):
        if image.ndim == 1:
            self.kind = MappingKind.DETERMINISTIC
            if image.size and int(image.max()) >= image.shape[0]:
                raise ValueError("mapping image entry out of range")
        elif image.ndim == 2 and image.shape[0] == image.shape[1]:
            self.kind = MappingKind.NONDETERMINISTIC
            image = image.astype(bool, copy=False)
        else:
            raise ValueError(f"mapping image must be a vector or a square matrix, got shape {image.shape}")
        self.image = image

    @property
    def domain_size(self) -> int:
        return int(self.image.shape[0])

    @cached_property
    def canonical(self) -> bytes:
        """Byte encoding equal for equal mappings"""
        if self.kind is MappingKind.DETERMINISTIC:
            return self.image.astype(np.int64).tobytes()
        return np.packbits(self.image).tobytes()

    def targets(self, state: int) -> FrozenSet[int]:
        if self.kind is MappingKind.DETERMINISTIC:
            return frozenset((int(self.image[state]),))
        return frozenset(np.flatnonzero(self.image[state]).tolist())

    def __eq__(self, other):
        if not isinstance(other, StateMapping):
            return NotImplemented
        return (self.kind is other.kind and self.domain_size == other.domain_size
                and self.canonical == other.canonical)

    def __hash__(self):
        return hash((self.kind, self.domain_size, self.canonical))

    def __repr__(self):
        pairs = ', '.join(f"{q}->{sorted(self.targets(q))}" for q in range(self.domain_size))
        return f"StateMapping({pairs})"


def identity_mapping(domain_size: int, kind: MappingKind = MappingKind.DETERMINISTIC) -> StateMapping:
    if kind is MappingKind.DETERMINISTIC:
        return StateMapping(np.arange(domain_size, dtype=narrow_state_dtype(domain_size)))
    return StateMapping(np.eye(domain_size, dtype=bool))


def compose(f: StateMapping, g: StateMapping) -> StateMapping:
    """f • g: apply f, then g"""
    if f.domain_size != g.domain_size:
        raise DomainMismatch(f.domain_size, g.domain_size)
    if f.kind is not g.kind:
        raise ValueError("cannot compose a D-SFA mapping with an N-SFA mapping")
    if f.kind is MappingKind.DETERMINISTIC:
        return StateMapping(g.image[f.image])
    product = f.image.astype(np.uint32) @ g.image.astype(np.uint32)
    return StateMapping(product > 0)


def mapping_apply(f: StateMapping, states: Iterable[int]) -> FrozenSet[int]:
    """Union of f(q) over the given states"""
    states = list(states)
    if not states:
        return frozenset()
    if f.kind is MappingKind.DETERMINISTIC:
        return frozenset(f.image[states].tolist())
    return frozenset(np.flatnonzero(f.image[states].any(axis=0)).tolist())


@dataclass(frozen=True)
class SfaOrigin:
    """What acceptance needs to know about the source automaton"""
    state_count: int
    initial: FrozenSet[int]
    finals: FrozenSet[int]


@dataclass(frozen=True, eq=False)
class Sfa(TransitionTable):
    """
    Deterministic automaton over state mappings.

    mappings[s] is the image of SFA state s: shape (n,) for a D-SFA,
    (n, n) boolean for an N-SFA. State 0 is the identity mapping.
    """
    mappings: np.ndarray
    class_table: np.ndarray
    byte_to_class: np.ndarray
    finals: FrozenSet[int]
    origin: SfaOrigin
    kind: MappingKind = MappingKind.DETERMINISTIC
    initial: int = 0
    # Mappings sending at least one state somewhere a final state is still reachable
    live_state_count: int = -1

    @property
    def state_count(self) -> int:
        return int(self.class_table.shape[0])

    def mapping(self, state: int) -> StateMapping:
        return StateMapping(self.mappings[state])


def sfa_accept_state(sfa: Sfa, state: int) -> bool:
    return state in sfa.finals


def correspondence_construct(automaton: Union[Dfa, Nfa], max_states: int = DEFAULT_STATE_CAP,
                             nondeterministic: bool = False) -> Sfa:
    """
    Build the reachable SFA from the identity mapping, breadth first.

    A Dfa yields a D-SFA unless `nondeterministic` is set; an Nfa always
    yields an N-SFA. Raises CapacityExceeded once more than `max_states`
    mappings are discovered.
    """
    if isinstance(automaton, Nfa):
        return _construct_nsfa(automaton, max_states)
    if nondeterministic:
        return _construct_nsfa(dfa_to_nfa(automaton), max_states)
    return _construct_dsfa(automaton, max_states)


def _construct_dsfa(dfa: Dfa, max_states: int) -> Sfa:
    start_time = time.perf_counter()
    n = dfa.state_count
    dtype = narrow_state_dtype(n)
    columns = [np.ascontiguousarray(dfa.class_table[:, c]).astype(dtype) for c in range(dfa.class_count)]

    # Insertion order of the index is the SFA state numbering
    identity = np.arange(n, dtype=dtype)
    index: Dict[bytes, int] = {identity.tobytes(): 0}
    keys: List[bytes] = [identity.tobytes()]
    rows = []

    i = 0
    while i < len(keys):
        current = np.frombuffer(keys[i], dtype=dtype)
        row = []
        for column in columns:
            nxt = column[current]
            key = nxt.tobytes()
            target = index.get(key)
            if target is None:
                if len(keys) >= max_states:
                    logger.error(f"D-SFA construction hit the cap of {max_states} states")
                    raise CapacityExceeded("SFA", max_states)
                target = len(keys)
                index[key] = target
                keys.append(key)
            row.append(target)
        rows.append(row)
        i += 1

    mappings = np.frombuffer(b''.join(keys), dtype=dtype).reshape(len(keys), n)
    finals = frozenset(np.flatnonzero(dfa.final_mask[mappings[:, dfa.initial]]).tolist())
    live = dfa_live_mask(dfa)
    live_count = int(live[mappings].any(axis=1).sum())

    sfa = Sfa(mappings, np.array(rows, dtype=np.int32), dfa.byte_to_class, finals,
              SfaOrigin(n, frozenset((dfa.initial,)), frozenset(dfa.finals)),
              MappingKind.DETERMINISTIC, 0, live_count)
    _log_throughput("D-SFA", sfa.state_count, time.perf_counter() - start_time)
    return sfa


def _construct_nsfa(nfa: Nfa, max_states: int) -> Sfa:
    start_time = time.perf_counter()
    n = nfa.state_count
    relations = []
    for class_id in range(nfa.class_count):
        relation = np.zeros((n, n), dtype=np.uint32)
        for q in range(n):
            relation[q, list(nfa.transitions[q][class_id])] = 1
        relations.append(relation)

    identity = np.eye(n, dtype=bool)
    index: Dict[bytes, int] = {np.packbits(identity).tobytes(): 0}
    images = [identity]
    rows = []

    i = 0
    while i < len(images):
        current = images[i].astype(np.uint32)
        row = []
        for relation in relations:
            nxt = (current @ relation) > 0
            key = np.packbits(nxt).tobytes()
            target = index.get(key)
            if target is None:
                if len(images) >= max_states:
                    logger.error(f"N-SFA construction hit the cap of {max_states} states")
                    raise CapacityExceeded("SFA", max_states)
                target = len(images)
                index[key] = target
                images.append(nxt)
            row.append(target)
        rows.append(row)
        i += 1

    mappings = np.stack(images)
    initial = sorted(nfa.initial)
    final_columns = sorted(nfa.finals)
    accepts = mappings[:, initial][:, :, final_columns].any(axis=(1, 2))
    finals = frozenset(np.flatnonzero(accepts).tolist())
    live = nfa_live_mask(nfa)
    live_count = int(mappings[:, :, live].any(axis=(1, 2)).sum())

    sfa = Sfa(mappings, np.array(rows, dtype=np.int32), nfa.byte_to_class, finals,
              SfaOrigin(n, frozenset(nfa.initial), frozenset(nfa.finals)),
              MappingKind.NONDETERMINISTIC, 0, live_count)
    _log_throughput("N-SFA", sfa.state_count, time.perf_counter() - start_time)
    return sfa


def _log_throughput(label: str, states: int, elapsed: float):
    rate = states / elapsed if elapsed > 0 else float('inf')
    logger.info(f"{label} construction: {states} states in {elapsed:.3f}s ({rate:,.0f} states/s)")


def sfa_accepts(sfa: Sfa, word: bytes) -> bool:
    rows = sfa.rows
    state = sfa.initial
    for class_id in word.translate(sfa.translation):
        state = rows[state][class_id]
    return state in sfa.finals
