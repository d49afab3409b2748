"""
Regular-expression syntax tree over the 256-symbol byte alphabet.

Nodes are immutable and compare structurally. The smart constructors
(`concat`, `union`, `star`, `byte_class`) keep trees normalized:
Concat/Union hold at least two children, nested lists are flattened,
Empty and Epsilon are absorbed where the algebra allows it.
"""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Tuple, Union as TypingUnion

ALPHABET_SIZE = 256
ALL_BYTES = frozenset(range(ALPHABET_SIZE))


@dataclass(frozen=True)
class Empty:
    """The empty language"""

    @property
    def kind(self) -> str:
        return 'Empty'


@dataclass(frozen=True)
class Epsilon:
    """The language holding only the empty word"""

    @property
    def kind(self) -> str:
        return 'Epsilon'


@dataclass(frozen=True)
class Literal:
    value: int

    def __post_init__(self):
        if not 0 <= self.value < ALPHABET_SIZE:
            raise ValueError(f"literal byte out of range: {self.value}")

    @property
    def kind(self) -> str:
        return 'Literal'

    @property
    def members(self) -> FrozenSet[int]:
        return frozenset((self.value,))


@dataclass(frozen=True)
class Class:
    members: FrozenSet[int]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a byte class cannot be empty")
        if not self.members <= ALL_BYTES:
            raise ValueError("byte class holds values outside 0..255")

    @property
    def kind(self) -> str:
        return 'Class'


@dataclass(frozen=True)
class Concat:
    items: Tuple['RegexAst', ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("Concat needs at least two children")

    @property
    def kind(self) -> str:
        return 'Concat'


@dataclass(frozen=True)
class Union:
    items: Tuple['RegexAst', ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("Union needs at least two children")

    @property
    def kind(self) -> str:
        return 'Union'


@dataclass(frozen=True)
class Star:
    child: 'RegexAst'

    @property
    def kind(self) -> str:
        return 'Star'


@dataclass(frozen=True)
class Repeat:
    """Bounded repetition; only present in raw (unexpanded) trees"""
    child: 'RegexAst'
    min: int
    max: Optional[int] = None

    def __post_init__(self):
        if self.min < 0:
            raise ValueError("repeat minimum must be non-negative")
        if self.max is not None and (self.max < self.min or self.max < 1):
            raise ValueError(f"invalid repeat bounds {{{self.min},{self.max}}}")

    @property
    def kind(self) -> str:
        return 'Repeat'


RegexAst = TypingUnion[Empty, Epsilon, Literal, Class, Concat, Union, Star, Repeat]

EMPTY = Empty()
EPSILON = Epsilon()


def byte_class(members: Iterable[int]) -> RegexAst:
    """Build a class node; an empty set is the empty language, one byte a literal"""
    members = frozenset(members)
    if not members:
        return EMPTY
    if len(members) == 1:
        return Literal(next(iter(members)))
    return Class(members)


def concat(parts: Iterable[RegexAst]) -> RegexAst:
    flat = []
    for part in parts:
        if isinstance(part, Empty):
            return EMPTY
        if isinstance(part, Epsilon):
            continue
        if isinstance(part, Concat):
            flat.extend(part.items)
        else:
            flat.append(part)
    if not flat:
        return EPSILON
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


def union(parts: Iterable[RegexAst]) -> RegexAst:
    flat = []
    for part in parts:
        if isinstance(part, Empty):
            continue
        if isinstance(part, Union):
            flat.extend(part.items)
        else:
            flat.append(part)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return flat[0]
    return Union(tuple(flat))


def star(child: RegexAst) -> RegexAst:
    if isinstance(child, (Empty, Epsilon)):
        return EPSILON
    if isinstance(child, Star):
        return child
    return Star(child)


def optional(child: RegexAst) -> RegexAst:
    return union((child, EPSILON))


def repeat(child: RegexAst, low: int, high: Optional[int]) -> RegexAst:
    """Bounded repetition node, collapsing the degenerate bounds"""
    if high == 0:
        return EPSILON
    if low == 1 and high == 1:
        return child
    return Repeat(child, low, high)


def expand_repeats(node: RegexAst) -> RegexAst:
    """Unroll every Repeat node into plain Concat/Union/Star structure"""
    if isinstance(node, Repeat):
        child = expand_repeats(node.child)
        parts = [child] * node.min
        if node.max is None:
            parts.append(star(child))
        else:
            parts.extend([optional(child)] * (node.max - node.min))
        return concat(parts)
    if isinstance(node, Concat):
        return concat(expand_repeats(item) for item in node.items)
    if isinstance(node, Union):
        return union(expand_repeats(item) for item in node.items)
    if isinstance(node, Star):
        return star(expand_repeats(node.child))
    return node


def position_count(node: RegexAst) -> int:
    """Number of literal/class occurrences, i.e. Glushkov positions"""
    if isinstance(node, (Literal, Class)):
        return 1
    if isinstance(node, (Concat, Union)):
        return sum(position_count(item) for item in node.items)
    if isinstance(node, Star):
        return position_count(node.child)
    if isinstance(node, Repeat):
        copies = node.min + 1 if node.max is None else node.max
        return position_count(node.child) * copies
    return 0
