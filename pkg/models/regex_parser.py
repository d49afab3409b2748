import logging
import string
from typing import FrozenSet, Optional, Set, Tuple

from models.errors import RegexSyntaxError, UnsupportedFeature
from models.regex_ast import (
    ALL_BYTES, Class, Concat, Empty, Epsilon, Literal, RegexAst, Repeat, Star, Union,
    byte_class, concat, expand_repeats, optional, repeat, star, union,
)

logger = logging.getLogger(__name__)

DIGIT_BYTES = frozenset(ord(c) for c in string.digits)
WORD_BYTES = frozenset(ord(c) for c in string.ascii_letters + string.digits + '_')
SPACE_BYTES = frozenset(ord(c) for c in ' \t\n\r\f\v')

SIMPLE_ESCAPES = {'n': 0x0a, 'r': 0x0d, 't': 0x09, 'f': 0x0c, 'v': 0x0b, '0': 0x00}
SHORTHAND_CLASSES = {'d': DIGIT_BYTES, 'w': WORD_BYTES, 's': SPACE_BYTES}
ASSERTION_ESCAPES = 'bBAZzG'
LOOK_AROUND = ('?=', '?!', '?<=', '?<!')


class RegexParser:
    """
    Recursive-descent parser for a POSIX-ERE-like syntax over bytes.

    Supported: literals, `.`, bracket classes with ranges and `^`
    negation, `|`, `*`, `+`, `?`, `{n}`, `{n,}`, `{n,m}`, `(...)` and
    `(?:...)` groups, and backslash escapes. `parse()` returns the raw
    tree (bounded repeats kept as Repeat nodes).
    """

    def __init__(self, pattern: str, ignore_case: bool = False):
        self.pattern = pattern
        self.ignore_case = ignore_case
        self.pos = 0

    def parse(self) -> RegexAst:
        """Parse the whole pattern"""
        node = self._parse_alternation()
        if self.pos < len(self.pattern):
            # Only a stray ')' can stop the top-level alternation early
            raise RegexSyntaxError(self.pos, "unbalanced ')'")
        return node

    # ==================== Grammar ====================

    def _peek(self) -> Optional[str]:
        if self.pos < len(self.pattern):
            return self.pattern[self.pos]
        return None

    def _parse_alternation(self) -> RegexAst:
        branches = [self._parse_concat()]
        while self._peek() == '|':
            self.pos += 1
            branches.append(self._parse_concat())
        return union(branches)

    def _parse_concat(self) -> RegexAst:
        parts = []
        while self._peek() is not None and self._peek() not in '|)':
            parts.append(self._parse_repeat())
        return concat(parts)

    def _parse_repeat(self) -> RegexAst:
        if self._peek() in ('*', '+', '?', '{'):
            raise RegexSyntaxError(self.pos, f"quantifier '{self._peek()}' has nothing to repeat")

        node = self._parse_atom()
        while True:
            ch = self._peek()
            if ch == '*':
                self.pos += 1
                node = star(node)
            elif ch == '+':
                self.pos += 1
                node = concat((node, star(node)))
            elif ch == '?':
                self.pos += 1
                node = optional(node)
            elif ch == '{':
                low, high = self._parse_bounds()
                node = repeat(node, low, high)
            else:
                return node

    def _parse_bounds(self) -> Tuple[int, Optional[int]]:
        open_pos = self.pos
        self.pos += 1
        low = self._parse_int()
        if low is None:
            raise RegexSyntaxError(open_pos, "malformed repetition bound")

        high: Optional[int] = low
        if self._peek() == ',':
            self.pos += 1
            high = self._parse_int()

        if self._peek() != '}':
            raise RegexSyntaxError(open_pos, "unterminated repetition bound")
        self.pos += 1

        if high is not None and low > high:
            raise RegexSyntaxError(open_pos, f"repetition bound {{{low},{high}}} has min greater than max")
        return low, high

    def _parse_int(self) -> Optional[int]:
        start = self.pos
        while self._peek() is not None and self._peek().isdigit():
            self.pos += 1
        if start == self.pos:
            return None
        return int(self.pattern[start:self.pos])

    def _parse_atom(self) -> RegexAst:
        ch = self.pattern[self.pos]
        if ch == '(':
            return self._parse_group()
        if ch == '[':
            return self._parse_class()
        if ch == '.':
            self.pos += 1
            return byte_class(ALL_BYTES)
        if ch == '\\':
            return self._members_node(self._read_escape())
        if ch in '^$':
            raise UnsupportedFeature(f"anchor '{ch}'", self.pos)

        self.pos += 1
        if ord(ch) < 128:
            return self._members_node({ord(ch)})
        # Characters beyond ASCII stand for their UTF-8 byte sequence
        return concat(Literal(b) for b in ch.encode('utf-8'))

    def _parse_group(self) -> RegexAst:
        open_pos = self.pos
        self.pos += 1
        if self.pattern.startswith('?', self.pos):
            if self.pattern.startswith('?:', self.pos):
                self.pos += 2
            elif self.pattern.startswith(LOOK_AROUND, self.pos):
                raise UnsupportedFeature("look-around assertion", open_pos)
            else:
                raise UnsupportedFeature("group extension '(?'", open_pos)

        node = self._parse_alternation()
        if self._peek() != ')':
            raise RegexSyntaxError(open_pos, "unbalanced '('")
        self.pos += 1
        return node

    def _parse_class(self) -> RegexAst:
        open_pos = self.pos
        self.pos += 1
        negate = False
        if self._peek() == '^':
            negate = True
            self.pos += 1

        members: Set[int] = set()
        while True:
            ch = self._peek()
            if ch is None:
                raise RegexSyntaxError(open_pos, "unterminated character class")
            if ch == ']':
                self.pos += 1
                break

            low_pos = self.pos
            low = self._class_item()
            is_range = (self._peek() == '-' and self.pos + 1 < len(self.pattern)
                        and self.pattern[self.pos + 1] != ']')
            if not is_range:
                members.update(low)
                continue

            self.pos += 1
            high = self._class_item()
            if len(low) != 1 or len(high) != 1:
                raise RegexSyntaxError(low_pos, "class shorthand cannot bound a range")
            (first,), (last,) = low, high
            if first > last:
                raise RegexSyntaxError(low_pos, f"bad range {chr(first)!r}-{chr(last)!r}")
            members.update(range(first, last + 1))

        if self.ignore_case:
            members = set(fold_case(members))
        if negate:
            members = set(ALL_BYTES - members)
        return byte_class(members)

    def _class_item(self) -> FrozenSet[int]:
        ch = self.pattern[self.pos]
        if ch == '\\':
            return self._read_escape()
        if ord(ch) >= 128:
            raise RegexSyntaxError(self.pos, "non-byte character inside a class")
        self.pos += 1
        return frozenset((ord(ch),))

    def _read_escape(self) -> FrozenSet[int]:
        """Consume a backslash escape and return the bytes it denotes"""
        esc_pos = self.pos
        self.pos += 1
        if self.pos >= len(self.pattern):
            raise RegexSyntaxError(esc_pos, "trailing backslash")

        ch = self.pattern[self.pos]
        self.pos += 1
        if ch in SIMPLE_ESCAPES:
            return frozenset((SIMPLE_ESCAPES[ch],))
        if ch == 'x':
            digits = self.pattern[self.pos:self.pos + 2]
            if len(digits) != 2 or any(d not in string.hexdigits for d in digits):
                raise RegexSyntaxError(esc_pos, "malformed \\x escape")
            self.pos += 2
            return frozenset((int(digits, 16),))
        if ch.lower() in SHORTHAND_CLASSES:
            members = SHORTHAND_CLASSES[ch.lower()]
            return members if ch.islower() else ALL_BYTES - members
        if ch in '123456789':
            raise UnsupportedFeature("back-reference", esc_pos)
        if ch in ASSERTION_ESCAPES:
            raise UnsupportedFeature(f"assertion \\{ch}", esc_pos)
        if ch.isalnum():
            raise RegexSyntaxError(esc_pos, f"unknown escape \\{ch}")
        if ord(ch) >= 128:
            raise RegexSyntaxError(esc_pos, "escaped non-byte character")
        return frozenset((ord(ch),))

    def _members_node(self, members) -> RegexAst:
        if self.ignore_case:
            members = fold_case(members)
        return byte_class(members)


def fold_case(members) -> FrozenSet[int]:
    """Close a byte set under ASCII case folding"""
    folded = set(members)
    for value in members:
        ch = chr(value)
        if ch in string.ascii_letters:
            folded.add(ord(ch.swapcase()))
    return frozenset(folded)


def parse_regex_raw(pattern: str, ignore_case: bool = False) -> RegexAst:
    """Parse keeping bounded repeats as Repeat nodes"""
    return RegexParser(pattern, ignore_case).parse()


def parse_regex(pattern: str, ignore_case: bool = False) -> RegexAst:
    """Parse a pattern into the normalized tree (bounded repeats unrolled)"""
    ast = expand_repeats(parse_regex_raw(pattern, ignore_case))
    logger.debug(f"Parsed pattern {pattern!r} into {ast.kind}")
    return ast


# ==================== Pretty printing ====================

def _format_byte(value: int) -> str:
    ch = chr(value)
    if ch.isascii() and ch.isalnum():
        return ch
    if 0x20 <= value <= 0x7e:
        return '\\' + ch
    return f'\\x{value:02x}'


def format_byte_set(members) -> str:
    """Class body text for a byte set, runs of three or more as ranges"""
    values = sorted(members)
    pieces = []
    start = 0
    while start < len(values):
        end = start
        while end + 1 < len(values) and values[end + 1] == values[end] + 1:
            end += 1
        if end - start >= 2:
            pieces.append(f"{_format_byte(values[start])}-{_format_byte(values[end])}")
        else:
            pieces.extend(_format_byte(v) for v in values[start:end + 1])
        start = end + 1
    return ''.join(pieces)


def _format_atom(node: RegexAst) -> str:
    text = format_regex(node)
    if isinstance(node, (Literal, Class, Union, Epsilon, Empty)):
        return text
    return f'({text})'


def format_regex(node: RegexAst) -> str:
    """Render a tree back to pattern text that parses to the same tree"""
    if isinstance(node, Empty):
        return '[]'
    if isinstance(node, Epsilon):
        return '()'
    if isinstance(node, Literal):
        return _format_byte(node.value)
    if isinstance(node, Class):
        if node.members == ALL_BYTES:
            return '.'
        return f'[{format_byte_set(node.members)}]'
    if isinstance(node, Concat):
        return ''.join(format_regex(item) if not isinstance(item, Concat) else _format_atom(item)
                       for item in node.items)
    if isinstance(node, Union):
        return '(' + '|'.join(format_regex(item) for item in node.items) + ')'
    if isinstance(node, Star):
        return _format_atom(node.child) + '*'
    if isinstance(node, Repeat):
        if node.max is None:
            bound = f'{{{node.min},}}'
        elif node.max == node.min:
            bound = f'{{{node.min}}}'
        else:
            bound = f'{{{node.min},{node.max}}}'
        return _format_atom(node.child) + bound
    raise TypeError(f"not a regex node: {node!r}")
