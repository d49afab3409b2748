import itertools
import os
import random
from typing import Callable, Iterator, List, Set

import pytest

from controllers.match_engine import MatchEngine
from models.config_manager import EngineSettings
from models.records import WorkerBackend
from models.regex_ast import (
    EPSILON, Class, Concat, Empty, Epsilon, Literal, RegexAst, Repeat, Star, Union,
    byte_class, concat, expand_repeats, star, union,
)

ORACLE_ALPHABET = b'abcd'

# Small patterns with known structure, shared by the split and algebra checks
CORPUS_PATTERNS = [
    '(ab)*',
    '(a|b)*abb',
    '([0-4]{3}[5-9]{3})*',
    '(([02468][13579]){5})*',
    '[ap]*[al][alp]{2}',
    '(m|(t|c([mt]*c){2})[cmt])*',
    '.*(abc).*',
    'a+b?c{2,3}|d*',
    '',
]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in list(os.environ):
        if key.startswith('SFAREGEX_') and key != 'SFAREGEX_SLOW':
            monkeypatch.delenv(key)


@pytest.fixture
def settings():
    return EngineSettings(backend=WorkerBackend.SERIAL)


@pytest.fixture
def engine(settings):
    with MatchEngine(settings) as match_engine:
        yield match_engine


@pytest.fixture(scope='session')
def compiled_corpus():
    """Every corpus pattern compiled once, with its D-SFA"""
    with MatchEngine(EngineSettings(backend=WorkerBackend.SERIAL)) as match_engine:
        return [match_engine.compile_pattern(p) for p in CORPUS_PATTERNS]


# ==================== Oracle helpers ====================

def _ends(node: RegexAst, word: bytes, start: int) -> Set[int]:
    """Offsets where a match of node starting at `start` can end"""
    if isinstance(node, Empty):
        return set()
    if isinstance(node, Epsilon):
        return {start}
    if isinstance(node, (Literal, Class)):
        return {start + 1} if start < len(word) and word[start] in node.members else set()
    if isinstance(node, Concat):
        current = {start}
        for item in node.items:
            current = set().union(*(_ends(item, word, p) for p in current))
        return current
    if isinstance(node, Union):
        return set().union(*(_ends(item, word, start) for item in node.items))
    if isinstance(node, Star):
        reached = {start}
        frontier = [start]
        while frontier:
            p = frontier.pop()
            for end in _ends(node.child, word, p):
                if end not in reached:
                    reached.add(end)
                    frontier.append(end)
        return reached
    if isinstance(node, Repeat):
        return _ends(expand_repeats(node), word, start)
    raise TypeError(node)


def ast_accepts(node: RegexAst, word: bytes) -> bool:
    return len(word) in _ends(node, word, 0)


def random_ast(rng: random.Random, depth: int = 6, alphabet: bytes = ORACLE_ALPHABET) -> RegexAst:
    if depth <= 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.1:
            return EPSILON
        if roll < 0.3:
            return byte_class(rng.sample(list(alphabet), rng.randint(1, len(alphabet))))
        return byte_class((rng.choice(alphabet),))
    kind = rng.choice(('concat', 'union', 'star'))
    if kind == 'star':
        return star(random_ast(rng, depth - 1, alphabet))
    children = [random_ast(rng, depth - 1, alphabet) for _ in range(rng.randint(2, 3))]
    return concat(children) if kind == 'concat' else union(children)


def all_words(max_len: int, alphabet: bytes = ORACLE_ALPHABET) -> Iterator[bytes]:
    for length in range(max_len + 1):
        for letters in itertools.product(alphabet, repeat=length):
            yield bytes(letters)


@pytest.fixture
def oracle() -> Callable[[RegexAst, bytes], bool]:
    return ast_accepts


@pytest.fixture
def ast_factory() -> Callable[..., RegexAst]:
    return random_ast


@pytest.fixture
def words() -> Callable[..., List[bytes]]:
    return lambda max_len, alphabet=ORACLE_ALPHABET: list(all_words(max_len, alphabet))
