import random

import numpy as np
import pytest

from models.automata import build_nfa, dfa_accepts, minimize_dfa, nfa_accepts, subset_construct
from models.errors import CapacityExceeded, DomainMismatch
from models.pattern_families import explosion_sfa_pattern, overhead_pattern, scalability_pattern
from models.regex_parser import parse_regex
from models.sfa import (
    MappingKind, StateMapping, compose, correspondence_construct, identity_mapping, mapping_apply,
    sfa_accepts,
)


def minimal(pattern: str):
    return minimize_dfa(subset_construct(build_nfa(parse_regex(pattern))))


def mapping(*targets: int) -> StateMapping:
    return StateMapping(np.array(targets, dtype=np.uint8))


@pytest.fixture(scope='module')
def ab_star():
    dfa = minimal('(ab)*')
    return dfa, correspondence_construct(dfa)


class TestStateMapping:
    def test_identity_is_neutral(self):
        f = mapping(2, 0, 1)
        e = identity_mapping(3)
        assert compose(e, f) == f
        assert compose(f, e) == f

    def test_compose_applies_left_first(self):
        f = mapping(1, 2, 0)
        g = mapping(0, 0, 2)
        # q -> f(q) -> g(f(q))
        assert compose(f, g) == mapping(0, 2, 0)

    def test_equality_ignores_dtype(self):
        assert StateMapping(np.array([1, 0], dtype=np.uint8)) == StateMapping(np.array([1, 0], dtype=np.int64))
        assert len({mapping(1, 0), mapping(1, 0), mapping(0, 1)}) == 2

    def test_domain_mismatch(self):
        with pytest.raises(DomainMismatch):
            compose(mapping(0, 1), mapping(0, 1, 2))

    def test_kind_mismatch(self):
        with pytest.raises(ValueError):
            compose(mapping(0, 1), identity_mapping(2, MappingKind.NONDETERMINISTIC))

    def test_relation_compose_is_boolean_product(self):
        f = StateMapping(np.array([[0, 1, 1], [0, 0, 0], [1, 0, 0]], dtype=bool))
        g = StateMapping(np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=bool))
        h = compose(f, g)
        assert h.targets(0) == frozenset({1, 2})
        assert h.targets(1) == frozenset()
        assert h.targets(2) == frozenset({0})

    def test_apply(self):
        assert mapping_apply(mapping(2, 2, 0), [0, 1]) == frozenset({2})
        assert mapping_apply(mapping(2, 2, 0), []) == frozenset()

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            StateMapping(np.zeros((2, 3), dtype=bool))
        with pytest.raises(ValueError):
            mapping(0, 5)


class TestCorrespondenceConstruction:
    """The running example and its mapping table"""

    def test_ab_star_has_six_states(self, ab_star):
        _, sfa = ab_star
        assert sfa.state_count == 6
        assert sfa.live_state_count == 5

    def test_ab_star_mappings(self, ab_star):
        _, sfa = ab_star
        # identity, constant sink, a, b, ab, ba over (start, sink, after-a)
        assert sfa.mappings.tolist() == [
            [0, 1, 2],
            [1, 1, 1],
            [2, 1, 1],
            [1, 1, 0],
            [0, 1, 1],
            [1, 1, 2],
        ]
        assert sfa.finals == frozenset({0, 4})

    def test_ab_star_matches_reference_table_up_to_renaming(self, ab_star):
        _, sfa = ab_star
        # Reference numbering: 0 = start, 1 = after-a, 2 = sink; images of 0, 1, 2
        reference = {
            'f0': (0, 1, 2), 'f1': (1, 2, 2), 'f2': (2, 0, 2),
            'f3': (2, 2, 2), 'f4': (0, 2, 2), 'f5': (2, 1, 2),
        }
        state_renaming = {0: 0, 1: 2, 2: 1}
        table_renaming = {'f0': 0, 'f3': 1, 'f1': 2, 'f2': 3, 'f4': 4, 'f5': 5}
        for name, images in reference.items():
            ours = sfa.mappings[table_renaming[name]]
            renamed = {state_renaming[q]: state_renaming[int(ours[q])] for q in range(3)}
            assert tuple(renamed[q] for q in range(3)) == images

    def test_transitions_follow_composition(self, ab_star):
        dfa, sfa = ab_star
        for state in range(sfa.state_count):
            for byte in (0, ord('a'), ord('b'), 0xff):
                target = sfa.step(state, byte)
                expected = sfa.mappings[state].astype(np.int64)
                expected = dfa.class_table[expected, dfa.byte_to_class[byte]]
                assert sfa.mappings[target].tolist() == expected.tolist()

    def test_states_are_distinct(self, ab_star):
        _, sfa = ab_star
        assert len({sfa.mapping(s) for s in range(sfa.state_count)}) == sfa.state_count

    def test_empty_pattern(self):
        sfa = correspondence_construct(minimal(''))
        assert sfa.state_count == 2
        assert sfa.live_state_count == 1

    def test_narrow_dtype(self, ab_star):
        _, sfa = ab_star
        assert sfa.mappings.dtype == np.uint8

    def test_cap(self):
        with pytest.raises(CapacityExceeded) as info:
            correspondence_construct(minimal(scalability_pattern(5)), max_states=50)
        assert info.value.stage == 'SFA'


class TestGoldenSizes:
    def test_scalability_r5(self):
        sfa = correspondence_construct(minimal(scalability_pattern(5)))
        assert sfa.live_state_count == 109
        assert sfa.state_count == 110

    def test_scalability_r50(self):
        sfa = correspondence_construct(minimal(scalability_pattern(50)))
        assert sfa.live_state_count == 10099

    @pytest.mark.slow
    def test_scalability_r500(self):
        sfa = correspondence_construct(minimal(scalability_pattern(500)))
        assert sfa.live_state_count == 1000999

    def test_overhead_pattern(self):
        dfa = minimal(overhead_pattern())
        sfa = correspondence_construct(dfa)
        assert dfa.state_count == 11
        assert sfa.live_state_count == 21
        assert sfa.state_count == 22

    @pytest.mark.parametrize('n, dfa_live, sfa_complete', [(3, 3, 28), (4, 4, 257)])
    def test_sfa_explosion_family(self, n, dfa_live, sfa_complete):
        dfa = minimal(explosion_sfa_pattern(n))
        sfa = correspondence_construct(dfa)
        assert dfa.state_count == dfa_live + 1
        assert sfa.live_state_count == dfa_live ** dfa_live
        assert sfa.state_count == sfa_complete

    def test_subsequence_pattern(self):
        sfa = correspondence_construct(minimal('.*(T.*T.*Y.*P.*P.*R.*O.*M.*P.*T.*)'))
        assert sfa.state_count == 15564
        assert sfa.live_state_count == 15564


class TestAcceptance:
    """SFA acceptance agrees with the DFA it was built from"""

    def test_random_trees(self, ast_factory, oracle, words):
        rng = random.Random(3)
        samples = words(5)
        for _ in range(40):
            ast = ast_factory(rng, depth=4)
            dfa = minimize_dfa(subset_construct(build_nfa(ast)))
            sfa = correspondence_construct(dfa)
            for word in samples:
                assert sfa_accepts(sfa, word) == oracle(ast, word)

    def test_nsfa_from_nfa(self, ast_factory, words):
        rng = random.Random(5)
        samples = words(4)
        for _ in range(40):
            nfa = build_nfa(ast_factory(rng, depth=2))
            nsfa = correspondence_construct(nfa)
            assert nsfa.kind is MappingKind.NONDETERMINISTIC
            for word in samples:
                assert sfa_accepts(nsfa, word) == nfa_accepts(nfa, word)

    def test_nsfa_from_dfa_flag(self, ab_star):
        dfa, dsfa = ab_star
        nsfa = correspondence_construct(dfa, nondeterministic=True)
        assert nsfa.kind is MappingKind.NONDETERMINISTIC
        assert nsfa.state_count == dsfa.state_count
        for word in (b'', b'ab', b'aba', b'abab', b'ba'):
            assert sfa_accepts(nsfa, word) == dfa_accepts(dfa, word)


class TestAlgebra:
    """Algebraic properties of the mappings of built SFAs"""

    def test_associativity_and_identity(self, compiled_corpus):
        rng = random.Random(13)
        triples_per_pattern = -(-10000 // len(compiled_corpus))
        for compiled in compiled_corpus:
            sfa = compiled.sfa
            identity = identity_mapping(sfa.origin.state_count)
            states = range(sfa.state_count)
            for _ in range(triples_per_pattern):
                f, g, h = (sfa.mapping(rng.choice(states)) for _ in range(3))
                assert compose(compose(f, g), h) == compose(f, compose(g, h))
                assert compose(identity, f) == f == compose(f, identity)

    def test_transition_coherence(self, compiled_corpus):
        # Stepping the SFA on a byte equals composing with that byte's mapping
        for compiled in compiled_corpus:
            sfa = compiled.sfa
            byte_mapping = {}
            for byte in range(256):
                byte_mapping[byte] = sfa.mapping(sfa.step(sfa.initial, byte))
            for state in range(sfa.state_count):
                current = sfa.mapping(state)
                for byte in range(256):
                    assert sfa.mapping(sfa.step(state, byte)) == compose(current, byte_mapping[byte])

    def test_size_bound(self, compiled_corpus, ast_factory):
        # At most one SFA state per function from DFA states to DFA states
        for compiled in compiled_corpus:
            size = compiled.min_dfa.state_count
            assert compiled.sfa.state_count <= size ** size
        rng = random.Random(17)
        for _ in range(40):
            min_dfa = minimize_dfa(subset_construct(build_nfa(ast_factory(rng, depth=4))))
            size = min_dfa.state_count
            assert correspondence_construct(min_dfa).state_count <= size ** size
