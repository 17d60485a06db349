import pytest
from hypothesis import given, strategies as st

from pattern_hc.errors import BadGlyph, EmptyPattern, PatternTooLong
from pattern_hc.pattern import (ALTERNATING, Arrow, B, F, Pattern, PatternClass, all_patterns, are_equivalent,
                                canonical_form, classify, follows, follows_some_rotation, is_primitive, orbit,
                                parse_pattern, primitive_root)

from oracles import orbit_partition, primitive_by_rotations

words = st.lists(st.sampled_from([F, B]), min_size=1, max_size=12).map(lambda d: Pattern(tuple(d)))


def test_parse_examples():
    assert parse_pattern("><").dirs == (F, B)
    assert parse_pattern(">><").dirs == (F, F, B)
    with pytest.raises(BadGlyph) as e:
        parse_pattern("x>")
    assert e.value.position == 0
    with pytest.raises(BadGlyph) as e:
        parse_pattern(">>?")
    assert e.value.position == 2
    with pytest.raises(EmptyPattern):
        parse_pattern("")
    with pytest.raises(PatternTooLong):
        parse_pattern(">" * 65)


def test_str_roundtrip():
    for p in all_patterns(5):
        assert parse_pattern(str(p)) == p


def test_canonical_examples():
    assert canonical_form(Pattern((F, B))) == Pattern((F, B))
    assert canonical_form(Pattern((B,))) == Pattern((F,))
    # (<,>,>) and (>,>,<) are rotations of each other
    assert canonical_form(parse_pattern("<>>")) == canonical_form(parse_pattern(">><"))
    # reflection flips arrows: (>,>,<) reflected is (>,<,<)
    assert canonical_form(parse_pattern(">><")) == canonical_form(parse_pattern("><<"))


def test_canonical_is_lexicographic_min_of_orbit():
    for k in range(1, 7):
        ids = orbit_partition(k)
        members = {}
        for t, i in ids.items():
            members.setdefault(i, []).append(t)
        for t, i in ids.items():
            assert canonical_form(Pattern(t)).dirs == min(members[i])


def test_primitive_examples():
    assert is_primitive(Pattern((F, B)))
    assert not is_primitive(Pattern((F, B, F, B)))
    assert is_primitive(Pattern((F,)))
    assert primitive_root(Pattern((F, B, F, B))) == Pattern((F, B))


def test_equivalence_examples():
    assert are_equivalent(Pattern((F, B)), Pattern((B, F)))
    assert are_equivalent(parse_pattern(">><"), parse_pattern(">><"))
    assert not are_equivalent(parse_pattern(">><"), parse_pattern(">>>"))
    assert not are_equivalent(parse_pattern("><"), parse_pattern("><><"))


def test_follows_examples():
    assert follows((F, B, F, B), Pattern((F, B)))
    assert not follows((F, B, F), Pattern((F, B)))
    assert follows((F, F, B, F, F, B), parse_pattern(">><"))
    assert not follows((F, B, F, B), Pattern((F, B)), offset=1)
    assert follows_some_rotation((B, F, B, F), Pattern((F, B)))


def test_classify_examples():
    assert classify(Pattern((F, B))) is PatternClass.ALTERNATING
    assert classify(Pattern((F,))) is PatternClass.TRIVIAL
    assert classify(Pattern((F, B, F, B))) is PatternClass.NON_PRIMITIVE
    assert classify(parse_pattern(">><")) is PatternClass.NON_ALTERNATING
    assert classify(Pattern((F, F))) is PatternClass.NON_PRIMITIVE


@given(words)
def test_canonical_idempotent_and_in_orbit(p):
    c = canonical_form(p)
    assert canonical_form(c) == c
    assert c in orbit(p)


@given(words, st.integers(0, 30), st.booleans())
def test_canonical_constant_on_orbit(p, t, refl):
    q = p.rotated(t)
    if refl:
        q = q.reflected()
    assert canonical_form(q) == canonical_form(p)
    assert is_primitive(q) == is_primitive(p)
    assert classify(q) == classify(p)


@given(words)
def test_primitivity_matches_rotation_count(p):
    assert is_primitive(p) == primitive_by_rotations(tuple(p.dirs))


@given(words, st.integers(1, 4))
def test_repetition_is_not_primitive(p, times):
    q = p.repeated(times)
    assert is_primitive(q) == (times == 1 and is_primitive(p))
    assert primitive_root(q) == primitive_root(p)


def test_alternating_constant():
    assert ALTERNATING == parse_pattern("><")
    assert Arrow.FORWARD < Arrow.BACKWARD
