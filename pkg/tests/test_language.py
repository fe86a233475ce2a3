import pytest
from hypothesis import given, settings, strategies as st

from mvmt.algebra import CONJ, JOIN, MEET
from mvmt.errors import (
    ArityMismatch,
    BoundsTooLarge,
    NotASentence,
    ParseError,
    UnknownSymbol,
)
from mvmt.language import (
    ALL_CLASS_TAGS,
    AND_PRIMITIVE,
    Atom,
    CONJ_PRIMITIVE,
    Connective,
    E_AND_P,
    E_CONJ_P,
    E_P,
    EnumerationBounds,
    PRIMITIVE_POSITIVE,
    Quantifier,
    classify_sentence,
    enumerate_sentences,
    format_formula,
    free_vars,
    nested_rank,
    parse_formula,
    parse_language,
    quantifier_depth,
)

LANG = parse_language("R:1 P:2 T:0")
SIG = None


@pytest.fixture(scope="module")
def sig(builtin_two=None):
    from mvmt.algebra import two_element_algebra

    return two_element_algebra().signature


def parse(text, sig):
    return parse_formula(text, LANG, sig)


def test_parse_single_quantified_atom(sig):
    f = parse("exists z. R(z)", sig)
    assert f == Quantifier("exists", "z", Atom("R", ("z",)))


def test_parse_nested_strong_conjunction(sig):
    f = parse("exists x. exists y. R(x) & P(y, x)", sig)
    assert f == Quantifier(
        "exists",
        "x",
        Quantifier(
            "exists",
            "y",
            Connective(CONJ, (Atom("R", ("x",)), Atom("P", ("y", "x")))),
        ),
    )


def test_parse_truth_constant_atom(sig):
    assert parse("T", sig) == Atom("T", ())


def test_parse_precedence_and_associativity(sig):
    f = parse("R(x) & R(y) and R(z) or T", sig)
    # & binds tighter than and, and tighter than or; all left-associative
    assert f == Connective(
        JOIN,
        (
            Connective(
                MEET,
                (
                    Connective(CONJ, (Atom("R", ("x",)), Atom("R", ("y",)))),
                    Atom("R", ("z",)),
                ),
            ),
            Atom("T", ()),
        ),
    )


def test_quantifier_scopes_to_the_right(sig):
    f = parse("exists x. R(x) or T", sig)
    assert isinstance(f, Quantifier)
    assert f.body == Connective(JOIN, (Atom("R", ("x",)), Atom("T", ())))


def test_parse_errors(sig):
    with pytest.raises(ArityMismatch):
        parse("R(x, y)", sig)
    with pytest.raises(UnknownSymbol):
        parse("Q(x)", sig)
    with pytest.raises(ParseError):
        parse("R(x) and", sig)
    with pytest.raises(ParseError):
        parse("exists . R(x)", sig)
    with pytest.raises(ParseError):
        parse("R(x)) ", sig)


def test_format_parse_roundtrip_tricky_cases(sig):
    texts = [
        "R(x) and (exists y. P(y, y)) or T",
        "(exists x. R(x)) and forall y. R(y)",
        "exists x. (R(x) or T) & R(x)",
        "T and (T or T)",
        "(T or T) & T",
    ]
    for text in texts:
        f = parse(text, sig)
        assert parse(format_formula(f), sig) == f


# hand-computed rank table: (text, nested rank, quantifier depth)
RANK_TABLE = [
    ("R(x)", 0, 0),
    ("T", 0, 0),
    ("P(x, y)", 0, 0),
    ("R(x) and P(x, y)", 1, 0),
    ("R(x) or T", 1, 0),
    ("R(x) & R(y)", 1, 0),
    ("(R(x) and T) or P(x, y)", 2, 0),
    ("exists x. R(x)", 3, 1),
    ("forall x. R(x)", 3, 1),
    ("exists x. exists y. P(x, y)", 6, 2),
    ("exists x. (R(x) and T)", 4, 1),
    ("forall x. exists y. P(x, y)", 6, 2),
    ("(exists x. R(x)) or (exists y. R(y))", 7, 1),
    ("exists x. R(x) & (T or R(x))", 5, 1),
    ("T and T", 1, 0),
    ("exists x. forall y. (P(x, y) and R(y))", 7, 2),
    ("R(x) and (R(x) and R(x))", 2, 0),
    ("exists z. R(z)", 3, 1),
    ("(T or T) & T", 2, 0),
    ("forall x. (R(x) or (exists y. P(x, y)))", 7, 2),
]


@pytest.mark.parametrize("text,nr,qd", RANK_TABLE)
def test_rank_table(text, nr, qd, sig):
    f = parse(text, sig)
    assert nested_rank(f) == nr
    assert quantifier_depth(f) == qd


def test_classify_single_atom_sentence_gets_every_tag(sig):
    tags = classify_sentence(parse("exists z. R(z)", sig))
    assert tags == frozenset(ALL_CLASS_TAGS)


def test_classify_strong_conjunction_sentence(sig):
    tags = classify_sentence(parse("exists x. exists y. R(x) & R(y)", sig))
    assert tags == frozenset({CONJ_PRIMITIVE, E_CONJ_P, PRIMITIVE_POSITIVE, E_P})


def test_classify_universal_gets_nothing(sig):
    assert classify_sentence(parse("forall x. R(x)", sig)) == frozenset()


def test_classify_disjunction_drops_primitive_tags(sig):
    tags = classify_sentence(parse("(exists x. R(x)) or T", sig))
    assert AND_PRIMITIVE not in tags
    assert E_AND_P in tags and E_P in tags


def test_classify_mixed_blocks(sig):
    tags = classify_sentence(parse("exists x. (R(x) & R(x)) and T", sig))
    assert tags == frozenset({PRIMITIVE_POSITIVE, E_P})


def test_classify_requires_sentence(sig):
    with pytest.raises(NotASentence):
        classify_sentence(parse("R(x)", sig))


def test_class_tag_containments_on_enumerated(sig):
    lang = parse_language("R:1 T:0")
    bounds = EnumerationBounds(max_qd=1, max_vars=1, max_connectives=2)
    for sentence in enumerate_sentences(lang, sig, bounds):
        tags = classify_sentence(sentence)
        if AND_PRIMITIVE in tags:
            assert E_AND_P in tags and PRIMITIVE_POSITIVE in tags
        if CONJ_PRIMITIVE in tags:
            assert E_CONJ_P in tags and PRIMITIVE_POSITIVE in tags
        if PRIMITIVE_POSITIVE in tags:
            assert E_P in tags


def test_enumerate_contains_both_quantifiers(sig):
    lang = parse_language("R:1")
    bounds = EnumerationBounds(max_qd=1, max_vars=1, max_connectives=1)
    got = {
        format_formula(s)
        for s in enumerate_sentences(lang, sig, bounds, [JOIN, MEET])
    }
    assert "exists x1. R(x1)" in got
    assert "forall x1. R(x1)" in got


def test_enumerate_empty_without_closed_atoms(sig):
    lang = parse_language("R:1")
    bounds = EnumerationBounds(max_qd=0, max_vars=1, max_connectives=2)
    assert list(enumerate_sentences(lang, sig, bounds)) == []


def test_enumerate_truth_constant_at_qd_zero(sig):
    lang = parse_language("T:0")
    bounds = EnumerationBounds(max_qd=0, max_vars=0, max_connectives=0)
    got = [format_formula(s) for s in enumerate_sentences(lang, sig, bounds)]
    assert got == ["T"]


def test_enumerate_respects_bounds_and_roundtrips(sig):
    lang = parse_language("R:1 P:1")
    bounds = EnumerationBounds(max_qd=2, max_vars=2, max_connectives=2)
    seen = set()
    for s in enumerate_sentences(lang, sig, bounds):
        assert quantifier_depth(s) <= 2
        assert not free_vars(s)
        assert s not in seen
        seen.add(s)
        assert parse_formula(format_formula(s), lang, sig) == s
    assert len(seen) > 50


def test_enumerate_cap(sig):
    lang = parse_language("R:1 P:1")
    bounds = EnumerationBounds(max_qd=2, max_vars=2, max_connectives=3, cap=40)
    with pytest.raises(BoundsTooLarge):
        list(enumerate_sentences(lang, sig, bounds))


@pytest.mark.parametrize("tag", [E_AND_P, E_P, AND_PRIMITIVE, CONJ_PRIMITIVE])
def test_class_stream_equals_filtered_general_stream(tag, sig):
    lang = parse_language("R:1 P:1")
    bounds = EnumerationBounds(max_qd=1, max_vars=1, max_connectives=2)
    whitelist = [JOIN, MEET] if tag in (E_AND_P, AND_PRIMITIVE) else [JOIN, MEET, CONJ]
    filtered = [
        s
        for s in enumerate_sentences(lang, sig, bounds, whitelist)
        if tag in classify_sentence(s)
    ]
    direct = list(enumerate_sentences(lang, sig, bounds, class_tag=tag))
    assert filtered == direct


# random ASTs for the print/parse round trip
def _formulas(sig):
    atoms = st.sampled_from(
        [Atom("R", ("x",)), Atom("R", ("y",)), Atom("P", ("x", "y")), Atom("T", ())]
    )

    def extend(children):
        binary = st.tuples(children, children).map(
            lambda pair: Connective(
                ["join", "meet", "conj"][hash(pair) % 3], pair
            )
        )
        quantified = st.tuples(
            st.sampled_from(["exists", "forall"]),
            st.sampled_from(["x", "y", "z"]),
            children,
        ).map(lambda t: Quantifier(*t))
        return binary | quantified

    return st.recursive(atoms, extend, max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_print_parse_roundtrip_random(data, sig):
    f = data.draw(_formulas(sig))
    assert parse_formula(format_formula(f), LANG, sig) == f
