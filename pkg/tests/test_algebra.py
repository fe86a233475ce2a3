import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mvmt.algebra import (
    ConnectiveSignature,
    build_algebra,
    chain_table,
    check_strong_conj_filter_law,
    find_conj_unit,
    is_integral,
    is_monotone,
    leq,
    load_algebra,
)
from mvmt.errors import (
    CarrierNotClosed,
    FilterNotPrime,
    LatticeAxiomViolation,
    NoStrongConjunction,
    NoUnit,
    ParseError,
    UnknownElement,
)
from mvmt.fixtures import fixture_text


TWO_TEXT = fixture_text("two.alg")
FOUR_TEXT = fixture_text("four_bool.alg")


def test_load_two_element_boolean(two):
    assert two.carrier == ("bot", "top")
    assert two.filter == frozenset({"top"})
    assert two.top == "top" and two.bottom == "bot"


def test_load_trivial_one_element_algebra():
    text = """
    algebra triv
    carrier e
    order table
    op join 2 = table
    row e e -> e
    op meet 2 = table
    row e e -> e
    filter set e
    """
    algebra = load_algebra(text)
    assert algebra.carrier == ("e",)
    assert algebra.filter == frozenset({"e"})


def test_nonprime_filter_with_both_atoms_rejected():
    # filter {top, a, b}: meet(a, b) = bot escapes it while both members lie in it
    text = FOUR_TEXT.replace("filter set top b", "filter set top a b")
    with pytest.raises(FilterNotPrime) as err:
        load_algebra(text)
    assert err.value.law == "meet"
    assert set(err.value.pair) == {"a", "b"}


def test_nonprime_filter_top_only_rejected():
    with pytest.raises(FilterNotPrime) as err:
        load_algebra(fixture_text("four_bool_nonprime.alg"))
    assert err.value.law == "join"
    assert set(err.value.pair) == {"a", "b"}


def test_leq_two(two):
    assert leq(two, "bot", "top")
    assert not leq(two, "top", "bot")


def test_leq_incomparable_atoms(four_bool):
    assert not leq(four_bool, "a", "b")
    assert not leq(four_bool, "b", "a")


def test_leq_chain(ul6):
    assert leq(ul6, "1/6", "1/2")
    assert not leq(ul6, "1/2", "1/6")


def test_leq_unknown_element(two):
    with pytest.raises(UnknownElement):
        leq(two, "zap", "top")


def test_integral_godel_chain(godel5):
    assert find_conj_unit(godel5) == "1"
    assert is_integral(godel5)


def test_not_integral_uninorm_chain(ul6):
    assert find_conj_unit(ul6) == "1/2"
    assert not is_integral(ul6)


def test_integral_two_with_meet_conj(two):
    assert is_integral(two)


def test_no_strong_conjunction(two_lattice):
    with pytest.raises(NoStrongConjunction):
        is_integral(two_lattice)
    with pytest.raises(NoStrongConjunction):
        check_strong_conj_filter_law(two_lattice)


def test_no_unit():
    sig = ConnectiveSignature((("join", 2), ("meet", 2), ("conj", 2)))
    carrier = ("bot", "top")
    constant_bot = {
        (a, b): "bot" for a in carrier for b in carrier
    }
    algebra = build_algebra(
        "nounit",
        sig,
        carrier,
        {
            "join": chain_table(carrier, "max"),
            "meet": chain_table(carrier, "min"),
            "conj": constant_bot,
        },
        ["top"],
    )
    with pytest.raises(NoUnit):
        find_conj_unit(algebra)


def test_conj_filter_law_integral_passes(two, godel5):
    assert check_strong_conj_filter_law(two).ok
    assert check_strong_conj_filter_law(godel5).ok


def test_conj_filter_law_uninorm_violation(ul6):
    report = check_strong_conj_filter_law(ul6)
    assert not report.ok
    assert ("5/6", "1/3", "conj-in-filter-but-args-not") in report.violations
    # the right-to-left implication never breaks on this chain
    assert all(d != "args-in-filter-but-conj-not" for _, _, d in report.violations)


def test_lattice_axiom_violation_reported():
    broken = TWO_TEXT.replace(
        "op meet 2 = table\nrow bot bot -> bot\nrow bot top -> bot",
        "op meet 2 = table\nrow bot bot -> bot\nrow bot top -> top",
    )
    with pytest.raises(LatticeAxiomViolation):
        load_algebra(broken)


def test_carrier_not_closed():
    text = TWO_TEXT.replace("row top top -> top\nop conj", "row top top -> zap\nop conj")
    with pytest.raises(CarrierNotClosed) as err:
        load_algebra(text)
    assert err.value.output == "zap"


def test_declared_order_cross_checked():
    broken = FOUR_TEXT.replace("leq bot a", "leq a bot")
    with pytest.raises(LatticeAxiomViolation) as err:
        load_algebra(broken)
    assert err.value.axiom == "declared-order-vs-meet"


def test_chain_must_be_ascending():
    text = """
    algebra bad
    carrier 1 0
    order chain
    op join 2 = max
    op meet 2 = min
    filter upset 1
    """
    with pytest.raises(ParseError):
        load_algebra(text)


def test_parse_errors():
    with pytest.raises(ParseError):
        load_algebra("carrier a b")
    with pytest.raises(ParseError):
        load_algebra("algebra x\ncarrier a\norder chain\nop join 3 = max")
    with pytest.raises(ParseError):
        load_algebra("algebra x\nrow a -> b")


def test_filter_upset_resolution(ul6):
    assert ul6.filter == frozenset({"1/2", "2/3", "5/6", "1"})


def test_rational_tokens_normalized():
    text = """
    algebra norm
    carrier 0/2 2/6 4/4
    order chain
    op join 2 = max
    op meet 2 = min
    filter upset 4/4
    """
    algebra = load_algebra(text)
    assert algebra.carrier == ("0", "1/3", "1")


@pytest.mark.parametrize("name", ["two", "four_bool", "godel5", "ul6"])
def test_order_properties_exhaustive(name, request):
    algebra = request.getfixturevalue(name if name != "four_bool" else "four_bool")
    carrier = algebra.carrier
    for a in carrier:
        assert leq(algebra, a, a)
    for a, b in itertools.product(carrier, repeat=2):
        if leq(algebra, a, b) and leq(algebra, b, a):
            assert a == b
        j = algebra.join(a, b)
        assert leq(algebra, a, j) and leq(algebra, b, j)
        for c in carrier:
            if leq(algebra, a, c) and leq(algebra, b, c):
                assert leq(algebra, j, c)
    for a, b, c in itertools.product(carrier, repeat=3):
        if leq(algebra, a, b) and leq(algebra, b, c):
            assert leq(algebra, a, c)


def test_ops_monotone_on_fixtures(two, godel5, ul6):
    for algebra in (two, godel5, ul6):
        for op, arity in algebra.signature.connectives:
            if arity > 0:
                assert is_monotone(algebra, op), (algebra.name, op)


@given(
    st.sets(
        st.fractions(min_value=0, max_value=1, max_denominator=12),
        min_size=1,
        max_size=6,
    )
)
def test_random_chains_satisfy_all_invariants(values):
    carrier = [str(v) for v in sorted(values)]
    threshold = carrier[-1]
    text = "\n".join(
        [
            "algebra rand",
            "carrier " + " ".join(carrier),
            "order chain",
            "op join 2 = max",
            "op meet 2 = min",
            f"filter upset {threshold}",
        ]
    )
    algebra = load_algebra(text)  # all checks run at load
    fracs = sorted(Fraction(v) for v in values)
    for x, y in itertools.product(fracs, repeat=2):
        assert leq(algebra, str(x), str(y)) == (x <= y)
