"""Bundled algebra and model files plus the in-memory demo constructors."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .algebra import (
    ConnectiveSignature,
    InterpretingLattice,
    JOIN,
    MEET,
    build_algebra,
    chain_table,
    load_algebra,
)
from .errors import MvmtError
from .structure import PModel, build_model, load_model
from .language import PredicateLanguage

ALGEBRA_FIXTURES = (
    "two",
    "two_lattice",
    "four_bool",
    "four_bool_nonprime",
    "godel5",
    "ul6",
    "cut_chain",
)

MODEL_FIXTURES = (
    "prime_m1",
    "prime_m2",
    "nonprime_m1",
    "nonprime_m2",
    "ul_m1",
    "ul_m2",
    "ul_m1_rejected",
    "ul_m2_rejected",
    "cut_half",
)

_MODEL_ALGEBRA = {
    "prime_m1": "four_bool",
    "prime_m2": "four_bool",
    "nonprime_m1": "four_bool_nonprime",
    "nonprime_m2": "four_bool_nonprime",
    "ul_m1": "ul6",
    "ul_m2": "ul6",
    "ul_m1_rejected": "ul6",
    "ul_m2_rejected": "ul6",
    "cut_half": "cut_chain",
}


def fixture_text(filename: str) -> str:
    return (resources.files(__package__) / "fixtures" / filename).read_text()


def fixture_path(filename: str) -> str:
    return str(resources.files(__package__) / "fixtures" / filename)


@lru_cache(maxsize=None)
def load_fixture_algebra(name: str) -> InterpretingLattice:
    """Load a bundled algebra; the non-prime demo comes from memory instead."""
    if name not in ALGEBRA_FIXTURES:
        raise MvmtError(f"no bundled algebra named {name!r}")
    if name == "four_bool_nonprime":
        return nonprime_four_boolean()
    return load_algebra(fixture_text(f"{name}.alg"))


@lru_cache(maxsize=None)
def load_fixture_model(name: str) -> PModel:
    if name not in MODEL_FIXTURES:
        raise MvmtError(f"no bundled model named {name!r}")
    algebra = load_fixture_algebra(_MODEL_ALGEBRA[name])
    return load_model(fixture_text(f"{name}.model"), algebra)


@lru_cache(maxsize=1)
def nonprime_four_boolean() -> InterpretingLattice:
    """The four element Boolean algebra with the non-prime filter {top}.

    The file loader rejects this filter (join(a, b) = top lies in it while
    neither atom does); the object exists only to replay the demonstration
    that a non-prime filter breaks positive-existential preservation.
    """
    rejected = load_algebra(fixture_text("four_bool.alg"))
    return build_algebra(
        "four_bool_nonprime",
        rejected.signature,
        rejected.carrier,
        rejected.ops,
        ["top"],
        require_prime=False,
    )


def cut_graph_model(alpha: Fraction) -> PModel:
    """The two vertex weighted cut graph with arc weight alpha from a to b.

    Built over the chain {0, alpha, 1}; callers enforce 0 < alpha < 1.
    """
    alpha = Fraction(alpha)
    carrier = tuple(str(v) for v in sorted({Fraction(0), alpha, Fraction(1)}))
    sig = ConnectiveSignature(((JOIN, 2), (MEET, 2), ("bot", 0), ("top", 0)))
    ops = {
        JOIN: chain_table(carrier, "max"),
        MEET: chain_table(carrier, "min"),
        "bot": {(): "0"},
        "top": {(): "1"},
    }
    algebra = build_algebra("cut_chain_alpha", sig, carrier, ops, ["1"])
    language = PredicateLanguage((("R", 2), ("Ps", 1), ("Pt", 1)))
    a = str(alpha)
    interp = {
        "R": {
            ("a", "a"): "1",
            ("a", "b"): a,
            ("b", "a"): "1",
            ("b", "b"): "1",
        },
        "Ps": {("a",): "1", ("b",): "0"},
        "Pt": {("a",): "0", ("b",): "1"},
    }
    return build_model("cut_alpha", algebra, language, ("a", "b"), interp)
