"""Finite relational structures valued in an interpreting lattice."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .algebra import InterpretingLattice, normalize_element
from .errors import (
    BoundsTooLarge,
    MissingTupleNoDefault,
    ParseError,
    UnknownElement,
    ValueNotInCarrier,
)
from .language import PredicateLanguage, parse_language

# A valuation is a plain mapping from variable names to domain elements,
# total on the variables of the formula under evaluation.
Valuation = Mapping[str, str]


@dataclass(frozen=True)
class PModel:
    """A finite model: algebra, predicate language, domain, interpretations.

    ``interp[pred]`` maps every domain tuple of the predicate's arity to a
    carrier element (nullary predicates use the empty tuple as key).  The
    domain is kept sorted lexicographically; element names carry no meaning.
    """

    name: str
    algebra: InterpretingLattice
    language: PredicateLanguage
    domain: tuple[str, ...]
    interp: dict[str, dict[tuple[str, ...], str]]

    def value(self, pred: str, args: tuple[str, ...]) -> str:
        return self.interp[pred][args]

    def tuples(self, pred: str):
        arity = self.language.arity(pred)
        return itertools.product(self.domain, repeat=arity)


def build_model(name, algebra, language, domain, interp) -> PModel:
    """Validate totality and carrier membership, then freeze the model."""
    domain = tuple(sorted(domain))
    if not domain:
        raise ParseError("model domain must be nonempty")
    if len(set(domain)) != len(domain):
        raise ParseError("domain elements must be distinct")
    carrier = set(algebra.carrier)
    table: dict[str, dict[tuple[str, ...], str]] = {}
    for pred, arity in language.predicates:
        rows = dict(interp.get(pred, {}))
        for args in itertools.product(domain, repeat=arity):
            if args not in rows:
                raise MissingTupleNoDefault(
                    f"model {name!r}: {pred}{args} has no value and no default"
                )
            if rows[args] not in carrier:
                raise ValueNotInCarrier(
                    f"model {name!r}: {pred}{args} = {rows[args]!r} not in carrier"
                )
        extra = set(rows) - set(itertools.product(domain, repeat=arity))
        if extra:
            raise UnknownElement(f"model {name!r}: {pred} rows outside domain {extra}")
        table[pred] = rows
    return PModel(name, algebra, language, domain, table)


def load_model(
    text: str, algebra: InterpretingLattice, language: Optional[PredicateLanguage] = None
) -> PModel:
    """Parse a model file.

    Grammar (line oriented, ``#`` comments)::

        model <name>
        algebra <name>          # must match the provided algebra
        language R:2 P:1 ...
        domain e1 e2 ...
        R(e1,e2) = <value>      # nullary: R = <value>
        default R = <value>     # fills unlisted tuples
    """
    name = None
    algebra_name = None
    file_language = None
    domain: Optional[tuple[str, ...]] = None
    assignments: list[tuple[str, tuple[str, ...], str]] = []
    defaults: dict[str, str] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        def fail(msg):
            raise ParseError(f"line {lineno}: {msg}: {raw.strip()!r}")

        tokens = line.split()
        head = tokens[0]
        if head == "model":
            if len(tokens) != 2:
                fail("expected 'model <name>'")
            name = tokens[1]
        elif head == "algebra":
            if len(tokens) != 2:
                fail("expected 'algebra <name>'")
            algebra_name = tokens[1]
        elif head == "language":
            file_language = parse_language(" ".join(tokens[1:]))
        elif head == "domain":
            if len(tokens) < 2:
                fail("domain needs at least one element")
            domain = tuple(tokens[1:])
        elif head == "default":
            if len(tokens) != 4 or tokens[2] != "=":
                fail("expected 'default <pred> = <value>'")
            defaults[tokens[1]] = normalize_element(tokens[3])
        else:
            if "=" not in line:
                fail("expected '<pred>(<args>) = <value>'")
            lhs, _, rhs = line.partition("=")
            lhs, rhs = lhs.strip(), rhs.strip()
            value = normalize_element(rhs)
            if "(" in lhs:
                if not lhs.endswith(")"):
                    fail("malformed predicate application")
                pred, _, inner = lhs.partition("(")
                args = tuple(a.strip() for a in inner[:-1].split(","))
            else:
                pred, args = lhs, ()
            assignments.append((pred.strip(), args, value))

    if name is None:
        raise ParseError("missing 'model <name>' line")
    if domain is None:
        raise ParseError("missing 'domain' line")
    if file_language is None:
        raise ParseError("missing 'language' line")
    if language is not None and language != file_language:
        raise ParseError(
            f"model {name!r} declares language {file_language.predicates}, "
            f"expected {language.predicates}"
        )
    if algebra_name is not None and algebra_name != algebra.name:
        raise ParseError(
            f"model {name!r} declares algebra {algebra_name!r}, "
            f"got {algebra.name!r}"
        )

    lang = file_language
    interp: dict[str, dict[tuple[str, ...], str]] = {p: {} for p in lang.names}
    dom_set = set(domain)
    for pred, args, value in assignments:
        if not lang.has(pred):
            raise ParseError(f"model {name!r}: unknown predicate {pred!r}")
        if len(args) != lang.arity(pred):
            raise ParseError(f"model {name!r}: {pred} arity mismatch on {args}")
        for a in args:
            if a not in dom_set:
                raise ParseError(f"model {name!r}: {a!r} not in domain")
        interp[pred][args] = value
    for pred, arity in lang.predicates:
        default = defaults.get(pred)
        if default is None:
            continue
        for args in itertools.product(sorted(domain), repeat=arity):
            interp[pred].setdefault(args, default)

    return build_model(name, algebra, lang, domain, interp)


def save_model(model: PModel) -> str:
    """Render a model file that reloads to an identical model."""
    lines = [
        f"model {model.name}",
        f"algebra {model.algebra.name}",
        "language " + " ".join(f"{n}:{a}" for n, a in model.language.predicates),
        "domain " + " ".join(model.domain),
    ]
    for pred, arity in model.language.predicates:
        for args in itertools.product(model.domain, repeat=arity):
            value = model.interp[pred][args]
            if arity == 0:
                lines.append(f"{pred} = {value}")
            else:
                lines.append(f"{pred}({','.join(args)}) = {value}")
    return "\n".join(lines) + "\n"


def _slots(language: PredicateLanguage, domain: tuple[str, ...]):
    slots = []
    for pred, arity in language.predicates:
        for args in itertools.product(domain, repeat=arity):
            slots.append((pred, args))
    return slots


def count_models(
    algebra: InterpretingLattice, language: PredicateLanguage, max_domain: int
) -> int:
    total = 0
    for size in range(1, max_domain + 1):
        cells = sum(size ** arity for _, arity in language.predicates)
        total += len(algebra.carrier) ** cells
    return total


def generate_models(
    algebra: InterpretingLattice,
    language: PredicateLanguage,
    max_domain: int,
    cap: int = 1_000_000,
    sample: Optional[int] = None,
    seed: int = 0,
) -> Iterator[PModel]:
    """All models with domain size 1..max_domain, in a fixed order.

    Exhaustive by default (guarded by ``cap``); with ``sample`` set, emits
    that many seeded-random models instead, deterministically per seed.
    """
    if max_domain < 1:
        raise BoundsTooLarge("max_domain must be at least 1 (domains are nonempty)")
    if sample is None:
        total = count_models(algebra, language, max_domain)
        if total > cap:
            raise BoundsTooLarge(
                f"{total} models exceed the cap of {cap}; use sampling"
            )
        counter = 0
        for size in range(1, max_domain + 1):
            domain = tuple(f"e{i}" for i in range(1, size + 1))
            slots = _slots(language, domain)
            for values in itertools.product(algebra.carrier, repeat=len(slots)):
                interp: dict[str, dict[tuple[str, ...], str]] = {
                    p: {} for p in language.names
                }
                for (pred, args), value in zip(slots, values):
                    interp[pred][args] = value
                counter += 1
                yield build_model(f"gen{counter}", algebra, language, domain, interp)
    else:
        rng = random.Random(seed)
        for i in range(1, sample + 1):
            size = rng.randint(1, max_domain)
            domain = tuple(f"e{j}" for j in range(1, size + 1))
            interp = {p: {} for p in language.names}
            for pred, args in _slots(language, domain):
                interp[pred][args] = rng.choice(algebra.carrier)
            yield build_model(f"sample{i}", algebra, language, domain, interp)
