"""Predicate languages, formula ASTs, parsing, ranks, and bounded enumeration.

Formulas are built from atoms, the algebraic connectives (``and``/``or``/``&``
in concrete syntax, i.e. meet/join/conj), and the two quantifiers.  There is
no negation, implication or equality; the studied fragments do not use them.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .algebra import CONJ, JOIN, MEET, ConnectiveSignature
from .errors import (
    ArityMismatch,
    BoundsTooLarge,
    NotASentence,
    ParseError,
    UnknownSymbol,
)


@dataclass(frozen=True)
class PredicateLanguage:
    """Relational predicate symbols with arities (arity 0 = truth constant)."""

    predicates: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.predicates]
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate predicate names in {names}")
        if any(a < 0 for _, a in self.predicates):
            raise ParseError("predicate arities must be natural numbers")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.predicates)

    def arity(self, name: str) -> int:
        for n, a in self.predicates:
            if n == name:
                return a
        raise UnknownSymbol(f"no predicate named {name!r}")

    def has(self, name: str) -> bool:
        return any(n == name for n, _ in self.predicates)


def parse_language(text: str) -> PredicateLanguage:
    """Parse ``R:2 P:1 T:0`` style declarations."""
    preds = []
    for tok in text.replace(",", " ").split():
        if ":" not in tok:
            raise ParseError(f"expected name:arity, got {tok!r}")
        name, _, arity = tok.partition(":")
        try:
            preds.append((name, int(arity)))
        except ValueError:
            raise ParseError(f"bad arity in {tok!r}") from None
    if not preds:
        raise ParseError("empty language")
    return PredicateLanguage(tuple(preds))


class Formula:
    """Base class for AST nodes; subclasses are frozen and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Connective(Formula):
    name: str
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Quantifier(Formula):
    kind: str  # "exists" | "forall"
    var: str
    body: Formula


EXISTS = "exists"
FORALL = "forall"

_KEYWORDS = {"exists", "forall", "and", "or"}

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([&().,])|(\S))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            break
        word, sym, bad = m.groups()
        if bad:
            raise ParseError(f"unexpected character {bad!r} at position {m.start(3)}")
        tokens.append(word or sym)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, language, signature):
        self.tokens = tokens
        self.pos = 0
        self.language = language
        self.signature = signature

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of formula")
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def parse(self):
        f = self.parse_or()
        if self.peek() is not None:
            raise ParseError(f"trailing input from {self.peek()!r}")
        return f

    def parse_or(self):
        f = self.parse_and()
        while self.peek() == "or":
            self.take()
            f = Connective(JOIN, (f, self.parse_and()))
        return f

    def parse_and(self):
        f = self.parse_conj()
        while self.peek() == "and":
            self.take()
            f = Connective(MEET, (f, self.parse_conj()))
        return f

    def parse_conj(self):
        f = self.parse_unary()
        while self.peek() == "&":
            self.take()
            if not self.signature.has(CONJ):
                raise UnknownSymbol("'&' used but the signature has no conj")
            f = Connective(CONJ, (f, self.parse_unary()))
        return f

    def parse_unary(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of formula")
        if tok == "(":
            self.take()
            f = self.parse_or()
            self.take(")")
            return f
        if tok in (EXISTS, FORALL):
            self.take()
            var = self.take()
            if var in _KEYWORDS or not var[0].isalpha() and var[0] != "_":
                raise ParseError(f"bad variable name {var!r}")
            self.take(".")
            return Quantifier(tok, var, self.parse_or())
        return self.parse_atom()

    def parse_atom(self):
        name = self.take()
        if name in _KEYWORDS or name in ("&", ")", ".", ","):
            raise ParseError(f"expected an atom, got {name!r}")
        if self.language.has(name):
            arity = self.language.arity(name)
            args: tuple[str, ...] = ()
            if self.peek() == "(":
                self.take()
                parts = [self.take()]
                while self.peek() == ",":
                    self.take()
                    parts.append(self.take())
                self.take(")")
                args = tuple(parts)
            if len(args) != arity:
                raise ArityMismatch(
                    f"{name} has arity {arity}, got {len(args)} arguments"
                )
            return Atom(name, args)
        if self.signature.has(name) and self.signature.arity(name) == 0:
            return Connective(name, ())
        raise UnknownSymbol(f"unknown symbol {name!r}")


def parse_formula(
    text: str, language: PredicateLanguage, signature: ConnectiveSignature
) -> Formula:
    """Parse the concrete syntax; see the module docstring for the grammar."""
    return _Parser(_tokenize(text), language, signature).parse()


_PREC = {JOIN: 1, MEET: 2, CONJ: 3}
_OP_TEXT = {JOIN: "or", MEET: "and", CONJ: "&"}


def format_formula(f: Formula) -> str:
    """Render with minimal parentheses; parse(format(f)) == f."""

    def fmt(node, parent_prec, is_tail):
        if isinstance(node, Atom):
            if node.args:
                return f"{node.pred}({', '.join(node.args)})"
            return node.pred
        if isinstance(node, Quantifier):
            s = f"{node.kind} {node.var}. {fmt(node.body, 0, True)}"
            if parent_prec > 0 and not is_tail:
                return f"({s})"
            return s
        if not node.children:
            return node.name
        if len(node.children) != 2 or node.name not in _PREC:
            raise UnknownSymbol(f"no concrete syntax for connective {node.name!r}")
        p = _PREC[node.name]
        wrapped = p < parent_prec
        left = fmt(node.children[0], p, False)
        right = fmt(node.children[1], p + 1, True if wrapped else is_tail)
        s = f"{left} {_OP_TEXT[node.name]} {right}"
        return f"({s})" if wrapped else s

    return fmt(f, 0, True)


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Connective):
        out: frozenset[str] = frozenset()
        for c in f.children:
            out |= free_vars(c)
        return out
    return free_vars(f.body) - {f.var}


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def validate_formula(
    f: Formula, language: PredicateLanguage, signature: ConnectiveSignature
) -> None:
    """Raise if arities disagree with the language or signature."""
    if isinstance(f, Atom):
        if language.arity(f.pred) != len(f.args):
            raise ArityMismatch(f"atom {f.pred} used with {len(f.args)} arguments")
    elif isinstance(f, Connective):
        if signature.arity(f.name) != len(f.children):
            raise ArityMismatch(f"connective {f.name} used with {len(f.children)}")
        for c in f.children:
            validate_formula(c, language, signature)
    else:
        validate_formula(f.body, language, signature)


def nested_rank(f: Formula) -> int:
    """Atoms 0; a connective adds 1 plus its children; a quantifier adds 3."""
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Connective):
        return 1 + sum(nested_rank(c) for c in f.children)
    return nested_rank(f.body) + 3


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Connective):
        return max((quantifier_depth(c) for c in f.children), default=0)
    return quantifier_depth(f.body) + 1


# --- syntactic class recognition -------------------------------------------

AND_PRIMITIVE = "and-primitive"
E_AND_P = "existential-and-positive"
CONJ_PRIMITIVE = "conj-primitive"
PRIMITIVE_POSITIVE = "primitive-positive"
E_CONJ_P = "existential-conj-positive"
E_P = "existential-positive"

ALL_CLASS_TAGS = (
    AND_PRIMITIVE,
    E_AND_P,
    CONJ_PRIMITIVE,
    PRIMITIVE_POSITIVE,
    E_CONJ_P,
    E_P,
)


def flatten(op: str, f: Formula) -> list[Formula]:
    """Leaves of the maximal ``op``-tree rooted at ``f``."""
    if isinstance(f, Connective) and f.name == op and f.children:
        out = []
        for c in f.children:
            out.extend(flatten(op, c))
        return out
    return [f]


def _strip_exists_prefix(f: Formula) -> tuple[tuple[str, ...], Formula]:
    vars_: list[str] = []
    while isinstance(f, Quantifier) and f.kind == EXISTS:
        vars_.append(f.var)
        f = f.body
    return tuple(vars_), f


def _is_and_primitive(f: Formula) -> bool:
    _, matrix = _strip_exists_prefix(f)
    return all(isinstance(leaf, Atom) for leaf in flatten(MEET, matrix))


def _is_conj_primitive(f: Formula) -> bool:
    _, matrix = _strip_exists_prefix(f)
    return all(isinstance(leaf, Atom) for leaf in flatten(CONJ, matrix))


def _is_primitive_positive(f: Formula) -> bool:
    _, matrix = _strip_exists_prefix(f)
    for block in flatten(MEET, matrix):
        if not all(isinstance(leaf, Atom) for leaf in flatten(CONJ, block)):
            return False
    return True


def classify_sentence(f: Formula) -> frozenset[str]:
    """All syntactic class tags applying to a sentence (empty set = none).

    Recognition is by exact shape (existential prefix over a conjunction
    spine), not up to logical equivalence: distributivity may fail in the
    target algebras, so the classes are defined directly on normal forms.
    """
    if not is_sentence(f):
        raise NotASentence(f"free variables {sorted(free_vars(f))}")
    tags = set()
    disjuncts = flatten(JOIN, f)
    if all(_is_and_primitive(d) for d in disjuncts):
        tags.add(E_AND_P)
    if all(_is_conj_primitive(d) for d in disjuncts):
        tags.add(E_CONJ_P)
    if all(_is_primitive_positive(d) for d in disjuncts):
        tags.add(E_P)
    if len(disjuncts) == 1:
        if E_AND_P in tags:
            tags.add(AND_PRIMITIVE)
        if E_CONJ_P in tags:
            tags.add(CONJ_PRIMITIVE)
        if E_P in tags:
            tags.add(PRIMITIVE_POSITIVE)
    return frozenset(tags)


# --- bounded enumeration ----------------------------------------------------

@dataclass(frozen=True)
class EnumerationBounds:
    """Explicit limits for sentence enumeration.

    ``max_connectives`` counts connective applications (a flat n-ary
    conjunction costs n-1); without it the sentence space is infinite even
    at fixed quantifier depth.
    """

    max_qd: int
    max_vars: int
    max_connectives: int = 2
    cap: int = 200_000


def _var(i: int) -> str:
    return f"x{i}"


# internal canonical representation: nested tuples, totally ordered
def _rep_atom(pred, args):
    return ("atom", pred, args)


def _rep_q(kind, var, body):
    return ("quant", kind, var, body)


def _rep_op(name, children):
    return ("op", name, children)


def _rep_free(rep) -> frozenset[str]:
    tag = rep[0]
    if tag == "atom":
        return frozenset(rep[2])
    if tag == "op":
        out = frozenset()
        for c in rep[2]:
            out |= _rep_free(c)
        return out
    return _rep_free(rep[3]) - {rep[2]}


def realize(rep) -> Formula:
    """Turn a canonical rep into a binary AST (left-nested chains)."""
    tag = rep[0]
    if tag == "atom":
        return Atom(rep[1], rep[2])
    if tag == "quant":
        return Quantifier(rep[1], rep[2], realize(rep[3]))
    name, children = rep[1], [realize(c) for c in rep[2]]
    if not children:
        return Connective(name, ())
    node = children[0]
    for c in children[1:]:
        node = Connective(name, (node, c))
    return node


class _Budget:
    def __init__(self, cap):
        self.cap = cap
        self.n = 0

    def tick(self, k=1):
        self.n += k
        if self.n > self.cap:
            raise BoundsTooLarge(f"enumeration exceeded cap of {self.cap} formulas")


def _binary_whitelist(signature, whitelist):
    if whitelist is None:
        names = [n for n in (JOIN, MEET, CONJ) if signature.has(n)]
        consts = [n for n, a in signature.connectives if a == 0]
    else:
        names, consts = [], []
        for n in whitelist:
            if not signature.has(n):
                raise UnknownSymbol(f"whitelisted connective {n!r} not in signature")
            arity = signature.arity(n)
            if arity == 2 and n in (JOIN, MEET, CONJ):
                names.append(n)
            elif arity == 0:
                consts.append(n)
            else:
                raise UnknownSymbol(f"no concrete syntax for {n!r}/{arity}")
    return names, consts


def _pool_for_depth(language, ops, consts, bounds, budget, depth, deeper_pool):
    """All canonical reps with free vars among x1..x_depth, within bounds."""
    scope = [_var(i) for i in range(1, depth + 1)]
    pool: dict[tuple, tuple[int, int]] = {}  # rep -> (connective count, qd)

    def add(rep, conn, qd):
        if rep not in pool:
            budget.tick()
            pool[rep] = (conn, qd)

    for pred, arity in language.predicates:
        if arity == 0:
            add(_rep_atom(pred, ()), 0, 0)
        else:
            for args in itertools.product(scope, repeat=arity):
                add(_rep_atom(pred, args), 0, 0)
    for name in consts:
        add(_rep_op(name, ()), 1, 0)

    if deeper_pool is not None:
        bound_var = _var(depth + 1)
        for rep, (conn, qd) in deeper_pool.items():
            if qd + 1 <= bounds.max_qd and bound_var in _rep_free(rep):
                for kind in (EXISTS, FORALL):
                    add(_rep_q(kind, bound_var, rep), conn, qd + 1)

    # close under flattened connective application until nothing new fits
    while True:
        added = []
        items = sorted(pool.items())
        for op in ops:
            eligible = [
                (rep, c, q) for rep, (c, q) in items if rep[0] != "op" or rep[1] != op
            ]
            chooser = (
                itertools.combinations_with_replacement
                if op == CONJ
                else itertools.combinations
            )
            max_width = bounds.max_connectives + 1
            for width in range(2, max_width + 1):
                for combo in chooser(eligible, width):
                    conn = sum(c for _, c, _ in combo) + width - 1
                    if conn > bounds.max_connectives:
                        continue
                    qd = max(q for _, _, q in combo)
                    rep = _rep_op(op, tuple(r for r, _, _ in combo))
                    if rep not in pool:
                        added.append((rep, conn, qd))
        if not added:
            break
        for rep, conn, qd in added:
            add(rep, conn, qd)
    return pool


def enumerate_sentences(
    language: PredicateLanguage,
    signature: ConnectiveSignature,
    bounds: EnumerationBounds,
    whitelist: Optional[Iterable[str]] = None,
    class_tag: Optional[str] = None,
) -> Iterator[Formula]:
    """Yield every sentence within the bounds, canonically and deterministically.

    Canonical form: bound variables are x1, x2, ... in binding order, each
    quantifier's variable occurs in its body, meet/join arguments are
    deduplicated and sorted, conj arguments are sorted with multiplicity.
    With ``class_tag`` a direct normal-form generator is used; it emits
    exactly the tagged subset of the unfiltered stream under equal bounds.
    """
    if class_tag is not None:
        yield from _enumerate_class(language, signature, bounds, class_tag)
        return
    ops, consts = _binary_whitelist(signature, whitelist)
    budget = _Budget(bounds.cap)
    deeper = None
    pools = {}
    for depth in range(min(bounds.max_vars, bounds.max_qd), -1, -1):
        deeper = _pool_for_depth(
            language, ops, consts, bounds, budget, depth, deeper
        )
        pools[depth] = deeper
    sentences = [
        (conn, qd, rep)
        for rep, (conn, qd) in pools[0].items()
        if not _rep_free(rep)
    ]
    for _, _, rep in sorted(sentences):
        yield realize(rep)


def _atom_reps(language, k):
    scope = [_var(i) for i in range(1, k + 1)]
    out = []
    for pred, arity in language.predicates:
        if arity == 0:
            out.append(_rep_atom(pred, ()))
        else:
            for args in itertools.product(scope, repeat=arity):
                out.append(_rep_atom(pred, args))
    return sorted(out)


def _covers_all_vars(reps, k) -> bool:
    used = set()
    for rep in reps:
        used |= _rep_free(rep)
    return used >= {_var(i) for i in range(1, k + 1)}


def _prefix(vars_count, matrix_rep):
    rep = matrix_rep
    for i in range(vars_count, 0, -1):
        rep = _rep_q(EXISTS, _var(i), rep)
    return rep


def _primitive_reps(language, bounds, block_op):
    """Existential prefixes over a single flattened block of atoms."""
    out = []
    chooser = (
        itertools.combinations_with_replacement
        if block_op == CONJ
        else itertools.combinations
    )
    for k in range(0, min(bounds.max_qd, bounds.max_vars) + 1):
        atoms = _atom_reps(language, k)
        for width in range(1, bounds.max_connectives + 2):
            if width - 1 > bounds.max_connectives:
                break
            for combo in chooser(atoms, width):
                if not _covers_all_vars(combo, k):
                    continue
                matrix = combo[0] if width == 1 else _rep_op(block_op, tuple(combo))
                out.append((width - 1, _prefix(k, matrix)))
    return out


def _pp_reps(language, bounds):
    """Existential prefixes over a meet of conj-blocks of atoms."""
    out = []
    for k in range(0, min(bounds.max_qd, bounds.max_vars) + 1):
        atoms = _atom_reps(language, k)
        blocks = []  # (cost, rep, is_plain_atom or conj block)
        for width in range(1, bounds.max_connectives + 2):
            for combo in itertools.combinations_with_replacement(atoms, width):
                cost = width - 1
                if cost > bounds.max_connectives:
                    continue
                rep = combo[0] if width == 1 else _rep_op(CONJ, tuple(combo))
                blocks.append((cost, rep))
        blocks.sort(key=lambda t: t[1])
        for nblocks in range(1, bounds.max_connectives + 2):
            for combo in itertools.combinations(blocks, nblocks):
                cost = sum(c for c, _ in combo) + nblocks - 1
                if cost > bounds.max_connectives:
                    continue
                reps = tuple(r for _, r in combo)
                if not _covers_all_vars(reps, k):
                    continue
                matrix = reps[0] if nblocks == 1 else _rep_op(MEET, reps)
                out.append((cost, _prefix(k, matrix)))
    return out


def _enumerate_class(language, signature, bounds, class_tag):
    needs_conj = class_tag in (CONJ_PRIMITIVE, E_CONJ_P, PRIMITIVE_POSITIVE, E_P)
    if needs_conj and not signature.has(CONJ):
        raise UnknownSymbol(f"class {class_tag!r} needs conj in the signature")
    if class_tag in (AND_PRIMITIVE, E_AND_P):
        primitives = _primitive_reps(language, bounds, MEET)
    elif class_tag in (CONJ_PRIMITIVE, E_CONJ_P):
        primitives = _primitive_reps(language, bounds, CONJ)
    elif class_tag in (PRIMITIVE_POSITIVE, E_P):
        primitives = _pp_reps(language, bounds)
    else:
        raise UnknownSymbol(f"unknown class tag {class_tag!r}")

    budget = _Budget(bounds.cap)
    seen = set()
    items = []

    def add(cost, rep):
        if rep not in seen:
            budget.tick()
            seen.add(rep)
            items.append((cost, quantifier_depth(realize(rep)), rep))

    if class_tag in (AND_PRIMITIVE, CONJ_PRIMITIVE, PRIMITIVE_POSITIVE):
        for cost, rep in primitives:
            add(cost, rep)
    else:
        primitives = sorted(set(primitives), key=lambda t: t[1])
        for m in range(1, bounds.max_connectives + 2):
            for combo in itertools.combinations(primitives, m):
                cost = sum(c for c, _ in combo) + m - 1
                if cost > bounds.max_connectives:
                    continue
                reps = tuple(r for _, r in combo)
                rep = reps[0] if m == 1 else _rep_op(JOIN, reps)
                add(cost, rep)

    for _, _, rep in sorted(items):
        yield realize(rep)
