"""Finite interpreting lattices: operation tables, derived order, prime filters.

An interpreting lattice is a finite algebra whose signature contains at
least binary ``join`` and ``meet`` (forming a lattice) together with a
designated prime filter of "true" values.  Infinite carriers are out of
scope: the rational-valued chain examples are represented by finite
sub-carriers closed under every declared operation, so quantifier suprema
and infima always exist.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .errors import (
    CarrierNotClosed,
    FilterNotPrime,
    LatticeAxiomViolation,
    NoStrongConjunction,
    NoUnit,
    ParseError,
    UnknownElement,
)

JOIN = "join"
MEET = "meet"
CONJ = "conj"

OpTable = Mapping[tuple, str]


def _as_fraction(token: str) -> Optional[Fraction]:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        return None


def normalize_element(token: str) -> str:
    """Canonicalize rational tokens (``4/6`` -> ``2/3``); others pass through."""
    frac = _as_fraction(token)
    return str(frac) if frac is not None else token


@dataclass(frozen=True)
class ConnectiveSignature:
    """Names and arities of the algebraic connectives."""

    connectives: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.connectives]
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate connective names in {names}")
        arities = dict(self.connectives)
        for required in (JOIN, MEET):
            if arities.get(required) != 2:
                raise ParseError(f"signature must contain binary {required!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.connectives)

    def arity(self, name: str) -> int:
        for n, a in self.connectives:
            if n == name:
                return a
        raise UnknownElement(f"no connective named {name!r}")

    def has(self, name: str) -> bool:
        return any(n == name for n, _ in self.connectives)


@dataclass(frozen=True)
class InterpretingLattice:
    """A finite lattice-bearing algebra with a designated filter.

    ``ops`` holds a total table per connective (computed chain rules are
    materialized into tables at build time, so evaluation is uniform).
    Instances are immutable after construction and safe to share.
    """

    name: str
    signature: ConnectiveSignature
    carrier: tuple[str, ...]
    ops: dict[str, dict[tuple, str]]
    filter: frozenset[str]
    kind: str = "table"
    prime_checked: bool = field(default=True, compare=False)

    def op(self, name: str, *args: str) -> str:
        try:
            table = self.ops[name]
        except KeyError:
            raise UnknownElement(f"algebra {self.name!r} has no op {name!r}") from None
        return table[args]

    def join(self, a: str, b: str) -> str:
        return self.ops[JOIN][(a, b)]

    def meet(self, a: str, b: str) -> str:
        return self.ops[MEET][(a, b)]

    def leq(self, a: str, b: str) -> bool:
        for x in (a, b):
            if x not in self._index:
                raise UnknownElement(f"{x!r} not in carrier of {self.name!r}")
        return self.meet(a, b) == a

    @property
    def _index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.carrier)}

    @property
    def top(self) -> str:
        acc = self.carrier[0]
        for e in self.carrier[1:]:
            acc = self.join(acc, e)
        return acc

    @property
    def bottom(self) -> str:
        acc = self.carrier[0]
        for e in self.carrier[1:]:
            acc = self.meet(acc, e)
        return acc

    def join_all(self, values: Iterable[str]) -> str:
        it = iter(values)
        acc = next(it)
        for v in it:
            acc = self.join(acc, v)
        return acc

    def meet_all(self, values: Iterable[str]) -> str:
        it = iter(values)
        acc = next(it)
        for v in it:
            acc = self.meet(acc, v)
        return acc


def leq(algebra: InterpretingLattice, a: str, b: str) -> bool:
    """Lattice order: a <= b iff meet(a, b) = a."""
    return algebra.leq(a, b)


def _check_closure_and_totality(carrier, signature, ops):
    cset = set(carrier)
    for name, arity in signature.connectives:
        table = ops.get(name)
        if table is None:
            raise ParseError(f"missing table for op {name!r}")
        for args in itertools.product(carrier, repeat=arity):
            if args not in table:
                raise ParseError(f"op {name!r} missing row for {args}")
            out = table[args]
            if out not in cset:
                raise CarrierNotClosed(name, args, out)


def _check_lattice_axioms(carrier, ops):
    meet, join = ops[MEET], ops[JOIN]
    for a in carrier:
        if meet[(a, a)] != a:
            raise LatticeAxiomViolation("idempotence(meet)", (a,))
        if join[(a, a)] != a:
            raise LatticeAxiomViolation("idempotence(join)", (a,))
    for a, b in itertools.product(carrier, repeat=2):
        if meet[(a, b)] != meet[(b, a)]:
            raise LatticeAxiomViolation("commutativity(meet)", (a, b))
        if join[(a, b)] != join[(b, a)]:
            raise LatticeAxiomViolation("commutativity(join)", (a, b))
        if meet[(a, join[(a, b)])] != a:
            raise LatticeAxiomViolation("absorption(meet-join)", (a, b))
        if join[(a, meet[(a, b)])] != a:
            raise LatticeAxiomViolation("absorption(join-meet)", (a, b))
    for a, b, c in itertools.product(carrier, repeat=3):
        if meet[(meet[(a, b)], c)] != meet[(a, meet[(b, c)])]:
            raise LatticeAxiomViolation("associativity(meet)", (a, b, c))
        if join[(join[(a, b)], c)] != join[(a, join[(b, c)])]:
            raise LatticeAxiomViolation("associativity(join)", (a, b, c))


def _check_order_consistency(carrier, ops):
    meet, join = ops[MEET], ops[JOIN]

    def le(a, b):
        return meet[(a, b)] == a

    for a, b in itertools.product(carrier, repeat=2):
        j = join[(a, b)]
        if not (le(a, j) and le(b, j)):
            raise LatticeAxiomViolation("join-upper-bound", (a, b))
        for c in carrier:
            if le(a, c) and le(b, c) and not le(j, c):
                raise LatticeAxiomViolation("join-least-upper-bound", (a, b, c))


def _check_prime_filter(carrier, ops, filt):
    if not filt:
        raise FilterNotPrime("nonempty", (), ": filter is empty")
    if len(carrier) > 1 and set(filt) == set(carrier):
        raise FilterNotPrime("proper", (), ": filter equals the carrier")
    meet, join = ops[MEET], ops[JOIN]
    for a, b in itertools.product(carrier, repeat=2):
        if (meet[(a, b)] in filt) != (a in filt and b in filt):
            raise FilterNotPrime(
                "meet", (a, b), f": meet({a},{b})={meet[(a, b)]}"
            )
        if (join[(a, b)] in filt) != (a in filt or b in filt):
            raise FilterNotPrime(
                "join", (a, b), f": join({a},{b})={join[(a, b)]}"
            )


def build_algebra(
    name: str,
    signature: ConnectiveSignature,
    carrier: Iterable[str],
    ops: Mapping[str, Mapping[tuple, str]],
    filter_elements: Iterable[str],
    kind: str = "table",
    require_prime: bool = True,
) -> InterpretingLattice:
    """Validate and build an interpreting lattice from explicit tables.

    ``require_prime=False`` skips only the prime-filter laws; it exists for
    the bundled counterexample that demonstrates why those laws matter.
    The file loader never relaxes the check.
    """
    carrier = tuple(carrier)
    if not carrier:
        raise ParseError("carrier must be nonempty")
    if len(set(carrier)) != len(carrier):
        raise ParseError("carrier elements must be distinct")
    ops = {n: dict(t) for n, t in ops.items()}
    filt = frozenset(filter_elements)
    if not filt <= set(carrier):
        raise UnknownElement(f"filter {sorted(filt)} not within carrier")
    _check_closure_and_totality(carrier, signature, ops)
    _check_lattice_axioms(carrier, ops)
    _check_order_consistency(carrier, ops)
    if require_prime:
        _check_prime_filter(carrier, ops, filt)
    return InterpretingLattice(
        name=name,
        signature=signature,
        carrier=carrier,
        ops=ops,
        filter=filt,
        kind=kind,
        prime_checked=require_prime,
    )


def chain_table(carrier: tuple[str, ...], which: str) -> dict[tuple, str]:
    """Materialize max/min over the listed (ascending) carrier order."""
    pos = {e: i for i, e in enumerate(carrier)}
    pick = max if which == "max" else min
    return {
        (a, b): carrier[pick(pos[a], pos[b])]
        for a, b in itertools.product(carrier, repeat=2)
    }


def load_algebra(text: str) -> InterpretingLattice:
    """Parse and validate an algebra file.

    Grammar (line oriented, ``#`` comments)::

        algebra <name>
        carrier <e1> <e2> ...
        order chain | order table  (then ``leq <a> <b>`` lines)
        op <name> <arity> = max|min|table  (tables: ``row <args...> -> <value>``)
        filter upset <e> | filter set <e1> <e2> ...
    """
    name = None
    carrier: Optional[tuple[str, ...]] = None
    order_kind = None
    declared_leq: list[tuple[str, str]] = []
    op_decls: list[tuple[str, int, str]] = []
    tables: dict[str, dict[tuple, str]] = {}
    current_op = None
    filter_spec = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]

        def fail(msg):
            raise ParseError(f"line {lineno}: {msg}: {raw.strip()!r}")

        if head == "algebra":
            if len(tokens) != 2:
                fail("expected 'algebra <name>'")
            name = tokens[1]
        elif head == "carrier":
            if len(tokens) < 2:
                fail("carrier needs at least one element")
            carrier = tuple(normalize_element(t) for t in tokens[1:])
        elif head == "order":
            if len(tokens) != 2 or tokens[1] not in ("chain", "table"):
                fail("expected 'order chain' or 'order table'")
            order_kind = tokens[1]
        elif head == "leq":
            if order_kind != "table":
                fail("'leq' lines require 'order table'")
            if len(tokens) != 3:
                fail("expected 'leq <a> <b>'")
            declared_leq.append(
                (normalize_element(tokens[1]), normalize_element(tokens[2]))
            )
        elif head == "op":
            if len(tokens) != 5 or tokens[3] != "=":
                fail("expected 'op <name> <arity> = max|min|table'")
            op_name, rule = tokens[1], tokens[4]
            try:
                arity = int(tokens[2])
            except ValueError:
                fail("arity must be a natural number")
            if arity < 0:
                fail("arity must be a natural number")
            if rule not in ("max", "min", "table"):
                fail("op rule must be max, min or table")
            op_decls.append((op_name, arity, rule))
            if rule == "table":
                tables[op_name] = {}
                current_op = (op_name, arity)
            else:
                if arity != 2:
                    fail("max/min rules are binary")
                current_op = None
        elif head == "row":
            if current_op is None:
                fail("'row' outside a table op")
            op_name, arity = current_op
            if "->" not in tokens:
                fail("expected 'row <args...> -> <value>'")
            arrow = tokens.index("->")
            args = tuple(normalize_element(t) for t in tokens[1:arrow])
            rest = tokens[arrow + 1 :]
            if len(args) != arity or len(rest) != 1:
                fail(f"row must give {arity} args and one value")
            tables[op_name][args] = normalize_element(rest[0])
        elif head == "filter":
            if len(tokens) < 3:
                fail("expected 'filter upset <e>' or 'filter set <e...>'")
            if tokens[1] == "upset":
                if len(tokens) != 3:
                    fail("expected 'filter upset <e>'")
                filter_spec = ("upset", normalize_element(tokens[2]))
            elif tokens[1] == "set":
                filter_spec = ("set", tuple(normalize_element(t) for t in tokens[2:]))
            else:
                fail("filter kind must be 'upset' or 'set'")
        else:
            fail(f"unknown directive {head!r}")

    if name is None:
        raise ParseError("missing 'algebra <name>' line")
    if carrier is None:
        raise ParseError("missing 'carrier' line")
    if order_kind is None:
        raise ParseError("missing 'order' line")
    if filter_spec is None:
        raise ParseError("missing 'filter' line")

    if order_kind == "chain":
        fracs = [_as_fraction(e) for e in carrier]
        if all(f is not None for f in fracs):
            if any(fracs[i] >= fracs[i + 1] for i in range(len(fracs) - 1)):
                raise ParseError("chain carrier must be listed strictly ascending")

    ops: dict[str, dict[tuple, str]] = {}
    for op_name, arity, rule in op_decls:
        if rule == "table":
            ops[op_name] = tables[op_name]
        else:
            if order_kind != "chain":
                raise ParseError(f"op {op_name!r}: max/min rules require 'order chain'")
            ops[op_name] = chain_table(carrier, rule)

    signature = ConnectiveSignature(tuple((n, a) for n, a, _ in op_decls))

    if filter_spec[0] == "upset":
        threshold = filter_spec[1]
        if threshold not in carrier:
            raise UnknownElement(f"filter threshold {threshold!r} not in carrier")
        meet = ops.get(MEET)
        if meet is None:
            raise ParseError("filter upset requires a meet op")
        filter_elements = [e for e in carrier if meet[(threshold, e)] == threshold]
    else:
        filter_elements = list(filter_spec[1])

    algebra = build_algebra(
        name,
        signature,
        carrier,
        ops,
        filter_elements,
        kind="computed-chain" if order_kind == "chain" else "table",
    )

    if order_kind == "chain":
        for i, a in enumerate(carrier):
            for b in carrier[i:]:
                if not algebra.leq(a, b):
                    raise LatticeAxiomViolation("chain-order-vs-meet", (a, b))
    if declared_leq:
        derived = {
            (a, b)
            for a, b in itertools.product(carrier, repeat=2)
            if algebra.leq(a, b)
        }
        closure = set(declared_leq) | {(e, e) for e in carrier}
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(tuple(closure), repeat=2):
                if b == c and (a, d) not in closure:
                    closure.add((a, d))
                    changed = True
        if closure != derived:
            diff = sorted(derived ^ closure)
            raise LatticeAxiomViolation("declared-order-vs-meet", tuple(diff[:3]))

    return algebra


def find_conj_unit(algebra: InterpretingLattice) -> str:
    """Two-sided unit of the strong conjunction, found by exhaustive search."""
    if not algebra.signature.has(CONJ):
        raise NoStrongConjunction(f"algebra {algebra.name!r} declares no conj")
    table = algebra.ops[CONJ]
    for u in algebra.carrier:
        if all(table[(u, x)] == x and table[(x, u)] == x for x in algebra.carrier):
            return u
    raise NoUnit(f"conj of {algebra.name!r} has no unit")


def is_integral(algebra: InterpretingLattice) -> bool:
    """True iff the unit of the strong conjunction is the lattice top."""
    return find_conj_unit(algebra) == algebra.top


@dataclass(frozen=True)
class ConjFilterReport:
    """Outcome of the exhaustive conj/filter compatibility check.

    A violation (a, b, direction) records a pair where
    ``conj(a, b) in F  iff  a in F and b in F`` fails; direction says which
    implication broke.
    """

    ok: bool
    violations: tuple[tuple[str, str, str], ...]

    @property
    def first(self):
        return self.violations[0] if self.violations else None


def check_strong_conj_filter_law(algebra: InterpretingLattice) -> ConjFilterReport:
    """Exhaustively test ``conj(a,b) in F iff a in F and b in F``."""
    if not algebra.signature.has(CONJ):
        raise NoStrongConjunction(f"algebra {algebra.name!r} declares no conj")
    table = algebra.ops[CONJ]
    filt = algebra.filter
    violations = []
    for a, b in itertools.product(algebra.carrier, repeat=2):
        left = table[(a, b)] in filt
        right = a in filt and b in filt
        if left and not right:
            violations.append((a, b, "conj-in-filter-but-args-not"))
        elif right and not left:
            violations.append((a, b, "args-in-filter-but-conj-not"))
    return ConjFilterReport(ok=not violations, violations=tuple(violations))


def is_monotone(algebra: InterpretingLattice, op_name: str) -> bool:
    """Check pointwise monotonicity of an op w.r.t. the lattice order."""
    arity = algebra.signature.arity(op_name)
    table = algebra.ops[op_name]
    if arity == 0:
        return True
    pairs = [
        (a, b)
        for a, b in itertools.product(algebra.carrier, repeat=2)
        if algebra.leq(a, b)
    ]
    for combo in itertools.product(pairs, repeat=arity):
        lo = tuple(p[0] for p in combo)
        hi = tuple(p[1] for p in combo)
        if not algebra.leq(table[lo], table[hi]):
            return False
    return True


@lru_cache(maxsize=1)
def two_element_algebra() -> InterpretingLattice:
    """The built-in two element Boolean algebra with F = {top}.

    Carries join, meet, a strong conjunction equal to meet, and both bound
    constants, so any positive sentence evaluates over it.
    """
    carrier = ("bot", "top")
    sig = ConnectiveSignature(
        ((JOIN, 2), (MEET, 2), (CONJ, 2), ("bot", 0), ("top", 0))
    )
    join = chain_table(carrier, "max")
    meet = chain_table(carrier, "min")
    ops = {
        JOIN: join,
        MEET: meet,
        CONJ: dict(meet),
        "bot": {(): "bot"},
        "top": {(): "top"},
    }
    return build_algebra("two", sig, carrier, ops, ["top"])
