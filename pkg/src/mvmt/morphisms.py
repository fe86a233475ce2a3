"""Search and verification for the four kinds of maps between models.

A protomorphism is a bare domain map preserving filter membership of
relation values; the other kinds pair it with an algebra homomorphism and
demand nothing (hom), order (mono) or equality (strong) on relation values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .algebra import InterpretingLattice
from .errors import DomainMismatch, SignatureMismatch
from .structure import PModel

PROTO = "proto"
HOM = "hom"
MONO = "mono"
STRONG = "strong"
KINDS = (PROTO, HOM, MONO, STRONG)


@dataclass(frozen=True)
class MorphismWitness:
    """A candidate map: ``g`` on domains, ``f`` on carriers (absent for proto)."""

    kind: str
    g: tuple[tuple[str, str], ...]
    f: Optional[tuple[tuple[str, str], ...]] = None

    @property
    def g_map(self) -> dict[str, str]:
        return dict(self.g)

    @property
    def f_map(self) -> Optional[dict[str, str]]:
        return None if self.f is None else dict(self.f)


def make_witness(kind, g_map, f_map=None) -> MorphismWitness:
    g = tuple(sorted(g_map.items()))
    f = None if f_map is None else tuple(sorted(f_map.items()))
    return MorphismWitness(kind, g, f)


@dataclass(frozen=True)
class MorphismCheck:
    ok: bool
    violations: tuple[tuple, ...]


def _check_g_totality(w: MorphismWitness, M: PModel, N: PModel):
    g = w.g_map
    if set(g) != set(M.domain):
        raise DomainMismatch("g must be total on the source domain")
    if not set(g.values()) <= set(N.domain):
        raise DomainMismatch("g maps outside the target domain")
    return g


def _check_f_totality(f_map, A: InterpretingLattice, B: InterpretingLattice):
    if set(f_map) != set(A.carrier):
        raise DomainMismatch("f must be total on the source carrier")
    if not set(f_map.values()) <= set(B.carrier):
        raise DomainMismatch("f maps outside the target carrier")


def check_morphism(w: MorphismWitness, M: PModel, N: PModel) -> MorphismCheck:
    """Verify exactly the defining condition of ``w.kind``; report violations."""
    if w.kind not in KINDS:
        raise DomainMismatch(f"unknown morphism kind {w.kind!r}")
    g = _check_g_totality(w, M, N)
    violations = []

    if w.kind == PROTO:
        if w.f is not None:
            raise DomainMismatch("protomorphisms carry no algebra map")
        f = None
    else:
        if w.f is None:
            raise DomainMismatch(f"{w.kind} witnesses need an algebra map f")
        A, B = M.algebra, N.algebra
        if frozenset(A.signature.connectives) != frozenset(B.signature.connectives):
            raise SignatureMismatch("algebra signatures differ")
        f = w.f_map
        _check_f_totality(f, A, B)
        for op, arity in A.signature.connectives:
            for args in itertools.product(A.carrier, repeat=arity):
                lhs = f[A.ops[op][args]]
                rhs = B.ops[op][tuple(f[a] for a in args)]
                if lhs != rhs:
                    violations.append(("connective", op, args, lhs, rhs))

    for pred, arity in M.language.predicates:
        for args in itertools.product(M.domain, repeat=arity):
            vm = M.interp[pred][args]
            vn = N.interp[pred][tuple(g[a] for a in args)]
            if vm in M.algebra.filter and vn not in N.algebra.filter:
                violations.append(("relation-filter", pred, args, vm, vn))
            if w.kind == MONO and not N.algebra.leq(f[vm], vn):
                violations.append(("relation-order", pred, args, f[vm], vn))
            if w.kind == STRONG and f[vm] != vn:
                violations.append(("relation-equal", pred, args, f[vm], vn))

    return MorphismCheck(ok=not violations, violations=tuple(violations))


def find_algebra_homs(
    A: InterpretingLattice, B: InterpretingLattice, mode: str = "all"
) -> Union[list[dict[str, str]], Optional[dict[str, str]], int]:
    """All maps A -> B commuting with every connective table.

    Filter preservation is deliberately not required; pass the result
    through an ``f(F) subset G`` filter yourself when experimenting with it.
    """
    if frozenset(A.signature.connectives) != frozenset(B.signature.connectives):
        raise SignatureMismatch(
            f"signatures of {A.name!r} and {B.name!r} differ"
        )
    order = A.carrier
    instances = []  # (op args..., result) per connective instance
    for op, arity in A.signature.connectives:
        for args in itertools.product(A.carrier, repeat=arity):
            instances.append((op, args, A.ops[op][args]))

    results: list[dict[str, str]] = []
    count = 0

    def consistent(assigned):
        for op, args, res in instances:
            if res in assigned and all(a in assigned for a in args):
                if B.ops[op][tuple(assigned[a] for a in args)] != assigned[res]:
                    return False
        return True

    def search(i, assigned):
        nonlocal count
        if i == len(order):
            if mode == "count":
                count += 1
            else:
                results.append(dict(assigned))
            return mode == "first"
        for value in B.carrier:
            assigned[order[i]] = value
            if consistent(assigned) and search(i + 1, assigned):
                return True
            del assigned[order[i]]
        return False

    search(0, {})
    if mode == "count":
        return count
    if mode == "first":
        return results[0] if results else None
    return results


def _constraint_tuples(M: PModel, kind: str):
    """Tuples that constrain the g-search, grouped by participating element."""
    relevant = []
    for pred, arity in M.language.predicates:
        for args in itertools.product(M.domain, repeat=arity):
            if kind in (MONO, STRONG) or M.interp[pred][args] in M.algebra.filter:
                relevant.append((pred, args))
    by_element: dict[str, list[tuple[str, tuple[str, ...]]]] = {
        m: [] for m in M.domain
    }
    for pred, args in relevant:
        for m in set(args):
            by_element[m].append((pred, args))
    return relevant, by_element


def _g_search(M, N, kind, f) -> Iterator[dict[str, str]]:
    """Backtracking over g assignments with forward checking.

    Variables are ordered by descending constraint degree (ties broken
    lexicographically); values are tried in domain order, so the first
    yielded witness is deterministic.
    """
    relevant, by_element = _constraint_tuples(M, kind)
    variables = sorted(M.domain, key=lambda m: (-len(by_element[m]), m))
    filt_M, filt_N = M.algebra.filter, N.algebra.filter
    leq = N.algebra.leq if kind == MONO else None

    def tuple_ok(pred, args, g):
        vm = M.interp[pred][args]
        vn = N.interp[pred][tuple(g[a] for a in args)]
        if kind == STRONG:
            return f[vm] == vn and (vm not in filt_M or vn in filt_N)
        if kind == MONO:
            return leq(f[vm], vn) and (vm not in filt_M or vn in filt_N)
        return vm not in filt_M or vn in filt_N

    def extend(i, g):
        if i == len(variables):
            yield dict(g)
            return
        m = variables[i]
        for target in N.domain:
            g[m] = target
            if all(
                tuple_ok(pred, args, g)
                for pred, args in by_element[m]
                if all(a in g for a in args)
            ):
                yield from extend(i + 1, g)
            del g[m]

    # nullary predicates constrain every map, including over empty domains
    nullary_ok = all(
        tuple_ok(pred, (), {}) for pred, args in relevant if args == ()
    )
    if nullary_ok:
        yield from extend(0, {})


def find_morphisms(
    kind: str,
    M: PModel,
    N: PModel,
    mode: str = "first",
    algebra_homs: Optional[list[dict[str, str]]] = None,
) -> Union[list[MorphismWitness], int]:
    """Search for witnesses of the given kind; ``mode="count"`` returns an int.

    For kinds beyond proto, every algebra homomorphism f is paired with the
    compatible domain maps; the witness list is exhaustive in ``all`` mode.
    Pass ``algebra_homs`` to reuse a precomputed hom list across many calls
    on the same algebra pair.
    """
    if kind not in KINDS:
        raise DomainMismatch(f"unknown morphism kind {kind!r}")
    witnesses: list[MorphismWitness] = []
    count = 0

    if kind == PROTO:
        f_choices: list[Optional[dict]] = [None]
    elif algebra_homs is not None:
        f_choices = algebra_homs
    else:
        f_choices = find_algebra_homs(M.algebra, N.algebra, "all")

    for f in f_choices:
        for g in _g_search(M, N, kind, f):
            if mode == "count":
                count += 1
            else:
                witnesses.append(make_witness(kind, g, f))
                if mode == "first":
                    return witnesses
    return count if mode == "count" else witnesses


def compose_witnesses(
    w1: MorphismWitness, w2: MorphismWitness
) -> MorphismWitness:
    """Composite of same-kind witnesses along M -> N -> S."""
    if w1.kind != w2.kind:
        raise DomainMismatch("can only compose witnesses of the same kind")
    g1, g2 = w1.g_map, w2.g_map
    g = {m: g2[v] for m, v in g1.items()}
    f = None
    if w1.f is not None:
        f1, f2 = w1.f_map, w2.f_map
        f = {a: f2[v] for a, v in f1.items()}
    return make_witness(w1.kind, g, f)
