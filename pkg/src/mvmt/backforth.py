"""Back-and-forth systems between models, fixed-algebra and mixed.

Systems are computed as greatest fixed points: start from the set of all
partial isomorphisms and repeatedly discard maps lacking the required
extensions into the previous level.  Any valid system is contained in this
greatest candidate, so pruning finds a system exactly when one exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .errors import AlgebraMismatch, MvmtError, SignatureMismatch
from .structure import PModel

PairMap = tuple[tuple[str, str], ...]  # sorted (source, target) pairs


def _as_map(pairs: PairMap) -> dict[str, str]:
    return dict(pairs)


def _extends(small: PairMap, big: PairMap) -> bool:
    return set(small) <= set(big)


@dataclass(frozen=True)
class SimplePartialIso:
    """Injective partial domain map preserving relation values exactly."""

    r: PairMap

    def dom(self):
        return [a for a, _ in self.r]

    def im(self):
        return [b for _, b in self.r]


@dataclass(frozen=True)
class PartialIso:
    """A pair of injective partial maps: p on carriers, r on domains."""

    p: PairMap
    r: PairMap


@dataclass(frozen=True)
class BackForthSystem:
    """Descending levels[k] of partial isomorphisms with extension properties."""

    levels: tuple[frozenset, ...]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def level_sizes(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)


def _relation_tuples_ok_simple(M: PModel, N: PModel, rmap: dict[str, str]) -> bool:
    for pred, arity in M.language.predicates:
        for args in itertools.product(sorted(rmap), repeat=arity):
            if M.interp[pred][args] != N.interp[pred][tuple(rmap[a] for a in args)]:
                return False
    return True


def simple_partial_isos(M: PModel, N: PModel) -> list[SimplePartialIso]:
    """Every injective partial map respecting all covered relation tuples.

    The empty map qualifies only when all nullary predicates agree, since a
    nullary tuple lies inside every map's domain.
    """
    out = []
    max_k = min(len(M.domain), len(N.domain))
    for k in range(0, max_k + 1):
        for sources in itertools.combinations(M.domain, k):
            for targets in itertools.permutations(N.domain, k):
                rmap = dict(zip(sources, targets))
                if _relation_tuples_ok_simple(M, N, rmap):
                    out.append(SimplePartialIso(tuple(sorted(rmap.items()))))
    return out


def _mixed_conditions_ok(M, N, pmap, rmap) -> bool:
    A, B = M.algebra, N.algebra
    for op, arity in A.signature.connectives:
        for args in itertools.product(sorted(pmap), repeat=arity):
            result = A.ops[op][args]
            if result in pmap:
                if pmap[result] != B.ops[op][tuple(pmap[a] for a in args)]:
                    return False
    for pred, arity in M.language.predicates:
        for args in itertools.product(sorted(rmap), repeat=arity):
            value = M.interp[pred][args]
            if value not in pmap:
                return False
            if pmap[value] != N.interp[pred][tuple(rmap[a] for a in args)]:
                return False
    return True


def mixed_partial_isos(
    M: PModel, N: PModel, algebra_fragment_bound: int
) -> list[PartialIso]:
    A, B = M.algebra, N.algebra
    out = []
    max_p = min(len(A.carrier), len(B.carrier), algebra_fragment_bound)
    max_r = min(len(M.domain), len(N.domain))
    pmaps = []
    for k in range(0, max_p + 1):
        for sources in itertools.combinations(A.carrier, k):
            for targets in itertools.permutations(B.carrier, k):
                pmaps.append(dict(zip(sources, targets)))
    for k in range(0, max_r + 1):
        for sources in itertools.combinations(M.domain, k):
            for targets in itertools.permutations(N.domain, k):
                rmap = dict(zip(sources, targets))
                for pmap in pmaps:
                    if _mixed_conditions_ok(M, N, pmap, rmap):
                        out.append(
                            PartialIso(
                                tuple(sorted(pmap.items())),
                                tuple(sorted(rmap.items())),
                            )
                        )
    return out


def _prune_simple(level: frozenset, M: PModel, N: PModel) -> frozenset:
    kept = []
    for iso in level:
        ok = True
        for m in M.domain:
            if not any(
                _extends(iso.r, other.r) and m in _as_map(other.r)
                for other in level
            ):
                ok = False
                break
        if ok:
            for nn in N.domain:
                if not any(
                    _extends(iso.r, other.r) and nn in _as_map(other.r).values()
                    for other in level
                ):
                    ok = False
                    break
        if ok:
            kept.append(iso)
    return frozenset(kept)


def _prune_mixed(level: frozenset, M: PModel, N: PModel) -> frozenset:
    A, B = M.algebra, N.algebra
    kept = []
    for iso in level:
        requirements = []
        for m in M.domain:  # Forth R
            requirements.append(
                lambda other, m=m: iso.p == other.p
                and _extends(iso.r, other.r)
                and m in _as_map(other.r)
            )
        for nn in N.domain:  # Back R
            requirements.append(
                lambda other, nn=nn: iso.p == other.p
                and _extends(iso.r, other.r)
                and nn in _as_map(other.r).values()
            )
        for a in A.carrier:  # Forth L
            requirements.append(
                lambda other, a=a: iso.r == other.r
                and _extends(iso.p, other.p)
                and a in _as_map(other.p)
            )
        for b in B.carrier:  # Back L
            requirements.append(
                lambda other, b=b: iso.r == other.r
                and _extends(iso.p, other.p)
                and b in _as_map(other.p).values()
            )
        if all(any(req(other) for other in level) for req in requirements):
            kept.append(iso)
    return frozenset(kept)


def find_system_fixed(M: PModel, N: PModel, n: int) -> Optional[BackForthSystem]:
    """Greatest back-and-forth system of depth n over a shared algebra."""
    if M.algebra != N.algebra:
        raise AlgebraMismatch("fixed-algebra systems need a shared algebra")
    if M.language != N.language:
        raise SignatureMismatch("models use different predicate languages")
    levels = [frozenset(simple_partial_isos(M, N))]
    for _ in range(n):
        levels.append(_prune_simple(levels[-1], M, N))
    if not levels[-1]:
        return None
    return BackForthSystem(tuple(levels))


def find_system_mixed(
    M: PModel,
    N: PModel,
    n: int,
    algebra_fragment_bound: Optional[int] = None,
) -> Optional[BackForthSystem]:
    """Mixed-algebra variant; absence is relative to the fragment bound.

    With the default bound (the full smaller carrier) the search is exact
    for finite algebras.
    """
    if frozenset(M.algebra.signature.connectives) != frozenset(
        N.algebra.signature.connectives
    ):
        raise SignatureMismatch("algebra signatures differ")
    if M.language != N.language:
        raise SignatureMismatch("models use different predicate languages")
    if algebra_fragment_bound is None:
        algebra_fragment_bound = min(len(M.algebra.carrier), len(N.algebra.carrier))
    levels = [frozenset(mixed_partial_isos(M, N, algebra_fragment_bound))]
    for _ in range(n):
        levels.append(_prune_mixed(levels[-1], M, N))
    if not levels[-1]:
        return None
    return BackForthSystem(tuple(levels))


def first_inextensible(
    M: PModel, N: PModel, n: int, mixed: bool = False
) -> Optional[tuple[int, object, str]]:
    """Diagnostic for absence: (level, map, failed requirement) or None.

    When some pruning level empties within n steps, every map at the
    previous level was inextensible; the first of them (in print order) is
    reported with its failing requirement.
    """
    if mixed:
        level = frozenset(
            mixed_partial_isos(
                M, N, min(len(M.algebra.carrier), len(N.algebra.carrier))
            )
        )
        prune = _prune_mixed
    else:
        level = frozenset(simple_partial_isos(M, N))
        prune = _prune_simple
    if not level:
        return (0, None, "no partial isomorphisms at all")
    for k in range(1, n + 1):
        nxt = prune(level, M, N)
        if not nxt:
            iso = sorted(level, key=str)[0]
            return (k, iso, _failure_reason(iso, level, M, N, mixed))
        level = nxt
    return None


def _failure_reason(iso, level, M, N, mixed) -> str:
    rmap = _as_map(iso.r)
    for m in M.domain:
        if mixed:
            found = any(
                iso.p == o.p and _extends(iso.r, o.r) and m in _as_map(o.r)
                for o in level
            )
        else:
            found = any(
                _extends(iso.r, o.r) and m in _as_map(o.r) for o in level
            )
        if not found:
            return f"no forth extension covering source element {m!r}"
    for nn in N.domain:
        if mixed:
            found = any(
                iso.p == o.p and _extends(iso.r, o.r) and nn in _as_map(o.r).values()
                for o in level
            )
        else:
            found = any(
                _extends(iso.r, o.r) and nn in _as_map(o.r).values() for o in level
            )
        if not found:
            return f"no back extension covering target element {nn!r}"
    if mixed:
        for a in M.algebra.carrier:
            if not any(
                iso.r == o.r and _extends(iso.p, o.p) and a in _as_map(o.p)
                for o in level
            ):
                return f"no forth extension covering carrier element {a!r}"
        for b in N.algebra.carrier:
            if not any(
                iso.r == o.r and _extends(iso.p, o.p) and b in _as_map(o.p).values()
                for o in level
            ):
                return f"no back extension covering carrier element {b!r}"
    return "extension failure"


@dataclass(frozen=True)
class TransferReport:
    ok: bool
    checked: int
    certificate: Optional[object] = None


def transfer_check_fixed(M: PModel, N: PModel, n: int, bounds) -> TransferReport:
    """System at depth n must imply value agreement at quantifier depth n.

    A failure here would falsify the implementation, not the theory; the
    enumeration-based equivalence is the ground truth being compared.
    """
    from .semantics import strong_equiv_n

    if find_system_fixed(M, N, n) is None:
        raise MvmtError(f"no fixed-algebra system at depth {n}")
    result = strong_equiv_n(M, N, n, bounds)
    return TransferReport(result.equivalent, result.checked, result.certificate)


def transfer_check_mixed(M: PModel, N: PModel, n: int, bounds) -> TransferReport:
    """Mixed variant: system at depth n against validity agreement at nr <= n."""
    from .semantics import equiv_n

    if find_system_mixed(M, N, n) is None:
        raise MvmtError(f"no mixed system at depth {n}")
    result = equiv_n(M, N, n, bounds)
    return TransferReport(result.equivalent, result.checked, result.certificate)

