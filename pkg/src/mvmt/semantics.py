"""Truth-value evaluation and bounded elementary-equivalence checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .algebra import CONJ, JOIN, MEET
from .errors import AlgebraMismatch, MvmtError, NotASentence, SignatureMismatch
from .language import (
    Atom,
    Connective,
    E_AND_P,
    E_P,
    EnumerationBounds,
    Formula,
    Quantifier,
    classify_sentence,
    enumerate_sentences,
    flatten,
    free_vars,
    is_sentence,
    nested_rank,
    quantifier_depth,
)
from .structure import PModel, Valuation


def evaluate(model: PModel, f: Formula, valuation: Optional[Valuation] = None) -> str:
    """The truth value of ``f`` in ``model`` under ``valuation``.

    Quantifiers fold join (exists) and meet (forall) over the domain in its
    fixed lexicographic order; finiteness makes every formula defined.
    """
    v = dict(valuation) if valuation else {}

    def rec(node, env):
        if isinstance(node, Atom):
            return model.interp[node.pred][tuple(env[x] for x in node.args)]
        if isinstance(node, Connective):
            args = tuple(rec(c, env) for c in node.children)
            return model.algebra.op(node.name, *args)
        fold = model.algebra.join if node.kind == "exists" else model.algebra.meet
        acc = None
        for m in model.domain:
            env[node.var] = m
            val = rec(node.body, env)
            acc = val if acc is None else fold(acc, val)
        del env[node.var]
        return acc

    missing = free_vars(f) - set(v)
    if missing:
        raise NotASentence(f"valuation misses variables {sorted(missing)}")
    return rec(f, v)


def satisfies(model: PModel, sentence: Formula) -> bool:
    """True iff the sentence's value lies in the designated filter."""
    if not is_sentence(sentence):
        raise NotASentence(f"free variables {sorted(free_vars(sentence))}")
    return evaluate(model, sentence) in model.algebra.filter


def witness_exists(
    model: PModel, f: Formula, valuation: Optional[Valuation] = None
) -> Optional[str]:
    """A domain element witnessing a leading existential, if the formula holds.

    For finite models over a prime filter, a witness exists exactly when the
    existential formula is valid, so ``None`` means the formula fails.
    """
    if not isinstance(f, Quantifier) or f.kind != "exists":
        raise MvmtError("witness search needs a formula leading with exists")
    v = dict(valuation) if valuation else {}
    for m in model.domain:
        v[f.var] = m
        if evaluate(model, f.body, v) in model.algebra.filter:
            return m
    return None


def _pp_disjunct_atoms(disjunct: Formula) -> tuple[tuple[str, ...], list[Atom]]:
    """Existential prefix variables and the atoms of a primitive matrix."""
    vars_: list[str] = []
    node = disjunct
    while isinstance(node, Quantifier) and node.kind == "exists":
        vars_.append(node.var)
        node = node.body
    atoms: list[Atom] = []
    for block in flatten(MEET, node):
        for leaf in flatten(CONJ, block):
            if not isinstance(leaf, Atom):
                raise MvmtError(
                    "atomic-witness criterion needs an existential-positive shape"
                )
            atoms.append(leaf)
    return tuple(vars_), atoms


def atomic_witness_satisfies(
    model: PModel, sentence: Formula, require_top: bool = False
) -> bool:
    """Decide validity by searching for an atomic witness tuple.

    Some disjunct must admit an assignment of its existential variables
    under which every atomic subformula's interpretation lies in the filter
    (or equals the lattice top with ``require_top``).  This is the
    independent route against which direct evaluation is compared.
    """
    if not is_sentence(sentence):
        raise NotASentence(f"free variables {sorted(free_vars(sentence))}")
    good = (
        (lambda val: val == model.algebra.top)
        if require_top
        else (lambda val: val in model.algebra.filter)
    )
    for disjunct in flatten(JOIN, sentence):
        vars_, atoms = _pp_disjunct_atoms(disjunct)
        for assignment in itertools.product(model.domain, repeat=len(vars_)):
            env = dict(zip(vars_, assignment))
            if all(
                good(model.interp[a.pred][tuple(env[x] for x in a.args)])
                for a in atoms
            ):
                return True
    return False


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    certificate: Optional[Formula]
    checked: int
    values: Optional[tuple[str, str]] = None


def _shared_sentences(m1, m2, bounds, whitelist):
    if m1.language != m2.language:
        raise SignatureMismatch("models use different predicate languages")
    if m1.algebra.signature != m2.algebra.signature:
        raise SignatureMismatch("models use different connective signatures")
    return enumerate_sentences(m1.language, m1.algebra.signature, bounds, whitelist)


def equiv_n(
    m1: PModel,
    m2: PModel,
    n: int,
    bounds: EnumerationBounds,
    whitelist: Optional[Iterable[str]] = None,
) -> EquivalenceResult:
    """Agreement on validity for every enumerated sentence of nested rank <= n.

    Ground truth at desk scale is enumeration under explicit bounds; a
    ``False`` result carries a distinguishing sentence.
    """
    checked = 0
    for sentence in _shared_sentences(m1, m2, bounds, whitelist):
        if nested_rank(sentence) > n:
            continue
        checked += 1
        if satisfies(m1, sentence) != satisfies(m2, sentence):
            return EquivalenceResult(False, sentence, checked)
    return EquivalenceResult(True, None, checked)


def strong_equiv_n(
    m1: PModel,
    m2: PModel,
    n: int,
    bounds: EnumerationBounds,
    whitelist: Optional[Iterable[str]] = None,
) -> EquivalenceResult:
    """Equality of truth values for every enumerated sentence of qd <= n."""
    if m1.algebra != m2.algebra:
        raise AlgebraMismatch("strong equivalence requires a shared algebra")
    checked = 0
    for sentence in _shared_sentences(m1, m2, bounds, whitelist):
        if quantifier_depth(sentence) > n:
            continue
        checked += 1
        v1, v2 = evaluate(m1, sentence), evaluate(m2, sentence)
        if v1 != v2:
            return EquivalenceResult(False, sentence, checked, (v1, v2))
    return EquivalenceResult(True, None, checked)


def sentence_is_ep(sentence: Formula) -> bool:
    return E_P in classify_sentence(sentence)


def sentence_is_eandp(sentence: Formula) -> bool:
    return E_AND_P in classify_sentence(sentence)
