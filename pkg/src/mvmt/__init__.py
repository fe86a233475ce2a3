"""Finite many-valued model theory over interpreting lattices."""

from .algebra import (
    ConnectiveSignature,
    InterpretingLattice,
    build_algebra,
    check_strong_conj_filter_law,
    find_conj_unit,
    is_integral,
    leq,
    load_algebra,
    two_element_algebra,
)
from .backforth import (
    BackForthSystem,
    PartialIso,
    SimplePartialIso,
    find_system_fixed,
    find_system_mixed,
    transfer_check_fixed,
    transfer_check_mixed,
)
from .bridge import (
    EliminationForest,
    Graph,
    canonical_sentence,
    check_translation_equivalence,
    enumerate_boolean_models,
    gaifman_graph,
    is_boolean_model,
    n_core_bounded,
    n_maps_to,
    separating_sentence,
    translate,
    tree_depth,
)
from .errors import MvmtError
from .language import (
    Atom,
    Connective,
    EnumerationBounds,
    Formula,
    PredicateLanguage,
    Quantifier,
    classify_sentence,
    enumerate_sentences,
    format_formula,
    nested_rank,
    parse_formula,
    parse_language,
    quantifier_depth,
)
from .morphisms import (
    MorphismWitness,
    check_morphism,
    compose_witnesses,
    find_algebra_homs,
    find_morphisms,
    make_witness,
)
from .preservation import (
    check_closure,
    replay_reference_examples,
    verify_ep_atomic_criterion,
    verify_monomorphism_lemma,
)
from .semantics import (
    atomic_witness_satisfies,
    equiv_n,
    evaluate,
    satisfies,
    strong_equiv_n,
    witness_exists,
)
from .structure import PModel, build_model, generate_models, load_model, save_model

__all__ = [name for name in dir() if not name.startswith("_")]
