"""The classical bridge: Boolean translation, tree-depth, canonical queries.

Thresholding a model's values at its filter yields a two-valued model that
doubles as a classical relational structure; protomorphism behaviour and
positive-existential validity survive the round trip, which lets classical
machinery (Gaifman graphs, tree-depth, canonical conjunctive sentences,
bounded cores) drive the many-valued side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .algebra import JOIN, MEET, two_element_algebra
from .errors import (
    AlgebraMismatch,
    BoundsTooLarge,
    CoreNotFound,
    GraphTooLarge,
    MvmtError,
    NoPositiveAtoms,
    SignatureMismatch,
)
from .language import (
    Atom,
    Connective,
    E_AND_P,
    EnumerationBounds,
    Formula,
    Quantifier,
    enumerate_sentences,
    format_formula,
)
from .morphisms import PROTO, find_morphisms, make_witness, check_morphism
from .semantics import satisfies
from .structure import PModel, build_model


TOP, BOT = "top", "bot"


def is_boolean_model(model: PModel) -> bool:
    return model.algebra == two_element_algebra()


def translate(model: PModel) -> PModel:
    """Threshold every value at the filter: in-filter -> top, else bot."""
    if is_boolean_model(model):
        return model
    two = two_element_algebra()
    filt = model.algebra.filter
    interp = {
        pred: {args: TOP if value in filt else BOT for args, value in rows.items()}
        for pred, rows in model.interp.items()
    }
    return build_model(f"{model.name}_bool", two, model.language, model.domain, interp)


@dataclass(frozen=True)
class TranslationReport:
    ok: bool
    detail: str
    certificate: Optional[Formula] = None


def check_translation_equivalence(
    model: PModel, bounds: EnumerationBounds, boolean: Optional[PModel] = None
) -> TranslationReport:
    """Identity must witness proto both ways; positive validity must agree.

    ``boolean`` defaults to the computed translation; passing a claimed
    translation instead verifies that claim (a corrupted one fails).
    """
    if boolean is None:
        boolean = translate(model)
    identity = make_witness(PROTO, {m: m for m in model.domain})
    forth = check_morphism(identity, model, boolean)
    back = check_morphism(identity, boolean, model)
    if not forth.ok or not back.ok:
        return TranslationReport(False, "identity is not a two-way proto witness")
    whitelist = [n for n in (JOIN, MEET) if model.algebra.signature.has(n)]
    for sentence in enumerate_sentences(
        model.language, model.algebra.signature, bounds, whitelist, class_tag=E_AND_P
    ):
        if satisfies(model, sentence) != satisfies(boolean, sentence):
            return TranslationReport(
                False, "validity disagrees on a positive sentence", sentence
            )
    return TranslationReport(True, "two-way proto witness and validity agree")


# --- Gaifman graph and tree-depth -------------------------------------------

@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]  # normalized (min, max), no loops

    def neighbours(self, v: str) -> set[str]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out


def make_graph(vertices, edges) -> Graph:
    vs = tuple(sorted(set(vertices)))
    es = frozenset(
        (min(a, b), max(a, b)) for a, b in edges if a != b
    )
    for a, b in es:
        if a not in vs or b not in vs:
            raise MvmtError(f"edge ({a},{b}) uses unknown vertices")
    return Graph(vs, es)


def gaifman_graph(model: PModel) -> Graph:
    """Join two elements iff they co-occur in some filter-valued tuple."""
    edges = set()
    filt = model.algebra.filter
    for pred, rows in model.interp.items():
        for args, value in rows.items():
            if value in filt:
                for a, b in itertools.combinations(sorted(set(args)), 2):
                    edges.add((a, b))
    return make_graph(model.domain, edges)


@dataclass(frozen=True)
class ForestNode:
    vertex: str
    children: tuple["ForestNode", ...]


@dataclass(frozen=True)
class EliminationForest:
    roots: tuple[ForestNode, ...]

    @property
    def depth(self) -> int:
        def d(node):
            return 1 + max((d(c) for c in node.children), default=0)

        return max((d(r) for r in self.roots), default=0)

    def paths(self) -> dict[str, tuple[str, ...]]:
        """Vertex -> its root path (ancestors first, itself last)."""
        out = {}

        def walk(node, prefix):
            path = prefix + (node.vertex,)
            out[node.vertex] = path
            for c in node.children:
                walk(c, path)

        for r in self.roots:
            walk(r, ())
        return out

    def verify(self, graph: Graph) -> bool:
        paths = self.paths()
        if set(paths) != set(graph.vertices):
            return False
        for a, b in graph.edges:
            if a not in paths[b] and b not in paths[a]:
                return False
        return True


def _components(vertices: frozenset[str], adj) -> list[frozenset[str]]:
    remaining = set(vertices)
    comps = []
    while remaining:
        start = min(remaining)
        seen = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for w in adj[v] & remaining:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        comps.append(frozenset(seen))
        remaining -= seen
    return comps


def tree_depth(graph: Graph, cap: int = 12) -> tuple[int, EliminationForest]:
    """Exact tree-depth with a certifying elimination forest.

    Recursive definition (connected: 1 + best vertex removal; disconnected:
    max over components; empty: 0), memoized on vertex subsets.
    """
    if len(graph.vertices) > cap:
        raise GraphTooLarge(f"{len(graph.vertices)} vertices exceed cap {cap}")
    adj = {v: graph.neighbours(v) for v in graph.vertices}
    memo: dict[frozenset, tuple[int, tuple[ForestNode, ...]]] = {}

    def solve(vertices: frozenset[str]) -> tuple[int, tuple[ForestNode, ...]]:
        if not vertices:
            return 0, ()
        if vertices in memo:
            return memo[vertices]
        comps = _components(vertices, adj)
        if len(comps) > 1:
            depth = 0
            roots: list[ForestNode] = []
            for comp in sorted(comps, key=min):
                d, rs = solve(comp)
                depth = max(depth, d)
                roots.extend(rs)
            result = depth, tuple(roots)
        else:
            best = None
            for v in sorted(vertices):
                d, rs = solve(vertices - {v})
                if best is None or 1 + d < best[0]:
                    best = (1 + d, (ForestNode(v, rs),))
            result = best
        memo[vertices] = result
        return result

    depth, roots = solve(frozenset(graph.vertices))
    return depth, EliminationForest(roots)


# --- canonical sentences -----------------------------------------------------

FLAT = "flat"
TD_OPTIMAL = "td-optimal"


def _positive_atoms(model: PModel):
    nullary, tuples = [], []
    for pred, rows in model.interp.items():
        for args, value in rows.items():
            if value == TOP:
                (tuples if args else nullary).append((pred, args))
    return sorted(nullary), sorted(tuples)


def _meet_chain(formulas) -> Formula:
    node = formulas[0]
    for f in formulas[1:]:
        node = Connective(MEET, (node, f))
    return node


def _join_chain(formulas) -> Formula:
    node = formulas[0]
    for f in formulas[1:]:
        node = Connective(JOIN, (node, f))
    return node


def canonical_sentence(model: PModel, style: str = TD_OPTIMAL) -> Formula:
    """The conjunctive sentence characterizing maps out of a Boolean model.

    For every Boolean model N: N satisfies the sentence iff there is a
    classical homomorphism (proto witness) from ``model`` into N.  The flat
    style has one variable per domain element (qd = domain size); the
    td-optimal style nests quantifiers along an optimal elimination forest
    of the Gaifman graph, dropping elements untouched by any top atom.
    """
    if not is_boolean_model(model):
        raise AlgebraMismatch("canonical sentences are defined for Boolean models")
    nullary, tuples = _positive_atoms(model)
    if not nullary and not tuples:
        raise NoPositiveAtoms(f"model {model.name!r} has no top-valued atom")
    if style == FLAT:
        var = {m: f"x{i + 1}" for i, m in enumerate(model.domain)}
        conjuncts = [Atom(p, ()) for p, _ in nullary] + [
            Atom(p, tuple(var[a] for a in args)) for p, args in tuples
        ]
        conjuncts.sort(key=format_formula)
        body: Formula = _meet_chain(conjuncts)
        for m in reversed(model.domain):
            body = Quantifier("exists", var[m], body)
        return body
    if style != TD_OPTIMAL:
        raise MvmtError(f"unknown canonical style {style!r}")

    covered = sorted({a for _, args in tuples for a in args})
    var = {m: f"x{i + 1}" for i, m in enumerate(covered)}
    top_conjuncts: list[Formula] = [Atom(p, ()) for p, _ in nullary]
    if covered:
        full = gaifman_graph(model)
        induced = make_graph(
            covered,
            [e for e in full.edges if e[0] in var and e[1] in var],
        )
        _, forest = tree_depth(induced)
        paths = forest.paths()
        attach: dict[str, list[tuple[str, tuple[str, ...]]]] = {
            v: [] for v in covered
        }
        for pred, args in tuples:
            deepest = max(set(args), key=lambda a: len(paths[a]))
            attach[deepest].append((pred, args))

        def build(node) -> Formula:
            parts: list[Formula] = [
                Atom(p, tuple(var[a] for a in args))
                for p, args in sorted(attach[node.vertex])
            ]
            parts.extend(build(c) for c in node.children)
            parts.sort(key=format_formula)
            return Quantifier("exists", var[node.vertex], _meet_chain(parts))

        top_conjuncts.extend(build(r) for r in forest.roots)
    top_conjuncts.sort(key=format_formula)
    return _meet_chain(top_conjuncts)


# --- bounded n-maps and cores ------------------------------------------------

def _value_slots(language, size):
    domain = tuple(f"e{i}" for i in range(1, size + 1))
    slots = []
    for pred, arity in language.predicates:
        for args in itertools.product(domain, repeat=arity):
            slots.append((pred, args))
    return domain, slots


def enumerate_boolean_models(
    language, max_size: int, up_to_iso: bool = True, cap: int = 2_000_000
) -> Iterator[PModel]:
    """All Boolean models with domain size 1..max_size, canonical reps first.

    Isomorphism rejection keeps the permutation-least value vector; sizes
    beyond 4 are refused since the rejection is by exhaustive permutation.
    """
    if up_to_iso and max_size > 4:
        raise BoundsTooLarge("isomorphism rejection supports sizes up to 4")
    two = two_element_algebra()
    counter = 0
    for size in range(1, max_size + 1):
        domain, slots = _value_slots(language, size)
        if 2 ** len(slots) > cap:
            raise BoundsTooLarge(f"2^{len(slots)} Boolean models exceed cap {cap}")
        perms = [
            dict(zip(domain, p)) for p in itertools.permutations(domain)
        ]
        slot_index = {s: i for i, s in enumerate(slots)}
        perm_maps = []
        for p in perms:
            perm_maps.append(
                [slot_index[(pred, tuple(p[a] for a in args))] for pred, args in slots]
            )
        for values in itertools.product((BOT, TOP), repeat=len(slots)):
            if up_to_iso:
                canonical = min(
                    tuple(values[i] for i in pm) for pm in perm_maps
                )
                if values != canonical:
                    continue
            interp: dict[str, dict[tuple[str, ...], str]] = {
                p: {} for p in language.names
            }
            for (pred, args), value in zip(slots, values):
                interp[pred][args] = value
            counter += 1
            yield build_model(f"bool{counter}", two, language, domain, interp)


def _proto_exists(M: PModel, N: PModel) -> bool:
    return bool(find_morphisms(PROTO, M, N, "first"))


@dataclass(frozen=True)
class NMapsReport:
    holds_up_to_bound: bool
    n: int
    size_bound: int
    witness: Optional[PModel] = None  # refuting structure when present


def n_maps_to(M: PModel, N: PModel, n: int, size_bound: int) -> NMapsReport:
    """Bounded refutation search for the tree-depth-relative map relation.

    Classical witnesses suffice: a Boolean model C of tree-depth <= n with
    C -> translate(M) but not C -> translate(N) refutes; exhausting all C up
    to the size bound merely reports "holds up to bound", never a proof.
    """
    if M.language != N.language:
        raise SignatureMismatch("models use different predicate languages")
    Mt, Nt = translate(M), translate(N)
    for C in enumerate_boolean_models(M.language, size_bound):
        if tree_depth(gaifman_graph(C))[0] > n:
            continue
        if _proto_exists(C, Mt) and not _proto_exists(C, Nt):
            return NMapsReport(False, n, size_bound, witness=C)
    return NMapsReport(True, n, size_bound)


def n_core_bounded(M: PModel, n: int, size_bound: int) -> Optional[PModel]:
    """Smallest Boolean model C with td <= n, C -> M and M ->(n) C in bounds.

    A bounded stand-in for the n-core: correct up to the declared size
    bound, reported as such by callers.
    """
    Mt = translate(M)
    candidates = [
        C
        for C in enumerate_boolean_models(M.language, size_bound)
        if tree_depth(gaifman_graph(C))[0] <= n
    ]
    into_M = [D for D in candidates if _proto_exists(D, Mt)]
    for C in into_M:  # ascending size, canonical order
        if all(_proto_exists(D, C) for D in into_M):
            return C
    return None


def separating_sentence(
    models: list[PModel], n: int, size_bound: int
) -> Formula:
    """Disjunction of td-optimal canonical sentences of the bounded cores."""
    cores: list[PModel] = []
    for model in models:
        core = n_core_bounded(model, n, size_bound)
        if core is None:
            raise CoreNotFound(
                f"no bounded core for {model.name!r} at n={n}, size<={size_bound}"
            )
        if core not in cores:
            cores.append(core)
    disjuncts = sorted(
        (canonical_sentence(c, TD_OPTIMAL) for c in cores), key=format_formula
    )
    sentence = _join_chain(disjuncts)
    for model in models:
        if not satisfies(model, sentence):
            raise MvmtError(
                f"postcondition failed: {model.name!r} does not satisfy "
                f"{format_formula(sentence)}"
            )
    return sentence
