"""Deterministic frame-dependent utility: axioms, representation, choice types.

A decision maker carries a base value ``u(x)`` for each alternative and a
nonnegative boost ``v(x)`` that applies only while ``x`` is framed; the choice
at frame ``F`` maximizes ``u(x) + v(x)*[x in F]``.  This module tests choice
data against the axioms characterizing that model, constructs a representation
from consistent data through a revealed-preference relation over framed and
unframed versions of each alternative, and enumerates the finitely many
distinct choice functions the model allows.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from .core import DataError, DeterministicChoiceData, Number, Universe

MAX_ENUMERATION = 8  # type count grows as sum_i i! * C(n,i) * i


@dataclass(frozen=True)
class ChoiceType:
    """One deterministic frame-dependent choice rule in canonical encoding.

    ``priority`` lists the alternatives whose framed versions outrank the best
    unframed value, best first; ``default_index`` (1-based position into
    ``priority``) names the alternative chosen when no priority member is
    framed.  Evaluation: pick the first priority member present in the frame,
    otherwise the default.
    """

    priority: tuple[int, ...]
    default_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "priority", tuple(self.priority))
        k = len(self.priority)
        if k < 1:
            raise DataError("priority list must be non-empty")
        if len(set(self.priority)) != k:
            raise DataError("priority entries must be distinct")
        if not 1 <= self.default_index <= k:
            raise DataError(f"default_index must be in 1..{k}")

    @property
    def default(self) -> int:
        return self.priority[self.default_index - 1]

    def choose(self, frame: int) -> int:
        for alt in self.priority:
            if frame & (1 << alt):
                return alt
        return self.default


def evaluate_type(ctype: ChoiceType, frame: int) -> int:
    """Choice of a canonical type at a frame."""
    return ctype.choose(frame)


def type_choice_function(ctype: ChoiceType, n: int) -> tuple[int, ...]:
    """The full choice function induced by a type, indexed by frame mask."""
    return tuple(ctype.choose(f) for f in range(1 << n))


def enumerate_types(universe: Universe) -> list[ChoiceType]:
    """All distinct frame-dependent choice types, in canonical order.

    Ordered by priority length, then lexicographic priority, then default
    position.  No two types induce the same choice function.
    """
    n = universe.n
    if n > MAX_ENUMERATION:
        raise DataError(f"type enumeration supported for n <= {MAX_ENUMERATION}, got {n}")
    out = []
    for k in range(1, n + 1):
        for prio in permutations(range(n), k):
            for j in range(1, k + 1):
                out.append(ChoiceType(prio, j))
    return out


def type_count(n: int) -> int:
    """Closed-form count of distinct choice types for an n-alternative universe."""
    from math import comb, factorial

    return sum(factorial(i) * comb(n, i) * i for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# utility representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FUMRepresentation:
    """Base values ``u`` and nonnegative framed boosts ``v`` per alternative.

    Distinct alternatives must never tie under any frame-status combination
    (base vs base, base vs boosted, boosted vs boosted), so every frame has a
    unique maximizer.
    """

    universe: Universe
    u: tuple[Number, ...]
    v: tuple[Number, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "v", tuple(self.v))
        n = self.universe.n
        if len(self.u) != n or len(self.v) != n:
            raise DataError("u and v must have one entry per alternative")
        if any(b < 0 for b in self.v):
            raise DataError("framed boosts must be nonnegative")
        for x in range(n):
            for y in range(x + 1, n):
                vals_x = {self.u[x], self.u[x] + self.v[x]}
                vals_y = {self.u[y], self.u[y] + self.v[y]}
                if vals_x & vals_y:
                    raise DataError("non-injective utility")

    def value(self, alt: int, frame: int) -> Number:
        return self.u[alt] + self.v[alt] if frame & (1 << alt) else self.u[alt]

    def to_json_dict(self) -> dict:
        from .core import number_to_json

        names = self.universe.names
        return {
            "universe": list(names),
            "u": {names[i]: number_to_json(self.u[i]) for i in range(len(names))},
            "v": {names[i]: number_to_json(self.v[i]) for i in range(len(names))},
        }


def evaluate_fum(rep: FUMRepresentation, frame: int) -> int:
    """Maximizer of the frame-adjusted utility at a frame."""
    best, best_val = 0, rep.value(0, frame)
    for alt in range(1, rep.universe.n):
        val = rep.value(alt, frame)
        if val == best_val:
            raise DataError("non-injective utility")
        if val > best_val:
            best, best_val = alt, val
    return best


def choice_function(rep: FUMRepresentation) -> tuple[int, ...]:
    """The full choice function induced by a representation, by frame mask."""
    return tuple(evaluate_fum(rep, f) for f in range(1 << rep.universe.n))


def representation_for_type(ctype: ChoiceType, universe: Universe) -> FUMRepresentation:
    """An integer-valued representation whose choices match the type everywhere."""
    n = universe.n
    prio = ctype.priority
    in_prio = set(prio)
    # top-to-bottom symbol order: boosted priorities, the default's base value,
    # then everything else with each boost directly above its base
    order: list[tuple[int, bool]] = [(a, True) for a in prio]
    order.append((ctype.default, False))
    for x in range(n):
        if x not in in_prio:
            order.append((x, True))
            order.append((x, False))
        elif x != ctype.default:
            order.append((x, False))
    rank = {sym: 2 * n - pos for pos, sym in enumerate(order)}
    u = tuple(rank[(x, False)] for x in range(n))
    v = tuple(rank[(x, True)] - rank[(x, False)] for x in range(n))
    return FUMRepresentation(universe, u, v)


# ---------------------------------------------------------------------------
# axiom checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomWitness:
    axiom: str
    frame: int
    subframe: int
    explanation: str


@dataclass(frozen=True)
class AxiomReport:
    """Verdicts for the frame-shrinking consistency axioms.

    ``iifa1`` covers shrinkage that keeps a framed winner framed; ``iifa2``
    covers shrinkage when the winner was outside the frame.  The combined
    axiom holds exactly when both do.
    """

    iifa1: bool
    iifa2: bool
    witnesses: tuple[AxiomWitness, ...]

    @property
    def iifa(self) -> bool:
        return self.iifa1 and self.iifa2

    def to_json_dict(self, universe: Universe) -> dict:
        return {
            "iifa1": self.iifa1,
            "iifa2": self.iifa2,
            "iifa": self.iifa,
            "witnesses": [
                {
                    "axiom": w.axiom,
                    "frame": universe.frame_str(w.frame),
                    "subframe": universe.frame_str(w.subframe),
                    "explanation": w.explanation,
                }
                for w in self.witnesses
            ],
        }


class IIFAViolationError(DataError):
    """Raised when construction is attempted on axiom-violating data."""

    def __init__(self, message: str, report: AxiomReport):
        super().__init__(message)
        self.report = report


def check_iifa(data: DeterministicChoiceData) -> AxiomReport:
    """Test every comparable frame pair in the domain against both axioms."""
    uni = data.universe
    witnesses: list[AxiomWitness] = []
    ok1 = ok2 = True
    for big in data.domain:
        chosen = data.choices[big]
        cbit = 1 << chosen
        for small in data.domain:
            if small == big or (small & big) != small:
                continue
            other = data.choices[small]
            if other == chosen:
                continue
            name_b, name_s = uni.frame_str(big), uni.frame_str(small)
            desc = (
                f"c({{{name_b}}})={uni.names[chosen]} but "
                f"c({{{name_s}}})={uni.names[other]}"
            )
            if cbit & small:
                ok1 = False
                witnesses.append(AxiomWitness("IIFA1", big, small, desc))
            if not cbit & big:
                ok2 = False
                witnesses.append(AxiomWitness("IIFA2", big, small, desc))
    return AxiomReport(ok1, ok2, tuple(witnesses))


# ---------------------------------------------------------------------------
# representation construction
# ---------------------------------------------------------------------------


def _revealed_relation(data: DeterministicChoiceData) -> set[tuple[int, int]]:
    # symbols: x -> base value of x, x + n -> boosted (framed) value of x
    n = data.universe.n
    edges: set[tuple[int, int]] = set()
    for frame, chosen in data.choices.items():
        winner = chosen + n if frame & (1 << chosen) else chosen
        for other in range(n):
            if other == chosen:
                continue
            loser = other + n if frame & (1 << other) else other
            edges.add((winner, loser))
    for x in range(n):
        edges.add((x + n, x))
    return edges


def _transitive_closure(edges: set[tuple[int, int]], size: int) -> list[set[int]]:
    below = [set() for _ in range(size)]
    for hi, lo in edges:
        below[hi].add(lo)
    changed = True
    while changed:
        changed = False
        for hi in range(size):
            extra = set()
            for mid in below[hi]:
                extra |= below[mid] - below[hi]
            if extra:
                below[hi] |= extra
                changed = True
    return below


def build_fum_representation(data: DeterministicChoiceData) -> FUMRepresentation:
    """Construct a representation reproducing the data, or raise on violation.

    With every frame of size <= 3 observed, the revealed relation over base
    and boosted symbols is acyclic exactly when the axioms hold; its closure
    is completed deterministically (lowest alternative first, boost directly
    above base when unconstrained) and symbols take integer ranks.  On smaller
    domains the construction falls back to searching the enumerated types for
    one consistent with every observation.
    """
    uni = data.universe
    n = uni.n
    report = check_iifa(data)
    if not report.iifa:
        raise IIFAViolationError("choice data violates IIFA", report)
    if n == 1:
        return FUMRepresentation(uni, (1,), (0,))

    if not data.contains_frames_up_to(3):
        return _search_consistent_type(data)

    edges = _revealed_relation(data)
    for hi, lo in edges:
        if (lo, hi) in edges:
            raise IIFAViolationError(
                "revealed relation is not asymmetric (choice data violates IIFA)", report
            )
    below = _transitive_closure(edges, 2 * n)
    for sym in range(2 * n):
        if sym in below[sym]:
            raise IIFAViolationError(
                "revealed relation has a cycle (choice data violates IIFA)", report
            )

    # deterministic completion: repeatedly emit, top first, the unplaced symbol
    # with no unplaced symbol above it; ties broken by alternative then boost
    above = [set() for _ in range(2 * n)]
    for hi in range(2 * n):
        for lo in below[hi]:
            above[lo].add(hi)
    placed: list[int] = []
    remaining = set(range(2 * n))
    while remaining:
        ready = [s for s in remaining if not (above[s] & remaining)]
        ready.sort(key=lambda s: (s % n, 0 if s >= n else 1))
        sym = ready[0]
        placed.append(sym)
        remaining.remove(sym)

    rank = {sym: 2 * n - pos for pos, sym in enumerate(placed)}
    rep = FUMRepresentation(
        uni,
        tuple(rank[x] for x in range(n)),
        tuple(rank[x + n] - rank[x] for x in range(n)),
    )
    for frame, chosen in data.choices.items():
        if evaluate_fum(rep, frame) != chosen:  # pragma: no cover - guarded by theory
            raise DataError("constructed representation fails to reproduce the data")
    return rep


def _search_consistent_type(data: DeterministicChoiceData) -> FUMRepresentation:
    uni = data.universe
    if uni.n > MAX_ENUMERATION:
        raise DataError(
            "domain lacks some frame of size <= 3 and the universe is too large "
            f"for exhaustive search (n <= {MAX_ENUMERATION})"
        )
    for ctype in enumerate_types(uni):
        if all(ctype.choose(f) == alt for f, alt in data.choices.items()):
            return representation_for_type(ctype, uni)
    raise DataError("inconsistent with partial data: no choice type matches every observation")


# ---------------------------------------------------------------------------
# representation equivalence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RepEquivalenceReport:
    """Clause-by-clause comparison of two representations.

    The three ordinal clauses are what the data can identify: the unframed
    winner, which boosts clear that winner, and the ranking among the boosts
    that do.  ``same_choice_function`` compares induced choices on every frame.
    """

    same_base_argmax: bool
    same_boost_comparisons: bool
    same_boosted_ranking: bool
    same_choice_function: bool

    @property
    def clauses_hold(self) -> bool:
        return self.same_base_argmax and self.same_boost_comparisons and self.same_boosted_ranking

    def to_json_dict(self) -> dict:
        return {
            "same_base_argmax": self.same_base_argmax,
            "same_boost_comparisons": self.same_boost_comparisons,
            "same_boosted_ranking": self.same_boosted_ranking,
            "same_choice_function": self.same_choice_function,
        }


def _cleared_boost_ranking(rep: FUMRepresentation, argmax: int) -> list[int]:
    # boosted values clearing the best base value, best first; the argmax's
    # own boost is dropped when it ranks last there, because a boost that
    # never beats another cleared boost cannot show up in any choice
    top = [x for x in range(rep.universe.n) if rep.u[x] + rep.v[x] > rep.u[argmax]]
    top.sort(key=lambda x: rep.u[x] + rep.v[x], reverse=True)
    if top and top[-1] == argmax:
        top.pop()
    return top


def check_rep_equivalence(r1: FUMRepresentation, r2: FUMRepresentation) -> RepEquivalenceReport:
    """Compare two representations on the identified ordinal content."""
    if r1.universe != r2.universe:
        raise DataError("representations must share a universe")
    n = r1.universe.n
    a1 = max(range(n), key=lambda x: r1.u[x])
    a2 = max(range(n), key=lambda x: r2.u[x])
    same_argmax = a1 == a2
    same_signs = False
    same_ranking = False
    if same_argmax:
        a = a1
        same_signs = all(
            (r1.u[a] > r1.u[x] + r1.v[x]) == (r2.u[a] > r2.u[x] + r2.v[x]) for x in range(n)
        )
        same_ranking = _cleared_boost_ranking(r1, a) == _cleared_boost_ranking(r2, a)
    return RepEquivalenceReport(
        same_base_argmax=same_argmax,
        same_boost_comparisons=same_signs,
        same_boosted_ranking=same_ranking,
        same_choice_function=choice_function(r1) == choice_function(r2),
    )
