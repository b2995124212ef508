"""Random frame-dependent utility: testing, recovery, and identification.

Aggregate data passes the model exactly when every entry of both polynomial
tables is nonnegative; an accepted rule is a mixture over deterministic choice
types, and each type's canonical weight is the product of conditional flow
ratios along its path through the frame lattice (framed pick-offs down the
lattice, one leakage at the end).  A second, recursive construction builds the
same weights from permutation prefixes and serves as a cross-check.  For
partially observed data the module degrades to falsification via truncated
interval sums and to exact linear feasibility over the enumerated types.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core import (
    DataError,
    Number,
    NumericPolicy,
    StochasticChoiceData,
    Universe,
    members,
    number_to_json,
    submasks,
)
from .detfum import ChoiceType, enumerate_types
from .polys import BMTable, compute_bm
from .rational_lp import solve_rational_lp

MAX_WITNESS_N = 6  # path count beyond this makes automatic recovery unhelpful
MAX_FEASIBILITY_N = 6  # enumeration-backed LP column cap (9786 types)


@dataclass(frozen=True)
class TypeDistribution:
    """Probability weights over choice types (zero-weight types may be omitted)."""

    universe: Universe
    weights: Mapping[ChoiceType, Number]
    policy: NumericPolicy = NumericPolicy()

    def __post_init__(self) -> None:
        n = self.universe.n
        total = self.policy.zero()
        for ctype, w in self.weights.items():
            if any(a >= n for a in ctype.priority):
                raise DataError("choice type references an alternative outside the universe")
            if not self.policy.is_nonneg(w):
                raise DataError("type weights must be nonnegative")
            total += w
        if not self.policy.is_close(total, self.policy.one(), scale=8):
            raise DataError(f"type weights sum to {float(total)}, expected 1")

    def weight(self, ctype: ChoiceType) -> Number:
        return self.weights.get(ctype, self.policy.zero())

    def support(self) -> list[ChoiceType]:
        return sorted(
            (t for t, w in self.weights.items() if w > 0),
            key=lambda t: (len(t.priority), t.priority, t.default_index),
        )

    def to_json_dict(self) -> dict:
        names = self.universe.names
        return {
            "universe": list(names),
            "weights": [
                {
                    "priority": [names[a] for a in t.priority],
                    "default": names[t.default],
                    "weight": number_to_json(self.weights[t]),
                }
                for t in sorted(
                    self.weights, key=lambda t: (len(t.priority), t.priority, t.default_index)
                )
            ],
        }


@dataclass(frozen=True)
class BMViolation:
    """One negative polynomial value, full or interval-truncated."""

    kind: str  # "q" | "y" | "interim_Q" | "interim_Y"
    alternative: int
    frame: int
    value: Number
    upper_frame: int | None = None  # interim kinds only

    def to_json_dict(self, universe: Universe) -> dict:
        out = {
            "kind": self.kind,
            "alternative": universe.names[self.alternative],
            "frame": universe.frame_str(self.frame),
            "value": number_to_json(self.value),
        }
        if self.upper_frame is not None:
            out["upper_frame"] = universe.frame_str(self.upper_frame)
        return out


@dataclass(frozen=True)
class FrumVerdict:
    """Outcome of the mixture-model test.

    With a fully observed domain the test is exact: accepted means a witness
    distribution exists (and one is attached for small universes).  On partial
    domains only falsification is possible; ``accepted`` is then False and an
    empty violation list means "not falsified".
    """

    accepted: bool
    complete_domain: bool
    violations: tuple[BMViolation, ...]
    witness: TypeDistribution | None

    def to_json_dict(self, universe: Universe) -> dict:
        return {
            "accepted": self.accepted,
            "complete_domain": self.complete_domain,
            "violations": [v.to_json_dict(universe) for v in self.violations],
            "witness": self.witness.to_json_dict() if self.witness is not None else None,
        }


class FrumRejectionError(DataError):
    """Recovery was requested for data that fails the mixture test."""

    def __init__(self, message: str, verdict: FrumVerdict):
        super().__init__(message)
        self.verdict = verdict


# ---------------------------------------------------------------------------
# testing
# ---------------------------------------------------------------------------


def interim_violations(data: StochasticChoiceData) -> tuple[BMViolation, ...]:
    """Every computable negative interval sum, in deterministic order.

    Scans all observed frame pairs ``lo <= hi`` per alternative whose interval
    is fully observed for that alternative; a negative interval sum falsifies
    the model regardless of what the unobserved frames look like.
    """
    out: list[BMViolation] = []
    policy = data.policy
    per_alt: dict[int, set[int]] = {}
    for alt, frame in data.probs:
        per_alt.setdefault(alt, set()).add(frame)
    for alt in sorted(per_alt):
        bit = 1 << alt
        frames = sorted(per_alt[alt])
        observed = per_alt[alt]
        for lo in frames:
            for hi in frames:
                if lo == hi or lo & ~hi:
                    continue
                is_y = not hi & bit
                is_q = bool(lo & bit)
                if not (is_y or is_q):
                    continue
                gap = hi & ~lo
                if any((lo | s) not in observed for s in submasks(gap)):
                    continue
                total = policy.zero()
                for s in submasks(gap):
                    p = data.probs[(alt, lo | s)]
                    total = total - p if bin(s).count("1") % 2 else total + p
                scale = 1 << bin(gap).count("1")
                if not policy.is_nonneg(total, scale=scale):
                    kind = "interim_Y" if is_y else "interim_Q"
                    out.append(BMViolation(kind, alt, lo, total, upper_frame=hi))
    return tuple(out)


def test_frum(data: StochasticChoiceData, with_witness: bool | None = None) -> FrumVerdict:
    """Sign test on both polynomial tables (full domain), else falsification.

    ``with_witness`` forces or suppresses attaching the recovered distribution
    on acceptance; by default a witness is attached for universes up to
    ``MAX_WITNESS_N`` alternatives.
    """
    if not data.full_domain:
        return FrumVerdict(False, False, interim_violations(data), None)
    table = compute_bm(data)
    policy = data.policy
    violations: list[BMViolation] = []
    for alt, frame, value in table.q_items():
        if not policy.is_nonneg(value):
            violations.append(BMViolation("q", alt, frame, value))
    for alt, frame, value in table.y_items():
        if not policy.is_nonneg(value):
            violations.append(BMViolation("y", alt, frame, value))
    accepted = not violations
    witness = None
    if accepted:
        if with_witness is None:
            with_witness = data.universe.n <= MAX_WITNESS_N
        if with_witness:
            witness = TypeDistribution(
                data.universe, _recover_paths(table), policy
            )
    return FrumVerdict(accepted, True, tuple(violations), witness)


test_frum.__test__ = False  # analysis entry point, not a pytest case


# ---------------------------------------------------------------------------
# recovery
# ---------------------------------------------------------------------------


def _clamped(table: BMTable) -> tuple[list, list]:
    # float noise in [-eps, 0) must not poison path products; exact mode is a no-op
    n = table.universe.n
    size = 1 << n
    zero = table.policy.zero()
    cq = [[zero] * size for _ in range(n)]
    cy = [[zero] * size for _ in range(n)]
    for alt, frame, value in table.q_items():
        cq[alt][frame] = value if value > 0 else zero
    for alt, frame, value in table.y_items():
        cy[alt][frame] = value if value > 0 else zero
    return cq, cy


def _require_accepted(data: StochasticChoiceData) -> BMTable:
    if not data.full_domain:
        raise DataError("recovery requires observations for every frame")
    verdict = test_frum(data, with_witness=False)
    if not verdict.accepted:
        raise FrumRejectionError("data has no mixture representation", verdict)
    return compute_bm(data)


def _recover_paths(table: BMTable) -> dict[ChoiceType, Number]:
    """Depth-first walk of the lattice assigning conditional flow ratios."""
    n = table.universe.n
    cq, cy = _clamped(table)
    weights: dict[ChoiceType, Number] = {}
    full = (1 << n) - 1

    def visit(node: int, mass: Number, consumed: tuple[int, ...]) -> None:
        through = sum(cq[x][node] for x in members(node))
        for x in consumed:
            through += cy[x][node]
        if not through > 0:
            return
        for pos, x in enumerate(consumed):
            leak = cy[x][node]
            if leak > 0:
                weights[ChoiceType(consumed, pos + 1)] = mass * leak / through
        for x in members(node):
            down = cq[x][node]
            if down > 0:
                visit(node & ~(1 << x), mass * down / through, consumed + (x,))

    visit(full, table.policy.one(), ())
    return weights


def recover_branch_independent(data: StochasticChoiceData) -> TypeDistribution:
    """The canonical mixture: each type weighted by its path's flow ratios.

    Requires the full domain and an accepted sign test.  Aggregating the
    result reproduces the data; among all representing mixtures this is the
    one whose conditional split at every lattice node is proportional to the
    node's outgoing flows.
    """
    table = _require_accepted(data)
    return TypeDistribution(data.universe, _recover_paths(table), data.policy)


def branch_weight(table: BMTable, ctype: ChoiceType) -> Number:
    """Single-type path weight from raw (unclamped) table values."""
    n = table.universe.n
    node = (1 << n) - 1

    def through(mask: int) -> Number:
        total = sum(
            (table.q(x, mask) for x in members(mask)),
            table.policy.zero(),
        )
        for x in range(n):
            if not mask & (1 << x):
                total += table.y(x, mask)
        return total

    weight = table.policy.one()
    for x in ctype.priority:
        weight = weight * table.q(x, node) / through(node)
        node &= ~(1 << x)
    return weight * table.y(ctype.default, node) / through(node)


def recover_constructive(data: StochasticChoiceData) -> TypeDistribution:
    """Recovery by the recursive prefix construction.

    Builds weights on ordered prefixes of framed alternatives level by level,
    dividing each extension by the total weight of all orderings of the same
    prefix set, then reads one type per (prefix, terminal) pair.  Agrees with
    :func:`recover_branch_independent` type by type (exactly in rational mode).
    """
    table = _require_accepted(data)
    n = data.universe.n
    cq, cy = _clamped(table)
    full = (1 << n) - 1

    level: dict[tuple[int, ...], Number] = {}
    for a in range(n):
        g = cq[a][full]
        if g > 0:
            level[(a,)] = g
    weights: dict[ChoiceType, Number] = {}
    for _ in range(n):
        if not level:
            break
        by_set: dict[int, Number] = {}
        for prefix, g in level.items():
            mask = 0
            for a in prefix:
                mask |= 1 << a
            by_set[mask] = by_set.get(mask, table.policy.zero()) + g
        nxt: dict[tuple[int, ...], Number] = {}
        for prefix, g in level.items():
            mask = 0
            for a in prefix:
                mask |= 1 << a
            denom = by_set[mask]
            if not denom > 0:
                continue
            node = full & ~mask
            share = g / denom
            for pos, z in enumerate(prefix):
                leak = cy[z][node]
                if leak > 0:
                    w = share * leak
                    if w > 0:
                        weights[ChoiceType(prefix, pos + 1)] = w
            for z in members(node):
                down = cq[z][node]
                if down > 0:
                    nxt[prefix + (z,)] = share * down
        level = nxt
    return TypeDistribution(data.universe, weights, data.policy)


# ---------------------------------------------------------------------------
# aggregation and identification
# ---------------------------------------------------------------------------


def forward_frum(mu: TypeDistribution, domain: Iterable[int]) -> StochasticChoiceData:
    """Aggregate choice probabilities of a type mixture over given frames."""
    uni = mu.universe
    policy = mu.policy
    zero = policy.zero()
    probs: dict[tuple[int, int], Number] = {}
    frames = sorted(set(domain))
    for frame in frames:
        for alt in range(uni.n):
            probs[(alt, frame)] = zero
    for ctype, w in mu.weights.items():
        if w == 0:
            continue
        for frame in frames:
            key = (ctype.choose(frame), frame)
            probs[key] = probs[key] + w
    return StochasticChoiceData(uni, probs, policy)


@dataclass(frozen=True)
class Prop2Report:
    """How closely a mixture matches the identified aggregates.

    For any two mixtures representing the same data, the mass of types that
    pick ``b`` at ``F`` while picking every non-framed alternative from its
    own singleton equals ``y(b, F)``; the framed analogue over doubleton
    frames equals ``q(b, F + b)``.  Both discrepancies are zero for any true
    representation.
    """

    max_discrepancy: Number
    leak_clause_max: Number
    framed_clause_max: Number

    def to_json_dict(self) -> dict:
        return {
            "max_discrepancy": number_to_json(self.max_discrepancy),
            "leak_clause_max": number_to_json(self.leak_clause_max),
            "framed_clause_max": number_to_json(self.framed_clause_max),
        }


def check_prop2(data: StochasticChoiceData, mu: TypeDistribution) -> Prop2Report:
    """Verify both identification clauses for every (alternative, frame)."""
    table = compute_bm(data)
    n = data.universe.n
    size = 1 << n
    full = size - 1
    zero = data.policy.zero()

    # one pass over the support: each type contributes its weight to the
    # (chosen alternative, frame) cells whose side conditions it meets
    leak_mass = [[zero] * size for _ in range(n)]
    framed_mass = [[zero] * size for _ in range(n)]
    for ctype, w in mu.weights.items():
        if not w > 0:
            continue
        choices = [ctype.choose(f) for f in range(size)]
        own_singleton = 0  # x with c({x}) = x
        for x in range(n):
            if choices[1 << x] == x:
                own_singleton |= 1 << x
        pair_wins = []  # per b: x (!= b) with c({x, b}) = x
        for b in range(n):
            mask = 0
            for x in range(n):
                if x != b and choices[(1 << x) | (1 << b)] == x:
                    mask |= 1 << x
            pair_wins.append(mask)
        for frame in range(size):
            b = choices[frame]
            outside = full & ~frame
            if not frame & (1 << b):
                if not outside & ~own_singleton:
                    leak_mass[b][frame] += w
            else:
                if choices[1 << b] == b and not outside & ~pair_wins[b]:
                    framed_mass[b][frame] += w

    worst_leak = zero
    worst_framed = zero
    for b in range(n):
        bit = 1 << b
        for frame in range(size):
            if frame & bit:
                worst_framed = max(worst_framed, abs(table.q(b, frame) - framed_mass[b][frame]))
            else:
                worst_leak = max(worst_leak, abs(table.y(b, frame) - leak_mass[b][frame]))
    return Prop2Report(max(worst_leak, worst_framed), worst_leak, worst_framed)


# ---------------------------------------------------------------------------
# feasibility on partial data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualCertificate:
    """Farkas combination of observation rows proving infeasibility."""

    coefficients: tuple[tuple[int, int, Fraction], ...]  # (alt, frame, coeff)
    normalization_coefficient: Fraction

    def to_json_dict(self, universe: Universe) -> dict:
        return {
            "kind": "dual",
            "coefficients": [
                {
                    "alternative": universe.names[alt],
                    "frame": universe.frame_str(frame),
                    "coefficient": number_to_json(c),
                }
                for alt, frame, c in self.coefficients
            ],
            "normalization_coefficient": number_to_json(self.normalization_coefficient),
        }


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: TypeDistribution | None
    certificate: BMViolation | DualCertificate | None

    def to_json_dict(self, universe: Universe) -> dict:
        cert: dict | None
        if self.certificate is None:
            cert = None
        else:
            cert = self.certificate.to_json_dict(universe)
        return {
            "feasible": self.feasible,
            "witness": self.witness.to_json_dict() if self.witness is not None else None,
            "certificate": cert,
        }


def feasible_completion(data: StochasticChoiceData) -> FeasibilityResult:
    """Decide whether any mixture over the enumerated types matches the data.

    Works on arbitrary partial observations (missing frames, or frames
    observed for only some alternatives): exact rational feasibility over one
    equality row per observation plus normalization.  Float inputs are decided
    exactly at their binary values, so tightly coupled float data (for
    instance a fully aggregated rule rounded to float) should be tested with
    the sign test instead.  On infeasibility the certificate is a violated
    interval sum when one exists, otherwise the LP's dual (Farkas) combination.
    """
    uni = data.universe
    if uni.n > MAX_FEASIBILITY_N:
        raise DataError(f"feasibility search supported for n <= {MAX_FEASIBILITY_N}")
    types = enumerate_types(uni)
    observations = sorted(data.probs)  # (alt, frame), deterministic row order

    # collapse types whose choices agree on every observed frame
    frames = sorted({frame for _, frame in observations})
    patterns: dict[tuple[int, ...], int] = {}
    for idx, ctype in enumerate(types):
        pattern = tuple(ctype.choose(f) for f in frames)
        patterns.setdefault(pattern, idx)
    reps = sorted(patterns.values())
    frame_pos = {f: i for i, f in enumerate(frames)}
    rep_patterns = [tuple(types[i].choose(f) for f in frames) for i in reps]

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for alt, frame in observations:
        pos = frame_pos[frame]
        rows.append([Fraction(1) if pat[pos] == alt else Fraction(0) for pat in rep_patterns])
        rhs.append(Fraction(data.probs[(alt, frame)]))
    rows.append([Fraction(1)] * len(reps))
    rhs.append(Fraction(1))

    result = solve_rational_lp(rows, rhs)
    if result.status == "optimal":
        weights: dict[ChoiceType, Number] = {}
        for col, idx in enumerate(reps):
            w = result.x[col]
            if w > 0:
                weights[types[idx]] = w if data.policy.exact else float(w)
        witness = TypeDistribution(uni, weights, data.policy)
        return FeasibilityResult(True, witness, None)

    interims = interim_violations(data)
    if interims:
        worst = min(interims, key=lambda v: (v.value, v.alternative, v.frame))
        return FeasibilityResult(False, None, worst)
    coeffs = tuple(
        (alt, frame, result.farkas[i]) for i, (alt, frame) in enumerate(observations)
    )
    return FeasibilityResult(False, None, DualCertificate(coeffs, result.farkas[-1]))
