"""Barycentric plot data for three-alternative datasets.

Each observed frame's probability vector is a point in the 2-simplex.  For
the unconstrained frames (everything framed, nothing framed) the set of
vectors reachable by some mixture of choice types consistent with the
singleton and doubleton observations is a convex polygon; it is computed
exactly by support-direction refinement against the rational LP, which
terminates with the convex hull of the projected polytope vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import DataError, Number, StochasticChoiceData, number_to_json
from .detfum import enumerate_types
from .rational_lp import solve_rational_lp

Bary = tuple[Number, Number, Number]
_Pt = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class SimplexPoint:
    label: str
    bary: Bary


@dataclass(frozen=True)
class SimplexRegion:
    label: str
    vertices: tuple[Bary, ...]


@dataclass(frozen=True)
class SimplexPlotData:
    """Points and labeled feasible-region polygons in barycentric coordinates."""

    points: tuple[SimplexPoint, ...]
    regions: tuple[SimplexRegion, ...]

    def to_json_dict(self) -> dict:
        return {
            "points": [
                {"label": p.label, "bary": [number_to_json(c) for c in p.bary]}
                for p in self.points
            ],
            "regions": [
                {
                    "label": r.label,
                    "vertices": [[number_to_json(c) for c in v] for v in r.vertices],
                }
                for r in self.regions
            ],
        }


def _cross(o: _Pt, a: _Pt, b: _Pt) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points: set[_Pt]) -> list[_Pt]:
    pts = sorted(points)
    if len(pts) <= 2:
        return pts
    lower: list[_Pt] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[_Pt] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]  # counterclockwise, no collinear interiors


class _TypePolytope:
    """Mixture weights consistent with the singleton/doubleton observations.

    In float mode each observation becomes a band of width ``2 * slack`` so
    representation noise in the data cannot make the exact LP infeasible;
    rational-mode constraints are exact equalities.
    """

    def __init__(self, data: StochasticChoiceData):
        uni = data.universe
        self.universe = uni
        self.types = enumerate_types(uni)
        slack = Fraction(0) if data.policy.exact else Fraction(8 * data.policy.eps)
        constrained = [
            f for f in range(1 << uni.n) if 1 <= bin(f).count("1") <= 2
        ]
        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        width = len(self.types)
        slack_count = 0 if slack == 0 else 2 * len(constrained) * uni.n
        col = 0
        for frame in constrained:
            for alt in range(uni.n):
                base = [
                    Fraction(1) if t.choose(frame) == alt else Fraction(0) for t in self.types
                ]
                target = Fraction(data.probs[(alt, frame)])
                if slack == 0:
                    rows.append(base + [Fraction(0)] * slack_count)
                    rhs.append(target)
                else:
                    up = base + [Fraction(0)] * slack_count
                    up[width + col] = Fraction(1)
                    rows.append(up)
                    rhs.append(target + slack)
                    lo = base + [Fraction(0)] * slack_count
                    lo[width + col + 1] = Fraction(-1)
                    rows.append(lo)
                    rhs.append(target - slack)
                    col += 2
        rows.append([Fraction(1)] * width + [Fraction(0)] * slack_count)
        rhs.append(Fraction(1))
        self.width = width
        self.rows = rows
        self.rhs = rhs

    def support(self, target: int, direction: tuple[Fraction, Fraction]) -> _Pt:
        objective = []
        for t in self.types:
            pick = t.choose(target)
            c = Fraction(0)
            if pick == 0:
                c += direction[0]
            elif pick == 1:
                c += direction[1]
            objective.append(c)
        objective.extend([Fraction(0)] * (len(self.rows[0]) - self.width))
        result = solve_rational_lp(self.rows, self.rhs, objective)
        if result.status != "optimal":
            raise DataError("singleton/doubleton observations admit no mixture of choice types")
        pa = sum(
            (result.x[i] for i, t in enumerate(self.types) if t.choose(target) == 0 and result.x[i]),
            Fraction(0),
        )
        pb = sum(
            (result.x[i] for i, t in enumerate(self.types) if t.choose(target) == 1 and result.x[i]),
            Fraction(0),
        )
        return (pa, pb)


def _region_polygon(poly: _TypePolytope, target: int) -> list[_Pt]:
    axes = [
        (Fraction(1), Fraction(0)),
        (Fraction(-1), Fraction(0)),
        (Fraction(0), Fraction(1)),
        (Fraction(0), Fraction(-1)),
    ]
    collected = {poly.support(target, d) for d in axes}
    if len(collected) == 1:
        return list(collected)
    while True:
        hull = _hull(collected)
        added = False
        count = len(hull)
        for i in range(count):
            p = hull[i]
            q = hull[(i + 1) % count]
            normal = (q[1] - p[1], p[0] - q[0])
            candidate = poly.support(target, normal)
            level = normal[0] * p[0] + normal[1] * p[1]
            reach = normal[0] * candidate[0] + normal[1] * candidate[1]
            if reach > level:
                collected.add(candidate)
                added = True
        if not added:
            return hull


def region_contains(vertices: tuple[Bary, ...], bary: Bary) -> bool:
    """Exact convex containment test in the first two barycentric coordinates."""
    pts = [(Fraction(v[0]), Fraction(v[1])) for v in vertices]
    p = (Fraction(bary[0]), Fraction(bary[1]))
    if len(pts) == 1:
        return pts[0] == p
    if len(pts) == 2:
        a, b = pts
        if _cross(a, b, p) != 0:
            return False
        lo, hi = sorted((a, b))
        return lo <= p <= hi
    count = len(pts)
    for i in range(count):
        if _cross(pts[i], pts[(i + 1) % count], p) < 0:
            return False
    return True


def plot_simplex(
    data: StochasticChoiceData, targets: list[int] | None = None
) -> SimplexPlotData:
    """Points for every observed frame plus feasible regions for the targets.

    Regions require exactly three alternatives and a domain holding every
    frame of size at most two; the singleton and doubleton observations
    constrain the mixture, so the interesting targets are the grand set and
    the empty frame (anything already constrained collapses to its point).
    """
    uni = data.universe
    if uni.n != 3:
        raise DataError("simplex plots require exactly 3 alternatives")
    if data.partial:
        raise DataError("simplex plots require complete frames")
    points = tuple(
        SimplexPoint(
            uni.frame_str(f),
            (data.probs[(0, f)], data.probs[(1, f)], data.probs[(2, f)]),
        )
        for f in data.domain
    )
    if targets is None:
        targets = [uni.full_frame, 0]
    regions: list[SimplexRegion] = []
    if targets:
        if not data.contains_frames_up_to(2):
            raise DataError("region emission requires all frames of size <= 2")
        poly = _TypePolytope(data)
        for target in targets:
            verts = _region_polygon(poly, target)
            bary = tuple(
                (
                    data.policy.convert(pa),
                    data.policy.convert(pb),
                    data.policy.convert(1 - pa - pb),
                )
                for pa, pb in verts
            )
            regions.append(SimplexRegion(uni.frame_str(target), bary))
    return SimplexPlotData(points, tuple(regions))


def projected_points(
    data: StochasticChoiceData, alts: tuple[int, int, int]
) -> SimplexPlotData:
    """Points-only view for larger universes: renormalized onto three alternatives.

    Frames where the three chosen alternatives carry zero mass are skipped.
    """
    points = []
    for frame in data.domain:
        triple = [data.get(a, frame) for a in alts]
        if any(t is None for t in triple):
            continue
        total = sum(triple)
        if not total > 0:
            continue
        points.append(
            SimplexPoint(
                data.universe.frame_str(frame),
                tuple(t / total for t in triple),
            )
        )
    return SimplexPlotData(tuple(points), ())
