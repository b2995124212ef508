"""Alternating-sum polynomial tables over the frame lattice, and their flows.

For a stochastic rule ``rho`` the table holds, per alternative ``a``:

* ``q(a, F) = sum_{B >= F} (-1)^{|B - F|} rho(a, B)`` for framed ``a`` (a in F),
* ``y(a, F) = sum_{B >= F, a not in B} (-1)^{|B - F|} rho(a, B)`` for a not in F.

On the subset lattice drawn as a diagram, ``q`` values label down-edges
between adjacent frames and ``y`` values label per-alternative leakages out of
a node; total inflow equals outflow plus leakage at every node for *any*
choice rule, which :func:`flow_residuals` verifies.  Interim variants truncate
the alternating sum to an observed interval so partial data can still falsify.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import (
    DataError,
    Number,
    NumericPolicy,
    StochasticChoiceData,
    Universe,
    number_to_json,
    submasks,
)


@dataclass(frozen=True)
class BMTable:
    """Full q/y tables for a completely observed rule.

    Entries are keyed by (alternative, frame); ``q`` is defined where the
    alternative is framed, ``y`` where it is not.
    """

    universe: Universe
    policy: NumericPolicy
    _q: tuple  # per-alternative sequence indexed by frame mask
    _y: tuple

    def q(self, alt: int, frame: int) -> Number:
        if not frame & (1 << alt):
            raise DataError("q(a, F) requires a in F")
        val = self._q[alt][frame]
        return val if self.policy.exact else float(val)

    def y(self, alt: int, frame: int) -> Number:
        if frame & (1 << alt):
            raise DataError("y(a, F) requires a not in F")
        val = self._y[alt][frame]
        return val if self.policy.exact else float(val)

    def q_items(self) -> Iterator[tuple[int, int, Number]]:
        """(alternative, frame, value) over all framed slots, in stable order."""
        for alt in range(self.universe.n):
            bit = 1 << alt
            col = self._q[alt]
            for frame in range(1 << self.universe.n):
                if frame & bit:
                    yield alt, frame, col[frame] if self.policy.exact else float(col[frame])

    def y_items(self) -> Iterator[tuple[int, int, Number]]:
        """(alternative, frame, value) over all non-framed slots, in stable order."""
        for alt in range(self.universe.n):
            bit = 1 << alt
            col = self._y[alt]
            for frame in range(1 << self.universe.n):
                if not frame & bit:
                    yield alt, frame, col[frame] if self.policy.exact else float(col[frame])

    def to_json_dict(self) -> dict:
        uni = self.universe
        return {
            "universe": list(uni.names),
            "numeric_mode": self.policy.mode,
            "q": [
                {"alternative": uni.names[a], "frame": uni.frame_str(f), "value": number_to_json(v)}
                for a, f, v in self.q_items()
            ],
            "y": [
                {"alternative": uni.names[a], "frame": uni.frame_str(f), "value": number_to_json(v)}
                for a, f, v in self.y_items()
            ],
        }


def _superset_signed_sum_exact(vals: list, nbits: int) -> None:
    # in place: vals[F] <- sum over supersets B of F of (-1)^{|B-F|} vals[B]
    for bit in range(nbits):
        step = 1 << bit
        for mask in range(1 << nbits):
            if not mask & step:
                vals[mask] -= vals[mask | step]


def _superset_signed_sum_float(arr: np.ndarray, nbits: int) -> None:
    view = arr.reshape((2,) * nbits)
    for axis in range(nbits):
        idx_lo = (slice(None),) * axis + (0,)
        idx_hi = (slice(None),) * axis + (1,)
        view[idx_lo] -= view[idx_hi]


def _sublattice_indices(n: int, alt: int) -> list[int]:
    # masks over X minus one alternative, re-expanded to full-width masks
    low = (1 << alt) - 1
    return [(c & low) | ((c >> alt) << (alt + 1)) for c in range(1 << (n - 1))]


def compute_bm(data: StochasticChoiceData) -> BMTable:
    """Both polynomial tables via per-alternative lattice transforms.

    Requires the full power set of frames.  Cost is O(n * 2^n) per
    alternative; the float path is vectorized, the rational path is exact.
    """
    if not data.full_domain:
        raise DataError("polynomial tables require observations for every frame")
    n = data.universe.n
    size = 1 << n
    q_cols = []
    y_cols = []
    for alt in range(n):
        sub_idx = _sublattice_indices(n, alt)
        if data.policy.exact:
            full = [data.probs[(alt, f)] for f in range(size)]
            sub = [full[f] for f in sub_idx]
            _superset_signed_sum_exact(full, n)
            _superset_signed_sum_exact(sub, n - 1)
            ycol: list = [Fraction(0)] * size
            for c, f in enumerate(sub_idx):
                ycol[f] = sub[c]
            q_cols.append(tuple(full))
            y_cols.append(tuple(ycol))
        else:
            full_arr = np.array([data.probs[(alt, f)] for f in range(size)], dtype=np.float64)
            sub_arr = full_arr[sub_idx].copy()
            _superset_signed_sum_float(full_arr, n)
            if n > 1:
                _superset_signed_sum_float(sub_arr, n - 1)
            ycol_arr = np.zeros(size, dtype=np.float64)
            ycol_arr[sub_idx] = sub_arr
            q_cols.append(full_arr)
            y_cols.append(ycol_arr)
    return BMTable(data.universe, data.policy, tuple(q_cols), tuple(y_cols))


def naive_bm(data: StochasticChoiceData) -> BMTable:
    """Reference implementation by direct inclusion-exclusion (O(4^n))."""
    if not data.full_domain:
        raise DataError("polynomial tables require observations for every frame")
    n = data.universe.n
    size = 1 << n
    zero = data.policy.zero()
    q_cols = []
    y_cols = []
    for alt in range(n):
        bit = 1 << alt
        qcol = [zero] * size
        ycol = [zero] * size
        for frame in range(size):
            free = (size - 1) & ~frame
            total_q = zero
            total_y = zero
            for extra in submasks(free):
                term = data.probs[(alt, frame | extra)]
                if bin(extra).count("1") % 2:
                    term = -term
                total_q += term
                if not (frame | extra) & bit:
                    total_y += term
            qcol[frame] = total_q
            ycol[frame] = total_y
        q_cols.append(tuple(qcol))
        y_cols.append(tuple(ycol))
    return BMTable(data.universe, data.policy, tuple(q_cols), tuple(y_cols))


# ---------------------------------------------------------------------------
# interim (interval-truncated) sums for partial data
# ---------------------------------------------------------------------------


def _interval_sum(data: StochasticChoiceData, alt: int, lo: int, hi: int) -> Number:
    if lo & ~hi:
        raise DataError("interval requires lo to be a subset of hi")
    total = data.policy.zero()
    for extra in submasks(hi & ~lo):
        frame = lo | extra
        p = data.get(alt, frame)
        if p is None:
            raise DataError(
                f"interval frame {data.universe.frame_str(frame)!r} not observed for "
                f"{data.universe.names[alt]!r}"
            )
        total = total - p if bin(extra).count("1") % 2 else total + p
    return total


def interim_y(data: StochasticChoiceData, alt: int, lo: int, hi: int) -> Number:
    """Truncated auxiliary sum over frames between ``lo`` and ``hi``.

    Defined for an alternative outside ``hi``; equals the full ``y(alt, lo)``
    when ``hi`` is the whole universe minus the alternative.  Computable, and
    therefore falsifying when negative, from partial data.
    """
    if hi & (1 << alt):
        raise DataError("interim y requires the alternative outside the upper frame")
    return _interval_sum(data, alt, lo, hi)


def interim_q(data: StochasticChoiceData, alt: int, lo: int, hi: int) -> Number:
    """Truncated framed sum; equals the full ``q(alt, lo)`` when hi covers X."""
    if not lo & (1 << alt):
        raise DataError("interim q requires the alternative inside the lower frame")
    return _interval_sum(data, alt, lo, hi)


# ---------------------------------------------------------------------------
# flow conservation
# ---------------------------------------------------------------------------


def flow_residuals(table: BMTable) -> dict[int, Number]:
    """Outflow plus leakage minus inflow at every node; all zero for any rule.

    Inflow at the top node is defined as 1 (the grand-frame q values sum to
    the grand-frame probabilities).
    """
    n = table.universe.n
    size = 1 << n
    out: dict[int, Number] = {}
    for frame in range(size):
        total = table.policy.zero()
        for alt in range(n):
            if frame & (1 << alt):
                total += table.q(alt, frame)
            else:
                total += table.y(alt, frame)
        if frame == size - 1:
            inflow: Number = table.policy.one()
        else:
            inflow = table.policy.zero()
            for alt in range(n):
                if not frame & (1 << alt):
                    inflow += table.q(alt, frame | (1 << alt))
        out[frame] = total - inflow
    return out


# ---------------------------------------------------------------------------
# diagram export
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HasseGraph:
    """Labeled subset-lattice diagram: down-edges carry q, leakages carry y."""

    universe: Universe
    q_edges: tuple[tuple[int, int, int, Number], ...]  # (src frame, dst frame, alt, value)
    leak_edges: tuple[tuple[int, int, Number], ...]  # (frame, alt, value)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(range(1 << self.universe.n))

    def to_json_dict(self) -> dict:
        uni = self.universe
        return {
            "universe": list(uni.names),
            "nodes": [uni.frame_str(f) for f in self.nodes],
            "q_edges": [
                {
                    "from": uni.frame_str(src),
                    "to": uni.frame_str(dst),
                    "alternative": uni.names[alt],
                    "value": number_to_json(val),
                }
                for src, dst, alt, val in self.q_edges
            ],
            "leak_edges": [
                {
                    "from": uni.frame_str(frame),
                    "alternative": uni.names[alt],
                    "value": number_to_json(val),
                }
                for frame, alt, val in self.leak_edges
            ],
        }

    def to_dot(self) -> str:
        from .core import number_to_str

        uni = self.universe

        def node_id(frame: int) -> str:
            return f'"{{{uni.frame_str(frame)}}}"'

        lines = ["digraph hasse {", "  rankdir=TB;"]
        for frame in self.nodes:
            lines.append(f"  {node_id(frame)};")
        for src, dst, alt, val in self.q_edges:
            label = f"q({uni.names[alt]})={number_to_str(val)}"
            lines.append(f'  {node_id(src)} -> {node_id(dst)} [label="{label}"];')
        for idx, (frame, alt, val) in enumerate(self.leak_edges):
            sink = f'"leak{idx}"'
            label = f"y({uni.names[alt]})={number_to_str(val)}"
            lines.append(f"  {sink} [shape=none, label=\"\"];")
            lines.append(f'  {node_id(frame)} -> {sink} [style=dashed, label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def export_hasse(table: BMTable) -> HasseGraph:
    """Diagram with one outgoing edge per alternative at every node."""
    n = table.universe.n
    q_edges = []
    leak_edges = []
    for frame in range(1 << n):
        for alt in range(n):
            bit = 1 << alt
            if frame & bit:
                q_edges.append((frame, frame & ~bit, alt, table.q(alt, frame)))
            else:
                leak_edges.append((frame, alt, table.y(alt, frame)))
    return HasseGraph(table.universe, tuple(q_edges), tuple(leak_edges))
