"""Alternatives, frames, choice datasets, parsing, and the shared numeric policy.

Alternatives are referenced by index ``0..n-1`` into a :class:`Universe`;
frames are ``n``-bit integer masks over those indices, so subset tests and
lattice iteration are plain integer arithmetic.  All analysis modules work in
one of two numeric modes: ``float64`` with a tolerance ``eps``, or exact
rational arithmetic backed by :class:`fractions.Fraction`.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Number = Union[float, Fraction]

MAX_UNIVERSE = 20  # lattice tables are O(n * 2^n)
_RESERVED = ("|", ",")


class DataError(ValueError):
    """Malformed or inconsistent choice data."""


# ---------------------------------------------------------------------------
# numeric policy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NumericPolicy:
    """Numeric mode shared by a dataset and everything derived from it.

    ``float64`` compares with tolerance ``eps`` (scaled up for deeper
    alternating sums by the caller); ``rational`` parses decimal strings
    exactly and compares without tolerance.
    """

    mode: str = "float64"
    eps: float = 1e-9

    def __post_init__(self) -> None:
        if self.mode not in ("float64", "rational"):
            raise ValueError(f"unknown numeric mode {self.mode!r}")
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")

    @property
    def exact(self) -> bool:
        return self.mode == "rational"

    def parse(self, text: str) -> Number:
        """Parse a number literal (decimal, or ``p/q`` in rational mode)."""
        text = text.strip()
        try:
            if self.exact:
                return Fraction(text)
            return float(Fraction(text)) if "/" in text else float(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DataError(f"bad number literal {text!r}") from exc

    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0

    def one(self) -> Number:
        return Fraction(1) if self.exact else 1.0

    def convert(self, x: Number) -> Number:
        """Coerce a number into this policy's representation (exactly)."""
        if self.exact:
            return x if isinstance(x, Fraction) else Fraction(x)
        return float(x)

    def is_close(self, x: Number, y: Number, scale: int = 1) -> bool:
        if self.exact:
            return x == y
        return abs(x - y) <= scale * self.eps

    def is_nonneg(self, x: Number, scale: int = 1) -> bool:
        if self.exact:
            return x >= 0
        return x >= -scale * self.eps


FLOAT64 = NumericPolicy("float64")
RATIONAL = NumericPolicy("rational")


def number_to_str(x: Number) -> str:
    """Render a number losslessly (exact decimal for Fractions when possible)."""
    if isinstance(x, Fraction):
        dec = _terminating_decimal(x)
        return dec if dec is not None else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def number_to_json(x: Number) -> object:
    """JSON encoding: floats stay numbers, Fractions become strings."""
    return number_to_str(x) if isinstance(x, Fraction) else float(x)


def _terminating_decimal(x: Fraction) -> str | None:
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return None
    k = max(twos, fives)
    scaled = x.numerator * 10**k // x.denominator
    if k == 0:
        return str(scaled)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(k + 1, "0")
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


# ---------------------------------------------------------------------------
# universe and frames
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Universe:
    """Ordered set of distinct alternative labels.

    The grand set of alternatives stays fixed; only the framed subset varies.
    Labels may not contain the separator characters ``|`` or ``,``.
    """

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not 1 <= len(names) <= MAX_UNIVERSE:
            raise DataError(f"universe size must be in 1..{MAX_UNIVERSE}, got {len(names)}")
        if len(set(names)) != len(names):
            raise DataError("duplicate alternative labels")
        for name in names:
            if not name or any(ch in name for ch in _RESERVED):
                raise DataError(f"bad alternative label {name!r}")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def full_frame(self) -> int:
        return (1 << self.n) - 1

    def index(self, label: str) -> int:
        try:
            return self.names.index(label)
        except ValueError:
            raise DataError(f"unknown alternative {label!r}") from None

    def frame(self, labels: Iterable[str] | str) -> int:
        """Build a frame mask from labels (iterable, or a ``|``-joined string)."""
        if isinstance(labels, str):
            labels = [] if labels == "" else labels.split("|")
        mask = 0
        for label in labels:
            bit = 1 << self.index(label)
            if mask & bit:
                raise DataError(f"duplicate label {label!r} in frame")
            mask |= bit
        return mask

    def frame_str(self, mask: int) -> str:
        """Canonical text form of a frame: ``|``-joined sorted labels."""
        return "|".join(sorted(self.names[i] for i in members(mask)))

    def frames(self) -> Iterator[int]:
        """All 2^n frames in ascending mask order."""
        return iter(range(1 << self.n))


def members(mask: int) -> tuple[int, ...]:
    """Indices contained in a frame mask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def submasks(mask: int) -> Iterator[int]:
    """All subsets of ``mask`` (including 0 and ``mask`` itself)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def supersets(mask: int, n: int) -> Iterator[int]:
    """All supersets of ``mask`` within an n-element universe."""
    free = ((1 << n) - 1) & ~mask
    for extra in submasks(free):
        yield mask | extra


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StochasticChoiceData:
    """A stochastic choice rule: probability of each alternative at each frame.

    Probability may be positive for alternatives outside the frame; that is
    the point of the model.  A frame is *complete* when all ``n`` alternatives
    carry an entry; complete frames must sum to one.  Frames observed only for
    some alternatives are permitted (they arise in falsification work on
    partial data) but most analyses require complete frames.
    """

    universe: Universe
    probs: Mapping[tuple[int, int], Number]
    policy: NumericPolicy = FLOAT64
    domain: tuple[int, ...] = field(init=False)
    partial: bool = field(init=False)

    def __post_init__(self) -> None:
        n = self.universe.n
        full = self.universe.full_frame
        per_frame: dict[int, list[int]] = {}
        for (alt, frame), p in self.probs.items():
            if not 0 <= alt < n:
                raise DataError(f"alternative index {alt} out of range")
            if not 0 <= frame <= full:
                raise DataError(f"frame mask {frame} out of range")
            if self.policy.exact != isinstance(p, Fraction):
                raise DataError("probability representation does not match numeric mode")
            if not (self.policy.is_nonneg(p) and self.policy.is_nonneg(1 - p)):
                raise DataError(
                    f"probability {number_to_str(p)} for ({self.universe.names[alt]!r}, "
                    f"{self.universe.frame_str(frame)!r}) outside [0,1]"
                )
            per_frame.setdefault(frame, []).append(alt)
        partial = False
        for frame, alts in per_frame.items():
            total = sum(self.probs[(a, frame)] for a in alts)
            if len(alts) == n:
                if not self.policy.is_close(total, self.policy.one(), scale=n):
                    raise DataError(
                        f"frame sum for {self.universe.frame_str(frame)!r} is "
                        f"{number_to_str(total)}, expected 1"
                    )
            else:
                partial = True
                if not (total <= 1 or self.policy.is_close(total, self.policy.one(), scale=n)):
                    raise DataError(
                        f"observed mass {number_to_str(total)} at partial frame "
                        f"{self.universe.frame_str(frame)!r} exceeds 1"
                    )
        object.__setattr__(self, "domain", tuple(sorted(per_frame)))
        object.__setattr__(self, "partial", partial)

    def rho(self, alt: int, frame: int) -> Number:
        try:
            return self.probs[(alt, frame)]
        except KeyError:
            raise DataError(
                f"no observation for ({self.universe.names[alt]!r}, "
                f"{self.universe.frame_str(frame)!r})"
            ) from None

    def get(self, alt: int, frame: int) -> Number | None:
        return self.probs.get((alt, frame))

    def is_complete_frame(self, frame: int) -> bool:
        return all((a, frame) in self.probs for a in range(self.universe.n))

    @property
    def full_domain(self) -> bool:
        """True when every frame of the power set is completely observed."""
        if len(self.domain) != 1 << self.universe.n:
            return False
        return not self.partial

    def contains_frames_up_to(self, k: int) -> bool:
        n = self.universe.n
        frames = set(self.domain)
        return all(
            f in frames and self.is_complete_frame(f)
            for f in range(1 << n)
            if bin(f).count("1") <= k
        )

    def positivity(self) -> bool:
        """Whether every observed probability is strictly positive."""
        return all(p > 0 for p in self.probs.values())

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# universe: {'|'.join(self.universe.names)}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["frame", "alternative", "probability"])
        for frame in self.domain:
            for alt in range(self.universe.n):
                p = self.probs.get((alt, frame))
                if p is not None:
                    writer.writerow(
                        [self.universe.frame_str(frame), self.universe.names[alt], number_to_str(p)]
                    )
        return out.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "universe": list(self.universe.names),
            "numeric_mode": self.policy.mode,
            "frames": [self.universe.frame_str(f) for f in self.domain],
            "probs": [
                {
                    "frame": self.universe.frame_str(frame),
                    "alternative": self.universe.names[alt],
                    "p": number_to_json(p),
                }
                for (alt, frame), p in sorted(self.probs.items(), key=lambda kv: (kv[0][1], kv[0][0]))
            ],
        }


@dataclass(frozen=True)
class DeterministicChoiceData:
    """A deterministic choice rule: one chosen alternative per observed frame.

    The chosen alternative need not belong to the frame.
    """

    universe: Universe
    choices: Mapping[int, int]
    domain: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        n = self.universe.n
        full = self.universe.full_frame
        for frame, alt in self.choices.items():
            if not 0 <= frame <= full:
                raise DataError(f"frame mask {frame} out of range")
            if not 0 <= alt < n:
                raise DataError(f"alternative index {alt} out of range")
        object.__setattr__(self, "domain", tuple(sorted(self.choices)))

    def choice(self, frame: int) -> int:
        try:
            return self.choices[frame]
        except KeyError:
            raise DataError(f"no observation for frame {self.universe.frame_str(frame)!r}") from None

    def contains_frames_up_to(self, k: int) -> bool:
        frames = set(self.domain)
        return all(f in frames for f in range(1 << self.universe.n) if bin(f).count("1") <= k)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# universe: {'|'.join(self.universe.names)}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["frame", "choice"])
        for frame in self.domain:
            writer.writerow([self.universe.frame_str(frame), self.universe.names[self.choices[frame]]])
        return out.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "universe": list(self.universe.names),
            "frames": [self.universe.frame_str(f) for f in self.domain],
            "choices": [
                {"frame": self.universe.frame_str(f), "choice": self.universe.names[self.choices[f]]}
                for f in self.domain
            ],
        }


# ---------------------------------------------------------------------------
# CSV parsing
# ---------------------------------------------------------------------------


def _read_rows(text: str, header: list[str]) -> tuple[list[list[str]], Universe | None]:
    explicit: Universe | None = None
    lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("universe:"):
                labels = body.split(":", 1)[1].strip()
                explicit = Universe(tuple(labels.split("|"))) if labels else None
            continue
        lines.append(raw)
    if not lines:
        raise DataError("missing header row")
    rows = list(csv.reader(lines))
    got = [cell.strip() for cell in rows[0]]
    if got != header:
        raise DataError(f"expected header {','.join(header)!r}, got {','.join(got)!r}")
    body_rows = []
    for row in rows[1:]:
        cells = [cell.strip() for cell in row]
        if len(cells) != len(header):
            raise DataError(f"row {row!r} has {len(cells)} fields, expected {len(header)}")
        body_rows.append(cells)
    return body_rows, explicit


def _infer_universe(labels: set[str]) -> Universe:
    if not labels:
        raise DataError("cannot infer a universe from empty data; add a '# universe:' header")
    return Universe(tuple(sorted(labels)))


def parse_stochastic(
    text: str,
    policy: NumericPolicy = FLOAT64,
    allow_partial: bool = False,
) -> StochasticChoiceData:
    """Parse ``frame,alternative,probability`` CSV content.

    The frame field is a ``|``-joined label list (empty string for the empty
    frame).  The universe is the union of labels seen, unless an explicit
    ``# universe: a|b|c`` comment is present.  Frames with observations for
    only some alternatives are rejected unless ``allow_partial`` is set; they
    are never renormalized.
    """
    rows, explicit = _read_rows(text, ["frame", "alternative", "probability"])
    if explicit is None:
        seen: set[str] = set()
        for frame_s, alt_s, _ in rows:
            seen.add(alt_s)
            seen.update(lbl for lbl in frame_s.split("|") if lbl)
        universe = _infer_universe(seen)
    else:
        universe = explicit

    probs: dict[tuple[int, int], Number] = {}
    for frame_s, alt_s, p_s in rows:
        key = (universe.index(alt_s), universe.frame(frame_s))
        if key in probs:
            raise DataError(f"duplicate row for ({alt_s!r}, {frame_s!r})")
        probs[key] = policy.parse(p_s)
    data = StochasticChoiceData(universe, probs, policy)
    if data.partial and not allow_partial:
        bad = [f for f in data.domain if not data.is_complete_frame(f)]
        raise DataError(
            "incomplete frames (missing alternatives are not imputed as 0): "
            + ", ".join(repr(universe.frame_str(f)) for f in bad)
        )
    return data


def parse_deterministic(text: str) -> DeterministicChoiceData:
    """Parse ``frame,choice`` CSV content into a deterministic choice rule."""
    rows, explicit = _read_rows(text, ["frame", "choice"])
    if explicit is None:
        seen: set[str] = set()
        for frame_s, choice_s in rows:
            seen.add(choice_s)
            seen.update(lbl for lbl in frame_s.split("|") if lbl)
        universe = _infer_universe(seen)
    else:
        universe = explicit

    choices: dict[int, int] = {}
    for frame_s, choice_s in rows:
        frame = universe.frame(frame_s)
        if frame in choices:
            raise DataError(f"duplicate row for frame {frame_s!r}")
        choices[frame] = universe.index(choice_s)
    return DeterministicChoiceData(universe, choices)


# ---------------------------------------------------------------------------
# validation report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    """Summary of a stochastic dataset: frame sums, coverage, positivity."""

    frame_sums: Mapping[int, Number]
    full_domain: bool
    contains_all_frames_up_to: Mapping[int, bool]
    positivity: bool
    partial_frames: tuple[int, ...]

    def to_json_dict(self, universe: Universe) -> dict:
        return {
            "frame_sums": {
                universe.frame_str(f): number_to_json(s) for f, s in sorted(self.frame_sums.items())
            },
            "full_domain": self.full_domain,
            "contains_all_frames_up_to": {
                str(k): v for k, v in sorted(self.contains_all_frames_up_to.items())
            },
            "positivity": self.positivity,
            "partial_frames": [universe.frame_str(f) for f in self.partial_frames],
        }


def validate(data: StochasticChoiceData) -> ValidationReport:
    """Report-only health check: sums, domain completeness, positivity."""
    sums = {
        frame: sum(
            data.probs[(a, frame)] for a in range(data.universe.n) if (a, frame) in data.probs
        )
        for frame in data.domain
    }
    return ValidationReport(
        frame_sums=sums,
        full_domain=data.full_domain,
        contains_all_frames_up_to={k: data.contains_frames_up_to(k) for k in range(4)},
        positivity=data.positivity(),
        partial_frames=tuple(f for f in data.domain if not data.is_complete_frame(f)),
    )


def dumps_json(payload: dict) -> str:
    """Canonical JSON used everywhere: sorted keys, stable separators."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
