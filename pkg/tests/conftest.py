"""Shared fixtures: golden datasets and seeded generators."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from framechoice.core import (
    FLOAT64,
    RATIONAL,
    NumericPolicy,
    StochasticChoiceData,
    Universe,
    parse_stochastic,
)

DATA_DIR = Path(__file__).parent / "data"

TABLE3_UNIVERSE = Universe(("a", "b"))
AB, A, B, EMPTY = 0b11, 0b01, 0b10, 0b00


def table3_data(lam, gam, policy: NumericPolicy = RATIONAL) -> StochasticChoiceData:
    """The two-alternative parametric family: free grand-frame and empty-frame splits."""
    conv = policy.convert
    probs = {
        (0, AB): conv(Fraction(lam)),
        (1, AB): conv(1 - Fraction(lam)),
        (0, A): conv(Fraction(7, 10)),
        (1, A): conv(Fraction(3, 10)),
        (0, B): conv(Fraction(1, 10)),
        (1, B): conv(Fraction(9, 10)),
        (0, EMPTY): conv(Fraction(gam)),
        (1, EMPTY): conv(1 - Fraction(gam)),
    }
    return StochasticChoiceData(TABLE3_UNIVERSE, probs, policy)


def load_fixture(name: str, policy: NumericPolicy, allow_partial: bool = False):
    text = (DATA_DIR / name).read_text()
    return parse_stochastic(text, policy, allow_partial=allow_partial)


def random_rho(universe: Universe, rng: random.Random, policy: NumericPolicy):
    """Arbitrary full-domain rule; exact frame sums in both modes."""
    n = universe.n
    probs = {}
    for frame in range(1 << n):
        raw = [rng.randrange(1, 1000) for _ in range(n)]
        total = sum(raw)
        if policy.exact:
            for alt in range(n):
                probs[(alt, frame)] = Fraction(raw[alt], total)
        else:
            for alt in range(n - 1):
                probs[(alt, frame)] = raw[alt] / total
            probs[(n - 1, frame)] = 1.0 - sum(raw[alt] / total for alt in range(n - 1))
    return StochasticChoiceData(universe, probs, policy)


@pytest.fixture
def intro_full_rational():
    return load_fixture("intro_full.csv", RATIONAL)


@pytest.fixture
def intro_full_float():
    return load_fixture("intro_full.csv", FLOAT64)


@pytest.fixture
def second_full_rational():
    return load_fixture("second_full.csv", RATIONAL)


@pytest.fixture
def intro_partial_n3():
    return load_fixture("intro_partial_n3.csv", RATIONAL, allow_partial=True)


@pytest.fixture
def intro_partial_n4():
    return load_fixture("intro_partial_n4.csv", RATIONAL, allow_partial=True)


@pytest.fixture
def second_partial():
    return load_fixture("second_partial.csv", RATIONAL, allow_partial=True)
