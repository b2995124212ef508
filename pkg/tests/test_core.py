"""Parsing, validation, numeric policy, and frame encoding."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from framechoice.core import (
    DataError,
    FLOAT64,
    RATIONAL,
    NumericPolicy,
    StochasticChoiceData,
    Universe,
    members,
    number_to_str,
    parse_deterministic,
    parse_stochastic,
    validate,
)


class TestUniverse:
    def test_basic(self):
        uni = Universe(("a", "b", "c"))
        assert uni.n == 3
        assert uni.full_frame == 0b111
        assert uni.frame("a|c") == 0b101
        assert uni.frame_str(0b101) == "a|c"
        assert uni.frame("") == 0

    def test_duplicate_labels_rejected(self):
        with pytest.raises(DataError):
            Universe(("a", "a"))

    def test_reserved_characters_rejected(self):
        with pytest.raises(DataError):
            Universe(("a|b",))
        with pytest.raises(DataError):
            Universe(("a,b",))
        with pytest.raises(DataError):
            Universe(("",))

    def test_size_cap(self):
        Universe(tuple(f"x{i}" for i in range(20)))
        with pytest.raises(DataError):
            Universe(tuple(f"x{i}" for i in range(21)))
        with pytest.raises(DataError):
            Universe(())

    def test_frame_sorted_labels(self):
        uni = Universe(("z", "a"))
        assert uni.frame_str(0b11) == "a|z"
        assert uni.frame("z|a") == 0b11


@given(st.integers(0, 2**20 - 1), st.integers(0, 2**20 - 1))
def test_symmetric_difference_is_xor(f1, f2):
    sym = set(members(f1)) ^ set(members(f2))
    assert set(members(f1 ^ f2)) == sym


class TestNumericPolicy:
    def test_rational_parses_decimals_exactly(self):
        assert RATIONAL.parse("0.45") == Fraction(9, 20)
        assert RATIONAL.parse("9/20") == Fraction(9, 20)

    def test_rational_arithmetic_is_exact(self):
        p = RATIONAL.parse
        assert p("0.7") - p("0.45") - p("0.45") + p("0.1") == Fraction(-1, 10)

    def test_float_tolerance(self):
        pol = NumericPolicy("float64", 1e-9)
        assert pol.is_close(1.0, 1.0 + 5e-10)
        assert not pol.is_close(1.0, 1.0 + 5e-9)
        assert pol.is_nonneg(-5e-10)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            NumericPolicy("decimal")
        with pytest.raises(ValueError):
            NumericPolicy("float64", -1.0)

    def test_number_rendering(self):
        assert number_to_str(Fraction(9, 20)) == "0.45"
        assert number_to_str(Fraction(1, 3)) == "1/3"
        assert number_to_str(Fraction(1)) == "1"
        assert number_to_str(0.25) == "0.25"


class TestParseStochastic:
    def test_two_alternative_parse(self):
        text = "frame,alternative,probability\n,a,0.7\n,b,0.3\na,a,0.8\na,b,0.2\n"
        data = parse_stochastic(text, FLOAT64)
        assert data.universe.names == ("a", "b")
        assert data.domain == (0, 1)
        assert data.probs[(0, 0)] == 0.7

    def test_frame_sum_error(self):
        text = "frame,alternative,probability\n,a,0.7\n,b,0.25\n"
        with pytest.raises(DataError, match="frame sum"):
            parse_stochastic(text, FLOAT64)

    def test_rational_mode_stores_exact(self):
        text = "frame,alternative,probability\n,a,0.45\n,b,0.55\n"
        data = parse_stochastic(text, RATIONAL)
        assert data.probs[(0, 0)] == Fraction(9, 20)

    def test_duplicate_row_rejected(self):
        text = "frame,alternative,probability\n,a,0.5\n,a,0.5\n"
        with pytest.raises(DataError, match="duplicate"):
            parse_stochastic(text, FLOAT64)

    def test_probability_out_of_range(self):
        text = "frame,alternative,probability\n,a,1.5\n,b,-0.5\n"
        with pytest.raises(DataError, match="outside"):
            parse_stochastic(text, FLOAT64)

    def test_unknown_label_with_explicit_universe(self):
        text = "# universe: a|b\nframe,alternative,probability\n,z,1.0\n"
        with pytest.raises(DataError, match="unknown alternative"):
            parse_stochastic(text, FLOAT64)

    def test_partial_frames_rejected_by_default(self):
        text = "# universe: a|b\nframe,alternative,probability\n,a,0.5\n"
        with pytest.raises(DataError, match="incomplete"):
            parse_stochastic(text, FLOAT64)
        data = parse_stochastic(text, FLOAT64, allow_partial=True)
        assert data.partial

    def test_partial_mass_cannot_exceed_one(self):
        text = "# universe: a|b|c\nframe,alternative,probability\n,a,0.7\n,b,0.7\n"
        with pytest.raises(DataError, match="exceeds"):
            parse_stochastic(text, FLOAT64, allow_partial=True)

    def test_bad_header(self):
        with pytest.raises(DataError, match="header"):
            parse_stochastic("foo,bar\n", FLOAT64)

    def test_roundtrip_identity_both_modes(self):
        text = (
            "frame,alternative,probability\n"
            ",a,0.7\n,b,0.3\nb,a,0.45\nb,b,0.55\na|b,a,0.25\na|b,b,0.75\n"
        )
        for policy in (FLOAT64, RATIONAL):
            first = parse_stochastic(text, policy)
            second = parse_stochastic(first.to_csv(), policy)
            assert dict(second.probs) == dict(first.probs)
            assert second.universe == first.universe


class TestParseDeterministic:
    def test_table1_c2(self):
        text = "frame,choice\n,a\na,a\nb,b\na|b,a\n"
        data = parse_deterministic(text)
        assert data.choices[0] == 0
        assert data.choices[0b10] == 1
        assert data.choices[0b11] == 0

    def test_choice_outside_frame_is_fine(self):
        data = parse_deterministic("frame,choice\nb,a\n")
        assert data.choices[data.universe.frame("b")] == data.universe.index("a")

    def test_unknown_choice_with_explicit_universe(self):
        with pytest.raises(DataError, match="unknown alternative"):
            parse_deterministic("# universe: a|b\nframe,choice\n,z\n")

    def test_empty_body_with_universe(self):
        data = parse_deterministic("# universe: a|b\nframe,choice\n")
        assert data.domain == ()
        assert data.universe.n == 2

    def test_empty_body_without_universe_fails(self):
        with pytest.raises(DataError, match="cannot infer"):
            parse_deterministic("frame,choice\n")

    def test_duplicate_frame(self):
        with pytest.raises(DataError, match="duplicate"):
            parse_deterministic("frame,choice\na,a\na,b\n")

    def test_roundtrip(self):
        text = "frame,choice\n,a\na,a\nb,b\na|b,a\n"
        first = parse_deterministic(text)
        second = parse_deterministic(first.to_csv())
        assert dict(second.choices) == dict(first.choices)


class TestValidate:
    def _full_n3(self):
        uni = Universe(("a", "b", "c"))
        probs = {}
        for frame in range(8):
            probs[(0, frame)] = 0.5
            probs[(1, frame)] = 0.25
            probs[(2, frame)] = 0.25
        return StochasticChoiceData(uni, probs, FLOAT64)

    def test_full_domain_flags(self):
        report = validate(self._full_n3())
        assert report.full_domain
        assert report.contains_all_frames_up_to == {0: True, 1: True, 2: True, 3: True}
        assert report.positivity

    def test_small_domain_flags(self):
        uni = Universe(("a", "b", "c"))
        probs = {}
        for frame in (0, 0b001, 0b010, 0b100):
            for alt, p in ((0, 0.5), (1, 0.25), (2, 0.25)):
                probs[(alt, frame)] = p
        report = validate(StochasticChoiceData(uni, probs, FLOAT64))
        assert not report.full_domain
        assert report.contains_all_frames_up_to[0]
        assert report.contains_all_frames_up_to[1]
        assert not report.contains_all_frames_up_to[2]

    def test_positivity_flag(self):
        uni = Universe(("a", "b"))
        probs = {(0, 0): 1.0, (1, 0): 0.0, (0, 1): 1.0, (1, 1): 0.0}
        report = validate(StochasticChoiceData(uni, probs, FLOAT64))
        assert not report.positivity

    def test_json_shape(self):
        data = self._full_n3()
        payload = validate(data).to_json_dict(data.universe)
        assert set(payload) == {
            "frame_sums",
            "full_domain",
            "contains_all_frames_up_to",
            "positivity",
            "partial_frames",
        }
        assert payload["frame_sums"]["a|b|c"] == pytest.approx(1.0)


def test_dataset_json_fields(intro_full_rational):
    payload = intro_full_rational.to_json_dict()
    assert payload["universe"] == ["a", "b", "c"]
    assert {"frame", "alternative", "p"} == set(payload["probs"][0])
    assert len(payload["probs"]) == 24


def test_mode_mismatch_rejected():
    uni = Universe(("a",))
    with pytest.raises(DataError, match="numeric mode"):
        StochasticChoiceData(uni, {(0, 0): 1.0}, RATIONAL)
    with pytest.raises(DataError, match="numeric mode"):
        StochasticChoiceData(uni, {(0, 0): Fraction(1)}, FLOAT64)
