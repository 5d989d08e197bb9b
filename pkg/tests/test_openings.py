from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, strategies as st

from openingbench.openings import (
    BUILTIN_OPENINGS,
    ECO_TABLE,
    OpeningSpec,
    RarityInput,
    Role,
    builtin_opening,
    eco_tag,
    group_baseline,
    rarity_ratio,
    validate_spec,
)
from openingbench.rules import Color, Move

# innovation half-moves read off the printed innovation moves (e.g. 3...Nd4 is ply 6)
INNOVATION_PLY = {
    "C61": 6, "C50": 5, "C44": 5, "C41": 4, "C37": 3,
    "B21": 3, "B22": 3, "B12": 2, "B01": 2, "B07": 2,
}


@pytest.mark.parametrize("baseline, innovation, expected", [(9, 1, 9.0), (5, 5, 1.0), (1459.2, 1, 1459.2)])
def test_rarity_ratio(baseline, innovation, expected):
    assert rarity_ratio(RarityInput(baseline, innovation)) == pytest.approx(expected)


@given(st.floats(1e-3, 1e6), st.floats(1e-3, 1e6), st.floats(1e-3, 1e3))
def test_rarity_ratio_scale_invariant(a, b, k):
    assert rarity_ratio(RarityInput(a * k, b * k)) == pytest.approx(rarity_ratio(RarityInput(a, b)), rel=1e-9)


def test_rarity_needs_positive_frequencies():
    with pytest.raises(ValueError):
        RarityInput(0, 1)


def test_twelve_builtins():
    assert len(BUILTIN_OPENINGS) == 12
    assert [s.eco for s in BUILTIN_OPENINGS if s.role is Role.BASELINE] == ["C68", "B53"]


@pytest.mark.parametrize("spec", BUILTIN_OPENINGS, ids=lambda s: s.eco)
def test_builtins_validate_against_group_baseline(spec):
    baseline = group_baseline(spec)
    report = validate_spec(spec, baseline)
    assert report.ok, report.violations
    if spec.role is Role.TEST:
        assert spec.innovation_ply == INNOVATION_PLY[spec.eco]
        assert baseline.group == spec.group


def test_bird_defense_against_ruy_lopez():
    bird = builtin_opening("C61")
    assert bird.prefix == tuple("e4 e5 Nf3 Nc6 Bb5 Nd4".split())
    assert validate_spec(bird, builtin_opening("C68")).ok
    assert bird.innovator is Color.BLACK


def test_short_prefix_is_a_violation():
    spec = OpeningSpec("X00", "short", tuple("e4 e5 Nf3 Nc6 Bb5".split()), Role.BASELINE)
    report = validate_spec(spec)
    assert not report.ok and "half-moves" in report.violations[0]


def test_illegal_prefix_is_a_violation():
    spec = OpeningSpec("X00", "bad", tuple("e4 e5 Nf3 Nc6 Bb5 Ke6".split()), Role.BASELINE)
    assert any("illegal" in v for v in validate_spec(spec).violations)


def test_wrong_innovation_ply_is_caught():
    bird = dataclasses.replace(builtin_opening("C61"), innovation_ply=5)
    report = validate_spec(bird, builtin_opening("C68"))
    assert any("departs" in v for v in report.violations)


def test_baseline_with_innovation_is_caught():
    spec = dataclasses.replace(builtin_opening("C68"), innovation_ply=3)
    assert not validate_spec(spec).ok


def test_group_mismatch_is_caught():
    spec = dataclasses.replace(builtin_opening("C61"), group="2")
    assert any("group" in v for v in validate_spec(spec, builtin_opening("C68")).violations)


def test_innovator_follows_ply_parity():
    assert builtin_opening("C37").innovator is Color.WHITE
    assert builtin_opening("B12").innovator is Color.BLACK
    assert builtin_opening("C68").innovator is None


def test_prefix_moves():
    moves = builtin_opening("C68").moves()
    assert moves[0] == Move.from_uci("e2e4") and moves[-1] == Move.from_uci("a7a6")


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin_opening("A00")


@pytest.mark.parametrize(
    "line, code",
    [
        ("e4 e5 Nf3 Nc6 Bb5 a6", "C68"),
        ("e4 c5 Nf3 d6 d4 cxd4", "B53"),
        ("d4 d5", None),
        ("e4 e5 Nf3 Nc6 Bb5 Nd4 O-O", "C61"),
    ],
)
def test_eco_tag(line, code):
    assert eco_tag(line.split()) == code


@pytest.mark.parametrize("spec", BUILTIN_OPENINGS, ids=lambda s: s.eco)
def test_eco_tag_recovers_builtin_codes(spec):
    assert eco_tag(spec.prefix) == spec.eco


def test_eco_tag_prefers_longest_line():
    codes = dict(ECO_TABLE)
    assert len(codes) == len(ECO_TABLE)
    # Giuoco Piano games that reach the 4.c3 main line retag as C54
    assert eco_tag("e4 e5 Nf3 Nc6 Bc4 Bc5 c3".split()) == "C50"
    assert eco_tag("e4 e5 Nf3 Nc6 Bc4 Bc5 c3 Nf6 d4 exd4 cxd4 Bb4+".split()) == "C54"
