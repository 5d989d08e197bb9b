from __future__ import annotations

import os
import shlex
import sys

import pytest

from openingbench.model import OutcomeCounts

# (expt, eco, white, black, draws) as published for the twelve 300-game matches
TABLE2 = [
    ("1", "C68", 16, 3, 281),
    ("2", "C61", 56, 2, 242),
    ("3", "C50", 3, 7, 290),
    ("4", "C44", 12, 7, 281),
    ("5", "C41", 32, 0, 268),
    ("6", "C37", 4, 29, 267),
    ("7", "B53", 21, 2, 277),
    ("8", "B21", 7, 13, 280),
    ("9", "B22", 17, 3, 280),
    ("10", "B12", 37, 4, 259),
    ("11", "B01", 59, 0, 241),
    ("12", "B07", 60, 2, 238),
]

# test eco -> (baseline eco, distance, stdev, t, p, rejected) from the hypothesis table
TABLE3 = {
    "C61": ("C68", 40.012, 5.861, 6.827, 1.1e-11, True),
    "C50": ("C68", 11.705, 3.904, 2.998, 0.00275, False),
    "C44": ("C68", 5.657, 4.266, 1.326, 0.18497, False),
    "C41": ("C68", 16.279, 4.949, 3.289, 0.00102, False),
    "C37": ("C68", 28.636, 5.016, 5.709, 1.3e-08, True),
    "B21": ("B53", 17.804, 4.508, 3.949, 8.1e-05, True),
    "B22": ("B53", 4.123, 4.522, 0.912, 0.362, False),
    "B12": ("B53", 16.125, 5.367, 3.005, 0.0027, False),
    "B01": ("B53", 38.053, 5.839, 6.517, 9.1e-11, True),
    "B07": ("B53", 39.000, 5.848, 6.669, 3.3e-11, True),
}

CATEGORIES = {
    "C61": "F", "C50": "C", "C44": "C", "C41": "C", "C37": "F",
    "B21": "F", "B22": "C", "B12": "C", "B01": "F", "B07": "F",
}


def counts_for(eco: str) -> OutcomeCounts:
    for _, code, w, b, d in TABLE2:
        if code == eco:
            return OutcomeCounts.of(w, b, d)
    raise KeyError(eco)


TOY_ENGINE = (sys.executable, "-m", "openingbench.uci.toy_engine")


def engine_command() -> tuple[str, ...]:
    value = os.environ.get("OPENINGBENCH_ENGINE")
    return tuple(shlex.split(value)) if value else TOY_ENGINE


@pytest.fixture
def toy_engine_command() -> tuple[str, ...]:
    return TOY_ENGINE
