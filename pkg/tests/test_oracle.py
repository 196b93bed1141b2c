import math

import pytest

from kloostlab import oracle
from kloostlab.counting import SampleSet, Window
from kloostlab.satotate import FULL_WINDOW, AngleWindow


def test_naive_count_examples():
    X = SampleSet.full(2)
    assert oracle.naive_count(3, 7, X, Window(0, 3, 7), "inverse") == 2
    # full window counts all of X_m
    assert oracle.naive_count(5, 7, X, Window(0, 7, 7), "inverse") == 4


def test_naive_kloosterman_examples():
    assert oracle.naive_kloosterman(1, 1, 3) == pytest.approx(-1 + 0j, abs=1e-12)
    assert oracle.naive_kloosterman(1, 2, 3) == pytest.approx(2 + 0j, abs=1e-12)
    assert oracle.naive_kloosterman(1, 1, 2) == pytest.approx(1 + 0j, abs=1e-12)


def test_naive_mu():
    assert oracle.naive_mu(FULL_WINDOW, 10**4) == pytest.approx(1.0, abs=1e-10)
    assert oracle.naive_mu(AngleWindow(0, math.pi / 2), 10**4) == pytest.approx(0.5, abs=1e-10)
    closed = 1 / 3 + math.sqrt(3) / (2 * math.pi)
    assert oracle.naive_mu(AngleWindow(math.pi / 3, 2 * math.pi / 3), 10**4) == pytest.approx(
        closed, abs=1e-10)
