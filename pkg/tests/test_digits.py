import itertools
import json
from fractions import Fraction as F

import numpy as np
import pytest

from tubenull.digits import (
    DigitSystem,
    DigitSystemError,
    FullGridError,
    carpet,
    cylinder_cube,
    iter_words,
    menger_sponge,
    sample_point,
    validate_system,
    word,
)


def test_carpet_is_valid():
    s = validate_system(2, 3, [(a, b) for a in range(3) for b in range(3) if (a, b) != (1, 1)])
    assert s.size == 8
    assert s == carpet()


def test_full_grid_rejected():
    with pytest.raises(FullGridError):
        validate_system(2, 3, list(itertools.product(range(3), repeat=2)))


def test_menger_sponge_digits():
    # drop the 6 face centres and the centre: cells with >= 2 middle coordinates
    expected = {c for c in itertools.product(range(3), repeat=3) if sum(x == 1 for x in c) < 2}
    s = menger_sponge()
    assert s.size == 20
    assert set(s.digits) == expected


@pytest.mark.parametrize(
    "d, N, digits",
    [
        (1, 3, [(0,)]),
        (2, 1, [(0, 0)]),
        (2, 3, []),
        (2, 3, [(0, 0), (0, 0)]),
        (2, 3, [(0, 3)]),
        (2, 3, [(0, -1)]),
        (2, 3, [(0, 0, 0)]),
        (2, 3, [(0.0, 1)]),
        (True, 3, [(0, 0)]),
    ],
)
def test_invalid_systems(d, N, digits):
    with pytest.raises(DigitSystemError):
        validate_system(d, N, digits)


def test_single_digit_allowed():
    assert validate_system(2, 3, [(0, 0)]).size == 1


def test_json_round_trip():
    s = carpet()
    assert DigitSystem.from_dict(json.loads(s.dumps())) == s
    with pytest.raises(DigitSystemError):
        DigitSystem.from_dict({"d": 2, "N": 3})


@pytest.mark.parametrize(
    "symbols, corner, side",
    [
        ([(0, 0)], (F(0), F(0)), F(1, 3)),
        ([(2, 2), (0, 1)], (F(6, 9), F(7, 9)), F(1, 9)),
        ([(1, 0), (1, 0)], (F(4, 9), F(0)), F(1, 9)),
    ],
)
def test_cylinder_cube_examples(symbols, corner, side):
    cube = cylinder_cube(word(carpet(), symbols))
    assert cube.corner == corner
    assert cube.side == side


def test_word_rejects_non_digits():
    with pytest.raises(DigitSystemError):
        word(carpet(), [(1, 1)])
    with pytest.raises(DigitSystemError):
        word(carpet(), [])


def test_nesting_and_grid():
    s = carpet()
    for w in iter_words(s, 2):
        cube = cylinder_cube(w)
        assert cube.inside_unit_cube()
        assert all((c * 9).denominator == 1 for c in cube.corner)
        for x in s.digits:
            assert cube.contains(cylinder_cube(w.extend([x])))


def test_level_partition_disjoint():
    s = carpet()
    corners = [cylinder_cube(w).numerators for w in iter_words(s, 3)]
    # distinct integer corners on the 27-grid with side 1 means disjoint interiors
    assert len(set(corners)) == len(corners) == 512


def test_sample_point_examples():
    s = carpet()
    rng = np.random.default_rng(1)
    assert sample_point(word(s, [(0, 0)]), 1, rng) == (F(0), F(0))
    x = sample_point(word(s, [(0, 0)]), 3, rng)
    assert all(0 <= c <= F(1, 3) and (c * 27).denominator == 1 for c in x)
    w = word(s, [(2, 2), (0, 1)])
    x = sample_point(w, 12, rng)
    lo = cylinder_cube(w).corner
    assert all(a <= b <= a + F(1, 9) for a, b in zip(lo, x))
    with pytest.raises(DigitSystemError):
        sample_point(w, 1, rng)
