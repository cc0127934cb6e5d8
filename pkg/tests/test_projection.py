import itertools
from fractions import Fraction as F

import pytest

from tubenull.digits import carpet, cylinder_cube, iter_words, menger_sponge, word
from tubenull.projection import (
    Direction,
    DirectionError,
    ProjectedAlphabet,
    canonicalize,
    primitive_directions,
    project_digit,
    projected_position,
    representative_value,
    residue_of_digit,
)


def test_direction_canonical_sign():
    assert Direction((-1, 1)) == Direction((1, -1))
    assert Direction((0, -2, 1)).v == (0, 2, -1)


@pytest.mark.parametrize("v", [(0, 0), (2, 2), (2, 0), (1.0, 0), ()])
def test_direction_rejects(v):
    with pytest.raises(DirectionError):
        Direction(v)


def test_direction_offsets():
    v = Direction((1, -1))
    assert (v.low, v.high, v.l1) == (-1, 1, 2)
    assert Direction.from_key(v.key) == v


@pytest.mark.parametrize("i, v, out", [((0, 0), (1, 1), 0), ((2, 1), (1, 1), 3), ((0, 2), (1, -1), -2)])
def test_project_digit(i, v, out):
    assert project_digit(i, Direction(v)) == out


@pytest.mark.parametrize("i, v, out", [((0, 2), (1, -1), 1), ((1, 1), (1, 0), 1), ((2, 2), (1, 1), 1)])
def test_residue_of_digit(i, v, out):
    assert residue_of_digit(i, Direction(v), 3) == out


def test_projected_position_examples():
    s = carpet()
    assert projected_position(word(s, [(2, 2), (0, 1)]), Direction((1, 1))) == 13
    assert projected_position(word(s, [(0, 2), (2, 0)]), Direction((1, -1))) == -4
    assert projected_position(word(s, [(0, 0)] * 5), Direction((1, 1))) == 0


def test_recurrence_and_corner_consistency():
    s = carpet()
    for v in map(Direction, [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1)]):
        for n in range(1, 4):
            for w in iter_words(s, n):
                Q = projected_position(w, v)
                corner = cylinder_cube(w).corner
                assert F(Q, 3**n) == sum(c * a for c, a in zip(corner, v.v))
                for x in s.digits[:2]:
                    assert projected_position(w.extend([x]), v) == 3 * Q + project_digit(x, v)


def test_alphabet_value_bounds():
    for system in (carpet(), menger_sponge()):
        for v in primitive_directions(system.d, 1):
            a = ProjectedAlphabet(system, v)
            for x in a.values:
                assert v.low * (system.N - 1) <= x <= v.high * (system.N - 1)


def test_alphabet_fibers():
    a = ProjectedAlphabet(carpet(), Direction((1, 1)))
    # values 0,1,3,4 twice each and 2 twice; residues 0:{0,3} 1:{1,4} 2:{2}
    assert a.fibers == (2, 2, 1)
    assert (a.L1, a.L, a.multiplicity, a.residue_alphabet) == (4, 12, 2, 3)
    assert ProjectedAlphabet(carpet(), Direction((1, 0))).multiplicity == 1


def test_canonicalize_examples():
    s = carpet()
    diag = ProjectedAlphabet(s, Direction((1, 1)))
    assert canonicalize(0, 3, diag) == (0, 0, 0)
    # least-significant absorber: absorbing symbol 7 with ordinary symbol 2
    assert canonicalize(13, 2, diag, absorber="trailing") == (2, 7)
    assert representative_value((2, 7), 3) == 13
    axis = ProjectedAlphabet(s, Direction((1, 0)))
    for q in range(0, 27):
        digits = canonicalize(q, 3, axis)
        assert all(0 <= a < 3 for a in digits)
        assert representative_value(digits, 3) == q


def test_canonicalize_range_errors():
    diag = ProjectedAlphabet(carpet(), Direction((1, 1)))
    with pytest.raises(DirectionError):
        canonicalize(4 * 4 + 1, 2, diag)
    with pytest.raises(DirectionError):
        canonicalize(0, 0, diag)
    with pytest.raises(ValueError):
        canonicalize(1, 2, diag, absorber="middle")


def test_canonicalize_leading_bound_all_levels():
    s = carpet()
    for v in map(Direction, [(1, 1), (1, -1), (1, 0)]):
        a = ProjectedAlphabet(s, v)
        for n in range(1, 6):
            lo, hi = a.attainable(n)
            for q in range(lo, hi + 1, max(1, (hi - lo) // 200)):
                rep = canonicalize(q, n, a)
                assert representative_value(rep, 3) == q
                assert abs(rep[0]) <= a.L
                assert all(0 <= x < 3 for x in rep[1:])


def test_primitive_directions_order():
    assert [v.v for v in primitive_directions(2, 1)] == [(1, 0), (0, 1), (1, 1), (1, -1)]
    three = primitive_directions(3, 1)
    assert len(three) == 13
    assert len({v.v for v in primitive_directions(2, 2)}) == len(primitive_directions(2, 2))
    assert all(max(map(abs, v.v)) <= 2 for v in primitive_directions(2, 2))
    assert sorted(v.l1 for v in three) == [v.l1 for v in three]
    assert {Direction(c).v for c in itertools.product((-1, 0, 1), repeat=3) if any(c)} == {v.v for v in three}
