import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from tubenull.digits import carpet, iter_words, word
from tubenull.entropy import (
    EmpiricalType,
    TypeEnumerationError,
    compositions,
    count_entropy,
    empirical_type,
    entropy_n,
    enumerate_types,
    multinomial,
    residue_distribution,
    type_class_bounds,
    type_class_size,
    type_count,
)
from tubenull.projection import Direction


def _mp_entropy(q, N):
    mpmath.mp.dps = 40
    q = [mpmath.mpf(x.numerator) / x.denominator for x in q]
    return -sum(x * mpmath.log(x) for x in q if x) / mpmath.log(N)


def test_entropy_examples():
    assert entropy_n([1 / 3] * 3, 3) == pytest.approx(1.0, abs=1e-15)
    assert entropy_n([1, 0, 0], 3) == 0.0
    ref = _mp_entropy([F(3, 8), F(2, 8), F(3, 8)], 3)
    assert entropy_n([3 / 8, 2 / 8, 3 / 8], 3) == pytest.approx(float(ref), abs=1e-15)
    assert round(float(ref), 4) == 0.9851


def test_count_entropy_matches_float_formula():
    rng = np.random.default_rng(0)
    counts = rng.integers(0, 9, size=(200, 5))
    counts[:, 0] += 1
    got = count_entropy(counts, 5)
    for row, h in zip(counts, got):
        assert h == pytest.approx(entropy_n(row / row.sum(), 5), abs=1e-13)


def test_residue_distribution_examples():
    s = carpet()
    p = np.full(8, 1 / 8)
    assert np.allclose(residue_distribution(s, p, Direction((1, 0))), [3 / 8, 2 / 8, 3 / 8])
    assert np.allclose(residue_distribution(s, p, Direction((1, 1))), [3 / 8, 3 / 8, 2 / 8])
    k = s.index[(2, 1)]
    point = np.eye(8)[k]
    assert np.array_equal(residue_distribution(s, point, Direction((1, -1))), np.eye(3)[1])
    with pytest.raises(ValueError):
        residue_distribution(s, np.ones(3), Direction((1, 0)))


def test_empirical_type_examples():
    s = carpet()
    assert empirical_type(word(s, [(0, 0), (0, 0)])).as_dict() == {(0, 0): 2}
    assert empirical_type(word(s, [(2, 2), (0, 1)]), Direction((1, 1))).as_dict() == {1: 2}
    assert empirical_type(word(s, [(1, 0), (0, 1), (2, 2)]), Direction((1, 0))).as_dict() == {0: 1, 1: 1, 2: 1}


def test_word_type_consistency():
    s = carpet()
    for v in map(Direction, [(1, 0), (1, 1), (1, -1)]):
        for w in iter_words(s, 3):
            pushed = {}
            for sym, c in empirical_type(w).counts:
                r = sum(a * b for a, b in zip(sym, v.v)) % 3
                pushed[r] = pushed.get(r, 0) + c
            assert empirical_type(w, v).as_dict() == pushed


def test_enumerate_types_examples():
    assert len(enumerate_types(2, 3)) == 6 <= 3**3
    assert len(enumerate_types(1, 1)) == 1
    assert type_count(20, 8) == 888030
    with pytest.raises(TypeEnumerationError):
        compositions(30, 10, cap=1000)


def test_compositions_complete_and_distinct():
    T = compositions(5, 4)
    assert len(T) == type_count(5, 4)
    assert (T.sum(axis=1) == 5).all() and (T >= 0).all()
    assert len({tuple(r) for r in T.tolist()}) == len(T)


def test_type_class_size_examples():
    assert type_class_size(EmpiricalType.from_mapping({0: 1, 1: 1})) == 2
    assert multinomial([7, 0, 0]) == 1
    # counts (1,1,0): N^(nH) = 3^(2 log3 2) = 4, so 4/27 <= 2 <= 4
    lo, hi = type_class_bounds([1, 1, 0], 3)
    assert math.exp(lo) == pytest.approx(4 / 27)
    assert math.exp(hi) == pytest.approx(4)
    assert math.exp(lo) <= 2 <= math.exp(hi)


@pytest.mark.parametrize("m", [3, 8])
def test_completeness_and_bounds(m):
    for n in range(1, 11):
        T = compositions(n, m)
        assert sum(multinomial(t) for t in T.tolist()) == m**n
        assert len(T) <= (n + 1) ** m
        for t in T.tolist():
            lo, hi = type_class_bounds(t, 3)
            size = math.log(multinomial(t))
            assert lo - 1e-9 <= size <= hi + 1e-9
