import json
import math

import numpy as np
import pytest

from tubenull.certify import (
    CertifierConfig,
    DirectionCertificate,
    delta_star,
    direction_search,
    grid_oracle,
    objective,
    project_simplex,
)
from tubenull.digits import carpet, menger_sponge, validate_system
from tubenull.entropy import compositions, count_entropy, entropy_n
from tubenull.projection import Direction, primitive_directions

H_387 = entropy_n([3 / 8, 3 / 8, 2 / 8], 3)


def column_balanced(system):
    cols = np.array([i[0] for i in system.digits])
    sizes = np.bincount(cols, minlength=3)
    return np.array([1 / (3 * sizes[c]) for c in cols])


def test_objective_examples(carpet_system, V4):
    assert objective(carpet_system, np.full(8, 1 / 8), V4) == pytest.approx(H_387, abs=1e-15)
    assert round(H_387, 4) == 0.9851
    assert objective(carpet_system, np.eye(8)[3], V4) == 0.0
    p = column_balanced(carpet_system)
    assert objective(carpet_system, p, V4[:1]) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        objective(carpet_system, p, [])


def test_carpet_V4_certified(carpet_cert):
    # the optimum is the uniform digit distribution, where all four residue
    # distributions are permutations of (3/8, 3/8, 2/8)
    assert carpet_cert.certified
    assert carpet_cert.delta_star == pytest.approx(1 - H_387, abs=1e-9)
    assert carpet_cert.gap <= 1e-6
    assert np.allclose(carpet_cert.dual, 0.25, atol=1e-6)


def test_single_axis_not_certified(carpet_system, V4):
    cert = delta_star(carpet_system, V4[:1])
    assert not cert.certified
    assert cert.delta_star <= 1e-6
    cols = np.array([i[0] for i in carpet_system.digits])
    assert np.allclose(np.bincount(cols, weights=cert.witness), 1 / 3, atol=1e-4)


def test_single_digit_system():
    s = validate_system(2, 3, [(0, 0)])
    cert = delta_star(s, [Direction((1, 0))])
    assert cert.delta_star == 1.0 and cert.certified
    found = direction_search(s, 1)
    assert found.delta_star == 1.0 and len(found.directions) == 1


def test_witness_soundness(carpet_cert, carpet_system):
    g = objective(carpet_system, carpet_cert.witness, carpet_cert.directions)
    assert abs(g - (1 - carpet_cert.delta_star)) <= 1e-12
    assert sum(carpet_cert.witness) == pytest.approx(1.0, abs=1e-12)


def test_grid_oracle_examples(carpet_system, V4, carpet_cert):
    # denominator 8 cannot balance three columns; the best column type is (3, 3, 2)
    value, _ = grid_oracle(carpet_system, V4[:1], 8)
    assert value == pytest.approx(H_387, abs=1e-15)
    value, point = grid_oracle(carpet_system, V4[:1], 9)
    assert value == pytest.approx(1.0, abs=1e-14)
    assert grid_oracle(carpet_system, V4, 1)[0] == 0.0
    value, _ = grid_oracle(carpet_system, V4, 8)
    assert value <= 1 - carpet_cert.delta_star + carpet_cert.gap + 1e-9


def test_grid_oracle_subsample_deterministic():
    s = menger_sponge()
    V = primitive_directions(3, 1)
    a = grid_oracle(s, V, 8, limit=500, seed=3)
    b = grid_oracle(s, V, 8, limit=500, seed=3)
    assert a[0] == b[0] and np.array_equal(a[1], b[1])
    assert math.isclose(a[1].sum(), 1.0)


def test_dominance_over_grid(carpet_system, V4, carpet_cert):
    grid = compositions(8, 8) / 8
    for p in grid[::7]:
        assert objective(carpet_system, p, V4) <= 1 - carpet_cert.delta_star + carpet_cert.gap + 1e-9


def test_monotone_in_direction_set(carpet_system, V4):
    certs = [delta_star(carpet_system, V4[:k]) for k in range(1, 5)]
    for small, big in zip(certs, certs[1:]):
        assert big.delta_star >= small.delta_star - small.gap - big.gap - 1e-9


def test_gap_universal_over_types(carpet_system, carpet_cert):
    V = np.array([v.v for v in carpet_cert.directions])
    res = (carpet_system.array @ V.T) % 3
    for n in range(1, 7):
        T = compositions(n, 8)
        R = np.stack([np.stack([T[:, res[:, a] == r].sum(axis=1) for r in range(3)], axis=1) for a in range(len(V))], 1)
        worst = count_entropy(R, 3).min(axis=1).max()
        assert worst <= 1 - carpet_cert.delta_star + carpet_cert.gap


def test_direction_search_carpet(carpet_system, V4):
    cert = direction_search(carpet_system, 1)
    assert cert.certified
    assert set(cert.directions) <= set(V4)


def test_direction_search_sponge(sponge_cert):
    assert sponge_cert.certified
    assert set(sponge_cert.directions) <= set(primitive_directions(3, 1))
    assert sponge_cert.delta_star > 1e-6


def test_direction_search_rejects_radius():
    with pytest.raises(ValueError):
        direction_search(carpet(), 0)


def test_certificate_json_round_trip(carpet_cert):
    text = json.dumps(carpet_cert.to_dict())
    back = DirectionCertificate.from_dict(json.loads(text))
    assert back == carpet_cert
    bad = json.loads(text)
    bad["delta_star"] = 1.5
    with pytest.raises(ValueError):
        DirectionCertificate.from_dict(bad)


def test_project_simplex():
    y = np.array([0.5, 2.0, -1.0])
    p = project_simplex(y)
    assert p.sum() == pytest.approx(1.0) and (p >= 0).all()
    assert np.allclose(project_simplex(np.array([0.2, 0.3, 0.5])), [0.2, 0.3, 0.5])


def test_config_without_polish(carpet_system, V4):
    cert = delta_star(carpet_system, V4, CertifierConfig(polish=False, run_oracle=False))
    assert cert.oracle is None
    assert cert.delta_star == pytest.approx(1 - H_387, abs=1e-6)
