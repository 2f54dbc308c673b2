import itertools
import random

import pytest

from trasdim.metrics import Metric, dist_level, dist_sup, dist_tower, distance_matrix, metric_audit
from trasdim.spaces import LevelPoint, TowerPoint, embed_block, embed_level, explicit_window, gen_window, rpoint


def test_sup_examples():
    assert dist_sup(rpoint(0, 0), rpoint(3, -4)) == 4
    assert dist_sup(rpoint(1, 2), rpoint(1, 2)) == 0
    assert dist_sup(rpoint(5, 0, 0), rpoint(5, 0, 2)) == 2
    with pytest.raises(ValueError):
        dist_sup(rpoint(1), rpoint(1, 0))


def level_by_formula(k, x, y):
    # written out from the definition, independent of the module helpers
    if x.block > y.block:
        x, y = y, x
    m, n = x.block, y.block
    c = 0 if m == n else k * sum(range(m, n))
    padded = list(x.coords) + [0] * (n - m)
    return max(max(abs(a - b) for a, b in zip(padded, y.coords)), c)


def test_level_examples():
    x, y = LevelPoint(2, 1, (5,)), LevelPoint(2, 3, (5, 0, 2))
    assert level_by_formula(2, x, y) == 6
    assert dist_level(2, x, y) == 6
    a, b = LevelPoint(1, 2, (0, 8)), LevelPoint(1, 2, (5, 8))
    assert dist_level(1, a, b) == 5
    assert dist_level(1, a, a) == 0
    with pytest.raises(ValueError):
        dist_level(2, a, b)


def test_tower_examples():
    assert dist_tower(TowerPoint(1, 1, (0,)), TowerPoint(3, 1, (0,))) == 3
    assert dist_tower(TowerPoint(1, 2, (2, 0)), TowerPoint(2, 2, (4, 8))) == 8
    assert dist_tower(TowerPoint(1, 1, (2,)), TowerPoint(1, 2, (2, 0))) == 1


def tower_by_composition(x, y):
    if x.level > y.level:
        x, y = y, x
    m, n = x.level, y.level
    c = 0 if m == n else sum(range(m, n))
    inner = dist_level(n, embed_level(x.as_level_point(), n), y.as_level_point())
    return max(inner, c)


def test_tower_matches_composed_definition():
    w = gen_window("X2OMEGA", levels=(1, 3), blocks=(1, 2), R=8)
    for x, y in itertools.product(w.points, repeat=2):
        assert dist_tower(x, y) == tower_by_composition(x, y)


def test_level_matches_formula_exhaustive():
    w = gen_window("XOMEGAK", k=2, blocks=(1, 3), R=8)
    rng = random.Random(0)
    for _ in range(5000):
        x, y = rng.choice(w.points), rng.choice(w.points)
        assert dist_level(2, x, y) == level_by_formula(2, x, y)


def test_embed_block_isometry_exhaustive():
    w = gen_window("R", block=2, R=4)
    for x, y in itertools.product(w.points, repeat=2):
        for n in (2, 3, 4):
            assert dist_sup(embed_block(x, n), embed_block(y, n)) == dist_sup(x, y)


def test_embed_level_isometric_within_one_block():
    w = gen_window("XOMEGAK", k=1, blocks=(2, 2), R=8)
    for x, y in itertools.product(w.points, repeat=2):
        for n in range(1, 6):
            assert dist_level(n, embed_level(x, n), embed_level(y, n)) == dist_level(1, x, y)


def test_embed_level_changes_cross_block_distance():
    # the block offset is scaled by k, so raising k stretches it
    x, y = LevelPoint(1, 1, (0,)), LevelPoint(1, 2, (0, 0))
    assert dist_level(1, x, y) == 1
    assert dist_level(3, embed_level(x, 3), embed_level(y, 3)) == 3


def test_tower_triangle_counterexample():
    x, y, z = TowerPoint(3, 1, (0,)), TowerPoint(1, 1, (0,)), TowerPoint(1, 3, (0, 0, 0))
    assert (dist_tower(x, z), dist_tower(x, y), dist_tower(y, z)) == (9, 3, 3)


def test_cross_summand_floor():
    w = gen_window("XOMEGAK", k=2, blocks=(1, 3), R=8)
    for x, y in itertools.product(w.points, repeat=2):
        if x.block != y.block:
            m, n = sorted((x.block, y.block))
            assert dist_level(2, x, y) >= 2 * sum(range(m, n)) > 0
    t = gen_window("X2OMEGA", levels=(1, 3), blocks=(1, 2), R=8)
    for x, y in itertools.product(t.points, repeat=2):
        if x.level != y.level:
            m, n = sorted((x.level, y.level))
            assert dist_tower(x, y) >= sum(range(m, n)) > 0


def test_audit_examples():
    w = gen_window("R", block=2, R=16)
    rep = metric_audit(w, Metric.sup(), 10_000, 1)
    assert rep.ok and rep.checked == 10_000
    single = explicit_window([3])
    rep = metric_audit(single, None, 100, 0)
    assert rep.ok and rep.distinct_triples == 0


def test_audit_is_deterministic_and_reports_triples():
    w = gen_window("X2OMEGA", levels=(1, 3), blocks=(1, 3), R=16)
    a = metric_audit(w, None, 20_000, 42)
    b = metric_audit(w, None, 20_000, 42)
    assert a.to_json(w) == b.to_json(w)
    for v in a.violations:
        x, y, z = v.points
        assert dist_tower(x, z) > dist_tower(x, y) + dist_tower(y, z)


def test_level_audit_clean():
    for k in (1, 2):
        w = gen_window("XOMEGAK", k=k, blocks=(1, 3), R=8)
        assert metric_audit(w, None, 20_000, 3).ok


def test_metric_handle():
    assert Metric.parse("level(3)") == Metric.level(3)
    assert str(Metric.level(3)) == "LEVEL(3)"
    assert Metric.parse("tower")(TowerPoint(1, 1, (0,)), TowerPoint(1, 1, (2,))) == 2
    with pytest.raises(TypeError):
        Metric.sup()(LevelPoint(1, 1, (0,)), LevelPoint(1, 1, (0,)))
    with pytest.raises(ValueError):
        Metric.parse("euclid")


def test_distance_matrix_symmetric():
    w = gen_window("X2OMEGA", levels=(1, 2), blocks=(1, 2), R=4)
    D = distance_matrix(w.points, Metric.tower())
    n = len(w)
    assert all(D[i][j] == D[j][i] for i in range(n) for j in range(n))
    assert all(D[i][i] == 0 for i in range(n))
