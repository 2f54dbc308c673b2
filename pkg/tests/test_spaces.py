import itertools

import pytest

from trasdim.metrics import Metric
from trasdim.spaces import (
    LevelPoint,
    RPoint,
    TowerPoint,
    Window,
    embed_block,
    embed_level,
    estimate_points,
    gen_window,
    interval_window,
    member_tower,
    member_xki,
    neighborhood,
    rpoint,
    thickening_check,
)


def bad(coords, block):
    return sum(1 for c in coords if c % 2**block != 0)


def test_member_xki_examples():
    assert member_xki(1, 2, rpoint(0, 3))
    assert not member_xki(1, 2, rpoint(3, 3))
    assert member_xki(0, 2, rpoint(0, 4))
    with pytest.raises(ValueError):
        member_xki(1, 3, rpoint(0, 1))


def test_member_tower_examples():
    assert member_tower(1, 2, (2, 0))
    assert member_tower(2, 2, (4, 8))
    assert not member_tower(1, 2, (1, 0))
    with pytest.raises(ValueError):
        member_tower(1, 2, (2,))


def test_gen_window_examples():
    assert [p.coords for p in gen_window("R", block=1, R=4).points] == [(0,), (1,), (2,), (3,), (4,)]
    w = gen_window("XKI", k=1, i=2, R=4)
    brute = [(a, b) for a in range(5) for b in range(5) if bad((a, b), 2) <= 1]
    assert len(brute) == 16
    assert [p.coords for p in w.points] == brute
    y = gen_window("YOMEGAK", k=1, blocks=(1, 1), R=4)
    assert [p.coords for p in y.points] == [(0,), (2,), (4,)]


def brute_force(kind, params):
    R = params["R"]
    out = []
    if kind == "R":
        b = params["block"]
        out = [RPoint(b, c) for c in itertools.product(range(R + 1), repeat=b)]
    elif kind == "XKI":
        i, k = params["i"], params["k"]
        out = [RPoint(i, c) for c in itertools.product(range(R + 1), repeat=i) if bad(c, i) <= k]
    elif kind in ("XOMEGAK", "YOMEGAK"):
        k = params["k"]
        step = 1 if kind == "XOMEGAK" else 2**k
        for b in range(params["blocks"][0], params["blocks"][1] + 1):
            for c in itertools.product(range(R + 1), repeat=b):
                if bad(c, b) <= k and all(v % step == 0 for v in c):
                    out.append(LevelPoint(k, b, c))
    else:
        for lev in range(params["levels"][0], params["levels"][1] + 1):
            for b in range(params["blocks"][0], params["blocks"][1] + 1):
                for c in itertools.product(range(R + 1), repeat=b):
                    if bad(c, b) <= lev and all(v % 2**lev == 0 for v in c):
                        out.append(TowerPoint(lev, b, c))
    return sorted(out)


CONFIGS = (
    [("R", dict(block=b, R=R)) for b in (1, 2, 3) for R in (0, 3, 8)]
    + [("XKI", dict(k=k, i=i, R=R)) for k in (0, 1, 2) for i in (1, 2, 3) for R in (8, 16) if R % 2**i == 0]
    + [("XOMEGAK", dict(k=k, blocks=(1, 3), R=R)) for k in (1, 2) for R in (8, 16)]
    + [("YOMEGAK", dict(k=k, blocks=(1, 3), R=R)) for k in (1, 2, 3) for R in (8, 16)]
    + [("X2OMEGA", dict(levels=(1, 3), blocks=(1, 3), R=R)) for R in (8, 16)]
)


@pytest.mark.parametrize("kind,kw", CONFIGS)
def test_generator_sound_and_complete(kind, kw):
    w = gen_window(kind, **kw)
    assert list(w.points) == brute_force(kind, w.params)
    assert estimate_points(kind, w.params) == len(w)
    for p in w.points:
        if kind == "XKI":
            assert member_xki(w.params["k"], w.params["i"], p)
        if isinstance(p, TowerPoint):
            assert member_tower(p.level, p.block, p.coords)


def test_monotone_inclusion():
    for i in (1, 2, 3):
        for m in range(0, 3):
            for n in range(m, 4):
                small = {p.coords for p in gen_window("XKI", k=m, i=i, R=8).points}
                big = {p.coords for p in gen_window("XKI", k=n, i=i, R=8).points}
                assert small <= big


def test_window_errors():
    with pytest.raises(ValueError, match="multiple of 2\\^2"):
        gen_window("XKI", k=1, i=2, R=6)
    with pytest.raises(ValueError, match="ceiling"):
        gen_window("R", block=3, R=20, ceiling=1000)
    with pytest.raises(ValueError):
        gen_window("X2OMEGA", levels=(2, 1), blocks=(1, 1), R=8)
    with pytest.raises(ValueError):
        LevelPoint(1, 2, (1, 1))


def test_neighborhood_examples():
    w = interval_window(0, 6)
    A = [rpoint(0), rpoint(5)]
    assert [p.coords[0] for p in neighborhood(w, A, 1)] == [0, 1, 4, 5, 6]
    assert neighborhood(w, A, 0) == A
    x = gen_window("XOMEGAK", k=1, blocks=(1, 1), R=8)
    ys = [p for p in x.points if p.coords[0] % 2 == 0]
    assert len(ys) == 5
    assert neighborhood(x, ys, 1) == list(x.points)
    with pytest.raises(ValueError):
        neighborhood(w, [], 1)


def test_sup_fast_path_matches_generic():
    w = gen_window("R", block=2, R=40)
    A = [p for p in w.points if p.coords[0] % 9 == 0 and p.coords[1] % 7 == 0]
    fast = neighborhood(w, A, 3)
    slow = [x for x in w.points if min(Metric.sup()(x, a) for a in A) <= 3]
    assert fast == slow


def test_embed_examples():
    assert embed_block(rpoint(5), 3) == rpoint(5, 0, 0)
    x = rpoint(2, 0)
    assert embed_block(x, 2) == x
    assert embed_block(x, 4) == rpoint(2, 0, 0, 0)
    assert embed_block(LevelPoint(1, 1, (3,)), 2) == LevelPoint(1, 2, (3, 0))
    with pytest.raises(ValueError):
        embed_block(x, 1)
    assert embed_level(LevelPoint(1, 2, (2, 0)), 3) == LevelPoint(3, 2, (2, 0))
    p = LevelPoint(2, 1, (5,))
    assert embed_level(p, 2) == p
    assert embed_level(p, 5) == LevelPoint(5, 1, (5,))
    with pytest.raises(ValueError):
        embed_level(p, 1)


def test_thickening_identity_small():
    for k in (1, 2, 3):
        for block in (1, 2, 3):
            assert thickening_check(k, block, 2 ** max(k, block)) == []


@pytest.mark.parametrize("suffix", [".json", ".jsonl"])
@pytest.mark.parametrize("kind,kw", [c for c in CONFIGS if c[1].get("R") == 8])
def test_round_trip(tmp_path, suffix, kind, kw):
    w = gen_window(kind, **kw)
    path = tmp_path / ("w" + suffix)
    w.dump(path, extra={"manifest": {"seed": 0}})
    assert Window.load(path) == w


def test_subwindow():
    w = interval_window(0, 9)
    sub = w.subwindow([rpoint(4), rpoint(1)])
    assert [p.coords for p in sub.points] == [(1,), (4,)]
    with pytest.raises(ValueError):
        w.subwindow([rpoint(11)])
