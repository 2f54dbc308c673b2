"""Integer point models and finite windows of the lattice spaces.

Window kinds:

* ``R``        -- the integer box ``[0, R]^block`` of R^block
* ``XKI``      -- points of ``X_k^(i)``: at most ``k`` coordinates off ``2^i Z``
* ``XOMEGAK``  -- disjoint union of ``X_k^(b)`` over a block range
* ``YOMEGAK``  -- the same with every coordinate on the ``2^k`` grid
* ``X2OMEGA``  -- disjoint union over levels of the ``YOMEGAK`` windows

All coordinates are integers, so every distance is an exact integer.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

POINT_CEILING = 5_000_000
KINDS = ("R", "XKI", "XOMEGAK", "YOMEGAK", "X2OMEGA")


@dataclass(frozen=True, order=True, slots=True)
class RPoint:
    block: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.block:
            raise ValueError(f"RPoint block {self.block} with {len(self.coords)} coords")


@dataclass(frozen=True, order=True, slots=True)
class LevelPoint:
    k: int
    block: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.block:
            raise ValueError(f"LevelPoint block {self.block} with {len(self.coords)} coords")
        if _bad_count(self.coords, self.block) > self.k:
            raise ValueError(f"{self.coords} has more than {self.k} coordinates off 2^{self.block}Z")


@dataclass(frozen=True, order=True, slots=True)
class TowerPoint:
    level: int
    block: int
    coords: tuple

    def __post_init__(self):
        if not member_tower(self.level, self.block, self.coords):
            raise ValueError(f"{self.coords} is not in Y_{self.level}^({self.block})")

    def as_level_point(self) -> LevelPoint:
        return LevelPoint(self.level, self.block, self.coords)


def rpoint(*coords) -> RPoint:
    return RPoint(len(coords), tuple(coords))


def _bad_count(coords: Sequence[int], block: int) -> int:
    mod = 1 << block
    return sum(1 for c in coords if c % mod)


def member_xki(k: int, i: int, x: RPoint) -> bool:
    if x.block != i:
        raise ValueError(f"point of block {x.block} tested against X_{k}^({i})")
    return _bad_count(x.coords, i) <= k


def member_tower(level: int, block: int, coords: Sequence[int]) -> bool:
    if len(coords) != block:
        raise ValueError(f"{len(coords)} coordinates for block {block}")
    step = 1 << level
    if any(c % step for c in coords):
        return False
    return _bad_count(coords, block) <= level


def embed_block(x, target_block: int):
    """Zero-pad ``x`` into a larger block; other fields are kept."""
    if target_block < x.block:
        raise ValueError(f"cannot embed block {x.block} into smaller block {target_block}")
    coords = tuple(x.coords) + (0,) * (target_block - x.block)
    if isinstance(x, RPoint):
        return RPoint(target_block, coords)
    if isinstance(x, LevelPoint):
        return LevelPoint(x.k, target_block, coords)
    if isinstance(x, TowerPoint):
        return TowerPoint(x.level, target_block, coords)
    raise TypeError(type(x).__name__)


def embed_level(x: LevelPoint, target_k: int) -> LevelPoint:
    if target_k < x.k:
        raise ValueError(f"cannot embed X_(w+{x.k}) into X_(w+{target_k})")
    return LevelPoint(target_k, x.block, x.coords)


@dataclass(frozen=True)
class Window:
    kind: str
    params: dict
    points: tuple
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown window kind {self.kind!r}")
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})
        if len(self._index) != len(self.points):
            raise ValueError("window points must be distinct")

    def __len__(self):
        return len(self.points)

    def index_of(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise ValueError(f"point {p} is not in the window") from None

    def __contains__(self, p):
        return p in self._index

    def subwindow(self, points: Iterable) -> "Window":
        pts = sorted(set(points))
        for p in pts:
            self.index_of(p)
        params = dict(self.params, explicit=True)
        return Window(self.kind, params, tuple(pts))

    def default_metric(self):
        from .metrics import Metric

        if self.kind in ("R", "XKI"):
            return Metric.sup()
        if self.kind in ("XOMEGAK", "YOMEGAK"):
            return Metric.level(self.params["k"])
        return Metric.tower()

    def point_at_level(self, level: int) -> list:
        return [p for p in self.points if getattr(p, "level", None) == level]

    # serialization

    def encode_point(self, p) -> list:
        if isinstance(p, RPoint):
            return list(p.coords)
        if isinstance(p, LevelPoint):
            return [p.block, *p.coords]
        return [p.level, p.block, *p.coords]

    def decode_point(self, row: Sequence[int]):
        row = [int(v) for v in row]
        if self.kind in ("R", "XKI"):
            return RPoint(len(row), tuple(row))
        if self.kind in ("XOMEGAK", "YOMEGAK"):
            return LevelPoint(self.params["k"], row[0], tuple(row[1:]))
        return TowerPoint(row[0], row[1], tuple(row[2:]))

    def header(self) -> dict:
        return {"kind": self.kind, "params": self.params}

    def to_json(self) -> dict:
        return {**self.header(), "points": [self.encode_point(p) for p in self.points]}

    @classmethod
    def from_json(cls, obj: dict) -> "Window":
        shell = cls(obj["kind"], dict(obj["params"]), ())
        pts = tuple(shell.decode_point(r) for r in obj["points"])
        w = cls(obj["kind"], dict(obj["params"]), pts)
        check_window(w)
        return w

    def dump(self, path, extra: dict | None = None):
        path = str(path)
        with open(path, "w") as fh:
            if path.endswith(".jsonl"):
                fh.write(json.dumps({**self.header(), **(extra or {})}, sort_keys=True) + "\n")
                for p in self.points:
                    fh.write(json.dumps(self.encode_point(p)) + "\n")
            else:
                json.dump({**self.to_json(), **(extra or {})}, fh, sort_keys=True)
                fh.write("\n")

    @classmethod
    def load(cls, path) -> "Window":
        path = str(path)
        with open(path) as fh:
            if path.endswith(".jsonl"):
                lines = [ln for ln in fh if ln.strip()]
                head = json.loads(lines[0])
                return cls.from_json({**head, "points": [json.loads(ln) for ln in lines[1:]]})
            return cls.from_json(json.load(fh))


def explicit_window(points: Iterable) -> Window:
    """Window over an arbitrary finite point set (integers become 1-d points)."""
    pts = []
    for p in points:
        if isinstance(p, int):
            p = RPoint(1, (p,))
        elif isinstance(p, tuple):
            p = RPoint(len(p), p)
        pts.append(p)
    pts = sorted(set(pts))
    if not pts:
        raise ValueError("explicit window needs at least one point")
    t = type(pts[0])
    if any(type(p) is not t for p in pts):
        raise ValueError("explicit window points must share one type")
    if t is RPoint:
        blocks = {p.block for p in pts}
        if len(blocks) != 1:
            raise ValueError("R windows have a single block")
        return Window("R", {"block": blocks.pop(), "explicit": True}, tuple(pts))
    if t is LevelPoint:
        ks = {p.k for p in pts}
        if len(ks) != 1:
            raise ValueError("level points of one window share k")
        return Window("XOMEGAK", {"k": ks.pop(), "explicit": True}, tuple(pts))
    return Window("X2OMEGA", {"explicit": True}, tuple(pts))


def interval_window(lo: int, hi: int) -> Window:
    return explicit_window(range(lo, hi + 1))


# generation


def _range(spec, name):
    if isinstance(spec, int):
        return spec, spec
    lo, hi = spec
    if lo < 1 or hi < lo:
        raise ValueError(f"bad {name} range {spec}")
    return int(lo), int(hi)


def _box_rows(block, values, max_bad, mod):
    """Rows of ``values^block`` with at most ``max_bad`` entries off ``mod*Z``, lexicographic."""
    good = [v for v in values if v % mod == 0]
    if max_bad >= block:
        yield from itertools.product(values, repeat=block)
        return
    if max_bad == 0:
        yield from itertools.product(good, repeat=block)
        return
    for row in itertools.product(values, repeat=block):
        if sum(1 for c in row if c % mod) <= max_bad:
            yield row


def _count_rows(block, n_values, n_good, max_bad):
    from math import comb

    n_bad = n_values - n_good
    return sum(comb(block, j) * n_bad**j * n_good ** (block - j) for j in range(min(block, max_bad) + 1))


def normalize_params(kind: str, **kw) -> dict:
    kind = kind.upper()
    R = int(kw["R"])
    if kind == "R":
        return {"block": int(kw["block"]), "R": R}
    if kind == "XKI":
        return {"k": int(kw["k"]), "i": int(kw["i"]), "R": R}
    if kind in ("XOMEGAK", "YOMEGAK"):
        lo, hi = _range(kw["blocks"], "block")
        return {"k": int(kw["k"]), "blocks": [lo, hi], "R": R}
    if kind == "X2OMEGA":
        llo, lhi = _range(kw["levels"], "level")
        blo, bhi = _range(kw["blocks"], "block")
        return {"levels": [llo, lhi], "blocks": [blo, bhi], "R": R}
    raise ValueError(f"unknown window kind {kind!r}")


def _max_index(kind, params):
    if kind == "R":
        return params["block"]
    if kind == "XKI":
        return params["i"]
    if kind == "XOMEGAK":
        return params["blocks"][1]
    if kind == "YOMEGAK":
        return max(params["blocks"][1], params["k"])
    return max(params["blocks"][1], params["levels"][1])


def estimate_points(kind: str, params: dict) -> int:
    R = params["R"]
    if kind == "R":
        return (R + 1) ** params["block"]
    if kind == "XKI":
        i = params["i"]
        return _count_rows(i, R + 1, R // (1 << i) + 1, params["k"])
    if kind in ("XOMEGAK", "YOMEGAK"):
        lo, hi = params["blocks"]
        step = 1 if kind == "XOMEGAK" else 1 << params["k"]
        n_values = R // step + 1
        return sum(_count_rows(b, n_values, R // max(step, 1 << b) + 1, params["k"]) for b in range(lo, hi + 1))
    llo, lhi = params["levels"]
    lo, hi = params["blocks"]
    total = 0
    for lev in range(llo, lhi + 1):
        n_values = R // (1 << lev) + 1
        for b in range(lo, hi + 1):
            total += _count_rows(b, n_values, R // (1 << max(lev, b)) + 1, lev)
    return total


def gen_window(kind: str, ceiling: int = POINT_CEILING, **kw) -> Window:
    """Enumerate every integer point of the requested space inside ``[0, R]^block``.

    ``R`` must be a nonnegative multiple of ``2^m`` where ``m`` is the largest
    block or level index in range (not enforced for plain ``R`` boxes).
    """
    kind = kind.upper()
    params = normalize_params(kind, **kw)
    R = params["R"]
    if R < 0:
        raise ValueError("box radius must be nonnegative")
    if kind != "R":
        m = _max_index(kind, params)
        if R % (1 << m):
            raise ValueError(f"box radius {R} is not a multiple of 2^{m}")
    est = estimate_points(kind, params)
    if est > ceiling:
        raise ValueError(f"window would hold {est} points, above the ceiling {ceiling}")
    return Window(kind, params, tuple(_enumerate(kind, params)))


def _enumerate(kind, params):
    R = params["R"]
    if kind == "R":
        b = params["block"]
        for row in itertools.product(range(R + 1), repeat=b):
            yield RPoint(b, row)
    elif kind == "XKI":
        i = params["i"]
        for row in _box_rows(i, range(R + 1), params["k"], 1 << i):
            yield RPoint(i, row)
    elif kind in ("XOMEGAK", "YOMEGAK"):
        k = params["k"]
        lo, hi = params["blocks"]
        step = 1 if kind == "XOMEGAK" else 1 << k
        for b in range(lo, hi + 1):
            for row in _box_rows(b, range(0, R + 1, step), k, 1 << b):
                yield LevelPoint(k, b, row)
    else:
        llo, lhi = params["levels"]
        lo, hi = params["blocks"]
        for lev in range(llo, lhi + 1):
            for b in range(lo, hi + 1):
                for row in _box_rows(b, range(0, R + 1, 1 << lev), lev, 1 << b):
                    yield TowerPoint(lev, b, row)


def check_window(w: Window):
    """Raise ``ValueError`` unless every point has the type the kind requires."""
    expect = {"R": RPoint, "XKI": RPoint, "XOMEGAK": LevelPoint, "YOMEGAK": LevelPoint, "X2OMEGA": TowerPoint}
    t = expect[w.kind]
    for p in w.points:
        if type(p) is not t:
            raise ValueError(f"{w.kind} window holds a {type(p).__name__}")
    if w.kind == "XKI":
        k, i = w.params["k"], w.params["i"]
        if not all(member_xki(k, i, p) for p in w.points):
            raise ValueError("XKI window holds a non-member point")
    if list(w.points) != sorted(w.points):
        raise ValueError("window points are not in canonical order")


def neighborhood(W: Window, A: Iterable, R: int, metric=None) -> list:
    """Closed ``R``-neighborhood of ``A`` inside ``W``, in window order."""
    A = list(A)
    if not A:
        raise ValueError("neighborhood of the empty set is undefined")
    for a in A:
        W.index_of(a)
    if metric is None:
        metric = W.default_metric()
    if metric.kind == "SUP" and len(A) * len(W) > 4096:
        return _sup_neighborhood(W.points, A, R)
    out = []
    for x in W.points:
        for a in A:
            if metric(x, a) <= R:
                out.append(x)
                break
    return out


def _sup_neighborhood(points, A, R, chunk=2048):
    blocks = {p.block for p in points} | {a.block for a in A}
    if len(blocks) != 1:
        raise ValueError("sup metric needs points of one block")
    X = np.array([p.coords for p in points], dtype=np.int64)
    Y = np.array([a.coords for a in A], dtype=np.int64)
    keep = np.zeros(len(X), dtype=bool)
    for s in range(0, len(X), chunk):
        d = np.abs(X[s : s + chunk, None, :] - Y[None, :, :]).max(axis=2)
        keep[s : s + chunk] = (d <= R).any(axis=1)
    return [p for p, k in zip(points, keep) if k]


def thickening_check(k: int, block: int, R: int) -> list:
    """Points of the ``X_k^(block)`` box farther than ``2^k`` from the ``Y`` grid points.

    An empty list means the box satisfies the thickening identity.
    """
    xs = [RPoint(block, row) for row in _box_rows(block, range(R + 1), k, 1 << block)]
    ys = [RPoint(block, row) for row in _box_rows(block, range(0, R + 1, 1 << k), k, 1 << block)]
    W = Window("XKI", {"k": k, "i": block, "R": R}, tuple(xs))
    near = set(neighborhood(W, ys, 1 << k))
    return [x for x in xs if x not in near]
