"""Exact integer metrics on the lattice spaces and an axiom auditor."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .spaces import LevelPoint, RPoint, TowerPoint, Window


def _offset(m: int, n: int) -> int:
    """``m + (m+1) + ... + (n-1)`` for ``m <= n`` (0 when equal)."""
    return (n * (n - 1) - m * (m - 1)) // 2


def _padded_sup(a: tuple, b: tuple) -> int:
    if len(a) > len(b):
        a, b = b, a
    d = 0
    for i, v in enumerate(b):
        t = abs((a[i] if i < len(a) else 0) - v)
        if t > d:
            d = t
    return d


def dist_sup(x: RPoint, y: RPoint) -> int:
    if x.block != y.block:
        raise ValueError(f"sup distance between blocks {x.block} and {y.block}; embed first")
    return max((abs(a - b) for a, b in zip(x.coords, y.coords)), default=0)


def dist_level(k: int, x: LevelPoint, y: LevelPoint) -> int:
    """``max(d_sup(padded x, y), k * (m + ... + (n-1)))`` for blocks ``m <= n``."""
    if x.k != k or y.k != k:
        raise ValueError(f"dist_level({k}) applied to points of X_(w+{x.k}) and X_(w+{y.k})")
    return _level(k, x.block, x.coords, y.block, y.coords)


def _level(k, bx, cx, by, cy):
    if bx > by:
        bx, cx, by, cy = by, cy, bx, cx
    d = _padded_sup(cx, cy)
    if bx != by:
        c = k * _offset(bx, by)
        if c > d:
            d = c
    return d


def dist_tower(x: TowerPoint, y: TowerPoint) -> int:
    """Distance on the union of the ``Y`` levels.

    The two levels ``m <= n`` play the role of the summand indices: the inner
    distance is ``d_n`` after lifting the lower-level point into level ``n``,
    and it is floored at ``m + ... + (n-1)``.
    """
    if x.level > y.level:
        x, y = y, x
    d = _level(y.level, x.block, x.coords, y.block, y.coords)
    if x.level != y.level:
        c = _offset(x.level, y.level)
        if c > d:
            d = c
    return d


@dataclass(frozen=True)
class Metric:
    kind: str
    k: int | None = None

    @classmethod
    def sup(cls) -> "Metric":
        return cls("SUP")

    @classmethod
    def level(cls, k: int) -> "Metric":
        return cls("LEVEL", int(k))

    @classmethod
    def tower(cls) -> "Metric":
        return cls("TOWER")

    def __call__(self, x, y) -> int:
        if self.kind == "SUP":
            if not isinstance(x, RPoint):
                raise TypeError("sup metric applies to RPoint")
            return dist_sup(x, y)
        if self.kind == "LEVEL":
            if not isinstance(x, LevelPoint):
                raise TypeError("level metric applies to LevelPoint")
            return dist_level(self.k, x, y)
        if self.kind == "TOWER":
            if not isinstance(x, TowerPoint):
                raise TypeError("tower metric applies to TowerPoint")
            return dist_tower(x, y)
        raise ValueError(f"unknown metric kind {self.kind}")

    def __str__(self):
        return f"LEVEL({self.k})" if self.kind == "LEVEL" else self.kind

    @classmethod
    def parse(cls, text: str) -> "Metric":
        t = text.strip().upper()
        if t == "SUP":
            return cls.sup()
        if t == "TOWER":
            return cls.tower()
        if t.startswith("LEVEL(") and t.endswith(")"):
            return cls.level(int(t[6:-1]))
        raise ValueError(f"unknown metric {text!r}")


def distance_matrix(points, metric: Metric) -> list[list[int]]:
    n = len(points)
    D = [[0] * n for _ in range(n)]
    for i in range(n):
        pi = points[i]
        row = D[i]
        for j in range(i + 1, n):
            d = metric(pi, points[j])
            row[j] = d
            D[j][i] = d
    return D


@dataclass
class Violation:
    axiom: str
    points: tuple
    values: tuple

    def to_json(self, window: Window) -> dict:
        return {
            "axiom": self.axiom,
            "points": [window.encode_point(p) for p in self.points],
            "values": list(self.values),
        }


@dataclass
class AuditReport:
    metric: str
    samples: int
    seed: int
    checked: int = 0
    distinct_triples: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def counts(self) -> dict:
        out = {"identity": 0, "symmetry": 0, "triangle": 0}
        for v in self.violations:
            out[v.axiom] += 1
        return out

    def to_json(self, window: Window) -> dict:
        return {
            "metric": self.metric,
            "samples": self.samples,
            "seed": self.seed,
            "checked": self.checked,
            "distinct_triples": self.distinct_triples,
            "violation_counts": self.counts(),
            "violations": [v.to_json(window) for v in self.violations],
        }


def metric_audit(W: Window, metric: Metric | None, samples: int, seed: int = 0) -> AuditReport:
    """Check identity, symmetry and the triangle inequality on seeded random triples."""
    if len(W) == 0:
        raise ValueError("cannot audit an empty window")
    metric = metric or W.default_metric()
    rep = AuditReport(str(metric), samples, seed)
    rng = random.Random(seed)
    pts = W.points
    n = len(pts)
    for _ in range(samples):
        x, y, z = pts[rng.randrange(n)], pts[rng.randrange(n)], pts[rng.randrange(n)]
        rep.checked += 1
        if x != y and y != z and x != z:
            rep.distinct_triples += 1
        dxy, dyx = metric(x, y), metric(y, x)
        dyz, dxz = metric(y, z), metric(x, z)
        dxx = metric(x, x)
        if dxx != 0:
            rep.violations.append(Violation("identity", (x, x), (dxx,)))
        if (dxy == 0) != (x == y):
            rep.violations.append(Violation("identity", (x, y), (dxy,)))
        if dxy != dyx:
            rep.violations.append(Violation("symmetry", (x, y), (dxy, dyx)))
        if dxz > dxy + dyz:
            rep.violations.append(Violation("triangle", (x, y, z), (dxz, dxy, dyz)))
    return rep
