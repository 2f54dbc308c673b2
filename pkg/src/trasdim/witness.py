"""Constructive upper-bound witnesses.

``theorem1_witness`` cuts an X_2w window at a level ``k``: every point at
level ``>= k`` becomes its own singleton member, and the lower levels form
the residual, which should sit inside the ``c``-neighborhood of level
``k-1`` with ``c = 1 + ... + (k-1)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .covers import Cover, Family
from .metrics import Metric
from .ordinal import Cmp, Ordinal, ord_compare
from .spaces import Window, neighborhood


@dataclass
class WitnessDecomposition:
    r: int
    k: int
    tail_family: Family
    residual: list
    c: int

    def to_json(self, window: Window) -> dict:
        return {
            "r": self.r,
            "k": self.k,
            "c": self.c,
            "tail": [window.index_of(m[0]) for m in self.tail_family.members],
            "residual": [window.index_of(p) for p in self.residual],
        }

    @classmethod
    def from_json(cls, obj: dict, window: Window) -> "WitnessDecomposition":
        pts = window.points
        try:
            tail = Family(int(obj["r"]), [(pts[i],) for i in obj["tail"]])
            residual = [pts[i] for i in obj["residual"]]
        except IndexError:
            raise ValueError("decomposition references a point outside the window") from None
        return cls(int(obj["r"]), int(obj["k"]), tail, residual, int(obj["c"]))

    @classmethod
    def load(cls, path, window: Window) -> "WitnessDecomposition":
        with open(path) as fh:
            return cls.from_json(json.load(fh), window)


def cut_level(r: int) -> int:
    """Least ``k`` with ``k >= r`` and ``2^k >= r``."""
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    k = max(r, 1)
    while (1 << k) < r:
        k += 1
    return k


def theorem1_witness(W: Window, r: int) -> WitnessDecomposition:
    if W.kind != "X2OMEGA":
        raise ValueError(f"theorem1_witness needs an X2OMEGA window, got {W.kind}")
    k = cut_level(r)
    tail = [(p,) for p in W.points if p.level >= k]
    residual = [p for p in W.points if p.level < k]
    return WitnessDecomposition(r, k, Family(r, tail), residual, k * (k - 1) // 2)


@dataclass
class StepVerdict:
    r: int
    k: int
    c: int
    disjoint_ok: bool
    bounded_ok: bool
    residual_ok: bool
    vacuous: bool = False
    close_pair: tuple | None = None
    uncovered: list = field(default_factory=list)
    residual_ok_at_c_minus_1: bool | None = None
    residual_bound: Ordinal | None = None

    @property
    def ok(self) -> bool:
        return self.disjoint_ok and self.bounded_ok and self.residual_ok

    def to_json(self, window: Window) -> dict:
        return {
            "ok": self.ok,
            "r": self.r,
            "k": self.k,
            "c": self.c,
            "tail_r_disjoint": self.disjoint_ok,
            "tail_diameter_zero": self.bounded_ok,
            "residual_in_neighborhood": self.residual_ok,
            "vacuous": self.vacuous,
            "close_pair": [window.encode_point(p) for p in self.close_pair] if self.close_pair else None,
            "uncovered": [window.encode_point(p) for p in self.uncovered],
            "residual_in_neighborhood_c_minus_1": self.residual_ok_at_c_minus_1,
            "residual_coasdim_bound": str(self.residual_bound) if self.residual_bound else None,
            "residual_bound_below_2w": (
                ord_compare(self.residual_bound, Ordinal(2, 0)) == Cmp.LT if self.residual_bound else None
            ),
        }


def check_coasdim_step(W: Window, dec: WitnessDecomposition, metric: Metric | None = None) -> StepVerdict:
    """Verify one unfolding of the coasdim clause for the decomposition."""
    metric = metric or Metric.tower()
    tail_pts = [m[0] for m in dec.tail_family.members]
    bounded = all(len(m) == 1 for m in dec.tail_family.members)
    seen = set(tail_pts) | set(dec.residual)
    if len(seen) != len(tail_pts) + len(dec.residual) or seen != set(W.points):
        raise ValueError("decomposition does not partition this window")

    close = None
    for i in range(len(tail_pts)):
        row_pt = tail_pts[i]
        for j in range(i + 1, len(tail_pts)):
            if metric(row_pt, tail_pts[j]) < dec.r:
                close = (row_pt, tail_pts[j])
                break
        if close:
            break

    anchors = W.point_at_level(dec.k - 1)
    vacuous = not dec.residual or not anchors
    if not dec.residual:
        uncovered, ok_c, ok_c1 = [], True, True
    elif not anchors:
        # nothing to measure against inside this window
        uncovered, ok_c, ok_c1 = [], True, None
    else:
        sub = W.subwindow(dec.residual + anchors)
        near = set(neighborhood(sub, anchors, dec.c, metric))
        uncovered = [p for p in dec.residual if p not in near]
        ok_c = not uncovered
        if dec.c >= 1:
            near1 = set(neighborhood(sub, anchors, dec.c - 1, metric))
            ok_c1 = all(p in near1 for p in dec.residual)
        else:
            ok_c1 = ok_c
    return StepVerdict(
        dec.r,
        dec.k,
        dec.c,
        close is None,
        bounded,
        ok_c,
        vacuous,
        close,
        uncovered,
        ok_c1,
        Ordinal(1, max(dec.k - 1, 0)),
    )


def grid_cover(W: Window, D: int) -> Cover:
    """Product brick cover with ``2^b`` families of side-``D`` bricks.

    Bricks along each axis alternate between two parity classes; a family
    collects the bricks of one parity vector. Same-family bricks are at
    sup distance at least ``D + 1`` and each brick has diameter ``D - 1``.
    """
    if W.kind != "R":
        raise ValueError("grid_cover works on R windows")
    if D < 1:
        raise ValueError("D must be positive")
    b = W.params["block"]
    bricks: dict[tuple, dict[tuple, list]] = {}
    for p in W.points:
        idx = tuple(c // D for c in p.coords)
        parity = tuple(i % 2 for i in idx)
        bricks.setdefault(parity, {}).setdefault(idx, []).append(p)
    fams = []
    for parity in itertools.product((0, 1), repeat=b):
        members = [tuple(sorted(m)) for _, m in sorted(bricks.get(parity, {}).items())]
        fams.append(Family(D, members))
    return Cover(fams)


def grid_sigma(D: int, b: int) -> list[int] | None:
    """Distinct parameters the grid families can carry at once, or ``None``.

    Same-family bricks are ``D + 1`` apart, so ``2^b`` consecutive values
    ending at ``D + 1`` work whenever they stay positive.
    """
    count = 1 << b
    lo = D + 2 - count
    if lo < 1:
        return None
    return list(range(lo, D + 2))


def relabel(cover: Cover, sigma: list[int]) -> Cover:
    return Cover([Family(r, f.members) for r, f in zip(sigma, cover.families)])
