"""Covers by r-disjoint uniformly bounded families, and their checkers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .spaces import Window


def diameter(S, metric) -> int:
    S = list(S)
    if not S:
        raise ValueError("diameter of the empty set")
    best = 0
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            d = metric(S[i], S[j])
            if d > best:
                best = d
    return best


def set_distance(A, B, metric) -> int:
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("set distance needs two nonempty sets")
    return min(metric(a, b) for a in A for b in B)


@dataclass
class Family:
    r: int
    members: list = field(default_factory=list)

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"disjointness parameter must be positive, got {self.r}")
        self.members = [tuple(m) for m in self.members]
        seen = set()
        for m in self.members:
            if not m:
                raise ValueError("family members are nonempty")
            for p in m:
                if p in seen:
                    raise ValueError(f"point {p} lies in two members of one family")
                seen.add(p)

    def points(self):
        for m in self.members:
            yield from m


def check_family(F: Family, metric) -> bool:
    return _first_close_pair(F, metric) is None


def _first_close_pair(F: Family, metric):
    for i in range(len(F.members)):
        for j in range(i + 1, len(F.members)):
            if set_distance(F.members[i], F.members[j], metric) < F.r:
                return i, j
    return None


@dataclass
class Cover:
    """Families with their disjointness parameters.

    ``sigma`` lists the parameters in family order. An A-certificate needs
    them distinct (``is_sigma_cover``); the product grid construction
    produces several families sharing one parameter.
    """

    families: list

    @property
    def sigma(self) -> list[int]:
        return [f.r for f in self.families]

    @property
    def is_sigma_cover(self) -> bool:
        s = self.sigma
        return len(set(s)) == len(s) and s == sorted(s)

    def to_json(self, window: Window) -> dict:
        return {
            "sigma": self.sigma,
            "families": [
                {"r": f.r, "members": [[window.index_of(p) for p in m] for m in f.members]}
                for f in self.families
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, window: Window) -> "Cover":
        fams = []
        for f in obj["families"]:
            members = []
            for m in f["members"]:
                try:
                    members.append(tuple(window.points[i] for i in m))
                except IndexError:
                    raise ValueError(f"member references a point index outside the window: {m}") from None
            fams.append(Family(int(f["r"]), members))
        cover = cls(fams)
        if "sigma" in obj and list(obj["sigma"]) != cover.sigma:
            raise ValueError("cover sigma does not match its families")
        return cover


@dataclass
class CoverVerdict:
    covers: bool
    bounded_by: int | None
    bounded: bool
    disjoint_ok: bool
    first_violation: str | None = None

    @property
    def ok(self) -> bool:
        return self.covers and self.bounded and self.disjoint_ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "covers": self.covers,
            "bounded_by": self.bounded_by,
            "bounded": self.bounded,
            "disjoint_ok": self.disjoint_ok,
            "first_violation": self.first_violation,
        }


def check_cover(C: Cover, W: Window, B: int, metric=None) -> CoverVerdict:
    metric = metric or W.default_metric()
    covered = set()
    for f in C.families:
        for p in f.points():
            if p not in W:
                raise ValueError(f"cover point {p} lies outside the window")
            covered.add(p)
    violations = []
    missing = [p for p in W.points if p not in covered]
    if missing:
        violations.append((W.index_of(missing[0]), 0, f"point {W.index_of(missing[0])} is not covered"))
    worst = None
    bounded = True
    for fi, f in enumerate(C.families):
        for mi, m in enumerate(f.members):
            d = diameter(m, metric)
            worst = d if worst is None else max(worst, d)
            if d > B:
                if bounded:
                    violations.append((W.index_of(min(m)), 1, f"family {fi} member {mi} has diameter {d} > {B}"))
                bounded = False
    disjoint_ok = True
    for fi, f in enumerate(C.families):
        pair = _first_close_pair(f, metric)
        if pair is not None:
            if disjoint_ok:
                i, j = pair
                d = set_distance(f.members[i], f.members[j], metric)
                violations.append(
                    (W.index_of(min(f.members[i])), 2, f"family {fi} members {i},{j} at distance {d} < {f.r}")
                )
            disjoint_ok = False
    first = min(violations)[2] if violations else None
    return CoverVerdict(not missing, worst, bounded, disjoint_ok, first)


def chain_components(S, r: int, metric) -> list[tuple]:
    """Classes of the transitive closure of ``d(a, b) < r``, canonically ordered."""
    S = sorted(set(S))
    parent = list(range(len(S)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            if metric(S[i], S[j]) < r:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups: dict[int, list] = {}
    for i, p in enumerate(S):
        groups.setdefault(find(i), []).append(p)
    return sorted(tuple(g) for g in groups.values())


def load_cover(path, window: Window) -> Cover:
    with open(path) as fh:
        return Cover.from_json(json.load(fh), window)
