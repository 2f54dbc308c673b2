"""Finite set systems and Borst's rank invariant.

A system is a finite collection of nonempty finite label sets. The rank of
the empty system is 0; otherwise it is one more than the largest rank of
its single-label derivatives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable


FinSet = frozenset


def finset(labels: Iterable[int]) -> frozenset:
    s = frozenset(int(a) for a in labels)
    if not s:
        raise ValueError("Fin L elements are nonempty")
    if any(a <= 0 for a in s):
        raise ValueError(f"labels must be positive integers: {sorted(s)}")
    return s


def _key(s: frozenset):
    return (len(s), sorted(s))


@dataclass(frozen=True)
class SetSystem:
    members: tuple

    def __init__(self, members: Iterable[Iterable[int]] = ()):
        uniq = {finset(m) for m in members}
        object.__setattr__(self, "members", tuple(sorted(uniq, key=_key)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s):
        return frozenset(s) in self.member_set

    @property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    @property
    def labels(self) -> list[int]:
        out = set()
        for m in self.members:
            out |= m
        return sorted(out)

    def issubset(self, other: "SetSystem") -> bool:
        return self.member_set <= other.member_set

    def union(self, other: "SetSystem") -> "SetSystem":
        return SetSystem(self.members + other.members)

    def to_json(self) -> dict:
        return {"members": [sorted(m) for m in self.members]}

    @classmethod
    def from_json(cls, obj: dict) -> "SetSystem":
        if not isinstance(obj, dict) or "members" not in obj:
            raise ValueError("set system JSON needs a 'members' list")
        return cls(obj["members"])

    @classmethod
    def load(cls, path) -> "SetSystem":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self):
        return "SetSystem(%s)" % [sorted(m) for m in self.members]


def derive(M: SetSystem, sigma: Iterable[int] = ()) -> SetSystem:
    """Return ``{tau : sigma | tau in M, sigma & tau empty}`` (tau nonempty)."""
    sigma = frozenset(sigma)
    return SetSystem(m - sigma for m in M.members if sigma < m)


def ord_system(M: SetSystem) -> int:
    """Rank of ``M``, memoized on the accumulated label set.

    The derivative of ``M`` at sigma is a function of sigma alone, so the
    recursion never materializes intermediate systems.
    """
    value, _ = _ord_with_chain(M)
    return value


def ord_chain(M: SetSystem) -> tuple[int, list[int]]:
    """Rank of ``M`` together with a label chain realizing it.

    Deriving successively along the chain keeps the system nonempty until
    the last step, so the chain length equals the rank.
    """
    return _ord_with_chain(M)


def _ord_with_chain(M: SetSystem) -> tuple[int, list[int]]:
    members = M.members
    memo: dict[frozenset, int] = {}
    best: dict[frozenset, int | None] = {}

    def rank(sigma: frozenset) -> int:
        got = memo.get(sigma)
        if got is not None:
            return got
        above = [m for m in members if sigma < m]
        if not above:
            memo[sigma] = 0
            best[sigma] = None
            return 0
        candidates = set()
        for m in above:
            candidates |= m - sigma
        top, arg = -1, None
        for a in sorted(candidates):
            v = rank(sigma | {a})
            if v > top:
                top, arg = v, a
        memo[sigma] = top + 1
        best[sigma] = arg
        return top + 1

    # the empty sigma stands for M itself
    value = rank(frozenset())
    chain = []
    sigma = frozenset()
    while best.get(sigma) is not None:
        a = best[sigma]
        chain.append(a)
        sigma = sigma | {a}
    return value, chain


class BudgetExceeded(RuntimeError):
    pass


NAIVE_LABEL_LIMIT = 12


def ord_system_naive(M: SetSystem, max_labels: int = NAIVE_LABEL_LIMIT) -> int:
    """Direct structural recursion on explicit derivatives, no memo."""
    if len(M.labels) > max_labels:
        raise BudgetExceeded(f"naive Ord limited to {max_labels} labels, system has {len(M.labels)}")
    if len(M) == 0:
        return 0
    return 1 + max(ord_system_naive(derive(M, {a}), max_labels) for a in M.labels)


def ord_interval(definite_in: SetSystem, possible_in: SetSystem) -> tuple[int, int]:
    if not definite_in.issubset(possible_in):
        raise ValueError("ord_interval requires definite_in to be contained in possible_in")
    lo, hi = ord_system(definite_in), ord_system(possible_in)
    assert lo <= hi, (lo, hi)
    return lo, hi
