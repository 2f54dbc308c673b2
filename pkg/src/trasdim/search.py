"""Exact decision of bounded sigma-cover existence on a finite window.

A cover with families indexed by ``sigma`` exists iff the points can be
assigned to the families so that, inside every family with parameter ``r``,
each chain component (closure of ``d < r``) has diameter at most ``B``.
Components only grow as points are added, so a partial assignment is
pruned as soon as one component exceeds ``B``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .borst import SetSystem, ord_interval
from .covers import Cover, Family, chain_components, diameter
from .metrics import Metric, distance_matrix
from .spaces import Window

EXISTS, NONE, UNKNOWN = "EXISTS", "NONE", "UNKNOWN"
NAIVE_LIMIT = 10**7


class RollbackUnionFind:
    """Union by size without path compression, undoable to any checkpoint.

    Each root carries its member list and the exact diameter of the class.
    """

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.diam = [0] * n
        self.members = [[i] for i in range(n)]
        self.history = []

    def find(self, a):
        while self.parent[a] != a:
            a = self.parent[a]
        return a

    def checkpoint(self):
        return len(self.history)

    def union(self, a, b, new_diam):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.history.append((rb, ra, self.size[ra], self.diam[ra], len(self.members[ra])))
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.diam[ra] = new_diam
        self.members[ra].extend(self.members[rb])
        return ra

    def rollback(self, mark):
        while len(self.history) > mark:
            rb, ra, size, diam, length = self.history.pop()
            self.parent[rb] = rb
            self.size[ra] = size
            self.diam[ra] = diam
            del self.members[ra][length:]


class _BudgetExhausted(Exception):
    pass


class _Search:
    def __init__(self, D, radii, B, budget):
        self.D = D
        self.radii = radii
        self.B = B
        self.budget = budget
        self.n = len(D)
        self.uf = RollbackUnionFind(self.n)
        self.assign = [-1] * self.n
        self.fam_points = [[] for _ in radii]
        self.marks = [0] * self.n
        self.nodes = 0

    def try_place(self, i, f):
        r = self.radii[f]
        row = self.D[i]
        uf = self.uf
        roots = []
        for q in self.fam_points[f]:
            if row[q] < r:
                rq = uf.find(q)
                if rq not in roots:
                    roots.append(rq)
        B = self.B
        # merged diameter, grown one component at a time
        groups = [[i]]
        diam = 0
        for root in roots:
            diam = max(diam, uf.diam[root])
            other = uf.members[root]
            for g in groups:
                for a in g:
                    ra = self.D[a]
                    for b in other:
                        if ra[b] > diam:
                            diam = ra[b]
                            if diam > B:
                                return False
            if diam > B:
                return False
            groups.append(other)
        self.marks[i] = uf.checkpoint()
        merged = i
        for root in roots:
            merged = uf.union(merged, root, diam)
        self.assign[i] = f
        self.fam_points[f].append(i)
        return True

    def unplace(self, i):
        f = self.assign[i]
        self.uf.rollback(self.marks[i])
        self.fam_points[f].pop()
        self.assign[i] = -1

    def dfs(self, start):
        n, nfam = self.n, len(self.radii)
        nxt = [0] * (n + 1)
        i = start
        while True:
            if i == n:
                return True
            placed = False
            while nxt[i] < nfam:
                f = nxt[i]
                nxt[i] += 1
                if self.nodes >= self.budget:
                    raise _BudgetExhausted
                self.nodes += 1
                if self.try_place(i, f):
                    placed = True
                    break
            if placed:
                i += 1
                nxt[i] = 0
            else:
                i -= 1
                if i < start:
                    return False
                self.unplace(i)

    def run(self, start=0):
        try:
            found = self.dfs(start)
        except _BudgetExhausted:
            return UNKNOWN
        return EXISTS if found else NONE


@dataclass
class Decision:
    outcome: str
    witness: Cover | None
    nodes_explored: int
    budget: int | None
    sigma: list = field(default_factory=list)
    bound: int = 0

    def to_json(self, window: Window) -> dict:
        out = {
            "outcome": self.outcome,
            "sigma": list(self.sigma),
            "bound": self.bound,
            "nodes": self.nodes_explored,
            "budget": self.budget,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json(window)
        elif self.outcome == NONE:
            out["exhaustion"] = {"complete": True, "nodes": self.nodes_explored}
        return out


def _check_sigma(sigma):
    sigma = [int(s) for s in sigma]
    if not sigma:
        raise ValueError("sigma must be nonempty")
    if any(s < 1 for s in sigma):
        raise ValueError(f"sigma entries are positive integers: {sigma}")
    if len(set(sigma)) != len(sigma):
        raise ValueError(f"sigma entries must be distinct: {sigma}")
    return sorted(sigma)


def _witness(points, D, radii, assign, metric):
    fams = []
    for f, r in enumerate(radii):
        pts = [points[i] for i in range(len(points)) if assign[i] == f]
        fams.append(Family(r, chain_components(pts, r, metric)))
    return Cover(fams)


def _task(args):
    D, radii, B, budget, prefix = args
    s = _Search(D, radii, B, budget)
    for i, f in enumerate(prefix):
        if not s.try_place(i, f):
            raise RuntimeError("parallel prefix does not replay")
    outcome = s.run(len(prefix))
    return outcome, s.nodes, list(s.assign) if outcome == EXISTS else None


def _plan(D, radii, B, depth):
    """Prefix tree of the first ``depth`` points in DFS order.

    Returns a list of events: ``None`` for one search node, or a prefix
    assignment whose subtree is searched separately.
    """
    s = _Search(D, radii, B, budget=float("inf"))
    events = []

    def rec(i):
        if i == depth:
            events.append(tuple(s.assign[:depth]))
            return
        for f in range(len(radii)):
            events.append(None)
            if s.try_place(i, f):
                rec(i + 1)
                s.unplace(i)

    rec(0)
    return events


def decide_cover(
    W: Window,
    sigma,
    B: int,
    budget: int = 10**6,
    metric: Metric | None = None,
    threads: int = 1,
    D=None,
) -> Decision:
    """Decide whether ``W`` has a cover by families indexed by ``sigma`` with diameters ``<= B``.

    The DFS visits points in window order and families in ``sigma`` order.
    With ``threads > 1`` the top of the tree is split into independent
    subtrees and their node counts are replayed in DFS order, so outcome,
    node count and witness are identical to the sequential run.
    """
    if budget is None or budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    if len(W) == 0:
        raise ValueError("window is empty")
    radii = _check_sigma(sigma)
    metric = metric or W.default_metric()
    if D is None:
        D = distance_matrix(W.points, metric)
    n, nfam = len(W), len(radii)

    depth = 0
    if threads > 1 and nfam > 1:
        depth = 1
        while nfam**depth < 2 * threads and depth < n - 1:
            depth += 1

    if depth == 0:
        s = _Search(D, radii, B, budget)
        outcome = s.run()
        witness = _witness(W.points, D, radii, s.assign, metric) if outcome == EXISTS else None
        return Decision(outcome, witness, s.nodes, budget, radii, B)

    events = _plan(D, radii, B, depth)
    prefixes = [e for e in events if e is not None]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
        results = list(pool.map(_task, [(D, radii, B, budget, p) for p in prefixes]))
    total = 0
    it = iter(results)
    for e in events:
        if e is None:
            if total >= budget:
                return Decision(UNKNOWN, None, budget, budget, radii, B)
            total += 1
            continue
        outcome, used, assign = next(it)
        if outcome == UNKNOWN or total + used > budget:
            return Decision(UNKNOWN, None, budget, budget, radii, B)
        total += used
        if outcome == EXISTS:
            return Decision(EXISTS, _witness(W.points, D, radii, assign, metric), total, budget, radii, B)
    return Decision(NONE, None, total, budget, radii, B)


def decide_cover_naive(W: Window, sigma, B: int, metric: Metric | None = None) -> Decision:
    """Reference decision by enumerating every point-to-family assignment."""
    radii = _check_sigma(sigma)
    metric = metric or W.default_metric()
    n = len(W)
    if len(radii) ** n > NAIVE_LIMIT:
        raise ValueError(f"{len(radii)}^{n} assignments exceed the naive limit {NAIVE_LIMIT}")
    tried = 0
    for assign in itertools.product(range(len(radii)), repeat=n):
        tried += 1
        fams = []
        ok = True
        for f, r in enumerate(radii):
            pts = [W.points[i] for i in range(n) if assign[i] == f]
            comps = chain_components(pts, r, metric)
            if any(diameter(c, metric) > B for c in comps):
                ok = False
                break
            fams.append(Family(r, comps))
        if ok:
            return Decision(EXISTS, Cover(fams), tried, None, radii, B)
    return Decision(NONE, None, tried, None, radii, B)


# fragments of A_B(W)


def implies_exists(src, dst) -> bool:
    """True iff a cover indexed by ``src`` yields one indexed by ``dst``.

    That needs an injection ``src -> dst`` sending each parameter to one no
    larger (an ``r``-disjoint family is ``r'``-disjoint for ``r' <= r``, and
    unused indices get empty families).
    """
    src, dst = sorted(src), sorted(dst)
    if len(src) > len(dst):
        return False
    return all(t <= s for s, t in zip(src, dst))


def window_id(W: Window) -> str:
    blob = json.dumps(W.to_json(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class AFragment:
    window_id: str
    B: int
    n_max: int
    s_max: int
    definite_in: SetSystem
    definite_out: SetSystem
    unknown: SetSystem
    calls: int = 0
    inferred: int = 0

    def to_json(self) -> dict:
        return {
            "fragment": "A_B(W)",
            "window_id": self.window_id,
            "B": self.B,
            "n_max": self.n_max,
            "s_max": self.s_max,
            "definite_in": self.definite_in.to_json(),
            "definite_out": self.definite_out.to_json(),
            "unknown": self.unknown.to_json(),
            "solver_calls": self.calls,
            "inferred": self.inferred,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AFragment":
        return cls(
            obj["window_id"],
            int(obj["B"]),
            int(obj["n_max"]),
            int(obj["s_max"]),
            SetSystem.from_json(obj["definite_in"]),
            SetSystem.from_json(obj["definite_out"]),
            SetSystem.from_json(obj["unknown"]),
            int(obj.get("solver_calls", 0)),
            int(obj.get("inferred", 0)),
        )


def sigma_range(n_max: int, s_max: int):
    for size in range(1, s_max + 1):
        yield from itertools.combinations(range(1, n_max + 1), size)


class FragmentContradiction(RuntimeError):
    pass


def build_afragment(
    W: Window,
    B: int,
    n_max: int,
    s_max: int,
    budget_per_sigma: int = 10**5,
    metric: Metric | None = None,
    threads: int = 1,
) -> AFragment:
    """Classify every sigma in range as in, out of, or undecided for ``A_B(W)``.

    Known outcomes are propagated along the cover implications so that the
    solver only runs on sigmas not already settled.
    """
    if n_max < 1 or s_max < 1:
        raise ValueError("n_max and s_max must be at least 1")
    metric = metric or W.default_metric()
    D = distance_matrix(W.points, metric)
    exists, none, unknown = [], [], []
    calls = inferred = 0
    for sigma in sigma_range(n_max, s_max):
        yes = any(implies_exists(e, sigma) for e in exists)
        no = any(implies_exists(sigma, x) for x in none)
        if yes and no:
            raise FragmentContradiction(f"sigma {sigma} inferred both covered and uncoverable")
        if yes:
            exists.append(sigma)
            inferred += 1
            continue
        if no:
            none.append(sigma)
            inferred += 1
            continue
        calls += 1
        dec = decide_cover(W, sigma, B, budget_per_sigma, metric, threads, D=D)
        {EXISTS: exists, NONE: none, UNKNOWN: unknown}[dec.outcome].append(sigma)

    still = []
    for sigma in unknown:
        yes = any(implies_exists(e, sigma) for e in exists)
        no = any(implies_exists(sigma, x) for x in none)
        if yes and no:
            raise FragmentContradiction(f"sigma {sigma} inferred both covered and uncoverable")
        if yes:
            exists.append(sigma)
        elif no:
            none.append(sigma)
        else:
            still.append(sigma)

    frag = AFragment(
        window_id(W), B, n_max, s_max, SetSystem(none), SetSystem(exists), SetSystem(still), calls, inferred
    )
    problems = fragment_closure_problems(frag)
    if problems:
        raise FragmentContradiction("; ".join(problems[:5]))
    return frag


def fragment_closure_problems(frag: AFragment) -> list[str]:
    """Every breach of the partition, downward and dominance closure laws."""
    out = []
    ins, outs, unk = frag.definite_in.member_set, frag.definite_out.member_set, frag.unknown.member_set
    universe = {frozenset(s) for s in sigma_range(frag.n_max, frag.s_max)}
    if ins & outs or ins & unk or outs & unk:
        out.append("fragment systems overlap")
    if ins | outs | unk != universe:
        out.append("fragment systems do not cover the sigma range")
    for s in ins:
        for size in range(1, len(s)):
            for sub in itertools.combinations(sorted(s), size):
                if frozenset(sub) not in ins:
                    out.append(f"subset {sorted(sub)} of uncoverable {sorted(s)} not in definite_in")
        for a in s:
            for b in range(a + 1, frag.n_max + 1):
                if b in s:
                    continue
                moved = (s - {a}) | {b}
                if moved not in ins:
                    out.append(f"{sorted(moved)} dominates uncoverable {sorted(s)} but is not in definite_in")
    for s in outs:
        for x in ins:
            if implies_exists(s, x):
                out.append(f"covered {sorted(s)} implies a cover for uncoverable {sorted(x)}")
    return out


def afragment_ord_bounds(frag: AFragment) -> tuple[int, int]:
    return ord_interval(frag.definite_in, frag.definite_in.union(frag.unknown))
