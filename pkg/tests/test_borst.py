import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trasdim.borst import (
    BudgetExceeded,
    SetSystem,
    derive,
    ord_chain,
    ord_interval,
    ord_system,
    ord_system_naive,
)


def subsets(labels, min_size=1):
    return [frozenset(c) for n in range(min_size, len(labels) + 1) for c in itertools.combinations(labels, n)]


def test_derive_examples():
    assert derive(SetSystem([[1, 2], [1, 3]]), {1}) == SetSystem([[2], [3]])
    M = SetSystem([[1, 2], [3], [2, 4, 5]])
    assert derive(M, ()) == M
    assert derive(SetSystem([[1, 2]]), {3}) == SetSystem()


def test_derive_pointwise_definition():
    universe = [1, 2, 3, 4]
    fin = subsets(universe)
    rng = random.Random(0)
    for _ in range(60):
        M = SetSystem(rng.sample(fin, rng.randint(0, 8)))
        for sigma in [frozenset()] + fin:
            got = derive(M, sigma).member_set
            want = {tau for tau in fin if not (sigma & tau) and (sigma | tau) in M.member_set}
            assert got == want


def test_ord_examples():
    assert ord_system(SetSystem()) == 0
    assert ord_system(SetSystem([[7]])) == 1
    assert ord_system(SetSystem(s for s in subsets([1, 2, 3]) if len(s) <= 2)) == 2


def test_naive_examples():
    assert ord_system_naive(SetSystem()) == 0
    assert ord_system_naive(SetSystem([[1], [2]])) == 1
    assert ord_system_naive(SetSystem([[1, 2]])) == 2


def test_naive_budget():
    with pytest.raises(BudgetExceeded, match="12"):
        ord_system_naive(SetSystem([[a] for a in range(1, 14)]))


def test_interval_examples():
    assert ord_interval(SetSystem(), SetSystem()) == (0, 0)
    assert ord_interval(SetSystem([[2]]), SetSystem([[2], [2, 3]])) == (1, 2)
    M = SetSystem([[1, 2], [3]])
    assert ord_interval(M, M) == (2, 2)
    with pytest.raises(ValueError):
        ord_interval(SetSystem([[5]]), SetSystem([[2]]))


def test_chain_realizes_rank():
    rng = random.Random(1)
    fin = subsets(range(1, 6))
    for _ in range(200):
        M = SetSystem(rng.sample(fin, rng.randint(0, 10)))
        value, chain = ord_chain(M)
        assert len(chain) == value
        assert len(set(chain)) == len(chain)
        for j in range(value):
            assert len(derive(M, chain[:j])) > 0
        assert len(derive(M, chain)) == 0


def test_monotone_under_inclusion():
    rng = random.Random(2)
    fin = subsets(range(1, 6))
    for _ in range(300):
        small = rng.sample(fin, rng.randint(0, 6))
        big = small + rng.sample(fin, rng.randint(0, 6))
        assert ord_system(SetSystem(small)) <= ord_system(SetSystem(big))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bounded_by_largest_member(n):
    rng = random.Random(n)
    fin = subsets(range(1, 6))
    for _ in range(100):
        M = SetSystem(rng.sample(fin, rng.randint(1, 8)))
        assert ord_system(M) <= max(len(m) for m in M)
    full = SetSystem(s for s in subsets(range(1, n + 2)) if len(s) <= n)
    assert ord_system(full) == n


systems = st.lists(st.frozensets(st.integers(1, 6), min_size=1, max_size=4), max_size=10).map(SetSystem)


@settings(max_examples=300, deadline=None)
@given(systems)
def test_memo_matches_naive(M):
    assert ord_system(M) == ord_system_naive(M)


def test_json_round_trip(tmp_path):
    M = SetSystem([[3, 1], [2], [1, 3]])
    assert M.to_json() == {"members": [[2], [1, 3]]}
    p = tmp_path / "m.json"
    p.write_text('{"members": [[1,2],[1,3]]}')
    assert SetSystem.load(p) == SetSystem([[1, 3], [2, 1]])
    with pytest.raises(ValueError):
        SetSystem([[]])
    with pytest.raises(ValueError):
        SetSystem([[0, 1]])
