from fractions import Fraction as F

import pytest
from hypothesis import given
import hypothesis.strategies as st

from cmtrace.invariants import invariant_tuple, traceless_pair
from cmtrace.numeric import Matrix, commutator, rank
from cmtrace.relations import Stratum, classify_stratum
from cmtrace.sampler import (
    COMMUTING_KINDS,
    IdentityReport,
    cm_point,
    commuting_pair,
    make_rng,
    random_cm,
    rank_k_pair,
    run_identity_suite,
)

from conftest import seeds

J = Matrix([[1] * 3] * 3)


def test_cm_point_example():
    q = cm_point([0, 1, 2], [0, 0, 0])
    assert commutator(q.X, q.Y) + 1 == J
    assert rank(J) == 1
    t = invariant_tuple(q.X, q.Y)
    assert t.a == (3, 0, 2, 0, F(-9, 2), 0, 0, 0, 0) and (t.v, t.w) == (-3, 2)


def test_cm_point_rejects_repeated_x():
    with pytest.raises(ValueError):
        cm_point([1, 1, 2], [0, 0, 0])


@given(seeds, st.integers(2, 6), st.booleans())
def test_random_cm_is_rank_one(seed, n, mix):
    q = random_cm(make_rng(seed), n, mix)
    assert q.check()
    A, B = traceless_pair(q.X, q.Y)
    assert (A @ B @ A @ B).trace() - (A @ A @ B @ B).trace() == F(n * (n - 1), 2)


def test_commuting_examples():
    X = Matrix.diag([1, 2, 3])
    assert commutator(X, X @ X) == Matrix.zeros(3)
    N = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert commutator(N, N @ N) == Matrix.zeros(3)


@given(seeds, st.sampled_from(COMMUTING_KINDS), st.integers(2, 5))
def test_commuting_pairs_commute(seed, kind, n):
    X, Y = commuting_pair(kind, make_rng(seed), n)
    assert commutator(X, Y) == Matrix.zeros(n)


def test_unknown_commuting_kind():
    with pytest.raises(ValueError):
        commuting_pair("upper", make_rng(0))


@given(seeds)
def test_rank_two_pairs(seed):
    X, Y = rank_k_pair(2, make_rng(seed))
    assert classify_stratum(X, Y) is Stratum.PRIME
    t = invariant_tuple(X, Y)
    assert 1 + t.v + t.w == 0


def test_rank_three_pairs_generically_off_the_line():
    hits = [invariant_tuple(*rank_k_pair(3, make_rng(k))) for k in range(20)]
    assert sum(1 + t.v + t.w != 0 for t in hits) >= 19


def test_suite_examples():
    for rep in run_identity_suite(["eq2.2", "eq2.6", "eq2.7"], 100, 0):
        assert rep.passed, rep.to_json()


def test_suite_deterministic():
    a = [r.to_json(timing=False) for r in run_identity_suite(["eq2.4", "thm5.6"], 20, "s")]
    b = [r.to_json(timing=False) for r in run_identity_suite(["thm5.6", "eq2.4"], 20, "s")]
    assert a == b
    assert [r["id"] for r in a] == ["eq2.4", "thm5.6"]


def test_report_merge():
    a = IdentityReport("x", 3, 1, {"k": 1}, 0.5)
    b = IdentityReport("x", 2, 0, None, 0.25)
    m = a.merge(b)
    assert (m.trials, m.failures, m.witness, m.elapsed) == (5, 1, {"k": 1}, 0.75)
    with pytest.raises(ValueError):
        a.merge(IdentityReport("y"))
