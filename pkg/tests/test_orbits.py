import cmath
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from cmtrace.cremona import Theta, act_tuple_word, random_tuple_move
from cmtrace.invariants import invariant_tuple
from cmtrace.numeric import AmbiguousError, DEFAULT_TOL
from cmtrace.orbits import (
    WORD_BOUND_D3,
    WORD_BOUND_D30,
    CaseDispatchError,
    OffVarietyError,
    OrbitLabel,
    classify_d30,
    normalize_d3,
    replay,
    representative,
)
from cmtrace.relations import eval_id1z, eval_id2z
from cmtrace.sampler import COMMUTING_KINDS, commuting_pair, make_rng, random_cm

from conftest import seeds

ZERO7 = (F(0),) * 7


def cm_tuple(seed, mix=False, complex_=True, phase=True):
    rng = make_rng(seed, "orbit-cm")
    q = random_cm(rng, 3, mix)
    t = invariant_tuple(q.X, q.Y).seven
    if not complex_:
        return t
    t = tuple(complex(x) for x in t)
    if phase:
        z = cmath.exp(1j * rng.uniform(0, 2 * cmath.pi))
        t = act_tuple_word([Theta(((z, 0), (0, 1 / z)))], t, -3)
    return t


def commuting_tuple(seed, kind=None):
    rng = make_rng(seed, "orbit-comm")
    pair = commuting_pair(kind or rng.choice(COMMUTING_KINDS), rng, 3)
    return invariant_tuple(*pair).seven


def _close(p, q, eps):
    return all(abs(complex(x) - complex(y)) <= eps for x, y in zip(p, q))


def test_zero_tuple_needs_no_moves():
    res = normalize_d3(ZERO7)
    assert len(res.word) == 0 and res.residual == 0


def test_two_move_case():
    res = normalize_d3((0, 0, 0, 5, 0, 0, 0))
    assert len(res.word) == 2 and res.residual == 0
    assert res.terminal == ZERO7


def test_calogero_point_tuple():
    res = normalize_d3((2, 0, F(-9, 2), 0, 0, 0, 0))
    assert res.residual < 1e-6 and len(res.word) <= WORD_BOUND_D3
    assert replay(res.word, (2, 0, F(-9, 2), 0, 0, 0, 0), -3) == res.terminal


def test_off_variety_is_refused():
    with pytest.raises(OffVarietyError):
        normalize_d3((1, 0, 0, 0, 0, 0, 0))
    with pytest.raises(OffVarietyError):
        classify_d30((1, 0, 1, 0, 0, 0, 0))


@pytest.mark.parametrize(
    "t",
    [
        (0, 0, 0, 5, 0, 0, 0),
        (0, 0, 0, 0, 0, 0, 7),
        (0, 0, 0, 0, 0, 1, 0),
        (2, 0, F(-9, 2), 0, 0, 0, 0),
    ],
)
def test_mirrored_and_special_points(t):
    for tt in (t, tuple(reversed(t[:3])) + tuple(reversed(t[3:]))):
        if any(eval_id1z(tt).values):
            continue
        res = normalize_d3(tt)
        assert res.residual < 1e-9 and len(res.word) <= WORD_BOUND_D3


@settings(max_examples=40)
@given(seeds)
def test_exact_points_normalize_exactly(seed):
    t = cm_tuple(seed, mix=True, complex_=False)
    res = normalize_d3(t)
    assert len(res.word) <= WORD_BOUND_D3
    assert replay(res.word, t, -3) == tuple(res.terminal) or _close(replay(res.word, t, -3), res.terminal, 1e-9)
    assert _close(res.terminal, ZERO7, 1e-6 + res.error_bound)


@settings(max_examples=40)
@given(seeds)
def test_complex_points_normalize(seed):
    t = cm_tuple(seed)
    res = normalize_d3(t)
    assert res.residual < 1e-6 and len(res.word) <= WORD_BOUND_D3
    assert _close(replay(res.word, t, -3), res.terminal, 10 * DEFAULT_TOL.threshold())


def test_branch_log_names_steps():
    res = normalize_d3(cm_tuple(11))
    assert res.branch_log and all(isinstance(s, str) for s in res.branch_log)


def test_representatives_classify_to_themselves():
    for label in OrbitLabel:
        got, res = classify_d30(representative(label))
        assert got is label
        assert _close(res.terminal, representative(label), 1e-9)


def test_diagonal_commuting_tuple():
    t = (2, 0, F(2, 3), 0, F(2, 3), 0, F(-2, 9))
    label, res = classify_d30(t)
    assert label is OrbitLabel.GENERIC
    assert replay(res.word, t, 0) == tuple(res.terminal) or _close(replay(res.word, t, 0), res.terminal, 1e-9)


@pytest.mark.parametrize(
    "t, label",
    [
        ((0, 0, 0, 0, 0, 0, 0), OrbitLabel.ZERO),
        ((0, 0, 0, 0, 0, 0, 3), OrbitLabel.GENERIC),
        ((0, 0, -6, 0, 0, 0, 0), OrbitLabel.GENERIC),
        ((0, 0, 0, 1, 0, 0, 0), OrbitLabel.GENERIC),
        ((1, 0, 0, 0, 0, 0, 0), OrbitLabel.GENERIC),
    ],
)
def test_hand_built_commuting_tuples(t, label):
    assert not any(eval_id2z(t).values)
    got, res = classify_d30(t)
    assert got is label and len(res.word) <= WORD_BOUND_D30


@pytest.mark.parametrize("kind, labels", [
    ("simultaneous-diagonal", {OrbitLabel.GENERIC, OrbitLabel.SPECIAL}),
    ("polynomial-in-X", {OrbitLabel.GENERIC, OrbitLabel.SPECIAL}),
    ("nilpotent-jordan", {OrbitLabel.ZERO, OrbitLabel.SPECIAL}),
])
def test_commuting_families(kind, labels):
    for k in range(25):
        t = commuting_tuple(k, kind)
        label, res = classify_d30(t)
        assert label in labels
        assert len(res.word) <= WORD_BOUND_D30


def test_nilpotent_block_is_special():
    # X a single Jordan block, Y = X: a double eigenvalue pattern after the shift
    N = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    from cmtrace.numeric import Matrix

    t = invariant_tuple(Matrix(N), Matrix(N) @ Matrix(N)).seven
    assert t == ZERO7
    assert classify_d30(t)[0] is OrbitLabel.ZERO


@settings(max_examples=30)
@given(seeds, st.sampled_from(list(OrbitLabel)), st.integers(1, 3))
def test_labels_constant_on_orbits(seed, label, steps):
    rng = make_rng(seed, "perturb")
    t = tuple(complex(x) for x in representative(label))
    t = act_tuple_word([random_tuple_move(rng) for _ in range(steps)], t, 0)
    try:
        got, _ = classify_d30(t)
    except AmbiguousError:
        pytest.skip("perturbation landed inside the guard band")
    assert got is label


@settings(max_examples=30)
@given(seeds)
def test_commuting_labels_survive_moves(seed):
    rng = make_rng(seed, "perturb-comm")
    t = commuting_tuple(seed)
    before, _ = classify_d30(t)
    moved = act_tuple_word([random_tuple_move(rng) for _ in range(2)], t, 0)
    assert classify_d30(moved)[0] is before


def test_dispatch_error_carries_log():
    err = CaseDispatchError("boom", ["step 1"])
    assert err.branch_log == ["step 1"]


def test_result_json():
    res = normalize_d3((0, 0, 0, 5, 0, 0, 0))
    js = res.to_json()
    assert set(js) == {"word", "terminal", "residual", "error_bound", "branch_log"}
    assert js["terminal"] == ["0"] * 7
