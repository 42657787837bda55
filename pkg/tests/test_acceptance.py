"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run ``python3 tests/test_acceptance.py`` for the lines alone; under pytest
they are echoed in the terminal summary.
"""
import cmath
import time
from fractions import Fraction as F


from cmtrace.cremona import Theta, act_tuple_word, consistency_check, random_tuple_move
from cmtrace.invariants import invariant_tuple
from cmtrace.numeric import AmbiguousError, DEFAULT_TOL, commutator, rank
from cmtrace.orbits import (
    WORD_BOUND_D3,
    WORD_BOUND_D30,
    OrbitLabel,
    classify_d30,
    normalize_d3,
    replay,
    representative,
)
from cmtrace.registry import run_suite
from cmtrace.relations import eval_id1z, eval_id2z, eval_new_relation, eval_old_relation, eval_r
from cmtrace.sampler import COMMUTING_KINDS, commuting_pair, generic_pair, make_rng, random_cm, random_rational, rank_k_pair

SEED = 20240601
RESIDUAL_TOL = 1e-6
REPLAY_TOL = 10 * DEFAULT_TOL.threshold()
RUNTIME_BUDGET_S = 60.0

LINES = []


def record(num, ok, summary):
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {summary}")
    assert ok, LINES[-1]


def suite_failures(ids, trials, n=None):
    reps = run_suite(ids, trials, SEED, n=n)
    return sum(r.trials for r in reps), [r.to_json(timing=False) for r in reps if not r.passed]


def test_relation_equivalence():
    t0 = time.perf_counter()
    bad = 0
    for k in range(1000):
        X, Y = generic_pair(make_rng(SEED, "c1", k))
        t = invariant_tuple(X, Y)
        old, new = eval_old_relation(t.seven, t.v, t.w), eval_new_relation(t.seven, t.v, t.w)
        bad += not (old == new == 0)
    dt = time.perf_counter() - t0
    record(1, bad == 0 and dt < RUNTIME_BUDGET_S,
           f"old/new defining relations agree and vanish on 1000 integer pairs; failures={bad}, {dt:.1f}s (budget {RUNTIME_BUDGET_S:.0f}s)")


def test_calogero_relations():
    bad = 0
    for k in range(200):
        q = random_cm(make_rng(SEED, "c2", k), 3, mix=False)
        t = invariant_tuple(q.X, q.Y)
        ok = (all(x == 0 for x in eval_id1z(t.seven).values) and (t.v, t.w) == (-3, 2)
              and rank(commutator(q.X, q.Y) + 1) == 1)
        bad += not ok
    record(2, bad == 0, f"five rank-one relations, v=-3, w=2, rank([X,Y]+I)=1 on 200 exact points; failures={bad}")


def test_general_n_identities():
    trials = 0
    bad = []
    for n in range(2, 7):
        t, b = suite_failures(["eq2.2", "eq2.3", "eq2.4", "eq2.5", "eq2.6"], 50, n)
        trials, bad = trials + t, bad + b
    t, b = suite_failures(["eq2.7", "eq2.8", "eq2.9", "eq2.10"], 50, 3)
    trials, bad = trials + t, bad + b
    record(3, not bad, f"general-n trace identities, n=2..6 (and n=3 for the n-dependent constants); {trials} trials, failing ids={[x['id'] for x in bad]}")


def test_trace_reductions():
    t1, b1 = suite_failures(["lemma2.2.a"], 500)
    t2, b2 = suite_failures(["lemma2.2.b"], 200)
    record(4, not (b1 or b2), f"five unconditional reductions ({t1} traceless pairs) and two rank-one reductions ({t2} points); failures={len(b1 + b2)}")


def test_sextic_traces():
    trials, bad = suite_failures(["eq3.1", "eq3.2"], 200, 3)
    record(5, not bad, f"tr(A^4B^2) and tr(A^3BAB) closed forms on rank-one points; {trials} trials, failures={len(bad)}")


def test_commuting_relations():
    bad = 0
    for k in range(200):
        kind = COMMUTING_KINDS[k % 3]
        X, Y = commuting_pair(kind, make_rng(SEED, "c6", k), 3)
        bad += any(x != 0 for x in eval_id2z(invariant_tuple(X, Y).seven).values)
    record(6, bad == 0, f"five commuting relations on 200 pairs across {len(COMMUTING_KINDS)} families; failures={bad}")


def test_rank_two_line():
    bad = 0
    for k in range(100):
        t = invariant_tuple(*rank_k_pair(2, make_rng(SEED, "c7", k)))
        bad += 1 + t.v + t.w != 0
    record(7, bad == 0, f"1+v+w=0 on 100 constructed rank-two pairs; failures={bad}")


def test_action_consistency():
    reps = [consistency_check(None, fam, 200, SEED) for fam in ("cm", "commuting")]
    fails = {r.id: r.failures for r in reps}
    record(8, all(r.passed for r in reps), f"tuple vs matrix action, 200 random (witness, move) per stratum, exact; failures={fails}")


def _phase_rotated_cm_tuple(k):
    rng = make_rng(SEED, "c9", k)
    q = random_cm(rng, 3, mix=False)
    t = tuple(complex(x) for x in invariant_tuple(q.X, q.Y).seven)
    z = cmath.exp(1j * rng.uniform(0, 2 * cmath.pi))
    return act_tuple_word([Theta(((z, 0), (0, 1 / z)))], t, -3)


def test_transitivity():
    worst_res, longest, bad = 0.0, 0, 0
    for k in range(200):
        t = _phase_rotated_cm_tuple(k)
        try:
            res = normalize_d3(t)
        except (ArithmeticError, ValueError):
            bad += 1
            continue
        back = replay(res.word, t, -3)
        sound = all(abs(complex(a) - complex(b)) <= REPLAY_TOL for a, b in zip(back, res.terminal))
        worst_res, longest = max(worst_res, res.residual), max(longest, len(res.word))
        bad += not (sound and res.residual < RESIDUAL_TOL and len(res.word) <= WORD_BOUND_D3)
    record(9, bad == 0, f"200 complex rank-one tuples driven to zero; worst residual={worst_res:.1e} (<{RESIDUAL_TOL:g}), longest word={longest} (<={WORD_BOUND_D3}), failures={bad}")


def test_transitivity_on_sheared_witnesses():
    """Not a criterion: the same run on conjugated and sheared witnesses.

    Residuals here are absolute, and these inputs reach large magnitudes
    where the normal form is ill-conditioned. Replay, word length and
    "residual within the reported error bound" are asserted; the residual
    spread itself is only reported.
    """
    residuals, refused, unsound = [], 0, 0
    for k in range(200):
        rng = make_rng(SEED, "c9-mixed", k)
        q = random_cm(rng, 3, mix=True)
        t = tuple(complex(x) for x in invariant_tuple(q.X, q.Y).seven)
        try:
            res = normalize_d3(t)
        except (ArithmeticError, ValueError):
            refused += 1
            continue
        back = replay(res.word, t, -3)
        unsound += not all(abs(complex(a) - complex(b)) <= REPLAY_TOL for a, b in zip(back, res.terminal))
        unsound += len(res.word) > WORD_BOUND_D3
        # the reported bound must cover what went wrong
        unsound += res.residual > max(RESIDUAL_TOL, res.error_bound)
        residuals.append(res.residual)
    over = sum(r >= RESIDUAL_TOL for r in residuals)
    LINES.append(
        f"[INFO] criterion  9 (sheared witnesses, report only): {len(residuals)} normalized, {refused} refused, "
        f"{over} with residual >= {RESIDUAL_TOL:g}, worst={max(residuals):.1e}, all within their reported error bound"
    )
    assert unsound == 0


def test_orbit_classification():
    bad = []
    for label in OrbitLabel:
        if classify_d30(representative(label))[0] is not label:
            bad.append(f"{label.name} fixed")
        for k in range(100):
            rng = make_rng(SEED, "c10", label.name, k)
            t = tuple(complex(x) for x in representative(label))
            t = act_tuple_word([random_tuple_move(rng) for _ in range(rng.randint(1, 3))], t, 0)
            try:
                got, res = classify_d30(t)
            except (ArithmeticError, ValueError) as e:
                bad.append(f"{label.name}#{k}: {type(e).__name__}")
                continue
            if got is not label or len(res.word) > WORD_BOUND_D30:
                bad.append(f"{label.name}#{k}: {got.name}")
    ambiguous = 0
    for k in range(150):
        X, Y = commuting_pair(COMMUTING_KINDS[k % 3], make_rng(SEED, "c10-pairs", k), 3)
        try:
            classify_d30(invariant_tuple(X, Y).seven)
        except AmbiguousError:
            ambiguous += 1
    record(10, not bad and ambiguous == 0,
           f"representatives fixed, 300 perturbations keep their label, 150 commuting pairs unambiguous; mismatches={bad[:5]}, ambiguous={ambiguous}")


def test_scaling_equivariance():
    weights = (1, 0, 2, 1, 0, 3, 2, 1, 0)
    r_weights = (2, 3, 4, 3, 2)
    bad = 0
    for k in range(100):
        rng = make_rng(SEED, "c11", k)
        X, Y = generic_pair(rng)
        alpha = F(0)
        while alpha == 0:
            alpha = random_rational(rng, -5, 5, (1, 2, 3, 7))
        s, t = invariant_tuple(X * alpha, Y), invariant_tuple(X, Y)
        ok = s.a == tuple(alpha**e * x for e, x in zip(weights, t.a))
        ok &= (s.v, s.w) == (alpha**2 * t.v, alpha**3 * t.w)
        ok &= eval_r(s.seven, s.v) == tuple(alpha**e * x for e, x in zip(r_weights, eval_r(t.seven, t.v)))
        bad += not ok
    record(11, bad == 0, f"tuple, (v,w), r1..r5 carry their alpha-weights exactly on 100 scaled pairs; failures={bad}")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(LINES))
