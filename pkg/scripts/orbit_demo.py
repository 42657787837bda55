"""Walk a few points to their orbit normal forms and print the words.

    python3 scripts/orbit_demo.py
"""
import cmath
from fractions import Fraction

from cmtrace.cremona import Theta, act_tuple_word
from cmtrace.invariants import invariant_tuple
from cmtrace.orbits import classify_d30, normalize_d3, replay
from cmtrace.sampler import COMMUTING_KINDS, commuting_pair, make_rng, random_cm


def show(title, t, v, res, label=None):
    print(title)
    print("  input   ", [complex(x) if isinstance(x, complex) else str(x) for x in t])
    if label is not None:
        print("  label   ", label.name)
    for move in res.word:
        print(f"  {move.to_json()}")
    print("  steps   ", "; ".join(res.branch_log))
    back = replay(res.word, t, v)
    gap = max(abs(complex(a) - complex(b)) for a, b in zip(back, res.terminal))
    print(f"  residual {res.residual:.2e}  error bound {res.error_bound:.2e}  replay gap {gap:.1e}")
    print()


def main():
    t = (2, 0, Fraction(-9, 2), 0, 0, 0, 0)
    show("rank-one point x = (0, 1, 2), exact", t, -3, normalize_d3(t))

    rng = make_rng(1, "demo")
    q = random_cm(rng, 3, mix=False)
    z = cmath.exp(0.7j)
    t = act_tuple_word([Theta(((z, 0), (0, 1 / z)))], [complex(x) for x in invariant_tuple(q.X, q.Y).seven], -3)
    show("random rank-one point, complex", t, -3, normalize_d3(t))

    for kind in COMMUTING_KINDS:
        X, Y = commuting_pair(kind, make_rng(3, kind), 3)
        t = invariant_tuple(X, Y).seven
        label, res = classify_d30(t)
        show(f"commuting pair ({kind})", t, 0, res, label)


if __name__ == "__main__":
    main()
