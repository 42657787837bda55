"""Relation polynomials on invariant tuples and the rank stratification.

Tuples here are the seven coordinates ``(a3, ..., a9)``. Residuals are
always "left-hand side minus right-hand side", in a fixed order:

* ``id1z.1..5``: the Calogero-Moser relations (v = -3)
* ``id2z.1..5``: the commuting-variety relations (v = 0)
* ``r.1..5``:   the v-dependent family interpolating the two
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .invariants import invariant_tuple, vw
from .numeric import (
    DEFAULT_TOL,
    Matrix,
    TolerancePolicy,
    commutator,
    encode_scalar,
    rank,
    to_scalar,
)


@dataclass(frozen=True)
class ResidualVector:
    entries: tuple  # of (relation id, residual)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i][1]

    @property
    def values(self) -> tuple:
        return tuple(r for _, r in self.entries)

    def satisfied(self, tol: TolerancePolicy = DEFAULT_TOL, scale: float = 1.0) -> bool:
        return all(tol.is_zero(r, scale) for _, r in self.entries)

    def to_json(self) -> list:
        return [{"id": k, "residual": encode_scalar(r)} for k, r in self.entries]


def _seven(t):
    t = tuple(to_scalar(x) for x in t)
    if len(t) == 9:
        t = t[2:]
    if len(t) != 7:
        raise ValueError(f"expected a 7-tuple (a3..a9), got length {len(t)}")
    return t


def _label(prefix, values):
    return ResidualVector(tuple((f"{prefix}.{i}", x) for i, x in enumerate(values, 1)))


def eval_id1z(t) -> ResidualVector:
    a3, a4, a5, a6, a7, a8, a9 = _seven(t)
    return _label("id1z", (
        a3 * a9 - 2 * a4 * a8 + a5 * a7,
        a5 * a6 - 2 * a4 * a7 + a3 * a8,
        9 * a3 - a3 * a4**2 + a3**2 * a5 + 6 * a6 * a8 - 6 * a7**2,
        9 * a4 - a4**3 + a3 * a4 * a5 + 3 * a6 * a9 - 3 * a7 * a8,
        9 * a5 - a4**2 * a5 + a3 * a5**2 + 6 * a7 * a9 - 6 * a8**2,
    ))


def eval_id2z(t) -> ResidualVector:
    a3, a4, a5, a6, a7, a8, a9 = _seven(t)
    return _label("id2z", (
        a3 * a9 - 2 * a4 * a8 + a5 * a7,
        a5 * a6 - 2 * a4 * a7 + a3 * a8,
        a3**2 * a5 - a3 * a4**2 + 6 * a6 * a8 - 6 * a7**2,
        a3 * a4 * a5 - a4**3 + 3 * a6 * a9 - 3 * a7 * a8,
        a3 * a5**2 - a4**2 * a5 + 6 * a7 * a9 - 6 * a8**2,
    ))


def eval_r(t, v) -> tuple:
    """The five polynomials r1..r5; equal to id1z at v=-3 and id2z at v=0."""
    a3, a4, a5, a6, a7, a8, a9 = _seven(t)
    u = a3 * a5 - a4**2 - 3 * to_scalar(v)
    return (
        (a3 * a9 - a4 * a8) - (a4 * a8 - a5 * a7),
        (a3 * a8 - a4 * a7) - (a4 * a7 - a5 * a6),
        a3 * u + 6 * (a6 * a8 - a7**2),
        a4 * u + 3 * (a6 * a9 - a7 * a8),
        a5 * u + 6 * (a7 * a9 - a8**2),
    )


def r_vector(t, v) -> ResidualVector:
    return _label("r", eval_r(t, v))


def eval_new_relation(t, v, w):
    v, w = to_scalar(v), to_scalar(w)
    a3, a4, a5 = _seven(t)[:3]
    r1, r2, r3, r4, r5 = eval_r(t, v)
    return (
        w**2
        + 4 * v**3 / 27
        - (r3 * r5 - r4**2) / 27
        - (a3 * r1**2 - 2 * a4 * r1 * r2 + a5 * r2**2) / 18
    )


def _old_terms(t, literal: bool):
    a3, a4, a5, a6, a7, a8, a9 = _seven(t)
    u = a3 * a5 - a4**2
    D = (
        a3 * (a7 * a9 - a8**2)
        - a4 * (a6 * a9 - a7 * a8)
        + a5 * (a6 * a8 - a7**2)
    )
    if literal:
        w6 = (a6 * a9 - a8 * a7) ** 2 - 4 * (a6 * a7 - a8**2) * (a6 * a8 - a7**2)
        w3pp = (
            5 * (a5**3 * a6**2 + a3**3 * a9**2)
            - 30 * (a5**2 * a4 * a7 * a9 + a3**2 * a4 * a8 * a9)
            - 2 * (a4**3 + 3 * a3 * a4 * a5) * (9 * a7 * a8 + a6 * a9)
            + 3 * (4 * a5 * a4**2 + a5**2 * a3) * (3 * a7**2 + 2 * a8 * a6)
            + 3 * (4 * a4**2 * a3 + a3**2 * a5) * (3 * a8**2 + 2 * a7 * a9)
        )
    else:
        # discriminant of the binary cubic (a6, a7, a8, a9)
        w6 = (a6 * a9 - a7 * a8) ** 2 - 4 * (a6 * a8 - a7**2) * (a7 * a9 - a8**2)
        # invariant under a3<->a5, a6<->a9, a7<->a8
        w3pp = (
            5 * (a5**3 * a6**2 + a3**3 * a9**2)
            - 30 * (a5**2 * a4 * a6 * a7 + a3**2 * a4 * a8 * a9)
            - 2 * (2 * a4**3 + 3 * a3 * a4 * a5) * (9 * a7 * a8 + a6 * a9)
            + 3 * (4 * a5 * a4**2 + a5**2 * a3) * (3 * a7**2 + 2 * a8 * a6)
            + 3 * (4 * a4**2 * a3 + a3**2 * a5) * (3 * a8**2 + 2 * a7 * a9)
        )
    return u, D, w3pp, w6


def _old(t, v, w, literal):
    v, w = to_scalar(v), to_scalar(w)
    u, D, w3pp, w6 = _old_terms(t, literal)
    return (
        w**2
        - u**3 / 27
        + 2 * u**2 * v / 9
        - 4 * u * D / 15
        - w3pp / 90
        - u * v**2 / 3
        + 2 * v * D / 3
        + w6 / 3
        + 4 * v**3 / 27
    )


def eval_old_relation(t, v, w):
    """The classical degree-12 relation in the w1..w7 basis.

    Uses the corrected ``w3''`` and ``w6`` terms; see
    :func:`eval_old_relation_literal` for the uncorrected transcription.
    """
    return _old(t, v, w, literal=False)


def eval_old_relation_literal(t, v, w):
    """Uncorrected transcription of the classical relation.

    Kept for diagnostics only: it does not vanish on generic matrix pairs.
    """
    return _old(t, v, w, literal=True)


class Stratum(enum.Enum):
    CM = 1
    PRIME = 2
    DOUBLE_PRIME = 3
    COMMUTING = 0


def classify_stratum(X: Matrix, Y: Matrix, tol: TolerancePolicy = DEFAULT_TOL) -> Stratum:
    """Label a 3x3 pair by rank([X,Y] + I).

    Complex pairs whose commutator entries or elimination pivots fall inside
    the tolerance guard band raise :class:`AmbiguousError`.
    """
    if X.n != 3:
        raise ValueError("stratum classification is defined for 3x3 pairs")
    C = commutator(X, Y)
    if C.domain == "rational":
        if all(x == 0 for row in C.rows for x in row):
            return Stratum.COMMUTING
    else:
        s = max(1.0, X.max_abs() * Y.max_abs())
        flags = {tol.classify(x, s, what="commutator entry") for row in C.rows for x in row}
        if flags == {True}:
            return Stratum.COMMUTING
    k = rank(C + 1, tol, strict=True)
    if k == 0:
        raise AssertionError("rank([X,Y] + I) vanished, which is impossible")
    return Stratum(k)


def on_cuspidal_curve(v, w, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    v, w = to_scalar(v), to_scalar(w)
    res = w**2 + 4 * v**3 / 27
    return tol.is_zero(res, max(1.0, abs(v) ** 3))


def check_cprime_criterion(X: Matrix, Y: Matrix, tol: TolerancePolicy = DEFAULT_TOL):
    """Return (rank([X,Y]+I) == 2, 1 + v + w)."""
    if X.n != 3:
        raise ValueError("criterion is defined for 3x3 pairs")
    v, w = vw(X, Y)
    k = rank(commutator(X, Y) + 1, tol, strict=True)
    return k == 2, 1 + v + w


def relations_report(X: Matrix, Y: Matrix) -> ResidualVector:
    """All relation residuals for a concrete pair, keyed like the registry."""
    t = invariant_tuple(X, Y)
    seven = t.seven
    entries = list(eval_id1z(seven)) + list(eval_id2z(seven)) + list(r_vector(seven, t.v))
    entries.append(("rel.old", eval_old_relation(seven, t.v, t.w)))
    entries.append(("rel.new", eval_new_relation(seven, t.v, t.w)))
    return ResidualVector(tuple(entries))


def scaled_tuple(t, alpha):
    """Image of a 9-tuple under (X, Y) -> (alpha X, Y)."""
    a1, a2, a3, a4, a5, a6, a7, a8, a9 = t
    return (alpha * a1, a2, alpha**2 * a3, alpha * a4, a5, alpha**3 * a6, alpha**2 * a7, alpha * a8, a9)


SCALING_WEIGHTS = {"vw": (2, 3), "r": (2, 3, 4, 3, 2)}
