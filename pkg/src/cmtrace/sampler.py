"""Exact rational witnesses for every stratum, plus the identity-suite engine.

All constructions are exact: points are built so that the defining equation
holds by design rather than found by rejection sampling.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .numeric import Matrix, dot, encode_matrix, encode_scalar, mat_vec, outer, rank, vec_mat, commutator

CM_KINDS = ("cm", "commuting", "rank2", "rank3")
COMMUTING_KINDS = ("simultaneous-diagonal", "polynomial-in-X", "nilpotent-jordan")


@dataclass(frozen=True)
class CMQuadruple:
    """(X, Y, c, r) with XY - YX + I = c r."""

    X: Matrix
    Y: Matrix
    c: tuple
    r: tuple

    @property
    def n(self) -> int:
        return self.X.n

    def check(self) -> bool:
        return commutator(self.X, self.Y) + 1 == outer(self.c, self.r) and dot(self.r, self.c) == self.n

    def to_json(self) -> dict:
        return {
            "X": encode_matrix(self.X),
            "Y": encode_matrix(self.Y),
            "c": [encode_scalar(x) for x in self.c],
            "r": [encode_scalar(x) for x in self.r],
        }


def make_rng(seed, *keys) -> random.Random:
    """Independent stream per (seed, keys); string seeding is stable across runs."""
    return random.Random("/".join(str(k) for k in (seed, *keys)))


def _as_rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return make_rng(seed_or_rng)


def random_rational(rng: random.Random, lo: int = -6, hi: int = 6, denoms: Sequence[int] = (1, 1, 1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(denoms))


def cm_point(x: Sequence, y_diag: Sequence) -> CMQuadruple:
    """Rank-one commutator point with X = diag(x), Y_ij = 1/(x_i - x_j)."""
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y_diag]
    n = len(x)
    if len(y) != n:
        raise ValueError("x and y_diag must have the same length")
    if len(set(x)) != n:
        raise ValueError("x entries must be pairwise distinct")
    X = Matrix.diag(x)
    Y = Matrix([[y[i] if i == j else 1 / (x[i] - x[j]) for j in range(n)] for i in range(n)])
    one = Fraction(1)
    return CMQuadruple(X, Y, (one,) * n, (one,) * n)


def random_unimodular(rng: random.Random, n: int, steps: int = 3) -> Matrix:
    """Product of a few elementary matrices; determinant 1, small integer entries."""
    g = Matrix.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        k = rng.choice((-2, -1, 1, 2))
        rows = [list(r) for r in Matrix.identity(n).rows]
        rows[i][j] = Fraction(k)
        g = g @ Matrix(rows)
    return g


def conjugate_quadruple(q: CMQuadruple, g: Matrix) -> CMQuadruple:
    gi = g.inverse()
    return CMQuadruple(g @ q.X @ gi, g @ q.Y @ gi, tuple(mat_vec(g, q.c)), tuple(vec_mat(q.r, gi)))


def _poly_of(M: Matrix, coeffs: Sequence) -> Matrix:
    out = Matrix.zeros(M.n, M.domain)
    power = Matrix.identity(M.n, M.domain)
    for k, a in enumerate(coeffs):
        if k:
            power = power @ M
        if a:
            out = out + power * a
    return out


def random_cm(seed_or_rng, n: int = 3, mix: bool = True) -> CMQuadruple:
    """Random exact point of the rank-one commutator variety.

    With ``mix`` the diagonal construction is conjugated by a unimodular
    matrix and sheared by a random triangular move, so X need not be
    diagonal (or even diagonalizable).
    """
    rng = _as_rng(seed_or_rng)
    pool = sorted({random_rational(rng, -8, 8) for _ in range(4 * n)})
    while len(pool) < n:
        pool.append(pool[-1] + 1)
    x = rng.sample(pool, n)
    y = [random_rational(rng) for _ in range(n)]
    q = cm_point(x, y)
    if not mix:
        return q
    X, Y = q.X, q.Y
    if rng.random() < 0.5:
        X = X + _poly_of(Y, [0, random_rational(rng, -2, 2), random_rational(rng, -1, 1, (1, 2))])
    if rng.random() < 0.5:
        Y = Y + _poly_of(X, [random_rational(rng, -2, 2), random_rational(rng, -2, 2), random_rational(rng, -1, 1, (1, 2))])
    q = CMQuadruple(X, Y, q.c, q.r)
    return conjugate_quadruple(q, random_unimodular(rng, n))


def _conj(pair, g: Matrix):
    gi = g.inverse()
    return tuple(g @ M @ gi for M in pair)


def commuting_pair(kind: str, seed_or_rng, n: int = 3) -> tuple[Matrix, Matrix]:
    """Exact commuting pair from one of three families.

    simultaneous-diagonal
        both diagonal in a common (random) basis
    polynomial-in-X
        X random integer matrix, Y a polynomial in X
    nilpotent-jordan
        X = lambda I + N with N a Jordan block (or a derogatory E12), Y in the
        centralizer of X
    """
    rng = _as_rng(seed_or_rng)
    if kind == "simultaneous-diagonal":
        x = [random_rational(rng) for _ in range(n)]
        y = [random_rational(rng) for _ in range(n)]
        if rng.random() < 0.25:
            y[1] = y[0]
            x[1] = x[0]
        return _conj((Matrix.diag(x), Matrix.diag(y)), random_unimodular(rng, n))
    if kind == "polynomial-in-X":
        X = Matrix([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        coeffs = [random_rational(rng, -3, 3) for _ in range(3)]
        return X, _poly_of(X, coeffs)
    if kind == "nilpotent-jordan":
        lam = random_rational(rng, -3, 3)
        if n == 3 and rng.random() < 0.4:
            N = Matrix([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
            a, b, e, f, c = (random_rational(rng, -3, 3) for _ in range(5))
            Y = Matrix([[a, b, e], [0, a, 0], [0, f, c]])
        else:
            N = Matrix([[int(j == i + 1) for j in range(n)] for i in range(n)])
            Y = _poly_of(N, [random_rational(rng, -3, 3) for _ in range(n)])
        X = N + lam
        return _conj((X, Y), random_unimodular(rng, n))
    raise ValueError(f"unknown commuting family {kind!r}; expected one of {COMMUTING_KINDS}")


class ConstructionError(RuntimeError):
    pass


def rank_k_pair(k: int, seed_or_rng, max_tries: int = 100) -> tuple[Matrix, Matrix]:
    """3x3 pair with rank([X,Y] + I) = k, for k in {2, 3}.

    X is diagonal with distinct entries and Y_ij = Z_ij / (x_i - x_j) for a
    hollow matrix Z, so [X,Y] + I = I + Z. For k = 2 the first two rows of
    I + Z coincide.
    """
    if k not in (2, 3):
        raise ValueError("k must be 2 or 3")
    rng = _as_rng(seed_or_rng)
    for _ in range(max_tries):
        x = rng.sample(range(-6, 7), 3)
        x = [Fraction(v, rng.choice((1, 2))) for v in x]
        if len(set(x)) < 3:
            continue
        if k == 2:
            p, q, s = (random_rational(rng, -4, 4) for _ in range(3))
            Z = [[0, 1, p], [1, 0, p], [q, s, 0]]
        else:
            Z = [[0 if i == j else random_rational(rng, -4, 4) for j in range(3)] for i in range(3)]
        IZ = Matrix([[Z[i][j] + (i == j) for j in range(3)] for i in range(3)])
        if rank(IZ) != k:
            continue
        X = Matrix.diag(x)
        Y = Matrix([[random_rational(rng) if i == j else Fraction(Z[i][j]) / (x[i] - x[j]) for j in range(3)] for i in range(3)])
        if rank(commutator(X, Y) + 1) != k:
            raise ConstructionError("commutator rank does not match the prescribed target")
        return _conj((X, Y), random_unimodular(rng, 3))
    raise ConstructionError(f"no rank-{k} matrix found in {max_tries} tries")


def generic_pair(seed_or_rng, n: int = 3, lo: int = -10, hi: int = 10) -> tuple[Matrix, Matrix]:
    rng = _as_rng(seed_or_rng)
    return tuple(Matrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]) for _ in range(2))


@dataclass
class IdentityReport:
    id: str
    trials: int = 0
    failures: int = 0
    witness: dict | None = None
    elapsed: float = 0.0
    detail: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def merge(self, other: "IdentityReport") -> "IdentityReport":
        if other.id != self.id:
            raise ValueError("cannot merge reports for different identities")
        return IdentityReport(
            self.id,
            self.trials + other.trials,
            self.failures + other.failures,
            self.witness if self.witness is not None else other.witness,
            self.elapsed + other.elapsed,
            self.detail or other.detail,
        )

    def to_json(self, timing: bool = True) -> dict:
        out = {"id": self.id, "trials": self.trials, "failures": self.failures, "witness": self.witness}
        if self.detail:
            out["detail"] = self.detail
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        return out


def run_identity_suite(ids, trials: int = 200, seed=0, workers: int = 1, n: int | None = None) -> list[IdentityReport]:
    """Evaluate registered identities on fresh exact witnesses.

    See :mod:`cmtrace.registry` for the registry format. Reports come back
    sorted by identity id.
    """
    from .registry import run_suite

    return run_suite(ids, trials, seed, workers, n)

