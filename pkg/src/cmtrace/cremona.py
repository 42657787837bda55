"""Triangular (Cremona) moves on matrix pairs and on invariant 7-tuples.

Matrix level::

    Phi(p):   (X, Y) -> (X + p(Y), Y)
    Psi(q):   (X, Y) -> (X, Y + q(X))
    Theta(M): (X, Y) -> (aX + bY, cX + dY),  M = [[a, b], [c, d]] in SL2

Tuple level acts on ``(a3, ..., a9)`` with a1 = a2 = 0 and needs the
commutator invariant ``v`` of the pair. Only moves of degree at most two
without constant term have a closed form there. ``Psi`` with ``q = s x^2``
fixes a3 and a6 (it only changes the second matrix); ``Phi`` with
``p = s y^2`` is its mirror image under swapping the two matrices.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .invariants import invariant_tuple
from .numeric import DEFAULT_TOL, Matrix, TolerancePolicy, decode_scalar, encode_scalar, to_scalar
from .sampler import IdentityReport, commuting_pair, make_rng, random_cm, random_rational, COMMUTING_KINDS


class UnsupportedMoveError(ValueError):
    pass


def _trim(coeffs) -> tuple:
    c = [to_scalar(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Phi:
    """X -> X + p(Y); coefficients lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    def inverse(self) -> "Phi":
        return Phi(tuple(-c for c in self.coeffs))

    def to_json(self) -> dict:
        return {"phi": [encode_scalar(c) for c in self.coeffs]}


@dataclass(frozen=True)
class Psi:
    """Y -> Y + q(X); coefficients lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    def inverse(self) -> "Psi":
        return Psi(tuple(-c for c in self.coeffs))

    def to_json(self) -> dict:
        return {"psi": [encode_scalar(c) for c in self.coeffs]}


@dataclass(frozen=True)
class Theta:
    """(X, Y) -> (aX + bY, cX + dY) for M = ((a, b), (c, d)) with det M = 1."""

    m: tuple
    tol: TolerancePolicy = DEFAULT_TOL

    def __post_init__(self):
        (a, b), (c, d) = self.m
        m = ((to_scalar(a), to_scalar(b)), (to_scalar(c), to_scalar(d)))
        object.__setattr__(self, "m", m)
        dt = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        scale = max(1.0, max(abs(x) for row in m for x in row) ** 2)
        if not self.tol.is_zero(dt - 1, scale):
            raise ValueError(f"Theta needs det M = 1, got {dt!r}")

    def __eq__(self, other):
        return isinstance(other, Theta) and self.m == other.m

    def __hash__(self):
        return hash(self.m)

    def inverse(self) -> "Theta":
        (a, b), (c, d) = self.m
        return Theta(((d, -b), (-c, a)), self.tol)

    def __matmul__(self, other: "Theta") -> "Theta":
        """Composite move: apply ``other`` first, then ``self``."""
        (a, b), (c, d) = self.m
        (e, f), (g, h) = other.m
        return Theta(((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)), self.tol)

    def to_json(self) -> dict:
        return {"theta": [[encode_scalar(x) for x in row] for row in self.m]}


Move = Union[Phi, Psi, Theta]


def shear_x(s) -> Phi:
    """X -> X + s Y^2."""
    return Phi((0, 0, s))


def shear_y(s) -> Psi:
    """Y -> Y + s X^2."""
    return Psi((0, 0, s))


class GroupWord(tuple):
    """Sequence of moves applied left to right."""

    def __new__(cls, moves: Iterable[Move] = ()):
        return super().__new__(cls, tuple(moves))

    def inverse(self) -> "GroupWord":
        return GroupWord(m.inverse() for m in reversed(self))

    def __add__(self, other):
        return GroupWord(tuple(self) + tuple(other))

    def to_json(self) -> list:
        return [m.to_json() for m in self]

    @classmethod
    def from_json(cls, obj: Sequence[dict]) -> "GroupWord":
        moves = []
        for item in obj:
            if not isinstance(item, dict) or len(item) != 1:
                raise ValueError(f"each move must be a one-key object, got {item!r}")
            (kind, val), = item.items()
            if kind == "phi":
                moves.append(Phi(tuple(decode_scalar(c) for c in val)))
            elif kind == "psi":
                moves.append(Psi(tuple(decode_scalar(c) for c in val)))
            elif kind == "theta":
                moves.append(Theta(tuple(tuple(decode_scalar(x) for x in row) for row in val)))
            else:
                raise ValueError(f"unknown move kind {kind!r}")
        return cls(moves)


# matrix level -----------------------------------------------------------------

def _poly(M: Matrix, coeffs) -> Matrix:
    out = Matrix.zeros(M.n, M.domain)
    power = Matrix.identity(M.n, M.domain)
    for k, c in enumerate(coeffs):
        if k:
            power = power @ M
        if c != 0:
            out = out + power * c
    return out


def apply_move(move: Move, pair: tuple[Matrix, Matrix]) -> tuple[Matrix, Matrix]:
    X, Y = pair
    X._check(Y)
    if isinstance(move, Phi):
        return X + _poly(Y, move.coeffs), Y
    if isinstance(move, Psi):
        return X, Y + _poly(X, move.coeffs)
    if isinstance(move, Theta):
        (a, b), (c, d) = move.m
        return X * a + Y * b, X * c + Y * d
    raise TypeError(f"not a move: {move!r}")


def act_matrices(word: Iterable[Move], pair: tuple[Matrix, Matrix]) -> tuple[Matrix, Matrix]:
    X, Y = pair
    X._check(Y)
    for move in word:
        pair = apply_move(move, pair)
    return pair


# tuple level ------------------------------------------------------------------

def mirror(t) -> tuple:
    """Swap the roles of the two matrices: a3<->a5, a6<->a9, a7<->a8."""
    a3, a4, a5, a6, a7, a8, a9 = t
    return (a5, a4, a3, a9, a8, a7, a6)


def theta_tuple(m, t) -> tuple:
    """Quadratic and cubic forms (a3,a4,a5), (a6..a9) under (X,Y) -> (aX+bY, cX+dY)."""
    (al, be), (ga, de) = m
    a3, a4, a5, a6, a7, a8, a9 = t
    return (
        al**2 * a3 + 2 * al * be * a4 + be**2 * a5,
        al * ga * a3 + (al * de + be * ga) * a4 + be * de * a5,
        ga**2 * a3 + 2 * ga * de * a4 + de**2 * a5,
        al**3 * a6 + 3 * al**2 * be * a7 + 3 * al * be**2 * a8 + be**3 * a9,
        al**2 * ga * a6 + (2 * al * be * ga + al**2 * de) * a7 + (be**2 * ga + 2 * al * be * de) * a8 + be**2 * de * a9,
        al * ga**2 * a6 + (2 * al * de * ga + ga**2 * be) * a7 + (de**2 * al + 2 * ga * be * de) * a8 + be * de**2 * a9,
        ga**3 * a6 + 3 * ga**2 * de * a7 + 3 * ga * de**2 * a8 + de**3 * a9,
    )


def shear_y_tuple(s, t, v) -> tuple:
    """Y -> Y + s X^2 on (a3..a9), with a1 = 0."""
    a3, a4, a5, a6, a7, a8, a9 = t
    return (
        a3,
        a4 + s * a6,
        a5 + 2 * s * a7 + s**2 * a3**2 / 6,
        a6,
        a7 + s * a3**2 / 6,
        a8 + s * a3 * a4 / 3 + s**2 * a3 * a6 / 6,
        a9
        + s * (a4**2 - a3 * a5 / 2 + v)
        + s**2 * (a4 * a6 - a3 * a7 / 2)
        + s**3 * (a6**2 / 3 - a3**3 / 36),
    )


def shear_x_tuple(s, t, v) -> tuple:
    """X -> X + s Y^2 on (a3..a9), with a2 = 0."""
    return mirror(shear_y_tuple(s, mirror(t), v))


def _coerce7(t) -> tuple:
    t = tuple(to_scalar(x) for x in t)
    if len(t) != 7:
        raise ValueError(f"expected a 7-tuple (a3..a9), got length {len(t)}")
    return t


def act_tuple(move: Move, t, v) -> tuple:
    """Image of (a3..a9) under one move, for a pair with commutator invariant v."""
    t = _coerce7(t)
    v = to_scalar(v)
    if isinstance(move, Theta):
        return theta_tuple(move.m, t)
    if isinstance(move, (Phi, Psi)):
        c = move.coeffs + (0,) * (3 - len(move.coeffs))
        if len(move.coeffs) > 3:
            raise UnsupportedMoveError("tuple-level action is only available up to degree 2")
        if c[0] != 0:
            raise UnsupportedMoveError("constant shifts change a1/a2, which 7-tuples do not track")
        if isinstance(move, Phi):
            if c[1] != 0:
                t = theta_tuple(((1, c[1]), (0, 1)), t)
            if c[2] != 0:
                t = shear_x_tuple(c[2], t, v)
        else:
            if c[1] != 0:
                t = theta_tuple(((1, 0), (c[1], 1)), t)
            if c[2] != 0:
                t = shear_y_tuple(c[2], t, v)
        return t
    raise TypeError(f"not a move: {move!r}")


def act_tuple_word(word: Iterable[Move], t, v) -> tuple:
    for move in word:
        t = act_tuple(move, t, v)
    return _coerce7(t)


def _shear_y_majorant(s, t, v) -> tuple:
    a3, a4, a5, a6, a7, a8, a9 = t
    return (
        a3,
        a4 + s * a6,
        a5 + 2 * s * a7 + s**2 * a3**2 / 6,
        a6,
        a7 + s * a3**2 / 6,
        a8 + s * a3 * a4 / 3 + s**2 * a3 * a6 / 6,
        a9 + s * (a4**2 + a3 * a5 / 2 + v) + s**2 * (a4 * a6 + a3 * a7 / 2) + s**3 * (a6**2 / 3 + a3**3 / 36),
    )


def act_tuple_majorant(move: Move, t, v) -> tuple:
    """The tuple action with every coefficient replaced by its absolute value.

    For nonnegative ``t`` and error bounds ``e`` the difference
    ``F(t + e) - F(t)`` bounds how far an input error ``e`` can move the
    image; orbit code uses this to size its zero tests.
    """
    v = abs(v)
    if isinstance(move, Theta):
        return theta_tuple([[abs(x) for x in row] for row in move.m], t)
    c = tuple(abs(x) for x in move.coeffs) + (0,) * 3
    if isinstance(move, Phi):
        t = theta_tuple(((1, c[1]), (0, 1)), t)
        return mirror(_shear_y_majorant(c[2], mirror(t), v))
    t = theta_tuple(((1, 0), (c[1], 1)), t)
    return _shear_y_majorant(c[2], t, v)


def kill_traces(pair: tuple[Matrix, Matrix]) -> GroupWord:
    """Constant moves sending (a1, a2) to (0, 0)."""
    X, Y = pair
    n = X.n
    return GroupWord([Phi((-X.trace() / n,)), Psi((-Y.trace() / n,))])


# two-level consistency ----------------------------------------------------------

def random_tuple_move(rng, kinds=("theta", "shear_x", "shear_y")) -> Move:
    kind = rng.choice(kinds)
    if kind == "theta":
        a = random_rational(rng, -3, 3, (1, 2))
        while a == 0:
            a = random_rational(rng, -3, 3, (1, 2))
        b, c = random_rational(rng, -3, 3), random_rational(rng, -3, 3)
        return Theta(((a, b), (c, (1 + b * c) / a)))
    s = random_rational(rng, -3, 3, (1, 2, 3))
    return shear_x(s) if kind == "shear_x" else shear_y(s)


def _witness(family: str, rng):
    if family == "cm":
        q = random_cm(rng, 3)
        return (q.X, q.Y), Fraction(-3)
    if family == "commuting":
        return commuting_pair(rng.choice(COMMUTING_KINDS), rng, 3), Fraction(0)
    raise ValueError(f"unknown family {family!r}")


def _close(p, q, tol: TolerancePolicy) -> bool:
    if all(isinstance(x, Fraction) for x in (*p, *q)):
        return tuple(p) == tuple(q)
    scale = max([1.0] + [abs(x) for x in (*p, *q)])
    return all(tol.is_zero(x - y, scale) for x, y in zip(p, q))


def consistency_check(
    move: Move | None,
    family: str = "cm",
    trials: int = 200,
    seed=0,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> IdentityReport:
    """Compare the tuple formulas against the matrix action on exact witnesses.

    Witness pairs are first shifted to traceless form (the constant moves),
    then ``move`` (or a fresh random Theta / quadratic shear per trial when
    ``move`` is None) is applied at both levels.
    """
    rep = IdentityReport(f"consistency.{family}")
    t0 = time.perf_counter()
    for k in range(trials):
        rng = make_rng(seed, "consistency", family, k)
        pair, v = _witness(family, rng)
        pair = act_matrices(kill_traces(pair), pair)
        mv = move if move is not None else random_tuple_move(rng)
        before = invariant_tuple(*pair)
        if before.v != v and all(isinstance(x, Fraction) for x in pair[0].rows[0]):
            raise AssertionError(f"witness has v = {before.v}, expected {v}")
        via_tuple = act_tuple(mv, before.seven, before.v)
        via_matrix = invariant_tuple(*act_matrices([mv], pair)).seven
        rep.trials += 1
        if not _close(via_tuple, via_matrix, tol):
            rep.failures += 1
            if rep.witness is None:
                rep.witness = {
                    "trial": k,
                    "move": mv.to_json(),
                    "tuple": [encode_scalar(x) for x in before.seven],
                    "via_tuple": [encode_scalar(x) for x in via_tuple],
                    "via_matrix": [encode_scalar(x) for x in via_matrix],
                }
    rep.elapsed = time.perf_counter() - t0
    return rep
