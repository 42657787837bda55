"""Scalars, small dense matrices and trace words.

Two scalar domains are supported: exact rationals (``fractions.Fraction``)
and complex floats. A matrix holds entries of one domain only. Exact
matrices never consult a tolerance; complex ones go through a
:class:`TolerancePolicy` for every zero test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

RATIONAL = "rational"
COMPLEX = "complex"


class DimensionError(ValueError):
    pass


class DomainError(TypeError):
    pass


class AmbiguousError(ArithmeticError):
    """A complex quantity fell inside the guard band between zero and nonzero."""


def to_scalar(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError("booleans are not scalars")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, complex)):
        return complex(x)
    raise DomainError(f"unsupported scalar {x!r}")


def domain_of(x) -> str:
    return COMPLEX if isinstance(x, complex) else RATIONAL


@dataclass(frozen=True)
class TolerancePolicy:
    """Zero test for complex scalars: ``|z| <= abs_eps + rel_eps * scale``.

    ``guard`` widens the test into three bands: below the threshold is zero,
    above ``guard`` times the threshold is nonzero, and anything between is
    reported as ambiguous by :meth:`classify`.
    """

    abs_eps: float = 1e-9
    rel_eps: float = 1e-9
    guard: float = 10.0

    def __post_init__(self):
        if self.abs_eps < 0 or self.rel_eps < 0:
            raise ValueError("tolerances must be non-negative")

    def threshold(self, scale: float = 1.0) -> float:
        return self.abs_eps + self.rel_eps * scale

    def is_zero(self, z, scale: float = 1.0) -> bool:
        if isinstance(z, Fraction):
            return z == 0
        return abs(z) <= self.threshold(scale)

    def classify(self, z, scale: float = 1.0, what: str = "value") -> bool:
        """Return True for zero, False for nonzero; raise inside the guard band."""
        if isinstance(z, Fraction):
            return z == 0
        t = self.threshold(scale)
        if abs(z) <= t:
            return True
        if abs(z) > self.guard * t:
            return False
        raise AmbiguousError(f"{what} = {z!r} is within the guard band of zero (threshold {t:.3g})")


EXACT = TolerancePolicy(0.0, 0.0)
DEFAULT_TOL = TolerancePolicy()


class Matrix:
    """Immutable square matrix over a single scalar domain."""

    __slots__ = ("rows", "n", "domain")

    def __init__(self, rows: Iterable[Iterable], domain: str | None = None):
        rows = tuple(tuple(to_scalar(x) for x in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionError("matrix must be square and non-empty")
        doms = {domain_of(x) for r in rows for x in r}
        if domain is None:
            domain = COMPLEX if COMPLEX in doms else RATIONAL
        if domain == COMPLEX:
            rows = tuple(tuple(complex(x) for x in r) for r in rows)
        elif COMPLEX in doms:
            raise DomainError("complex entry in a rational matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, key, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def _raw(cls, rows, n, domain):
        m = object.__new__(cls)
        object.__setattr__(m, "rows", rows)
        object.__setattr__(m, "n", n)
        object.__setattr__(m, "domain", domain)
        return m

    @classmethod
    def identity(cls, n: int, domain: str = RATIONAL) -> "Matrix":
        one, zero = (Fraction(1), Fraction(0)) if domain == RATIONAL else (1 + 0j, 0j)
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n, domain)

    @classmethod
    def zeros(cls, n: int, domain: str = RATIONAL) -> "Matrix":
        zero = Fraction(0) if domain == RATIONAL else 0j
        return cls._raw(tuple((zero,) * n for _ in range(n)), n, domain)

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        vals = [to_scalar(x) for x in values]
        n = len(vals)
        dom = COMPLEX if any(isinstance(x, complex) for x in vals) else RATIONAL
        zero = Fraction(0) if dom == RATIONAL else 0j
        return cls([[vals[i] if i == j else zero for j in range(n)] for i in range(n)], dom)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.rows]!r})"

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        if other.domain != self.domain:
            raise DomainError(f"mixed scalar domains: {self.domain} vs {other.domain}")

    def _scalar(self, c):
        c = to_scalar(c)
        if self.domain == RATIONAL and isinstance(c, complex):
            raise DomainError("complex scalar times rational matrix")
        return complex(c) if self.domain == COMPLEX else c

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return self + self.identity(self.n, self.domain) * other
        self._check(other)
        return Matrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.n, self.domain
        )

    __radd__ = __add__

    def __neg__(self):
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self.rows), self.n, self.domain)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return self @ c
        c = self._scalar(c)
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self.rows), self.n, self.domain)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = self._scalar(c)
        return self * (1 / c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        cols = tuple(zip(*other.rows))
        return Matrix._raw(
            tuple(tuple(sum(a * b for a, b in zip(r, col)) for col in cols) for r in self.rows), self.n, self.domain
        )

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = self.identity(self.n, self.domain)
        for _ in range(k):
            out = out @ self
        return out

    def trace(self):
        return sum(self.rows[i][i] for i in range(self.n))

    def transpose(self) -> "Matrix":
        return Matrix._raw(tuple(zip(*self.rows)), self.n, self.domain)

    def to_complex(self) -> "Matrix":
        return Matrix(self.rows, COMPLEX)

    def max_abs(self) -> float:
        return max(abs(x) for r in self.rows for x in r)

    def is_zero(self, tol: TolerancePolicy = DEFAULT_TOL, scale: float = 1.0) -> bool:
        return all(tol.is_zero(x, scale) for r in self.rows for x in r)

    def inverse(self) -> "Matrix":
        """Gauss-Jordan inverse; exact for rational matrices."""
        n = self.n
        aug = [list(r) + [Fraction(int(i == j)) if self.domain == RATIONAL else complex(i == j) for j in range(n)]
               for i, r in enumerate(self.rows)]
        for col in range(n):
            if self.domain == RATIONAL:
                piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
            else:
                piv = max(range(col, n), key=lambda i: abs(aug[i][col]))
                if aug[piv][col] == 0:
                    piv = None
            if piv is None:
                raise ZeroDivisionError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col][col]
            aug[col] = [x / p for x in aug[col]]
            for i in range(n):
                if i != col and aug[i][col] != 0:
                    f = aug[i][col]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
        return Matrix([r[n:] for r in aug], self.domain)


def _check_pair(X: Matrix, Y: Matrix):
    X._check(Y)


def outer(c: Sequence, r: Sequence) -> Matrix:
    return Matrix([[ci * rj for rj in r] for ci in c])


def mat_vec(M: Matrix, c: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, c)) for row in M.rows]


def vec_mat(r: Sequence, M: Matrix) -> list:
    return [sum(r[i] * M.rows[i][j] for i in range(M.n)) for j in range(M.n)]


def dot(r: Sequence, c: Sequence):
    return sum(a * b for a, b in zip(r, c))


FIRST, SECOND = 0, 1


def _letters(word) -> list[int]:
    if isinstance(word, str):
        table = {"X": 0, "A": 0, "0": 0, "Y": 1, "B": 1, "1": 1}
        try:
            return [table[ch] for ch in word.upper()]
        except KeyError as e:
            raise ValueError(f"bad letter {e.args[0]!r} in word {word!r}") from None
    return [int(w) for w in word]


def word_product(word, pair: tuple[Matrix, Matrix]) -> Matrix:
    X, Y = pair
    _check_pair(X, Y)
    letters = _letters(word)
    if not letters:
        raise ValueError("trace word must be non-empty")
    mats = (X, Y)
    out = mats[letters[0]]
    for k in letters[1:]:
        out = out @ mats[k]
    return out


def trace_word(word, pair: tuple[Matrix, Matrix]):
    """tr(Z1...Zk) with Zi taken from ``pair`` by the letters of ``word``.

    ``word`` is a sequence over {FIRST, SECOND} or a string over {X,Y} / {A,B}.
    """
    return word_product(word, pair).trace()


def commutator(X: Matrix, Y: Matrix) -> Matrix:
    _check_pair(X, Y)
    return X @ Y - Y @ X


def _integer_rows(M: Matrix) -> tuple[list[list[int]], Fraction]:
    """Scale each row to integers; returns rows and the product of the scale factors."""
    rows, scale = [], Fraction(1)
    for r in M.rows:
        m = math.lcm(*(x.denominator for x in r))
        rows.append([int(x * m) for x in r])
        scale *= m
    return rows, scale


def _bareiss(rows: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination in place; returns (rank, signed last pivot)."""
    n = len(rows)
    ncols = len(rows[0])
    prev, sign, rank = 1, 1, 0
    for col in range(ncols):
        piv = next((i for i in range(rank, n) if rows[i][col] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
            sign = -sign
        p = rows[rank][col]
        for i in range(rank + 1, n):
            rows[i] = [(p * rows[i][j] - rows[i][col] * rows[rank][j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
    return rank, sign * prev


def rank(M: Matrix, tol: TolerancePolicy = DEFAULT_TOL, strict: bool = False) -> int:
    """Matrix rank.

    Exact matrices use fraction-free elimination. Complex matrices use
    partial pivoting; a pivot counts when it exceeds the policy threshold
    relative to the largest entry. With ``strict`` a pivot inside the guard
    band raises :class:`AmbiguousError`.
    """
    if M.domain == RATIONAL:
        rows, _ = _integer_rows(M)
        return _bareiss(rows)[0]
    a = [list(r) for r in M.rows]
    n = M.n
    scale = M.max_abs()
    r = 0
    for col in range(n):
        if r == n:
            break
        piv = max(range(r, n), key=lambda i: abs(a[i][col]))
        p = a[piv][col]
        if strict:
            if tol.classify(p, scale, what=f"pivot in column {col}"):
                continue
        elif tol.is_zero(p, scale):
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, n):
            f = a[i][col] / p
            a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


def det(M: Matrix):
    if M.domain == RATIONAL:
        rows, scale = _integer_rows(M)
        n = M.n
        rk, d = _bareiss(rows)
        return Fraction(0) if rk < n else Fraction(d) / scale
    a = [list(r) for r in M.rows]
    n = M.n
    out = 1 + 0j
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(a[i][col]))
        if a[piv][col] == 0:
            return 0j
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            out = -out
        p = a[col][col]
        out *= p
        for i in range(col + 1, n):
            f = a[i][col] / p
            a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return out


# JSON codecs ---------------------------------------------------------------

def encode_scalar(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    x = complex(x)
    return [x.real, x.imag]


def decode_scalar(obj, domain: str | None = None):
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise ValueError(f"complex scalar must be [re, im], got {obj!r}")
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(obj, (int, str)):
        q = Fraction(obj)
        return complex(q) if domain == COMPLEX else q
    if isinstance(obj, float):
        return complex(obj)
    raise ValueError(f"cannot decode scalar {obj!r}")


def encode_matrix(M: Matrix) -> dict:
    return {"domain": M.domain, "n": M.n, "entries": [[encode_scalar(x) for x in r] for r in M.rows]}


def decode_matrix(obj: dict) -> Matrix:
    try:
        domain = obj.get("domain", RATIONAL)
        entries = obj["entries"]
    except (AttributeError, KeyError):
        raise ValueError("matrix JSON needs 'entries'") from None
    if domain not in (RATIONAL, COMPLEX):
        raise ValueError(f"unknown domain {domain!r}")
    M = Matrix([[decode_scalar(x, domain) for x in r] for r in entries], domain)
    if "n" in obj and obj["n"] != M.n:
        raise DimensionError(f"declared n={obj['n']} but entries are {M.n}x{M.n}")
    return M
