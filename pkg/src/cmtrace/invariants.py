"""Trace invariants of a matrix pair under simultaneous conjugation."""
from __future__ import annotations

from dataclasses import dataclass, fields

from .numeric import (
    DEFAULT_TOL,
    Matrix,
    TolerancePolicy,
    commutator,
    decode_scalar,
    encode_scalar,
    trace_word,
)


@dataclass(frozen=True)
class InvariantTuple:
    """Generators a1..a9 and the two commutator invariants v, w.

    a1, a2 are the traces of X, Y; a3..a9 are tr(A^2), tr(AB), tr(B^2),
    tr(A^3), tr(A^2B), tr(AB^2), tr(B^3) for the traceless parts A, B.
    """

    a: tuple
    v: object = None
    w: object = None

    def __post_init__(self):
        if len(self.a) != 9:
            raise ValueError(f"expected 9 generators, got {len(self.a)}")

    def __getitem__(self, i: int):
        """1-based access, ``t[3]`` is a3."""
        return self.a[i - 1]

    @property
    def seven(self) -> tuple:
        return tuple(self.a[2:])

    def to_json(self) -> dict:
        out = {"a": [encode_scalar(x) for x in self.a]}
        if self.v is not None:
            out["v"] = encode_scalar(self.v)
            out["w"] = encode_scalar(self.w)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "InvariantTuple":
        a = tuple(decode_scalar(x) for x in obj["a"])
        v = decode_scalar(obj["v"]) if "v" in obj else None
        w = decode_scalar(obj["w"]) if "w" in obj else None
        return cls(a, v, w)


@dataclass(frozen=True)
class AuxTraces:
    A3B: object
    AB3: object
    A3B2: object
    A2B3: object
    A3B3: object
    A2B2: object
    ABAB: object
    A4B2: object
    A3BAB: object
    A2BA2B: object
    A2B2AB: object
    A2BAB2: object
    ABABAB: object

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def traceless_pair(X: Matrix, Y: Matrix) -> tuple[Matrix, Matrix]:
    X._check(Y)
    n = X.n
    return X - X.trace() / n, Y - Y.trace() / n


def vw(X: Matrix, Y: Matrix):
    """v = -tr([X,Y]^2)/2 and w = tr([X,Y]^3)/3."""
    C = commutator(X, Y)
    C2 = C @ C
    t2 = C2.trace()
    t3 = (C2 @ C).trace()
    return -t2 / 2, t3 / 3


def invariant_tuple(X: Matrix, Y: Matrix) -> InvariantTuple:
    A, B = traceless_pair(X, Y)
    A2 = A @ A
    B2 = B @ B
    a = (
        X.trace(),
        Y.trace(),
        A2.trace(),
        (A @ B).trace(),
        B2.trace(),
        (A2 @ A).trace(),
        (A2 @ B).trace(),
        (A @ B2).trace(),
        (B2 @ B).trace(),
    )
    v, w = vw(A, B)
    return InvariantTuple(a, v, w)


_AUX_WORDS = {
    "A3B": "AAAB",
    "AB3": "ABBB",
    "A3B2": "AAABB",
    "A2B3": "AABBB",
    "A3B3": "AAABBB",
    "A2B2": "AABB",
    "ABAB": "ABAB",
    "A4B2": "AAAABB",
    "A3BAB": "AAABAB",
    "A2BA2B": "AABAAB",
    "A2B2AB": "AABBAB",
    "A2BAB2": "AABABB",
    "ABABAB": "ABABAB",
}


def aux_traces(A: Matrix, B: Matrix, tol: TolerancePolicy = DEFAULT_TOL) -> AuxTraces:
    """Brute-force traces of the auxiliary words; inputs must be traceless."""
    for name, M in (("A", A), ("B", B)):
        if not tol.is_zero(M.trace(), max(1.0, M.max_abs())):
            raise ValueError(f"{name} is not traceless (trace {M.trace()!r})")
    return AuxTraces(**{k: trace_word(w, (A, B)) for k, w in _AUX_WORDS.items()})
