"""Constructive orbit algorithms on 7-tuples (a3, ..., a9).

``normalize_d3`` carries any point of the rank-one commutator tuple variety
(v = -3) to the zero tuple. ``classify_d30`` sorts a point of the commuting
tuple variety (v = 0) into one of three orbits:

    ZERO     the zero tuple
    SPECIAL  (0, 0, 6^(1/3), 0, 0, 0, 1)   double point plus a simple point
    GENERIC  (0, 0, 0, 0, 0, 0, 1)          three distinct points

Every intermediate tuple is recomputed with :func:`act_tuple`; a step is only
accepted when its postcondition holds, so the terminal tuple is by
construction the replay of the returned word. Zero tests on complex values
go through the tolerance guard band, which refuses to branch on values that
are neither clearly zero nor clearly nonzero.
"""
from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .cremona import GroupWord, Move, Theta, act_tuple, act_tuple_majorant, act_tuple_word, shear_x, shear_y
from .numeric import DEFAULT_TOL, AmbiguousError, TolerancePolicy, encode_scalar, to_scalar
from .relations import eval_id1z, eval_id2z

WORD_BOUND_D3 = 16
WORD_BOUND_D30 = 20

_DEGREE = (2, 2, 2, 3, 3, 3, 3)


class OffVarietyError(ValueError):
    pass


class CaseDispatchError(ArithmeticError):
    def __init__(self, msg, branch_log=()):
        super().__init__(msg)
        self.branch_log = list(branch_log)


class OrbitLabel(enum.Enum):
    ZERO = "ZERO"
    SPECIAL = "SPECIAL"
    GENERIC = "GENERIC"


def representative(label: OrbitLabel) -> tuple:
    if label is OrbitLabel.ZERO:
        return (Fraction(0),) * 7
    if label is OrbitLabel.SPECIAL:
        return (0, 0, _cbrt(Fraction(6)), 0, 0, 0, 1)
    return (0, 0, 0, 0, 0, 0, 1)


@dataclass
class NormalizationResult:
    word: GroupWord
    terminal: tuple
    residual: float
    branch_log: list = field(default_factory=list)
    # propagated bound on the floating error of the terminal; 0 when exact
    error_bound: float = 0.0

    def to_json(self) -> dict:
        return {
            "word": self.word.to_json(),
            "terminal": [encode_scalar(x) for x in self.terminal],
            "residual": self.residual,
            "error_bound": self.error_bound,
            "branch_log": list(self.branch_log),
        }


# exact-when-possible radicals ---------------------------------------------------

def _iroot(n: int, k: int):
    if n < 0:
        if k % 2 == 0:
            return None
        r = _iroot(-n, k)
        return None if r is None else -r
    r = round(n ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**k == n:
            return c
    return None


def _root(x, k: int):
    """Some k-th root of x; exact for rational perfect powers, principal otherwise."""
    if isinstance(x, Fraction):
        p, q = _iroot(x.numerator, k), _iroot(x.denominator, k)
        if p is not None and q is not None:
            return Fraction(p, q)
    x = complex(x)
    if x == 0:
        return 0j
    return cmath.exp(cmath.log(x) / k)


def _sqrt(x):
    return _root(x, 2)


def _cbrt(x):
    return _root(x, 3)


# the stepping machinery ------------------------------------------------------------

def _tuple_scale(t) -> float:
    rho = max((abs(x) ** (1.0 / d) for x, d in zip(t, _DEGREE)), default=0.0)
    return max(1.0, rho)


_UNIT = 2.0**-52
_SAFETY = 2.0
_INPUT_ROUNDING = 16.0


def _is_exact(x) -> bool:
    return isinstance(x, Fraction)


def _propagate(moves, t, err, v):
    """Push the tuple and its error bounds through a list of moves.

    The bound is first order: with F the tuple action with absolute-valued
    coefficients, an input error e moves the image by at most
    F(|t| + e) - F(|t|), and rounding adds a few units of F(|t| + e).
    """
    exact = all(_is_exact(x) for x in t) and not any(err)
    for mv in moves:
        coeffs = mv.m[0] + mv.m[1] if isinstance(mv, Theta) else mv.coeffs
        exact = exact and all(_is_exact(c) for c in coeffs)
        if not exact:
            mag = tuple(float(abs(x)) for x in t)
            hi = act_tuple_majorant(mv, tuple(m + e for m, e in zip(mag, err)), v)
            lo = act_tuple_majorant(mv, mag, v)
            err = tuple(max(0.0, h - l) + 8 * _UNIT * h for h, l in zip(hi, lo))
        t = act_tuple(mv, t, v)
    return t, err


class _Walker:
    """Current tuple plus the word and branch log that produced it.

    ``err`` bounds the error of each coordinate. Complex inputs start with
    relative uncertainty ``tol.rel_eps`` plus a rounding floor scaled to the
    whole tuple; exact inputs start (and stay, until a radical appears) at
    zero. A coordinate is zero when it is below
    ``abs_eps + SAFETY * err`` and nonzero above ``guard`` times that.
    """

    def __init__(self, t, v, tol: TolerancePolicy, err=None):
        self.t = t
        self.v = v
        self.tol = tol
        if err is None:
            # floating inputs carry relative noise plus a rounding floor at the
            # tuple's own scale: a small coordinate produced by cancellation is
            # only as accurate as the large terms it came from
            rho = _tuple_scale(t)
            err = tuple(
                0.0 if _is_exact(x) else (tol.rel_eps + _UNIT) * abs(x) + _INPUT_ROUNDING * _UNIT * rho**d
                for x, d in zip(t, _DEGREE)
            )
        self.err = err
        self.word: list[Move] = []
        self.log: list[str] = []

    def a(self, i: int):
        return self.t[i - 3]

    def _threshold(self, err: float) -> float:
        return self.tol.abs_eps + _SAFETY * err

    def zero(self, i: int) -> bool:
        """Guard-band zero test for coordinate a_i."""
        return self.value_is_zero(self.a(i), self.err[i - 3], f"a{i}")

    def value_is_zero(self, x, err: float, what: str) -> bool:
        if _is_exact(x) and err == 0:
            return x == 0
        thr = self._threshold(err)
        if abs(x) <= thr:
            return True
        if abs(x) > self.tol.guard * thr:
            return False
        raise AmbiguousError(f"{what} = {x!r} is within the guard band of zero (threshold {thr:.3g})")

    def forced_zero(self, i: int) -> bool:
        """Consistency check for a coordinate the relations force to vanish.

        Nothing branches on it, so only a clearly nonzero value counts as a
        violation; the guard band is not a refusal here.
        """
        x, err = self.a(i), self.err[i - 3]
        if _is_exact(x) and err == 0:
            return x == 0
        return abs(x) <= self.tol.guard * self._threshold(err)

    def all_zero(self, idx=range(3, 10)) -> bool:
        return all(self.zero(i) for i in idx)

    def near(self, target) -> bool:
        return all(abs(x - y) <= self._threshold(e) for x, y, e in zip(self.t, target, self.err))

    def try_moves(self, label: str, candidates, post, param_err=None) -> None:
        """Apply the first candidate move list whose result satisfies ``post``.

        ``param_err(t)`` adds the uncertainty that comes from computing the
        move's parameters out of noisy coordinates.
        """
        tried = []
        for k, moves in enumerate(candidates):
            t, err = _propagate(moves, self.t, self.err, self.v)
            if param_err is not None:
                err = tuple(e + p for e, p in zip(err, param_err(t)))
            trial = _Walker(t, self.v, self.tol, err)
            try:
                ok = post(trial)
            except ArithmeticError:
                ok = False
            tag = label if k == 0 else f"{label} [branch {k}]"
            if ok:
                self.t, self.err = t, err
                self.word.extend(moves)
                self.log.append(tag)
                return
            tried.append(tag)
        self.log.extend(f"{x}: postcondition failed" for x in tried)
        raise CaseDispatchError(f"no branch satisfied the postcondition of {label!r}", self.log)

    def result(self, target) -> NormalizationResult:
        res = max((abs(x - y) for x, y in zip(self.t, target)), default=0.0)
        return NormalizationResult(
            GroupWord(self.word), tuple(self.t), float(res), list(self.log), float(max(self.err, default=0.0))
        )


def _coerce(t) -> tuple:
    t = tuple(to_scalar(x) for x in t)
    if len(t) == 9:
        t = t[2:]
    if len(t) != 7:
        raise ValueError(f"expected a 7-tuple (a3..a9), got length {len(t)}")
    return t


def _check_on_variety(t, residuals, name: str, tol: TolerancePolicy) -> None:
    s = _tuple_scale(t) ** 6
    bad = [(k, r) for k, r in residuals if not tol.is_zero(r, s)]
    if bad:
        raise OffVarietyError(f"input is not on {name}: " + ", ".join(f"{k} = {r}" for k, r in bad))


# shared steps -----------------------------------------------------------------------

def _clear_a3(w: _Walker) -> None:
    """Make a3 = 0 with a single Theta move."""
    if w.zero(3):
        return
    if w.zero(5):
        w.try_moves("a3!=0, a5=0: swap Theta", [[Theta(((0, 1), (-1, 1)))]], lambda u: u.zero(3))
        return
    a3, a4, a5 = w.a(3), w.a(4), w.a(5)
    e3, e4, e5 = w.err[:3]
    disc = a4 * a4 - a3 * a5
    disc_err = 2 * abs(a4) * e4 + abs(a3) * e5 + abs(a5) * e3
    if not all(map(_is_exact, (a3, a4, a5))):
        disc_err += 4 * _UNIT * (abs(a4) ** 2 + abs(a3 * a5))
    # a double root: the square root would turn rounding noise into half-precision error
    root = 0 if w.value_is_zero(disc, disc_err, "a4^2 - a3 a5") else _sqrt(disc)
    cands = []
    for r in (root, -root):
        den = a4 + r
        den_err = e4 + (disc_err / abs(r) if r != 0 else 0.0)
        if abs(den) <= w._threshold(den_err):
            continue
        alpha = -a5 / den
        cands.append([Theta(((alpha, 1), (0, 1 / alpha)))])
    w.try_moves("a3!=0, a5!=0: Theta((alpha, 1), (0, 1/alpha))", cands, lambda u: u.zero(3))


def _kill_a9(w: _Walker, label: str) -> None:
    """Y -> Y + s X^2 removing a9 on tuples with a3 = a6 = a7 = 0."""
    a4 = w.a(4)
    if w.zero(4):
        den = w.v
    else:
        den = a4 * a4 + w.v
        if abs(den) <= w._threshold(2 * abs(a4) * w.err[1]):
            den = 0
    if den == 0:
        raise CaseDispatchError(f"{label}: a4^2 + v vanishes", w.log)
    w.try_moves(label, [[shear_y(-w.a(9) / den)]], lambda u: u.zero(9))


# rank-one commutator variety ---------------------------------------------------------

_PARAM_SCAN = (1, 2, -1, 3, Fraction(1, 2), -2, 5, Fraction(-1, 3), 7, 11)


def _make_a7_nonzero_d3(w: _Walker) -> bool:
    """From a3 = a7 = 0 reach a3 = 0, a7 != 0. Returns True if the zero tuple was hit."""
    if not w.zero(8):
        w.log.append("a7=0, a8!=0")
        _kill_a9(w, "Y += s X^2 kills a9")

        def spread(u):
            return not (u.zero(3) or u.zero(5) or u.zero(8))

        w.try_moves("X += s Y^2 makes a3 a5 a8 nonzero", [[shear_x(s)] for s in _PARAM_SCAN], spread)
        # isotropic first row (p, 1) of the quadratic form, free second row
        b3, b4, b5 = w.a(3), w.a(4), w.a(5)
        root = _sqrt(b4 * b4 - b3 * b5)
        ps = [(-b4 + r) / b3 for r in (root, -root)]
        cands = [[Theta(((p, 1), (p * d - 1, d)))] for p in ps for d in (0, 1, -1, 2)]
        w.try_moves("Theta with isotropic first row", cands, lambda u: u.zero(3) and not u.zero(7))
        return False
    if not w.zero(6):
        w.log.append("a7=a8=0, a6!=0")
        a4, a6 = w.a(4), w.a(6)
        w.try_moves("Y += (-a4/a6) X^2", [[shear_y(-a4 / a6)]], lambda u: u.all_zero((3, 4, 5, 7, 8, 9)))
        # X += s Y^2 acts on a6 the way Y += s X^2 acts on a9
        w.try_moves("X += (a6/3) Y^2 reaches zero", [[shear_x(-w.a(6) / w.v)]], lambda u: u.all_zero())
        return True
    w.log.append("a6=a7=a8=0")
    _kill_a9(w, "Y += s X^2 kills a9")
    if w.all_zero():
        return True
    if w.zero(5):
        w.log.append("a5=0, a4=+-3")
        w.try_moves(
            "X += Y^2 then Theta((1, 0), (1, 1))",
            [[shear_x(1), Theta(((1, 0), (1, 1)))]],
            lambda u: u.zero(3) and not u.zero(7),
        )
        return False
    w.log.append("a5!=0, a4=+-3")
    sign = 1 if (w.a(4).real if isinstance(w.a(4), complex) else w.a(4)) > 0 else -1
    a5 = w.a(5)
    q = -sign * a5 / 6
    w.try_moves(
        "Y += X^2 then Theta((-+a5/6, 1), (-1-+a5/6, 1))",
        [[shear_y(1), Theta(((q, 1), (-1 + q, 1)))]],
        lambda u: u.zero(3) and not u.zero(7),
    )
    return False


def _finish_d3(w: _Walker) -> None:
    """a3 = 0 and a7 != 0 down to the zero tuple."""
    if not w.zero(5):
        w.try_moves(
            "Y += (-a5/(2 a7)) X^2",
            [[shear_y(-w.a(5) / (2 * w.a(7)))]],
            lambda u: u.all_zero((3, 4, 5)),
        )
    elif not w.forced_zero(4):
        raise CaseDispatchError("a5 = 0 but a4 != 0 contradicts the relations", w.log)
    rho = w.a(8) / w.a(7)
    w.try_moves(
        "Theta((-a8/a7, 1), (-1-a8/a7, 1))",
        [[Theta(((-rho, 1), (-1 - rho, 1)))]],
        lambda u: u.all_zero(range(3, 9)),
    )
    _kill_a9(w, "Y += (a9/3) X^2 reaches zero")


def normalize_d3(t, tol: TolerancePolicy = DEFAULT_TOL) -> NormalizationResult:
    """Explicit word carrying a point of the v = -3 tuple variety to zero."""
    t = _coerce(t)
    _check_on_variety(t, eval_id1z(t), "the v = -3 variety", tol)
    w = _Walker(t, Fraction(-3), tol)
    zero = (0,) * 7
    if w.all_zero():
        return w.result(zero)
    _clear_a3(w)
    done = False
    if w.zero(7):
        done = _make_a7_nonzero_d3(w)
    if not done:
        _finish_d3(w)
    if not w.near(zero):
        raise CaseDispatchError("terminal tuple is not zero", w.log)
    if len(w.word) > WORD_BOUND_D3:
        raise CaseDispatchError(f"word length {len(w.word)} exceeds {WORD_BOUND_D3}", w.log)
    return w.result(zero)


# commuting variety -----------------------------------------------------------------

def _make_a7_nonzero_d30(w: _Walker):
    """From a3 = a7 = 0 reach a3 = 0, a7 != 0, or stop at the special representative."""
    if not w.forced_zero(8):
        raise CaseDispatchError("a3 = a7 = 0 forces a8 = 0 on the commuting variety", w.log)
    if not w.zero(6):
        w.log.append("a7=a8=0, a6!=0")
        w.try_moves(
            "Y += (-a4/a6) X^2",
            [[shear_y(-w.a(4) / w.a(6))]],
            lambda u: u.all_zero((3, 4, 5, 7, 8, 9)),
        )
        w.try_moves("Theta((1, -1), (1, 0))", [[Theta(((1, -1), (1, 0)))]], lambda u: u.zero(3) and not u.zero(7))
        return None
    if not w.forced_zero(4):
        raise CaseDispatchError("a6 = 0 forces a4 = 0 on the commuting variety", w.log)
    z5, z9 = w.zero(5), w.zero(9)
    shear = Theta(((1, 1), (0, 1)))
    if z5 and not z9:
        w.log.append("only a9 nonzero")
        w.try_moves("Theta((1, 1), (0, 1))", [[shear]], lambda u: u.zero(3) and not u.zero(7))
        return None
    if z9 and not z5:
        w.log.append("only a5 nonzero")
        s = _sqrt(-6 / w.a(5))
        w.try_moves(
            "Theta((1, 1), (0, 1)) then X += sqrt(-6/a5) Y^2",
            [[shear, shear_x(s)], [shear, shear_x(-s)]],
            lambda u: u.zero(3) and not u.zero(7),
        )
        return None
    a5, a9 = w.a(5), w.a(9)
    special = a5**3 - 6 * a9**2
    e5, e9 = w.err[2], w.err[6]
    special_err = 3 * abs(a5) ** 2 * e5 + 12 * abs(a9) * e9
    if not (_is_exact(a5) and _is_exact(a9)):
        special_err += 4 * _UNIT * (abs(a5) ** 3 + 6 * abs(a9) ** 2)
    if w.value_is_zero(special, special_err, "a5^3 - 6 a9^2"):
        w.log.append("a5^3 = 6 a9^2: special orbit")
        lam = _cbrt(Fraction(6)) * a9 / a5
        rel_lam = e9 / abs(a9) + e5 / abs(a5) + 4 * _UNIT
        rep = representative(OrbitLabel.SPECIAL)
        # coordinate i scales like lambda^k for these k
        powers = (2, 0, 2, 3, 1, 1, 3)
        w.try_moves(
            "Theta(diag(lambda, 1/lambda))",
            [[Theta(((lam, 0), (0, 1 / lam)))]],
            lambda u: u.near(rep),
            param_err=lambda t: tuple(k * rel_lam * abs(x) for k, x in zip(powers, t)),
        )
        return OrbitLabel.SPECIAL
    w.log.append("a5, a9 nonzero, a5^3 != 6 a9^2")
    cands = []
    for s in _PARAM_SCAN:
        t, err = _propagate([shear, shear_y(s)], w.t, w.err, w.v)
        b3, b4, b5 = t[:3]
        if abs(b5) <= w._threshold(err[2]):
            continue
        root = _sqrt(b4 * b4 - b3 * b5)
        for r in (root, -root):
            beta = (-b4 + r) / b5
            cands.append([shear, shear_y(s), Theta(((1, beta), (0, 1)))])
    w.try_moves(
        "Theta((1, 1), (0, 1)), Y += s X^2, X += beta Y",
        cands,
        lambda u: u.zero(3) and not u.zero(7),
    )
    return None


def _finish_d30(w: _Walker) -> None:
    """a3 = 0 and a7 != 0 up to (0, 0, 0, 0, 0, 0, 1)."""
    if not w.zero(5):
        w.try_moves(
            "Y += (-b5/(2 b7)) X^2",
            [[shear_y(-w.a(5) / (2 * w.a(7)))]],
            lambda u: u.all_zero((3, 4, 5)),
        )
    elif not w.forced_zero(4):
        raise CaseDispatchError("b5 = 0 but b4 != 0 contradicts the relations", w.log)
    b6, b7, b8 = w.a(6), w.a(7), w.a(8)
    rho = b8 / b7
    c0 = _cbrt(b6)
    roots = [c0] + ([c0 * cmath.exp(2j * cmath.pi * k / 3) for k in (1, 2)] if isinstance(c0, complex) else [])
    target = representative(OrbitLabel.GENERIC)
    w.try_moves(
        "Theta((rho c, -c), ((1+rho)/c, -1/c)), c = b6^(1/3)",
        [[Theta(((rho * c, -c), ((1 + rho) / c, -1 / c)))] for c in roots],
        lambda u: u.near(target),
    )


def classify_d30(t, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[OrbitLabel, NormalizationResult]:
    """Orbit label of a point on the v = 0 tuple variety, with a certifying word."""
    t = _coerce(t)
    _check_on_variety(t, eval_id2z(t), "the v = 0 variety", tol)
    w = _Walker(t, Fraction(0), tol)
    if w.all_zero():
        w.log.append("zero tuple")
        return OrbitLabel.ZERO, w.result(representative(OrbitLabel.ZERO))
    _clear_a3(w)
    label = None
    if w.zero(7):
        label = _make_a7_nonzero_d30(w)
    if label is None:
        _finish_d30(w)
        label = OrbitLabel.GENERIC
    if len(w.word) > WORD_BOUND_D30:
        raise CaseDispatchError(f"word length {len(w.word)} exceeds {WORD_BOUND_D30}", w.log)
    return label, w.result(representative(label))


def replay(word, t, v) -> tuple:
    """Fold the tuple action over ``word``; the soundness check for results above."""
    return act_tuple_word(word, _coerce(t), v)
