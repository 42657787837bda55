from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import settings

from cmtrace.numeric import Matrix

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-6, max_value=6, max_denominator=5)
small_ints = st.integers(-10, 10)


@st.composite
def rational_matrices(draw, n=3, elems=rationals):
    return Matrix([[draw(elems) for _ in range(n)] for _ in range(n)])


@st.composite
def traceless_matrices(draw, n=3):
    M = draw(rational_matrices(n))
    return M - Matrix.identity(n) * (M.trace() / n)


@st.composite
def invertible_matrices(draw, n=3):
    # unit lower times unit upper: always invertible, stays exact
    lo = [[Fraction(1) if i == j else (draw(small_ints) if i > j else Fraction(0)) for j in range(n)] for i in range(n)]
    up = [[Fraction(1) if i == j else (draw(small_ints) if i < j else Fraction(0)) for j in range(n)] for i in range(n)]
    return Matrix(lo) @ Matrix(up)


@st.composite
def sl2_rational(draw):
    a = draw(st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(lambda x: x != 0))
    b = draw(st.fractions(min_value=-3, max_value=3, max_denominator=3))
    c = draw(st.fractions(min_value=-3, max_value=3, max_denominator=3))
    return ((a, b), (c, (1 + b * c) / a))


seeds = st.integers(0, 2**32 - 1)


def cm_pair(x=(0, 1, 2)):
    """The Calogero pair with X = diag(x) and zero-diagonal Y."""
    n = len(x)
    X = Matrix.diag([Fraction(v) for v in x])
    Y = Matrix([[Fraction(0) if i == j else Fraction(1, x[i] - x[j]) for j in range(n)] for i in range(n)])
    return X, Y


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES, key=lambda s: int(s.split("criterion")[1].split()[0].rstrip(":"))):
            terminalreporter.write_line(line)
