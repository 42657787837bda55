"""Data-driven identity registry.

Each entry of ``data/identities.json`` names a witness family, the matrix
sizes it is checked at, and a list of ``[lhs, rhs]`` expression pairs. An
expression is a small arithmetic language evaluated exactly over
``Fraction``; the names available depend on the family:

every family
    ``n``, ``I``, ``tr(word)``, ``mat(word)``, ``det(M)``, ``rank(M)`` where a
    word is a string over ``X Y A B C`` (``C`` is the commutator [A, B])
pairs of size 3
    ``a1``..``a9``, ``v``, ``w``, ``id1z(i)``, ``id2z(i)``, ``r(i)``,
    ``rel_old``, ``rel_new``
``cm``
    ``c``/``r`` via ``rc(word)`` (the scalar r·word·c) and ``CR`` (the matrix c r)
``tuple``
    a random 7-tuple ``a3``..``a9`` with a random ``v``; ``rv(i, s)`` is r_i at v = s
``scaling``
    ``alpha`` and the primed invariants ``sa1``..``sa9``, ``sv``, ``sw``,
    ``sr1``..``sr5`` of the pair (alpha X, Y)
"""
from __future__ import annotations

import ast
import json
import operator
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from . import relations as rel
from .invariants import invariant_tuple, traceless_pair
from .numeric import Matrix, commutator, det, dot, encode_matrix, encode_scalar, outer, rank
from .sampler import (
    COMMUTING_KINDS,
    IdentityReport,
    commuting_pair,
    generic_pair,
    make_rng,
    random_cm,
    random_rational,
    rank_k_pair,
)


class UnknownIdentityError(KeyError):
    pass


@lru_cache(maxsize=None)
def load_registry() -> dict:
    raw = json.loads(resources.files("cmtrace").joinpath("data/identities.json").read_text())
    entries = {}
    for e in raw["identities"]:
        if e["id"] in entries:
            raise ValueError(f"duplicate identity id {e['id']}")
        entries[e["id"]] = e
    return {"version": raw["version"], "identities": entries}


def identity_ids() -> list[str]:
    return sorted(load_registry()["identities"])


def get_entry(identity_id: str) -> dict:
    try:
        return load_registry()["identities"][identity_id]
    except KeyError:
        raise UnknownIdentityError(identity_id) from None


# expression evaluation -------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


@lru_cache(maxsize=None)
def _parse(expr: str) -> ast.AST:
    return ast.parse(expr, mode="eval").body


def evaluate(expr: str, env: dict):
    """Evaluate an arithmetic expression with integer literals read as Fractions."""

    def ev(node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool):
                raise ValueError("booleans not allowed")
            if isinstance(node.value, int):
                return Fraction(node.value)
            if isinstance(node.value, str):
                return node.value
            raise ValueError(f"literal {node.value!r} not allowed")
        if isinstance(node, ast.Name):
            try:
                return env[node.id]
            except KeyError:
                raise NameError(f"name {node.id!r} is not defined for this family") from None
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow):
                right = int(right)
            if isinstance(node.op, ast.Mult) and isinstance(left, str):
                return left * int(right)
            return _BINOPS[type(node.op)](left, right)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            x = ev(node.operand)
            return -x if isinstance(node.op, ast.USub) else x
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            fn = env.get(node.func.id)
            if not callable(fn):
                raise NameError(f"function {node.func.id!r} is not defined for this family")
            return fn(*(ev(a) for a in node.args))
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    return ev(_parse(expr))


def _is_zero(x) -> bool:
    if isinstance(x, Matrix):
        return all(e == 0 for row in x.rows for e in row)
    return x == 0


# witness environments --------------------------------------------------------

def _word_env(mats: dict, n: int) -> dict:
    cache = {}

    def mat(word):
        if word not in cache:
            if not word:
                raise ValueError("empty word")
            out = mats[word[0]]
            for ch in word[1:]:
                out = out @ mats[ch]
            cache[word] = out
        return cache[word]

    return {
        "n": Fraction(n),
        "I": Matrix.identity(n),
        "mat": mat,
        "tr": lambda word: mat(word).trace(),
        "det": det,
        "rank": lambda M: Fraction(rank(M)),
    }


def _tuple_env(t9, v, w) -> dict:
    seven = t9[2:]
    env = {f"a{i}": t9[i - 1] for i in range(1, 10)}
    rs = rel.eval_r(seven, v)
    env.update(
        v=v,
        w=w,
        id1z=lambda i: rel.eval_id1z(seven)[int(i) - 1],
        id2z=lambda i: rel.eval_id2z(seven)[int(i) - 1],
        r=lambda i: rs[int(i) - 1],
        rel_old=rel.eval_old_relation(seven, v, w),
        rel_new=rel.eval_new_relation(seven, v, w),
    )
    return env


def _pair_env(X: Matrix, Y: Matrix) -> dict:
    A, B = traceless_pair(X, Y)
    mats = {"X": X, "Y": Y, "A": A, "B": B, "C": commutator(A, B)}
    env = _word_env(mats, X.n)
    if X.n == 3:
        t = invariant_tuple(X, Y)
        env.update(_tuple_env(t.a, t.v, t.w))
    return env


def _witness(family: str, rng, n: int):
    """Returns (env, serialized witness)."""
    if family == "cm":
        q = random_cm(rng, n)
        env = _pair_env(q.X, q.Y)
        c, r = q.c, q.r
        M = env["mat"]
        env["rc"] = lambda word: dot(r, [sum(a * b for a, b in zip(row, c)) for row in M(word).rows])
        env["CR"] = outer(c, r)
        env["rdotc"] = dot(r, c)
        return env, q.to_json()
    if family in ("generic", "traceless"):
        X, Y = generic_pair(rng, n)
        if family == "traceless":
            X, Y = traceless_pair(X, Y)
        return _pair_env(X, Y), {"X": encode_matrix(X), "Y": encode_matrix(Y)}
    if family == "commuting":
        kind = rng.choice(COMMUTING_KINDS)
        X, Y = commuting_pair(kind, rng, n)
        return _pair_env(X, Y), {"kind": kind, "X": encode_matrix(X), "Y": encode_matrix(Y)}
    if family == "rank2":
        X, Y = rank_k_pair(2, rng)
        return _pair_env(X, Y), {"X": encode_matrix(X), "Y": encode_matrix(Y)}
    if family == "tuple":
        seven = [random_rational(rng, -9, 9) for _ in range(7)]
        v, w = random_rational(rng, -9, 9), random_rational(rng, -9, 9)
        env = _tuple_env((Fraction(0), Fraction(0), *seven), v, w)
        env["rv"] = lambda i, s: rel.eval_r(seven, s)[int(i) - 1]
        return env, {"tuple": [encode_scalar(x) for x in seven], "v": encode_scalar(v), "w": encode_scalar(w)}
    if family == "scaling":
        X, Y = generic_pair(rng, n)
        alpha = random_rational(rng, -5, 5, (1, 2, 3, 7))
        while alpha == 0:
            alpha = random_rational(rng, -5, 5, (1, 2, 3, 7))
        env = _pair_env(X, Y)
        s = invariant_tuple(X * alpha, Y)
        env["alpha"] = alpha
        env.update({f"sa{i}": s.a[i - 1] for i in range(1, 10)})
        env.update(sv=s.v, sw=s.w)
        env.update({f"sr{i}": x for i, x in enumerate(rel.eval_r(s.seven, s.v), 1)})
        env["srel_new"] = rel.eval_new_relation(s.seven, s.v, s.w)
        return env, {"X": encode_matrix(X), "Y": encode_matrix(Y), "alpha": encode_scalar(alpha)}
    raise ValueError(f"unknown witness family {family!r}")


def check_entry(entry: dict, rng, n: int) -> tuple[bool, dict, str]:
    env, witness = _witness(entry["family"], rng, n)
    for lhs, rhs in entry["checks"]:
        diff = evaluate(lhs, env) - evaluate(rhs, env)
        if not _is_zero(diff):
            return False, witness, f"{lhs} != {rhs}"
    return True, witness, ""


def _run_range(identity_id: str, seed, start: int, stop: int, n: int | None = None) -> IdentityReport:
    entry = get_entry(identity_id)
    ns = [n] if n is not None else entry.get("n", [3])
    rep = IdentityReport(identity_id)
    t0 = time.perf_counter()
    for k in range(start, stop):
        n = ns[k % len(ns)]
        ok, witness, detail = check_entry(entry, make_rng(seed, identity_id, k), n)
        rep.trials += 1
        if not ok:
            rep.failures += 1
            if rep.witness is None:
                rep.witness = {"trial": k, "n": n, **witness}
                rep.detail = detail
    rep.elapsed = time.perf_counter() - t0
    return rep


def run_suite(ids, trials: int = 200, seed=0, workers: int = 1, n: int | None = None) -> list[IdentityReport]:
    """Run identities; ``n`` pins the matrix size instead of cycling the entry's sizes."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    ids = sorted(set(ids))
    for i in ids:
        entry = get_entry(i)
        if n is not None and n not in entry.get("n", [3]):
            raise ValueError(f"{i} is not registered for n={n}")
    if workers <= 1:
        return [_run_range(i, seed, 0, trials, n) for i in ids]
    chunk = max(1, trials // workers)
    jobs = [(i, seed, s, min(s + chunk, trials), n) for i in ids for s in range(0, trials, chunk)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_run_range, *zip(*jobs)))
    merged = {}
    for p in parts:
        merged[p.id] = merged[p.id].merge(p) if p.id in merged else p
    return [merged[i] for i in ids]
