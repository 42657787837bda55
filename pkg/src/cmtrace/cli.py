"""JSON command line for the library.

Every command reads JSON (``--input`` file or ``-`` for stdin) and prints one
JSON document. Exit codes: 0 success, 1 usage or input error (an
``{"error": ...}`` object is printed), 2 a verification failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .cremona import GroupWord, UnsupportedMoveError, act_matrices, act_tuple_word, consistency_check
from .invariants import aux_traces, invariant_tuple, traceless_pair, vw
from .numeric import (
    AmbiguousError,
    DimensionError,
    DomainError,
    Matrix,
    TolerancePolicy,
    commutator,
    decode_matrix,
    decode_scalar,
    det,
    encode_matrix,
    encode_scalar,
    rank,
    trace_word,
)
from .orbits import CaseDispatchError, OffVarietyError, classify_d30, normalize_d3
from .registry import UnknownIdentityError, identity_ids
from .relations import (
    check_cprime_criterion,
    classify_stratum,
    eval_id1z,
    eval_id2z,
    eval_new_relation,
    eval_old_relation,
    on_cuspidal_curve,
    r_vector,
)
from .sampler import COMMUTING_KINDS, cm_point, commuting_pair, make_rng, random_cm, rank_k_pair, run_identity_suite

# command -> library operations it exposes; each operation appears once
COMMANDS = {
    "invariants": ("trace_word", "traceless_pair", "invariant_tuple", "vw", "aux_traces"),
    "classify-stratum": (
        "commutator", "rank", "det", "classify_stratum", "on_cuspidal_curve", "check_cprime_criterion",
    ),
    "check-relations": ("eval_id1z", "eval_id2z", "eval_r", "eval_new_relation", "eval_old_relation"),
    "verify-identities": ("run_identity_suite",),
    "sample": ("cm_point", "commuting_pair", "rank_k_pair"),
    "act": ("act_matrices", "act_tuple", "consistency_check"),
    "normalize": ("normalize_d3",),
    "classify-commuting": ("classify_d30",),
}


class InputError(ValueError):
    pass


class VerificationFailed(Exception):
    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# input decoding -------------------------------------------------------------------

def _read_json(path: str | None):
    if path is None:
        raise InputError("--input is required")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from None


def _matrix(obj) -> Matrix:
    if isinstance(obj, dict):
        return decode_matrix(obj)
    if isinstance(obj, list):
        rows = [[decode_scalar(x) for x in row] for row in obj]
        if any(isinstance(x, complex) for row in rows for x in row):
            rows = [[complex(x) for x in row] for row in rows]
        return Matrix(rows)
    raise InputError("a matrix is a list of rows or an object with 'entries'")


def _pair(obj) -> tuple[Matrix, Matrix]:
    if isinstance(obj, dict) and "witness" in obj:  # output of `sample`
        obj = obj["witness"]
    if not isinstance(obj, dict) or "X" not in obj or "Y" not in obj:
        raise InputError("expected an object with matrices 'X' and 'Y'")
    X, Y = _matrix(obj["X"]), _matrix(obj["Y"])
    if X.n != Y.n:
        raise DimensionError(f"X is {X.n}x{X.n} but Y is {Y.n}x{Y.n}")
    if X.domain != Y.domain:
        X, Y = X.to_complex(), Y.to_complex()
    return X, Y


def _is_pair(obj) -> bool:
    return isinstance(obj, dict) and ("X" in obj or "witness" in obj)


def _tuple(obj):
    """Returns (7-tuple, v, w) from {"tuple": [...7]} or {"a": [...9]} or a bare list."""
    v = w = None
    if isinstance(obj, dict):
        v = decode_scalar(obj["v"]) if "v" in obj else None
        w = decode_scalar(obj["w"]) if "w" in obj else None
        raw = obj.get("tuple", obj.get("a"))
    else:
        raw = obj
    if not isinstance(raw, list):
        raise InputError("expected a tuple as a list, or an object with 'tuple' (7 entries) or 'a' (9 entries)")
    t = [decode_scalar(x) for x in raw]
    if len(t) == 9:
        if t[0] != 0 or t[1] != 0:
            raise InputError("a1 and a2 must be 0 for tuple-level work; shift X and Y by constants first")
        t = t[2:]
    if len(t) != 7:
        raise InputError(f"expected 7 (a3..a9) or 9 (a1..a9) entries, got {len(t)}")
    return tuple(t), v, w


def _enc(xs) -> list:
    return [encode_scalar(x) for x in xs]


def _tol(args) -> TolerancePolicy:
    return TolerancePolicy(abs_eps=args.tol_abs, rel_eps=args.tol_rel)


# commands -----------------------------------------------------------------------

def cmd_invariants(args):
    X, Y = _pair(_read_json(args.input))
    t = invariant_tuple(X, Y)
    A, B = traceless_pair(X, Y)
    out = {"tuple": t.to_json()}
    v, w = vw(X, Y)
    out["vw_raw"] = {"v": encode_scalar(v), "w": encode_scalar(w)}
    out["aux"] = {k: encode_scalar(x) for k, x in aux_traces(A, B, _tol(args)).as_dict().items()}
    if args.trace_word:
        out["trace_word"] = {"word": args.trace_word, "value": encode_scalar(trace_word(args.trace_word, (X, Y)))}
    return out


def cmd_classify_stratum(args):
    X, Y = _pair(_read_json(args.input))
    tol = _tol(args)
    C = commutator(X, Y)
    M = C + 1
    rank2, res = check_cprime_criterion(X, Y, tol)
    v, w = vw(X, Y)
    return {
        "stratum": classify_stratum(X, Y, tol).name,
        "rank": rank(M, tol, strict=True),
        "det": encode_scalar(det(M)),
        "commutator": encode_matrix(C),
        "v": encode_scalar(v),
        "w": encode_scalar(w),
        "cusp": on_cuspidal_curve(v, w, tol),
        "cprime": {"rank_is_2": rank2, "one_plus_v_plus_w": encode_scalar(res)},
    }


def cmd_check_relations(args):
    obj = _read_json(args.input)
    if _is_pair(obj):
        X, Y = _pair(obj)
        if X.n != 3:
            raise InputError("relations are stated for 3x3 pairs")
        it = invariant_tuple(X, Y)
        t, v, w = it.seven, it.v, it.w
    else:
        t, v, w = _tuple(obj)
    tol = _tol(args)
    out = {"tuple": _enc(t)}
    groups = {"id1z": eval_id1z(t), "id2z": eval_id2z(t)}
    if v is not None:
        groups["r"] = r_vector(t, v)
    out["residuals"] = [e for g in groups.values() for e in g.to_json()]
    out["satisfied"] = {k: g.satisfied(tol) for k, g in groups.items()}
    if v is not None and w is not None:
        old, new = eval_old_relation(t, v, w), eval_new_relation(t, v, w)
        out["v"], out["w"] = encode_scalar(v), encode_scalar(w)
        out["residuals"] += [{"id": "rel.new", "residual": encode_scalar(new)}, {"id": "rel.old", "residual": encode_scalar(old)}]
        out["satisfied"]["rel"] = tol.is_zero(new) and tol.is_zero(old)
    return out


def cmd_verify_identities(args):
    ids = identity_ids() if not args.ids else sorted({i for chunk in args.ids for i in chunk.split(",") if i})
    reports = run_identity_suite(ids, args.trials, args.seed, args.workers, args.size)
    out = {
        "seed": args.seed,
        "trials": args.trials,
        "reports": [r.to_json(timing=args.timing) for r in reports],
        "failures": sum(r.failures for r in reports),
    }
    if out["failures"]:
        raise VerificationFailed(out)
    return out


def _parse_list(s: str):
    return [Fraction(x) for x in s.split(",") if x.strip()]


def cmd_sample(args):
    rng = make_rng(args.seed, "cli-sample", args.kind)
    if args.kind == "cm":
        if args.x:
            x = _parse_list(args.x)
            y = _parse_list(args.y) if args.y else [Fraction(0)] * len(x)
            q = cm_point(x, y)
        else:
            q = random_cm(rng, args.n, mix=False)
        return {"kind": "cm", "seed": args.seed, "witness": q.to_json()}
    if args.kind == "commuting":
        family = args.family or rng.choice(COMMUTING_KINDS)
        X, Y = commuting_pair(family, rng, args.n)
        return {"kind": "commuting", "family": family, "seed": args.seed, "witness": {"X": encode_matrix(X), "Y": encode_matrix(Y)}}
    if args.n != 3:
        raise InputError(f"--kind {args.kind} builds 3x3 pairs only")
    X, Y = rank_k_pair(2 if args.kind == "rank2" else 3, rng)
    return {"kind": args.kind, "seed": args.seed, "witness": {"X": encode_matrix(X), "Y": encode_matrix(Y)}}


def cmd_act(args):
    word = GroupWord.from_json(_read_json(args.word)) if args.word else GroupWord()
    if args.check:
        if not word:
            raise InputError("--check needs a nonempty --word")
        reports = [consistency_check(m, args.family, args.trials, args.seed, _tol(args)) for m in word]
        out = {"family": args.family, "reports": [dict(r.to_json(timing=False), move=m.to_json()) for r, m in zip(reports, word)]}
        if any(not r.passed for r in reports):
            raise VerificationFailed(out)
        return out
    obj = _read_json(args.input)
    if _is_pair(obj):
        X, Y = act_matrices(word, _pair(obj))
        return {"X": encode_matrix(X), "Y": encode_matrix(Y)}
    t, v, _ = _tuple(obj)
    if v is None:
        raise InputError("tuple input for act needs the commutator invariant 'v'")
    return {"tuple": _enc(act_tuple_word(word, t, v)), "v": encode_scalar(v)}


def cmd_normalize(args):
    t, _, _ = _tuple(_read_json(args.input))
    res = normalize_d3(t, _tol(args))
    return {"input": _enc(t), **res.to_json()}


def cmd_classify_commuting(args):
    t, _, _ = _tuple(_read_json(args.input))
    label, res = classify_d30(t, _tol(args))
    return {"input": _enc(t), "label": label.name, **res.to_json()}


HANDLERS = {
    "invariants": cmd_invariants,
    "classify-stratum": cmd_classify_stratum,
    "check-relations": cmd_check_relations,
    "verify-identities": cmd_verify_identities,
    "sample": cmd_sample,
    "act": cmd_act,
    "normalize": cmd_normalize,
    "classify-commuting": cmd_classify_commuting,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON input file, '-' for stdin")
    common.add_argument("--tol-abs", type=float, default=1e-9)
    common.add_argument("--tol-rel", type=float, default=1e-9)

    p = _Parser(prog="cmtrace", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("invariants", parents=[common], help="a1..a9, v, w and auxiliary traces of a pair")
    s.add_argument("--trace-word", help="also report tr of a word over X/Y, e.g. XXY")

    sub.add_parser("classify-stratum", parents=[common], help="rank([X,Y]+I) stratum of a 3x3 pair")
    sub.add_parser("check-relations", parents=[common], help="relation residuals of a pair or a tuple")

    s = sub.add_parser("verify-identities", parents=[common], help="run registered identities on random witnesses")
    s.add_argument("--ids", nargs="*", help="identity ids (space or comma separated); default all")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", default="0")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--n", dest="size", type=int, help="pin the matrix size (default: cycle each identity's sizes)")
    s.add_argument("--timing", action="store_true", help="include elapsed seconds (breaks byte-identical output)")

    s = sub.add_parser("sample", parents=[common], help="exact witness for a stratum")
    s.add_argument("--kind", choices=("cm", "commuting", "rank2", "rank3"), required=True)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--seed", default="0")
    s.add_argument("--family", choices=COMMUTING_KINDS)
    s.add_argument("--x", help="comma separated distinct x for --kind cm")
    s.add_argument("--y", help="comma separated diagonal of Y for --kind cm")

    s = sub.add_parser("act", parents=[common], help="apply a group word to a pair or a tuple")
    s.add_argument("--word", help="GroupWord JSON file; omitted means the empty word")
    s.add_argument("--check", action="store_true", help="compare tuple and matrix actions of each move instead")
    s.add_argument("--family", choices=("cm", "commuting"), default="cm")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", default="0")

    sub.add_parser("normalize", parents=[common], help="word carrying a v=-3 tuple to zero")
    sub.add_parser("classify-commuting", parents=[common], help="orbit label of a v=0 tuple")
    return p


def _emit(obj, stream=None) -> None:
    stream = stream or sys.stdout
    json.dump(obj, stream, indent=2)
    stream.write("\n")


def _error(kind: str, message: str, **extra) -> dict:
    return {"error": {"type": kind, "message": message, **extra}}


def dispatch(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "trials", 1) <= 0:
            raise InputError("--trials must be positive")
        _emit(HANDLERS[args.command](args))
        return 0
    except VerificationFailed as e:
        _emit(e.payload)
        return 2
    except CaseDispatchError as e:
        _emit(_error("CaseDispatchError", str(e), branch_log=e.branch_log))
        return 2
    except (InputError, OffVarietyError, AmbiguousError, UnsupportedMoveError, UnknownIdentityError,
            DimensionError, DomainError, ValueError, KeyError, TypeError, ZeroDivisionError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        _emit(_error(type(e).__name__, str(msg)))
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
