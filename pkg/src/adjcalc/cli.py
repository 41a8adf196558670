"""The ``adjcalc`` command.

Exit codes: 0 when every check passes (or the words are shown equivalent),
1 on a failed check or a NOT_SHOWN verdict, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from . import __version__
from .arens import (
    ArensCase,
    AlgebraStruct,
    associativity_residual,
    first_arens,
    fourth_adjoint_check,
    is_tri_derivation,
    membership_conditions,
    second_arens,
)
from .corpus import conv_trilinear, group_algebra, load_cayley, random_tensor
from .errors import AdjcalcError, InputError
from .io import load_bundle, load_tensor, parse_json, tensor_from_obj
from .tensor import (
    DEFAULT_TOL,
    MultiTensor,
    SpaceRef,
    adjoint_n,
    compose_linear_after,
    double_adjoint,
    flip,
    is_regular,
    max_abs_difference,
    regularity_criteria,
)
from .words import (
    DEFAULT_DEPTH,
    RegularityAssumptions,
    Signature,
    Verdict,
    equivalent,
    infer_signature,
    parse,
    parse_letters,
)

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_SPACES = "X=1,Y=1,Z=1,W=1"


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = DEFAULT_TOL
    seed: int = 0
    depth: int = DEFAULT_DEPTH
    output: str = "text"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("--tol must be positive")
        if self.depth < 1:
            raise InputError("--depth must be >= 1")
        if self.output not in ("text", "json"):
            raise InputError(f"unknown output mode {self.output!r}")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float

    def as_dict(self) -> dict:
        return {"name": self.name, "verdict": "pass" if self.passed else "fail", "residual": self.residual}


def _check(name: str, residual: float, tol: float) -> Check:
    return Check(name, residual <= tol, float(residual))


# --- sig -------------------------------------------------------------------

def parse_spaces(text: str) -> dict[str, int]:
    dims: dict[str, int] = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, eq, dim = item.partition("=")
        if not eq or not name.strip():
            raise InputError(f"--spaces entry {item!r} is not NAME=DIM")
        try:
            d = int(dim)
        except ValueError:
            raise InputError(f"--spaces entry {item!r}: dim must be an integer") from None
        if d < 1:
            raise InputError(f"--spaces entry {item!r}: dim must be >= 1")
        dims[name.strip()] = d
    return dims


def base_signature(dims: dict[str, int]) -> Signature:
    """Arguments are every listed space but the last; the last is the result."""
    if len(dims) < 2 or len(dims) > 4:
        raise InputError("--spaces needs 2 to 4 entries: the arguments, then the result")
    refs = [SpaceRef(n, 0, d) for n, d in dims.items()]
    return Signature(tuple(refs[:-1]), refs[-1])


def cmd_sig(args, cfg: RunConfig) -> int:
    word = parse(args.expr)
    sig = infer_signature(base_signature(parse_spaces(args.spaces)), word)
    text = sig.format(with_dim=True)
    if cfg.output == "json":
        _emit_json({
            "schema": SCHEMA,
            "command": "sig",
            "expr": args.expr,
            "args": [_space_obj(s) for s in sig.arg_spaces],
            "result": _space_obj(sig.result_space),
            "signature": text,
        })
    else:
        print(text)
    return EXIT_OK


def _space_obj(s: SpaceRef) -> dict:
    return {"name": s.name, "dual_level": s.dual_level, "dim": s.dim}


# --- equiv -----------------------------------------------------------------

def _assumptions(args) -> RegularityAssumptions:
    if args.assume_all:
        return RegularityAssumptions.all()
    words = []
    for group in args.assume or ():
        words.extend(parse_letters(w.strip()) for w in group.split(","))
    return RegularityAssumptions(words)


def cmd_equiv(args, cfg: RunConfig) -> int:
    w1, w2 = parse(args.w1), parse(args.w2)
    res = equivalent(w1, w2, _assumptions(args), cfg.depth)
    chain = [w1.base + "".join(u.letters) for u in res.chain]
    if cfg.output == "json":
        _emit_json({
            "schema": SCHEMA,
            "command": "equiv",
            "w1": args.w1,
            "w2": args.w2,
            "verdict": res.verdict.value,
            "steps": res.steps,
            "chain": chain,
        })
    else:
        print(res.verdict.value)
        if chain:
            print(" = ".join(chain))
    return EXIT_OK if res.verdict is Verdict.EQUIVALENT else EXIT_FAIL


# --- check -----------------------------------------------------------------

def _tri_tensor(path: str) -> MultiTensor:
    t = load_tensor(path)
    if t.arity != 3:
        raise InputError(f"{path}: expected a tri-linear map, got arity {t.arity}")
    return t


def check_regular(args, cfg: RunConfig) -> list[Check]:
    t = _tri_tensor(args.file)
    out = [_check("regular", is_regular(t).residual, cfg.tolerance)]
    for name, r in regularity_criteria(t).items():
        out.append(_check(f"criterion:{name}", r, cfg.tolerance))
    return out


def _composition_inputs(path: str, seed: int) -> tuple[MultiTensor, MultiTensor]:
    """``f`` from the file; ``h`` from an optional top-level ``"h"`` entry, else seeded."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    obj = parse_json(text, path)
    try:
        f = tensor_from_obj(obj, text)
        if "h" in obj:
            h = tensor_from_obj(obj["h"], text, ["h"])
        else:
            w = f.result_space
            h = random_tensor(seed, (w.dim, w.dim), names=(w.name, "S"), integer=True)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    if f.arity != 3:
        raise InputError(f"{path}: expected a tri-linear map, got arity {f.arity}")
    if h.arity != 1 or h.arg_spaces[0] != f.result_space:
        raise InputError(f"{path}: h must be a linear map out of {f.result_space}")
    return f, h


def check_composition(args, cfg: RunConfig) -> list[Check]:
    f, h = _composition_inputs(args.file, cfg.seed)
    hf = compose_linear_after(h, f)
    lhs = compose_linear_after(double_adjoint(h), adjoint_n(f, 4))
    fr = flip(f)
    lhs_r = compose_linear_after(double_adjoint(h), flip(adjoint_n(fr, 4)))
    rhs_r = flip(adjoint_n(flip(hf), 4))
    reg_f, reg_hf = is_regular(f), is_regular(hf)
    return [
        _check("composition_fourth_adjoint", max_abs_difference(lhs, adjoint_n(hf, 4)), cfg.tolerance),
        _check("composition_flipped_fourth_adjoint", max_abs_difference(lhs_r, rhs_r), cfg.tolerance),
        _check("regular(f)", reg_f.residual, cfg.tolerance),
        _check("regular(h∘f)", reg_hf.residual, cfg.tolerance),
        Check("regularity_agrees", bool(reg_f) == bool(reg_hf), 0.0),
    ]


def check_triderivation(args, cfg: RunConfig) -> list[Check]:
    algebra, module, cand = load_bundle(args.file)
    struct = module if module is not None else algebra
    cases = [ArensCase(args.case)] if args.case else ArensCase.all()
    res = is_tri_derivation(cand, struct, cfg.tolerance)
    out = [_check(f"leibniz:{n}", r, cfg.tolerance) for n, r in res.as_dict().items()]
    for case in cases:
        k = case.case_id
        four = fourth_adjoint_check(cand, struct, case, cfg.tolerance)
        out.append(_check(f"case{k}:fourth_adjoint", max(four.residuals), cfg.tolerance))
        for cond in membership_conditions(case, cand, struct, cfg.tolerance):
            out.append(_check(f"case{k}:{cond.label}", cond.residual, cfg.tolerance))
    return out


def check_group_suite(args, cfg: RunConfig) -> list[Check]:
    g = load_cayley(args.file)
    alg: AlgebraStruct = group_algebra(g)
    pi = alg.product
    return [
        Check("cayley", True, 0.0),
        _check("associativity", associativity_residual(pi), cfg.tolerance),
        _check("conv_regular", is_regular(conv_trilinear(g)).residual, cfg.tolerance),
        _check("first_arens_equals_product", max_abs_difference(first_arens(pi), pi), cfg.tolerance),
        _check("second_arens_equals_product", max_abs_difference(second_arens(pi), pi), cfg.tolerance),
    ]


CHECKS: dict[str, Callable] = {
    "regular": check_regular,
    "composition": check_composition,
    "lemma34": check_composition,  # name used by the published CLI surface
    "triderivation": check_triderivation,
    "group-suite": check_group_suite,
}


def build_report(kind: str, checks: Sequence[Check]) -> dict:
    return {
        "schema": SCHEMA,
        "command": f"check {kind}",
        "checks": [c.as_dict() for c in checks],
        "pass": all(c.passed for c in checks),
    }


def cmd_check(args, cfg: RunConfig) -> int:
    report = build_report(args.kind, CHECKS[args.kind](args, cfg))
    if cfg.output == "json":
        _emit_json(report)
    else:
        for c in report["checks"]:
            print(f"{c['verdict'].upper():4}  {c['name']}  residual={c['residual']:.3g}")
        print("PASS" if report["pass"] else "FAIL")
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _emit_json(obj: dict) -> None:
    print(json.dumps(obj, indent=2, ensure_ascii=False))


# --- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="residual tolerance (default %(default)g)")
    common.add_argument("--seed", type=int, default=0, help="seed for generated inputs (default 0)")
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="rewrite search depth (default %(default)s)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="adjcalc", description="Adjoint calculus for finite-dimensional multilinear maps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sig", parents=[common], help="signature of an adjoint word")
    p.add_argument("expr", help="e.g. 'f***r*' or 'f^{4r}'")
    p.add_argument("--spaces", default=DEFAULT_SPACES,
                   help="argument spaces then the result space, NAME=DIM,... (default %(default)s)")
    p.set_defaults(func=cmd_sig)

    p = sub.add_parser("equiv", parents=[common], help="search for a proof that two words agree")
    p.add_argument("w1")
    p.add_argument("w2")
    p.add_argument("--assume", action="append", metavar="WORDS",
                   help="comma-separated words u with f^u regular; '' is the base map")
    p.add_argument("--assume-all", action="store_true", help="assume every word regular")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("check", parents=[common], help="run a checker on a file")
    p.add_argument("kind", choices=sorted(CHECKS))
    p.add_argument("file")
    p.add_argument("--case", type=int, choices=range(1, 9), metavar="K", help="Arens case 1..8 (default: all)")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which matches EXIT_INPUT
        return int(exc.code or 0)
    try:
        cfg = RunConfig(args.tol, args.seed, args.depth, "json" if args.json else "text")
        return args.func(args, cfg)
    except (AdjcalcError, OSError) as exc:
        print(f"adjcalc: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
