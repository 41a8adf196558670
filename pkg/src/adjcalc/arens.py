"""Algebras, Arens products, Banach modules and tri-derivations on structure constants.

All identities are checked over every basis tuple at once with ``einsum``.
Products and actions are :class:`~adjcalc.tensor.MultiTensor` objects, so
the bidual constructions come straight from the adjoint/flip calculus.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, StructureError
from .tensor import (
    DEFAULT_TOL,
    MultiTensor,
    SpaceRef,
    adjoint,
    adjoint_n,
    canonical_embedding,
    compose_into_slot,
    flip,
)
from .words import parse, tensor_semantics

__all__ = [
    "AlgebraStruct",
    "ModuleStruct",
    "TargetKind",
    "TriDerivationCandidate",
    "ArensCase",
    "CheckResult",
    "ConditionVerdict",
    "first_arens",
    "second_arens",
    "self_module",
    "dual_module",
    "leibniz_defects",
    "leibniz_residuals",
    "is_tri_derivation",
    "fourth_adjoint_check",
    "membership_conditions",
    "triderivation_basis",
]


def _max(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InputError(msg)


def associativity_residual(product: MultiTensor) -> float:
    p = product.values
    return _max(np.einsum("abs,sct->abct", p, p) - np.einsum("bcs,ast->abct", p, p))


@dataclass(frozen=True, eq=False)
class AlgebraStruct:
    """A finite-dimensional associative algebra given by its product tensor.

    ``matrices`` optionally realizes the basis as square matrices (used for
    commutator-based constructions); it must be multiplicative when given.
    """

    space: SpaceRef
    product: MultiTensor
    matrices: np.ndarray | None = field(default=None, repr=False)
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        p = self.product
        _require(
            p.arity == 2 and p.arg_spaces == (self.space, self.space) and p.result_space == self.space,
            f"product must be {self.space} × {self.space} → {self.space}, got {p.signature_str()}",
        )
        res = associativity_residual(p)
        if res > self.tol:
            raise StructureError(f"product is not associative (residual {res:.3g})", res)
        if self.matrices is not None:
            mats = np.asarray(self.matrices, dtype=np.float64)
            _require(mats.ndim == 3 and mats.shape[0] == self.space.dim, "need one matrix per basis element")
            lhs = np.einsum("aij,bjk->abik", mats, mats)
            rhs = np.einsum("abs,sik->abik", p.values, mats)
            if _max(lhs - rhs) > self.tol:
                raise StructureError("matrix realization is not multiplicative", _max(lhs - rhs))
            object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.space.dim

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("a,b,abt->t", a, b, self.product.values)


def module_axiom_residuals(
    product: MultiTensor, left: MultiTensor, right: MultiTensor
) -> dict[str, float]:
    p, l, r = product.values, left.values, right.values
    return {
        "left": _max(np.einsum("abs,sxt->abxt", p, l) - np.einsum("bxs,ast->abxt", l, l)),
        "right": _max(np.einsum("abs,xst->xabt", p, r) - np.einsum("xas,sbt->xabt", r, r)),
        "compatibility": _max(np.einsum("xbs,ast->axbt", r, l) - np.einsum("axs,sbt->axbt", l, r)),
    }


@dataclass(frozen=True, eq=False)
class ModuleStruct:
    """A Banach module ``(left, X, right)`` over ``algebra``, axioms validated."""

    algebra: AlgebraStruct
    space: SpaceRef
    left: MultiTensor
    right: MultiTensor
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        a, x = self.algebra.space, self.space
        _require(
            self.left.arg_spaces == (a, x) and self.left.result_space == x,
            f"left action must be {a} × {x} → {x}, got {self.left.signature_str()}",
        )
        _require(
            self.right.arg_spaces == (x, a) and self.right.result_space == x,
            f"right action must be {x} × {a} → {x}, got {self.right.signature_str()}",
        )
        residuals = self.axiom_residuals()
        bad = {k: v for k, v in residuals.items() if v > self.tol}
        if bad:
            name, res = max(bad.items(), key=lambda kv: kv[1])
            raise StructureError(f"module axiom '{name}' fails (residual {res:.3g})", res)

    def axiom_residuals(self) -> dict[str, float]:
        return module_axiom_residuals(self.algebra.product, self.left, self.right)


def first_arens(product: MultiTensor) -> MultiTensor:
    """``a □ b = π***(a, b)`` on the bidual."""
    _require(product.arity == 2, "Arens products need a bilinear map")
    return adjoint_n(product, 3)


def second_arens(product: MultiTensor) -> MultiTensor:
    """``a ◇ b = π^{r***r}(a, b)`` on the bidual."""
    _require(product.arity == 2, "Arens products need a bilinear map")
    return flip(adjoint_n(flip(product), 3))


def self_module(algebra: AlgebraStruct) -> ModuleStruct:
    return ModuleStruct(algebra, algebra.space, algebra.product, algebra.product, algebra.tol)


def dual_module(m: ModuleStruct) -> ModuleStruct:
    """``(π2^{r*r}, X*, π1*)``; raises StructureError if the axioms fail."""
    left = flip(adjoint(flip(m.right)))
    right = adjoint(m.left)
    return ModuleStruct(m.algebra, m.space.dual, left, right, m.tol)


class TargetKind(enum.Enum):
    MODULE = "module"
    DUAL_MODULE = "dual"
    ALGEBRA = "algebra"


@dataclass(frozen=True)
class TriDerivationCandidate:
    D: MultiTensor
    target_kind: TargetKind

    def __post_init__(self):
        _require(self.D.arity == 3, "a tri-derivation candidate must be tri-linear")
        a = self.D.arg_spaces[0]
        _require(
            all(s == a for s in self.D.arg_spaces),
            f"all arguments of D must be the algebra space, got {self.D.signature_str()}",
        )
        object.__setattr__(self, "target_kind", TargetKind(self.target_kind))


def _effective_module(c: TriDerivationCandidate, m: ModuleStruct | AlgebraStruct) -> ModuleStruct:
    kind = c.target_kind
    if kind is TargetKind.ALGEBRA:
        algebra = m if isinstance(m, AlgebraStruct) else m.algebra
        eff = self_module(algebra)
    elif isinstance(m, ModuleStruct):
        eff = m if kind is TargetKind.MODULE else dual_module(m)
    else:
        raise InputError(f"target kind {kind.value!r} needs a module structure")
    _require(
        c.D.arg_spaces[0] == eff.algebra.space,
        f"D takes {c.D.arg_spaces[0]} but the algebra lives on {eff.algebra.space}",
    )
    _require(
        c.D.result_space == eff.space,
        f"D lands in {c.D.result_space} but a {kind.value} target means {eff.space}",
    )
    return eff


def leibniz_defects(
    D: np.ndarray,
    products: tuple[np.ndarray, np.ndarray, np.ndarray],
    left: np.ndarray,
    right: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """LHS minus RHS of the three Leibniz identities over all basis quadruples.

    ``products[k]`` is the product used inside slot ``k+1``; every defect
    array is indexed by ``(a, b, c, d, t)``::

        D(ad, b, c) = R(D(a,b,c), d) + L(a, D(d,b,c))
        D(a, bd, c) = R(D(a,b,c), d) + L(b, D(a,d,c))
        D(a, b, cd) = R(D(a,b,c), d) + L(c, D(a,b,d))
    """
    p1, p2, p3 = products
    common = np.einsum("abcs,sdt->abcdt", D, right)
    return (
        np.einsum("ads,sbct->abcdt", p1, D) - common - np.einsum("dbcs,ast->abcdt", D, left),
        np.einsum("bds,asct->abcdt", p2, D) - common - np.einsum("adcs,bst->abcdt", D, left),
        np.einsum("cds,abst->abcdt", p3, D) - common - np.einsum("abds,cst->abcdt", D, left),
    )


def leibniz_residuals(D, products, left, right) -> tuple[float, float, float]:
    return tuple(_max(x) for x in leibniz_defects(D, products, left, right))


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    residuals: tuple[float, ...]
    names: tuple[str, ...] = ("identity_1", "identity_2", "identity_3")

    def __bool__(self):
        return self.passed

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.residuals))


def is_tri_derivation(
    c: TriDerivationCandidate, m: ModuleStruct | AlgebraStruct, tol: float = DEFAULT_TOL
) -> CheckResult:
    eff = _effective_module(c, m)
    p = eff.algebra.product.values
    res = leibniz_residuals(c.D.values, (p, p, p), eff.left.values, eff.right.values)
    return CheckResult(all(r <= tol for r in res), res)


class ArensCase:
    """One of the eight choices of Arens product per slot of ``D****``.

    Case 1 is (□, □, □) and case 8 is (◇, ◇, ◇).
    """

    FIRST, SECOND = "□", "◇"
    _TABLE = {
        1: "□□□", 2: "◇□□", 3: "□◇□", 4: "□□◇",
        5: "◇◇□", 6: "◇□◇", 7: "□◇◇", 8: "◇◇◇",
    }

    def __init__(self, case_id: int):
        if case_id not in self._TABLE:
            raise InputError(f"Arens case must be 1..8, got {case_id}")
        self.case_id = case_id
        self.choices = tuple(self._TABLE[case_id])

    @classmethod
    def all(cls) -> list[ArensCase]:
        return [cls(i) for i in range(1, 9)]

    def products(self, product: MultiTensor) -> tuple[MultiTensor, MultiTensor, MultiTensor]:
        box, diamond = first_arens(product), second_arens(product)
        return tuple(box if ch == self.FIRST else diamond for ch in self.choices)

    def __eq__(self, other):
        return isinstance(other, ArensCase) and other.case_id == self.case_id

    def __hash__(self):
        return hash(self.case_id)

    def __repr__(self):
        return f"ArensCase({self.case_id}: {' × '.join(self.choices)})"


_FOURTH = parse("D****")


def fourth_adjoint_check(
    c: TriDerivationCandidate,
    m: ModuleStruct | AlgebraStruct,
    case: ArensCase | int = 1,
    tol: float = DEFAULT_TOL,
) -> CheckResult:
    """Test whether ``D****`` is a tri-derivation on ``(A**, case products)``.

    Module actions extend to the bidual by three adjoints, as the products do.
    """
    case = case if isinstance(case, ArensCase) else ArensCase(case)
    eff = _effective_module(c, m)
    d4 = tensor_semantics(_FOURTH, c.D)
    prods = case.products(eff.algebra.product)
    left3, right3 = adjoint_n(eff.left, 3), adjoint_n(eff.right, 3)
    a2, t2 = d4.arg_spaces[0], d4.result_space
    for p in prods:
        assert p.spaces == (a2, a2, a2)
    assert left3.spaces == (a2, t2, t2) and right3.spaces == (t2, a2, t2)
    res = leibniz_residuals(
        d4.values, tuple(p.values for p in prods), left3.values, right3.values
    )
    return CheckResult(all(r <= tol for r in res), res)


@dataclass(frozen=True)
class ConditionVerdict:
    label: str
    holds: bool
    residual: float


def _images_into(outer: MultiTensor, slot: int, inner_images: np.ndarray, inner_space: SpaceRef) -> np.ndarray:
    """Feed each row of ``inner_images`` (vectors of ``inner_space``) into ``outer`` at ``slot``.

    Returns the resulting vectors of ``outer.result_space`` stacked as rows,
    over every basis choice of the remaining slots.
    """
    if outer.arg_spaces[slot - 1] != inner_space:
        raise InputError(
            f"slot {slot} of {outer.signature_str()} does not take {inner_space}"
        )
    vals = np.tensordot(inner_images, outer.values, axes=([1], [slot - 1]))
    return vals.reshape(-1, outer.result_space.dim)


def _embed_slots(t: MultiTensor, slots_levels: dict[int, int]) -> MultiTensor:
    """Restrict slot ``k`` to the space ``levels`` dual steps below, via canonical embeddings."""
    for slot, drop in slots_levels.items():
        want = t.arg_spaces[slot - 1]
        src = want.raised(-drop)
        t = compose_into_slot(t, canonical_embedding(src), slot)
    return t


def _membership_residual(images: np.ndarray, target: SpaceRef) -> float:
    """Round trip: ``target***`` -> restrict to ``target*`` -> re-embed -> compare."""
    kappa = canonical_embedding(target)
    restrict = adjoint(kappa)
    reembed = canonical_embedding(restrict.result_space)
    if images.shape[1] != restrict.arg_spaces[0].dim:
        raise InputError("image vectors do not live in the expected triple dual")
    back = images @ restrict.values @ reembed.values
    return _max(images - back)


_CONDITION_LISTS = {
    1: ["P2R_low", "P2S", "DR", "D6", "D7"],
    2: ["P2R_all", "DR", "D6", "D7"],
    3: ["P2S", "D6", "D7"],
    4: ["P2R_low", "P2S", "DR", "D5", "D6", "D7"],
    5: ["P2R_all", "P2S", "DR", "D6", "D7"],
    6: ["P2R_all", "DR", "D5", "D6", "D7"],
    7: ["P2S", "P2R_low", "D5", "D6", "D7"],
    8: ["P2S", "P2R_all", "DR", "D5", "D6", "D7"],
}

_LABELS = {
    "P2R_low": "π2^{**r*}(D^{****}(A,A,A**), X*) ⊆ A*",
    "P2R_all": "π2^{**r*}(D^{****}(A**,A**,A**), X*) ⊆ A*",
    "P2S": "π2^{****}(X*, D^{****}(A,A**,A**)) ⊆ A*",
    "DR": "D^{****r*}(π1^{****}(X*,A**), A**, A**) ⊆ A*",
    "D5": "D^{*****}(π1^{****}(X*,A**), A, A) ⊆ A*",
    "D6": "D^{******}(A**, π1^{****}(X*,A**), A) ⊆ A*",
    "D7": "D^{*******}(A**, A**, π1^{****}(X*,A**)) ⊆ A*",
}


def _condition_images(key: str, D: MultiTensor, eff: ModuleStruct) -> np.ndarray:
    A, X = eff.algebra.space, eff.space
    xstar = X.dual
    d4 = tensor_semantics(_FOURTH, D)

    if key in ("P2R_low", "P2R_all", "P2S"):
        if key == "P2R_low":
            inner = _embed_slots(d4, {1: 2, 2: 2})  # A x A x A** -> X**
        elif key == "P2R_all":
            inner = d4
        else:
            inner = _embed_slots(d4, {1: 2})  # A x A** x A** -> X**
        flat = inner.values.reshape(-1, inner.result_space.dim)
        if key == "P2S":
            outer = tensor_semantics("****", eff.right)  # X*** x X** -> A***
            outer = _embed_slots(outer, {1: 2})  # X* x X** -> A***
            return _images_into(outer, 2, flat, inner.result_space)
        outer = tensor_semantics("**r*", eff.right)  # X** x X* -> A***
        assert outer.arg_spaces[1] == xstar
        return _images_into(outer, 1, flat, inner.result_space)

    # conditions feeding π1^{****}(X*, A**) into an X*** slot of a D-word
    act = _embed_slots(tensor_semantics("****", eff.left), {1: 2})  # X* x A** -> X***
    acts = act.values.reshape(-1, act.result_space.dim)
    if key == "DR":
        outer, slot, lower = tensor_semantics("****r*", D), 1, {}
    elif key == "D5":
        outer, slot, lower = tensor_semantics("*****", D), 1, {2: 2, 3: 2}
    elif key == "D6":
        outer, slot, lower = tensor_semantics("******", D), 2, {1: 2, 3: 2}
    elif key == "D7":
        outer, slot, lower = tensor_semantics("*******", D), 3, {1: 2, 2: 2}
    else:
        raise KeyError(key)
    outer = _embed_slots(outer, lower)
    return _images_into(outer, slot, acts, act.result_space)


def membership_conditions(
    case: ArensCase | int,
    c: TriDerivationCandidate,
    m: ModuleStruct | AlgebraStruct,
    tol: float = DEFAULT_TOL,
) -> list[ConditionVerdict]:
    """Evaluate each membership condition of the given case on basis elements.

    Every composite lands in ``A***``; membership in ``A*`` is tested by a
    canonical-embedding round trip.
    """
    case = case if isinstance(case, ArensCase) else ArensCase(case)
    eff = _effective_module(c, m)
    out = []
    for key in _CONDITION_LISTS[case.case_id]:
        images = _condition_images(key, c.D, eff)
        res = _membership_residual(images, eff.algebra.space)
        out.append(ConditionVerdict(_LABELS[key], res <= tol, res))
    return out


def triderivation_basis(m: ModuleStruct | AlgebraStruct, target: TargetKind | str, tol: float = 1e-10) -> list[MultiTensor]:
    """A basis of all tri-derivations ``A x A x A -> T`` for the given target.

    Solves the three Leibniz identities as one homogeneous linear system.
    """
    target = TargetKind(target)
    if target is TargetKind.ALGEBRA:
        algebra = m if isinstance(m, AlgebraStruct) else m.algebra
        eff = self_module(algebra)
    elif not isinstance(m, ModuleStruct):
        raise InputError(f"target kind {target.value!r} needs a module structure")
    else:
        eff = m if target is TargetKind.MODULE else dual_module(m)
    A, T = eff.algebra.space, eff.space
    p, l, r = eff.algebra.product.values, eff.left.values, eff.right.values
    n = A.dim**3 * T.dim
    cols = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        D = e.reshape(A.dim, A.dim, A.dim, T.dim)
        parts = leibniz_defects(D, (p, p, p), l, r)
        cols.append(np.concatenate([x.ravel() for x in parts]))
    system = np.stack(cols, axis=1)
    _, s, vt = np.linalg.svd(system)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
    null = vt[rank:]
    return [MultiTensor((A, A, A), T, v) for v in null]
