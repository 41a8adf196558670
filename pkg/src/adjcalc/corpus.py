"""Concrete instances: finite groups and their convolution algebras, matrix
algebras, the row-matrix algebra with its commutator tri-derivation, and
seeded generators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .arens import (
    AlgebraStruct,
    TargetKind,
    TriDerivationCandidate,
    is_tri_derivation,
    leibniz_defects,
)
from .errors import CayleyError, InputError, StructureError
from .tensor import DEFAULT_TOL, MultiTensor, SpaceRef

__all__ = [
    "CayleyTable",
    "parse_cayley",
    "load_cayley",
    "shipped_group",
    "SHIPPED_GROUPS",
    "group_algebra",
    "conv_trilinear",
    "row_algebra_example",
    "matrix_algebra",
    "random_tensor",
    "random_triderivation",
    "inner_triderivation",
    "leibniz_perturbation",
    "structure_constants",
]

SHIPPED_GROUPS = ("Z2", "Z3", "Z4", "Klein", "S3")


def _first_duplicate(seq) -> tuple[int, int] | None:
    seen: dict[int, int] = {}
    for j, v in enumerate(seq):
        if v in seen:
            return seen[v], j
        seen[v] = j
    return None


def group_violations(table: np.ndarray) -> list[tuple[str, tuple]]:
    """Every violated group axiom, each with one witness."""
    n = table.shape[0]
    out: list[tuple[str, tuple]] = []
    ident = np.arange(n)
    bad = np.nonzero(table[0] != ident)[0]
    if bad.size:
        j = int(bad[0])
        out.append(("identity_row", (0, j, int(table[0, j]))))
    bad = np.nonzero(table[:, 0] != ident)[0]
    if bad.size:
        i = int(bad[0])
        out.append(("identity_column", (i, 0, int(table[i, 0]))))
    for i in range(n):
        dup = _first_duplicate(table[i].tolist())
        if dup:
            out.append(("latin_rows", (i, *dup)))
            break
    for j in range(n):
        dup = _first_duplicate(table[:, j].tolist())
        if dup:
            out.append(("latin_columns", (dup[0], dup[1], j)))
            break
    lhs = table[table[:, :, None], np.arange(n)[None, None, :]]  # (ij)k
    rhs = table[np.arange(n)[:, None, None], table[None, :, :]]  # i(jk)
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        out.append(("associativity", tuple(int(x) for x in bad[0])))
    for i in range(n):
        if not np.any((table[i] == 0) & (table[:, i] == 0)):
            out.append(("inverses", (i,)))
            break
    return out


@dataclass(frozen=True, eq=False)
class CayleyTable:
    """A finite group as its multiplication table; element 0 is the unit."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 1:
            raise InputError(f"Cayley table must be a non-empty square array, got shape {t.shape}")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            i, j = (int(x) for x in np.argwhere((t < 0) | (t >= n))[0])
            raise CayleyError([("range", (i, j, int(t[i, j])))])
        violations = group_violations(t)
        if violations:
            raise CayleyError(violations)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inverse(self, i: int) -> int:
        return int(np.nonzero(self.table[i] == 0)[0][0])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def to_text(self) -> str:
        rows = [" ".join(str(int(x)) for x in row) for row in self.table]
        return "\n".join([str(self.order), *rows]) + "\n"


def parse_cayley(text: str, source: str = "<string>") -> CayleyTable:
    """Parse the text format: ``n`` then ``n`` rows of ``n`` indices; ``#`` starts a comment."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise InputError(f"{source}: empty Cayley file")
    lineno, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise InputError(f"{source}: line {lineno}: expected the group order, got {head!r}") from None
    if n < 1:
        raise InputError(f"{source}: line {lineno}: group order must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise InputError(f"{source}: expected {n} table rows, found {len(rows)}")
    table = []
    for lineno, body in rows:
        try:
            row = [int(tok) for tok in body.split()]
        except ValueError:
            raise InputError(f"{source}: line {lineno}: non-integer entry") from None
        if len(row) != n:
            raise InputError(f"{source}: line {lineno}: expected {n} entries, found {len(row)}")
        table.append(row)
    return CayleyTable(np.array(table))


def load_cayley(path: str | Path) -> CayleyTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_cayley(text, str(path))


def shipped_group(name: str) -> CayleyTable:
    if name not in SHIPPED_GROUPS:
        raise InputError(f"unknown group {name!r}; shipped: {', '.join(SHIPPED_GROUPS)}")
    text = resources.files("adjcalc").joinpath("data", f"{name}.txt").read_text(encoding="utf-8")
    return parse_cayley(text, f"{name}.txt")


def structure_constants(mats: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Product tensor of the algebra spanned by ``mats`` (must be closed under products)."""
    mats = np.asarray(mats, dtype=np.float64)
    d = mats.shape[0]
    basis = mats.reshape(d, -1).T
    prods = np.einsum("aij,bjk->abik", mats, mats).reshape(d * d, -1).T
    coef, *_ = np.linalg.lstsq(basis, prods, rcond=None)
    if np.max(np.abs(basis @ coef - prods), initial=0.0) > tol:
        raise StructureError("matrices do not span a subalgebra")
    return coef.T.reshape(d, d, d)


def group_algebra(g: CayleyTable, name: str = "A") -> AlgebraStruct:
    """Convolution algebra of a finite group: point masses as basis."""
    n = g.order
    space = SpaceRef(name, 0, n)
    p = np.zeros((n, n, n))
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    p[i, j, g.table] = 1.0
    # left regular representation: L_a e_s = e_{as}
    mats = np.zeros((n, n, n))
    mats[i, g.table, j] = 1.0
    return AlgebraStruct(space, MultiTensor((space, space), space, p), mats)


def conv_trilinear(g: CayleyTable, name: str = "A") -> MultiTensor:
    """``f(x, y, z) = x ⋆ y ⋆ z`` as a tri-linear map."""
    alg = group_algebra(g, name)
    p = alg.product.values
    s = alg.space
    return MultiTensor((s, s, s), s, np.einsum("ijs,skt->ijkt", p, p))


def matrix_algebra(n: int, name: str = "A") -> AlgebraStruct:
    """Full ``n x n`` matrix algebra; basis ``E_ij`` at index ``i*n + j``."""
    if n < 1:
        raise InputError("matrix size must be >= 1")
    mats = np.zeros((n * n, n, n))
    for i, j in itertools.product(range(n), repeat=2):
        mats[i * n + j, i, j] = 1.0
    space = SpaceRef(name, 0, n * n)
    return AlgebraStruct(space, MultiTensor((space, space), space, structure_constants(mats)), mats)


_E11 = np.array([[1.0, 0.0], [0.0, 0.0]])
_E12 = np.array([[0.0, 1.0], [0.0, 0.0]])


def _commutator_tensor(mats: np.ndarray, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of ``[m, b_a b_b b_c]`` and their distance from the span of ``mats``."""
    d = mats.shape[0]
    triple = np.einsum("aij,bjk,ckl->abcil", mats, mats, mats)
    comm = np.einsum("ij,abcjk->abcik", m, triple) - np.einsum("abcij,jk->abcik", triple, m)
    basis = mats.reshape(d, -1).T
    flat = comm.reshape(d**3, -1).T
    coef, *_ = np.linalg.lstsq(basis, flat, rcond=None)
    off = basis @ coef - flat
    return coef.T.reshape(d, d, d, d), off.T.reshape(d, d, d, -1)


def row_algebra_example(name: str = "A") -> tuple[AlgebraStruct, TriDerivationCandidate]:
    """Row matrices ``[[x, y], [0, 0]]`` with ``D(a, b, c) = [E12, abc]``.

    Basis ``u = E11`` (index 0), ``v = E12`` (index 1).
    """
    mats = np.stack([_E11, _E12])
    space = SpaceRef(name, 0, 2)
    alg = AlgebraStruct(space, MultiTensor((space, space), space, structure_constants(mats)), mats)
    coords, off = _commutator_tensor(mats, _E12)
    assert not off.any()
    cand = TriDerivationCandidate(MultiTensor((space,) * 3, space, coords), TargetKind.ALGEBRA)
    return alg, cand


def random_tensor(
    seed: int,
    dims: tuple[int, ...],
    names: tuple[str, ...] | None = None,
    integer: bool = False,
) -> MultiTensor:
    """Seeded dense tensor with axis dims ``(args..., result)``.

    Default names are X, Y, Z for arguments and W for the result.
    ``integer=True`` draws entries from -3..3 so all arithmetic stays exact.
    """
    if not 2 <= len(dims) <= 4:
        raise InputError("dims must list 1 to 3 argument dims plus the result dim")
    k = len(dims) - 1
    if names is None:
        names = ("X", "Y", "Z")[:k] + ("W",)
    rng = np.random.default_rng(seed)
    if integer:
        vals = rng.integers(-3, 4, size=dims).astype(np.float64)
    else:
        vals = rng.standard_normal(dims)
    spaces = tuple(SpaceRef(n, 0, d) for n, d in zip(names, dims))
    return MultiTensor(spaces[:-1], spaces[-1], vals)


def _inner_directions(algebra: AlgebraStruct) -> tuple[np.ndarray, np.ndarray]:
    """Ambient matrices ``m`` for which ``[m, abc]`` is an algebra-valued tri-derivation.

    Returns ``(null_basis, per_elementary_coords)``: rows of ``null_basis``
    are admissible ``m`` in elementary-matrix coordinates.
    """
    mats = algebra.matrices
    n = mats.shape[1]
    p = algebra.product.values
    cols, coords = [], []
    for k in range(n * n):
        e = np.zeros(n * n)
        e[k] = 1.0
        c, off = _commutator_tensor(mats, e.reshape(n, n))
        defects = leibniz_defects(c, (p, p, p), p, p)
        cols.append(np.concatenate([off.ravel()] + [x.ravel() for x in defects]))
        coords.append(c)
    system = np.stack(cols, axis=1)
    _, s, vt = np.linalg.svd(system)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
    return vt[rank:], np.stack(coords)


def random_triderivation(
    seed: int, algebra: AlgebraStruct, tol: float = DEFAULT_TOL
) -> TriDerivationCandidate:
    """Seeded inner tri-derivation ``D(a, b, c) = [m, abc]``.

    ``m`` is drawn from the ambient matrix algebra of ``algebra.matrices``,
    restricted to the subspace where the commutator stays inside the
    algebra and satisfies all three Leibniz identities.  For a full matrix
    algebra that subspace is the centre, so ``D`` vanishes.
    """
    if algebra.matrices is None:
        raise InputError("random_triderivation needs an algebra with a matrix realization")
    null, coords = _inner_directions(algebra)
    rng = np.random.default_rng(seed)
    m = rng.standard_normal(null.shape[0]) @ null
    vals = np.tensordot(m, coords, axes=(0, 0))
    vals[np.abs(vals) < 1e-13] = 0.0
    s = algebra.space
    cand = TriDerivationCandidate(MultiTensor((s, s, s), s, vals), TargetKind.ALGEBRA)
    check = is_tri_derivation(cand, algebra, tol)
    if not check:
        raise StructureError("generated map is not a tri-derivation", max(check.residuals))
    return cand


def inner_triderivation(
    algebra: AlgebraStruct, m, tol: float = DEFAULT_TOL
) -> TriDerivationCandidate:
    """``D(a, b, c) = [m, abc]`` for an ambient matrix ``m``.

    Raises StructureError when the commutator leaves the algebra or breaks
    a Leibniz identity.
    """
    if algebra.matrices is None:
        raise InputError("inner_triderivation needs an algebra with a matrix realization")
    m = np.asarray(m, dtype=np.float64)
    coords, off = _commutator_tensor(algebra.matrices, m)
    if np.max(np.abs(off), initial=0.0) > tol:
        raise StructureError("[m, abc] leaves the algebra", float(np.max(np.abs(off))))
    s = algebra.space
    cand = TriDerivationCandidate(MultiTensor((s, s, s), s, coords), TargetKind.ALGEBRA)
    check = is_tri_derivation(cand, algebra, tol)
    if not check:
        raise StructureError("[m, abc] is not a tri-derivation here", max(check.residuals))
    return cand


def leibniz_perturbation(
    algebra: AlgebraStruct, cand: TriDerivationCandidate, identity: int, eps: float = 0.1
) -> TriDerivationCandidate:
    """Push ``cand.D`` along one elementary direction so Leibniz identity ``identity`` breaks.

    The direction maximizes the defect of the chosen identity, ties going to
    the smallest defect in the other two.  Only algebra-valued targets.
    """
    if identity not in (1, 2, 3):
        raise InputError("identity must be 1, 2 or 3")
    if cand.target_kind is not TargetKind.ALGEBRA:
        raise InputError("perturbations are built for algebra-valued candidates")
    p = algebra.product.values
    d = algebra.dim
    best, best_key = None, None
    for k in range(d**4):
        e = np.zeros(d**4)
        e[k] = 1.0
        e = e.reshape(d, d, d, d)
        res = [float(np.max(np.abs(x))) for x in leibniz_defects(e, (p, p, p), p, p)]
        own = res[identity - 1]
        others = sum(res) - own
        key = (-own, others, k)
        if best_key is None or key < best_key:
            best, best_key = e, key
    if -best_key[0] == 0.0:
        raise StructureError("every elementary direction satisfies this identity")
    D = cand.D
    return TriDerivationCandidate(MultiTensor(D.arg_spaces, D.result_space, D.values + eps * best), cand.target_kind)
