"""Dense coordinate realization of k-linear maps between finite-dimensional spaces.

A :class:`MultiTensor` of arity ``k`` stores the value array of a map
``A1 x ... x Ak -> B`` with axis order ``(a1, ..., ak, b)``.  Every space
carries a dual level (0 = base space, 1 = dual, ...), tracked exactly.

Under this storage convention the adjoint is a single axis rotation (the
result axis moves to the front) and the flip reverses the argument axes.
Both are pure permutations, so they are bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Callable, Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "SpaceRef",
    "MultiTensor",
    "Vector",
    "RegularityResult",
    "adjoint",
    "adjoint_n",
    "flip",
    "double_adjoint",
    "evaluate",
    "pair",
    "basis_vector",
    "embed",
    "canonical_embedding",
    "identity_map",
    "compose_linear_after",
    "compose_into_slot",
    "max_abs_difference",
    "is_regular",
    "regularity_criteria",
    "iterated_limit_eval",
    "linearized_rank",
    "factors",
    "DEFAULT_TOL",
    "DEFAULT_HORIZON",
]

DEFAULT_TOL = 1e-9
DEFAULT_HORIZON = 64


@dataclass(frozen=True)
class SpaceRef:
    """A named finite-dimensional space at a given dual level."""

    name: str
    dual_level: int
    dim: int

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise InputError("space name must be a non-empty string")
        if self.dual_level < 0:
            raise InputError(f"negative dual level for space {self.name}")
        if self.dim < 1:
            raise InputError(f"space {self.name} must have dim >= 1, got {self.dim}")

    @property
    def dual(self) -> SpaceRef:
        return SpaceRef(self.name, self.dual_level + 1, self.dim)

    def raised(self, levels: int) -> SpaceRef:
        return SpaceRef(self.name, self.dual_level + levels, self.dim)

    def same_up_to_even_duals(self, other: SpaceRef) -> bool:
        return (
            self.name == other.name
            and self.dim == other.dim
            and (self.dual_level - other.dual_level) % 2 == 0
        )

    def label(self, with_dim: bool = False) -> str:
        s = self.name + "*" * self.dual_level
        return f"{s}({self.dim})" if with_dim else s

    def __str__(self):
        return self.label()


def _check_consistent_dims(spaces: Sequence[SpaceRef]) -> None:
    dims: dict[str, int] = {}
    for s in spaces:
        if dims.setdefault(s.name, s.dim) != s.dim:
            raise InputError(
                f"space {s.name} used with two different dimensions ({dims[s.name]} and {s.dim})"
            )


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MultiTensor:
    """A k-linear map ``arg_spaces[0] x ... x arg_spaces[k-1] -> result_space``.

    ``values`` is accepted flat (row-major) or already shaped; it is stored
    as a read-only array of shape ``(d1, ..., dk, d_result)``.
    """

    arg_spaces: tuple[SpaceRef, ...]
    result_space: SpaceRef
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        args = tuple(self.arg_spaces)
        object.__setattr__(self, "arg_spaces", args)
        if not 1 <= len(args) <= 3:
            raise InputError(f"arity must be 1, 2 or 3, got {len(args)}")
        _check_consistent_dims(args + (self.result_space,))
        shape = tuple(s.dim for s in args) + (self.result_space.dim,)
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size != prod(shape):
            raise InputError(
                f"values length {arr.size} does not match axis dims {shape} (expected {prod(shape)})"
            )
        arr = _frozen(arr.reshape(shape))
        if not np.all(np.isfinite(arr)):
            raise InputError("tensor entries must be finite")
        object.__setattr__(self, "values", arr)

    @property
    def arity(self) -> int:
        return len(self.arg_spaces)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def spaces(self) -> tuple[SpaceRef, ...]:
        return self.arg_spaces + (self.result_space,)

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def signature_str(self, with_dim: bool = False) -> str:
        args = " × ".join(s.label(with_dim) for s in self.arg_spaces)
        return f"{args} → {self.result_space.label(with_dim)}"

    def __call__(self, *args: Vector) -> Vector:
        return evaluate(self, list(args))

    def __eq__(self, other):
        if not isinstance(other, MultiTensor):
            return NotImplemented
        return self.spaces == other.spaces and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.spaces, self.values.tobytes()))

    def __repr__(self):
        return f"MultiTensor({self.signature_str(with_dim=True)})"


@dataclass(frozen=True, eq=False)
class Vector:
    """An element of ``space`` in canonical-basis coordinates."""

    space: SpaceRef
    coords: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.coords).ravel()
        if arr.shape != (self.space.dim,):
            raise InputError(
                f"vector in {self.space} needs {self.space.dim} coordinates, got {arr.size}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def __add__(self, other: Vector) -> Vector:
        if other.space != self.space:
            raise InputError(f"cannot add vectors of {self.space} and {other.space}")
        return Vector(self.space, self.coords + other.coords)

    def __mul__(self, scalar: float) -> Vector:
        return Vector(self.space, self.coords * scalar)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Vector):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.space, self.coords.tobytes()))

    def __repr__(self):
        return f"Vector({self.space}, {self.coords.tolist()})"


def basis_vector(space: SpaceRef, i: int) -> Vector:
    e = np.zeros(space.dim)
    e[i] = 1.0
    return Vector(space, e)


def adjoint(t: MultiTensor) -> MultiTensor:
    """``g: A1 x ... x Ak -> B``  to  ``g*: B* x A1 x ... x A(k-1) -> Ak*``."""
    new_args = (t.result_space.dual,) + t.arg_spaces[:-1]
    new_result = t.arg_spaces[-1].dual
    return MultiTensor(new_args, new_result, np.moveaxis(t.values, -1, 0))


def adjoint_n(t: MultiTensor, n: int) -> MultiTensor:
    for _ in range(n):
        t = adjoint(t)
    return t


def double_adjoint(t: MultiTensor) -> MultiTensor:
    return adjoint(adjoint(t))


def flip(t: MultiTensor) -> MultiTensor:
    k = t.arity
    perm = tuple(reversed(range(k))) + (k,)
    return MultiTensor(t.arg_spaces[::-1], t.result_space, np.transpose(t.values, perm))


def _check_arg(expected: SpaceRef, got: SpaceRef, what: str) -> None:
    if expected != got:
        raise InputError(f"{what}: expected a vector of {expected.label(True)}, got {got.label(True)}")


def evaluate(t: MultiTensor, args: Sequence[Vector]) -> Vector:
    """Full contraction of ``t`` against one vector per argument slot."""
    if len(args) != t.arity:
        raise InputError(f"map of arity {t.arity} applied to {len(args)} arguments")
    out = t.values
    for i, (space, v) in enumerate(zip(t.arg_spaces, args)):
        _check_arg(space, v.space, f"argument {i + 1}")
        out = np.tensordot(v.coords, out, axes=(0, 0))
    return Vector(t.result_space, out)


def pair(functional: Vector, v: Vector) -> float:
    """Duality pairing ``<functional, v>``; ``functional`` must live in the dual of ``v.space``."""
    if functional.space != v.space.dual:
        raise InputError(f"cannot pair {functional.space} with {v.space}")
    return float(np.dot(functional.coords, v.coords))


def embed(v: Vector, levels: int = 2) -> Vector:
    """Canonical image of ``v`` in the ``levels``-th higher dual (``levels`` even)."""
    if levels % 2:
        raise InputError("canonical embeddings raise the dual level by an even amount")
    return Vector(v.space.raised(levels), v.coords)


def identity_map(space: SpaceRef) -> MultiTensor:
    return MultiTensor((space,), space, np.eye(space.dim))


def canonical_embedding(space: SpaceRef) -> MultiTensor:
    """The canonical map ``E -> E**``; in coordinates the identity matrix."""
    return MultiTensor((space,), space.raised(2), np.eye(space.dim))


def compose_linear_after(h: MultiTensor, t: MultiTensor) -> MultiTensor:
    """``h o t`` for a linear ``h`` whose domain is the codomain of ``t``."""
    if h.arity != 1:
        raise InputError("compose_linear_after needs a linear (arity-1) outer map")
    _check_arg(h.arg_spaces[0], t.result_space, "domain of h")
    vals = np.tensordot(t.values, h.values, axes=([t.arity], [0]))
    return MultiTensor(t.arg_spaces, h.result_space, vals)


def compose_into_slot(g: MultiTensor, h: MultiTensor, slot: int) -> MultiTensor:
    """Precompose slot ``slot`` (1-based) of ``g`` with the linear map ``h``."""
    if h.arity != 1:
        raise InputError("compose_into_slot needs a linear (arity-1) inner map")
    if not 1 <= slot <= g.arity:
        raise InputError(f"slot must be in 1..{g.arity}, got {slot}")
    i = slot - 1
    _check_arg(g.arg_spaces[i], h.result_space, f"slot {slot} of g")
    # H[a, s] G[.., s, ..] -> new axis a lands first, move it back into place
    vals = np.tensordot(h.values, g.values, axes=([1], [i]))
    vals = np.moveaxis(vals, 0, i)
    args = g.arg_spaces[:i] + (h.arg_spaces[0],) + g.arg_spaces[i + 1 :]
    return MultiTensor(args, g.result_space, vals)


def max_abs_difference(s: MultiTensor, t: MultiTensor) -> float:
    """Entrywise sup-distance, allowing signatures that differ by even dual shifts."""
    if s.arity != t.arity or not all(
        a.same_up_to_even_duals(b) for a, b in zip(s.spaces, t.spaces)
    ):
        raise InputError(
            f"cannot compare {s.signature_str()} with {t.signature_str()}: "
            "signatures differ by more than an even dual shift"
        )
    if s.values.size == 0:
        return 0.0
    return float(np.max(np.abs(s.values - t.values)))


@dataclass(frozen=True)
class RegularityResult:
    regular: bool
    residual: float

    def __bool__(self):
        return self.regular


def is_regular(t: MultiTensor, tol: float = DEFAULT_TOL) -> RegularityResult:
    """Compare ``t****`` with ``t^{r****r}`` entrywise."""
    if t.arity != 3:
        raise InputError(f"regularity is defined here for tri-linear maps, got arity {t.arity}")
    fourth = adjoint_n(t, 4)
    other = flip(adjoint_n(flip(t), 4))
    res = max_abs_difference(fourth, other)
    return RegularityResult(res <= tol, res)


def _restrict_roundtrip_residual(images: np.ndarray, space: SpaceRef) -> float:
    # images live in space***; restrict along E -> E** then re-embed E* -> E***
    kappa = canonical_embedding(space)
    restrict = adjoint(kappa)
    reembed = canonical_embedding(restrict.result_space)
    back = images @ restrict.values @ reembed.values
    return float(np.max(np.abs(images - back))) if images.size else 0.0


def regularity_criteria(t: MultiTensor, tol: float = DEFAULT_TOL) -> dict[str, float]:
    """Residuals of the adjoint-level regularity criteria for a tri-linear map.

    Keys:
      ``fifth_vs_flipped``: ``t*****`` against ``t^{r*******r}``;
      ``middle_in_Y*``: image of ``t^{***r*}`` on ``X** x W* x Z`` tested for
      membership in ``Y*`` by a canonical-embedding round trip;
      ``last_in_Z*``: image of ``t*****`` on ``W* x X** x Y**`` tested for ``Z*``.
    """
    if t.arity != 3:
        raise InputError("regularity criteria need a tri-linear map")
    out = {"fifth_vs_flipped": max_abs_difference(adjoint_n(t, 5), flip(adjoint_n(flip(t), 7)))}

    mid = adjoint(flip(adjoint_n(t, 3)))  # X** x W* x Z** -> Y***
    mid = compose_into_slot(mid, canonical_embedding(t.arg_spaces[2]), 3)
    out["middle_in_Y*"] = _restrict_roundtrip_residual(
        mid.values.reshape(-1, mid.result_space.dim), t.arg_spaces[1]
    )

    last = adjoint_n(t, 5)  # W*** x X** x Y** -> Z***
    last = compose_into_slot(last, canonical_embedding(t.result_space.dual), 1)
    out["last_in_Z*"] = _restrict_roundtrip_residual(
        last.values.reshape(-1, last.result_space.dim), t.arg_spaces[2]
    )
    return out


def _sample(seq, horizon: int) -> list[Vector]:
    if callable(seq):
        return [seq(n) for n in range(horizon)]
    seq = list(seq)
    if not seq:
        raise InputError("empty sequence")
    if len(seq) > horizon:
        raise InputError(f"sequence longer than the horizon ({len(seq)} > {horizon})")
    return seq + [seq[-1]] * (horizon - len(seq))


def _limit_along(values: np.ndarray, axis: int, horizon: int) -> np.ndarray:
    """Limit of eventually-constant scalar sequences stacked along ``axis``."""
    tail = np.take(values, [horizon - 1], axis=axis)
    same = np.all(values == tail, axis=tuple(a for a in range(values.ndim) if a != axis))
    changes = np.nonzero(~same)[0]
    settle = int(changes[-1]) + 1 if changes.size else 0
    if settle > horizon // 2:
        raise InputError(
            f"scalar sequence still moving at index {settle - 1}; not eventually constant "
            f"within horizon {horizon}"
        )
    return np.squeeze(tail, axis=axis)


def iterated_limit_eval(
    t: MultiTensor,
    seqs: Sequence[Sequence[Vector] | Callable[[int], Vector]],
    order: Sequence[int],
    functional: Vector,
    horizon: int = DEFAULT_HORIZON,
) -> float:
    """``lim_{order[0]} lim_{order[1]} lim_{order[2]} <functional, t(x_a, y_b, z_c)>``.

    Sequences are finite lists (the last term repeats forever) or callables
    ``n -> Vector``.  Each is sampled on ``0..horizon-1`` and must settle
    in the first half of that window.  ``order`` lists slot numbers from
    the outermost limit to the innermost.
    """
    if t.arity != 3 or len(seqs) != 3:
        raise InputError("iterated limits need a tri-linear map and three sequences")
    if sorted(order) != [1, 2, 3]:
        raise InputError(f"order must be a permutation of (1, 2, 3), got {tuple(order)}")
    if functional.space != t.result_space.dual:
        raise InputError(f"functional must live in {t.result_space.dual}, got {functional.space}")

    stacks = []
    for i, seq in enumerate(seqs):
        terms = _sample(seq, horizon)
        for v in terms:
            _check_arg(t.arg_spaces[i], v.space, f"sequence {i + 1}")
        stacks.append(np.stack([v.coords for v in terms]))

    form = np.tensordot(t.values, functional.coords, axes=([3], [0]))
    # contract the last slot first, then the middle, then the first
    cube = np.tensordot(form, stacks[2], axes=([2], [1]))  # (x, y, n3)
    cube = np.tensordot(cube, stacks[1], axes=([1], [1]))  # (x, n3, n2)
    cube = np.tensordot(cube, stacks[0], axes=([0], [1]))  # (n3, n2, n1)
    cube = np.transpose(cube, (2, 1, 0))  # axis i <-> slot i+1

    remaining = [1, 2, 3]
    for slot in reversed(list(order)):
        axis = remaining.index(slot)
        cube = _limit_along(cube, axis, horizon)
        remaining.pop(axis)
    return float(cube)


def linearized_rank(t: MultiTensor) -> int:
    mat = t.values.reshape(-1, t.result_space.dim)
    return int(np.linalg.matrix_rank(mat)) if mat.any() else 0


def factors(t: MultiTensor) -> bool:
    """Surjectivity proxy: the linearization has full rank onto the result space."""
    return linearized_rank(t) == t.result_space.dim
