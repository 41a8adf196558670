"""JSON file formats for tensors and module/tri-derivation bundles.

Tensor object::

    {"spaces": {"X": 2, "W": 3},
     "map": {"args": ["X", "X"], "arg_dual_levels": [0, 0],
             "result": "W", "result_dual_level": 0,
             "values": [...]}}

``values`` is flat, row-major, axis order args-then-result.  Shape errors
are reported with the line and column of the offending JSON value.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError
from .tensor import MultiTensor, SpaceRef

__all__ = [
    "locate",
    "tensor_from_obj",
    "tensor_to_obj",
    "loads_tensor",
    "load_tensor",
    "dumps_tensor",
    "parse_json",
    "bundle_from_obj",
    "bundle_to_obj",
    "loads_bundle",
    "load_bundle",
]

_WS = " \t\n\r"


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in _WS:
        i += 1
    return i


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def locate(text: str, path: list[Any]) -> tuple[int, int] | None:
    """Line and column (1-based) where the value at ``path`` starts in ``text``.

    ``path`` holds object keys and list indices.  Returns None when the path
    does not exist.  The text is assumed to be valid JSON.
    """
    decoder = json.JSONDecoder()
    i = _skip_ws(text, 0)
    for step in path:
        if i >= len(text):
            return None
        if text[i] == "{" and isinstance(step, str):
            i = _skip_ws(text, i + 1)
            found = False
            while i < len(text) and text[i] != "}":
                key, i = decoder.raw_decode(text, i)
                i = _skip_ws(text, i)
                i = _skip_ws(text, i + 1)  # ':'
                if key == step:
                    found = True
                    break
                _, i = decoder.raw_decode(text, i)
                i = _skip_ws(text, i)
                if text[i] == ",":
                    i = _skip_ws(text, i + 1)
            if not found:
                return None
        elif text[i] == "[" and isinstance(step, int):
            i = _skip_ws(text, i + 1)
            for _ in range(step):
                if text[i] == "]":
                    return None
                _, i = decoder.raw_decode(text, i)
                i = _skip_ws(text, i)
                if text[i] == ",":
                    i = _skip_ws(text, i + 1)
            if text[i] == "]":
                return None
        else:
            return None
    return _line_col(text, i)


def _where(text: str | None, path: list[Any]) -> str:
    if text is None:
        return "/".join(str(p) for p in path)
    pos = locate(text, path)
    where = "/".join(str(p) for p in path)
    if pos is None:
        return where
    return f"line {pos[0]}, column {pos[1]} ({where})"


def tensor_from_obj(obj: dict, text: str | None = None, path: list[Any] | None = None) -> MultiTensor:
    """Build a :class:`MultiTensor` from a decoded tensor object.

    ``text`` and ``path`` locate the object inside the raw file for diagnostics.
    """
    path = list(path or [])
    if not isinstance(obj, dict) or "spaces" not in obj or "map" not in obj:
        raise InputError(f"{_where(text, path)}: expected an object with 'spaces' and 'map'")
    spaces, m = obj["spaces"], obj["map"]
    if not isinstance(spaces, dict) or not all(
        isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in spaces.values()
    ):
        raise InputError(f"{_where(text, path + ['spaces'])}: 'spaces' must map names to positive ints")
    if not isinstance(m, dict):
        raise InputError(f"{_where(text, path + ['map'])}: 'map' must be an object")
    mpath = path + ["map"]
    try:
        args = list(m["args"])
        result = m["result"]
        values = m["values"]
    except KeyError as exc:
        raise InputError(f"{_where(text, mpath)}: missing key {exc.args[0]!r}") from None
    levels = m.get("arg_dual_levels", [0] * len(args))
    rlevel = m.get("result_dual_level", 0)
    if len(levels) != len(args):
        raise InputError(
            f"{_where(text, mpath + ['arg_dual_levels'])}: {len(levels)} dual levels for {len(args)} args"
        )
    if not 1 <= len(args) <= 3:
        raise InputError(f"{_where(text, mpath + ['args'])}: arity must be 1, 2 or 3, got {len(args)}")
    for k, name in enumerate(args + [result]):
        if name not in spaces:
            sub = ["args", k] if k < len(args) else ["result"]
            raise InputError(f"{_where(text, mpath + sub)}: undeclared space {name!r}")
    arg_refs = tuple(SpaceRef(n, int(lv), spaces[n]) for n, lv in zip(args, levels))
    res_ref = SpaceRef(result, int(rlevel), spaces[result])

    if not isinstance(values, list) or any(
        isinstance(v, (list, dict, str, bool)) or v is None for v in values
    ):
        raise InputError(f"{_where(text, mpath + ['values'])}: 'values' must be a flat array of numbers")
    expected = int(np.prod([s.dim for s in arg_refs + (res_ref,)]))
    if len(values) != expected:
        raise InputError(
            f"{_where(text, mpath + ['values'])}: values has length {len(values)}, "
            f"expected {expected} for {' x '.join(str(s.dim) for s in arg_refs)} -> {res_ref.dim}"
        )
    return MultiTensor(arg_refs, res_ref, np.asarray(values, dtype=np.float64))


def tensor_to_obj(t: MultiTensor) -> dict:
    spaces: dict[str, int] = {}
    for s in t.spaces:
        spaces.setdefault(s.name, s.dim)
    return {
        "spaces": spaces,
        "map": {
            "args": [s.name for s in t.arg_spaces],
            "arg_dual_levels": [s.dual_level for s in t.arg_spaces],
            "result": t.result_space.name,
            "result_dual_level": t.result_space.dual_level,
            "values": t.flat().tolist(),
        },
    }


def parse_json(text: str, source: str = "<string>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def loads_tensor(text: str, source: str = "<string>") -> MultiTensor:
    obj = parse_json(text, source)
    try:
        return tensor_from_obj(obj, text)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def load_tensor(path: str | Path) -> MultiTensor:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return loads_tensor(text, str(path))


def dumps_tensor(t: MultiTensor) -> str:
    return json.dumps(tensor_to_obj(t), indent=2)


def bundle_from_obj(obj: dict, text: str | None = None):
    """Decode a module/tri-derivation bundle.

    Returns ``(algebra, module_or_None, candidate)``; ``module`` is required
    for the ``module`` and ``dual`` targets.
    """
    from .arens import AlgebraStruct, ModuleStruct, TargetKind, TriDerivationCandidate

    if not isinstance(obj, dict):
        raise InputError("bundle must be a JSON object")
    for key in ("algebra", "D", "target"):
        if key not in obj:
            raise InputError(f"bundle is missing {key!r}")
    try:
        target = TargetKind(obj["target"])
    except ValueError:
        raise InputError(
            f"{_where(text, ['target'])}: target must be 'module', 'dual' or 'algebra'"
        ) from None
    product = tensor_from_obj(obj["algebra"], text, ["algebra"])
    if product.arity != 2:
        raise InputError(f"{_where(text, ['algebra', 'map', 'args'])}: the algebra product must be bilinear")
    algebra = AlgebraStruct(product.result_space, product)
    module = None
    if "module" in obj and obj["module"] is not None:
        mod = obj["module"]
        if not isinstance(mod, dict) or not {"X", "pi1", "pi2"} <= set(mod):
            raise InputError(f"{_where(text, ['module'])}: module needs 'X', 'pi1' and 'pi2'")
        left = tensor_from_obj(mod["pi1"], text, ["module", "pi1"])
        right = tensor_from_obj(mod["pi2"], text, ["module", "pi2"])
        if left.result_space.dim != mod["X"]:
            raise InputError(
                f"{_where(text, ['module', 'X'])}: X has dim {mod['X']} but pi1 lands in dim {left.result_space.dim}"
            )
        module = ModuleStruct(algebra, left.result_space, left, right)
    elif target is not TargetKind.ALGEBRA:
        raise InputError(f"target {target.value!r} needs a 'module' entry")
    D = tensor_from_obj(obj["D"], text, ["D"])
    return algebra, module, TriDerivationCandidate(D, target)


def loads_bundle(text: str, source: str = "<string>"):
    obj = parse_json(text, source)
    try:
        return bundle_from_obj(obj, text)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def load_bundle(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return loads_bundle(text, str(path))


def bundle_to_obj(algebra, candidate, module=None) -> dict:
    obj = {"algebra": tensor_to_obj(algebra.product)}
    if module is not None:
        obj["module"] = {
            "X": module.space.dim,
            "pi1": tensor_to_obj(module.left),
            "pi2": tensor_to_obj(module.right),
        }
    obj["D"] = tensor_to_obj(candidate.D)
    obj["target"] = candidate.target_kind.value
    return obj
