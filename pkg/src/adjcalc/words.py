"""Words over {adjoint, flip}: parsing, normal forms, signatures, equivalence.

Superscripts compose left to right: ``f^{4r}`` is the flip of ``f****``.

Grammar (EBNF)::

    expr    = base [ "^" ] ( "{" word "}" | word ) ;
    base    = letter [ "_" alnum { alnum } ] ;
    word    = { "*" | "r" | digits } ;        (* digits n expand to n stars *)

Equivalence is decided by breadth-first search over normal forms.  The only
rewrite is the regularity rule: whenever the map ``f^u`` is assumed regular,
``u . **** . v`` and ``u . r****r . v`` denote the same map.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InputError, ParseError
from .tensor import MultiTensor, SpaceRef, adjoint, flip

__all__ = [
    "STAR",
    "FLIP",
    "AdjWord",
    "NormalWord",
    "Signature",
    "RegularityAssumptions",
    "Verdict",
    "EquivalenceResult",
    "parse",
    "parse_letters",
    "normalize",
    "infer_signature",
    "neighbors",
    "equivalence_class",
    "equivalent",
    "tensor_semantics",
    "DEFAULT_DEPTH",
]

STAR = "*"
FLIP = "r"
DEFAULT_DEPTH = 12
_REGULARITY_BLOCK = (STAR,) * 4


@dataclass(frozen=True)
class AdjWord:
    base: str
    letters: tuple[str, ...] = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        bad = [x for x in letters if x not in (STAR, FLIP)]
        if bad:
            raise InputError(f"letters must be '*' or 'r', got {bad[0]!r}")
        object.__setattr__(self, "letters", letters)

    @property
    def word(self) -> str:
        return "".join(self.letters)

    def compact(self) -> str:
        """Printer using the digit shorthand for runs of two or more stars."""
        out, run = [], 0
        for x in self.letters + (FLIP,):
            if x == STAR:
                run += 1
                continue
            if run:
                out.append(STAR if run == 1 else str(run))
                run = 0
            out.append(x)
        return self.base + "".join(out[:-1])

    def __str__(self):
        return self.base + self.word


def _lex_word(text: str, start: int, stop: int) -> list[str]:
    letters: list[str] = []
    i = start
    while i < stop:
        ch = text[i]
        if ch == STAR or ch == FLIP:
            letters.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < stop and text[j].isdigit():
                j += 1
            letters.extend([STAR] * int(text[i:j]))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    return letters


def parse_letters(text: str) -> tuple[str, ...]:
    """Parse a bare word (no base), e.g. ``"r2"`` or ``""`` for the empty word."""
    return tuple(_lex_word(text, 0, len(text)))


def parse(text: str) -> AdjWord:
    if not text:
        raise ParseError("empty expression; expected a base identifier", 0)
    if not text[0].isalpha():
        raise ParseError(f"expected a base identifier, found {text[0]!r}", 0)
    i = 1
    if i < len(text) and text[i] == "_":
        j = i + 1
        while j < len(text) and text[j].isalnum():
            j += 1
        if j == i + 1:
            raise ParseError("empty subscript after '_'", i + 1)
        i = j
    base = text[:i]
    if i < len(text) and text[i] == "^":
        i += 1
    stop = len(text)
    if i < len(text) and text[i] == "{":
        if not text.endswith("}"):
            raise ParseError("unterminated '{'", len(text))
        i += 1
        stop = len(text) - 1
    return AdjWord(base, tuple(_lex_word(text, i, stop)))


@dataclass(frozen=True, order=True)
class NormalWord:
    """``*^{c0} r *^{c1} r ... r *^{cm}``; interior blocks are never empty."""

    blocks: tuple[int, ...] = (0,)

    def __post_init__(self):
        b = tuple(self.blocks)
        if not b or any(c < 0 for c in b):
            raise InputError(f"invalid block list {b}")
        if any(c == 0 for c in b[1:-1]):
            raise InputError(f"block list {b} is not reduced: empty interior block")
        object.__setattr__(self, "blocks", b)

    @property
    def letters(self) -> tuple[str, ...]:
        out: list[str] = [STAR] * self.blocks[0]
        for c in self.blocks[1:]:
            out.append(FLIP)
            out.extend([STAR] * c)
        return tuple(out)

    @property
    def stars(self) -> int:
        return sum(self.blocks)

    @property
    def flips(self) -> int:
        return len(self.blocks) - 1

    def __str__(self):
        return "".join(self.letters) or "ε"


def normalize(w: AdjWord | NormalWord | Iterable[str]) -> NormalWord:
    """Cancel adjacent flip pairs; stars never cancel."""
    if isinstance(w, NormalWord):
        return w
    letters = w.letters if isinstance(w, AdjWord) else tuple(w)
    blocks = [0]
    for x in letters:
        if x == STAR:
            blocks[-1] += 1
        elif x == FLIP:
            if blocks[-1] == 0 and len(blocks) > 1:
                blocks.pop()
            else:
                blocks.append(0)
        else:
            raise InputError(f"letters must be '*' or 'r', got {x!r}")
    return NormalWord(tuple(blocks))


@dataclass(frozen=True)
class Signature:
    arg_spaces: tuple[SpaceRef, ...]
    result_space: SpaceRef

    @property
    def arity(self) -> int:
        return len(self.arg_spaces)

    @classmethod
    def of(cls, t: MultiTensor) -> Signature:
        return cls(t.arg_spaces, t.result_space)

    def star(self) -> Signature:
        return Signature(
            (self.result_space.dual,) + self.arg_spaces[:-1], self.arg_spaces[-1].dual
        )

    def flip(self) -> Signature:
        return Signature(self.arg_spaces[::-1], self.result_space)

    def accepts(self, slot: int, space: SpaceRef) -> bool:
        """Whether slot ``slot`` (1-based) takes ``space`` via a canonical embedding.

        A lower dual of the same parity embeds canonically, e.g. ``W*`` in ``W***``.
        """
        want = self.arg_spaces[slot - 1]
        return (
            want.name == space.name
            and want.dim == space.dim
            and space.dual_level <= want.dual_level
            and (want.dual_level - space.dual_level) % 2 == 0
        )

    def format(self, with_dim: bool = False) -> str:
        args = " × ".join(s.label(with_dim) for s in self.arg_spaces)
        return f"{args} → {self.result_space.label(with_dim)}"

    def __str__(self):
        return self.format()


def infer_signature(base_sig: Signature, w: AdjWord | NormalWord | Iterable[str]) -> Signature:
    if not 1 <= base_sig.arity <= 3:
        raise InputError(f"base arity must be 1, 2 or 3, got {base_sig.arity}")
    letters = w.letters if isinstance(w, (AdjWord, NormalWord)) else tuple(w)
    sig = base_sig
    for x in letters:
        sig = sig.star() if x == STAR else sig.flip()
    return sig


class RegularityAssumptions:
    """Words ``u`` for which the map ``f^u`` is assumed regular.

    ``everything=True`` assumes every word (true in finite dimensions).
    """

    def __init__(self, words: Iterable = (), everything: bool = False):
        self.words = frozenset(normalize(_as_letters(u)) for u in words)
        self.everything = everything

    @classmethod
    def all(cls) -> RegularityAssumptions:
        return cls(everything=True)

    def holds(self, u: NormalWord) -> bool:
        return self.everything or u in self.words

    def __repr__(self):
        if self.everything:
            return "RegularityAssumptions(all)"
        return f"RegularityAssumptions({sorted(str(u) for u in self.words)})"


def _as_letters(u) -> tuple[str, ...]:
    if isinstance(u, str):
        return parse_letters(u)
    if isinstance(u, (AdjWord, NormalWord)):
        return u.letters
    return tuple(u)


class Verdict(enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    NOT_SHOWN = "NOT_SHOWN"


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: Verdict
    steps: int | None = None
    chain: tuple[NormalWord, ...] = ()

    def __bool__(self):
        return self.verdict is Verdict.EQUIVALENT


def neighbors(w: NormalWord, assumptions: RegularityAssumptions) -> Iterator[NormalWord]:
    """Words one regularity rewrite away from ``w`` (in either direction).

    Every occurrence ``w = p . **** . q`` yields ``p . r****r . q``.  Read
    forward this needs ``p`` regular; read backward (from the representation
    ``(pr) . r****r . (rq)``) it needs ``pr`` regular.  Both readings land on
    the same normal word, so the neighbour relation is symmetric.
    """
    letters = w.letters
    for i in range(len(letters) - 3):
        if letters[i : i + 4] != _REGULARITY_BLOCK:
            continue
        p = letters[:i]
        if assumptions.holds(normalize(p)) or assumptions.holds(normalize(p + (FLIP,))):
            yield normalize(p + (FLIP,) + _REGULARITY_BLOCK + (FLIP,) + letters[i + 4 :])


def equivalence_class(
    w: AdjWord | NormalWord,
    assumptions: RegularityAssumptions,
    depth: int = DEFAULT_DEPTH,
) -> dict[NormalWord, int]:
    """All normal words reachable from ``w`` within ``depth`` rewrites, with distances."""
    if depth < 1:
        raise InputError("depth must be >= 1")
    start = normalize(w)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if dist[u] == depth:
            continue
        for v in neighbors(u, assumptions):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def equivalent(
    w1: AdjWord | NormalWord,
    w2: AdjWord | NormalWord,
    assumptions: RegularityAssumptions | None = None,
    depth: int = DEFAULT_DEPTH,
) -> EquivalenceResult:
    """Bounded search for a rewrite chain from ``w1`` to ``w2``.

    Sound but incomplete: NOT_SHOWN does not mean the words differ.
    """
    if depth < 1:
        raise InputError("depth must be >= 1")
    if isinstance(w1, AdjWord) and isinstance(w2, AdjWord) and w1.base != w2.base:
        raise InputError(f"words over different base maps: {w1.base!r} vs {w2.base!r}")
    assumptions = assumptions or RegularityAssumptions()
    a, b = normalize(w1), normalize(w2)
    if a == b:
        return EquivalenceResult(Verdict.EQUIVALENT, 0, (a,))
    # rewrites preserve the star count and the flip parity
    if a.stars != b.stars or (a.flips - b.flips) % 2:
        return EquivalenceResult(Verdict.NOT_SHOWN)

    parent: dict[NormalWord, NormalWord | None] = {a: None}
    level = {a: 0}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if level[u] == depth:
            continue
        for v in neighbors(u, assumptions):
            if v in parent:
                continue
            parent[v] = u
            level[v] = level[u] + 1
            if v == b:
                chain = [v]
                while parent[chain[-1]] is not None:
                    chain.append(parent[chain[-1]])
                return EquivalenceResult(Verdict.EQUIVALENT, level[v], tuple(reversed(chain)))
            queue.append(v)
    return EquivalenceResult(Verdict.NOT_SHOWN)


def tensor_semantics(w: AdjWord | NormalWord | Iterable[str], base: MultiTensor) -> MultiTensor:
    """The concrete tensor ``base^w``."""
    letters = w.letters if isinstance(w, (AdjWord, NormalWord)) else tuple(w)
    t = base
    for x in letters:
        t = adjoint(t) if x == STAR else flip(t)
    return t
