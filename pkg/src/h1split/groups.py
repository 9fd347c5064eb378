"""Finitely generated groups with cheap exact normal forms.

Two families are supported: free groups of finite rank, whose elements are
reduced words, and finite permutation groups, whose elements are enumerated
breadth-first over the Cayley graph so every element carries a shortest
witness word.

Words are tuples of signed, 1-based generator indices: ``+i`` is the i-th
positive generator, ``-i`` its inverse. Permutations act on the left and
compose as ``(a * b)(x) == a(b(x))``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence


class GroupMismatchError(ValueError):
    """Raised when combining elements that belong to different groups."""


def _default_labels(k: int) -> tuple[str, ...]:
    if k <= len(string.ascii_lowercase):
        return tuple(string.ascii_lowercase[:k])
    return tuple(f"g{i}" for i in range(1, k + 1))


def reduce_word(word: Iterable[int]) -> tuple[int, ...]:
    """Cancel adjacent inverse pairs until no ``x, -x`` pair remains."""
    out: list[int] = []
    for ltr in word:
        ltr = int(ltr)
        if ltr == 0:
            raise ValueError("letter 0 is not a valid generator index")
        if out and out[-1] == -ltr:
            out.pop()
        else:
            out.append(ltr)
    return tuple(out)


class _Group:
    """Shared label/word bookkeeping for both group families."""

    labels: tuple[str, ...]

    @property
    def num_generators(self) -> int:
        return len(self.labels)

    def letters(self) -> tuple[int, ...]:
        """All letters of the symmetric generating set: positives, then inverses."""
        k = self.num_generators
        return tuple(range(1, k + 1)) + tuple(-i for i in range(1, k + 1))

    def letter_label(self, ltr: int) -> str:
        if ltr > 0:
            return self.labels[ltr - 1]
        return self.labels[-ltr - 1] + "^-1"

    def letter_element(self, ltr: int):
        g = self.generator(abs(ltr) - 1)
        return g if ltr > 0 else ~g

    def format_word(self, word: Sequence[int]) -> str:
        if not word:
            return "e"
        return " ".join(self.letter_label(ltr) for ltr in word)

    def parse_word(self, text: str):
        """Parse ``"a b^-1"`` style words (also ``*``-separated) into an element."""
        tokens = text.replace("*", " ").split()
        g = self.identity()
        if tokens == ["e"]:
            return g
        by_label = {lab: i + 1 for i, lab in enumerate(self.labels)}
        for tok in tokens:
            name, _, exp = tok.partition("^")
            if name not in by_label:
                raise ValueError(f"unknown generator {name!r} in word {text!r}")
            power = 1
            if exp:
                try:
                    power = int(exp)
                except ValueError:
                    raise ValueError(f"bad exponent in token {tok!r}") from None
            base = self.letter_element(by_label[name])
            step = base if power >= 0 else ~base
            for _ in range(abs(power)):
                g = g * step
        return g

    def generator(self, i: int):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError


class FreeGroup(_Group):
    """Free group of finite rank; elements are reduced words."""

    def __init__(self, rank: int, labels: Sequence[str] | None = None):
        rank = int(rank)
        if rank < 1:
            raise ValueError("rank must be >= 1")
        self.rank = rank
        self.labels = tuple(labels) if labels is not None else _default_labels(rank)
        if len(self.labels) != rank or len(set(self.labels)) != rank:
            raise ValueError("labels must be distinct and match the rank")

    def __repr__(self) -> str:
        return f"FreeGroup(rank={self.rank}, labels={self.labels})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeGroup)
            and self.rank == other.rank
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash(("FreeGroup", self.rank, self.labels))

    def identity(self) -> "FreeElement":
        return FreeElement(self, ())

    def generator(self, i: int) -> "FreeElement":
        if not 0 <= i < self.rank:
            raise IndexError(f"generator index {i} out of range")
        return FreeElement(self, (i + 1,))

    def gens(self) -> list["FreeElement"]:
        return [self.generator(i) for i in range(self.rank)]

    def element(self, word: Iterable[int]) -> "FreeElement":
        word = reduce_word(word)
        for ltr in word:
            if not 1 <= abs(ltr) <= self.rank:
                raise ValueError(f"letter {ltr} out of range for rank {self.rank}")
        return FreeElement(self, word)

    def word_of(self, g: "FreeElement") -> tuple[int, ...]:
        return g.word


class FreeElement:
    __slots__ = ("group", "word")

    def __init__(self, group: FreeGroup, word: tuple[int, ...]):
        # word is assumed reduced; go through FreeGroup.element for raw input
        self.group = group
        self.word = word

    @property
    def is_identity(self) -> bool:
        return not self.word

    def __mul__(self, other: "FreeElement") -> "FreeElement":
        if not isinstance(other, FreeElement):
            return NotImplemented
        if self.group != other.group:
            raise GroupMismatchError("elements belong to different free groups")
        return FreeElement(self.group, reduce_word(self.word + other.word))

    def __invert__(self) -> "FreeElement":
        return FreeElement(self.group, tuple(-l for l in reversed(self.word)))

    def inverse(self) -> "FreeElement":
        return ~self

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeElement)
            and self.group == other.group
            and self.word == other.word
        )

    def __hash__(self) -> int:
        return hash((self.group, self.word))

    def __repr__(self) -> str:
        return self.group.format_word(self.word)


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # (a * b)(x) = a(b(x))
    return tuple(a[b[x]] for x in range(len(a)))


def _invert_perm(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass
class CayleyEnumeration:
    """BFS enumeration of a finite permutation group.

    ``words[i]`` is a shortest word (letters multiply left to right) producing
    ``perms[i]``; edge tuples are ``(source index, letter, target index)``.
    """

    perms: tuple[tuple[int, ...], ...]
    index: dict
    words: tuple[tuple[int, ...], ...]
    tree_edges: tuple[tuple[int, int, int], ...]
    nontree_edges: tuple[tuple[int, int, int], ...]

    def __len__(self) -> int:
        return len(self.perms)


class PermGroup(_Group):
    """Finite group given by permutation generators on ``{0..degree-1}``."""

    def __init__(
        self,
        degree: int,
        generators: Sequence[Sequence[int]],
        labels: Sequence[str] | None = None,
    ):
        degree = int(degree)
        if degree < 1:
            raise ValueError("degree must be >= 1")
        if not generators:
            raise ValueError("at least one generator is required")
        perms = []
        for g in generators:
            p = tuple(int(x) for x in g)
            if sorted(p) != list(range(degree)):
                raise ValueError(f"{g!r} is not a permutation of 0..{degree - 1}")
            perms.append(p)
        self.degree = degree
        self.gen_perms = tuple(perms)
        self.labels = (
            tuple(labels) if labels is not None else _default_labels(len(perms))
        )
        if len(self.labels) != len(perms) or len(set(self.labels)) != len(perms):
            raise ValueError("labels must be distinct and match the generators")
        self._enum: CayleyEnumeration | None = None

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, generators={self.gen_perms})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PermGroup)
            and self.degree == other.degree
            and self.gen_perms == other.gen_perms
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash(("PermGroup", self.degree, self.gen_perms, self.labels))

    def enumeration(self) -> CayleyEnumeration:
        if self._enum is None:
            self._enum = self._bfs()
        return self._enum

    def _bfs(self) -> CayleyEnumeration:
        k = len(self.gen_perms)
        letter_perm = {i + 1: self.gen_perms[i] for i in range(k)}
        letter_perm.update({-(i + 1): _invert_perm(self.gen_perms[i]) for i in range(k)})
        ident = tuple(range(self.degree))
        perms = [ident]
        index = {ident: 0}
        words: list[tuple[int, ...]] = [()]
        tree: list[tuple[int, int, int]] = []
        nontree: list[tuple[int, int, int]] = []
        pos = 0
        order = list(range(1, k + 1)) + [-(i + 1) for i in range(k)]
        while pos < len(perms):
            g = perms[pos]
            for ltr in order:
                h = _compose(g, letter_perm[ltr])
                j = index.get(h)
                if j is None:
                    j = len(perms)
                    index[h] = j
                    perms.append(h)
                    words.append(words[pos] + (ltr,))
                    tree.append((pos, ltr, j))
                else:
                    nontree.append((pos, ltr, j))
            pos += 1
        return CayleyEnumeration(
            perms=tuple(perms),
            index=index,
            words=tuple(words),
            tree_edges=tuple(tree),
            nontree_edges=tuple(nontree),
        )

    def order(self) -> int:
        return len(self.enumeration())

    def identity(self) -> "PermElement":
        return self.element_from_perm(tuple(range(self.degree)))

    def generator(self, i: int) -> "PermElement":
        if not 0 <= i < len(self.gen_perms):
            raise IndexError(f"generator index {i} out of range")
        return self.element_from_perm(self.gen_perms[i])

    def gens(self) -> list["PermElement"]:
        return [self.generator(i) for i in range(len(self.gen_perms))]

    def element_from_perm(self, perm: Sequence[int]) -> "PermElement":
        p = tuple(int(x) for x in perm)
        idx = self.enumeration().index.get(p)
        if idx is None:
            raise ValueError(f"{perm!r} is not in the group generated by {self.gen_perms}")
        return PermElement(self, p, idx)

    def elements(self) -> list["PermElement"]:
        enum = self.enumeration()
        return [PermElement(self, p, i) for i, p in enumerate(enum.perms)]

    def word_of(self, g: "PermElement") -> tuple[int, ...]:
        return self.enumeration().words[g.index]


class PermElement:
    __slots__ = ("group", "perm", "index")

    def __init__(self, group: PermGroup, perm: tuple[int, ...], index: int):
        self.group = group
        self.perm = perm
        self.index = index

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.group.degree))

    def __mul__(self, other: "PermElement") -> "PermElement":
        if not isinstance(other, PermElement):
            return NotImplemented
        if self.group != other.group:
            raise GroupMismatchError("elements belong to different permutation groups")
        return self.group.element_from_perm(_compose(self.perm, other.perm))

    def __invert__(self) -> "PermElement":
        return self.group.element_from_perm(_invert_perm(self.perm))

    def inverse(self) -> "PermElement":
        return ~self

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PermElement)
            and self.group == other.group
            and self.perm == other.perm
        )

    def __hash__(self) -> int:
        return hash((self.group, self.perm))

    def __repr__(self) -> str:
        return self.group.format_word(self.group.word_of(self))


Group = FreeGroup | PermGroup
GroupElement = FreeElement | PermElement


def enumerate_elements(group: Group) -> list[tuple[GroupElement, tuple[int, ...]]]:
    """All elements of a finite permutation group with their BFS witness words.

    Free groups are rejected (infinite).
    """
    if isinstance(group, FreeGroup):
        raise ValueError("free groups are infinite; enumeration is unsupported")
    enum = group.enumeration()
    return [
        (PermElement(group, p, i), enum.words[i]) for i, p in enumerate(enum.perms)
    ]


def random_elements(group: Group, rng, n: int, max_word_len: int = 6) -> list:
    """Seeded sample of group elements, for property checks."""
    out = []
    if isinstance(group, FreeGroup):
        k = group.rank
        for _ in range(n):
            length = int(rng.integers(0, max_word_len + 1))
            letters = []
            for _ in range(length):
                i = int(rng.integers(1, k + 1))
                letters.append(i if rng.integers(0, 2) == 0 else -i)
            out.append(group.element(letters))
    else:
        elems = group.elements()
        for _ in range(n):
            out.append(elems[int(rng.integers(0, len(elems)))])
    return out
