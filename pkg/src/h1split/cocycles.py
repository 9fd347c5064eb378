"""Cocycles for a representation, stored by their positive-generator values.

A cocycle z satisfies z_{gh} = z_g + pi_g z_h, so it is determined by the
vectors z_s on positive generators: inverse letters carry the derived value
z_{s^-1} = -pi_{s^-1} z_s and any element's value unfolds along its word.
For free groups every generator assignment is a cocycle; for finite
permutation groups membership in Z^1 is a linear condition collected from
the non-tree edges of the Cayley BFS graph, and the space is realized as a
nullspace with an explicit (orthonormal) basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import FreeGroup, GroupElement, PermGroup
from .measures import FinMeasure
from .repspace import Representation

RANK_TOL = 1e-9


class BasisError(ValueError):
    """A vector failed to resolve against a Z^1 basis within tolerance."""


class Cocycle:
    __slots__ = ("rep", "values")

    def __init__(self, rep: Representation, values):
        k = rep.group.num_generators
        d = rep.space.dim
        vals = np.array(values, dtype=float).reshape(k, d)
        self.rep = rep
        self.values = vals

    @property
    def params(self) -> np.ndarray:
        """Stacked generator values, the coordinate vector in R^(k*d)."""
        return self.values.ravel().copy()

    def generator_value(self, ltr: int) -> np.ndarray:
        """Value on a letter; inverse letters use z_{s^-1} = -pi_{s^-1} z_s."""
        if ltr > 0:
            return self.values[ltr - 1]
        return -(self.rep.matrix(ltr) @ self.values[-ltr - 1])

    def extend(self, g: GroupElement) -> np.ndarray:
        """Value at an arbitrary element, folded along its (witness) word."""
        word = self.rep.group.word_of(g)
        d = self.rep.space.dim
        acc = np.zeros(d)
        cur = np.eye(d)
        for ltr in word:
            acc = acc + cur @ self.generator_value(ltr)
            cur = cur @ self.rep.matrix(ltr)
        return acc

    def mu_average(self, mu: FinMeasure) -> np.ndarray:
        """The measure average sum_g mu(g) z_g."""
        if mu.group != self.rep.group:
            raise ValueError("measure lives on a different group")
        acc = np.zeros(self.rep.space.dim)
        for g, w in mu.items():
            acc = acc + float(w) * self.extend(g)
        return acc

    def s_norm(self) -> float:
        """Max lp norm of the values over the whole symmetric generating set."""
        return max(
            self.rep.space.norm(self.generator_value(ltr))
            for ltr in self.rep.group.letters()
        )

    def __add__(self, other: "Cocycle") -> "Cocycle":
        if self.rep is not other.rep and self.rep.group != other.rep.group:
            raise ValueError("cocycles belong to different representations")
        return Cocycle(self.rep, self.values + other.values)

    def __sub__(self, other: "Cocycle") -> "Cocycle":
        return self + (-other)

    def __neg__(self) -> "Cocycle":
        return Cocycle(self.rep, -self.values)

    def __mul__(self, c: float) -> "Cocycle":
        return Cocycle(self.rep, float(c) * self.values)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Cocycle({self.values!r})"


def zero_cocycle(rep: Representation) -> Cocycle:
    return Cocycle(rep, np.zeros((rep.group.num_generators, rep.space.dim)))


def from_params(rep: Representation, params) -> Cocycle:
    return Cocycle(rep, np.asarray(params, dtype=float))


def d_pi(rep: Representation, v) -> Cocycle:
    """Codifferential: the coboundary g -> v - pi_g v, stored on generators."""
    v = np.asarray(v, dtype=float)
    rows = [v - rep.matrix(i + 1) @ v for i in range(rep.group.num_generators)]
    return Cocycle(rep, np.vstack(rows))


def _letter_selector(rep: Representation, ltr: int) -> np.ndarray:
    """Matrix mapping stacked parameters to the letter's value z_ltr."""
    k = rep.group.num_generators
    d = rep.space.dim
    B = np.zeros((d, k * d))
    i = abs(ltr) - 1
    block = np.eye(d) if ltr > 0 else -rep.matrix(ltr)
    B[:, i * d : (i + 1) * d] = block
    return B


def _extension_maps(rep: Representation) -> list[np.ndarray]:
    """For each enumerated element g, the linear map params -> z_g."""
    enum = rep.group.enumeration()
    d = rep.space.dim
    k = rep.group.num_generators
    maps = [np.zeros((d, k * d))]
    pis = [np.eye(d)]
    for parent, ltr, child in enum.tree_edges:
        assert child == len(maps)
        maps.append(maps[parent] + pis[parent] @ _letter_selector(rep, ltr))
        pis.append(pis[parent] @ rep.matrix(ltr))
    return maps


def _constraint_matrix(rep: Representation) -> np.ndarray:
    """Rows vanish exactly on generator assignments that extend consistently."""
    enum = rep.group.enumeration()
    maps = _extension_maps(rep)
    pis = [np.eye(rep.space.dim)]
    for parent, ltr, child in enum.tree_edges:
        pis.append(pis[parent] @ rep.matrix(ltr))
    rows = []
    for gi, ltr, hi in enum.nontree_edges:
        rows.append(maps[gi] + pis[gi] @ _letter_selector(rep, ltr) - maps[hi])
    k = rep.group.num_generators
    if not rows:
        return np.zeros((0, k * rep.space.dim))
    return np.vstack(rows)


@dataclass
class Z1Basis:
    """Explicit basis of Z^1 in stacked-parameter coordinates.

    ``param_matrix`` has one column per basis cocycle; for permutation groups
    the columns are orthonormal (SVD nullspace of the constraint matrix),
    for free groups the identity.
    """

    rep: Representation
    cocycles: tuple[Cocycle, ...]
    param_matrix: np.ndarray
    constraint_matrix: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.cocycles)

    def coordinates(self, z: Cocycle, *, tol: float = 1e-8) -> np.ndarray:
        """Least-squares coordinates of z; rejects vectors outside the span."""
        if self.dim == 0:
            if np.linalg.norm(z.params) > tol:
                raise BasisError("nonzero cocycle against an empty basis")
            return np.zeros(0)
        c, *_ = np.linalg.lstsq(self.param_matrix, z.params, rcond=None)
        residual = float(np.linalg.norm(self.param_matrix @ c - z.params))
        if residual > tol:
            raise BasisError(f"coordinate residual {residual:.3e} exceeds {tol}")
        return c

    def from_coords(self, c) -> Cocycle:
        c = np.asarray(c, dtype=float)
        return from_params(self.rep, self.param_matrix @ c)

    def sample(self, rng: np.random.Generator) -> Cocycle:
        """Random cocycle with standard-normal coefficients in this basis."""
        return self.from_coords(rng.standard_normal(self.dim))


def z1_basis(rep: Representation, *, rank_tol: float = RANK_TOL) -> Z1Basis:
    """Basis of Z^1: all of parameter space for free groups, else the
    nullspace of the Cayley relation constraints."""
    k = rep.group.num_generators
    d = rep.space.dim
    if isinstance(rep.group, FreeGroup):
        param = np.eye(k * d)
        constraints = np.zeros((0, k * d))
    else:
        constraints = _constraint_matrix(rep)
        if constraints.shape[0] == 0:
            param = np.eye(k * d)
        else:
            _, s, vh = np.linalg.svd(constraints)
            cutoff = s[0] * rank_tol if s.size and s[0] > 0 else 0.0
            rank = int(np.sum(s > cutoff))
            param = vh[rank:].T
    cocycles = tuple(from_params(rep, col) for col in param.T)
    return Z1Basis(rep=rep, cocycles=cocycles, param_matrix=param, constraint_matrix=constraints)


def membership_residual(z: Cocycle) -> float:
    """Worst violation of the extension consistency constraints.

    Zero for free groups by construction; for permutation groups this is the
    max norm over non-tree Cayley edges of z_g + pi_g z_s - z_{gs}.
    """
    group = z.rep.group
    if isinstance(group, FreeGroup):
        return 0.0
    enum = group.enumeration()
    elems = group.elements()
    worst = 0.0
    for gi, ltr, hi in enum.nontree_edges:
        r = (
            z.extend(elems[gi])
            + z.rep.pi(elems[gi]) @ z.generator_value(ltr)
            - z.extend(elems[hi])
        )
        worst = max(worst, z.rep.space.norm(r))
    return worst


@dataclass
class ShiftedCocycle:
    """Left translate (gamma . z)_g = z_{gamma g}.

    Not a cocycle for pi (it is one for the affine-translated action); stored
    as a table of letter values together with the base point z_gamma, which is
    the value at the identity.
    """

    base: Cocycle
    shift: GroupElement
    offset: np.ndarray
    table: np.ndarray

    def value(self, g: GroupElement) -> np.ndarray:
        return self.base.extend(self.shift * g)

    def letter_value(self, ltr: int) -> np.ndarray:
        letters = self.base.rep.group.letters()
        return self.table[letters.index(ltr)]

    def mu_average(self, mu: FinMeasure) -> np.ndarray:
        acc = np.zeros(self.base.rep.space.dim)
        for g, w in mu.items():
            acc = acc + float(w) * self.value(g)
        return acc


def gamma_act(gamma: GroupElement, z: Cocycle) -> ShiftedCocycle:
    """The shift action of a group element on a cocycle."""
    group = z.rep.group
    letters = group.letters()
    table = np.vstack([z.extend(gamma * group.letter_element(l)) for l in letters])
    return ShiftedCocycle(base=z, shift=gamma, offset=z.extend(gamma), table=table)
