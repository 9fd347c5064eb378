"""Finite-dimensional lp spaces, representations, and Markov operators.

A representation is given by one invertible matrix per positive generator;
inverse generators act by the matrix inverses. Two checked isometry families
are supported: orthogonal matrices for p = 2 and signed permutation matrices
for general p (these are all the linear isometries of finite-dimensional lp,
p != 2). An "unchecked" escape hatch admits arbitrary invertible matrices.

The operator p-norm is reported as a certified bracket [lo, hi]. For
p in {1, 2, inf} both ends are exact (column sums / SVD / row sums). For
other p the exact value is intractable in general, so lo comes from a
dual-exponent power iteration (a norm at an explicit witness vector, hence
always valid) and hi from Riesz-Thorin interpolation of the exact norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .groups import FreeGroup, Group, GroupElement, PermGroup
from .measures import FinMeasure

ORTHOGONAL = "orthogonal"
SIGNED_PERMUTATION = "signed_permutation"
UNCHECKED = "unchecked"
FAMILIES = (ORTHOGONAL, SIGNED_PERMUTATION, UNCHECKED)

RELATION_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class NormedSpace:
    """R^dim with the lp norm; p = math.inf is the sup norm."""

    dim: int
    p: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if not (self.p >= 1):
            raise ValueError("p must satisfy p >= 1")

    def norm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        ord_ = np.inf if math.isinf(self.p) else self.p
        return float(np.linalg.norm(v, ord=ord_))

    def unit(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        n = self.norm(v)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return v / n


def _check_signed_permutation(M: np.ndarray, tol: float = 1e-12) -> bool:
    d = M.shape[0]
    for axis in (0, 1):
        amax = np.abs(M).max(axis=axis)
        if not np.allclose(amax, 1.0, atol=tol):
            return False
        if np.count_nonzero(np.abs(M) > tol) != d:
            return False
    return True


class Representation:
    """Group action on a normed space, determined by generator matrices."""

    def __init__(
        self,
        group: Group,
        space: NormedSpace,
        matrices,
        family: str = UNCHECKED,
        *,
        relation_tol: float = RELATION_TOL,
    ):
        if family not in FAMILIES:
            raise ValueError(f"unknown isometry family {family!r}")
        self.group = group
        self.space = space
        self.family = family
        d = space.dim

        if isinstance(matrices, Mapping):
            try:
                mats = [np.array(matrices[lab], dtype=float) for lab in group.labels]
            except KeyError as exc:
                raise ValueError(f"missing matrix for generator {exc.args[0]!r}") from None
        else:
            mats = [np.array(M, dtype=float) for M in matrices]
        if len(mats) != group.num_generators:
            raise ValueError("need exactly one matrix per positive generator")
        for lab, M in zip(group.labels, mats):
            if M.shape != (d, d):
                raise ValueError(f"matrix for {lab!r} has shape {M.shape}, expected {(d, d)}")

        if family == ORTHOGONAL:
            if space.p != 2:
                raise ValueError("the orthogonal family is isometric only for p = 2")
            for lab, M in zip(group.labels, mats):
                if np.abs(M.T @ M - np.eye(d)).max() > ORTHOGONALITY_TOL:
                    raise ValueError(f"matrix for {lab!r} is not orthogonal")
            invs = [M.T.copy() for M in mats]
        elif family == SIGNED_PERMUTATION:
            for lab, M in zip(group.labels, mats):
                if not _check_signed_permutation(M):
                    raise ValueError(f"matrix for {lab!r} is not a signed permutation")
            invs = [M.T.copy() for M in mats]
        else:
            invs = []
            for lab, M in zip(group.labels, mats):
                try:
                    invs.append(np.linalg.inv(M))
                except np.linalg.LinAlgError:
                    raise ValueError(f"matrix for generator {lab!r} is singular") from None

        self._mats = tuple(mats)
        self._invs = tuple(invs)
        self._pi_cache: dict = {}

        if isinstance(group, PermGroup):
            self._check_relations(relation_tol)

    def _check_relations(self, tol: float) -> None:
        enum = self.group.enumeration()
        pis = [np.eye(self.space.dim)]
        for parent, ltr, child in enum.tree_edges:
            assert child == len(pis)
            pis.append(pis[parent] @ self.matrix(ltr))
        worst = 0.0
        worst_edge = None
        for gi, ltr, hi in enum.nontree_edges:
            defect = float(np.abs(pis[gi] @ self.matrix(ltr) - pis[hi]).max())
            if defect > worst:
                worst, worst_edge = defect, (gi, ltr, hi)
        if worst > tol:
            gi, ltr, hi = worst_edge
            raise ValueError(
                "generator matrices violate a Cayley relation: edge "
                f"({self.group.format_word(enum.words[gi])}, {self.group.letter_label(ltr)}) "
                f"has defect {worst:.3e} > {tol}"
            )

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def labels(self) -> tuple[str, ...]:
        return self.group.labels

    @property
    def is_isometry_family(self) -> bool:
        return self.family in (ORTHOGONAL, SIGNED_PERMUTATION)

    def matrix(self, ltr: int) -> np.ndarray:
        """Matrix of a single letter (signed generator index)."""
        if ltr > 0:
            return self._mats[ltr - 1]
        return self._invs[-ltr - 1]

    def pi(self, g: GroupElement) -> np.ndarray:
        """Matrix of an arbitrary element, by multiplying along its word."""
        if isinstance(self.group, PermGroup):
            cached = self._pi_cache.get(g.index)
            if cached is not None:
                return cached
        word = self.group.word_of(g)
        M = np.eye(self.space.dim)
        for ltr in word:
            M = M @ self.matrix(ltr)
        if isinstance(self.group, PermGroup):
            self._pi_cache[g.index] = M
        return M

    def act(self, g: GroupElement, v) -> np.ndarray:
        return self.pi(g) @ np.asarray(v, dtype=float)

    def invariant_vectors(self, rank_tol: float = 1e-9) -> np.ndarray:
        """Orthonormal basis of the common fixed space of all generators."""
        d = self.space.dim
        stacked = np.vstack([M - np.eye(d) for M in self._mats])
        _, s, vh = np.linalg.svd(stacked)
        cutoff = (s[0] * rank_tol) if s.size and s[0] > 0 else 0.0
        rank = int(np.sum(s > cutoff))
        return vh[rank:].T


@dataclass
class NormBracket:
    """Certified bracket lo <= ||A||_p <= hi with a witness for lo."""

    lo: float
    hi: float
    witness: np.ndarray
    method: str

    def straddles_one(self) -> bool:
        return self.lo < 1.0 <= self.hi

    def holds_gap(self) -> bool:
        return self.hi < 1.0


def _dual_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _psi(v: np.ndarray, t: float) -> np.ndarray:
    # dual-exponent map sign(v) |v|^(t-1)
    return np.sign(v) * np.abs(v) ** (t - 1.0)


def _pnorm(v: np.ndarray, p: float) -> float:
    return float(np.linalg.norm(v, ord=np.inf if math.isinf(p) else p))


def _boyd_lower(
    A: np.ndarray, p: float, rng: np.random.Generator, restarts: int, iters: int
) -> tuple[float, np.ndarray]:
    """Lower bound by power iteration with the dual-exponent map.

    Deterministic starts (axis vectors and the 2-norm maximizer) come first,
    then seeded random directions up to the restart budget.
    """
    d = A.shape[0]
    q = _dual_exponent(p)
    starts = [np.eye(d)[j] for j in range(d)]
    _, _, vh = np.linalg.svd(A)
    starts.append(vh[0])
    while len(starts) < max(restarts, len(starts)):
        starts.append(rng.standard_normal(d))

    best = -1.0
    best_x = starts[0]
    for x0 in starts:
        n0 = _pnorm(x0, p)
        if n0 == 0:
            continue
        x = x0 / n0
        est_prev = -math.inf
        for _ in range(iters):
            y = A @ x
            ny = _pnorm(y, p)
            if ny == 0:
                break
            est = ny
            if est > best:
                best, best_x = est, x.copy()
            if abs(est - est_prev) <= 1e-12 * max(est, 1.0):
                break
            est_prev = est
            z = A.T @ _psi(y / ny, p)
            nz = _pnorm(z, q)
            if nz == 0:
                break
            xn = _psi(z / nz, q)
            nx = _pnorm(xn, p)
            if nx == 0:
                break
            x = xn / nx
    if best < 0:
        return 0.0, starts[0]
    return best, best_x


def _interpolation_upper(A: np.ndarray, p: float) -> float:
    """Riesz-Thorin bound from the exact norms at p = 1, 2, inf."""
    n1 = float(np.abs(A).sum(axis=0).max())
    ninf = float(np.abs(A).sum(axis=1).max())
    n2 = float(np.linalg.svd(A, compute_uv=False)[0]) if A.size else 0.0
    candidates = []
    theta = 1.0 - 1.0 / p
    candidates.append(n1 ** (1.0 - theta) * ninf**theta)
    if p < 2:
        theta = 2.0 * (1.0 - 1.0 / p)
        candidates.append(n1 ** (1.0 - theta) * n2**theta)
    elif p > 2:
        theta = 1.0 - 2.0 / p
        candidates.append(n2 ** (1.0 - theta) * ninf**theta)
    return min(candidates)


def op_norm(
    A,
    space: NormedSpace,
    *,
    seed=0,
    restarts: int = 16,
    iters: int = 200,
) -> NormBracket:
    """Certified bracket for the operator norm of ``A`` on the given space."""
    A = np.asarray(A, dtype=float)
    if A.shape != (space.dim, space.dim):
        raise ValueError(f"matrix shape {A.shape} does not match dim {space.dim}")
    p = space.p
    d = space.dim

    if p == 2:
        _, s, vh = np.linalg.svd(A)
        sigma = float(s[0])
        return NormBracket(lo=sigma, hi=sigma, witness=vh[0].copy(), method="svd")

    if p == 1:
        sums = np.abs(A).sum(axis=0)
        j = int(np.argmax(sums))
        val = float(sums[j])
        return NormBracket(lo=val, hi=val, witness=np.eye(d)[j], method="exact_column_sums")

    if math.isinf(p):
        sums = np.abs(A).sum(axis=1)
        i = int(np.argmax(sums))
        val = float(sums[i])
        w = np.where(A[i] >= 0, 1.0, -1.0)
        return NormBracket(lo=val, hi=val, witness=w, method="exact_row_sums")

    rng = np.random.default_rng(seed)
    lo, x = _boyd_lower(A, p, rng, restarts, iters)
    # re-measure at the witness so lo is a norm ratio by construction
    nx = _pnorm(x, p)
    lo = _pnorm(A @ x, p) / nx if nx > 0 else 0.0
    hi = max(lo, _interpolation_upper(A, p))
    return NormBracket(lo=lo, hi=hi, witness=x, method="power_iteration+interpolation")


@dataclass
class MarkovOp:
    """Weighted average sum_g mu(g) pi_g with a certified norm bracket."""

    matrix: np.ndarray
    measure: FinMeasure
    space: NormedSpace
    bracket: NormBracket

    def apply(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)


def markov(
    rep: Representation,
    mu: FinMeasure,
    *,
    seed=0,
    restarts: int = 16,
    iters: int = 200,
) -> MarkovOp:
    """Markov operator of ``mu``: the mu-weighted average of pi_g."""
    if mu.group != rep.group:
        raise ValueError("measure and representation live on different groups")
    d = rep.space.dim
    A = np.zeros((d, d))
    for g, w in mu.items():
        A += float(w) * rep.pi(g)
    bracket = op_norm(A, rep.space, seed=seed, restarts=restarts, iters=iters)
    return MarkovOp(matrix=A, measure=mu, space=rep.space, bracket=bracket)


@dataclass
class KappaEstimate:
    """Upper bound on the almost-invariant-vectors constant, with witness."""

    value: float
    witness: np.ndarray


def kappa_estimate(rep: Representation, *, seed=0, restarts: int = 64) -> KappaEstimate:
    """Estimate kappa = inf over unit v of max_s ||pi_s v - v||.

    Multi-start minimization of the generator displacement; the result is the
    smallest value seen, hence an upper bound on the true constant. If the
    generators share a fixed vector the infimum is attained there exactly.
    """
    space = rep.space
    d = space.dim
    letters = rep.group.letters()
    mats = [rep.matrix(ltr) for ltr in letters]

    def displacement(u: np.ndarray) -> float:
        n = _pnorm(u, space.p)
        if n == 0:
            return math.inf
        v = u / n
        return max(_pnorm(M @ v - v, space.p) for M in mats)

    fixed = rep.invariant_vectors()
    if fixed.shape[1] > 0:
        w = space.unit(fixed[:, 0])
        return KappaEstimate(value=displacement(w), witness=w)

    rng = np.random.default_rng(seed)
    starts = [np.eye(d)[j] for j in range(min(d, 4))]
    while len(starts) < restarts:
        starts.append(rng.standard_normal(d))

    best = math.inf
    best_u = starts[0]
    for u0 in starts:
        if _pnorm(u0, space.p) == 0:
            continue
        res = minimize(
            displacement,
            u0,
            method="Nelder-Mead",
            options={"maxiter": 200 * d, "xatol": 1e-12, "fatol": 1e-14},
        )
        val = displacement(res.x)
        if val < best:
            best, best_u = val, res.x
    w = space.unit(best_u)
    return KappaEstimate(value=float(best), witness=w)
