"""Exact-rational cross-check for the cocycle space dimensions.

Every float is an exact binary rational, so the generator matrices convert
losslessly to Fractions; ranks over Q are then exact. The check is only
meaningful when the matrices satisfy the Cayley relations *exactly* over Q
(integer or small-rational representations); when they hold only to float
tolerance the exact ranks legitimately differ, and this is reported instead
of being compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import FreeGroup, PermGroup
from .repspace import Representation

Matrix = list[list[Fraction]]


def to_fraction_matrix(M) -> Matrix:
    return [[Fraction(float(x)) for x in row] for row in M]


def _eye(d: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


def _zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0) for _ in range(c)] for _ in range(r)]


def _mat_mul(A: Matrix, B: Matrix) -> Matrix:
    rows, inner, cols = len(A), len(B), len(B[0])
    out = _zeros(rows, cols)
    for i in range(rows):
        Ai = A[i]
        for j in range(cols):
            s = Fraction(0)
            for t in range(inner):
                if Ai[t]:
                    s += Ai[t] * B[t][j]
            out[i][j] = s
    return out


def _mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_neg(A: Matrix) -> Matrix:
    return [[-a for a in row] for row in A]


def _mat_inv(A: Matrix) -> Matrix:
    d = len(A)
    aug = [list(row) + list(e) for row, e in zip(A, _eye(d))]
    for col in range(d):
        pivot = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular over Q")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[d:] for row in aug]


def rank_exact(rows: list[list[Fraction]]) -> int:
    """Row rank over Q by fraction-free-ish Gaussian elimination."""
    m = [list(r) for r in rows if any(x != 0 for x in r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    col = 0
    while rank < len(m) and col < ncols:
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        for r in range(rank + 1, len(m)):
            if m[r][col]:
                f = m[r][col] / pv
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def _is_identity(A: Matrix) -> bool:
    d = len(A)
    return all(A[i][j] == (1 if i == j else 0) for i in range(d) for j in range(d))


@dataclass
class ExactDims:
    z1: int
    b1: int
    h1: int
    exact_representation: bool
    note: str = ""


def exact_dims(rep: Representation) -> ExactDims:
    """Dimensions of Z^1, B^1 and H^1 recomputed over exact rationals."""
    group = rep.group
    d = rep.space.dim
    k = group.num_generators
    mats = [to_fraction_matrix(rep.matrix(i + 1)) for i in range(k)]
    invs = [_mat_inv(M) for M in mats]

    def letter_mat(ltr: int) -> Matrix:
        return mats[ltr - 1] if ltr > 0 else invs[-ltr - 1]

    # dim B^1 = d - dim of the common fixed space of the generators
    stacked = []
    eye = _eye(d)
    for M in mats:
        stacked.extend(_mat_sub(M, eye))
    b1 = rank_exact(stacked)

    if isinstance(group, FreeGroup):
        z1 = k * d
        return ExactDims(z1=z1, b1=b1, h1=z1 - b1, exact_representation=True)

    def letter_selector(ltr: int) -> Matrix:
        B = _zeros(d, k * d)
        i = abs(ltr) - 1
        block = eye if ltr > 0 else _mat_neg(invs[i])
        for r in range(d):
            for c in range(d):
                B[r][i * d + c] = block[r][c]
        return B

    enum = group.enumeration()
    ext_maps = [_zeros(d, k * d)]
    pis = [eye]
    for parent, ltr, child in enum.tree_edges:
        assert child == len(ext_maps)
        ext_maps.append(_mat_add(ext_maps[parent], _mat_mul(pis[parent], letter_selector(ltr))))
        pis.append(_mat_mul(pis[parent], letter_mat(ltr)))

    exact_rep = True
    rows: list[list[Fraction]] = []
    for gi, ltr, hi in enum.nontree_edges:
        if exact_rep:
            loop = _mat_mul(pis[gi], letter_mat(ltr))
            if loop != pis[hi]:
                exact_rep = False
        constraint = _mat_sub(
            _mat_add(ext_maps[gi], _mat_mul(pis[gi], letter_selector(ltr))), ext_maps[hi]
        )
        rows.extend(constraint)

    z1 = k * d - rank_exact(rows)
    note = "" if exact_rep else (
        "matrices satisfy the relations only to float tolerance; "
        "exact ranks are not comparable to the float pipeline"
    )
    return ExactDims(z1=z1, b1=b1, h1=z1 - b1, exact_representation=exact_rep, note=note)
