"""Decomposition of Z^1 into coboundaries and a harmonic complement.

Under a spectral gap ||A|| <= lambda < 1 for the Markov operator A of an
admissible measure, the affine map L v = A v + z^mu is a strict contraction;
its fixed point b(z) depends linearly on z and P z = d_pi b(z) is a bounded
projection of Z^1 onto the coboundaries B^1. The kernel of P consists of the
mu-harmonic cocycles (z^mu = 0) and is a canonical complement isomorphic to
reduced H^1. The fixed point is iterated exactly as in the contraction
argument; a direct linear solve of (I - A) b = z^mu runs alongside as an
oracle and the disagreement is recorded, never silently absorbed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cocycles import Cocycle, Z1Basis, d_pi, from_params, z1_basis
from .groups import GroupElement, PermGroup
from .measures import FinMeasure, conjugate, convolve, power
from .repspace import MarkovOp, Representation, markov

FIXED_POINT_TOL = 1e-10
IDEMPOTENCE_TOL = 1e-8
RANK_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000


class HypothesisViolatedError(RuntimeError):
    """The norm bracket does not certify a spectral gap (straddles or >= 1)."""

    def __init__(self, lo: float, hi: float, message: str = ""):
        self.lo = lo
        self.hi = hi
        detail = message or f"norm bracket [{lo:.6g}, {hi:.6g}] does not lie below 1"
        super().__init__(detail)


class ContractionError(RuntimeError):
    """Fixed-point iteration failed to converge at the observed rate."""


@dataclass
class Certificate:
    """How the contraction rate used by the stopping rule was obtained."""

    kind: str  # "certified" (rate = norm upper bound < 1) or "empirical"
    rate: float


@dataclass
class FixedPointResult:
    b: np.ndarray
    iterations: int
    final_step: float
    certificate: Certificate
    oracle_residual: float


def _ensure_markov(rep: Representation, mu: FinMeasure, op: MarkovOp | None, seed) -> MarkovOp:
    if op is not None:
        return op
    return markov(rep, mu, seed=seed)


def l_apply(
    rep: Representation,
    mu: FinMeasure,
    z: Cocycle,
    v,
    *,
    op: MarkovOp | None = None,
    seed=0,
) -> np.ndarray:
    """One step of the affine map: A v + z^mu."""
    op = _ensure_markov(rep, mu, op, seed)
    return op.apply(v) + z.mu_average(mu)


def _empirical_rate(steps: Sequence[float]) -> float:
    """Geometric-mean contraction rate over the most recent steps."""
    window = [s for s in steps[-9:] if s > 0]
    if len(window) < 2:
        return math.nan
    return (window[-1] / window[0]) ** (1.0 / (len(window) - 1))


def fixed_point_b(
    rep: Representation,
    mu: FinMeasure,
    z: Cocycle,
    *,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    op: MarkovOp | None = None,
    seed=0,
    zmu: np.ndarray | None = None,
) -> FixedPointResult:
    """Fixed point of v -> A v + z^mu by Banach iteration from v = 0.

    With a certified rate lam < 1 the iteration stops once the step size
    drops below tol * (1 - lam) / lam, which guarantees ||v - b|| <= tol.
    If the bracket does not certify a gap but its lower end is below 1, an
    empirical rate is estimated from the iterate differences and the result
    is marked accordingly. A direct solve of (I - A) b = z^mu is always
    computed and the distance to it reported as ``oracle_residual``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    op = _ensure_markov(rep, mu, op, seed)
    lo, hi = op.bracket.lo, op.bracket.hi
    if lo >= 1.0:
        raise HypothesisViolatedError(lo, hi)
    A = op.matrix
    space = rep.space
    target = zmu if zmu is not None else z.mu_average(mu)

    d = space.dim
    try:
        b_direct = np.linalg.solve(np.eye(d) - A, target)
    except np.linalg.LinAlgError:
        raise HypothesisViolatedError(lo, hi, "(I - A) is singular") from None

    certified = hi < 1.0
    if certified:
        lam = hi
        threshold = math.inf if lam == 0.0 else tol * (1.0 - lam) / lam
        certificate = Certificate(kind="certified", rate=lam)
    else:
        threshold = None  # fixed once an empirical rate is available
        certificate = None

    v = np.zeros(d)
    steps: list[float] = []
    iterations = 0
    step = math.inf
    while iterations < max_iter:
        v_next = A @ v + target
        step = space.norm(v_next - v)
        v = v_next
        iterations += 1
        steps.append(step)
        if certified:
            if step <= threshold:
                break
        else:
            rate = _empirical_rate(steps)
            if iterations >= 10 and not math.isnan(rate):
                if rate >= 1.0 - 1e-9:
                    raise ContractionError(
                        f"iteration is not contracting: observed rate {rate:.6g} "
                        f"after {iterations} steps (bracket [{lo:.6g}, {hi:.6g}])"
                    )
                certificate = Certificate(kind="empirical", rate=rate)
                if step <= tol * (1.0 - rate) / rate:
                    break
    else:
        rate = _empirical_rate(steps)
        raise ContractionError(
            f"no convergence within {max_iter} iterations; observed rate {rate:.6g}"
        )

    if certificate is None:
        certificate = Certificate(kind="empirical", rate=_empirical_rate(steps))

    residual = space.norm((np.eye(d) - A) @ v - target)
    if residual > 1e-9 * (1.0 + space.norm(target)):
        raise ContractionError(
            f"fixed-point residual {residual:.3e} too large for target scale"
        )
    oracle_residual = space.norm(v - b_direct)
    return FixedPointResult(
        b=v,
        iterations=iterations,
        final_step=float(step),
        certificate=certificate,
        oracle_residual=float(oracle_residual),
    )


def project_p(
    rep: Representation,
    mu: FinMeasure,
    z: Cocycle,
    *,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    op: MarkovOp | None = None,
    seed=0,
) -> Cocycle:
    """The coboundary projection P z = d_pi b(z)."""
    fp = fixed_point_b(rep, mu, z, tol=tol, max_iter=max_iter, op=op, seed=seed)
    return d_pi(rep, fp.b)


def p_matrix(
    rep: Representation,
    mu: FinMeasure,
    basis: Z1Basis,
    *,
    tol: float = FIXED_POINT_TOL,
    coord_tol: float = 1e-8,
    op: MarkovOp | None = None,
    seed=0,
) -> np.ndarray:
    """Matrix of P in the Z^1 basis coordinates (columns = images)."""
    op = _ensure_markov(rep, mu, op, seed)
    cols = []
    for zb in basis.cocycles:
        pz = project_p(rep, mu, zb, tol=tol, op=op, seed=seed)
        cols.append(basis.coordinates(pz, tol=coord_tol))
    if not cols:
        return np.zeros((0, 0))
    return np.column_stack(cols)


def _range_and_kernel(P: np.ndarray, rank_tol: float) -> tuple[np.ndarray, np.ndarray]:
    if P.shape == (0, 0):
        return np.zeros((0, 0)), np.zeros((0, 0))
    u, s, vh = np.linalg.svd(P)
    cutoff = s[0] * rank_tol if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > cutoff))
    return u[:, :rank], vh[rank:].T


def coboundary_basis(
    P: np.ndarray, basis: Z1Basis, *, rank_tol: float = RANK_TOL
) -> tuple[Cocycle, ...]:
    """Basis of the range of P, mapped back to cocycles."""
    rng_cols, _ = _range_and_kernel(P, rank_tol)
    return tuple(basis.from_coords(c) for c in rng_cols.T)


def complement_basis(
    P: np.ndarray, basis: Z1Basis, *, rank_tol: float = RANK_TOL
) -> tuple[Cocycle, ...]:
    """Basis of ker P: the mu-harmonic cocycles, the canonical complement."""
    _, ker_cols = _range_and_kernel(P, rank_tol)
    return tuple(basis.from_coords(c) for c in ker_cols.T)


@dataclass
class EquivarianceResult:
    """Per-letter shift defects ||b(gamma . z) - b(z)|| for one cocycle.

    ``identity_residuals`` checks pi_gamma b(z) + z_gamma = b(gamma . z),
    which holds for every cocycle; the defects themselves vanish exactly
    when z is a coboundary.
    """

    defects: dict
    identity_residuals: dict
    max_defect: float
    max_identity_residual: float


def equivariance_defect(
    rep: Representation,
    mu: FinMeasure,
    z: Cocycle,
    *,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    op: MarkovOp | None = None,
    seed=0,
    identity_tol: float = 1e-9,
) -> EquivarianceResult:
    """Shift defects over the generating set.

    b(gamma . z) is computed through an independent fixed-point solve: the
    shifted cocycle is mu-averaged by the conjugated measure gamma mu gamma^-1,
    whose Markov operator is the similarity transform of A, so the same
    contraction machinery applies without assuming the shift identity.
    """
    op = _ensure_markov(rep, mu, op, seed)
    base = fixed_point_b(rep, mu, z, tol=tol, max_iter=max_iter, op=op, seed=seed)
    space = rep.space
    scale = 1.0 + space.norm(base.b) + z.s_norm()
    defects = {}
    residuals = {}
    for ltr in rep.group.letters():
        gamma = rep.group.letter_element(ltr)
        mu_conj = conjugate(mu, gamma)
        op_conj = markov(rep, mu_conj, seed=seed)
        shifted = fixed_point_b(
            rep, mu_conj, z, tol=tol, max_iter=max_iter, op=op_conj, seed=seed
        )
        label = rep.group.letter_label(ltr)
        defects[label] = float(space.norm(shifted.b - base.b))
        lhs = rep.matrix(ltr) @ base.b + z.generator_value(ltr)
        residuals[label] = float(space.norm(lhs - shifted.b))
    max_defect = max(defects.values())
    max_residual = max(residuals.values())
    if max_residual > identity_tol * scale:
        raise ContractionError(
            f"shift identity residual {max_residual:.3e} exceeds tolerance "
            f"{identity_tol:.1e} at scale {scale:.3g}"
        )
    return EquivarianceResult(
        defects=defects,
        identity_residuals=residuals,
        max_defect=max_defect,
        max_identity_residual=max_residual,
    )


@dataclass
class PNormEstimate:
    """Empirical lower bound on ||P|| in the generator sup norm."""

    lower: float
    witness: Cocycle | None
    theoretical_bound: float | None
    exceeds_one: bool
    samples: list = field(default_factory=list)


def snorm_bound_factor(rep: Representation) -> float:
    """Bound on ||d_pi v||_S / ||v||: 2 for isometries, else the worst
    1 + ||pi_s|| over the generating set (upper ends of the letter brackets)."""
    if rep.is_isometry_family:
        return 2.0
    from .repspace import op_norm

    return max(
        1.0 + op_norm(rep.matrix(ltr), rep.space).hi for ltr in rep.group.letters()
    )


def continuity_bound(rep: Representation, mu: FinMeasure, op: MarkovOp) -> float | None:
    """Valid bound on ||P||_{S->S}, or None when it cannot be certified.

    Requires a certified gap and supp mu inside S union {e} (so that
    ||z^mu|| <= ||z||_S); isometric actions give the classical 2/(1 - lambda).
    """
    if op.bracket.hi >= 1.0:
        return None
    letters = {rep.group.letter_element(l) for l in rep.group.letters()}
    for g in mu.support:
        if not (g.is_identity or g in letters):
            return None
    return snorm_bound_factor(rep) / (1.0 - op.bracket.hi)


def p_norm_estimate(
    rep: Representation,
    mu: FinMeasure,
    basis: Z1Basis,
    *,
    seed=0,
    samples: int = 200,
    refine: int = 50,
    tol: float = FIXED_POINT_TOL,
    op: MarkovOp | None = None,
) -> PNormEstimate:
    """Estimate sup ||P z||_S / ||z||_S by seeded sampling plus refinement.

    The continuity bound (2 / (1 - lambda_hi) for isometric actions) is
    asserted against the estimate; whether the estimate exceeds 1 is reported
    as evidence on whether the coboundaries are 1-complemented, which stays
    open here.
    """
    op = _ensure_markov(rep, mu, op, seed)
    bound = continuity_bound(rep, mu, op)
    if basis.dim == 0:
        return PNormEstimate(
            lower=0.0, witness=None, theoretical_bound=bound, exceeds_one=False
        )

    rng = np.random.default_rng(seed)

    def ratio(coords: np.ndarray) -> tuple[float, Cocycle] | None:
        zc = basis.from_coords(coords)
        sn = zc.s_norm()
        if sn < 1e-12:
            return None
        zc = (1.0 / sn) * zc
        pz = project_p(rep, mu, zc, tol=tol, op=op, seed=seed)
        return pz.s_norm(), zc

    ratios: list[float] = []
    best = -math.inf
    best_coords = None
    best_witness = None
    for _ in range(samples):
        coords = rng.standard_normal(basis.dim)
        out = ratio(coords)
        if out is None:
            continue
        r, zc = out
        ratios.append(float(r))
        if r > best:
            best, best_coords, best_witness = r, coords, zc

    if best_coords is not None:
        radius = 0.5
        for _ in range(refine):
            coords = best_coords + radius * rng.standard_normal(basis.dim)
            out = ratio(coords)
            radius *= 0.93
            if out is None:
                continue
            r, zc = out
            ratios.append(float(r))
            if r > best:
                best, best_coords, best_witness = r, coords, zc

    if best == -math.inf:
        best = 0.0
    if bound is not None and best > bound + 1e-8:
        raise ContractionError(
            f"estimated projection norm {best:.6g} exceeds the continuity bound {bound:.6g}"
        )
    return PNormEstimate(
        lower=float(best),
        witness=best_witness,
        theoretical_bound=bound,
        exceeds_one=bool(best > 1.0 + 1e-9),
        samples=ratios,
    )


def lemma_residuals(
    rep: Representation,
    mu: FinMeasure,
    basis: Z1Basis,
    *,
    seed=0,
    trials: int = 20,
    op: MarkovOp | None = None,
) -> dict:
    """Max normalized residuals of the four averaging identities.

    (1) additivity of z -> z^mu, (2) affine additivity of L, (3) the
    convolution identity A z^nu + z^mu = z^(mu*nu) for nu in {mu, mu^2},
    (4) the semigroup law L^(mu*nu) = L^mu L^nu.
    """
    op = _ensure_markov(rep, mu, op, seed)
    rng = np.random.default_rng(seed)
    A = op.matrix
    space = rep.space
    # nu ranges over {mu, mu^2}, so mu*nu ranges over {mu^2, mu^3}
    pairs = [(mu, power(mu, 2)), (power(mu, 2), power(mu, 3))]
    pair_ops = [(markov(rep, nu, seed=seed), markov(rep, cv, seed=seed)) for nu, cv in pairs]
    out = {"additivity": 0.0, "affine": 0.0, "convolution": 0.0, "semigroup": 0.0}
    if basis.dim == 0:
        return out
    for _ in range(trials):
        z = basis.sample(rng)
        zp = basis.sample(rng)
        v = rng.standard_normal(space.dim)

        zmu, zpmu = z.mu_average(mu), zp.mu_average(mu)
        r1 = space.norm((z + zp).mu_average(mu) - (zmu + zpmu))
        out["additivity"] = max(
            out["additivity"], r1 / (1.0 + space.norm(zmu) + space.norm(zpmu))
        )

        lhs = l_apply(rep, mu, z + zp, v, op=op)
        rhs = l_apply(rep, mu, z, v, op=op) + l_apply(rep, mu, zp, v, op=op) - A @ v
        out["affine"] = max(
            out["affine"], space.norm(lhs - rhs) / (1.0 + space.norm(rhs))
        )

        for (nu, conv), (op_nu, op_conv) in zip(pairs, pair_ops):
            znu = z.mu_average(nu)
            zconv = z.mu_average(conv)
            r3 = space.norm(A @ znu + zmu - zconv)
            out["convolution"] = max(
                out["convolution"], r3 / (1.0 + space.norm(zconv))
            )

            lhs4 = l_apply(rep, conv, z, v, op=op_conv)
            rhs4 = l_apply(rep, mu, z, l_apply(rep, nu, z, v, op=op_nu), op=op)
            out["semigroup"] = max(
                out["semigroup"], space.norm(lhs4 - rhs4) / (1.0 + space.norm(rhs4))
            )
    return out


@dataclass
class DecompositionReport:
    """Everything the splitting produces, plus the self-checks it ran."""

    op: MarkovOp
    basis: Z1Basis
    p_mat: np.ndarray
    dims: dict
    coboundaries: tuple[Cocycle, ...]
    complement: tuple[Cocycle, ...]
    fixed_points: list[FixedPointResult]
    equivariance: list[EquivarianceResult]
    p_norm: PNormEstimate
    lemma: dict
    checks: dict
    exact_oracle: dict | None = None


def decompose(
    rep: Representation,
    mu: FinMeasure,
    *,
    seed=0,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    idempotence_tol: float = IDEMPOTENCE_TOL,
    rank_tol: float = RANK_TOL,
    pnorm_samples: int = 200,
    lemma_trials: int = 20,
    run_exact_oracle: bool | None = None,
    op: MarkovOp | None = None,
) -> DecompositionReport:
    """Full splitting pipeline for one representation and measure."""
    op = _ensure_markov(rep, mu, op, seed)
    if op.bracket.lo >= 1.0:
        raise HypothesisViolatedError(op.bracket.lo, op.bracket.hi)

    basis = z1_basis(rep, rank_tol=rank_tol)
    P = p_matrix(rep, mu, basis, tol=tol, op=op, seed=seed)

    idem = float(np.abs(P @ P - P).max()) if P.size else 0.0
    if idem > idempotence_tol:
        raise ContractionError(
            f"projection matrix is not idempotent: residual {idem:.3e}"
        )

    cob = coboundary_basis(P, basis, rank_tol=rank_tol)
    comp = complement_basis(P, basis, rank_tol=rank_tol)
    dims = {"z1": basis.dim, "b1": len(cob), "h1": basis.dim - len(cob)}

    fixed_points = [
        fixed_point_b(rep, mu, zb, tol=tol, max_iter=max_iter, op=op, seed=seed)
        for zb in basis.cocycles
    ]
    equivariance = [
        equivariance_defect(rep, mu, zb, tol=tol, max_iter=max_iter, op=op, seed=seed)
        for zb in basis.cocycles
    ]

    pn = p_norm_estimate(
        rep, mu, basis, seed=seed, samples=pnorm_samples, tol=tol, op=op
    )
    lemma = lemma_residuals(rep, mu, basis, seed=seed, trials=lemma_trials, op=op)

    comp_mu = [rep.space.norm(zc.mu_average(mu)) for zc in comp]
    if basis.dim:
        stacked_cols = [basis.coordinates(zc) for zc in cob] + [
            basis.coordinates(zc) for zc in comp
        ]
        stacked = np.column_stack(stacked_cols) if stacked_cols else np.zeros((basis.dim, 0))
        svals = np.linalg.svd(stacked, compute_uv=False) if stacked.size else np.zeros(0)
        cutoff = svals[0] * rank_tol if svals.size and svals[0] > 0 else 0.0
        stacked_rank = int(np.sum(svals > cutoff))
    else:
        stacked_rank = 0

    checks = {
        "idempotence_residual": idem,
        "oracle_residual_max": max((fp.oracle_residual for fp in fixed_points), default=0.0),
        "complement_mu_norm_max": max(comp_mu, default=0.0),
        "stacked_rank": stacked_rank,
        "b1_from_invariants": rep.space.dim - rep.invariant_vectors().shape[1],
        "identity_residual_max": max(
            (eq.max_identity_residual for eq in equivariance), default=0.0
        ),
    }

    exact = None
    want_exact = run_exact_oracle
    if want_exact is None:
        want_exact = isinstance(rep.group, PermGroup)
    if want_exact:
        from .exact import exact_dims

        ed = exact_dims(rep)
        exact = {
            "ran": True,
            "exact_representation": ed.exact_representation,
            "dims": {"z1": ed.z1, "b1": ed.b1, "h1": ed.h1},
            "matches": ed.exact_representation
            and (ed.z1, ed.b1, ed.h1) == (dims["z1"], dims["b1"], dims["h1"]),
            "note": ed.note,
        }

    return DecompositionReport(
        op=op,
        basis=basis,
        p_mat=P,
        dims=dims,
        coboundaries=cob,
        complement=comp,
        fixed_points=fixed_points,
        equivariance=equivariance,
        p_norm=pn,
        lemma=lemma,
        checks=checks,
        exact_oracle=exact,
    )


def convolution_power_trajectory(
    rep: Representation,
    mu: FinMeasure,
    z: Cocycle,
    n_max: int,
) -> list[np.ndarray]:
    """The sequence z^(mu^n) for n = 1..n_max, by explicit convolution powers.

    This is the independent route to b(z): each term is a fresh measure
    average, no fixed-point iterates are reused.
    """
    out = []
    nu = mu
    for n in range(1, n_max + 1):
        out.append(z.mu_average(nu))
        if n < n_max:
            nu = convolve(nu, mu)
    return out
