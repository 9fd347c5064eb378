"""Scenario-driven property suite.

Runs every documented invariant of the pipeline on one scenario with its
seed: group laws, convolution algebra, isometry and norm-bracket guarantees,
the four averaging identities, linearity and idempotence of the projection,
the convolution-power route to the fixed point, and the continuity bound.
Each check reports its worst residual against the tolerance it must meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycles import d_pi, from_params, membership_residual, z1_basis
from .decomp import (
    HypothesisViolatedError,
    convolution_power_trajectory,
    equivariance_defect,
    fixed_point_b,
    l_apply,
    lemma_residuals,
    p_matrix,
    p_norm_estimate,
    project_p,
)
from .groups import FreeGroup, PermGroup, random_elements, reduce_word
from .measures import check_admissible, convolve, lazy_pair, power
from .repspace import kappa_estimate, markov, op_norm
from .scenario import Scenario


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    note: str = ""


@dataclass
class VerifyOutcome:
    results: list[CheckResult] = field(default_factory=list)
    observations: list[dict] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def add(self, name: str, residual: float, tolerance: float, note: str = ""):
        self.results.append(
            CheckResult(
                name=name,
                passed=bool(residual <= tolerance),
                residual=float(residual),
                tolerance=float(tolerance),
                note=note,
            )
        )

    def add_flag(self, name: str, ok: bool, note: str = ""):
        self.results.append(
            CheckResult(
                name=name,
                passed=bool(ok),
                residual=0.0 if ok else 1.0,
                tolerance=0.0,
                note=note,
            )
        )


def _group_checks(out: VerifyOutcome, sc: Scenario, rng: np.random.Generator, n: int):
    group = sc.group
    elems = random_elements(group, rng, n)
    e = group.identity()

    ok = all(
        (a * b) * c == a * (b * c)
        for a, b, c in zip(elems, elems[1:] + elems[:1], elems[2:] + elems[:2])
    )
    out.add_flag("group.associativity", ok)
    out.add_flag("group.inverse_involution", all(~(~a) == a for a in elems))
    out.add_flag(
        "group.identity_laws", all(a * e == a and e * a == a for a in elems)
    )
    if isinstance(group, FreeGroup):
        ok = True
        for a, b in zip(elems, reversed(elems)):
            w = (a * b).word
            ok = ok and all(w[i] != -w[i + 1] for i in range(len(w) - 1))
        out.add_flag("group.free_reduced_products", ok)
    else:
        enum = group.enumeration()
        ok = True
        for g, word in zip(group.elements(), enum.words):
            acc = e
            for ltr in word:
                acc = acc * group.letter_element(ltr)
            ok = ok and acc == g
        out.add_flag("group.bfs_witness_words", ok)


def _measure_checks(out: VerifyOutcome, sc: Scenario, rng: np.random.Generator):
    mu = sc.measure
    group = sc.group

    def rand_measure():
        elems = random_elements(group, rng, 3, max_word_len=3)
        raw = rng.random(len(elems)) + 0.05
        raw /= raw.sum()
        merged: dict = {}
        for g, w in zip(elems, raw):
            merged[g] = merged.get(g, 0.0) + float(w)
        from .measures import FinMeasure

        return FinMeasure(group, merged)

    worst = 0.0
    for _ in range(5):
        m1, m2, m3 = rand_measure(), rand_measure(), rand_measure()
        a = convolve(convolve(m1, m2), m3)
        b = convolve(m1, convolve(m2, m3))
        supp = set(a.support) | set(b.support)
        worst = max(
            worst, max(abs(float(a.weight(g)) - float(b.weight(g))) for g in supp)
        )
    out.add("measure.convolution_associative", worst, 1e-12)

    out.add_flag("measure.lazy_uniform_symmetric", mu.is_symmetric())
    if mu.is_symmetric():
        out.add_flag(
            "measure.symmetry_closed_under_square", convolve(mu, mu).is_symmetric(1e-12)
        )
    worst = max(
        abs(sum(float(w) for _, w in power(mu, n).items()) - 1.0) for n in range(1, 7)
    )
    out.add("measure.power_mass", worst, 1e-12)

    if sc.admissible_pair is not None:
        res = check_admissible(sc.admissible_pair)
        out.add_flag(
            "measure.admissible_pair",
            res.admissible,
            note="" if res.admissible else f"{len(res.violations)} violations",
        )


def _rep_checks(out: VerifyOutcome, sc: Scenario, rng: np.random.Generator, n: int):
    rep = sc.rep
    mu = sc.measure
    space = rep.space

    if rep.is_isometry_family:
        worst = 0.0
        for _ in range(n):
            v = rng.standard_normal(space.dim)
            for ltr in rep.group.letters():
                worst = max(
                    worst, abs(space.norm(rep.matrix(ltr) @ v) - space.norm(v))
                )
        out.add("rep.isometry", worst, 1e-12 * max(1.0, float(n)))

    op = markov(rep, mu, seed=sc.seed)
    if rep.is_isometry_family:
        out.add("rep.markov_norm_at_most_one", max(0.0, op.bracket.hi - 1.0), 1e-9)
    out.add_flag("rep.bracket_sandwich", op.bracket.lo <= op.bracket.hi)
    w = op.bracket.witness
    nw = space.norm(w)
    realized = space.norm(op.matrix @ w) / nw if nw > 0 else 0.0
    out.add("rep.bracket_witness", abs(realized - op.bracket.lo), 1e-9)

    nu = convolve(mu, mu)
    op_nu = markov(rep, nu, seed=sc.seed)
    out.add(
        "rep.markov_homomorphism",
        float(np.abs(op_nu.matrix - op.matrix @ op.matrix).max()),
        1e-10,
    )

    kap = kappa_estimate(rep, seed=sc.seed, restarts=16)
    admissible = (
        check_admissible(sc.admissible_pair).admissible
        if sc.admissible_pair is not None
        else None
    )
    out.observations.append(
        {
            "name": "rep.gap_from_admissibility",
            "kappa_estimate": kap.value,
            "admissible": admissible,
            "lambda_hi": op.bracket.hi,
            "observation": (
                "kappa > 0.1 with admissible measure: lambda_hi "
                + ("< 1 as predicted" if op.bracket.hi < 1 else ">= 1 (unexpected)")
            )
            if (kap.value > 0.1 and admissible)
            else "premises not met; nothing to observe",
        }
    )
    return op


def _cocycle_checks(out: VerifyOutcome, sc: Scenario, rng, n: int, op):
    rep = sc.rep
    mu = sc.measure
    space = rep.space
    basis = z1_basis(rep, rank_tol=float(sc.tolerances["rank"]))
    out.add_flag("cocycle.z1_dim_positive_or_empty", basis.dim >= 0)

    worst = 0.0
    for _ in range(n):
        v = rng.standard_normal(space.dim)
        worst = max(worst, membership_residual(d_pi(rep, v)))
    out.add("cocycle.dpi_in_z1", worst, 1e-10)

    if basis.dim:
        A = op.matrix
        worst_lin = worst_add = worst_conv = 0.0
        elems = random_elements(rep.group, rng, n)
        mu2 = power(mu, 2)
        mu3 = power(mu, 3)
        for i in range(n):
            z = basis.sample(rng)
            zp = basis.sample(rng)
            g = elems[i % len(elems)]
            worst_lin = max(
                worst_lin,
                space.norm((z + zp).extend(g) - z.extend(g) - zp.extend(g)),
            )
            worst_add = max(
                worst_add,
                space.norm(
                    (z + zp).mu_average(mu) - z.mu_average(mu) - zp.mu_average(mu)
                ),
            )
            for nu, conv in ((mu, mu2), (mu2, mu3)):
                r = A @ z.mu_average(nu) + z.mu_average(mu) - z.mu_average(conv)
                worst_conv = max(worst_conv, space.norm(r))
        out.add("cocycle.extend_linear", worst_lin, 1e-9)
        out.add("cocycle.mu_average_additive", worst_add, 1e-12)
        out.add("cocycle.convolution_identity", worst_conv, 1e-10)

        worst_tri = worst_hom = 0.0
        for _ in range(n):
            z = basis.sample(rng)
            zp = basis.sample(rng)
            worst_tri = max(
                worst_tri, (z + zp).s_norm() - z.s_norm() - zp.s_norm()
            )
            worst_hom = max(
                worst_hom, abs((3.0 * z).s_norm() - 3.0 * z.s_norm())
            )
        out.add("cocycle.snorm_triangle", max(worst_tri, 0.0), 1e-12)
        out.add("cocycle.snorm_homogeneous", worst_hom, 1e-12)

        from .decomp import snorm_bound_factor

        factor = snorm_bound_factor(rep)
        worst = 0.0
        for _ in range(n):
            v = rng.standard_normal(space.dim)
            worst = max(worst, d_pi(rep, v).s_norm() - factor * space.norm(v))
        out.add(
            "cocycle.coboundary_norm_bound",
            max(worst, 0.0),
            1e-12,
            note="" if rep.is_isometry_family else f"non-isometric factor {factor:.4g}",
        )
    return basis


def _decomp_checks(out: VerifyOutcome, sc: Scenario, rng, n: int, op, basis):
    rep = sc.rep
    mu = sc.measure
    space = rep.space
    tol = float(sc.tolerances["fixed_point"])
    lam_hi = op.bracket.hi

    if basis.dim == 0:
        return

    worst = 0.0
    for _ in range(n):
        z = basis.sample(rng)
        v = rng.standard_normal(space.dim)
        w = rng.standard_normal(space.dim)
        lv = l_apply(rep, mu, z, v, op=op)
        lw = l_apply(rep, mu, z, w, op=op)
        worst = max(worst, space.norm(lv - lw) - lam_hi * space.norm(v - w))
    out.add("decomp.contraction", max(worst, 0.0), 1e-10)

    lem = lemma_residuals(rep, mu, basis, seed=sc.seed, trials=max(4, n // 4), op=op)
    out.add("decomp.lemma_additivity", lem["additivity"], 1e-12)
    out.add("decomp.lemma_affine", lem["affine"], 1e-10)
    out.add("decomp.lemma_convolution", lem["convolution"], 1e-10)
    out.add("decomp.lemma_semigroup", lem["semigroup"], 1e-10)

    worst_lin = worst_oracle = 0.0
    for _ in range(n):
        z = basis.sample(rng)
        zp = basis.sample(rng)
        fz = fixed_point_b(rep, mu, z, tol=tol, op=op)
        fzp = fixed_point_b(rep, mu, zp, tol=tol, op=op)
        fsum = fixed_point_b(rep, mu, z + zp, tol=tol, op=op)
        worst_lin = max(worst_lin, space.norm(fsum.b - fz.b - fzp.b))
        fscaled = fixed_point_b(rep, mu, 2.5 * z, tol=tol, op=op)
        worst_lin = max(worst_lin, space.norm(fscaled.b - 2.5 * fz.b))
        scale = 1.0 + space.norm(fz.b)
        worst_oracle = max(worst_oracle, fz.oracle_residual / scale)
    out.add("decomp.b_linear", worst_lin, 1e-9)
    out.add("decomp.oracle_equivalence", worst_oracle, 1e-9)

    if lam_hi < 1.0:
        worst = 0.0
        for _ in range(3):
            z = basis.sample(rng)
            fp = fixed_point_b(rep, mu, z, tol=tol, op=op)
            c = space.norm(z.mu_average(mu)) / (1.0 - lam_hi)
            traj = convolution_power_trajectory(rep, mu, z, 8)
            for nn, znu in enumerate(traj, start=1):
                bound = (lam_hi**nn) * c
                worst = max(worst, space.norm(znu - fp.b) - bound)
        out.add("decomp.convolution_power_route", max(worst, 0.0), 1e-9)

    P = p_matrix(rep, mu, basis, tol=tol, op=op, seed=sc.seed)
    idem = float(np.abs(P @ P - P).max()) if P.size else 0.0
    out.add("decomp.idempotent", idem, float(sc.tolerances["idempotence"]))

    from .decomp import coboundary_basis as _cb, complement_basis as _kb

    rank_tol = float(sc.tolerances["rank"])
    cob = _cb(P, basis, rank_tol=rank_tol)
    comp = _kb(P, basis, rank_tol=rank_tol)
    out.add_flag("decomp.rank_sum", len(cob) + len(comp) == basis.dim)

    if basis.dim:
        cols = [basis.coordinates(z) for z in cob] + [basis.coordinates(z) for z in comp]
        stacked = np.column_stack(cols) if cols else np.zeros((basis.dim, 0))
        sv = np.linalg.svd(stacked, compute_uv=False) if stacked.size else np.zeros(0)
        cutoff = sv[0] * rank_tol if sv.size and sv[0] > 0 else 0.0
        out.add_flag(
            "decomp.stacked_full_rank", int(np.sum(sv > cutoff)) == basis.dim
        )

    worst = max((space.norm(z.mu_average(mu)) for z in comp), default=0.0)
    out.add("decomp.kernel_mu_harmonic", worst, 1e-9)

    worst = 0.0
    for _ in range(n):
        v = rng.standard_normal(space.dim)
        z = d_pi(rep, v)
        pz = project_p(rep, mu, z, tol=tol, op=op)
        worst = max(worst, float(np.abs(pz.params - z.params).max()))
    out.add("decomp.identity_on_coboundaries", worst, 1e-9)

    from .decomp import continuity_bound

    bound_factor = continuity_bound(rep, mu, op)
    if bound_factor is not None:
        worst = 0.0
        for _ in range(n):
            z = basis.sample(rng)
            sn = z.s_norm()
            if sn < 1e-12:
                continue
            pz = project_p(rep, mu, z, tol=tol, op=op)
            worst = max(worst, pz.s_norm() - bound_factor * sn)
        out.add("decomp.continuity_bound", max(worst, 0.0), 1e-8)

    worst_id = worst_cob_defect = 0.0
    for _ in range(max(2, n // 10)):
        v = rng.standard_normal(space.dim)
        z = d_pi(rep, v)
        eq = equivariance_defect(rep, mu, z, tol=tol, op=op, seed=sc.seed)
        worst_id = max(worst_id, eq.max_identity_residual)
        worst_cob_defect = max(worst_cob_defect, eq.max_defect)
        z = basis.sample(rng)
        eq = equivariance_defect(rep, mu, z, tol=tol, op=op, seed=sc.seed)
        worst_id = max(worst_id, eq.max_identity_residual)
    out.add("decomp.shift_identity", worst_id, 1e-9)
    out.add("decomp.coboundary_defects_vanish", worst_cob_defect, 1e-9)


def verify_scenario(sc: Scenario) -> VerifyOutcome:
    """Run every property check on one scenario; seeded, deterministic."""
    out = VerifyOutcome()
    rng = np.random.default_rng(sc.seed)
    n = int(sc.samples.get("verify", 50))

    _group_checks(out, sc, rng, n)
    _measure_checks(out, sc, rng)
    op = _rep_checks(out, sc, rng, n)
    basis = _cocycle_checks(out, sc, rng, n, op)

    if op.bracket.lo >= 1.0:
        out.add_flag(
            "decomp.skipped",
            True,
            note="norm bracket at or above 1; decomposition checks not applicable",
        )
        return out
    try:
        _decomp_checks(out, sc, rng, n, op, basis)
    except HypothesisViolatedError as exc:
        out.add_flag("decomp.hypothesis", False, note=str(exc))
    return out
