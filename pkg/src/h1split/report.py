"""JSON report assembly and deterministic serialization.

Reports embed the tool version, a hash of the scenario bytes and the seed;
identical scenario + seed must serialize to identical bytes, so nothing
time- or path-dependent is allowed in here and keys are always sorted.
"""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction

import numpy as np

from . import __version__
from .decomp import DecompositionReport
from .groups import FreeGroup, PermGroup
from .measures import AdmissibilityResult, FinMeasure
from .repspace import KappaEstimate, MarkovOp, Representation

REPORT_VERSION = 1


def jsonable(obj):
    """Recursively convert numpy/Fraction values into JSON-safe types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def hypothesis_status(lo: float, hi: float) -> str:
    if hi < 1.0:
        return "holds"
    if lo >= 1.0:
        return "violated"
    return "undecided"


def _group_block(group) -> dict:
    if isinstance(group, FreeGroup):
        return {"kind": "free", "rank": group.rank, "labels": list(group.labels)}
    return {
        "kind": "finite_perm",
        "degree": group.degree,
        "order": group.order(),
        "labels": list(group.labels),
        "generators": [list(p) for p in group.gen_perms],
    }


def _measure_block(mu: FinMeasure) -> dict:
    entries = [
        [mu.group.format_word(mu.group.word_of(g)), jsonable(w)] for g, w in mu.items()
    ]
    return {"weights": entries, "exact": mu.is_exact, "symmetric": mu.is_symmetric()}


def _rep_block(rep: Representation) -> dict:
    return {
        "p": jsonable(rep.space.p),
        "dim": rep.space.dim,
        "family": rep.family,
        "matrices": {
            lab: jsonable(rep.matrix(i + 1)) for i, lab in enumerate(rep.labels)
        },
    }


def build_report(
    *,
    scenario_name: str,
    scenario_bytes: bytes,
    seed: int,
    rep: Representation,
    mu: FinMeasure,
    op: MarkovOp,
    kappa: KappaEstimate,
    admissibility: AdmissibilityResult | None,
    decomposition: DecompositionReport | None,
    error: str | None = None,
) -> dict:
    status = hypothesis_status(op.bracket.lo, op.bracket.hi)
    report = {
        "report_version": REPORT_VERSION,
        "tool": {"name": "h1split", "version": __version__},
        "scenario": {
            "name": scenario_name,
            "sha256": hashlib.sha256(scenario_bytes).hexdigest(),
            "seed": seed,
        },
        "group": _group_block(rep.group),
        "measure": _measure_block(mu),
        "representation": _rep_block(rep),
        "hypothesis": {
            "lambda_lo": op.bracket.lo,
            "lambda_hi": op.bracket.hi,
            "method": op.bracket.method,
            "status": status,
            "witness": jsonable(op.bracket.witness),
        },
        "kappa": {"estimate": kappa.value, "witness": jsonable(kappa.witness)},
    }
    if admissibility is not None:
        report["admissibility"] = {
            "admissible": admissibility.admissible,
            "violations": jsonable(admissibility.violations),
        }
        # observed spectral-gap cross-check: admissible measure + no almost
        # invariant vectors should come with a norm bracket below 1
        report["observations"] = {
            "gap_from_admissibility": {
                "kappa_positive": kappa.value > 0.1,
                "admissible": admissibility.admissible,
                "lambda_hi_below_one": op.bracket.hi < 1.0,
                "consistent": not (
                    kappa.value > 0.1 and admissibility.admissible
                )
                or op.bracket.hi < 1.0,
            }
        }
    if error is not None:
        report["error"] = error
    if decomposition is not None:
        d = decomposition
        report["dims"] = dict(d.dims)
        report["p_matrix"] = jsonable(d.p_mat)
        report["z1_basis"] = [jsonable(z.params) for z in d.basis.cocycles]
        report["coboundary_basis"] = [jsonable(z.params) for z in d.coboundaries]
        report["complement_basis"] = [jsonable(z.params) for z in d.complement]
        report["fixed_points"] = [
            {
                "b": jsonable(fp.b),
                "iterations": fp.iterations,
                "final_step": fp.final_step,
                "certificate": {
                    "kind": fp.certificate.kind,
                    "rate": fp.certificate.rate,
                },
                "oracle_residual": fp.oracle_residual,
            }
            for fp in d.fixed_points
        ]
        report["equivariance"] = [
            {
                "defects": jsonable(eq.defects),
                "identity_residuals": jsonable(eq.identity_residuals),
                "max_defect": eq.max_defect,
            }
            for eq in d.equivariance
        ]
        report["p_norm"] = {
            "estimate": d.p_norm.lower,
            "witness": jsonable(d.p_norm.witness.params)
            if d.p_norm.witness is not None
            else None,
            "theoretical_bound": jsonable(d.p_norm.theoretical_bound)
            if d.p_norm.theoretical_bound is not None
            else None,
            "exceeds_one": d.p_norm.exceeds_one,
            "num_samples": len(d.p_norm.samples),
        }
        report["lemma_residuals"] = jsonable(d.lemma)
        report["checks"] = jsonable(d.checks)
        if d.exact_oracle is not None:
            report["exact_oracle"] = jsonable(d.exact_oracle)
    return report


def dumps_report(report: dict) -> bytes:
    return (json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n").encode(
        "utf-8"
    )


def ratios_csv(decomposition: DecompositionReport) -> bytes:
    lines = ["sample,ratio"]
    for i, r in enumerate(decomposition.p_norm.samples):
        lines.append(f"{i},{r!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")
