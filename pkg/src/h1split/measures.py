"""Finitely supported probability measures on a group.

Weights are floats by default; an exact mode stores them as
:class:`fractions.Fraction`, which convolution preserves, so small examples
can be checked without rounding. The admissibility conditions checked here
are the discrete form used for spectral-gap certificates: a density
proportional to ``alpha + beta`` with ``alpha(e) > 0``, ``sum(alpha) = 1``
and ``(s . beta)(g) = beta(s^-1 g) >= alpha(g)`` for every generator ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .groups import FreeGroup, Group, GroupElement, GroupMismatchError

NORMALIZATION_TOL = 1e-12


def _as_items(weights) -> list:
    if isinstance(weights, Mapping):
        return list(weights.items())
    return list(weights)


class FinMeasure:
    """Probability measure with finite support on a group.

    Support entries are merged in normal form; zero weights are dropped.
    Instances are immutable by convention: no method mutates ``self``.
    """

    def __init__(self, group: Group, weights, *, tol: float = NORMALIZATION_TOL):
        merged: dict = {}
        for g, w in _as_items(weights):
            if getattr(g, "group", None) != group:
                raise GroupMismatchError("support element not in the stated group")
            if w < 0:
                raise ValueError(f"negative weight {w} at {g!r}")
            if w == 0:
                continue
            merged[g] = merged.get(g, 0) + w
        self.group = group
        self._weights = merged
        total = sum(merged.values())
        if self.is_exact:
            if total != 1:
                raise ValueError(f"weights sum to {total}, expected exactly 1")
        elif abs(float(total) - 1.0) > tol:
            raise ValueError(f"weights sum to {total}, expected 1 within {tol}")

    @property
    def support(self) -> tuple:
        return tuple(self._weights.keys())

    @property
    def is_exact(self) -> bool:
        return all(isinstance(w, (Fraction, int)) for w in self._weights.values())

    def weight(self, g) -> float | Fraction:
        return self._weights.get(g, 0)

    def items(self):
        return self._weights.items()

    def __len__(self) -> int:
        return len(self._weights)

    def is_symmetric(self, tol: float = NORMALIZATION_TOL) -> bool:
        for g, w in self._weights.items():
            w_inv = self._weights.get(~g, 0)
            if self.is_exact:
                if w != w_inv:
                    return False
            elif abs(float(w) - float(w_inv)) > tol:
                return False
        return True

    def __repr__(self) -> str:
        entries = ", ".join(f"{g!r}: {w}" for g, w in self._weights.items())
        return f"FinMeasure({{{entries}}})"


def delta(group: Group, g: GroupElement | None = None, *, exact: bool = False) -> FinMeasure:
    """Point mass; defaults to the identity element."""
    if g is None:
        g = group.identity()
    one = Fraction(1) if exact else 1.0
    return FinMeasure(group, {g: one})


def convolve(mu: FinMeasure, nu: FinMeasure) -> FinMeasure:
    """Convolution ``(mu * nu)(g) = sum_h mu(h) nu(h^-1 g)``."""
    if mu.group != nu.group:
        raise GroupMismatchError("measures live on different groups")
    acc: dict = {}
    for h, wh in mu.items():
        for k, wk in nu.items():
            g = h * k
            acc[g] = acc.get(g, 0) + wh * wk
    return FinMeasure(mu.group, acc)


def power(mu: FinMeasure, n: int) -> FinMeasure:
    """n-fold convolution power; ``n = 0`` returns the point mass at e."""
    if n < 0:
        raise ValueError("negative convolution powers are not defined")
    if n == 0:
        return delta(mu.group, exact=mu.is_exact)
    out = mu
    for _ in range(n - 1):
        out = convolve(out, mu)
    return out


def conjugate(mu: FinMeasure, gamma: GroupElement) -> FinMeasure:
    """Pushforward of ``mu`` under ``g -> gamma g gamma^-1``."""
    gamma_inv = ~gamma
    acc: dict = {}
    for g, w in mu.items():
        h = gamma * g * gamma_inv
        acc[h] = acc.get(h, 0) + w
    return FinMeasure(mu.group, acc)


def generating_set(group: Group) -> tuple:
    """Distinct elements of the symmetric generating set, in letter order."""
    seen = []
    for ltr in group.letters():
        g = group.letter_element(ltr)
        if g not in seen:
            seen.append(g)
    return tuple(seen)


@dataclass
class AdmissiblePair:
    """Weight pair (alpha, beta) generating an admissible density."""

    group: Group
    alpha: dict
    beta: dict

    def __post_init__(self):
        for fn in (self.alpha, self.beta):
            for g, w in fn.items():
                if getattr(g, "group", None) != self.group:
                    raise GroupMismatchError("weight on element outside the group")
                if w < 0:
                    raise ValueError("weight functions must be nonnegative")


@dataclass
class AdmissibilityResult:
    admissible: bool
    violations: list = field(default_factory=list)


def check_admissible(pair: AdmissiblePair, *, tol: float = NORMALIZATION_TOL) -> AdmissibilityResult:
    """Check the three discrete admissibility conditions.

    Violations name the failing condition and, for the translate condition,
    the witnessing generator and support point.
    """
    group = pair.group
    exact = all(
        isinstance(w, (Fraction, int))
        for fn in (pair.alpha, pair.beta)
        for w in fn.values()
    )
    slack = 0 if exact else tol
    violations = []

    e = group.identity()
    alpha_e = pair.alpha.get(e, 0)
    if not alpha_e > 0:
        violations.append(
            {"condition": 1, "detail": f"alpha(e) = {alpha_e}, must be positive"}
        )

    total = sum(pair.alpha.values())
    ok2 = total == 1 if exact else abs(float(total) - 1.0) <= tol
    if not ok2:
        violations.append(
            {"condition": 2, "detail": f"sum(alpha) = {total}, must equal 1"}
        )

    for s in generating_set(group):
        s_inv = ~s
        for g, a in pair.alpha.items():
            if a == 0:
                continue
            b = pair.beta.get(s_inv * g, 0)
            if b < a - slack:
                violations.append(
                    {
                        "condition": 3,
                        "generator": repr(s),
                        "element": repr(g),
                        "detail": f"(s.beta)(g) = {b} < alpha(g) = {a}",
                    }
                )

    return AdmissibilityResult(admissible=not violations, violations=violations)


def lazy_pair(group: Group, *, exact: bool = False) -> AdmissiblePair:
    """The canonical pair alpha = point mass at e, beta = indicator of S."""
    one = Fraction(1) if exact else 1.0
    alpha = {group.identity(): one}
    beta = {s: one for s in generating_set(group)}
    return AdmissiblePair(group, alpha, beta)


def lazy_uniform(group: Group, *, exact: bool = False) -> FinMeasure:
    """Measure proportional to alpha + beta for the canonical pair.

    Weight ``1/(1+|S|)`` on e and on each distinct generator; if the identity
    occurs among the generators its two contributions merge.
    """
    pair = lazy_pair(group, exact=exact)
    combined: dict = dict(pair.alpha)
    for g, w in pair.beta.items():
        combined[g] = combined.get(g, 0) + w
    total = sum(combined.values())
    if exact:
        weights = {g: Fraction(w, 1) / total for g, w in combined.items()}
    else:
        weights = {g: float(w) / float(total) for g, w in combined.items()}
    return FinMeasure(group, weights)
