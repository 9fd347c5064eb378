"""Scenario files: the hand-editable description of one pipeline run.

A scenario is a JSON object with ``group``, ``measure`` and ``representation``
blocks plus a mandatory ``seed``. Group elements are written as words in the
generator labels ("a b^-1", "e" for the identity), matrices are row-major
nested lists, and p may be a number or the string "inf". Weights may be
numbers or exact fraction strings like "1/3".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cocycles import Cocycle, membership_residual
from .groups import FreeGroup, Group, PermGroup
from .measures import AdmissiblePair, FinMeasure, lazy_pair, lazy_uniform
from .repspace import FAMILIES, NormedSpace, Representation

DEFAULT_TOLERANCES = {"fixed_point": 1e-10, "idempotence": 1e-8, "rank": 1e-9}
DEFAULT_SAMPLES = {"p_norm": 200, "lemma": 20, "verify": 50}


class ScenarioError(ValueError):
    """The scenario file is malformed or internally inconsistent."""


@dataclass
class Scenario:
    seed: int
    group: Group
    measure: FinMeasure
    rep: Representation
    admissible_pair: AdmissiblePair | None
    cocycles: tuple[Cocycle, ...]
    tolerances: dict
    samples: dict
    exact_oracle: bool | None
    ratios_csv: bool
    raw: dict = field(repr=False, default_factory=dict)


def _parse_weight(x):
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(f"bad weight {x!r}") from None
    if isinstance(x, (int, float)):
        return float(x)
    raise ScenarioError(f"bad weight {x!r}")


def _parse_p(x) -> float:
    if isinstance(x, str):
        if x.lower() in ("inf", "infinity"):
            return math.inf
        raise ScenarioError(f"bad p value {x!r}")
    p = float(x)
    if not p >= 1:
        raise ScenarioError(f"p must be >= 1, got {p}")
    return p


def _build_group(block: dict) -> Group:
    kind = block.get("kind")
    if kind == "free":
        if "rank" not in block:
            raise ScenarioError("free group block needs a rank")
        return FreeGroup(int(block["rank"]), labels=block.get("labels"))
    if kind == "finite_perm":
        gens = block.get("generators")
        if gens is None or "degree" not in block:
            raise ScenarioError("finite_perm block needs degree and generators")
        if isinstance(gens, dict):
            labels = list(gens.keys())
            perms = list(gens.values())
        else:
            labels = block.get("labels")
            perms = gens
        try:
            return PermGroup(int(block["degree"]), perms, labels=labels)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
    raise ScenarioError(f"unknown group kind {kind!r}")


def _parse_element(group: Group, word: str):
    try:
        return group.parse_word(word)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def _parse_weight_list(group: Group, entries) -> dict:
    out: dict = {}
    for entry in entries:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise ScenarioError(f"weight entries must be [word, weight], got {entry!r}")
        word, w = entry
        g = _parse_element(group, str(word))
        out[g] = out.get(g, 0) + _parse_weight(w)
    return out


def _build_measure(group: Group, block: dict) -> FinMeasure:
    mtype = block.get("type", "lazy_uniform")
    exact = bool(block.get("exact", False))
    if mtype == "lazy_uniform":
        return lazy_uniform(group, exact=exact)
    if mtype == "explicit":
        weights = block.get("weights")
        if not weights:
            raise ScenarioError("explicit measure needs a weights list")
        try:
            return FinMeasure(group, _parse_weight_list(group, weights))
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
    raise ScenarioError(f"unknown measure type {mtype!r}")


def _build_representation(group: Group, block: dict) -> Representation:
    if "p" not in block or "dim" not in block or "matrices" not in block:
        raise ScenarioError("representation block needs p, dim and matrices")
    p = _parse_p(block["p"])
    dim = int(block["dim"])
    family = block.get("family", "unchecked")
    if family not in FAMILIES:
        raise ScenarioError(f"unknown isometry family {family!r}")
    try:
        space = NormedSpace(dim, p)
        return Representation(group, space, block["matrices"], family)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def _build_cocycles(rep: Representation, entries, tol: float) -> tuple[Cocycle, ...]:
    out = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ScenarioError("each cocycle must map generator labels to vectors")
        rows = []
        for lab in rep.group.labels:
            if lab not in entry:
                raise ScenarioError(f"cocycle {i} is missing generator {lab!r}")
            vec = entry[lab]
            if len(vec) != rep.space.dim:
                raise ScenarioError(
                    f"cocycle {i} value for {lab!r} has length {len(vec)}, "
                    f"expected {rep.space.dim}"
                )
            rows.append([float(x) for x in vec])
        z = Cocycle(rep, rows)
        res = membership_residual(z)
        if res > tol:
            raise ScenarioError(
                f"cocycle {i} violates the relation constraints (residual {res:.3e})"
            )
        out.append(z)
    return tuple(out)


def parse_scenario(data: dict, *, raw: dict | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    if "seed" not in data:
        raise ScenarioError("scenario needs a seed (all randomized steps are seeded)")
    try:
        seed = int(data["seed"])
    except (TypeError, ValueError):
        raise ScenarioError(f"bad seed {data.get('seed')!r}") from None

    for key in ("group", "measure", "representation"):
        if key not in data:
            raise ScenarioError(f"scenario is missing the {key!r} block")

    group = _build_group(data["group"])
    measure = _build_measure(group, data["measure"])
    rep = _build_representation(group, data["representation"])

    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(data.get("tolerances", {}))
    samples = dict(DEFAULT_SAMPLES)
    samples.update(data.get("samples", {}))

    pair = None
    if "admissible_pair" in data:
        block = data["admissible_pair"]
        if not isinstance(block, dict) or "alpha" not in block or "beta" not in block:
            raise ScenarioError("admissible_pair needs alpha and beta weight lists")
        try:
            pair = AdmissiblePair(
                group,
                _parse_weight_list(group, block["alpha"]),
                _parse_weight_list(group, block["beta"]),
            )
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
    elif data["measure"].get("type", "lazy_uniform") == "lazy_uniform":
        pair = lazy_pair(group, exact=measure.is_exact)

    cocycles = _build_cocycles(
        rep, data.get("cocycles", []), tol=float(tolerances["rank"])
    )

    outputs = data.get("outputs", {})
    return Scenario(
        seed=seed,
        group=group,
        measure=measure,
        rep=rep,
        admissible_pair=pair,
        cocycles=cocycles,
        tolerances=tolerances,
        samples=samples,
        exact_oracle=data.get("exact_oracle"),
        ratios_csv=bool(outputs.get("ratios_csv", False)),
        raw=raw if raw is not None else data,
    )


def load_scenario(path: str | Path) -> tuple[Scenario, bytes]:
    """Parse a scenario file; returns the scenario and the raw bytes (hashed
    into the report so reruns are attributable)."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(blob.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from None
    return parse_scenario(data, raw=data), blob
