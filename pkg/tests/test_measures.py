from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from h1split import (
    AdmissiblePair,
    FinMeasure,
    FreeGroup,
    PermGroup,
    check_admissible,
    conjugate,
    convolve,
    delta,
    lazy_pair,
    lazy_uniform,
    power,
)
from h1split.groups import random_elements

F1 = FreeGroup(1, labels=["a"])
F2 = FreeGroup(2, labels=["a", "b"])
S3 = PermGroup(3, [[1, 0, 2], [1, 2, 0]], labels=["s", "r"])


def _w(mu, word):
    return mu.weight(mu.group.parse_word(word))


def test_convolve_identity():
    mu = lazy_uniform(F1)
    out = convolve(mu, delta(F1))
    for g, w in mu.items():
        assert out.weight(g) == pytest.approx(w, abs=1e-15)


def test_convolve_point_masses():
    a, b = F2.gens()
    out = convolve(delta(F2, a), delta(F2, b))
    assert out.weight(a * b) == pytest.approx(1.0)
    assert len(out) == 1


def test_lazy_square_exact():
    mu = lazy_uniform(F1, exact=True)
    sq = convolve(mu, mu)
    assert _w(sq, "e") == Fraction(3, 9)
    assert _w(sq, "a") == Fraction(2, 9)
    assert _w(sq, "a^-1") == Fraction(2, 9)
    assert _w(sq, "a^2") == Fraction(1, 9)
    assert _w(sq, "a^-2") == Fraction(1, 9)


def test_power_basics():
    mu = lazy_uniform(F1)
    assert power(mu, 1) is mu or dict(power(mu, 1).items()) == dict(mu.items())
    a = F1.generator(0)
    cubed = power(delta(F1, a), 3)
    assert cubed.weight(F1.parse_word("a^3")) == pytest.approx(1.0)
    sq = power(lazy_uniform(F1, exact=True), 2)
    assert _w(sq, "e") == Fraction(1, 3)


def test_power_zero_is_delta_e():
    mu = lazy_uniform(F2)
    out = power(mu, 0)
    assert out.weight(F2.identity()) == pytest.approx(1.0)
    assert len(out) == 1


def test_lazy_uniform_weights():
    mu2 = lazy_uniform(F2)
    assert len(mu2) == 5
    for word in ("e", "a", "a^-1", "b", "b^-1"):
        assert _w(mu2, word) == pytest.approx(0.2)
    mu1 = lazy_uniform(F1)
    for word in ("e", "a", "a^-1"):
        assert _w(mu1, word) == pytest.approx(1.0 / 3.0)


def test_lazy_uniform_trivial_group():
    g = PermGroup(1, [[0]])
    mu = lazy_uniform(g)
    assert len(mu) == 1
    assert mu.weight(g.identity()) == pytest.approx(1.0)


def test_lazy_uniform_s3():
    # distinct generating set {s, r, r^-1}: mass 1/4 each plus e
    mu = lazy_uniform(S3, exact=True)
    assert len(mu) == 4
    assert _w(mu, "e") == Fraction(1, 4)
    assert _w(mu, "s") == Fraction(1, 4)


def test_lazy_pair_admissible():
    for group in (F1, F2, S3):
        res = check_admissible(lazy_pair(group))
        assert res.admissible, res.violations


def test_admissibility_failures():
    e = F1.identity()
    a = F1.generator(0)
    # beta = 0 fails the translate condition at every generator
    res = check_admissible(AdmissiblePair(F1, {e: 1.0}, {}))
    assert not res.admissible
    assert {v["condition"] for v in res.violations} == {3}
    assert len(res.violations) == 2
    # alpha(e) = 0 fails condition 1
    res = check_admissible(AdmissiblePair(F1, {a: 1.0}, {a: 1.0, ~a: 1.0}))
    assert not res.admissible
    assert any(v["condition"] == 1 for v in res.violations)
    # alpha not normalized fails condition 2
    res = check_admissible(AdmissiblePair(F1, {e: 0.5}, {a: 1.0, ~a: 1.0}))
    assert any(v["condition"] == 2 for v in res.violations)


def test_weights_must_normalize():
    a = F1.generator(0)
    with pytest.raises(ValueError):
        FinMeasure(F1, {a: 0.5})
    with pytest.raises(ValueError):
        FinMeasure(F1, {a: -0.2, F1.identity(): 1.2})


def test_support_merges_normal_forms():
    a = F1.generator(0)
    same = F1.parse_word("a a a^-1")
    mu = FinMeasure(F1, [(a, 0.5), (same, 0.5)])
    assert len(mu) == 1
    assert mu.weight(a) == pytest.approx(1.0)


def test_conjugate_preserves_mass_and_symmetry():
    mu = lazy_uniform(S3)
    gamma = S3.generator(1)
    nu = conjugate(mu, gamma)
    assert sum(float(w) for _, w in nu.items()) == pytest.approx(1.0)
    assert nu.is_symmetric(1e-12)


@given(st.integers(0, 2**30))
def test_convolution_associative(seed):
    rng = np.random.default_rng(seed)
    measures = []
    for _ in range(3):
        elems = random_elements(F2, rng, 3, max_word_len=3)
        raw = rng.random(len(elems)) + 0.05
        raw /= raw.sum()
        acc = {}
        for g, w in zip(elems, raw):
            acc[g] = acc.get(g, 0.0) + float(w)
        measures.append(FinMeasure(F2, acc))
    m1, m2, m3 = measures
    left = convolve(convolve(m1, m2), m3)
    right = convolve(m1, convolve(m2, m3))
    supp = set(left.support) | set(right.support)
    assert all(
        abs(float(left.weight(g)) - float(right.weight(g))) <= 1e-12 for g in supp
    )


def test_symmetric_square_is_symmetric():
    mu = lazy_uniform(F2)
    assert mu.is_symmetric()
    assert convolve(mu, mu).is_symmetric(1e-12)


def test_power_mass_conserved():
    mu = lazy_uniform(F2)
    for n in range(1, 7):
        total = sum(float(w) for _, w in power(mu, n).items())
        assert abs(total - 1.0) <= 1e-12
