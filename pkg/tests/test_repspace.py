import math

import numpy as np
import pytest

from h1split import (
    FreeGroup,
    NormedSpace,
    PermGroup,
    Representation,
    convolve,
    delta,
    kappa_estimate,
    lazy_uniform,
    markov,
    op_norm,
)
from tests.conftest import ROT_THIRD, rotation

F1 = FreeGroup(1, labels=["a"])
F2 = FreeGroup(2, labels=["a", "b"])


def test_pi_identity(anchor_a):
    assert np.allclose(anchor_a.rep.pi(F1.identity()), np.eye(2))


def test_pi_word_products():
    theta = 0.7
    rep = Representation(F1, NormedSpace(2, 2.0), [rotation(theta)], "orthogonal")
    a2 = F1.parse_word("a^2")
    assert np.allclose(rep.pi(a2), rotation(2 * theta), atol=1e-12)

    repB = Representation(
        F2, NormedSpace(2, 2.0), [rotation(0.3), rotation(1.1)], "orthogonal"
    )
    g = F2.parse_word("a b^-1")
    expected = rotation(0.3) @ rotation(1.1).T
    assert np.allclose(repB.pi(g), expected, atol=1e-12)


def test_markov_delta_identity(anchor_a):
    op = markov(anchor_a.rep, delta(F1))
    assert np.allclose(op.matrix, np.eye(2))
    assert op.bracket.lo == pytest.approx(1.0, abs=1e-12)
    assert op.bracket.hi == pytest.approx(1.0, abs=1e-12)


def test_markov_anchor_values(anchor_a, anchor_b):
    # rotation by 2*pi/3 averaged lazily: R + R^T = -I, so A vanishes on F1
    assert np.abs(anchor_a.op.matrix).max() <= 1e-15
    assert anchor_a.op.bracket.hi <= 1e-12
    # and equals -(1/5) I on F2
    assert np.allclose(anchor_b.op.matrix, -0.2 * np.eye(2), atol=1e-15)
    assert anchor_b.op.bracket.lo == pytest.approx(0.2, abs=1e-12)
    assert anchor_b.op.bracket.hi == pytest.approx(0.2, abs=1e-12)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
def test_op_norm_identity_and_zero(p):
    space = NormedSpace(3, p)
    br = op_norm(np.eye(3), space)
    assert br.lo == pytest.approx(1.0, abs=1e-12)
    assert br.hi == pytest.approx(1.0, abs=1e-12)
    br = op_norm(np.zeros((3, 3)), space)
    assert br.lo == 0.0 and br.hi == 0.0


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
def test_op_norm_diagonal(p):
    br = op_norm(np.diag([2.0, 1.0]), NormedSpace(2, p))
    assert br.lo == pytest.approx(2.0, abs=1e-9)
    assert br.hi == pytest.approx(2.0, abs=1e-9)


def test_op_norm_exact_ends_match_numpy():
    rng = np.random.default_rng(5)
    for _ in range(20):
        A = rng.standard_normal((4, 4))
        assert op_norm(A, NormedSpace(4, 1.0)).hi == pytest.approx(
            np.linalg.norm(A, 1), abs=1e-12
        )
        assert op_norm(A, NormedSpace(4, math.inf)).hi == pytest.approx(
            np.linalg.norm(A, np.inf), abs=1e-12
        )
        assert op_norm(A, NormedSpace(4, 2.0)).hi == pytest.approx(
            np.linalg.norm(A, 2), abs=1e-10
        )


@pytest.mark.parametrize("p", [1.3, 1.5, 3.0, 4.0])
def test_op_norm_bracket_sandwich_random(p):
    rng = np.random.default_rng(11)
    space = NormedSpace(3, p)
    for _ in range(15):
        A = rng.standard_normal((3, 3))
        br = op_norm(A, space, seed=1)
        assert br.lo <= br.hi + 1e-12
        w = br.witness
        realized = space.norm(A @ w) / space.norm(w)
        assert realized == pytest.approx(br.lo, abs=1e-9)


def test_markov_homomorphism(anchor_b, anchor_c):
    for anchor in (anchor_b, anchor_c):
        mu2 = convolve(anchor.mu, anchor.mu)
        op2 = markov(anchor.rep, mu2)
        assert np.abs(op2.matrix - anchor.op.matrix @ anchor.op.matrix).max() <= 1e-10


def test_markov_norm_at_most_one_for_isometries(anchor_a, anchor_b):
    for anchor in (anchor_a, anchor_b):
        assert anchor.op.bracket.hi <= 1.0 + 1e-9


def test_isometry_on_random_vectors(anchor_b):
    rng = np.random.default_rng(3)
    space = anchor_b.rep.space
    for _ in range(50):
        v = rng.standard_normal(2)
        for ltr in anchor_b.group.letters():
            assert abs(
                space.norm(anchor_b.rep.matrix(ltr) @ v) - space.norm(v)
            ) <= 1e-12


def test_signed_permutation_isometric_for_p3():
    S3 = PermGroup(3, [[1, 0, 2], [1, 2, 0]], labels=["s", "r"])
    mats = {
        "s": [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
        "r": [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
    }
    rep = Representation(S3, NormedSpace(3, 3.0), mats, "signed_permutation")
    rng = np.random.default_rng(4)
    space = rep.space
    for _ in range(30):
        v = rng.standard_normal(3)
        for ltr in S3.letters():
            assert abs(space.norm(rep.matrix(ltr) @ v) - space.norm(v)) <= 1e-12


def test_family_validation():
    with pytest.raises(ValueError):
        Representation(F1, NormedSpace(2, 2.0), [np.diag([2.0, 1.0])], "orthogonal")
    with pytest.raises(ValueError):
        Representation(F1, NormedSpace(2, 3.0), [ROT_THIRD], "orthogonal")
    with pytest.raises(ValueError):
        Representation(
            F1, NormedSpace(2, 3.0), [np.array([[0.5, 0.5], [0.5, -0.5]])],
            "signed_permutation",
        )
    with pytest.raises(ValueError):
        Representation(F1, NormedSpace(2, 2.0), [np.zeros((2, 2))])


def test_perm_relation_validation():
    S3 = PermGroup(3, [[1, 0, 2], [1, 2, 0]], labels=["s", "r"])
    good = {"s": [[0, 1], [1, 0]], "r": [[0, -1], [1, -1]]}
    Representation(S3, NormedSpace(2, 2.0), good, "unchecked")
    bad = {"s": [[0, 1], [1, 0]], "r": [[1, 0], [0.5, 1]]}
    with pytest.raises(ValueError, match="relation"):
        Representation(S3, NormedSpace(2, 2.0), bad, "unchecked")


def test_kappa_trivial_rep():
    rep = Representation(F1, NormedSpace(2, 2.0), [np.eye(2)], "orthogonal")
    assert kappa_estimate(rep, seed=0).value == pytest.approx(0.0, abs=1e-12)


def test_kappa_rotation(anchor_a):
    # plane rotations displace every unit vector by exactly 2 sin(theta/2)
    est = kappa_estimate(anchor_a.rep, seed=0, restarts=8)
    assert est.value == pytest.approx(2.0 * math.sin(math.pi / 3.0), abs=1e-9)


def test_kappa_with_fixed_vector():
    M = np.eye(3)
    M[:2, :2] = rotation(0.9)
    rep = Representation(F1, NormedSpace(3, 2.0), [M], "orthogonal")
    est = kappa_estimate(rep, seed=0)
    assert est.value <= 1e-12
    assert np.allclose(M @ est.witness, est.witness, atol=1e-9)
