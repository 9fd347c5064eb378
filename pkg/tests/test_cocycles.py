import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from h1split import (
    Cocycle,
    FreeGroup,
    NormedSpace,
    Representation,
    d_pi,
    from_params,
    gamma_act,
    membership_residual,
    power,
    z1_basis,
    zero_cocycle,
)
from tests.conftest import ROT_THIRD

F1 = FreeGroup(1, labels=["a"])


def test_extend_identity_is_zero(anchor_a):
    z = Cocycle(anchor_a.rep, [[1.0, 0.5]])
    assert np.allclose(z.extend(F1.identity()), 0.0)


def test_extend_unfolds_once(anchor_a):
    z = Cocycle(anchor_a.rep, [[1.0, 0.5]])
    a2 = F1.parse_word("a^2")
    expected = z.values[0] + ROT_THIRD @ z.values[0]
    assert np.allclose(z.extend(a2), expected, atol=1e-14)


def test_extend_inverse_letter(anchor_a):
    z = Cocycle(anchor_a.rep, [[1.0, 0.5]])
    a_inv = F1.parse_word("a^-1")
    expected = -(ROT_THIRD.T @ z.values[0])
    assert np.allclose(z.extend(a_inv), expected, atol=1e-14)
    assert np.allclose(z.generator_value(-1), expected, atol=1e-14)


def test_z1_dims(anchor_a, anchor_b, anchor_c):
    assert anchor_a.basis.dim == 2
    assert anchor_b.basis.dim == 4
    assert anchor_c.basis.dim == 2


def test_z1_basis_members_satisfy_relations(anchor_c):
    for z in anchor_c.basis.cocycles:
        assert membership_residual(z) <= 1e-9
    rng = np.random.default_rng(8)
    for _ in range(10):
        assert membership_residual(anchor_c.basis.sample(rng)) <= 1e-9


def test_d_pi_zero_vector(anchor_a):
    z = d_pi(anchor_a.rep, np.zeros(2))
    assert np.allclose(z.values, 0.0)


def test_d_pi_rotation_value(anchor_a):
    z = d_pi(anchor_a.rep, [1.0, 0.0])
    assert np.allclose(z.values[0], [1.5, -math.sqrt(3) / 2], atol=1e-12)


def test_d_pi_trivial_rep():
    rep = Representation(F1, NormedSpace(2, 2.0), [np.eye(2)], "orthogonal")
    z = d_pi(rep, [0.3, -0.7])
    assert np.allclose(z.values, 0.0)


def test_d_pi_lands_in_z1(anchor_c):
    rng = np.random.default_rng(2)
    for _ in range(20):
        v = rng.standard_normal(2)
        assert membership_residual(d_pi(anchor_c.rep, v)) <= 1e-10


def test_s_norm_examples(anchor_a):
    assert zero_cocycle(anchor_a.rep).s_norm() == 0.0
    z = Cocycle(anchor_a.rep, [[1.0, 0.0]])
    # isometry: the inverse-letter value has the same norm
    assert z.s_norm() == pytest.approx(1.0, abs=1e-12)
    assert (3.0 * z).s_norm() == pytest.approx(3.0, abs=1e-12)


def test_mu_average_examples(anchor_a):
    mu = anchor_a.mu
    assert np.allclose(zero_cocycle(anchor_a.rep).mu_average(mu), 0.0)

    # coboundary: z^mu = v - A v
    rng = np.random.default_rng(1)
    v = rng.standard_normal(2)
    z = d_pi(anchor_a.rep, v)
    assert np.allclose(
        z.mu_average(mu), v - anchor_a.op.matrix @ v, atol=1e-12
    )

    z = Cocycle(anchor_a.rep, [[1.0, 0.0]])
    expected = (np.eye(2) - ROT_THIRD.T) @ np.array([1.0, 0.0]) / 3.0
    assert np.allclose(z.mu_average(mu), expected, atol=1e-14)


def test_gamma_act_identity_shift(anchor_a):
    z = Cocycle(anchor_a.rep, [[0.4, -1.2]])
    shifted = gamma_act(F1.identity(), z)
    assert np.allclose(shifted.offset, 0.0)
    assert np.allclose(shifted.letter_value(1), z.values[0], atol=1e-14)


def test_gamma_act_offset_and_table(anchor_a):
    z = Cocycle(anchor_a.rep, [[1.0, 0.5]])
    a = F1.generator(0)
    shifted = gamma_act(a, z)
    # value at the identity is z_gamma
    assert np.allclose(shifted.offset, z.extend(a), atol=1e-14)
    assert np.allclose(shifted.value(F1.identity()), z.extend(a), atol=1e-14)
    # (a.z)_a = z_{a^2} = z_a + pi_a z_a
    expected = z.values[0] + ROT_THIRD @ z.values[0]
    assert np.allclose(shifted.letter_value(1), expected, atol=1e-14)


def test_shifted_mu_average_matches_direct(anchor_b):
    rng = np.random.default_rng(9)
    z = anchor_b.basis.sample(rng)
    gamma = anchor_b.group.parse_word("a b")
    shifted = gamma_act(gamma, z)
    direct = sum(
        float(w) * z.extend(gamma * g) for g, w in anchor_b.mu.items()
    )
    assert np.allclose(shifted.mu_average(anchor_b.mu), direct, atol=1e-12)


@given(st.integers(0, 2**30))
def test_extend_additive(seed):
    rng = np.random.default_rng(seed)
    group = FreeGroup(2)
    rep = Representation(
        group, NormedSpace(2, 2.0), [ROT_THIRD, ROT_THIRD.T], "orthogonal"
    )
    z = Cocycle(rep, rng.standard_normal((2, 2)))
    zp = Cocycle(rep, rng.standard_normal((2, 2)))
    word = [int(rng.integers(1, 3)) * (1 if rng.integers(0, 2) else -1) for _ in range(5)]
    g = group.element(word)
    assert np.allclose(
        (z + zp).extend(g), z.extend(g) + zp.extend(g), atol=1e-10
    )


def test_mu_average_additive(anchor_b):
    rng = np.random.default_rng(12)
    for _ in range(20):
        z = anchor_b.basis.sample(rng)
        zp = anchor_b.basis.sample(rng)
        lhs = (z + zp).mu_average(anchor_b.mu)
        rhs = z.mu_average(anchor_b.mu) + zp.mu_average(anchor_b.mu)
        assert np.abs(lhs - rhs).max() <= 1e-12 * (1 + np.abs(rhs).max())


def test_convolution_identity(anchors):
    # A^mu z^nu + z^mu = z^(mu*nu) for nu = mu and nu = mu^2
    for anchor in anchors:
        rng = np.random.default_rng(anchor.seed)
        mu = anchor.mu
        mu2, mu3 = power(mu, 2), power(mu, 3)
        for _ in range(10):
            z = anchor.basis.sample(rng)
            zmu = z.mu_average(mu)
            for nu, conv in ((mu, mu2), (mu2, mu3)):
                lhs = anchor.op.matrix @ z.mu_average(nu) + zmu
                rhs = z.mu_average(conv)
                assert np.abs(lhs - rhs).max() <= 1e-10 * (1 + np.abs(rhs).max())


def test_s_norm_axioms(anchor_b):
    rng = np.random.default_rng(21)
    for _ in range(25):
        z = anchor_b.basis.sample(rng)
        zp = anchor_b.basis.sample(rng)
        assert (z + zp).s_norm() <= z.s_norm() + zp.s_norm() + 1e-12
        c = float(rng.standard_normal())
        assert (c * z).s_norm() == pytest.approx(abs(c) * z.s_norm(), abs=1e-10)


def test_s_norm_definite(anchor_c):
    # s_norm(z) = 0 forces z = 0 in basis coordinates
    for z in anchor_c.basis.cocycles:
        assert z.s_norm() > 1e-3
    assert zero_cocycle(anchor_c.rep).s_norm() == 0.0


def test_coboundary_norm_bound_isometric(anchor_a, anchor_b):
    rng = np.random.default_rng(31)
    for anchor in (anchor_a, anchor_b):
        for _ in range(20):
            v = rng.standard_normal(2)
            z = d_pi(anchor.rep, v)
            assert z.s_norm() <= 2.0 * anchor.rep.space.norm(v) + 1e-12


def test_basis_coordinates_roundtrip(anchor_c):
    rng = np.random.default_rng(17)
    c = rng.standard_normal(anchor_c.basis.dim)
    z = anchor_c.basis.from_coords(c)
    assert np.allclose(anchor_c.basis.coordinates(z), c, atol=1e-10)


def test_basis_rejects_foreign_vectors(anchor_c):
    from h1split import BasisError

    # a generator assignment violating the relations is outside Z^1
    bad = from_params(anchor_c.rep, [1.0, 0.0, 0.0, 0.0])
    if membership_residual(bad) > 1e-6:
        with pytest.raises(BasisError):
            anchor_c.basis.coordinates(bad)
