import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from h1split import FreeGroup, GroupMismatchError, PermGroup, enumerate_elements
from h1split.groups import random_elements, reduce_word

F2 = FreeGroup(2, labels=["a", "b"])
S3 = PermGroup(3, [[1, 0, 2], [1, 2, 0]], labels=["s", "r"])

words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12)


def test_free_cancellation():
    a = F2.generator(0)
    assert (a * ~a).is_identity


def test_free_product_reduces():
    # (a b) * (b^-1 a) = a a
    ab = F2.element([1, 2])
    b_inv_a = F2.element([-2, 1])
    assert (ab * b_inv_a).word == (1, 1)


def test_free_inverse_examples():
    e = F2.identity()
    assert (~e) == e
    ab = F2.element([1, 2])
    assert (~ab).word == (-2, -1)


def test_perm_composition_convention():
    # (0 1) * (1 2) maps 0->1->2->0 under (a*b)(x) = a(b(x))
    g = PermGroup(3, [[1, 0, 2], [0, 2, 1]], labels=["s", "t"])
    s, t = g.gens()
    assert (s * t).perm == (1, 2, 0)


def test_perm_inverse():
    r = S3.generator(1)
    assert (~r).perm == (2, 0, 1)
    assert (r * ~r).is_identity


def test_enumerate_trivial_group():
    g = PermGroup(1, [[0]])
    elems = enumerate_elements(g)
    assert len(elems) == 1 and elems[0][0].is_identity
    assert elems[0][1] == ()


def test_enumerate_cyclic3():
    g = PermGroup(3, [[1, 2, 0]], labels=["s"])
    elems = enumerate_elements(g)
    assert len(elems) == 3
    # BFS visits s and then s^-1 from the identity, so s^2 gets word (-1,)
    assert [w for _, w in elems] == [(), (1,), (-1,)]


def test_enumerate_s3():
    assert len(enumerate_elements(S3)) == 6


def test_enumerate_free_rejected():
    with pytest.raises(ValueError):
        enumerate_elements(F2)


def test_mismatched_groups():
    other = FreeGroup(2, labels=["x", "y"])
    with pytest.raises(GroupMismatchError):
        F2.generator(0) * other.generator(0)


def test_parse_and_format_words():
    g = F2.parse_word("a b^-1 a^2")
    assert g.word == (1, -2, 1, 1)
    assert F2.format_word(g.word) == "a b^-1 a a"
    assert F2.parse_word("e").is_identity


@given(words, words, words)
def test_free_associativity(w1, w2, w3):
    a, b, c = F2.element(w1), F2.element(w2), F2.element(w3)
    assert (a * b) * c == a * (b * c)


@given(words)
def test_free_double_inverse_and_identity(w):
    a = F2.element(w)
    e = F2.identity()
    assert ~(~a) == a
    assert a * e == a and e * a == a
    assert (a * ~a).is_identity


@given(words, words)
def test_free_products_stay_reduced(w1, w2):
    w = (F2.element(w1) * F2.element(w2)).word
    assert all(w[i] != -w[i + 1] for i in range(len(w) - 1))


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8))
def test_reduce_word_idempotent(w):
    assert reduce_word(reduce_word(w)) == reduce_word(w)


def test_bfs_witness_words_multiply_back():
    for g, word in enumerate_elements(S3):
        acc = S3.identity()
        for ltr in word:
            acc = acc * S3.letter_element(ltr)
        assert acc == g


def test_perm_group_associativity_random():
    rng = np.random.default_rng(0)
    elems = random_elements(S3, rng, 12)
    for a, b, c in zip(elems, elems[1:], elems[2:]):
        assert (a * b) * c == a * (b * c)


def test_bad_permutation_rejected():
    with pytest.raises(ValueError):
        PermGroup(3, [[0, 0, 2]])


def test_membership_check():
    # (0 1) alone generates only a 2-element group; (0 1 2) is outside it
    g = PermGroup(3, [[1, 0, 2]])
    with pytest.raises(ValueError):
        g.element_from_perm((1, 2, 0))
