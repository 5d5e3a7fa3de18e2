import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cobweave.boolsemi import (BoolMat, BudgetExceeded, ShapeError, SizeError, bmat_kron, bmat_mul,
                               bmat_transpose, entry_cap, vec)
from cobweave.fixtures import ab_fixture


def naive_mul(a, b):
    """OR of ANDs, written out."""
    return [[int(any(a[i][k] and b[k][j] for k in range(len(b)))) for j in range(len(b[0]))]
            for i in range(len(a))]


def test_identity_times_swap():
    swap = BoolMat([[0, 1], [1, 0]])
    assert bmat_mul(BoolMat.identity(2), swap) == swap


def test_hand_evaluated_product():
    got = bmat_mul(BoolMat([[1, 1], [0, 0]]), BoolMat([[1, 0], [1, 0]]))
    assert got.tolist() == [[1, 0], [0, 0]]


def test_ab_operator_matches_one_step_reachability():
    m = ab_fixture()
    got = bmat_mul(m.letter_matrix("B"), m.letter_matrix("A"))
    # reading AB from q moves to r; column = source, row = target
    idx = {q: i for i, q in enumerate(m.states)}
    want = np.zeros((2, 2), dtype=bool)
    for q, a, r in m.transitions:
        for r2, b, s in m.transitions:
            if a == "A" and b == "B" and r2 == r:
                want[idx[s], idx[q]] = True
    assert got == BoolMat(want)


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        bmat_mul(BoolMat.zeros(2, 3), BoolMat.zeros(2, 3))


def test_kron_identities_and_unit():
    assert bmat_kron(BoolMat.identity(2), BoolMat.identity(3)) == BoolMat.identity(6)
    m = BoolMat([[1, 0, 1], [0, 1, 1]])
    assert bmat_kron(BoolMat([[1]]), m) == m


def test_kron_componentwise_on_fixture():
    ta = ab_fixture().letter_matrix("A")
    d0, d1 = vec([1, 0]), vec([0, 1])
    assert bmat_mul(bmat_kron(ta, ta), bmat_kron(d0, d0)) == bmat_kron(d1, d1)


def test_transpose_basics():
    assert bmat_transpose(BoolMat.identity(4)) == BoolMat.identity(4)
    m = BoolMat([[1, 0, 1], [0, 0, 1]])
    assert bmat_transpose(bmat_transpose(m)) == m


def test_transpose_pairing_on_fixture():
    ta = ab_fixture().letter_matrix("A")
    tv = bmat_transpose(ta)
    for i, j in itertools.product(range(2), repeat=2):
        q, p = BoolMat.unit(2, i), BoolMat.unit(2, j)
        lhs = bmat_mul(bmat_transpose(p), bmat_mul(ta, q))
        rhs = bmat_mul(bmat_transpose(bmat_mul(tv, p)), q)
        assert lhs == rhs


def test_matrices_are_read_only():
    m = BoolMat.identity(2)
    with pytest.raises(ValueError):
        m.array[0, 0] = False


def test_size_cap(monkeypatch):
    monkeypatch.delenv("COBWEAVE_BUDGET", raising=False)
    assert entry_cap() == 2 ** 16
    with pytest.raises(SizeError):
        BoolMat.zeros(300, 300)
    monkeypatch.setenv("COBWEAVE_BUDGET", "32")
    assert entry_cap() == 32 * 4096
    assert BoolMat.zeros(300, 300).shape == (300, 300)


def test_budget_error_is_runtime_error():
    assert issubclass(BudgetExceeded, RuntimeError)


square = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=n, max_size=n))


@given(square, square)
def test_mul_matches_naive_when_square(a, b):
    if len(a) != len(b):
        return
    assert bmat_mul(BoolMat(a), BoolMat(b)).tolist() == naive_mul(a, b)


@given(square, square, square)
def test_mul_associative(a, b, c):
    if not len(a) == len(b) == len(c):
        return
    a, b, c = BoolMat(a), BoolMat(b), BoolMat(c)
    assert bmat_mul(bmat_mul(a, b), c) == bmat_mul(a, bmat_mul(b, c))


@given(square, square)
def test_transpose_reverses_products(a, b):
    if len(a) != len(b):
        return
    a, b = BoolMat(a), BoolMat(b)
    assert bmat_transpose(bmat_mul(a, b)) == bmat_mul(bmat_transpose(b), bmat_transpose(a))
