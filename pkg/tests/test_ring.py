import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringra.ring import inv_mod_q, ring_for_q, ring_params, solve_mod_q


def test_add_examples():
    p = ring_for_q(8)
    assert p.add(3, 7) == 2
    assert p.add(0, 5) == 5
    assert p.add(5, 3) == 0


def test_mul_examples():
    p = ring_for_q(8)
    assert p.mul(2, 4) == 0
    assert p.mul(1, 6) == 6
    # exhaustive multiplication-table oracle for 3*3
    table = {(a, b): (a * b) % 8 for a in range(8) for b in range(8)}
    assert p.mul(3, 3) == table[(3, 3)] == 1


def test_zero_multiplier_table_q8():
    p = ring_for_q(8)
    assert [p.zero_multiplier(a) for a in range(1, 8)] == [8, 4, 8, 2, 8, 4, 8]
    with pytest.raises(ValueError):
        p.zero_multiplier(0)


def test_inverse():
    p = ring_for_q(8)
    assert p.inverse(3) == 3  # found by exhaustive search: 3*3 = 9 = 1 mod 8
    assert p.inverse(1) == 1
    assert p.inverse(2) is None
    with pytest.raises(ValueError):
        p.inverse(0)


@pytest.mark.parametrize(
    "q,expected",
    [
        (2, [(2, (1,))]),
        (4, [(4, (1, 3)), (2, (2,))]),
        (8, [(8, (1, 3, 5, 7)), (4, (2, 6)), (2, (4,))]),
    ],
)
def test_partition_types(q, expected):
    p = ring_for_q(q)
    got = [(t.zero_multiplier, t.members) for t in p.partition_types()]
    assert got == expected
    # descending M0, type 0 regular, sizes per the q=8 classification
    assert p.types[0].zero_multiplier == q
    assert len(p.types[0].members) == max(q // 2, 1)


@pytest.mark.parametrize("m", range(1, 7))
def test_inverse_and_m0_exhaustive(m):
    p = ring_params(m)
    q = p.q
    for a in range(1, q):
        # independent oracle: scan for the zero-multiplier and the inverse
        m0 = next(j for j in range(1, q + 1) if (a * j) % q == 0)
        assert p.zero_multiplier(a) == m0
        assert q % m0 == 0
        inv = [b for b in range(1, q) if (a * b) % q == 1]
        if m0 == q:
            assert len(inv) == 1 and p.inverse(a) == inv[0]
            assert p.mul(p.inverse(a), a) == 1
        else:
            assert inv == [] and p.inverse(a) is None


def test_every_nonzero_element_in_exactly_one_type():
    for m in range(1, 7):
        p = ring_params(m)
        seen = [x for t in p.types for x in t.members]
        assert sorted(seen) == list(range(1, p.q))


@given(m=st.integers(1, 8), data=st.data())
@settings(max_examples=200, deadline=None)
def test_ring_ops_properties(m, data):
    p = ring_params(m)
    a = data.draw(st.integers(0, p.q - 1))
    b = data.draw(st.integers(0, p.q - 1))
    assert p.add(a, b) == (a + b) % p.q
    assert p.mul(a, b) == (a * b) % p.q
    if a != 0:
        m0 = p.zero_multiplier(a)
        assert p.q % m0 == 0
        assert (m0 == p.q) == (p.inverse(a) is not None)


def test_invalid_exponent():
    with pytest.raises(ValueError):
        ring_params(0)
    with pytest.raises(ValueError):
        ring_params(9)
    with pytest.raises(ValueError):
        ring_for_q(12)


def test_boundary_validation():
    p = ring_for_q(4)
    with pytest.raises(ValueError):
        p.add(4, 0)
    with pytest.raises(ValueError):
        p.mul(-1, 2)


class TestLinearAlgebra:
    def test_solve(self):
        p = ring_for_q(16)
        rng = np.random.default_rng(7)
        for _ in range(50):
            n, k = 12, 5
            A = rng.integers(0, 16, size=(n, k))
            x = rng.integers(0, 16, size=k)
            try:
                sol = solve_mod_q(A, (A @ x) % 16, p)
            except np.linalg.LinAlgError:
                continue
            assert sol is not None
            assert np.array_equal((A @ sol) % 16, (A @ x) % 16)

    def test_solve_detects_inconsistency(self):
        p = ring_for_q(8)
        A = np.array([[1, 0], [0, 1], [1, 1]])
        assert solve_mod_q(A, np.array([1, 1, 3]), p) is None

    def test_matrix_inverse(self):
        p = ring_for_q(4)
        A = np.array([[1, 1], [0, 1]])
        Ainv = inv_mod_q(A, p)
        assert np.array_equal(Ainv, np.array([[1, 3], [0, 1]]))
        assert np.array_equal((A @ Ainv) % 4, np.eye(2, dtype=int))

    def test_matrix_inverse_rejects_zero_divisor_det(self):
        p = ring_for_q(4)
        with pytest.raises(ValueError):
            inv_mod_q(np.array([[2, 0], [0, 1]]), p)
