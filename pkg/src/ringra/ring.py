"""Modular integer arithmetic over Z_q with q = 2^m, and the classification
of nonzero elements into regular elements and zero-divisor types.

Every nonzero ``a`` has a zero-multiplier ``M0(a) = min{j > 0 : a*j = 0 mod q}``.
Elements with ``M0(a) = q`` are regular (they have a unique inverse, the odd
elements for q = 2^m); the rest are zero-divisors.  Nonzero elements sharing
one M0 value form an element type; types are indexed 0, 1, ... in descending
M0 order, so type 0 is always the regular set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_EXPONENT = 8


@dataclass(frozen=True)
class ElementType:
    """Nonzero elements of Z_q sharing one zero-multiplier value."""

    index: int
    zero_multiplier: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


class RingParams:
    """Precomputed arithmetic tables for Z_q, q = 2^m.

    Immutable after construction and safe to share across workers.  Inputs to
    the scalar helpers are validated; the raw tables (`mul_table`,
    `inv_table`, `m0_table`) assume canonical range [0, q) and are meant for
    hot paths.
    """

    def __init__(self, m: int):
        if not 1 <= m <= MAX_EXPONENT:
            raise ValueError(f"exponent m must be in [1, {MAX_EXPONENT}], got {m}")
        self.m = m
        self.q = 1 << m

        q = self.q
        a = np.arange(q, dtype=np.int64)
        self.mul_table = (a[:, None] * a[None, :]) % q

        # M0(a) = q / gcd(a, q); row 0 is a placeholder (M0 undefined for 0).
        self.m0_table = np.array(
            [0] + [q // math.gcd(i, q) for i in range(1, q)], dtype=np.int64
        )

        # inverse exists iff a is odd; -1 marks "absent"
        inv = np.full(q, -1, dtype=np.int64)
        for i in range(1, q):
            if self.m0_table[i] == q:
                inv[i] = pow(i, -1, q)
        self.inv_table = inv

        m0_values = sorted(set(self.m0_table[1:].tolist()), reverse=True)
        self.types = tuple(
            ElementType(
                index=j,
                zero_multiplier=v,
                members=tuple(int(x) for x in np.nonzero(self.m0_table == v)[0]),
            )
            for j, v in enumerate(m0_values)
        )
        self.num_types = len(self.types)

        # element -> type index (element 0 mapped to -1)
        t = np.full(q, -1, dtype=np.int64)
        for et in self.types:
            t[list(et.members)] = et.index
        self.type_of = t

        self.regular_elements = np.array(self.types[0].members, dtype=np.int64)
        self.zero_divisors = np.array(
            [x for et in self.types[1:] for x in et.members], dtype=np.int64
        )

    # -- scalar operations ------------------------------------------------

    def _check(self, *vals: int) -> None:
        for v in vals:
            if not 0 <= v < self.q:
                raise ValueError(f"element {v} outside [0, {self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        self._check(a, b)
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        self._check(a)
        return (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.mul_table[a, b])

    def zero_multiplier(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ValueError("zero-multiplier is undefined for 0")
        return int(self.m0_table[a])

    def inverse(self, a: int) -> int | None:
        """Multiplicative inverse of a regular element, None for zero-divisors."""
        self._check(a)
        if a == 0:
            raise ValueError("0 has no inverse")
        v = int(self.inv_table[a])
        return None if v < 0 else v

    def is_regular(self, a: int) -> bool:
        self._check(a)
        return a != 0 and int(self.m0_table[a]) == self.q

    def partition_types(self) -> tuple[ElementType, ...]:
        return self.types

    def __repr__(self) -> str:
        return f"RingParams(m={self.m}, q={self.q}, types={self.num_types})"


@lru_cache(maxsize=None)
def ring_params(m: int) -> RingParams:
    """Shared cache of ring tables, keyed by the exponent m."""
    return RingParams(m)


def ring_for_q(q: int) -> RingParams:
    m = q.bit_length() - 1
    if q <= 0 or (1 << m) != q:
        raise ValueError(f"q must be a power of two, got {q}")
    return ring_params(m)


# -- linear algebra over Z_q ----------------------------------------------


def _gf2_solve(A2: np.ndarray, B2: np.ndarray) -> np.ndarray | None:
    """Solve A2 X = B2 over GF(2) for full-column-rank A2 (n >= k).

    Returns None when any right-hand side is inconsistent.  Raises on
    column-rank deficiency, which the callers treat as a structural error.
    """
    n, k = A2.shape
    M = np.concatenate([A2.copy(), B2.copy()], axis=1).astype(np.uint8)
    pivot_rows = []
    row = 0
    for col in range(k):
        pr = None
        for r in range(row, n):
            if M[r, col]:
                pr = r
                break
        if pr is None:
            raise np.linalg.LinAlgError("matrix is column-rank deficient mod 2")
        if pr != row:
            M[[row, pr]] = M[[pr, row]]
        mask = M[:, col].copy().astype(bool)
        mask[row] = False
        M[mask] ^= M[row]
        pivot_rows.append(row)
        row += 1
    if row < n and M[row:, k:].any():
        return None
    return M[pivot_rows, k:].astype(np.int64)


def solve_mod_q(A: np.ndarray, B: np.ndarray, params: RingParams) -> np.ndarray | None:
    """Solve A X = B (mod q) by bitwise lifting, one GF(2) solve per bit level.

    A is (n, k) with n >= k and full column rank mod 2; B is (n,) or (n, r).
    Returns None when the system is inconsistent (B not in the column span).
    """
    q = params.q
    A = np.asarray(A, dtype=np.int64) % q
    B = np.asarray(B, dtype=np.int64) % q
    single = B.ndim == 1
    R = B.reshape(len(B), -1).copy()
    A2 = (A & 1).astype(np.uint8)
    X = np.zeros((A.shape[1], R.shape[1]), dtype=np.int64)
    mod = q
    for bit in range(params.m):
        Xb = _gf2_solve(A2, (R & 1).astype(np.uint8))
        if Xb is None:
            return None
        X += Xb << bit
        # residual is even by construction; descend one bit level
        R = ((R - A @ Xb) % mod) >> 1
        mod >>= 1
    if ((A @ X - B.reshape(len(B), -1)) % q).any():
        return None
    return (X[:, 0] if single else X) % q


def det_mod_q(A: np.ndarray, params: RingParams) -> int:
    """Determinant mod q via exact integer cofactor expansion (small matrices)."""
    A = [[int(v) for v in row] for row in np.asarray(A)]

    def det(M):
        n = len(M)
        if n == 1:
            return M[0][0]
        return sum(
            (-1) ** j * M[0][j] * det([r[:j] + r[j + 1 :] for r in M[1:]])
            for j in range(n)
        )

    return det(A) % params.q


def inv_mod_q(A: np.ndarray, params: RingParams) -> np.ndarray:
    """Inverse of a square matrix over Z_q: adjugate times det^{-1}.

    The determinant must be a regular element; otherwise the matrix is not
    invertible over the ring and ValueError is raised.
    """
    A = np.asarray(A, dtype=np.int64) % params.q
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("square matrix required")
    d = det_mod_q(A, params)
    if d == 0 or not params.is_regular(d):
        raise ValueError(f"determinant {d} is not a regular element of Z_{params.q}")
    d_inv = params.inv_table[d]
    adj = np.zeros((n, n), dtype=np.int64)
    idx = list(range(n))
    for i in range(n):
        for j in range(n):
            minor = A[np.ix_([r for r in idx if r != i], [c for c in idx if c != j])]
            cof = det_mod_q(minor, params) if n > 1 else 1
            adj[j, i] = ((-1) ** (i + j)) * cof
    return (adj * d_inv) % params.q
