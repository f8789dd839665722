"""Systematic linear block codes over GF(q).

A :class:`SystematicCode` is held as its parity block ``P``; the generator
is ``G = [I_k | P]``.  The module builds MDS codes from generalised
Reed-Solomon evaluation matrices, punctures them, certifies the MDS
property through the square minors of ``P`` and computes the exact minimum
distance by enumerating messages.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    BadDimensions,
    BudgetExceeded,
    FieldTooSmall,
    LengthExceedsField,
    TooManyPunctures,
)
from .finite_field import FiniteField, prime_power, smallest_prime_power
from .gf_matrix import Matrix, is_nonsingular, rref, vector_times

DEFAULT_BUDGET = 10**8
_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class SystematicCode:
    """An (n, k) code with generator ``[I_k | P]`` over ``field``."""

    n: int
    k: int
    field: FiniteField
    P: Matrix

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise BadDimensions(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if self.P.shape != (self.k, self.n - self.k):
            raise BadDimensions(f"P is {self.P.shape}, expected {(self.k, self.n - self.k)}")
        if self.P.field != self.field:
            raise BadDimensions("P is over a different field")

    @classmethod
    def from_parity(cls, P: Matrix) -> "SystematicCode":
        return cls(P.rows + P.cols, P.rows, P.field, P)

    @property
    def G(self) -> Matrix:
        return Matrix.identity(self.field, self.k).hstack(self.P)

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    def encode(self, u) -> np.ndarray:
        return vector_times(self.field, u, self.G)

    def with_zeroed(self, entries: Iterable[tuple[int, int]]) -> "SystematicCode":
        """Copy of the code with the given ``(row, col)`` entries of P set to zero."""
        return SystematicCode(self.n, self.k, self.field, self.P.with_entries(entries, 0))

    def __eq__(self, other):
        if not isinstance(other, SystematicCode):
            return NotImplemented
        return self.P == other.P

    def __hash__(self):
        return hash(self.P)

    def __repr__(self):
        return f"SystematicCode(n={self.n}, k={self.k}, GF({self.field.q}))"


def singleton_bound(n: int, k: int) -> int:
    if k > n:
        raise BadDimensions(f"k={k} exceeds n={n}")
    return n - k + 1


def rs_generator(field: FiniteField, n: int, k: int) -> SystematicCode:
    """Systematic generalised Reed-Solomon code of length n and dimension k.

    Evaluates polynomials of degree < k at the field elements with labels
    ``0 .. n-1``.  For ``n == q + 1`` the last coordinate is the
    coefficient of ``x^(k-1)`` (the point at infinity), giving the extended
    code.  The evaluation matrix is row-reduced to ``[I | P]``.
    """
    if not 1 <= k < n:
        raise BadDimensions(f"need 1 <= k < n, got n={n}, k={k}")
    q = field.q
    if n > q + 1:
        raise LengthExceedsField(f"length {n} exceeds q + 1 = {q + 1}")
    points = list(range(min(n, q)))
    V = np.zeros((k, n), dtype=np.int64)
    for j, x in enumerate(points):
        for i in range(k):
            V[i, j] = field.pow(x, i) if x else int(i == 0)
    if n == q + 1:
        V[k - 1, q] = 1
    R, pivots = rref(Matrix(field, V))
    assert pivots == list(range(k)), "information set is not the first k columns"
    return SystematicCode(n, k, field, Matrix(field, R.data[:, k:]))


def puncture(code: SystematicCode, count: int) -> SystematicCode:
    """Delete the last ``count`` parity columns."""
    if count < 0 or count >= code.redundancy:
        raise TooManyPunctures(f"can puncture 0..{code.redundancy - 1} parity columns, not {count}")
    if count == 0:
        return code
    P = Matrix(code.field, code.P.data[:, : code.redundancy - count])
    return SystematicCode(code.n - count, code.k, code.field, P)


def _span(field: FiniteField, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All GF(q)-combinations of ``rows``.

    Returns ``(par, wt)`` where ``par[idx]`` is the combination whose
    coefficient vector is ``idx`` written in base q (first row most
    significant) and ``wt[idx]`` the number of nonzero coefficients.
    """
    coeffs = np.arange(field.q, dtype=np.int64)
    width = rows.shape[1]
    par = np.zeros((1, width), dtype=np.int64)
    wt = np.zeros(1, dtype=np.int64)
    for row in rows:
        contrib = field.mul_arr(coeffs[:, None], row[None, :])
        par = field.add_arr(par[:, None, :], contrib[None, :, :]).reshape(-1, width)
        wt = (wt[:, None] + (coeffs != 0)[None, :]).reshape(-1)
    return par, wt


def min_weight(field: FiniteField, P: np.ndarray, stop_at: int = 1) -> tuple[int, np.ndarray]:
    """Minimum codeword weight of ``[I | P]`` and a minimising message.

    Only messages whose first nonzero coefficient is 1 are visited.  The
    search stops early once the running minimum is ``<= stop_at``; the
    returned value is exact whenever it is greater than ``stop_at``.
    """
    P = np.asarray(P, dtype=np.int64)
    k = P.shape[0]
    q = field.q
    tail = 0
    while tail < k - 1 and q ** (tail + 1) <= _CHUNK:
        tail += 1
    tail_par, tail_wt = _span(field, P[k - tail :])
    best = None
    best_msg = None
    for lead in range(k):
        free = k - 1 - lead
        head_rows = P[lead + 1 : k - tail] if free > tail else P[:0]
        n_tail = q ** min(free, tail)
        par_t, wt_t = tail_par[:n_tail], tail_wt[:n_tail]
        for head in itertools.product(range(q), repeat=len(head_rows)):
            vec = P[lead]
            for c, row in zip(head, head_rows):
                if c:
                    vec = field.add_arr(vec, field.mul_arr(c, row))
            hw = 1 + sum(1 for c in head if c)
            weights = hw + wt_t + np.count_nonzero(field.add_arr(par_t, vec[None, :]), axis=1)
            i = int(np.argmin(weights))
            w = int(weights[i])
            if best is None or w < best:
                best = w
                msg = np.zeros(k, dtype=np.int64)
                msg[lead] = 1
                msg[lead + 1 : lead + 1 + len(head)] = head
                digits = []
                for _ in range(min(free, tail)):
                    digits.append(i % q)
                    i //= q
                if digits:
                    msg[k - len(digits) :] = digits[::-1]
                best_msg = msg
            if best <= stop_at:
                return best, best_msg
    return best, best_msg


def min_distance(code: SystematicCode, budget: int | None = DEFAULT_BUDGET) -> int:
    """Exact minimum Hamming distance by message enumeration.

    ``budget`` bounds ``q**k``; larger codes raise :class:`BudgetExceeded`.
    """
    if budget is not None and code.field.q**code.k > budget:
        raise BudgetExceeded(f"q^k = {code.field.q}^{code.k} exceeds the budget {budget}")
    return min_weight(code.field, code.P.data)[0]


def square_minors(P: Matrix) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    rows, cols = P.shape
    for s in range(1, min(rows, cols) + 1):
        for R in itertools.combinations(range(rows), s):
            for C in itertools.combinations(range(cols), s):
                yield R, C


def singular_minors(code: SystematicCode, limit: int | None = None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Row/column index sets of singular square submatrices of P."""
    out = []
    data = code.P.data
    for R, C in square_minors(code.P):
        if not is_nonsingular(Matrix(code.field, data[np.ix_(R, C)])):
            out.append((R, C))
            if limit is not None and len(out) >= limit:
                break
    return out


def is_mds(code: SystematicCode) -> bool:
    """True iff every square submatrix of P is nonsingular."""
    if np.any(code.P.data == 0):
        return False
    return not singular_minors(code, limit=1)


def design_network_code(
    M: int,
    k1: int,
    k2: int,
    q: int | FiniteField | None = None,
) -> SystematicCode:
    """MDS transfer matrix for M users with k1 broadcast and k2 parity slots.

    Returns an (M(k1+k2), M k1) code with d_min = M k2 + 1.  Without ``q``
    the smallest prime power >= M(k1+k2) is used with its default modulus.
    """
    if M < 2 or k1 < 1 or k2 < 1:
        raise BadDimensions(f"need M >= 2, k1 >= 1, k2 >= 1; got {M}, {k1}, {k2}")
    n, k = M * (k1 + k2), M * k1
    if isinstance(q, FiniteField):
        field = q
    else:
        order = smallest_prime_power(n) if q is None else int(q)
        pm = prime_power(order)
        if pm is None:
            raise FieldTooSmall(f"{order} is not a prime power")
        field = FiniteField(*pm)
    if field.q < n:
        raise FieldTooSmall(f"GF({field.q}) is too small for length {n}; need q >= {n}")
    code = rs_generator(field, n, k)
    assert is_mds(code)
    return code
