"""Dense matrices over GF(q) and exact Gaussian elimination.

Matrices are immutable: the underlying numpy array is marked read-only and
every operation returns a new :class:`Matrix`.  Pivot choice is always the
first nonzero entry of the column, so results are deterministic.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import BadArguments, FieldMismatch, IndexOutOfRange, NotSquare
from .finite_field import FiniteField, format_coeffs, parse_coeffs


class Matrix:
    """A rows x cols matrix with entries in ``field``."""

    __slots__ = ("field", "data")

    def __init__(self, field: FiniteField, data):
        arr = np.array(data, dtype=np.int64, copy=True)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise BadArguments(f"matrix data must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise BadArguments(f"entries must lie in [0, {field.q})")
        arr.setflags(write=False)
        self.field = field
        self.data = arr

    @classmethod
    def identity(cls, field: FiniteField, n: int) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FiniteField, rows: int, cols: int) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.field, self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"Matrix(GF({self.field.q}), {self.data.tolist()})"

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.data.T)

    def _same_field(self, other: "Matrix") -> None:
        if other.field != self.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.cols != other.rows:
            raise BadArguments(f"cannot multiply {self.shape} by {other.shape}")
        F = self.field
        out = np.zeros((self.rows, other.cols), dtype=np.int64)
        for j in range(self.cols):
            out = F.add_arr(out, F.mul_arr(self.data[:, j][:, None], other.data[j][None, :]))
        return Matrix(F, out)

    def hstack(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        return Matrix(self.field, np.hstack([self.data, other.data]))

    def with_entries(self, entries: Iterable[tuple[int, int]], value: int = 0) -> "Matrix":
        """Copy with the listed ``(row, col)`` entries overwritten."""
        arr = self.data.copy()
        for r, c in entries:
            arr[r, c] = value
        return Matrix(self.field, arr)


def vector_times(field: FiniteField, u: Sequence[int], m: Matrix) -> np.ndarray:
    """Row vector ``u`` times matrix ``m``."""
    out = np.zeros(m.cols, dtype=np.int64)
    for ui, row in zip(u, m.data):
        if ui:
            out = field.add_arr(out, field.mul_arr(int(ui), row))
    return out


def _eliminate(field: FiniteField, arr: np.ndarray, ncols: int | None = None):
    """In-place reduction of ``arr`` to RREF over its first ``ncols`` columns."""
    rows, cols = arr.shape
    if ncols is None:
        ncols = cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(arr[r:, c])
        if nz.size == 0:
            continue
        s = r + int(nz[0])
        if s != r:
            arr[[r, s]] = arr[[s, r]]
        lead = int(arr[r, c])
        if lead != 1:
            arr[r] = field.mul_arr(field.inv(lead), arr[r])
        others = np.flatnonzero(arr[:, c])
        others = others[others != r]
        if others.size:
            factors = field.neg_arr(arr[others, c])
            arr[others] = field.add_arr(arr[others], field.mul_arr(factors[:, None], arr[r][None, :]))
        pivots.append(c)
        r += 1
    return arr, pivots


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    arr, pivots = _eliminate(m.field, m.data.copy())
    return Matrix(m.field, arr), pivots


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_eliminate(m.field, m.data.copy())[1])


def solve(a: Matrix, b) -> np.ndarray | None:
    """Some ``x`` with ``a @ x == b``, or None when the system is inconsistent.

    ``b`` may be a sequence of labels or an ``n x 1`` :class:`Matrix`.
    Free variables are set to zero.
    """
    if isinstance(b, Matrix):
        a._same_field(b)
        bvec = b.data.reshape(-1)
    else:
        bvec = np.asarray(b, dtype=np.int64).reshape(-1)
    if bvec.size != a.rows:
        raise BadArguments(f"right-hand side has length {bvec.size}, expected {a.rows}")
    aug = np.hstack([a.data, bvec[:, None]])
    arr, pivots = _eliminate(a.field, aug, ncols=a.cols)
    r = len(pivots)
    if np.any(arr[r:, -1] != 0):
        return None
    x = np.zeros(a.cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = arr[i, -1]
    return x


def submatrix(m: Matrix, row_idx: Iterable[int], col_idx: Iterable[int]) -> Matrix:
    rows = sorted(_checked(row_idx, m.rows, "row"))
    cols = sorted(_checked(col_idx, m.cols, "column"))
    return Matrix(m.field, m.data[np.ix_(rows, cols)] if rows and cols else np.zeros((len(rows), len(cols))))


def _checked(idx: Iterable[int], bound: int, what: str) -> list[int]:
    idx = [int(i) for i in idx]
    if len(set(idx)) != len(idx):
        raise BadArguments(f"duplicate {what} index in {idx}")
    for i in idx:
        if not 0 <= i < bound:
            raise IndexOutOfRange(f"{what} index {i} outside [0, {bound})")
    return idx


def is_nonsingular(m: Matrix) -> bool:
    if m.rows != m.cols:
        raise NotSquare(f"matrix is {m.rows}x{m.cols}")
    return rank(m) == m.rows


# -- plain-text format ---------------------------------------------------
#
#   q=2^3 modulus=1011 rows=4 cols=4 [key=value ...]
#   3 7 3 6
#   ...
# Lines starting with '#' are ignored.

def format_matrix(m: Matrix, **extra) -> str:
    F = m.field
    head = [f"q={F.p}^{F.m}", f"modulus={format_coeffs(F.modulus, F.p)}", f"rows={m.rows}", f"cols={m.cols}"]
    head += [f"{k}={v}" for k, v in extra.items()]
    lines = [" ".join(head)]
    lines += [" ".join(str(int(v)) for v in row) for row in m.data]
    return "\n".join(lines) + "\n"


def write_matrix(m: Matrix, fh: TextIO, **extra) -> None:
    fh.write(format_matrix(m, **extra))


def parse_matrix(text: str, field: FiniteField | None = None) -> tuple[Matrix, dict[str, str]]:
    """Parse the plain-text format; returns the matrix and all header fields.

    ``field`` overrides the field named in the header (used to re-read a
    table under an alternative modulus).
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise BadArguments("empty matrix file")
    header: dict[str, str] = {}
    for tok in lines[0].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise BadArguments(f"malformed header token {tok!r}")
        header[key] = val
    for key in ("q", "rows", "cols"):
        if key not in header:
            raise BadArguments(f"matrix header lacks {key}=")
    base, _, exp = header["q"].partition("^")
    p, mdeg = int(base), int(exp or 1)
    if field is not None and (field.p, field.m) != (p, mdeg):
        raise FieldMismatch(f"file is over GF({p}^{mdeg}) but GF({field.q}) was requested")
    if field is None:
        modulus = parse_coeffs(header["modulus"], p) if "modulus" in header else None
        field = FiniteField(p, mdeg, modulus)
    rows, cols = int(header["rows"]), int(header["cols"])
    body = [[int(v) for v in ln.split()] for ln in lines[1:]]
    if len(body) != rows or any(len(r) != cols for r in body):
        raise BadArguments(f"matrix body does not match rows={rows} cols={cols}")
    return Matrix(field, np.array(body, dtype=np.int64).reshape(rows, cols)), header


def read_matrix(path, field: FiniteField | None = None) -> tuple[Matrix, dict[str, str]]:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), field)


def fingerprint(m: Matrix) -> str:
    """Short SHA-256 of the matrix in its text format."""
    return hashlib.sha256(format_matrix(m).encode()).hexdigest()[:16]
