"""Arithmetic in GF(p^m) with integer-labelled elements.

An element is stored as an integer in ``[0, q)``.  Its base-p digits are
the coefficients of a polynomial over GF(p), least-significant digit first,
so in GF(8) the label 3 is ``x + 1`` and the label 2 is ``x``.  Products
are reduced modulo a monic irreducible polynomial of degree m.

Besides scalar operations the field exposes vectorised ``*_arr`` methods
that work elementwise on integer numpy arrays; the matrix and code modules
are built on those.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadArguments,
    DivisionByZero,
    FieldMismatch,
    NotIrreducible,
    NotPrime,
    OrderTooLarge,
)

MAX_ORDER = 1 << 16

# Coefficients are listed most-significant first.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 0, 1, 1),
    (2, 4): (1, 0, 0, 1, 1),
    (3, 2): (1, 0, 1),
    (5, 2): (1, 1, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in increasing order."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``p**m == q``, or None if q is not a prime power."""
    if q < 2:
        return None
    factors = prime_factors(q)
    if len(factors) != 1:
        return None
    p = factors[0]
    m = 0
    while q > 1:
        q //= p
        m += 1
    return p, m


def smallest_prime_power(n: int) -> int:
    """Smallest prime power that is >= n."""
    q = max(n, 2)
    while prime_power(q) is None:
        q += 1
    return q


# -- polynomials over GF(p); coefficient lists are constant-term first ----

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _poly_trim(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        shift = len(a) - 1 - df
        c = a[-1] * inv_lead % p
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _poly_trim(a)
    return a


def _monic_polys(p: int, degree: int) -> Iterable[list[int]]:
    for label in range(p**degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(label % p)
            label //= p
        yield coeffs + [1]


def is_irreducible(modulus_low_first: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    f = list(modulus_low_first)
    deg = len(f) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(f, g, p):
                return False
    return True


@lru_cache(maxsize=None)
def _search_modulus(p: int, m: int) -> tuple[int, ...]:
    for label in range(p**m):
        low = []
        v = label
        for _ in range(m):
            low.append(v % p)
            v //= p
        low.append(1)
        if is_irreducible(low, p):
            return tuple(reversed(low))
    raise NotIrreducible(f"no irreducible polynomial of degree {m} over GF({p})")


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Default modulus for GF(p^m), most-significant coefficient first."""
    if (p, m) in DEFAULT_MODULI:
        return DEFAULT_MODULI[(p, m)]
    return _search_modulus(p, m)


def irreducible_moduli(p: int, m: int) -> list[tuple[int, ...]]:
    """All monic irreducible polynomials of degree m over GF(p), msb first."""
    out = []
    for low in _monic_polys(p, m):
        if is_irreducible(low, p):
            out.append(tuple(reversed(low)))
    return out


class FiniteField:
    """The finite field GF(p^m).

    Parameters
    ----------
    p : int
        Characteristic (prime).
    m : int
        Extension degree.
    modulus : sequence of int, optional
        Monic irreducible polynomial of degree m, most-significant
        coefficient first (``(1, 0, 1, 1)`` is x^3 + x + 1).  Defaults to
        :func:`default_modulus`.
    """

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None):
        p, m = int(p), int(m)
        if not is_prime(p):
            raise NotPrime(f"characteristic {p} is not prime")
        if m < 1:
            raise BadArguments(f"extension degree must be >= 1, got {m}")
        if p**m > MAX_ORDER:
            raise OrderTooLarge(f"GF({p}^{m}) exceeds the supported order {MAX_ORDER}")
        if modulus is None:
            modulus = default_modulus(p, m)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != m + 1 or modulus[0] != 1:
            raise NotIrreducible(f"modulus {modulus} is not monic of degree {m}")
        if any(not 0 <= c < p for c in modulus):
            raise BadArguments(f"modulus coefficients must lie in [0, {p})")
        self._mod_low = tuple(reversed(modulus))
        if not is_irreducible(self._mod_low, p):
            raise NotIrreducible(f"{_poly_str(modulus)} is reducible over GF({p})")

        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self._pw = np.array([p**i for i in range(m)], dtype=np.int64)
        self._digits = self._digit_table()
        self.primitive = self._find_primitive()
        self._exp, self._log = self._build_tables()
        self._inv = np.zeros(self.q, dtype=np.int64)
        nz = np.arange(1, self.q)
        self._inv[nz] = self._exp[(self.q - 1 - self._log[nz]) % (self.q - 1)]

    # -- construction helpers ------------------------------------------

    def _digit_table(self) -> np.ndarray:
        vals = np.arange(self.q, dtype=np.int64)
        return (vals[:, None] // self._pw[None, :]) % self.p

    def mul_direct(self, a: int, b: int) -> int:
        """Multiply by polynomial arithmetic, without the log/exp tables."""
        p, m = self.p, self.m
        if p == 2:
            mod = _label(self._mod_low, 2)
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a >> m:
                    a ^= mod
            return r
        da = self._digits[a].tolist()
        db = self._digits[b].tolist()
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        return _label(_poly_mod(prod, self._mod_low, p), p)

    def _find_primitive(self) -> int:
        if self.q == 2:
            return 1
        order = self.q - 1
        exps = [order // r for r in prime_factors(order)]
        for g in range(2, self.q):
            if all(self._pow_direct(g, e) != 1 for e in exps):
                return g
        raise AssertionError("multiplicative group has no generator")  # pragma: no cover

    def _pow_direct(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul_direct(result, a)
            a = self.mul_direct(a, a)
            e >>= 1
        return result

    def _build_tables(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.q - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self.mul_direct(x, self.primitive)
        exp[n:] = exp[:n]
        return exp, log

    # -- identity / presentation -----------------------------------------

    def __eq__(self, other):
        if not isinstance(other, FiniteField):
            return NotImplemented
        return (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        return f"FiniteField({self.p}^{self.m}, modulus={_poly_str(self.modulus)})"

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def __reduce__(self):
        return (FiniteField, (self.p, self.m, self.modulus))

    @property
    def spec(self) -> str:
        """Field spec string such as ``"2^3/1011"``."""
        return f"{self.p}^{self.m}/{format_coeffs(self.modulus, self.p)}"

    @property
    def exp_table(self) -> np.ndarray:
        return self._exp[: self.q - 1]

    @property
    def log_table(self) -> np.ndarray:
        return self._log

    def elements(self) -> range:
        return range(self.q)

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.q:
            raise BadArguments(f"{a} is not an element of GF({self.q})")
        return a

    # -- scalar arithmetic on integer labels ---------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        return int(((self._digits[a] + self._digits[b]) % self.p) @ self._pw)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        return int(((-self._digits[a]) % self.p) @ self._pw)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("zero has no multiplicative inverse")
        return int(self._inv[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        """Square-and-multiply exponentiation; negative e inverts first."""
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    # -- vectorised arithmetic on integer arrays -------------------------

    def add_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        return ((self._digits[a] + self._digits[b]) % self.p) @ self._pw

    def neg_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        if self.m == 1:
            return (-a) % self.p
        return ((-self._digits[a]) % self.p) @ self._pw

    def sub_arr(self, a, b) -> np.ndarray:
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("zero has no multiplicative inverse")
        return self._inv[a]


class FieldElement:
    """An element of a specific :class:`FiniteField`.

    Supports ``+ - * / **`` and unary minus.  Combining elements of two
    different fields raises :class:`FieldMismatch`; plain ints are coerced
    into the element's field.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        self.field = field
        self.value = field.check(value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.field.check(other)
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(self.field, v)

    def __add__(self, other):
        return self._wrap(self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return self._wrap(self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return self._wrap(self.field.div(self._other(other), self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, int(e)))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"GF({self.field.q})({self.value})"


def field_new(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FiniteField:
    return FiniteField(p, m, modulus)


def _label(low_first: Sequence[int], p: int) -> int:
    v = 0
    for c in reversed(low_first):
        v = v * p + c
    return v


def _poly_str(msb_first: Sequence[int]) -> str:
    deg = len(msb_first) - 1
    terms = []
    for i, c in enumerate(msb_first):
        e = deg - i
        if c == 0:
            continue
        coef = "" if (c == 1 and e > 0) else str(c)
        if e == 0:
            terms.append(str(c))
        elif e == 1:
            terms.append(f"{coef}x")
        else:
            terms.append(f"{coef}x^{e}")
    return " + ".join(terms) or "0"


def format_coeffs(msb_first: Sequence[int], p: int) -> str:
    if p <= 10:
        return "".join(str(c) for c in msb_first)
    return ",".join(str(c) for c in msb_first)


def parse_coeffs(text: str, p: int) -> tuple[int, ...]:
    text = text.strip()
    if "," in text or p > 10:
        return tuple(int(c) for c in text.split(","))
    return tuple(int(c) for c in text)


_SPEC_RE = re.compile(r"^\s*(\d+)\s*(?:\^\s*(\d+))?\s*(?:/\s*([\d,]+))?\s*$")


def parse_field_spec(text: str) -> FiniteField:
    """Parse ``"p^m/coeffs"``, ``"p^m"`` or a bare order such as ``"8"``."""
    match = _SPEC_RE.match(text)
    if not match:
        raise BadArguments(f"unrecognised field spec {text!r}")
    base, exp, coeffs = match.groups()
    if exp is None:
        pm = prime_power(int(base))
        if pm is None:
            raise NotPrime(f"{base} is not a prime power")
        p, m = pm
    else:
        p, m = int(base), int(exp)
    modulus = parse_coeffs(coeffs, p) if coeffs else None
    return FiniteField(p, m, modulus)
