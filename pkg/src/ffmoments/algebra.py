"""Exact arithmetic over a prime field F_q and the polynomial ring F_q[x].

Polynomials are immutable and store their coefficients as a tuple of
integers in ``[0, q)``, lowest degree first, with no trailing zeros.  The
zero polynomial is the empty tuple and has degree ``NEG_INF``.

Polynomials in a second variable ``y`` with coefficients in F_q[x] (used by
the Eisenstein systems) are plain tuples ``(a_0, ..., a_d)`` of
:class:`Polynomial`; the helpers at the bottom of this module act on them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

NEG_INF = -math.inf

CoeffVector = tuple  # tuple[Polynomial, ...], a_0 first


class ModulusMismatch(ValueError):
    pass


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_prime(q: int) -> None:
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")


@dataclass(frozen=True)
class FqElement:
    """An element of the prime field F_q."""

    value: int
    q: int

    def __post_init__(self) -> None:
        _check_prime(self.q)
        object.__setattr__(self, "value", self.value % self.q)

    def _other(self, other: Union["FqElement", int]) -> int:
        if isinstance(other, FqElement):
            if other.q != self.q:
                raise ModulusMismatch(f"F_{self.q} vs F_{other.q}")
            return other.value
        return other

    def __add__(self, other):
        return FqElement(self.value + self._other(other), self.q)

    __radd__ = __add__

    def __sub__(self, other):
        return FqElement(self.value - self._other(other), self.q)

    def __rsub__(self, other):
        return FqElement(self._other(other) - self.value, self.q)

    def __mul__(self, other):
        return FqElement(self.value * self._other(other), self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return FqElement(-self.value, self.q)

    def inverse(self) -> "FqElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return FqElement(pow(self.value, -1, self.q), self.q)

    def __truediv__(self, other):
        o = other if isinstance(other, FqElement) else FqElement(other, self.q)
        return self * o.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FqElement(pow(self.value, e, self.q), self.q)

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)


class Polynomial:
    """An element of F_q[x]."""

    __slots__ = ("q", "coeffs", "_hash")

    def __init__(self, coeffs: Iterable[int] = (), q: int = 2):
        _check_prime(q)
        cs = [int(c) % q for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.q = q
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _make(cls, coeffs: Sequence[int], q: int) -> "Polynomial":
        # trusted: coeffs already reduced; only trailing zeros stripped
        obj = object.__new__(cls)
        n = len(coeffs)
        while n and coeffs[n - 1] == 0:
            n -= 1
        obj.q = q
        obj.coeffs = tuple(coeffs[:n])
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, q: int) -> "Polynomial":
        return cls((), q)

    @classmethod
    def one(cls, q: int) -> "Polynomial":
        return cls((1,), q)

    @classmethod
    def constant(cls, c: int, q: int) -> "Polynomial":
        return cls((c,), q)

    @classmethod
    def monomial(cls, k: int, q: int, c: int = 1) -> "Polynomial":
        return cls([0] * k + [c], q)

    @classmethod
    def x(cls, q: int) -> "Polynomial":
        return cls((0, 1), q)

    @classmethod
    def from_index(cls, index: int, q: int) -> "Polynomial":
        """Decode ``index`` in base q, least significant digit = constant term.

        Indices ``0 .. q**(k) - 1`` enumerate every polynomial of degree < k.
        """
        digits = []
        while index:
            index, r = divmod(index, q)
            digits.append(r)
        return cls._make(digits, q)

    def index(self) -> int:
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.q + c
        return n

    @classmethod
    def parse(cls, text: str, q: int) -> "Polynomial":
        """Parse ``"1+1*x^2"``, ``"x^2+x+1"``, ``"2*x**3 - x"`` and the like."""
        s = text.replace(" ", "").replace("**", "^")
        if not s:
            raise ValueError("empty polynomial string")
        if s[0] not in "+-":
            s = "+" + s
        terms = re.findall(r"[+-][^+-]+", s)
        if "".join(terms) != s:
            raise ValueError(f"cannot parse polynomial {text!r}")
        acc: dict[int, int] = {}
        for term in terms:
            sign, body = (-1 if term[0] == "-" else 1), term[1:]
            m = re.fullmatch(r"(?:(\d+)\*?)?(x(?:\^(\d+))?)?", body)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise ValueError(f"cannot parse term {term!r} in {text!r}")
            coef = int(m.group(1)) if m.group(1) is not None else 1
            if m.group(2) is None:
                exp = 0
            else:
                exp = int(m.group(3)) if m.group(3) is not None else 1
            acc[exp] = acc.get(exp, 0) + sign * coef
        top = max(acc)
        return cls([acc.get(i, 0) for i in range(top + 1)], q)

    # -- basic queries ------------------------------------------------------

    @property
    def degree(self):
        """Degree as an int, or ``NEG_INF`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_monic(self) -> bool:
        return self.lc == 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def coefficient(self, i: int) -> FqElement:
        return FqElement(self[i], self.q)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.q == other.q and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == Polynomial((other,), self.q).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.q, self.coeffs))
        return self._hash

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*x")
            else:
                parts.append(f"{c}*x^{i}")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self}, q={self.q})"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.q != self.q:
                raise ModulusMismatch(f"F_{self.q}[x] vs F_{other.q}[x]")
            return other
        if isinstance(other, FqElement):
            if other.q != self.q:
                raise ModulusMismatch(f"F_{self.q}[x] vs F_{other.q}")
            return Polynomial._make((other.value,), self.q)
        if isinstance(other, int):
            return Polynomial._make((other % self.q,), self.q)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, q = self.coeffs, o.coeffs, self.q
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % q
        return Polynomial._make(out, q)

    __radd__ = __add__

    def __neg__(self):
        q = self.q
        return Polynomial._make([(-c) % q for c in self.coeffs], q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, q = self.coeffs, o.coeffs, self.q
        if not a or not b:
            return Polynomial._make((), q)
        if len(b) == 1:
            c = b[0]
            return Polynomial._make([(ai * c) % q for ai in a], q)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Polynomial._make([c % q for c in out], q)

    __rmul__ = __mul__

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        b, q = o.coeffs, self.q
        if not b:
            raise ZeroDivisionError("division by the zero polynomial")
        db = len(b) - 1
        r = list(self.coeffs)
        if len(r) <= db:
            return Polynomial._make((), q), self
        inv = pow(b[-1], -1, q)
        quot = [0] * (len(r) - db)
        for i in range(len(r) - 1 - db, -1, -1):
            c = (r[i + db] * inv) % q
            if c:
                quot[i] = c
                for j, bj in enumerate(b):
                    r[i + j] = (r[i + j] - c * bj) % q
        return Polynomial._make(quot, q), Polynomial._make(r[:db], q)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = Polynomial._make((1,), self.q)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            return self
        inv = pow(self.lc, -1, self.q)
        return self * inv

    def derivative(self) -> "Polynomial":
        q = self.q
        return Polynomial._make([(i * c) % q for i, c in enumerate(self.coeffs)][1:], q)

    def divides(self, other: "Polynomial") -> bool:
        """True iff ``self`` divides ``other`` (0 divides only 0)."""
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()


def divrem(f: Polynomial, g: Polynomial) -> tuple[Polynomial, Polynomial]:
    return divmod(f, g)


def gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic gcd; ``gcd(0, 0) == 0``."""
    f._coerce(g)
    while g:
        f, g = g, f % g
    return f.monic()


def gcd_many(polys: Iterable[Polynomial], q: int) -> Polynomial:
    g = Polynomial.zero(q)
    for f in polys:
        g = gcd(g, f)
        if g.is_one():
            break
    return g


def xgcd(f: Polynomial, g: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """Return ``(d, s, t)`` with ``s*f + t*g == d`` and ``d`` monic."""
    q = f.q
    r0, r1 = f, g
    s0, s1 = Polynomial.one(q), Polynomial.zero(q)
    t0, t1 = Polynomial.zero(q), Polynomial.one(q)
    while r1:
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    if not r0:
        return r0, s0, t0
    inv = pow(r0.lc, -1, q)
    return r0 * inv, s0 * inv, t0 * inv


def inverse_mod(f: Polynomial, modulus: Polynomial) -> Polynomial:
    d, s, _ = xgcd(f % modulus, modulus)
    if not d.is_one():
        raise ZeroDivisionError(f"{f} is not invertible modulo {modulus}")
    return s % modulus


# -- polynomials in y over F_q[x] ---------------------------------------------


def _binom_mod(n: int, k: int, p: int) -> int:
    return math.comb(n, k) % p


def shift_coeffs(f: CoeffVector, t: Polynomial) -> CoeffVector:
    """Coefficient vector of ``f(y + t)``; the length is preserved."""
    d = len(f) - 1
    if t.is_zero():
        return tuple(f)
    q = t.q
    powers = [Polynomial.one(q)]
    for _ in range(d):
        powers.append(powers[-1] * t)
    out = []
    for i in range(d + 1):
        acc = Polynomial.zero(q)
        for j in range(i, d + 1):
            if f[j]:
                b = _binom_mod(j, i, q)
                if b:
                    acc = acc + f[j] * powers[j - i] * b
        out.append(acc)
    return tuple(out)


def reverse_coeffs(f: CoeffVector) -> CoeffVector:
    return tuple(reversed(f))


def coeff_derivative(f: CoeffVector) -> CoeffVector:
    """Formal y-derivative, of formal length ``len(f) - 1``."""
    return tuple(f[j] * j for j in range(1, len(f)))


def sylvester_matrix(f: CoeffVector, g: CoeffVector) -> list[list[Polynomial]]:
    """Sylvester matrix for the formal degrees ``len(f)-1`` and ``len(g)-1``."""
    m, n = len(f) - 1, len(g) - 1
    q = f[0].q
    zero = Polynomial.zero(q)
    size = m + n
    rows = []
    top_f = list(reversed(f))
    top_g = list(reversed(g))
    for i in range(n):
        rows.append([zero] * i + top_f + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + top_g + [zero] * (size - n - 1 - i))
    return rows


def bareiss_determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free Gaussian elimination over F_q[x]."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    q = matrix[0][0].q
    a = [list(row) for row in matrix]
    sign = 1
    prev = Polynomial.one(q)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Polynomial.zero(q)
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                num = row_i[j] * piv - aik * row_k[j]
                row_i[j] = num // prev if not prev.is_one() else num
        prev = piv
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def resultant(f: CoeffVector, g: CoeffVector) -> Polynomial:
    return bareiss_determinant(sylvester_matrix(f, g))


def discriminant(f: CoeffVector) -> Polynomial:
    """Discriminant of ``sum a_j y^j`` over F_q[x].

    Uses ``(-1)^(d(d-1)/2) * Res(f, f') / a_d`` with the derivative taken at
    formal degree ``d - 1``, so an inseparable ``f`` yields 0.
    """
    d = len(f) - 1
    if d < 2:
        raise ValueError("discriminant needs degree >= 2")
    if f[d].is_zero():
        raise ValueError("leading coefficient a_d must be nonzero")
    res = resultant(f, coeff_derivative(f))
    disc, rem = divmod(res, f[d])
    if rem:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    if (d * (d - 1) // 2) % 2:
        disc = -disc
    return disc


def strip_leading_zeros(f: CoeffVector) -> CoeffVector:
    n = len(f)
    while n > 1 and f[n - 1].is_zero():
        n -= 1
    return tuple(f[:n])


def separable_core(f: CoeffVector) -> tuple[CoeffVector, int]:
    """Return ``(g, k)`` with ``f(y) = g(y^(p^k))`` and ``g`` of nonzero derivative.

    Trailing zero coefficients are dropped first, so the actual y-degree is
    used.  Raises ``ValueError`` for a constant input.
    """
    g = strip_leading_zeros(f)
    if len(g) < 2:
        raise ValueError("separable_core needs a nonconstant polynomial")
    p = g[0].q
    k = 0
    while all(c.is_zero() for j, c in enumerate(g) if j % p):
        g = g[::p]
        k += 1
    return g, k


def expand_core(g: CoeffVector, k: int) -> CoeffVector:
    """Inverse of :func:`separable_core`: coefficients of ``g(y^(p^k))``."""
    q = g[0].q
    step = q**k
    zero = Polynomial.zero(q)
    out = [zero] * ((len(g) - 1) * step + 1)
    for j, c in enumerate(g):
        out[j * step] = c
    return tuple(out)


def coeff_vector(rows: Iterable[Iterable[int]], q: int) -> CoeffVector:
    """Build a coefficient vector from raw integer coefficient lists."""
    return tuple(Polynomial(r, q) for r in rows)
