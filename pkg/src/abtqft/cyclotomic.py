"""Exact arithmetic in the cyclotomic field Q(zeta_M) with M = lcm(8, p).

The scalar type :class:`CycNum` stores coordinates in the power basis
``1, zeta, ..., zeta^(phi(M)-1)`` after reduction modulo the M-th
cyclotomic polynomial, with exact rational coefficients.  The field is
large enough to contain a primitive p-th root of unity q, the eighth
roots of unity, and the real square root of p' (p' = p for odd p and
p/2 for even p), so Gauss sums, the normalization eta = 1/sqrt(p') and
the anomaly kappa = g/sqrt(p') are all exact elements.  Equality is
coefficient equality; no floating point enters any decision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath

__all__ = [
    "CycNum",
    "cyclotomic_polynomial",
    "make_root",
    "zero",
    "one",
    "from_rational",
    "exponent_sum",
    "field_order",
    "root_q",
    "q_power",
    "gauss_sum",
    "sqrt_p_prime",
    "eta_kappa",
    "p_prime",
    "to_complex",
]

_ZERO = Fraction(0)


def _mobius(n: int) -> int:
    mu = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            mu = -mu
        d += 1
    if n > 1:
        mu = -mu
    return mu


def _poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_divexact(num: list, den: list) -> list:
    """Exact long division of integer polynomials (raises if inexact)."""
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c % lead:
            raise ArithmeticError("inexact polynomial division")
        q = c // lead
        out[i - dd] = q
        if q:
            for j, dj in enumerate(den):
                num[i - dd + j] -= q * dj
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> tuple:
    """Integer coefficients (constant term first) of the M-th cyclotomic
    polynomial, computed from the Moebius product of (x^d - 1) factors.

    >>> cyclotomic_polynomial(8)
    (1, 0, 0, 0, 1)
    >>> cyclotomic_polynomial(12)
    (1, 0, -1, 0, 1)
    """
    if M < 1:
        raise ValueError("order must be positive")
    num = [1]
    den = [1]
    for d in range(1, M + 1):
        if M % d == 0:
            mu = _mobius(M // d)
            factor = [-1] + [0] * (d - 1) + [1]
            if mu == 1:
                num = _poly_mul(num, factor)
            elif mu == -1:
                den = _poly_mul(den, factor)
    return tuple(_poly_divexact(num, den))


class _Field:
    """Cached reduction data for one cyclotomic order.

    ``reduction_rows[j - phi]`` holds the integer coordinates of
    x^j mod Phi_M for phi <= j < M; products of reduced elements have
    degree at most 2*phi - 2 < M whenever M is even, so the table covers
    every exponent that can occur.
    """

    __slots__ = ("order", "phi", "poly", "reduction_rows")

    def __init__(self, M: int):
        self.order = M
        poly = cyclotomic_polynomial(M)
        self.poly = poly
        phi = len(poly) - 1
        self.phi = phi
        base = tuple(-c for c in poly[:phi])
        rows = [base]
        row = base
        for _ in range(phi + 1, M):
            carry = row[phi - 1]
            shifted = (0,) + row[: phi - 1]
            if carry:
                row = tuple(s + carry * b for s, b in zip(shifted, base))
            else:
                row = shifted
            rows.append(row)
        self.reduction_rows = tuple(rows)


@lru_cache(maxsize=None)
def _field(M: int) -> _Field:
    return _Field(M)


def _reduce(field: _Field, vec: list) -> tuple:
    """Fold a coefficient vector indexed by exponent into the power basis."""
    phi = field.phi
    out = list(vec[:phi])
    if len(out) < phi:
        out.extend([0] * (phi - len(out)))
    for j in range(phi, len(vec)):
        c = vec[j]
        if c:
            row = field.reduction_rows[j - phi]
            for i, r in enumerate(row):
                if r:
                    out[i] += c * r
    return tuple(c if isinstance(c, Fraction) else Fraction(c) for c in out)


def _frac_poly_divmod(a: list, b: list):
    """Division with remainder for Fraction polynomials, b nonzero."""
    r = list(a)
    db = len(b) - 1
    while len(b) > 1 and b[-1] == 0:
        b = b[:-1]
        db -= 1
    inv_lead = 1 / b[-1]
    q = [_ZERO] * max(1, len(r) - db)
    while len(r) - 1 >= db and any(r):
        while len(r) > 1 and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        c = r[-1] * inv_lead
        k = len(r) - 1 - db
        q[k] = c
        for j, bj in enumerate(b):
            r[k + j] -= c * bj
        r.pop()
    if not r:
        r = [_ZERO]
    return q, r


class CycNum:
    """Element of Q(zeta_M) in canonical power-basis form.

    Arithmetic coerces plain integers and Fractions; elements of
    different orders do not mix.

    >>> i = make_root(8, 2)
    >>> (1 + i) * (1 - i)
    CycNum(8: 2)
    >>> make_root(24, 8) + make_root(24, 16)
    CycNum(24: -1)
    >>> make_root(40, 3).conjugate() == make_root(40, 37)
    True
    >>> make_root(24, 7).inverse() == make_root(24, 17)
    True
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        coeffs = tuple(
            c if isinstance(c, Fraction) else Fraction(c) for c in coeffs
        )
        if len(coeffs) != _field(order).phi:
            raise ValueError(
                "expected %d coefficients for order %d, got %d"
                % (_field(order).phi, order, len(coeffs))
            )
        self.order = order
        self.coeffs = coeffs

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycNum):
            if other.order != self.order:
                raise ValueError(
                    "mixed cyclotomic orders %d and %d"
                    % (self.order, other.order)
                )
            return other
        if isinstance(other, (int, Fraction)):
            return from_rational(self.order, other)
        return None

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycNum(
            self.order,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.order, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycNum(
            self.order,
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        out = [_ZERO] * (2 * len(a) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] += ai * bj
        return CycNum(self.order, _reduce(_field(self.order), out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def inverse(self) -> "CycNum":
        """Multiplicative inverse via the extended Euclidean algorithm
        against Phi_M (which is irreducible over Q)."""
        if self.is_zero():
            raise ZeroDivisionError("inversion of zero cyclotomic element")
        field = _field(self.order)
        mod = [Fraction(c) for c in field.poly]
        r0, r1 = list(self.coeffs), mod
        s0, s1 = [Fraction(1)], [_ZERO]
        while any(r1):
            q, r = _frac_poly_divmod(r0, r1)
            r0, r1 = r1, r
            qs1 = _poly_mul(q, s1)
            new_s = [
                (s0[i] if i < len(s0) else _ZERO)
                - (qs1[i] if i < len(qs1) else _ZERO)
                for i in range(max(len(s0), len(qs1)))
            ]
            s0, s1 = s1, new_s
        while len(r0) > 1 and r0[-1] == 0:
            r0.pop()
        if len(r0) != 1:
            raise ArithmeticError("gcd with cyclotomic polynomial not constant")
        scale = 1 / r0[0]
        inv = [c * scale for c in s0]
        return CycNum(self.order, _reduce(field, inv))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def conjugate(self) -> "CycNum":
        """Complex conjugation, realized by zeta -> zeta^(M-1)."""
        M = self.order
        vec = [_ZERO] * M
        vec[0] = self.coeffs[0]
        for j, c in enumerate(self.coeffs[1:], start=1):
            if c:
                vec[M - j] += c
        return CycNum(M, _reduce(_field(M), vec))

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, CycNum):
            if other.order == self.order:
                return self.coeffs == other.coeffs
            return (
                self.is_rational()
                and other.is_rational()
                and self.coeffs[0] == other.coeffs[0]
            )
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    # -- display ----------------------------------------------------------

    def __str__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            if j == 0:
                terms.append((c < 0, str(abs(c))))
            else:
                mag = "" if abs(c) == 1 else str(abs(c)) + "*"
                power = "z" if j == 1 else "z^%d" % j
                terms.append((c < 0, mag + power))
        if not terms:
            return "0"
        parts = []
        for k, (negative, body) in enumerate(terms):
            if k == 0:
                parts.append(("-" if negative else "") + body)
            else:
                parts.append(("- " if negative else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return "CycNum(%d: %s)" % (self.order, self)

    # -- serialization ----------------------------------------------------

    def to_json(self, digits: int | None = None) -> dict:
        doc = {
            "order": self.order,
            "coeffs": [str(c) for c in self.coeffs],
        }
        if digits is not None:
            z = to_complex(self, digits)
            doc["approx"] = "%s + %si" % (
                mpmath.nstr(z.real, digits),
                mpmath.nstr(z.imag, digits),
            )
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "CycNum":
        return cls(int(doc["order"]), [Fraction(s) for s in doc["coeffs"]])


# -- constructors ---------------------------------------------------------


def zero(M: int) -> CycNum:
    return CycNum(M, (_ZERO,) * _field(M).phi)


def one(M: int) -> CycNum:
    return from_rational(M, 1)


def from_rational(M: int, r) -> CycNum:
    coeffs = [Fraction(r)] + [_ZERO] * (_field(M).phi - 1)
    return CycNum(M, coeffs)


def make_root(M: int, j: int) -> CycNum:
    """zeta_M^j in canonical form.

    M must be divisible by 8 so that the eighth roots of unity (hence
    sqrt(2) and the anomaly kappa) are representable.

    >>> make_root(24, 0)
    CycNum(24: 1)
    >>> make_root(24, 12)
    CycNum(24: -1)
    """
    if M % 8:
        raise ValueError("cyclotomic order %d is not divisible by 8" % M)
    j %= M
    field = _field(M)
    if j < field.phi:
        coeffs = [_ZERO] * field.phi
        coeffs[j] = Fraction(1)
        return CycNum(M, coeffs)
    return CycNum(M, field.reduction_rows[j - field.phi])


def exponent_sum(M: int, counts) -> CycNum:
    """Sum of ``counts[j] * zeta_M^j`` with a single reduction pass.

    ``counts`` is a mapping or sequence of integer (or rational)
    multiplicities keyed by exponent; exponents are taken mod M.  This
    is the fast path for Gauss-sum style summations: the loop body is
    integer accumulation and reduction happens once at the end.
    """
    vec = [0] * M
    items = counts.items() if hasattr(counts, "items") else enumerate(counts)
    for j, c in items:
        if c:
            vec[j % M] += c
    return CycNum(M, _reduce(_field(M), vec))


# -- roots of unity and Gauss sums ----------------------------------------


def field_order(p: int) -> int:
    """The ambient cyclotomic order M = lcm(8, p)."""
    return 8 * p // math.gcd(8, p)


def p_prime(p: int) -> int:
    return p if p % 2 else p // 2


def root_q(p: int) -> CycNum:
    """The distinguished primitive p-th root q = zeta_M^(M/p)."""
    M = field_order(p)
    return make_root(M, M // p)


def q_power(p: int, e: int) -> CycNum:
    """q^e for the distinguished p-th root q."""
    M = field_order(p)
    return make_root(M, (M // p) * (e % p))


def gauss_sum(p: int):
    """The pair (G, g) of quadratic Gauss sums at the p-th root q.

    G sums q^(k^2) over 0 <= k < p, g over 0 <= k < p'.  For p odd the
    two coincide; for p = 2 mod 4 the full sum G vanishes.

    >>> gauss_sum(6)[0]
    CycNum(24: 0)
    >>> gauss_sum(3)[1] == 1 + 2 * make_root(24, 8)
    True
    """
    if p < 3:
        raise ValueError("p must be at least 3")
    M = field_order(p)
    step = M // p
    pp = p_prime(p)
    counts_G: dict = {}
    counts_g: dict = {}
    for k in range(p):
        e = (step * k * k) % M
        counts_G[e] = counts_G.get(e, 0) + 1
        if k < pp:
            counts_g[e] = counts_g.get(e, 0) + 1
    return exponent_sum(M, counts_G), exponent_sum(M, counts_g)


def _odd_sqrt(M: int, m: int) -> CycNum:
    """The positive square root of an odd m >= 1 inside Q(zeta_M).

    Built from the classical quadratic Gauss sum G_m = sum zeta_m^(k^2),
    which equals sqrt(m) for m = 1 mod 4 and sqrt(-m) for m = 3 mod 4.
    """
    if m == 1:
        return one(M)
    if M % m:
        raise ValueError("%d-th roots of unity unavailable at order %d" % (m, M))
    step = M // m
    counts: dict = {}
    for k in range(m):
        e = (step * k * k) % M
        counts[e] = counts.get(e, 0) + 1
    G = exponent_sum(M, counts)
    if m % 4 == 3:
        G = -make_root(M, M // 4) * G
    return G


def sqrt_p_prime(p: int) -> CycNum:
    """Exact positive square root of p' (so eta = 1/sqrt_p_prime(p)).

    Factors p' = 2^a * m with m odd and multiplies a copies of
    sqrt(2) = zeta_8 + zeta_8^(-1) with the odd Gauss-sum square root.
    """
    M = field_order(p)
    pp = p_prime(p)
    a, m = 0, pp
    while m % 2 == 0:
        m //= 2
        a += 1
    sqrt2 = make_root(M, M // 8) + make_root(M, M - M // 8)
    return sqrt2 ** a * _odd_sqrt(M, m)


def eta_kappa(p: int):
    """The normalization eta = 1/sqrt(p') and anomaly kappa = g * eta.

    kappa is asserted to be an eighth root of unity at construction
    time (a fourth root for odd p); failure would mean the square-root
    construction and the Gauss sum disagree, which is a bug trap.

    >>> eta_kappa(5)[1]
    CycNum(40: 1)
    >>> eta_kappa(4)[1] == make_root(8, 1)
    True
    """
    if p < 3:
        raise ValueError("p must be at least 3")
    if p % 4 == 2:
        raise ValueError("unsupported order: p = 2 mod 4 has vanishing Gauss sum")
    _, g = gauss_sum(p)
    eta = sqrt_p_prime(p).inverse()
    kappa = g * eta
    unit = one(field_order(p))
    assert kappa ** 8 == unit, "kappa is not an eighth root of unity"
    if p % 2:
        assert kappa ** 4 == unit, "kappa is not a fourth root of unity"
    return eta, kappa


def to_complex(x: CycNum, digits: int):
    """Floating approximation of x with error below 10^(-digits).

    Returns an mpmath complex number; intended for display and
    cross-checking only, never for equality decisions.

    >>> abs(to_complex(make_root(8, 1), 10) - (0.7071067811865476+0.7071067811865476j)) < 1e-10
    True
    """
    if digits < 1:
        raise ValueError("digits must be positive")
    with mpmath.workdps(digits + 15):
        z = mpmath.mpc(0)
        for j, c in enumerate(x.coeffs):
            if c:
                w = mpmath.mpf(c.numerator) / c.denominator
                z += w * mpmath.expjpi(mpmath.mpf(2 * j) / x.order)
        return +z


if __name__ == "__main__":
    import doctest

    doctest.testmod()
