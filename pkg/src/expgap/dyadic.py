"""Certified dyadic arithmetic.

Everything numeric in this library that is not exact rational arithmetic goes
through this module: directed rounding on `Fraction`s, interval enclosures of
ln 2, pi and e, certified exp/ln/sin/cos/sqrt, and a dyadic float type `DF`
with an unbounded exponent for magnitudes too large for any fixed-exponent
format.  All bounds returned here are rigorous: series tails and fixed-point
truncation are accounted for with explicit cushions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .errors import DomainError

_GUARD = 32  # extra fixed-point bits absorbing truncation cushions


def fr_floor(x: Fraction, bits: int) -> Fraction:
    """Largest multiple of 2^-bits that is <= x."""
    n = (x.numerator << bits) // x.denominator
    return Fraction(n, 1 << bits)


def fr_ceil(x: Fraction, bits: int) -> Fraction:
    n = -((-x.numerator << bits) // x.denominator)
    return Fraction(n, 1 << bits)


def ilog2(x: Fraction) -> int:
    """floor(log2(x)) for x > 0, exact."""
    if x <= 0:
        raise DomainError("ilog2 requires a positive argument")
    p, q = x.numerator, x.denominator
    e = p.bit_length() - q.bit_length()
    # e or e-1; settle by one exact comparison
    if (p << max(0, -e)) >= (q << max(0, e)):
        return e
    return e - 1


def sqrt_lower(x: Fraction, bits: int) -> Fraction:
    """Rational lower bound on sqrt(x), within 2^-bits of the true value."""
    if x < 0:
        raise DomainError("sqrt of a negative number")
    if x == 0:
        return Fraction(0)
    s = 1 << bits
    n = (x.numerator * s * s) // x.denominator
    return Fraction(isqrt(n), s)


def sqrt_upper(x: Fraction, bits: int) -> Fraction:
    if x < 0:
        raise DomainError("sqrt of a negative number")
    if x == 0:
        return Fraction(0)
    s = 1 << bits
    n = -((-x.numerator * s * s) // x.denominator)
    r = isqrt(n)
    if r * r < n:
        r += 1
    return Fraction(r, s)


# ---------------------------------------------------------------------------
# fixed-point series kernels; arguments and results are scaled integers


def _atanh_fixed(t_num: int, q: int) -> tuple[int, int]:
    """atanh(t) for t = t_num/2^q, 0 <= t <= 1/2.  Returns (approx, err_ulps)."""
    t2 = (t_num * t_num) >> q
    term = t_num
    s = 0
    k = 0
    n = 0
    while term:
        s += term // (2 * k + 1)
        term = (term * t2) >> q
        k += 1
        n += 1
        if n > 1 << 22:
            raise DomainError("atanh series failed to converge")
    # ratio t^2 <= 1/4 so the dropped tail is < 2 ulps; each step loses <= 2 ulps
    return s, 4 * n + 8


def _atan_inv_fixed(inv: int, q: int) -> tuple[int, int]:
    """atan(1/inv) scaled by 2^q for an integer inv >= 2 (alternating series)."""
    term = (1 << q) // inv
    inv2 = inv * inv
    s = 0
    k = 0
    n = 0
    while term:
        s += -term // (2 * k + 1) if k & 1 else term // (2 * k + 1)
        term //= inv2
        k += 1
        n += 1
    return s, 2 * n + 8


@lru_cache(maxsize=64)
def ln2_bounds(bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ln 2 = 2 atanh(1/3)."""
    q = bits + _GUARD
    t = (1 << q) // 3
    s, err = _atanh_fixed(t, q)
    # input rounding of 1/3: derivative of atanh at 1/3 is 9/8 < 2
    err += 4
    lo = Fraction(2 * (s - err), 1 << q)
    hi = Fraction(2 * (s + err), 1 << q)
    return lo, hi


@lru_cache(maxsize=64)
def pi_bounds(bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of pi via Machin's formula 16 atan(1/5) - 4 atan(1/239)."""
    q = bits + _GUARD
    a5, e5 = _atan_inv_fixed(5, q)
    a239, e239 = _atan_inv_fixed(239, q)
    val = 16 * a5 - 4 * a239
    err = 16 * e5 + 4 * e239
    return Fraction(val - err, 1 << q), Fraction(val + err, 1 << q)


def _exp_small_fixed(r_num: int, q: int) -> tuple[int, int]:
    """exp(r) for r = r_num/2^q with |r| <= 3/4.  Returns (approx, err_ulps)."""
    s = 1 << q
    term = 1 << q
    k = 0
    n = 0
    while term:
        k += 1
        term = (term * r_num) >> q
        term = term // k if term >= 0 else -((-term) // k)
        s += term
        n += 1
        if n > 1 << 22:
            raise DomainError("exp series failed to converge")
    return s, 8 * n + 32


def exp_bounds(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of e^x for rational x of moderate size."""
    if x == 0:
        return Fraction(1), Fraction(1)
    mag = ilog2(abs(x))
    if mag > 40:
        raise DomainError("exp argument too large for rational enclosures; "
                          "use tower arithmetic")
    q = bits + _GUARD
    l2lo, l2hi = ln2_bounds(q + max(mag, 0) + 8)
    n = (2 * x + l2lo) // (2 * l2lo)  # nearest integer to x/ln2, within 1
    if abs(n) > 1 << 24:
        raise DomainError("exp result too large to materialise as a Fraction")
    if n >= 0:
        r_lo, r_hi = x - n * l2hi, x - n * l2lo
    else:
        r_lo, r_hi = x - n * l2lo, x - n * l2hi
    if not (abs(r_lo) <= Fraction(3, 4) and abs(r_hi) <= Fraction(3, 4)):
        raise DomainError("exp argument reduction failed")
    rm = fr_floor((r_lo + r_hi) / 2, q)
    s, err = _exp_small_fixed((rm.numerator << q) // rm.denominator if rm else 0, q)
    # Lipschitz constant of exp on [-3/4, 3/4] is < 3
    slack = 3 * ((r_hi - r_lo) / 2 + Fraction(1, 1 << q))
    lo = Fraction(s - err, 1 << q) - slack
    hi = Fraction(s + err, 1 << q) + slack
    scale = Fraction(1 << n) if n >= 0 else Fraction(1, 1 << -n)
    return max(lo, Fraction(0)) * scale, hi * scale


def exp_iv(lo: Fraction, hi: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of e^x over x in [lo, hi] (exp is monotone)."""
    return exp_bounds(lo, bits)[0], exp_bounds(hi, bits)[1]


def ln_bounds(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of ln x for rational x > 0.  ln 1 is exactly 0."""
    if x <= 0:
        raise DomainError("ln requires a positive argument")
    if x == 1:
        return Fraction(0), Fraction(0)
    q = bits + _GUARD
    e = ilog2(x)
    m = x / Fraction(1 << e) if e >= 0 else x * (1 << -e)
    # m in [1, 2)
    t = (m - 1) / (m + 1)
    t_num = (t.numerator << q) // t.denominator
    s, err = _atanh_fixed(t_num, q)
    err += 4  # input rounding of t
    lm_lo = Fraction(2 * (s - err), 1 << q)
    lm_hi = Fraction(2 * (s + err), 1 << q)
    l2lo, l2hi = ln2_bounds(q + abs(e).bit_length() + 4)
    if e >= 0:
        return e * l2lo + lm_lo, e * l2hi + lm_hi
    return e * l2hi + lm_lo, e * l2lo + lm_hi


def ln_iv(lo: Fraction, hi: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    return ln_bounds(lo, bits)[0], ln_bounds(hi, bits)[1]


def _sincos_small_fixed(r_num: int, q: int) -> tuple[int, int, int]:
    """(sin, cos, err_ulps) at r = r_num/2^q with |r| <= 7/2, fixed point."""
    r2 = (r_num * r_num) >> q
    # sin
    term = r_num
    s = 0
    k = 0
    n = 0
    while term or k < 3:
        s += term
        term = (term * r2) >> q
        d = (2 * k + 2) * (2 * k + 3)
        term = -(term // d) if term >= 0 else (-term) // d
        k += 1
        n += 1
        if n > 1 << 20:
            raise DomainError("sin series failed to converge")
    c = 0
    term = 1 << q
    k = 0
    while term or k < 3:
        c += term
        term = (term * r2) >> q
        d = (2 * k + 1) * (2 * k + 2)
        term = -(term // d) if term >= 0 else (-term) // d
        k += 1
        n += 1
    return s, c, 8 * n + 64


def sin_cos_bounds(x: Fraction, bits: int) -> tuple[tuple[Fraction, Fraction],
                                                    tuple[Fraction, Fraction]]:
    """Certified enclosures of (sin x, cos x)."""
    q = bits + _GUARD
    if x == 0:
        z = (Fraction(0), Fraction(0))
        return z, (Fraction(1), Fraction(1))
    mag = ilog2(abs(x))
    plo, phi = pi_bounds(q + max(mag, 0) + 8)
    n = (x + plo) // (2 * plo)  # nearest integer to x/(2 pi), within 1
    if n >= 0:
        r_lo, r_hi = x - 2 * n * phi, x - 2 * n * plo
    else:
        r_lo, r_hi = x - 2 * n * plo, x - 2 * n * phi
    if not (abs(r_lo) <= Fraction(7, 2) and abs(r_hi) <= Fraction(7, 2)):
        raise DomainError("trig argument reduction failed")
    rm = fr_floor((r_lo + r_hi) / 2, q)
    s, c, err = _sincos_small_fixed((rm.numerator << q) // rm.denominator if rm else 0, q)
    # |sin'|, |cos'| <= 1
    slack = (r_hi - r_lo) / 2 + Fraction(1, 1 << q) + Fraction(err, 1 << q)
    sf, cf = Fraction(s, 1 << q), Fraction(c, 1 << q)
    clamp = lambda v: max(Fraction(-1), min(Fraction(1), v))
    return ((clamp(sf - slack), clamp(sf + slack)),
            (clamp(cf - slack), clamp(cf + slack)))


def e_bounds(bits: int) -> tuple[Fraction, Fraction]:
    return exp_bounds(Fraction(1), bits)


# ---------------------------------------------------------------------------
# dyadic floats with unbounded exponent


class DF:
    """Positive dyadic float m * 2^e with arbitrary integer exponent.

    Used for magnitudes whose binary exponent itself may have dozens of
    digits, where `Fraction` would materialise astronomically many bits.
    """

    __slots__ = ("m", "e")

    def __init__(self, m: int, e: int = 0):
        if m <= 0:
            raise DomainError("DF mantissa must be positive")
        # strip trailing zero bits for a unique representation
        tz = (m & -m).bit_length() - 1
        self.m = m >> tz
        self.e = e + tz

    # value = m * 2^e; msb = position of leading bit
    @property
    def msb(self) -> int:
        return self.e + self.m.bit_length() - 1

    @staticmethod
    def from_fraction(x: Fraction, bits: int, up: bool) -> "DF":
        if x <= 0:
            raise DomainError("DF.from_fraction requires a positive value")
        e = ilog2(x) - bits
        if e >= 0:
            n = x.numerator // (x.denominator << e)
            exact = x == Fraction(n << e)
        else:
            num = x.numerator << -e
            n = num // x.denominator
            exact = num % x.denominator == 0
        if up and not exact:
            n += 1
        if n == 0:
            n = 1
        return DF(n, e)

    def to_fraction(self) -> Fraction:
        if abs(self.e) > 1 << 24:
            raise DomainError("DF exponent too large to expand to a Fraction")
        if self.e >= 0:
            return Fraction(self.m << self.e)
        return Fraction(self.m, 1 << -self.e)

    def round(self, bits: int, up: bool) -> "DF":
        extra = self.m.bit_length() - bits
        if extra <= 0:
            return self
        m = self.m >> extra
        if up and self.m & ((1 << extra) - 1):
            m += 1
        return DF(m, self.e + extra)

    def cmp(self, other: "DF") -> int:
        if self.msb != other.msb:
            return -1 if self.msb < other.msb else 1
        # same leading-bit position: align (shift is bounded by bit lengths)
        sh = self.e - other.e
        a = self.m << max(sh, 0)
        b = other.m << max(-sh, 0)
        return (a > b) - (a < b)

    def add(self, other: "DF", bits: int, up: bool) -> "DF":
        big, small = (self, other) if self.cmp(other) >= 0 else (other, self)
        gap = big.msb - small.msb
        if gap > bits + 4:
            # the small addend is below the rounding grid of the rounded big one
            b = big.round(bits, up)
            return DF(b.m + 1, b.e).round(bits, True) if up else b
        sh = big.e - small.e
        m = (big.m << max(sh, 0)) + (small.m << max(-sh, 0))
        return DF(m, min(big.e, small.e)).round(bits, up)

    def mul(self, other: "DF", bits: int, up: bool) -> "DF":
        return DF(self.m * other.m, self.e + other.e).round(bits, up)

    def ln(self, bits: int) -> tuple[Fraction, Fraction]:
        """Enclosure of ln(value) as moderate Fractions."""
        lm_lo, lm_hi = (Fraction(0), Fraction(0)) if self.m == 1 \
            else ln_bounds(Fraction(self.m), bits)
        e = self.e
        if e == 0:
            return lm_lo, lm_hi
        l2lo, l2hi = ln2_bounds(bits + abs(e).bit_length() + 4)
        if e >= 0:
            return lm_lo + e * l2lo, lm_hi + e * l2hi
        return lm_lo + e * l2hi, lm_hi + e * l2lo

    def exp(self, bits: int, up: bool) -> "DF":
        """e^(value) as a DF; requires the value to be of moderate size."""
        if self.msb > 24:
            raise DomainError("exp argument too large; promote the tower level")
        x = self.to_fraction()
        lo, hi = exp_bounds(x, bits + 4)
        return DF.from_fraction(hi if up else lo, bits, up)

    def __repr__(self):
        return f"DF({self.m}, 2**{self.e})"

    def __eq__(self, other):
        return isinstance(other, DF) and self.m == other.m and self.e == other.e

    def __hash__(self):
        return hash((self.m, self.e))


def df_ln_df(x: DF, bits: int, up: bool) -> DF:
    """ln(x) as a DF, for x > 1."""
    lo, hi = x.ln(bits + 8)
    v = hi if up else lo
    if v <= 0:
        raise DomainError("df_ln_df requires a value > 1")
    return DF.from_fraction(v, bits, up)
