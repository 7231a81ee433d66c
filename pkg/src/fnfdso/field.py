"""Prime-field scalars and dense polynomial arithmetic.

Scalars are plain Python ints reduced into [0, p).  Polynomials are
dense coefficient lists in increasing degree order.  The heavy kernels
pack a coefficient list into one big integer (fixed-width little-endian
limbs) so a single CPython big-int multiplication performs the whole
convolution exactly; no floating point is involved anywhere.

Classes:
    Field -- arithmetic modulo a fixed odd prime below 2**63
    Poly  -- polynomial over a Field with an optional truncation cap

Functions:
    sample_prime    -- draw the working prime for an n-dimensional instance
    poly_mul        -- coefficient-list product (schoolbook or packed)
    poly_series_inv -- inverse of a unit power series mod x**k
"""

import random

from .errors import SeriesNotInvertible, ZeroInverse

# Witnesses that make Miller-Rabin deterministic for every n < 3.3e24,
# which covers the full 63-bit modulus range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

MILLER_RABIN_ROUNDS = 40

MAX_MODULUS_BITS = 63


def is_probable_prime(n, rng=None, rounds=MILLER_RABIN_ROUNDS):
    """Miller-Rabin test; exact for n < 2**63 via the fixed witness set.

    When ``rng`` is given, random witnesses are appended until ``rounds``
    total bases have been tried.
    """
    if n < 2:
        return False
    for q in _MR_BASES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    bases = list(_MR_BASES)
    if rng is not None:
        while len(bases) < rounds:
            bases.append(rng.randrange(2, n - 1))
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sample_prime_in_range(lo, hi, rng, rounds=MILLER_RABIN_ROUNDS):
    """Uniformly sample primes from [lo, hi] until one is found."""
    if hi < lo or hi < 3:
        raise ValueError(f"empty prime range [{lo}, {hi}]")
    while True:
        cand = rng.randrange(lo, hi + 1) | 1
        if lo <= cand <= hi and is_probable_prime(cand, rng, rounds):
            return cand


def sample_prime(n, c, rng, rounds=MILLER_RABIN_ROUNDS):
    """Draw a prime p with max(n**(4+c), 2**20) <= p <= 2*max(n**(4+c), 2**20).

    The lower bound keeps the failure probability of randomized identity
    tests on n-dimensional instances below n**-c; the doubled upper bound
    guarantees the range contains a prime.  c must be at least 1.
    """
    if c < 1:
        raise ValueError("error exponent c must be >= 1")
    lo = max(n ** (4 + c), 1 << 20)
    hi = 2 * lo
    if hi >= 1 << MAX_MODULUS_BITS:
        raise ValueError(f"modulus for n={n}, c={c} would exceed {MAX_MODULUS_BITS} bits")
    return sample_prime_in_range(lo, hi, rng, rounds)


class Field:
    """Arithmetic modulo a fixed odd prime p < 2**63."""

    __slots__ = ("p",)

    def __init__(self, p):
        if p >= 1 << MAX_MODULUS_BITS:
            raise ValueError(f"modulus must fit in {MAX_MODULUS_BITS} bits, got {p}")
        if p < 3 or p % 2 == 0 or not is_probable_prime(p):
            raise ValueError(f"modulus must be an odd prime, got {p}")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field({self.p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroInverse(f"0 has no inverse mod {self.p}")
        return pow(a, self.p - 2, self.p)

    def rand_scalar(self, rng):
        return rng.randrange(self.p)

    def rand_nonzero(self, rng):
        return rng.randrange(1, self.p)

    def rand_vector(self, rng, n):
        p = self.p
        return [rng.randrange(p) for _ in range(n)]


# --- packed big-integer representation of coefficient lists ---------------


def pack_ints(vals, width):
    """Concatenate non-negative ints into one big int, width bytes each."""
    return int.from_bytes(
        b"".join(v.to_bytes(width, "little") for v in vals), "little"
    )


def unpack_ints(x, count, width):
    """Split a packed big int back into `count` limbs of `width` bytes."""
    data = x.to_bytes(count * width, "little")
    return [
        int.from_bytes(data[i : i + width], "little")
        for i in range(0, count * width, width)
    ]


def conv_width(p, terms):
    """Byte width so that a sum of `terms` products of scalars mod p is exact."""
    bits = 2 * p.bit_length() + max(terms, 1).bit_length()
    return (bits + 7) // 8


# --- polynomial multiplication kernels -------------------------------------

SCHOOLBOOK_VOLUME = 64  # measured CPython crossover; packed wins past ~100 pairs


def _mul_school_raw(f, g):
    if not f or not g:
        return []
    res = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                res[i + j] += a * b
    return res


def _mul_packed(f, g, p, start=0, stop=None):
    total = len(f) + len(g) - 1
    if stop is None or stop > total:
        stop = total
    if start >= stop:
        return []
    width = conv_width(p, min(len(f), len(g)))
    prod = pack_ints(f, width) * pack_ints(g, width)
    data = prod.to_bytes(total * width, "little")
    return [
        int.from_bytes(data[i : i + width], "little") % p
        for i in range(start * width, stop * width, width)
    ]


def poly_mul(f, g, p):
    """Product of reduced coefficient lists mod p, full length len(f)+len(g)-1.

    Schoolbook below a small volume, packed big-int convolution above it.
    """
    if not f or not g:
        return []
    if len(f) * len(g) <= SCHOOLBOOK_VOLUME:
        return [v % p for v in _mul_school_raw(f, g)]
    return _mul_packed(f, g, p)


def poly_mul_range(f, g, p, start, stop):
    """Coefficients start..stop-1 of f*g mod p, indexed as in the full product.

    The packed kernel still forms the whole product integer but only the
    requested band is unpacked and reduced, which is the saving callers
    that discard most of a convolution are after.
    """
    if not f or not g or stop <= start:
        return []
    start, stop = max(start, 0), max(stop, 0)
    if len(f) * len(g) <= SCHOOLBOOK_VOLUME:
        return [v % p for v in _mul_school_raw(f, g)[start:stop]]
    return _mul_packed(f, g, p, start, stop)


def poly_mul_trunc(f, g, p, k):
    """First k coefficients of f*g mod p."""
    return poly_mul_range(f[:k], g[:k], p, 0, k)


def poly_add(f, g, p):
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, v in enumerate(g):
        out[i] = (out[i] + v) % p
    return out


def poly_trim(f):
    """Drop trailing zeros in place and return the list."""
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_series_inv(f, p, k):
    """Coefficients of f**-1 mod x**k by Newton iteration; needs f[0] != 0."""
    if k <= 0:
        return []
    if not f or f[0] % p == 0:
        raise SeriesNotInvertible("series has zero constant term")
    g = [pow(f[0], p - 2, p)]
    prec = 1
    while prec < k:
        prec = min(2 * prec, k)
        # g_new = g * (2 - f*g) mod x**prec
        e = poly_mul_trunc(f[:prec], g, p, prec)
        e[0] = (2 - e[0]) % p
        for i in range(1, len(e)):
            e[i] = -e[i] % p
        g = poly_mul_trunc(g, e, p, prec)
    g.extend([0] * (k - len(g)))
    return g[:k]


class Poly:
    """Dense polynomial over a Field.

    coeffs[i] holds the coefficient of x**i; trailing zeros are stripped.
    A cap of c makes the instance behave as an element of F[x]/(x**(c+1)):
    construction and arithmetic drop every term of degree above c.  Mixed
    caps combine to the tighter one; None means untruncated.
    """

    __slots__ = ("field", "coeffs", "cap")

    def __init__(self, field, coeffs, cap=None):
        p = field.p
        cs = [c % p for c in coeffs]
        if cap is not None:
            if cap < 0:
                raise ValueError("cap must be non-negative")
            del cs[cap + 1 :]
        self.field = field
        self.coeffs = poly_trim(cs)
        self.cap = cap

    @classmethod
    def zero(cls, field, cap=None):
        return cls(field, [], cap)

    @classmethod
    def one(cls, field, cap=None):
        return cls(field, [1], cap)

    def degree(self):
        """Degree of the polynomial; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def padded(self, length):
        return self.coeffs + [0] * (length - len(self.coeffs))

    def _join_cap(self, other):
        if self.cap is None:
            return other.cap
        if other.cap is None:
            return self.cap
        return min(self.cap, other.cap)

    def _check(self, other):
        if self.field.p != other.field.p:
            raise ValueError("mixed moduli")

    def __add__(self, other):
        self._check(other)
        return Poly(
            self.field,
            poly_add(self.coeffs, other.coeffs, self.field.p),
            self._join_cap(other),
        )

    def __sub__(self, other):
        self._check(other)
        p = self.field.p
        return Poly(
            self.field,
            poly_add(self.coeffs, [-c % p for c in other.coeffs], p),
            self._join_cap(other),
        )

    def __mul__(self, other):
        self._check(other)
        return Poly(
            self.field,
            poly_mul(self.coeffs, other.coeffs, self.field.p),
            self._join_cap(other),
        )

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and other.field.p == self.field.p
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, tuple(self.coeffs)))

    def __repr__(self):
        return f"Poly({self.coeffs!r}, cap={self.cap!r}, p={self.field.p})"

    def series_inverse(self, k):
        """Inverse mod x**k; requires a unit constant term."""
        return Poly(self.field, poly_series_inv(self.coeffs, self.field.p, k), k - 1)
