"""Arithmetic in GF(q^2), q = p^e, with elements stored as discrete logs.

A nonzero element mu^a is the int ``a`` (0 <= a <= q^2 - 2) and zero is the
sentinel :data:`ZERO`.  Multiplication is exponent addition; addition goes
through a Zech logarithm table.  The field is realized as GF(p)[x]/(f) where f
is the lexicographically smallest primitive polynomial of degree 2e (constant
term first), so mu = x and every derived index is reproducible.
"""
from __future__ import annotations

import itertools
from math import gcd

ZERO = -1
MAX_Q = 1 << 16


class FieldError(ValueError):
    pass


class NonPrime(FieldError):
    pass


class FieldTooLarge(FieldError):
    pass


class DivideByZero(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
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


# -- polynomials over GF(p), coefficient lists with the constant term first --

def _polymulmod(a, b, mod, p):
    d = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # mod is monic
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for j in range(d + 1):
                prod[k - d + j] = (prod[k - d + j] - c * mod[j]) % p
    prod = prod[:d] + [0] * (d - len(prod))
    return prod


def _polypowmod(base, n, mod, p):
    d = len(mod) - 1
    result = [1] + [0] * (d - 1)
    while n:
        if n & 1:
            result = _polymulmod(result, base, mod, p)
        base = _polymulmod(base, base, mod, p)
        n >>= 1
    return result


def is_primitive(poly: list[int] | tuple[int, ...], p: int) -> bool:
    """True if the monic ``poly`` (constant term first) is primitive over GF(p)."""
    d = len(poly) - 1
    if d < 1 or poly[-1] != 1 or poly[0] % p == 0:
        return False
    order = p**d - 1
    one = [1] + [0] * (d - 1)
    x = [0, 1] + [0] * (d - 2) if d > 1 else [(-poly[0]) % p]
    if _polypowmod(x, order, list(poly), p) != one:
        return False
    return all(_polypowmod(x, order // r, list(poly), p) != one for r in prime_factors(order))


def smallest_primitive_poly(p: int, degree: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=degree):
        poly = low + (1,)
        if is_primitive(poly, p):
            return poly
    raise FieldError(f"no primitive polynomial of degree {degree} over GF({p})")


class GF:
    """The field GF(q^2) for q = p^e.

    Elements are ints: :data:`ZERO` or an exponent of the primitive element.
    The additive (vector) code of mu^a is ``exp_table[a]``, an int whose
    base-p digits are the coefficients of the residue polynomial.
    """

    def __init__(self, p: int, e: int, modulus=None):
        if not is_prime(p):
            raise NonPrime(p)
        if e < 1:
            raise FieldError(f"extension degree must be positive, got {e}")
        if p**e > MAX_Q:
            raise FieldTooLarge(f"q = {p}^{e} exceeds {MAX_Q}")
        self.p = p
        self.e = e
        self.q = p**e
        self.order = self.q * self.q
        self.m = self.order - 1
        degree = 2 * e
        if modulus is None:
            modulus = smallest_primitive_poly(p, degree)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != degree + 1 or not is_primitive(modulus, p):
                raise FieldError(f"{modulus} is not a primitive polynomial of degree {degree}")
        self.modulus = tuple(modulus)
        self._build_tables()
        self.neg_one = 0 if p == 2 else self.m // 2

    def _build_tables(self):
        p, d, m = self.p, 2 * self.e, self.m
        weights = [p**i for i in range(d)]
        exp_table = [0] * m
        log_table = [ZERO] * self.order
        coeffs = [1] + [0] * (d - 1)
        for a in range(m):
            code = sum(c * w for c, w in zip(coeffs, weights))
            if log_table[code] != ZERO:
                raise FieldError("modulus is not primitive")
            exp_table[a] = code
            log_table[code] = a
            # multiply by x
            top = coeffs[-1]
            coeffs = [0] + coeffs[:-1]
            if top:
                coeffs = [(c - top * f) % p for c, f in zip(coeffs, self.modulus)]
        self.exp_table = exp_table
        self.log_table = log_table
        self.zech = [log_table[self._add_codes(1, exp_table[a])] for a in range(m)]

    def _add_codes(self, u: int, v: int) -> int:
        if self.p == 2:
            return u ^ v
        p = self.p
        out, w = 0, 1
        while u or v:
            out += ((u % p + v % p) % p) * w
            u //= p
            v //= p
            w *= p
        return out

    def __repr__(self):
        return f"GF({self.p}^{2 * self.e}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    # -- elements --

    def elements(self) -> list[int]:
        return [ZERO] + list(range(self.m))

    def from_int(self, k: int) -> int:
        """Image of the integer k in the prime subfield."""
        return self.log_table[k % self.p]

    def from_code(self, code: int) -> int:
        return self.log_table[code]

    def to_code(self, a: int) -> int:
        return 0 if a == ZERO else self.exp_table[a]

    # -- arithmetic --

    def add(self, a: int, b: int) -> int:
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        z = self.zech[(b - a) % self.m]
        return ZERO if z == ZERO else (a + z) % self.m

    def neg(self, a: int) -> int:
        return a if a == ZERO else (a + self.neg_one) % self.m

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == ZERO or b == ZERO:
            return ZERO
        return (a + b) % self.m

    def inv(self, a: int) -> int:
        if a == ZERO:
            raise DivideByZero("inverse of zero")
        return (-a) % self.m

    def div(self, a: int, b: int) -> int:
        if b == ZERO:
            raise DivideByZero("division by zero")
        return ZERO if a == ZERO else (a - b) % self.m

    def pow(self, a: int, n: int) -> int:
        if a == ZERO:
            if n < 0:
                raise DivideByZero("negative power of zero")
            return 0 if n == 0 else ZERO
        return (a * n) % self.m

    def arith(self, a: int, b: int, kind: str) -> int:
        ops = {"add": self.add, "sub": self.sub, "mul": self.mul, "div": self.div, "pow": self.pow}
        try:
            op = ops[kind]
        except KeyError:
            raise ValueError(f"unknown operation {kind!r}") from None
        return op(a, b)

    def sum(self, items) -> int:
        acc = ZERO
        for x in items:
            acc = self.add(acc, x)
        return acc

    def frobenius(self, a: int, k: int = 1) -> int:
        """a^(p^k)."""
        if a == ZERO:
            return ZERO
        return (a * pow(self.p, k % (2 * self.e), self.m)) % self.m if self.m > 1 else 0

    def conj(self, a: int) -> int:
        """a^q, the involution of GF(q^2) over GF(q)."""
        return self.frobenius(a, self.e)

    def norm(self, a: int) -> int:
        return self.pow(a, self.q + 1)

    def in_subfield(self, a: int) -> bool:
        return a == ZERO or a % (self.q + 1) == 0

    @property
    def mu(self) -> int:
        return 1 % self.m if self.m > 1 else 0

    @property
    def nu(self) -> int:
        return nu(self)

    def fmt(self, a: int) -> str:
        if a == ZERO:
            return "0"
        if a == 0:
            return "1"
        return f"mu^{a}"


def build_field(p: int, e: int, modulus=None) -> GF:
    return GF(p, e, modulus)


def nu(field: GF) -> int:
    """mu^((q-1) gcd(2,q) / 2); satisfies nu^(q+1) = -1."""
    q = field.q
    a = (q - 1) * gcd(2, q) // 2
    val = field.pow(field.mu, a)
    if field.pow(val, q + 1) != field.neg_one:
        raise AssertionError(f"nu^(q+1) != -1 in {field!r}")
    return val


def field_for_q(q: int, modulus=None) -> GF:
    """GF(q^2) for a prime power q."""
    for p in prime_factors(q)[:1]:
        e = 0
        n = q
        while n % p == 0:
            n //= p
            e += 1
        if n == 1:
            return GF(p, e, modulus)
    raise NonPrime(f"{q} is not a prime power")


def field_info(field: GF) -> dict:
    order_mu = next(k for k in range(1, field.m + 1) if field.pow(field.mu, k) == 0)
    return {
        "p": field.p,
        "e": field.e,
        "q": field.q,
        "order": field.order,
        "modulus": list(field.modulus),
        "mu_order": order_mu,
        "nu": field.fmt(field.nu),
        "nu_exponent": field.nu,
    }
