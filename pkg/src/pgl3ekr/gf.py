"""Finite fields GF(q) as dense lookup tables.

Elements are the integers ``0..q-1``.  For ``q = p**k`` the element with
index ``sum(c[i] * p**i)`` is the residue class of ``sum(c[i] * T**i)``
modulo the field's defining polynomial, so the prime subfield occupies
indices ``0..p-1`` and ``0``/``1`` are the additive/multiplicative
identities.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NotPrimePower, TooLarge, UnsupportedDegree

MAX_ORDER = 16


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k``; raise NotPrimePower otherwise."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise NotPrimePower(f"{q} is not a prime power")
    return p, k


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except NotPrimePower:
        return False
    return True


# --- polynomials over Z/p, used only to build the extension tables ---------

def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        if c:
            shift = len(a) - len(m)
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - c * mi) % p
        a.pop()
    return a


def _prime_irreducible(p: int, k: int) -> list[int]:
    """Smallest monic irreducible of degree k over Z/p, ordered by sum(c_i p^i)."""
    for enc in range(p ** k):
        low = [(enc // p ** i) % p for i in range(k)]
        cand = low + [1]
        if k == 1 or _no_factor_mod_p(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")


def _no_factor_mod_p(f: list[int], p: int) -> bool:
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for enc in range(p ** d):
            g = [(enc // p ** i) % p for i in range(d)] + [1]
            if not any(_pmod(f, g, p)):
                return False
    return True


@dataclass(frozen=True, eq=False)
class Field:
    q: int
    p: int
    k: int
    modulus: tuple[int, ...]
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    @property
    def elements(self) -> range:
        return range(self.q)

    def add(self, x: int, y: int) -> int:
        return int(self.add_table[x, y])

    def sub(self, x: int, y: int) -> int:
        return int(self.add_table[x, self.neg_table[y]])

    def mul(self, x: int, y: int) -> int:
        return int(self.mul_table[x, y])

    def neg(self, x: int) -> int:
        return int(self.neg_table[x])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse in GF(q)")
        return int(self.inv_table[x])

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, x)
            x = self.mul(x, x)
            e >>= 1
        return r

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    def multiplicative_order(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no multiplicative order")
        r, k = x, 1
        while r != 1:
            r = self.mul(r, x)
            k += 1
        return k

    def primitive_element(self) -> int:
        """Smallest element of order q-1."""
        return next(x for x in range(1, self.q) if self.multiplicative_order(x) == self.q - 1)

    def __repr__(self):
        return f"GF({self.q})"


def field_new(q: int, max_order: int = MAX_ORDER) -> Field:
    p, k = prime_power(q)
    if q > max_order:
        raise TooLarge(f"GF({q}) exceeds the configured bound {max_order}")
    return _build_field(q, p, k)


@lru_cache(maxsize=None)
def _build_field(q: int, p: int, k: int) -> Field:
    modulus = _prime_irreducible(p, k) if k > 1 else [0, 1]
    digits = [[(x // p ** i) % p for i in range(k)] for x in range(q)]

    def enc(c):
        return sum(ci * p ** i for i, ci in enumerate(c))

    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for x in range(q):
        for y in range(q):
            add[x, y] = enc([(a + b) % p for a, b in zip(digits[x], digits[y])])
            prod = [0] * (2 * k - 1)
            for i, a in enumerate(digits[x]):
                for j, b in enumerate(digits[y]):
                    prod[i + j] = (prod[i + j] + a * b) % p
            red = _pmod(prod, modulus, p) if k > 1 else prod
            mul[x, y] = enc(red + [0] * (k - len(red)))
    neg = np.array([int(np.flatnonzero(add[x] == 0)[0]) for x in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        inv[x] = int(np.flatnonzero(mul[x] == 1)[0])
    for t in (add, mul, neg, inv):
        t.setflags(write=False)
    return Field(q, p, k, tuple(modulus) if k > 1 else (), add, mul, neg, inv)


# --- polynomials over GF(q) -------------------------------------------------

@dataclass(frozen=True)
class Poly:
    """Polynomial over a Field; ``coeffs`` lowest degree first, no trailing zeros."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, F: Field, x: int) -> int:
        r = 0
        for c in reversed(self.coeffs):
            r = F.add(F.mul(r, x), c)
        return r

    def roots(self, F: Field) -> list[int]:
        return [x for x in F.elements if self(F, x) == 0]

    def format(self, var: str = "T") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms)

    def __str__(self):
        return self.format()


def poly_divmod(F: Field, a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b.coeffs:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a.coeffs)
    db = b.degree
    inv_lead = F.inv(b.coeffs[-1])
    quot = [0] * max(len(r) - db, 0)
    while len(r) - 1 >= db and r:
        c = F.mul(r[-1], inv_lead)
        shift = len(r) - 1 - db
        quot[shift] = c
        for i, bi in enumerate(b.coeffs):
            r[shift + i] = F.sub(r[shift + i], F.mul(c, bi))
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return Poly(tuple(quot)), Poly(tuple(r))


def monic_polys(F: Field, d: int):
    """Monic degree-d polynomials ordered by ``sum(c_i * q**i)`` over the low coefficients."""
    for low in itertools.product(range(F.q), repeat=d):
        yield Poly(tuple(reversed(low)) + (1,))


def is_irreducible(F: Field, f: Poly) -> bool:
    d = f.degree
    if d < 1:
        return False
    if d <= 3:
        return d == 1 or not f.roots(F)
    for e in range(1, d // 2 + 1):
        for g in monic_polys(F, e):
            if not poly_divmod(F, f, g)[1].coeffs:
                return False
    return True


def enumerate_irreducible(q: int, d: int, limit: int = 10 ** 6) -> list[Poly]:
    """All monic irreducible polynomials of degree d over GF(q), in monic_polys order."""
    if d < 1:
        raise UnsupportedDegree(f"degree must be positive, got {d}")
    if q ** d > limit:
        raise TooLarge(f"q^d = {q ** d} exceeds enumeration limit {limit}")
    F = field_new(q)
    return [f for f in monic_polys(F, d) if is_irreducible(F, f)]


def count_irreducible(q: int, d: int) -> int:
    prime_power(q)
    if d == 1:
        return q
    if d == 2:
        return (q - 1) * q // 2
    if d == 3:
        return (q * q - 1) * q // 3
    raise UnsupportedDegree(f"closed form only for d in (1, 2, 3), got {d}")
