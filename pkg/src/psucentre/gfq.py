"""Arithmetic in F_q and F_{q^2} (q = p^r) with the bar involution x -> x^q.

Elements of F_{q^2} are plain ints in ``range(q*q)``: the base-p digits of
the int are the coefficients of a polynomial in the generator of
F_p[X]/(f), lowest degree first.  ``0`` is zero and ``1`` is one.  Every
nonzero element also has a discrete logarithm with respect to a fixed
primitive element ``ctx.gen``; all "smallest" choices below (special
elements, coset representatives) are made by smallest discrete log.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

#: Largest supported |F_{q^2}|.
MAX_ORDER = 1 << 16


class FieldError(ValueError):
    pass


class Subset(enum.Enum):
    PSI = "psi"  # norm-one elements, x * bar(x) = 1
    GAMMA = "gamma"  # gamma-th roots of unity
    L = "L"  # gamma-th powers


class Cosets(enum.Enum):
    MOD_GAMMA = "mod_gamma"  # F^x / Gamma
    PSI_MOD_GAMMA = "psi_mod_gamma"  # Psi / Gamma
    MOD_L = "mod_L"  # F^x / L


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- dense polynomials over F_p, coefficient lists lowest degree first ------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _polymod(out, f, p)


def _polymod(a, f, p):
    a = _trim(list(a))
    n = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) > n:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - n
        for i, y in enumerate(f):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return a


def _polysub(a, b, p):
    m = max(len(a), len(b))
    a = list(a) + [0] * (m - len(a))
    b = list(b) + [0] * (m - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _polygcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _polymod(a, b, p)
    return a


def _xpow_mod(e, f, p):
    """X^e mod f by square-and-multiply."""
    result, base = [1], _polymod([0, 1], f, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        e >>= 1
    return result


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial ``f`` over F_p."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if _polysub(_xpow_mod(p**n, f, p), [0, 1], p):
        return False
    for ell in prime_factors(n):
        g = _polysub(_xpow_mod(p ** (n // ell), f, p), [0, 1], p)
        if len(_polygcd(f, g, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, n: int) -> list[int]:
    """Lexicographically smallest monic irreducible of degree n.

    Candidates are ordered by the integer sum(c_i p^i) of their lower
    coefficients.
    """
    for code in range(p**n):
        f = [(code // p**i) % p for i in range(n)] + [1]
        if is_irreducible(f, p):
            return f
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """F_{q^2} with exp/log tables.  Build via :func:`make_field_ctx`."""

    p: int
    r: int
    poly: tuple[int, ...]
    gen: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.r

    @property
    def order(self) -> int:
        return self.q * self.q

    @property
    def gamma(self) -> int:
        return math.gcd(3, self.q + 1)

    @property
    def n_units(self) -> int:
        return self.order - 1

    # -- scalar arithmetic ---------------------------------------------------

    def digits(self, x: int) -> list[int]:
        return [(x // self.p**i) % self.p for i in range(2 * self.r)]

    def from_digits(self, ds) -> int:
        return sum(int(d) * self.p**i for i, d in enumerate(ds))

    def add(self, x: int, y: int) -> int:
        if self.p == 2:
            return x ^ y
        if self.order <= 256:
            return int(self._add_table[x, y])
        p = self.p
        return self.from_digits((a + b) % p for a, b in zip(self.digits(x), self.digits(y)))

    def neg(self, x: int) -> int:
        if self.p == 2:
            return x
        return self.from_digits((-a) % self.p for a in self.digits(x))

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return int(self.exp[(int(self.log[x]) + int(self.log[y])) % self.n_units])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in F_q^2")
        return int(self.exp[(-int(self.log[x])) % self.n_units])

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            if e <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return 0
        return int(self.exp[(int(self.log[x]) * e) % self.n_units])

    def elem(self, e: int) -> int:
        """gen ** e."""
        return int(self.exp[e % self.n_units])

    def dlog(self, x: int) -> int:
        if x == 0:
            raise FieldError("zero has no discrete logarithm")
        return int(self.log[x])

    def bar(self, x: int) -> int:
        return self.pow(x, self.q) if x else 0

    def in_subfield(self, x: int) -> bool:
        return self.bar(x) == x

    def from_int(self, k: int) -> int:
        """Image of the integer k in the prime field."""
        return k % self.p

    # -- whole-field tables --------------------------------------------------

    @cached_property
    def _add_table(self) -> np.ndarray:
        Q, p = self.order, self.p
        dig = np.array([self.digits(x) for x in range(Q)], dtype=np.int64)
        powers = p ** np.arange(2 * self.r, dtype=np.int64)
        s = (dig[:, None, :] + dig[None, :, :]) % p
        return (s @ powers).astype(np.int64)

    @cached_property
    def tables(self) -> "FieldTables":
        """uint8 lookup tables used by the matrix kernels (|F| <= 256)."""
        if self.order > 256:
            raise FieldError("matrix lookup tables need q^2 <= 256")
        Q = self.order
        mul = np.zeros((Q, Q), dtype=np.uint8)
        lg = self.log[1:].astype(np.int64)
        mul[1:, 1:] = self.exp[(lg[:, None] + lg[None, :]) % self.n_units]
        if self.p == 2:
            xs = np.arange(Q)
            add = (xs[:, None] ^ xs[None, :]).astype(np.uint8)
        else:
            add = self._add_table.astype(np.uint8)
        neg = np.array([self.neg(x) for x in range(Q)], dtype=np.uint8)
        inv = np.array([0] + [self.inv(x) for x in range(1, Q)], dtype=np.uint8)
        bar = np.array([self.bar(x) for x in range(Q)], dtype=np.uint8)
        return FieldTables(mul=mul, add=add, neg=neg, inv=inv, bar=bar)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "q": self.q,
            "order": self.order,
            "gamma": self.gamma,
            "poly": list(self.poly),
            "poly_str": poly_str(self.poly),
            "generator": self.gen,
        }


@dataclass(frozen=True)
class FieldTables:
    mul: np.ndarray
    add: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    bar: np.ndarray


@dataclass(frozen=True)
class SpecialElems:
    omega: int
    tau: int


def poly_str(f) -> str:
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if not c:
            continue
        mono = "1" if i == 0 else ("X" if i == 1 else f"X^{i}")
        terms.append(mono if c == 1 and i else f"{c}*{mono}" if i else str(c))
    return " + ".join(terms)


def make_field_ctx(p: int, r: int) -> FieldCtx:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if r < 1:
        raise FieldError("r must be positive")
    n = 2 * r
    Q = p**n
    if Q > MAX_ORDER:
        raise FieldError(f"|F_q^2| = {Q} exceeds the cap {MAX_ORDER}")
    f = smallest_irreducible(p, n)

    def to_int(a):
        return sum(c * p**i for i, c in enumerate(a))

    def to_poly(x):
        return _trim([(x // p**i) % p for i in range(n)])

    def is_primitive(x):
        a = to_poly(x)
        for ell in prime_factors(Q - 1):
            b, e, res = a, (Q - 1) // ell, [1]
            while e:
                if e & 1:
                    res = _polymulmod(res, b, f, p)
                b = _polymulmod(b, b, f, p)
                e >>= 1
            if res == [1]:
                return False
        return True

    gen = next(x for x in range(2, Q) if is_primitive(x))
    exp = np.zeros(Q - 1, dtype=np.int64)
    log = np.full(Q, -1, dtype=np.int64)
    g = to_poly(gen)
    cur = [1]
    for e in range(Q - 1):
        x = to_int(cur)
        exp[e] = x
        log[x] = e
        cur = _polymulmod(cur, g, f, p)
    if cur != [1] or (log[1:] < 0).any():
        raise FieldError("generator does not have order q^2 - 1")
    exp.setflags(write=False)
    log.setflags(write=False)
    return FieldCtx(p=p, r=r, poly=tuple(f), gen=gen, exp=exp, log=log)


def bar(ctx: FieldCtx, x: int) -> int:
    return ctx.bar(x)


def special_elements(ctx: FieldCtx) -> SpecialElems:
    """omega != 0 with omega + bar(omega) = 0, tau with tau + bar(tau) = -1.

    Both are the smallest-log solutions.
    """
    minus_one = ctx.neg(1)
    omega = tau = None
    for e in range(ctx.n_units):
        x = ctx.elem(e)
        s = ctx.add(x, ctx.bar(x))
        if omega is None and s == 0:
            omega = x
        if tau is None and s == minus_one:
            tau = x
        if omega is not None and tau is not None:
            return SpecialElems(omega=omega, tau=tau)
    raise FieldError("special elements not found")  # pragma: no cover


def subset_member(ctx: FieldCtx, x: int, which: Subset) -> bool:
    if x == 0:
        raise FieldError("0 is not a unit")
    e = ctx.dlog(x)
    if which is Subset.PSI:
        return e % (ctx.q - 1) == 0
    if which is Subset.GAMMA:
        return e % (ctx.n_units // ctx.gamma) == 0
    if which is Subset.L:
        return e % ctx.gamma == 0
    raise ValueError(which)


def coset_label_logs(ctx: FieldCtx, which: Cosets) -> list[int]:
    """Discrete logs of the smallest-log representative of each coset."""
    q, g = ctx.q, ctx.gamma
    if which is Cosets.MOD_GAMMA:
        return list(range(ctx.n_units // g))
    if which is Cosets.PSI_MOD_GAMMA:
        return [(q - 1) * j for j in range((q + 1) // g)]
    if which is Cosets.MOD_L:
        return list(range(g))
    raise ValueError(which)


def coset_labels(ctx: FieldCtx, which: Cosets) -> list[int]:
    return [ctx.elem(e) for e in coset_label_logs(ctx, which)]
