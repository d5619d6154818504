"""Polynomials and scalars over prime fields.

Root finding is exhaustive evaluation over F_p (vectorised with numpy), which
is fast and obviously correct at the prime sizes used here (p up to ~10^6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exact import IntPoly


class NotPrimeError(ValueError):
    pass


class NotInPrError(ValueError):
    """Raised when p is not in Pr(f): f fails to split over F_p or has a zero root."""


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


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, math.isqrt(n) + 1):
        if sieve[k]:
            sieve[k * k::k] = False
    return tuple(int(x) for x in np.flatnonzero(sieve))


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- polynomials mod p --------------------------------------------------------

@dataclass(frozen=True)
class PolyModP:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) % self.p for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_int_poly(cls, f: IntPoly, p: int) -> PolyModP:
        return cls(p, f.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def __mul__(self, other: PolyModP) -> PolyModP:
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return PolyModP(self.p, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return PolyModP(self.p, out)

    def derivative(self) -> PolyModP:
        return PolyModP(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: PolyModP) -> tuple[PolyModP, PolyModP]:
        p = self.p
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        d = other.degree
        inv = pow(other.coeffs[-1], -1, p)
        quot = [0] * max(len(rem) - d, 0)
        for k in range(len(rem) - 1 - d, -1, -1):
            q = rem[k + d] * inv % p
            quot[k] = q
            if q:
                for i, c in enumerate(other.coeffs):
                    rem[k + i] = (rem[k + i] - q * c) % p
        return PolyModP(p, quot), PolyModP(p, rem[:d] if d > 0 else [])

    def gcd(self, other: PolyModP) -> PolyModP:
        a, b = self, other
        while b.coeffs:
            a, b = b, a.divmod(b)[1]
        if not a.coeffs:
            return a
        inv = pow(a.coeffs[-1], -1, self.p)
        return PolyModP(self.p, [c * inv for c in a.coeffs])


def _roots_by_evaluation(f: PolyModP) -> list[int]:
    p = f.p
    xs = np.arange(p, dtype=np.int64)
    if p < 3_000_000_000:
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(f.coeffs):
            acc = (acc * xs + c) % p
        return [int(r) for r in np.flatnonzero(acc == 0)]
    return [x for x in range(p) if f(x) == 0]


@dataclass(frozen=True)
class SplitReport:
    p: int
    splits: bool
    roots: tuple[int, ...]  # with multiplicity, ascending
    has_zero_root: bool
    distinct: bool

    @property
    def distinct_roots(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.roots)))

    @property
    def in_pr(self) -> bool:
        return self.splits and not self.has_zero_root


def split_over(f: IntPoly, p: int) -> SplitReport:
    _require_prime(p)
    fp = PolyModP.from_int_poly(f, p)
    roots: list[int] = []
    for r in _roots_by_evaluation(fp):
        lin = PolyModP(p, (-r, 1))
        g = fp
        while True:
            q, rem = g.divmod(lin)
            if rem.coeffs:
                break
            roots.append(r)
            g = q
    distinct = fp.gcd(fp.derivative()).degree <= 0
    return SplitReport(
        p=p,
        splits=len(roots) == fp.degree,
        roots=tuple(sorted(roots)),
        has_zero_root=0 in roots,
        distinct=distinct,
    )


def _powmod_x(e: int, f: PolyModP) -> PolyModP:
    """x^e mod f over F_p, by square-and-multiply."""
    p = f.p
    result = PolyModP(p, (1,))
    base = PolyModP(p, (0, 1)).divmod(f)[1]
    while e:
        if e & 1:
            result = (result * base).divmod(f)[1]
        base = (base * base).divmod(f)[1]
        e >>= 1
    return result


def in_pr(f: IntPoly, p: int) -> bool:
    """p in Pr(f) without listing roots: for squarefree f mod p, f splits iff f | x^p - x."""
    _require_prime(p)
    fp = PolyModP.from_int_poly(f, p)
    if fp.degree < 1:
        return fp.degree == 0
    if fp.coeffs[0] == 0:
        return False
    if fp.gcd(fp.derivative()).degree > 0:
        return split_over(f, p).in_pr
    xp = _powmod_x(p, fp)
    diff = PolyModP(p, tuple(a - b for a, b in
                             zip(xp.coeffs + (0,) * 2, (0, 1) + (0,) * len(xp.coeffs))))
    return fp.gcd(diff).degree == fp.degree


def mult_order(a: int, p: int) -> int:
    _require_prime(p)
    a %= p
    if a == 0:
        raise ValueError("0 has no multiplicative order")
    order = p - 1
    for q in factorize(p - 1):
        while order % q == 0 and pow(a, order // q, p) == 1:
            order //= q
    return order


def lambda_of(f: IntPoly, p: int) -> int:
    """lcm of the multiplicative orders of the distinct roots of f over F_p."""
    rep = split_over(f, p)
    if not rep.splits:
        raise NotInPrError(f"{f} does not split over F_{p}")
    if rep.has_zero_root:
        raise NotInPrError(f"{f} has a zero root over F_{p}")
    return math.lcm(*(mult_order(r, p) for r in rep.distinct_roots))


def _check_nonzero_constant(polys: Iterable[IntPoly]) -> list[IntPoly]:
    polys = list(polys)
    for f in polys:
        if not f.coeffs or f.coeffs[0] == 0:
            raise ValueError(f"{f} has zero constant term, so Pr is empty")
    return polys


def splitting_primes(polys: Sequence[IntPoly], p_max: int) -> list[int]:
    polys = _check_nonzero_constant(polys)
    out = []
    for p in primes_up_to(p_max):
        if all(in_pr(f, p) for f in polys):
            out.append(p)
    return out


def splitting_density(f: IntPoly, p_max: int) -> Fraction:
    primes = primes_up_to(p_max)
    if not primes:
        return Fraction(0)
    hits = sum(1 for p in primes if in_pr(f, p))
    return Fraction(hits, len(primes))
