"""Exact integer linear algebra: matrices, monic polynomials and lattices in Z^n.

Everything here works on Python ints, so entries never overflow. Lattices are
stored in row Hermite normal form (upper triangular, positive pivots, entries
above a pivot reduced into ``[0, pivot)``), which makes equality of lattices a
plain comparison of their stored bases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[int, ...]


class NotUnimodularError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[Vector, ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("IntMatrix must be square with dimension >= 1")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> IntMatrix:
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            cols = list(zip(*other.rows))
            return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                                   for r in self.rows))
        return tuple(sum(a * b for a, b in zip(r, other)) for r in self.rows)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        return IntMatrix(tuple(tuple(a + b for a, b in zip(r, s))
                               for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return IntMatrix(tuple(tuple(a - b for a, b in zip(r, s))
                               for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(tuple(tuple(-a for a in r) for r in self.rows))

    def __pow__(self, k: int) -> IntMatrix:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = IntMatrix.identity(self.n), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> IntMatrix:
        return IntMatrix(tuple(zip(*self.rows)))

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.n))

    def det(self) -> int:
        return bareiss_det([list(r) for r in self.rows])

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1

    def inverse(self) -> IntMatrix:
        """Inverse of a unimodular matrix; raises NotUnimodularError otherwise."""
        n = self.n
        d = self.det()
        if abs(d) != 1:
            raise NotUnimodularError(f"matrix has determinant {d}, not +-1")
        aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
               for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next(i for i in range(c, n) if aug[i][c] != 0)
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [x / pv for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != 0:
                    f = aug[i][c]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
        return IntMatrix(tuple(tuple(int(x) for x in r[n:]) for r in aug))

    def commutes_with(self, other: IntMatrix) -> bool:
        return self @ other == other @ self

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> IntMatrix:
        return cls(tuple(tuple(int(x) for x in r) for r in data))


def bareiss_det(a: list[list[int]]) -> int:
    """Fraction-free determinant (Bareiss); destroys ``a``."""
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, coefficients stored constant term first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> IntPoly:
        f = cls((1,))
        for r in roots:
            f = f * cls((-r, 1))
        return f

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial has degree -1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return self.lead == 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: IntPoly) -> IntPoly:
        a, b = self.coeffs, other.coeffs
        m = max(len(a), len(b))
        return IntPoly(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                             for i in range(m)))

    def __neg__(self) -> IntPoly:
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: IntPoly) -> IntPoly:
        return self + (-other)

    def __mul__(self, other: IntPoly) -> IntPoly:
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPoly(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return IntPoly(tuple(out))

    def __pow__(self, k: int) -> IntPoly:
        out = IntPoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> IntPoly:
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def divmod_monic(self, divisor: IntPoly) -> tuple[IntPoly, IntPoly]:
        """Division by a monic polynomial, exact over Z."""
        if not divisor.is_monic():
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        d = divisor.degree
        if len(rem) - 1 < d:
            return IntPoly(()), self
        quot = [0] * (len(rem) - d)
        for k in range(len(rem) - 1 - d, -1, -1):
            q = rem[k + d]
            quot[k] = q
            if q:
                for i, c in enumerate(divisor.coeffs):
                    rem[k + i] -= q * c
        return IntPoly(tuple(quot)), IntPoly(tuple(rem[:d]))

    def to_string(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                body = mono if a == 1 else f"{a}{mono}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += sign + body
        return out

    def __str__(self) -> str:
        return self.to_string()


X = IntPoly((0, 1))


def char_poly(m: IntMatrix) -> IntPoly:
    """det(xI - M) by Faddeev-LeVerrier; every division below is exact over Z."""
    n = m.n
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    aux = IntMatrix(tuple((0,) * n for _ in range(n)))
    ident = IntMatrix.identity(n)
    for k in range(1, n + 1):
        c = coeffs[n - k + 1]
        aux = m @ aux + IntMatrix(tuple(tuple(c * x for x in r) for r in ident.rows))
        t = (m @ aux).trace()
        if t % k:
            raise ArithmeticError("non-exact Faddeev-LeVerrier step")
        coeffs[n - k] = -t // k
    return IntPoly(tuple(coeffs))


def companion(f: IntPoly) -> IntMatrix:
    """Companion matrix of a monic polynomial; its characteristic polynomial is f."""
    if not f.is_monic() or f.degree < 1:
        raise ValueError("companion matrix needs a monic polynomial of degree >= 1")
    n = f.degree
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -f.coeffs[i]
    return IntMatrix(tuple(tuple(r) for r in rows))


def sylvester_matrix(f: IntPoly, g: IntPoly) -> list[list[int]]:
    m, n = f.degree, g.degree
    size = m + n
    fh, gh = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    rows = []
    for i in range(n):
        rows.append([0] * i + fh + [0] * (size - i - len(fh)))
    for i in range(m):
        rows.append([0] * i + gh + [0] * (size - i - len(gh)))
    return rows


def resultant(f: IntPoly, g: IntPoly) -> int:
    if f.is_zero or g.is_zero:
        raise ValueError("resultant of a zero polynomial is undefined")
    return bareiss_det(sylvester_matrix(f, g))


# -- polynomials over Q, used for gcd-based checks ---------------------------

def _qstrip(a: list[Fraction]) -> list[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _qdivmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(_qstrip(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] -= c * bc
    return q, a


def gcd_over_q(f: IntPoly, g: IntPoly) -> tuple[Fraction, ...]:
    """Monic gcd over Q, coefficients constant term first (``()`` for gcd(0,0))."""
    a = [Fraction(c) for c in f.coeffs]
    b = [Fraction(c) for c in g.coeffs]
    while b:
        _, r = _qdivmod(a, b)
        a, b = b, _qstrip(r)
    if not a:
        return ()
    lead = a[-1]
    return tuple(c / lead for c in a)


# -- lattices -----------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    ambient_dim: int
    basis: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    def pivots(self) -> list[tuple[int, int]]:
        """(column, value) of each row's leading entry."""
        out = []
        for row in self.basis:
            col = next(j for j, x in enumerate(row) if x)
            out.append((col, row[col]))
        return out

    def reduce(self, v: Sequence[int]) -> Vector:
        """Canonical representative of v + L (pivot coordinates in [0, pivot))."""
        w = list(v)
        for row, (col, piv) in zip(self.basis, self.pivots()):
            q = w[col] // piv
            if q:
                for j in range(col, self.ambient_dim):
                    w[j] -= q * row[j]
        return tuple(w)

    def __contains__(self, v) -> bool:
        w = list(v)
        for row, (col, piv) in zip(self.basis, self.pivots()):
            if any(w[:col]):
                return False
            q, r = divmod(w[col], piv)
            if r:
                return False
            for j in range(col, self.ambient_dim):
                w[j] -= q * row[j]
        return not any(w)

    def contains_lattice(self, other: Lattice) -> bool:
        return all(v in self for v in other.basis)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.basis]

    @classmethod
    def from_json(cls, data, ambient_dim: int | None = None) -> Lattice:
        vecs = [tuple(int(x) for x in r) for r in data]
        if ambient_dim is None:
            if not vecs:
                raise ValueError("ambient dimension needed for an empty lattice")
            ambient_dim = len(vecs[0])
        return hnf(vecs, ambient_dim)


def hnf(generators: Iterable[Sequence[int]], ambient_dim: int) -> Lattice:
    """Row Hermite normal form of the subgroup of Z^n spanned by ``generators``."""
    rows = []
    for v in generators:
        v = [int(x) for x in v]
        if len(v) != ambient_dim:
            raise ValueError(f"vector {v} does not have length {ambient_dim}")
        if any(v):
            rows.append(v)
    r = 0
    for col in range(ambient_dim):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col]]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[best] = rows[best], rows[r]
            piv_row = rows[r]
            piv = piv_row[col]
            clean = True
            for i in range(r + 1, len(rows)):
                x = rows[i][col]
                if x:
                    q = x // piv
                    row = rows[i]
                    for j in range(col, ambient_dim):
                        row[j] -= q * piv_row[j]
                    if row[col]:
                        clean = False
            rows = rows[:r + 1] + [row for row in rows[r + 1:] if any(row)]
            if clean:
                break
        if r >= len(rows) or rows[r][col] == 0:
            continue
        if rows[r][col] < 0:
            rows[r] = [-x for x in rows[r]]
        piv_row, piv = rows[r], rows[r][col]
        for i in range(r):
            q = rows[i][col] // piv
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], piv_row)]
        r += 1
    return Lattice(ambient_dim, tuple(tuple(row) for row in rows[:r]))


def full_lattice(n: int) -> Lattice:
    return Lattice(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def scaled_lattice(n: int, k: int) -> Lattice:
    return hnf([[k * int(i == j) for j in range(n)] for i in range(n)], n)


def lattice_index(lat: Lattice) -> int | float:
    """[Z^n : L], or ``math.inf`` when L is not of full rank."""
    if not lat.is_full_rank:
        return math.inf
    return math.prod(piv for _, piv in lat.pivots())


def image_lattice(lat: Lattice, m: IntMatrix) -> Lattice:
    return hnf([m @ v for v in lat.basis], lat.ambient_dim)


def is_invariant(lat: Lattice, matrices: Iterable[IntMatrix]) -> bool:
    return all((m @ v) in lat for m in matrices for v in lat.basis)


def saturate_under(lat: Lattice, matrices: Sequence[IntMatrix]) -> Lattice:
    """Smallest lattice containing ``lat`` and closed under every matrix and its inverse."""
    acting = []
    for m in matrices:
        if m.n != lat.ambient_dim:
            raise ValueError("matrix dimension does not match the lattice")
        acting.append(m)
        acting.append(m.inverse())  # raises NotUnimodularError
    current = lat
    while True:
        gens = list(current.basis) + [m @ v for m in acting for v in current.basis]
        nxt = hnf(gens, lat.ambient_dim)
        if nxt == current:
            return current
        current = nxt


def op_norm_upper_bound(m: IntMatrix) -> Fraction:
    """Certified B >= ||M||_2: ceil(sqrt(||M||_1 * ||M||_inf))."""
    norm1 = max(sum(abs(m[i, j]) for i in range(m.n)) for j in range(m.n))
    norm_inf = max(sum(abs(x) for x in row) for row in m.rows)
    prod = norm1 * norm_inf
    root = math.isqrt(prod)
    if root * root < prod:
        root += 1
    return Fraction(root)
