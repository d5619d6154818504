"""Eigenspaces, generalised eigenspaces and last generalised eigenvectors over F_p.

Subspaces are always held as reduced row-echelon bases (rows sorted by pivot
column), so every "first vector" choice below is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exact import IntMatrix, char_poly
from .modp import split_over

Vec = tuple[int, ...]


class NotSplitError(ValueError):
    pass


class NotCommutingError(ValueError):
    pass


@dataclass(frozen=True)
class MatModP:
    p: int
    rows: tuple[Vec, ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) % self.p for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("MatModP must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_int(cls, m: IntMatrix, p: int) -> MatModP:
        return cls(p, m.rows)

    @classmethod
    def identity(cls, n: int, p: int) -> MatModP:
        return cls(p, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def apply(self, v: Sequence[int]) -> Vec:
        p = self.p
        return tuple(sum(a * b for a, b in zip(r, v)) % p for r in self.rows)

    def __matmul__(self, other: MatModP) -> MatModP:
        cols = list(zip(*other.rows))
        return MatModP(self.p, tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                                     for r in self.rows))

    def shift(self, lam: int) -> MatModP:
        """A - lam*I."""
        return MatModP(self.p, tuple(tuple(x - lam * (i == j) for j, x in enumerate(r))
                                     for i, r in enumerate(self.rows)))

    def __pow__(self, k: int) -> MatModP:
        out = MatModP.identity(self.n, self.p)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def lift(self) -> IntMatrix:
        return IntMatrix(self.rows)


@dataclass(frozen=True)
class EigenData:
    eigenvalue: int
    eigenspace_basis: tuple[Vec, ...]
    gen_eigenspace_basis: tuple[Vec, ...]


# -- linear algebra helpers ---------------------------------------------------

def rref(vectors: Sequence[Sequence[int]], p: int) -> tuple[Vec, ...]:
    """Reduced row-echelon basis of the span of ``vectors``."""
    rows = [[x % p for x in v] for v in vectors]
    out: list[list[int]] = []
    if not rows:
        return ()
    n = len(rows[0])
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    out = rows[:r]
    return tuple(tuple(v) for v in out)


def kernel(rows: Sequence[Sequence[int]], ncols: int, p: int) -> tuple[Vec, ...]:
    """Echelon basis of {x in F_p^ncols : r.x = 0 for every row r}."""
    red = rref(rows, p) if rows else ()
    pivcols = [next(j for j, x in enumerate(r) if x) for r in red]
    basis = []
    for f in (j for j in range(ncols) if j not in pivcols):
        v = [0] * ncols
        v[f] = 1
        for r, pc in zip(red, pivcols):
            v[pc] = (-r[f]) % p
        basis.append(v)
    return rref(basis, p)


def nullspace(m: MatModP) -> tuple[Vec, ...]:
    return kernel(m.rows, m.n, m.p)


def in_span(v: Sequence[int], basis: Sequence[Vec], p: int) -> bool:
    w = [x % p for x in v]
    for b in basis:
        col = next(j for j, x in enumerate(b) if x)
        if w[col]:
            f = w[col]
            w = [(a - f * c) % p for a, c in zip(w, b)]
    return not any(w)


def _subspace_kernel(m: MatModP, basis: Sequence[Vec]) -> tuple[Vec, ...]:
    """Echelon basis of {w in span(basis) : m w = 0}."""
    p = m.p
    if not basis:
        return ()
    images = [m.apply(b) for b in basis]
    coeffs = kernel([list(col) for col in zip(*images)], len(basis), p)
    n = len(basis[0])
    vecs = [tuple(sum(c * b[j] for c, b in zip(cs, basis)) % p for j in range(n))
            for cs in coeffs]
    return rref(vecs, p)


def eigenvalues(a: MatModP) -> tuple[int, ...]:
    """Distinct eigenvalues (ascending); raises NotSplitError if ch(A) does not split."""
    rep = split_over(char_poly(a.lift()), a.p)
    if not rep.splits:
        raise NotSplitError(f"characteristic polynomial does not split over F_{a.p}")
    return rep.distinct_roots


def generalized_eigenspace(a: MatModP, lam: int) -> tuple[Vec, ...]:
    return nullspace(a.shift(lam) ** a.n)


def eigen_decompose(a: MatModP) -> list[EigenData]:
    out = []
    for lam in eigenvalues(a):
        out.append(EigenData(lam, nullspace(a.shift(lam)), generalized_eigenspace(a, lam)))
    return out


def last_generalized_eigenvector(a: MatModP, lam: int) -> Vec:
    p = a.p
    lam %= p
    if not nullspace(a.shift(lam)):
        raise ValueError(f"{lam} is not an eigenvalue mod {p}")
    ge = generalized_eigenspace(a, lam)
    image = rref([a.shift(lam).apply(g) for g in ge], p)
    return next(g for g in ge if not in_span(g, image, p))


def is_last_generalized_eigenvector(a: MatModP, lam: int, v: Sequence[int]) -> bool:
    """Checks the definition directly: v in GE_lam and (A - lam I)u = v unsolvable in GE_lam."""
    p = a.p
    if not any(x % p for x in v):
        return False
    ge = generalized_eigenspace(a, lam)
    if not in_span(v, ge, p):
        return False
    image = rref([a.shift(lam).apply(g) for g in ge], p)
    return not in_span(v, image, p)


# -- commuting families -------------------------------------------------------

@dataclass(frozen=True)
class JointSplitting:
    """A shared last generalised eigenvector together with an invariant complement.

    ``hyperplane`` spans an F_p-subspace of codimension 1, invariant under every
    matrix in the family, that does not contain ``vector``.
    """

    vector: Vec
    eigenvalues: tuple[int, ...]
    hyperplane: tuple[Vec, ...]


def _check_family(family: Sequence[MatModP]) -> None:
    if not family:
        raise ValueError("empty matrix family")
    p, n = family[0].p, family[0].n
    for a in family:
        if a.p != p or a.n != n:
            raise ValueError("family members must share modulus and dimension")
    for i, a in enumerate(family):
        for b in family[i + 1:]:
            if a @ b != b @ a:
                raise NotCommutingError("family does not commute mod p")


def joint_splitting(family: Sequence[MatModP], lam1: int) -> JointSplitting:
    _check_family(family)
    p, n = family[0].p, family[0].n
    lam1 %= p
    spectra = [eigenvalues(a) for a in family]
    if lam1 not in spectra[0]:
        raise ValueError(f"{lam1} is not an eigenvalue of the first matrix mod {p}")

    # joint generalised eigenspace inside GE_lam1(A_1)
    mus = [lam1]
    joint = generalized_eigenspace(family[0], lam1)
    for a, spec in zip(family[1:], spectra[1:]):
        for mu in spec:
            cut = _subspace_kernel(a.shift(mu) ** n, joint)
            if cut:
                mus.append(mu)
                joint = cut
                break

    # span of the nilpotent parts acting on the joint space is proper
    images = rref([a.shift(mu).apply(w) for a, mu in zip(family, mus) for w in joint], p)
    v = next(w for w in joint if not in_span(w, images, p))

    # invariant complement of the joint space: sum of GE_mu(A_i) over mu != mu_i
    others = []
    for a, spec, mu in zip(family, spectra, mus):
        for other in spec:
            if other != mu:
                others.extend(generalized_eigenspace(a, other))
    hyper = list(images) + list(rref(others, p))
    chosen = rref(hyper, p)
    for w in joint:
        if not in_span(w, rref(list(chosen) + [v], p), p):
            chosen = rref(list(chosen) + [w], p)
    if len(chosen) != n - 1:
        raise ArithmeticError("failed to build an invariant hyperplane")
    return JointSplitting(v, tuple(mus), chosen)


def common_last_eigenvector(family: Sequence[MatModP], lam1: int) -> tuple[Vec, tuple[int, ...]]:
    split = joint_splitting(family, lam1)
    return split.vector, split.eigenvalues
