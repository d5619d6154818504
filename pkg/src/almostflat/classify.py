"""Virtual nilpotency and nilpotency of Z^n x|_M Z^m, exactly.

``is_roots_of_unity`` strips cyclotomic factors from ch(M) by exact division.
A root of unity of degree <= n over Q has order d with phi(d) <= n, and
phi(d) >= sqrt(d/2) bounds the search by d <= 2n^2.

``lower_central_series`` works in the normal subgroup Z^n: with commuting M_j
the terms are P_2 = <(I - M_j) Z^n> and P_(i+1) = <(I - M_j) P_i>, each
saturated under the M_j so it is a normal subgroup of the whole group.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .exact import (IntMatrix, IntPoly, Lattice, NotUnimodularError, char_poly, full_lattice,
                    hnf, saturate_under)


def euler_phi(d: int) -> int:
    out, m, q = d, d, 2
    while q * q <= m:
        if m % q == 0:
            while m % q == 0:
                m //= q
            out -= out // q
        q += 1
    if m > 1:
        out -= out // m
    return out


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> IntPoly:
    """Phi_d = (x^d - 1) / prod over proper divisors e of Phi_e."""
    if d < 1:
        raise ValueError("cyclotomic index must be positive")
    f = IntPoly((-1,) + (0,) * (d - 1) + (1,))
    for e in range(1, d):
        if d % e == 0:
            f, rem = f.divmod_monic(cyclotomic(e))
            assert rem.is_zero
    return f


def _require_unimodular(m: IntMatrix) -> None:
    if not m.is_unimodular():
        raise NotUnimodularError("matrix is not in GL_n(Z)")


def is_roots_of_unity(m: IntMatrix) -> bool:
    _require_unimodular(m)
    f = char_poly(m)
    n = m.n
    for d in range(1, 2 * n * n + 1):
        if euler_phi(d) > n:
            continue
        phi = cyclotomic(d)
        while f.degree >= phi.degree:
            q, rem = f.divmod_monic(phi)
            if not rem.is_zero:
                break
            f = q
    return f.degree == 0


# -- lower central series ----------------------------------------------------

@dataclass(frozen=True)
class LcsReport:
    """Terms P_2, P_3, ... of the lower central series inside Z^n.

    ``terms`` stops at the first zero term, at stabilisation, or at P_(n+1).
    """

    n: int
    terms: tuple[Lattice, ...]
    stabilised_at: int | None  # index i with P_i = P_(i+1) != 0
    nilpotent: bool

    @property
    def nilpotency_class(self) -> int | None:
        if not self.nilpotent:
            return None
        # terms[-1] is the first zero term P_k, so the class is k - 1
        return len(self.terms)

    @property
    def series(self) -> tuple[Lattice, ...]:
        """Z^n followed by the computed terms."""
        return (full_lattice(self.n),) + self.terms

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [t.to_json() for t in self.terms],
            "stabilised_at": self.stabilised_at,
            "nilpotent": self.nilpotent,
            "class": self.nilpotency_class,
        }


def _check_family(matrices: Sequence[IntMatrix]) -> int:
    if not matrices:
        raise ValueError("need at least one matrix")
    n = matrices[0].n
    for m in matrices:
        if m.n != n:
            raise ValueError("matrices must share a dimension")
        _require_unimodular(m)
    for i, a in enumerate(matrices):
        for b in matrices[i + 1:]:
            if not a.commutes_with(b):
                raise ValueError("matrices must commute pairwise")
    return n


def lower_central_series(matrices: Sequence[IntMatrix]) -> LcsReport:
    n = _check_family(matrices)
    shifts = [IntMatrix.identity(n) - m for m in matrices]
    current = full_lattice(n)
    terms: list[Lattice] = []
    # P_(n+1) = 0 exactly when the group is nilpotent, so n steps suffice
    for _ in range(n):
        gens = [q @ b for q in shifts for b in current.basis]
        nxt = saturate_under(hnf(gens, n), matrices)
        terms.append(nxt)
        if nxt.rank == 0:
            return LcsReport(n, tuple(terms), None, True)
        if nxt == current:
            return LcsReport(n, tuple(terms), len(terms), False)
        current = nxt
    return LcsReport(n, tuple(terms), None, False)


@dataclass(frozen=True)
class Classification:
    virtually_nilpotent: bool
    nilpotent: bool
    witness_matrix_index: int | None  # 1-based, first M_i with a non-root-of-unity eigenvalue
    lcs: LcsReport

    def to_json(self) -> dict:
        return {
            "virtually_nilpotent": self.virtually_nilpotent,
            "nilpotent": self.nilpotent,
            "witness_matrix_index": self.witness_matrix_index,
            "lcs": self.lcs.to_json(),
        }


def classify_zn_by_zm(matrices: Sequence[IntMatrix]) -> Classification:
    lcs = lower_central_series(matrices)
    witness = next((i + 1 for i, m in enumerate(matrices) if not is_roots_of_unity(m)), None)
    return Classification(witness is None, lcs.nilpotent, witness, lcs)
