"""Builders for the concrete subgroup families and their coset spaces.

Heisenberg group
    Normal coordinates (a, b, c) stand for x^a y^b z^c with z = [x, y] central.
    ``to_matrix``/``from_matrix`` convert to the unitriangular matrix entries
    (row 1: a, c; row 2: b).

Z^n x|_M Z
    ``build_av`` picks the eigenvalue of M mod p with the largest multiplicative
    order, a last generalised eigenvector v for it, and an M-invariant
    hyperplane avoiding v; the lattice A_v is the preimage of that hyperplane,
    so it has index p and M acts on Z^n / A_v = Z_p as multiplication by the
    eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .eigenp import MatModP, joint_splitting, kernel
from .exact import IntMatrix, IntPoly, Lattice, char_poly, hnf
from .modp import NotInPrError, NotPrimeError, in_pr, is_prime, mult_order, primes_up_to, split_over
from .quotients import (CosetSpace, LatticeSemidirectQuotient, ShapeError,
                        TriangularQuotient, ZpZrGroup, heisenberg_commutators)


# -- Heisenberg ---------------------------------------------------------------

HEISENBERG_SYMBOLS = ("x", "y", "z")


def to_matrix(g: Sequence[int]) -> tuple[int, int, int]:
    a, b, c = g
    return (a, b, c + a * b)


def from_matrix(g: Sequence[int]) -> tuple[int, int, int]:
    a, b, c = g
    return (a, b, c - a * b)


def heisenberg_space(moduli: Sequence[int]) -> CosetSpace:
    """H / {x^(q1 l1) y^(q2 l2) z^(q3 l3)} with S = {x, y, z}^(+-1) plus the identity."""
    shape = TriangularQuotient(3, heisenberg_commutators(), tuple(moduli), (False, False, True))
    gens = [("1", (0, 0, 0))]
    for i, sym in enumerate(HEISENBERG_SYMBOLS):
        e = tuple(int(k == i) for k in range(3))
        gens.append((sym, e))
        gens.append((f"{sym}^-1", shape.inverse(e)))
    return CosetSpace(shape, tuple(gens))


def heisenberg_Kp(p: int) -> CosetSpace:
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    return heisenberg_space((p, p, p))


def heisenberg_Hn(n: int) -> CosetSpace:
    if n < 1:
        raise ValueError("n must be a positive integer")
    return heisenberg_space((n, n, n * n))


def heisenberg_product(word: Sequence[str]) -> tuple[int, int, int]:
    """Multiply out a word in x, y, z (and inverses) in the infinite group."""
    shape = TriangularQuotient(3, heisenberg_commutators(), (1, 1, 1), (False, False, True))
    g = (0, 0, 0)
    for sym in word:
        base, _, inv = sym.partition("^")
        if base == "1":
            continue
        e = tuple(int(k == HEISENBERG_SYMBOLS.index(base)) for k in range(3))
        if inv:
            e = shape.inverse(e)
        g = shape.multiply(g, e)
    return g


def short_central_word(c: int, n: int) -> list[str]:
    """Word for z^c of length <= 6n, via c = c0 + c1 n and z^c = [x^c0, y][x^c1, y^n]."""
    if n < 1 or not 0 <= c < n * n:
        raise ValueError(f"need 0 <= c < n^2, got c={c}, n={n}")
    c1, c0 = divmod(c, n)
    word: list[str] = []
    for k, ell in ((c0, 1), (c1, n)):
        if k == 0:
            continue
        # [x^k, y^l] = x^-k y^-l x^k y^l = z^(kl)
        word += ["x^-1"] * k + ["y^-1"] * ell + ["x"] * k + ["y"] * ell
    return word


# -- A_v and the Gamma_p family ------------------------------------------------

@dataclass(frozen=True)
class AvResult:
    p: int
    lattice: Lattice
    eigenvalue: int
    order: int
    vector: tuple[int, ...]
    functional: tuple[int, ...]  # phi with kernel A_v / pZ^n and phi(v) = 1
    eigenvalues: tuple[int, ...]  # eigenvalue of each family member on v
    distinct: bool  # ch(M_1) has distinct roots mod p

    def project(self, w: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.functional, w)) % self.p


def largest_order_eigenvalue(m: IntMatrix, p: int) -> tuple[int, int, bool]:
    """(eigenvalue, its order, distinct-roots flag); requires p in Pr(ch(M))."""
    f = char_poly(m)
    rep = split_over(f, p)
    if not rep.splits:
        raise NotInPrError(f"ch(M) = {f} does not split over F_{p}")
    if rep.has_zero_root:
        raise NotInPrError(f"ch(M) = {f} has a zero root over F_{p}")
    best = None
    for lam in rep.distinct_roots:  # ascending, so ties keep the smallest
        order = mult_order(lam, p)
        if best is None or order > best[1]:
            best = (lam, order)
    return best[0], best[1], rep.distinct


def build_av(matrices: IntMatrix | Sequence[IntMatrix], p: int) -> AvResult:
    """A_v for M (or for a commuting family, using a shared last eigenvector)."""
    mats = [matrices] if isinstance(matrices, IntMatrix) else list(matrices)
    lam, order, distinct = largest_order_eigenvalue(mats[0], p)
    for extra in mats[1:]:
        rep = split_over(char_poly(extra), p)
        if not rep.in_pr:
            raise NotInPrError(f"ch(M_i) is not split with nonzero roots over F_{p}")
    n = mats[0].n
    split = joint_splitting([MatModP.from_int(m, p) for m in mats], lam)
    pe = [[p * int(i == j) for j in range(n)] for i in range(n)]
    lattice = hnf(list(split.hyperplane) + pe, n)
    w = kernel(split.hyperplane, n, p)[0]
    scale = pow(sum(a * b for a, b in zip(w, split.vector)) % p, -1, p)
    phi = tuple(x * scale % p for x in w)
    return AvResult(p, lattice, lam, order, split.vector, phi, split.eigenvalues, distinct)


def gamma_translations(av: AvResult) -> tuple[int, ...]:
    n = av.lattice.ambient_dim
    return tuple(av.project([int(i == j) for j in range(n)]) for i in range(n))


def build_gamma(m: IntMatrix, p: int, variant: str = "ord", form: str = "zpzr",
                av: AvResult | None = None) -> CosetSpace:
    """Coset space of H_p = A_p x| rZ in Z^n x|_M Z, r = ord_p(lambda) or 1.

    ``form="zpzr"`` returns the quotient group Z_p x| Z_r (variant "ord" only);
    ``form="lattice"`` returns the same coset space in lattice coordinates.
    """
    if av is None:
        av = build_av(m, p)
    if variant not in ("ord", "1"):
        raise ValueError(f"variant must be 'ord' or '1', got {variant!r}")
    r = av.order if variant == "ord" else 1
    if form == "zpzr" and variant == "ord":
        return CosetSpace.natural(ZpZrGroup(p, r, av.eigenvalue, gamma_translations(av)))
    return CosetSpace.natural(LatticeSemidirectQuotient((m,), av.lattice, (r,)))


def extend_to_zm(space: CosetSpace, extra: Sequence[IntMatrix]) -> CosetSpace:
    """Coset space of H' = H x| <t_2, ..., t_m> in Z^n x| Z^m."""
    base = space.backing
    if not isinstance(base, LatticeSemidirectQuotient):
        raise ShapeError("extend_to_zm needs a lattice-form coset space")
    if not extra:
        return space
    shape = LatticeSemidirectQuotient(tuple(base.matrices) + tuple(extra), base.lattice,
                                      tuple(base.torsion) + (1,) * len(extra))
    return CosetSpace.natural(shape)


# -- family specifications ----------------------------------------------------

FAMILY_KINDS = ("heis_quotients", "heis_cosets", "zn_by_z", "zn_by_zm")
VARIANTS = ("ord", "1", "both")


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    limit: int  # p_max or n_max
    matrices: tuple[IntMatrix, ...] = ()
    variant: str = "ord"

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.limit < 1:
            raise ValueError("parameter range must be positive")
        if self.kind in ("zn_by_z", "zn_by_zm"):
            if not self.matrices:
                raise ValueError(f"{self.kind} needs matrices")
            if self.kind == "zn_by_z" and len(self.matrices) != 1:
                raise ValueError("zn_by_z takes exactly one matrix")
            for m in self.matrices:
                if not m.is_unimodular():
                    raise ValueError("matrices must be unimodular")
            for i, a in enumerate(self.matrices):
                for b in self.matrices[i + 1:]:
                    if not a.commutes_with(b):
                        raise ValueError("matrices must commute pairwise")

    @classmethod
    def from_json(cls, data: dict) -> FamilySpec:
        kind = data["kind"]
        if kind == "heis_quotients":
            return cls(kind, int(data["p_max"]))
        if kind == "heis_cosets":
            return cls(kind, int(data["n_max"]))
        if "matrix" in data:
            mats = (IntMatrix.from_json(data["matrix"]),)
        else:
            mats = tuple(IntMatrix.from_json(m) for m in data["matrices"])
        return cls(kind, int(data["p_max"]), mats, str(data.get("variant", "ord")))

    def to_json(self) -> dict:
        if self.kind == "heis_quotients":
            return {"kind": self.kind, "p_max": self.limit}
        if self.kind == "heis_cosets":
            return {"kind": self.kind, "n_max": self.limit}
        out = {"kind": self.kind, "p_max": self.limit, "variant": self.variant}
        if self.kind == "zn_by_z":
            out["matrix"] = self.matrices[0].to_json()
        else:
            out["matrices"] = [m.to_json() for m in self.matrices]
        return out

    def parameters(self) -> list[int]:
        if self.kind == "heis_quotients":
            return list(primes_up_to(self.limit))
        if self.kind == "heis_cosets":
            return list(range(1, self.limit + 1))
        polys: list[IntPoly] = [char_poly(m) for m in self.matrices]
        return [p for p in primes_up_to(self.limit)
                if all(in_pr(f, p) for f in polys)]

    def variants(self) -> tuple[str, ...]:
        if self.kind in ("heis_quotients", "heis_cosets"):
            return ("-",)
        return ("ord", "1") if self.variant == "both" else (self.variant,)

    def member(self, param: int, variant: str) -> CosetSpace:
        if self.kind == "heis_quotients":
            return heisenberg_Kp(param)
        if self.kind == "heis_cosets":
            return heisenberg_Hn(param)
        m1 = self.matrices[0]
        if self.kind == "zn_by_z":
            return build_gamma(m1, param, variant)
        av = build_av(self.matrices, param)
        base = build_gamma(m1, param, variant, form="lattice", av=av)
        return extend_to_zm(base, self.matrices[1:])

    def members(self) -> Iterator[tuple[int, str]]:
        for p in self.parameters():
            for v in self.variants():
                yield p, v
