"""Finite coset spaces G/H with canonical representatives.

Three backing shapes are supported:

* ``TriangularQuotient``: a class <= 2 nilpotent group given by a triangular
  presentation x_1, ..., x_h, with H = {x_1^(q_1 l_1) ... x_h^(q_h l_h)}.
* ``LatticeSemidirectQuotient``: Z^n x|_M Z^m modulo L x| <t_j^(r_j)>.
* ``ZpZrGroup``: the finite group Z_p x| Z_r with t acting by a unit m.

Elements are written in the ambient group's normal coordinates. Cosets are
left cosets gH and the generators act by left multiplication, s.gH, which is
well defined whether or not H is normal. Since S is symmetric this gives the
same diameter as any other convention: (S^n H)^-1 = H S^n.

Every shape has canonical coordinates living in a mixed-radix box
``[0, r_0) x ... x [0, r_k)`` whose volume is the number of cosets, so cosets
can be packed into dense integer codes for the vectorised BFS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact import IntMatrix, Lattice, hnf, is_invariant, lattice_index
from .modp import is_prime, mult_order

Element = tuple[int, ...]


class ShapeError(ValueError):
    pass


class CosetShape:
    """Interface shared by the three backing shapes."""

    kind: str = ""

    @property
    def arity(self) -> int:
        raise NotImplementedError

    @property
    def radices(self) -> tuple[int, ...]:
        raise NotImplementedError

    def coset_count(self) -> int:
        return math.prod(self.radices)

    def identity(self) -> Element:
        return (0,) * self.arity

    def multiply(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def inverse(self, g: Element) -> Element:
        raise NotImplementedError

    def canonicalise(self, g: Sequence[int]) -> Element:
        raise NotImplementedError

    def natural_generators(self) -> list[tuple[str, Element]]:
        raise NotImplementedError

    def subgroup_generators(self) -> list[Element]:
        raise NotImplementedError

    def act_array(self, s: Element, coords: np.ndarray) -> np.ndarray:
        """Canonical coordinates of s.g for each row g of ``coords`` (already canonical)."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def _check_arity(self, g: Sequence[int]) -> None:
        if len(g) != self.arity:
            raise ShapeError(f"expected {self.arity} coordinates, got {len(g)}")

    # mixed-radix packing
    def encode(self, coords: np.ndarray) -> np.ndarray:
        code = np.zeros(coords.shape[0], dtype=np.int64)
        for c, r in enumerate(self.radices):
            code = code * r + coords[:, c]
        return code

    def decode(self, codes: np.ndarray) -> np.ndarray:
        out = np.empty((codes.shape[0], self.arity), dtype=np.int64)
        rest = codes.copy()
        for c in range(self.arity - 1, -1, -1):
            r = self.radices[c]
            out[:, c] = rest % r
            rest //= r
        return out

    def encode_one(self, g: Element) -> int:
        code = 0
        for x, r in zip(g, self.radices):
            code = code * r + x
        return code


# -- triangular class-2 presentations ---------------------------------------

@dataclass(frozen=True, eq=False)
class TriangularQuotient(CosetShape):
    """Class <= 2 group on x_1..x_h modulo H = {x_1^(q_1 l_1) ... x_h^(q_h l_h)}.

    ``commutators`` maps (i, j), 0-based with i < j, to the exponent vector of
    [x_i, x_j] = x_i^-1 x_j^-1 x_i x_j. Every nonzero entry must sit on a
    central generator with index > j.
    """

    h: int
    commutators: dict
    moduli: tuple[int, ...]
    central: tuple[bool, ...] = field(default=())
    kind = "triangular"

    def __post_init__(self):
        h = self.h
        moduli = tuple(int(q) for q in self.moduli)
        if len(moduli) != h or any(q < 1 for q in moduli):
            raise ShapeError("need one positive modulus per generator")
        comm = {}
        for (i, j), vec in self.commutators.items():
            vec = tuple(int(x) for x in vec)
            if not (0 <= i < j < h) or len(vec) != h:
                raise ShapeError(f"bad commutator entry {(i, j)}")
            if any(vec):
                comm[(i, j)] = vec
        touched = {i for pair in comm for i in pair}
        central = tuple(self.central) if self.central else tuple(i not in touched for i in range(h))
        if len(central) != h:
            raise ShapeError("central flags must have length h")
        for (i, j), vec in comm.items():
            if central[i] or central[j]:
                raise ShapeError(f"central generator appears in commutator {(i, j)}")
            for k, c in enumerate(vec):
                if c and (k <= j or not central[k]):
                    raise ShapeError(f"[x_{i+1}, x_{j+1}] must lie in later central generators")
                # H must be closed under multiplication
                if c and (moduli[i] * moduli[j] * c) % moduli[k]:
                    raise ShapeError("moduli do not define a subgroup")
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "commutators", comm)
        object.__setattr__(self, "central", central)
        terms = [(i, j, k, c) for (i, j), vec in comm.items() for k, c in enumerate(vec) if c]
        object.__setattr__(self, "_terms", tuple(terms))

    @property
    def arity(self) -> int:
        return self.h

    @property
    def radices(self) -> tuple[int, ...]:
        return self.moduli

    def _correction(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        # a.b = a + b - sum_{j<i} a_i b_j [x_j, x_i]
        corr = [0] * self.h
        for j, i, k, c in self._terms:
            corr[k] -= a[i] * b[j] * c
        return corr

    def multiply(self, g, h):
        corr = self._correction(g, h)
        return tuple(x + y + z for x, y, z in zip(g, h, corr))

    def inverse(self, g):
        corr = [0] * self.h
        for j, i, k, c in self._terms:
            corr[k] += g[i] * g[j] * c
        return tuple(-x - z for x, z in zip(g, corr))

    def canonicalise(self, g):
        self._check_arity(g)
        q = self.moduli
        rep = [0] * self.h
        mult = [0] * self.h
        for i in range(self.h):
            if not self.central[i]:
                mult[i], rep[i] = divmod(g[i], q[i])
        hpart = [q[i] * mult[i] for i in range(self.h)]
        corr = self._correction(rep, hpart)
        for k in range(self.h):
            if self.central[k]:
                rep[k] = (g[k] - corr[k]) % q[k]
        return tuple(rep)

    def act_array(self, s, coords):
        q = np.asarray(self.moduli, dtype=np.int64)
        g = coords + np.asarray(s, dtype=np.int64)
        for j, i, k, c in self._terms:
            if s[i]:
                g[:, k] -= s[i] * c * coords[:, j]
        mult = np.zeros_like(g)
        for i in range(self.h):
            if not self.central[i]:
                mult[:, i] = g[:, i] // q[i]
                g[:, i] -= mult[:, i] * q[i]
        for j, i, k, c in self._terms:
            # correction of rep . x^(q mult): -rep_i * q_j mult_j * c
            g[:, k] += g[:, i] * q[j] * mult[:, j] * c
        for k in range(self.h):
            if self.central[k]:
                g[:, k] %= q[k]
        return g

    def natural_generators(self):
        gens = [("1", self.identity())]
        for i in range(self.h):
            e = tuple(int(k == i) for k in range(self.h))
            gens.append((f"x{i+1}", e))
            gens.append((f"x{i+1}^-1", self.inverse(e)))
        return gens

    def subgroup_generators(self):
        return [tuple(self.moduli[i] * int(k == i) for k in range(self.h)) for i in range(self.h)]

    def to_json(self):
        comm = [[i + 1, j + 1, k + 1, c] for (i, j), vec in sorted(self.commutators.items())
                for k, c in enumerate(vec) if c]
        return {"shape": "triangular", "h": self.h, "commutators": comm,
                "moduli": list(self.moduli), "central": list(self.central)}


def heisenberg_commutators() -> dict:
    return {(0, 1): (0, 0, 1)}


# -- Z^n x| Z^m modulo L x| <t_j^r_j> -----------------------------------------

@dataclass(frozen=True, eq=False)
class LatticeSemidirectQuotient(CosetShape):
    """Coset space of L x| (r_1 Z x ... x r_m Z) in Z^n x|_{M_1..M_m} Z^m.

    Elements are (v_1..v_n, a_1..a_m) with (v, a)(w, b) = (v + M^a w, a + b).
    """

    matrices: tuple[IntMatrix, ...]
    lattice: Lattice
    torsion: tuple[int, ...]
    kind = "lattice_semidirect"

    def __post_init__(self):
        mats = tuple(self.matrices)
        lat = self.lattice
        torsion = tuple(int(r) for r in self.torsion)
        n = lat.ambient_dim
        if len(torsion) != len(mats):
            raise ShapeError("need one torsion modulus per matrix")
        if any(r < 1 for r in torsion):
            raise ShapeError("torsion moduli must be finite positive integers")
        if not lat.is_full_rank:
            raise ShapeError("vector lattice must have full rank")
        for m in mats:
            if m.n != n:
                raise ShapeError("matrix dimension does not match the lattice")
            if not m.is_unimodular():
                raise ShapeError("matrices must be unimodular")
        for i, a in enumerate(mats):
            for b in mats[i + 1:]:
                if not a.commutes_with(b):
                    raise ShapeError("matrices must commute pairwise")
        if not is_invariant(lat, mats):
            raise ShapeError("lattice is not invariant under the matrices")
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "torsion", torsion)
        object.__setattr__(self, "_inverses", tuple(m.inverse() for m in mats))
        object.__setattr__(self, "_pivots", tuple(lat.basis[i][i] for i in range(n)))

    @property
    def n(self) -> int:
        return self.lattice.ambient_dim

    @property
    def m(self) -> int:
        return len(self.matrices)

    @property
    def arity(self) -> int:
        return self.n + self.m

    @property
    def radices(self) -> tuple[int, ...]:
        return self._pivots + self.torsion

    def coset_count(self) -> int:
        return lattice_index(self.lattice) * math.prod(self.torsion)

    def _power(self, a: Sequence[int]) -> IntMatrix:
        out = IntMatrix.identity(self.n)
        for m, minv, k in zip(self.matrices, self._inverses, a):
            out = out @ ((m if k >= 0 else minv) ** abs(k))
        return out

    def multiply(self, g, h):
        n = self.n
        v, a = g[:n], g[n:]
        w, b = h[:n], h[n:]
        mw = self._power(a) @ w
        return tuple(x + y for x, y in zip(v, mw)) + tuple(x + y for x, y in zip(a, b))

    def inverse(self, g):
        n = self.n
        v, a = g[:n], g[n:]
        neg = tuple(-x for x in a)
        mv = self._power(neg) @ v
        return tuple(-x for x in mv) + neg

    def canonicalise(self, g):
        self._check_arity(g)
        n = self.n
        return self.lattice.reduce(g[:n]) + tuple(x % r for x, r in zip(g[n:], self.torsion))

    def _reduce_array(self, v: np.ndarray) -> np.ndarray:
        basis = np.asarray(self.lattice.basis, dtype=np.int64)
        for i, d in enumerate(self._pivots):
            q = v[:, i] // d
            v -= q[:, None] * basis[i][None, :]
        return v

    def act_array(self, s, coords):
        n = self.n
        v = coords[:, :n]
        a = coords[:, n:].copy()
        shift = s[n:]
        nz = [j for j, k in enumerate(shift) if k]
        if nz:
            mat = np.asarray(self._power(shift).rows, dtype=np.int64)
            v = v @ mat.T
        else:
            v = v.copy()
        v += np.asarray(s[:n], dtype=np.int64)
        v = self._reduce_array(v)
        for j, k in enumerate(shift):
            if k:
                a[:, j] = (a[:, j] + k) % self.torsion[j]
        return np.concatenate([v, a], axis=1)

    def natural_generators(self):
        n, m = self.n, self.m
        gens = [("1", self.identity())]
        for i in range(n):
            e = tuple(int(k == i) for k in range(n)) + (0,) * m
            gens.append((f"e{i+1}", e))
            gens.append((f"e{i+1}^-1", tuple(-x for x in e)))
        for j in range(m):
            t = (0,) * n + tuple(int(k == j) for k in range(m))
            gens.append((f"t{j+1}", t))
            gens.append((f"t{j+1}^-1", tuple(-x for x in t)))
        return gens

    def subgroup_generators(self):
        n, m = self.n, self.m
        gens = [tuple(v) + (0,) * m for v in self.lattice.basis]
        for j, r in enumerate(self.torsion):
            gens.append((0,) * n + tuple(r * int(k == j) for k in range(m)))
        return gens

    def to_json(self):
        return {"shape": "lattice_semidirect",
                "matrices": [m.to_json() for m in self.matrices],
                "lattice": self.lattice.to_json(),
                "torsion": list(self.torsion)}


# -- Z_p x| Z_r ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZpZrGroup(CosetShape):
    """Z_p x| Z_r with (a1, b1)(a2, b2) = (a1 + m^b1 a2, b1 + b2).

    ``translations`` are the Z_p elements used as generators (images of the
    standard basis vectors when the group arises as a quotient of Z^n x| Z).
    """

    p: int
    r: int
    m: int
    translations: tuple[int, ...] = (1,)
    kind = "zpzr"

    def __post_init__(self):
        p, r, m = int(self.p), int(self.r), int(self.m) % int(self.p)
        if not is_prime(p):
            raise ShapeError(f"{p} is not prime")
        if m == 0 or mult_order(m, p) != r:
            raise ShapeError(f"multiplier {m} does not have order {r} mod {p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "translations", tuple(int(t) % p for t in self.translations))
        object.__setattr__(self, "_powers", tuple(pow(m, k, p) for k in range(r)))

    @property
    def arity(self) -> int:
        return 2

    @property
    def radices(self) -> tuple[int, ...]:
        return (self.p, self.r)

    def multiply(self, g, h):
        return (g[0] + pow(self.m, g[1], self.p) * h[0], g[1] + h[1])

    def inverse(self, g):
        b = -g[1]
        return (-pow(self.m, b, self.p) * g[0], b)

    def canonicalise(self, g):
        self._check_arity(g)
        return (g[0] % self.p, g[1] % self.r)

    def act_array(self, s, coords):
        p, r = self.p, self.r
        factor = pow(self.m, s[1], p)
        a = (s[0] + factor * coords[:, 0]) % p
        b = (coords[:, 1] + s[1]) % r
        return np.stack([a, b], axis=1)

    def natural_generators(self):
        gens = [("1", (0, 0))]
        for i, w in enumerate(self.translations):
            gens.append((f"e{i+1}", (w, 0)))
            gens.append((f"e{i+1}^-1", (-w, 0)))
        gens.append(("t", (0, 1)))
        gens.append(("t^-1", (0, -1)))
        return gens

    def subgroup_generators(self):
        return []

    def to_json(self):
        return {"shape": "zpzr", "p": self.p, "r": self.r, "m": self.m,
                "translations": list(self.translations)}


# -- coset spaces -------------------------------------------------------------

@dataclass(frozen=True)
class CosetSpace:
    backing: CosetShape
    generators: tuple[tuple[str, Element], ...]

    def __post_init__(self):
        gens = tuple((str(name), tuple(int(x) for x in g)) for name, g in self.generators)
        ident = self.backing.identity()
        if ident not in {g for _, g in gens}:
            raise ShapeError("generating set must contain the identity")
        elems = {g for _, g in gens}
        for _, g in gens:
            if self.backing.inverse(g) not in elems:
                raise ShapeError(f"generating set is not symmetric: {g} lacks an inverse")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def natural(cls, backing: CosetShape) -> CosetSpace:
        return cls(backing, tuple(backing.natural_generators()))

    @property
    def base(self) -> Element:
        return self.backing.identity()

    @property
    def symbols(self) -> list[str]:
        return [name for name, _ in self.generators]

    def canonicalise(self, g: Sequence[int]) -> Element:
        return self.backing.canonicalise(tuple(g))

    def generator(self, name: str) -> Element:
        for sym, g in self.generators:
            if sym == name:
                return g
        raise KeyError(f"unknown generator {name!r}")

    def apply_generator(self, coset: Element, generator) -> Element:
        s = self.generator(generator) if isinstance(generator, str) else tuple(generator)
        if s not in {g for _, g in self.generators}:
            raise KeyError(f"{s} is not in the generating set")
        return self.backing.canonicalise(self.backing.multiply(s, coset))

    def coset_count(self) -> int:
        return self.backing.coset_count()

    def is_normal(self) -> bool:
        b = self.backing
        ident = b.identity()
        for _, s in self.generators:
            s_inv = b.inverse(s)
            for h in b.subgroup_generators():
                if b.canonicalise(b.multiply(b.multiply(s, h), s_inv)) != ident:
                    return False
        return True

    def to_json(self) -> dict:
        return {**self.backing.to_json(), "generators": self.symbols}


def coset_count(space: CosetSpace) -> int:
    return space.coset_count()


def is_normal(space: CosetSpace) -> bool:
    return space.is_normal()


def canonicalise(space: CosetSpace, raw: Sequence[int]) -> Element:
    return space.canonicalise(raw)


def apply_generator(space: CosetSpace, coset: Element, generator) -> Element:
    return space.apply_generator(coset, generator)


def shape_from_json(data: dict) -> CosetShape:
    kind = data.get("shape")
    if kind == "zpzr":
        return ZpZrGroup(int(data["p"]), int(data["r"]), int(data["m"]),
                         tuple(int(t) for t in data.get("translations", (1,))))
    if kind == "lattice_semidirect":
        mats = tuple(IntMatrix.from_json(m) for m in data["matrices"])
        basis = [tuple(int(x) for x in r) for r in data["lattice"]]
        n = len(basis[0]) if basis else (mats[0].n if mats else 0)
        return LatticeSemidirectQuotient(mats, hnf(basis, n), tuple(int(r) for r in data["torsion"]))
    if kind == "triangular":
        h = int(data["h"])
        comm: dict = {}
        for i, j, k, c in data.get("commutators", []):
            vec = list(comm.get((i - 1, j - 1), [0] * h))
            vec[k - 1] += int(c)
            comm[(i - 1, j - 1)] = vec
        central = tuple(bool(x) for x in data.get("central", ()))
        return TriangularQuotient(h, comm, tuple(int(q) for q in data["moduli"]), central)
    raise ShapeError(f"unknown shape {kind!r}")
