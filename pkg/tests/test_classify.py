import random

import pytest
from hypothesis import given, strategies as st

from almostflat.classify import (classify_zn_by_zm, cyclotomic, euler_phi, is_roots_of_unity,
                                 lower_central_series)
from almostflat.exact import IntMatrix, IntPoly, NotUnimodularError, hnf, is_invariant
from oracles import eigenvalue_moduli_are_one

FIB = IntMatrix(((2, 1), (1, 1)))
ROT = IntMatrix(((0, -1), (1, 0)))
UNI = IntMatrix(((1, 1), (0, 1)))


def companion(coeffs):
    """Companion matrix of the monic polynomial with constant-first ``coeffs``."""
    n = len(coeffs) - 1
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -coeffs[i]
    return IntMatrix(tuple(map(tuple, rows)))


def block_diag(*blocks):
    n = sum(b.n for b in blocks)
    rows = [[0] * n for _ in range(n)]
    at = 0
    for b in blocks:
        for i, r in enumerate(b.rows):
            rows[at + i][at:at + b.n] = r
        at += b.n
    return IntMatrix(tuple(map(tuple, rows)))


def random_unimodular(rng, n, steps=6):
    m = IntMatrix.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        e = [list(r) for r in IntMatrix.identity(n).rows]
        e[i][j] = rng.choice([-2, -1, 1, 2])
        m = m @ IntMatrix(tuple(map(tuple, e)))
    return m


def eigen_oracle(m):
    return eigenvalue_moduli_are_one(m.rows, 1e-6)


def unipotent_oracle(matrices):
    n = matrices[0].n
    return all(not any(any(r) for r in ((m - IntMatrix.identity(n)) ** n).rows) for m in matrices)


TORSION_BLOCKS = [companion(cyclotomic(d).coeffs) for d in (1, 2, 3, 4, 6, 5, 8, 10, 12)]
JORDAN = [IntMatrix(((1,),)), UNI, IntMatrix(((1, 1, 0), (0, 1, 1), (0, 0, 1)))]
HYPERBOLIC = [FIB, IntMatrix(((0, 1), (1, 3))), companion((1, -1, 0, 1)), IntMatrix(((-2, 1), (-1, 0)))]


def battery(count=50, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        pool = TORSION_BLOCKS + JORDAN + (HYPERBOLIC if rng.random() < 0.4 else [])
        blocks, dim = [], 0
        for _ in range(rng.randint(1, 3)):
            b = rng.choice(pool)
            if dim + b.n <= 5:
                blocks.append(b)
                dim += b.n
        if not blocks:
            continue
        m = block_diag(*blocks)
        u = random_unimodular(rng, dim)
        out.append(u @ m @ u.inverse())
    return out


BATTERY = battery()


def test_examples():
    assert is_roots_of_unity(ROT)
    assert is_roots_of_unity(UNI)
    assert not is_roots_of_unity(FIB)
    heis = lower_central_series([IntMatrix(((1, 0), (1, 1)))])
    assert heis.terms[0] == hnf([(0, 1)], 2)
    assert heis.terms[1].rank == 0
    assert heis.nilpotent and heis.nilpotency_class == 2
    ident = lower_central_series([IntMatrix.identity(3)])
    assert ident.terms[0].rank == 0 and ident.nilpotency_class == 1
    rot = classify_zn_by_zm([ROT])
    assert rot.virtually_nilpotent and not rot.nilpotent and rot.witness_matrix_index is None
    fib = classify_zn_by_zm([FIB])
    assert not fib.virtually_nilpotent and fib.witness_matrix_index == 1
    assert fib.lcs.terms == (hnf([(1, 0), (0, 1)], 2),) and fib.lcs.stabilised_at == 1
    mixed = classify_zn_by_zm([IntMatrix.identity(2), FIB])
    assert mixed.witness_matrix_index == 2


def test_invalid_input():
    with pytest.raises(NotUnimodularError):
        is_roots_of_unity(IntMatrix(((2, 0), (0, 1))))
    with pytest.raises(NotUnimodularError):
        classify_zn_by_zm([IntMatrix(((2, 0), (0, 1)))])
    with pytest.raises(ValueError, match="commute"):
        classify_zn_by_zm([UNI, IntMatrix(((1, 0), (1, 1)))])
    with pytest.raises(ValueError):
        classify_zn_by_zm([])


@pytest.mark.parametrize("m", BATTERY, ids=lambda m: str(m.rows))
def test_battery_against_eigenvalue_moduli(m):
    assert m.is_unimodular()
    result = classify_zn_by_zm([m])
    assert result.virtually_nilpotent == eigen_oracle(m)
    assert result.nilpotent == unipotent_oracle([m])


def test_battery_is_mixed():
    flags = [eigen_oracle(m) for m in BATTERY]
    assert any(flags) and not all(flags)
    assert any(unipotent_oracle([m]) for m in BATTERY)


@pytest.mark.parametrize("m", BATTERY[:20], ids=lambda m: str(m.rows))
def test_series_is_a_descending_chain_of_invariant_lattices(m):
    lcs = lower_central_series([m])
    chain = lcs.series
    assert len(lcs.terms) <= m.n
    for big, small in zip(chain, chain[1:]):
        assert all(v in big for v in small.basis)
        assert is_invariant(small, [m])
    if lcs.stabilised_at is not None:
        assert lcs.terms[-1] == chain[-2]


@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 3))
def test_commuting_unipotent_families_are_nilpotent(seed, n, m):
    rng = random.Random(seed)
    # polynomials without constant term in one strictly upper triangular N commute
    nil = IntMatrix(tuple(tuple(rng.randint(-3, 3) if j > i else 0 for j in range(n))
                          for i in range(n)))
    family = []
    for _ in range(m):
        acc, power = IntMatrix.identity(n), IntMatrix.identity(n)
        for _ in range(n):
            power = power @ nil
            k = rng.randint(-2, 2)
            acc = acc + IntMatrix(tuple(tuple(k * x for x in r) for r in power.rows))
        family.append(acc)
    u = random_unimodular(rng, n)
    family = [u @ f @ u.inverse() for f in family]
    result = classify_zn_by_zm(family)
    assert result.nilpotent and result.virtually_nilpotent
    assert result.lcs.terms[-1].rank == 0
    assert result.lcs.nilpotency_class <= n


def test_cyclotomic_polynomials():
    assert cyclotomic(1) == IntPoly((-1, 1))
    assert cyclotomic(6) == IntPoly((1, -1, 1))
    assert cyclotomic(12) == IntPoly((1, 0, -1, 0, 1))
    for d in range(1, 40):
        assert cyclotomic(d).degree == euler_phi(d)
    with pytest.raises(ValueError):
        cyclotomic(0)
    # x^n - 1 is the product of Phi_d over d | n
    prod = IntPoly((1,))
    for d in (1, 2, 3, 4, 6, 12):
        prod = prod * cyclotomic(d)
    assert prod == IntPoly((-1,) + (0,) * 11 + (1,))
