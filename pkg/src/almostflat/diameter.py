"""Exact diameters and ball growth of finite coset spaces by layered BFS.

The fast path packs canonical coset coordinates into dense integer codes and
expands whole BFS layers with numpy. ``brute_force_diameter`` is an
independent pure-Python route (repeated set multiplication by S) used as an
oracle in tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .quotients import CosetSpace, Element

DEFAULT_BFS_CAP = 20_000_000


class BfsCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"coset space has {count} cosets, above the BFS cap of {cap}")
        self.count = count
        self.cap = cap


class InconsistentSubgroupError(ValueError):
    pass


@dataclass(frozen=True)
class GrowthProfile:
    ball_sizes: tuple[int, ...]
    coset_count: int

    @property
    def diameter(self) -> int:
        return len(self.ball_sizes) - 1


def _check_cap(space: CosetSpace, cap: int) -> int:
    count = space.coset_count()
    if count > cap:
        raise BfsCapExceeded(count, cap)
    return count


def bfs_profile(space: CosetSpace, cap: int = DEFAULT_BFS_CAP,
                start: Sequence[int] | None = None) -> GrowthProfile:
    """Ball sizes |S^r gH / H| around ``start`` (the base coset by default)."""
    count = _check_cap(space, cap)
    backing = space.backing
    gens = [g for _, g in space.generators if any(g)]
    origin = space.canonicalise(start if start is not None else space.base)
    visited = np.zeros(count, dtype=bool)
    frontier = np.array([backing.encode_one(origin)], dtype=np.int64)
    visited[frontier] = True
    sizes = [1]
    total = 1
    while total < count:
        coords = backing.decode(frontier)
        nbrs = np.concatenate([backing.encode(backing.act_array(s, coords)) for s in gens])
        nbrs = np.unique(nbrs)
        frontier = nbrs[~visited[nbrs]]
        if frontier.size == 0:
            raise RuntimeError("generators do not act transitively on the cosets")
        visited[frontier] = True
        total += int(frontier.size)
        sizes.append(total)
    return GrowthProfile(tuple(sizes), count)


def diameter(space: CosetSpace, cap: int = DEFAULT_BFS_CAP) -> int:
    return bfs_profile(space, cap).diameter


def bfs_witness(space: CosetSpace, target: Sequence[int],
                cap: int = DEFAULT_BFS_CAP) -> list[str]:
    """Shortest word s_1 ... s_k (as symbols) with s_1 ... s_k H = target."""
    count = _check_cap(space, cap)
    backing = space.backing
    named = [(name, g) for name, g in space.generators if any(g)]
    goal = backing.encode_one(space.canonicalise(target))
    origin = backing.encode_one(space.base)
    parent = np.full(count, -1, dtype=np.int64)
    via = np.full(count, -1, dtype=np.int32)
    parent[origin] = origin
    frontier = np.array([origin], dtype=np.int64)
    while parent[goal] < 0:
        coords = backing.decode(frontier)
        new_codes = []
        for idx, (_, s) in enumerate(named):
            nb = backing.encode(backing.act_array(s, coords))
            fresh = parent[nb] < 0
            nb, src = nb[fresh], frontier[fresh]
            nb, first = np.unique(nb, return_index=True)
            parent[nb] = src[first]
            via[nb] = idx
            new_codes.append(nb)
        frontier = np.unique(np.concatenate(new_codes)) if new_codes else frontier[:0]
        if frontier.size == 0:
            raise RuntimeError("target coset is unreachable")
    word = []
    node = goal
    while node != origin:
        word.append(named[via[node]][0])
        node = int(parent[node])
    # walking back from the goal yields the leftmost letter first
    return word


def evaluate_word(space: CosetSpace, word: Sequence[str]) -> Element:
    g = space.base
    for sym in reversed(word):
        g = space.apply_generator(g, sym)
    return g


def brute_force_diameter(space: CosetSpace) -> tuple[int, list[int]]:
    """Diameter and ball sizes by iterating S^(r+1)H = S.(S^r H) on Python sets."""
    backing = space.backing
    gens = [g for _, g in space.generators]
    total = space.coset_count()
    ball = {space.canonicalise(space.base)}
    sizes = [len(ball)]
    while len(ball) < total:
        grown = {backing.canonicalise(backing.multiply(s, g)) for s in gens for g in ball}
        if len(grown) == len(ball):
            raise RuntimeError("ball stopped growing before covering the space")
        ball = grown
        sizes.append(len(ball))
    return len(sizes) - 1, sizes


# -- finite quotient groups and intermediate subgroups ----------------------

class _FiniteQuotient:
    """G/K for normal K, enumerated explicitly."""

    def __init__(self, space: CosetSpace):
        if not space.is_normal():
            raise ValueError("the space G/K must come from a normal subgroup K")
        self.space = space
        self.backing = space.backing
        self.identity = space.canonicalise(space.base)
        self.gens = [g for _, g in space.generators]
        self.elements = sorted(self._enumerate())

    def _enumerate(self) -> set:
        seen = {self.identity}
        todo = [self.identity]
        while todo:
            g = todo.pop()
            for s in self.gens:
                x = self.mul(s, g)
                if x not in seen:
                    seen.add(x)
                    todo.append(x)
        return seen

    def mul(self, a, b):
        return self.backing.canonicalise(self.backing.multiply(a, b))

    def inv(self, a):
        return self.backing.canonicalise(self.backing.inverse(a))

    def ball_with_words(self, radius: int) -> dict:
        words = {self.identity: ()}
        layer = [self.identity]
        names = list(self.space.generators)
        for _ in range(radius):
            nxt = []
            for g in layer:
                for name, s in names:
                    x = self.mul(s, g)
                    if x not in words:
                        words[x] = (name,) + words[g]
                        nxt.append(x)
            layer = nxt
        return words


def _subgroup_elements(q: _FiniteQuotient, in_h: Callable[[Element], bool],
                       checks: int = 200, seed: int = 0) -> list:
    members = [g for g in q.elements if in_h(g)]
    if q.identity not in members:
        raise InconsistentSubgroupError("membership test rejects the identity")
    rng = random.Random(seed)
    for _ in range(checks):
        a, b = rng.choice(members), rng.choice(members)
        if not in_h(q.mul(a, q.inv(b))):
            raise InconsistentSubgroupError("membership test is not closed under a.b^-1")
    return members


def _coset_diameter(q: _FiniteQuotient, members: list) -> int:
    """diam_S(G/H) for H given as a subset of the finite quotient G/K."""
    label = {}
    for g in q.elements:
        if g not in label:
            coset = [q.mul(g, h) for h in members]
            key = min(coset)
            for x in coset:
                label[x] = key
    n_cosets = len(set(label.values()))
    seen = {label[q.identity]}
    layer = [q.identity]
    radius = 0
    while len(seen) < n_cosets:
        nxt = []
        for g in layer:
            for s in q.gens:
                x = q.mul(s, g)
                if label[x] not in seen:
                    seen.add(label[x])
                    nxt.append(x)
        layer = nxt
        radius += 1
    return radius


def induced_generating_set(space_gk: CosetSpace, in_h: Callable[[Element], bool]):
    """T = S^(2 diam_S(G/H) + 1) intersected with H, as (word, element) pairs.

    Returns ``(T, diam_S(G/H))``; elements are canonical representatives in G/K.
    """
    q = _FiniteQuotient(space_gk)
    members = _subgroup_elements(q, in_h)
    d_gh = _coset_diameter(q, members)
    ball = q.ball_with_words(2 * d_gh + 1)
    member_set = set(members)
    gens = [(words, g) for g, words in sorted(ball.items()) if g in member_set]
    return gens, d_gh


@dataclass(frozen=True)
class SandwichResult:
    diam_t_hk: int
    diam_s_gk: int
    diam_s_gh: int
    holds: bool


def sandwich_check(space_gk: CosetSpace, in_h: Callable[[Element], bool],
                   cap: int = DEFAULT_BFS_CAP) -> SandwichResult:
    """diam_T(H/K) <= diam_S(G/K) <= 4 diam_S(G/H) diam_T(H/K)."""
    d_gk = bfs_profile(space_gk, cap).diameter
    q = _FiniteQuotient(space_gk)
    tgens, d_gh = induced_generating_set(space_gk, in_h)
    members = set(g for g in q.elements if in_h(g))
    # BFS in H/K with left multiplication by T
    seen = {q.identity}
    layer = [q.identity]
    d_hk = 0
    while len(seen) < len(members):
        nxt = []
        for g in layer:
            for _, t in tgens:
                x = q.mul(t, g)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        layer = nxt
        d_hk += 1
    first = d_hk <= d_gk
    if d_gh == 0:
        holds = first
    elif d_hk == 0:
        # H = K: the product bound degenerates; G = S^diam(G/H) K directly
        holds = first and d_gk <= d_gh
    else:
        holds = first and d_gk <= 4 * d_gh * d_hk
    return SandwichResult(d_hk, d_gk, d_gh, holds)
