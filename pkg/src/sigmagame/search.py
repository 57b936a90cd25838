"""Exact minimum light numbers.

Unrestricted play reduces to GF(2) linear algebra: the configurations
reachable from x form the coset x + span{N(v) indicator rows}, so the
minimum light number is a coset minimum-weight problem.  Lit-only play is a
directed reachability problem on the 2^n state space; tables come from
value iteration, single queries from forward BFS with predecessor links.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .model import (
    CapExceededError,
    Graph,
    bits_of,
    config_to_string,
    light_number,
    replay_lit,
)

DEFAULT_CAP = 24

_POP16 = None


def _pop16():
    global _POP16
    if _POP16 is None:
        _POP16 = np.array([i.bit_count() for i in range(1 << 16)], dtype=np.uint8)
    return _POP16


def _popcounts(arr: np.ndarray) -> np.ndarray:
    p = _pop16()
    return p[arr & 0xFFFF] + p[arr >> 16]


def _lex_key(x: int, n: int) -> int:
    """Order key matching bitstring order (vertex 1 most significant)."""
    return int(config_to_string(x, n), 2) if n else 0


class NeighborhoodBasis:
    """Reduced GF(2) row basis of a set of tagged bit vectors.

    Each basis row keeps the XOR of the tags (vertex move-sets) that
    produced it, so membership tests come with a generating move-set.
    """

    def __init__(self, n: int, tagged_rows):
        self.n = n
        self._by_pivot = {}
        for vec, tag in tagged_rows:
            self._insert(vec, tag)
        # pivot-descending order; rows carry no other row's pivot (RREF)
        self.rows = [self._by_pivot[p] for p in sorted(self._by_pivot, reverse=True)]

    @classmethod
    def from_graph(cls, g: Graph, vertices=None) -> "NeighborhoodBasis":
        if vertices is None:
            vertices = range(g.n)
        return cls(g.n, ((g.neighbor_masks[v], 1 << v) for v in sorted(vertices)))

    def _insert(self, vec: int, tag: int):
        while vec:
            p = vec.bit_length() - 1
            row = self._by_pivot.get(p)
            if row is None:
                # back-reduce existing rows so every pivot column stays unique
                for q, (rvec, rtag) in list(self._by_pivot.items()):
                    if (rvec >> p) & 1:
                        self._by_pivot[q] = (rvec ^ vec, rtag ^ tag)
                self._by_pivot[p] = (vec, tag)
                return
            vec ^= row[0]
            tag ^= row[1]

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, z: int):
        """Eliminate pivots from z; returns (residue, combining move mask)."""
        moves = 0
        for vec, tag in self.rows:
            if (z >> (vec.bit_length() - 1)) & 1:
                z ^= vec
                moves ^= tag
        return z, moves

    def contains(self, z: int) -> bool:
        return self.reduce(z)[0] == 0

    def decompose(self, z: int):
        """Move mask M with sum of N(v) rows over M equal to z, or None."""
        residue, moves = self.reduce(z)
        return moves if residue == 0 else None

    def coset_rep(self, x: int) -> int:
        """Canonical representative of the coset x + span."""
        return self.reduce(x)[0]


def neighborhood_basis(g: Graph) -> NeighborhoodBasis:
    return NeighborhoodBasis.from_graph(g)


@dataclass(frozen=True)
class MlResult:
    value: int
    witness_config: int
    move_set: tuple


@dataclass(frozen=True)
class MlStarResult:
    value: int
    witness_config: int
    sequence: tuple


def regular_reach_decompose(g: Graph, x: int, y: int):
    """Vertices M with x + sum of N(v) rows over M = y, or None if unreachable."""
    moves = NeighborhoodBasis.from_graph(g).decompose(x ^ y)
    if moves is None:
        return None
    return tuple(bits_of(moves))


def min_coset_member(basis: NeighborhoodBasis, x: int):
    """Lexicographically smallest minimum-weight member of x + span.

    Gray-code sweep over all 2^rank combinations; returns
    (weight, config, move_mask).
    """
    n = basis.n
    rows = basis.rows
    r = len(rows)
    cur, moves = x, 0
    best = (light_number(x), _lex_key(x, n), x, 0)
    for i in range(1, 1 << r):
        j = (i & -i).bit_length() - 1
        vec, tag = rows[j]
        cur ^= vec
        moves ^= tag
        w = light_number(cur)
        if w <= best[0]:
            key = (w, _lex_key(cur, n))
            if key < best[:2]:
                best = (w, key[1], cur, moves)
    return best[0], best[2], best[3]


def ml_regular(g: Graph, x: int, cap: int = DEFAULT_CAP) -> MlResult:
    """Exact minimum light number under unrestricted play, with witness."""
    basis = NeighborhoodBasis.from_graph(g)
    if basis.rank > cap:
        raise CapExceededError(
            f"coset sweep needs 2^{basis.rank} members; cap is 2^{cap}"
        )
    value, config, moves = min_coset_member(basis, x)
    return MlResult(value, config, tuple(bits_of(moves)))


class Reachable:
    """Lit-only reachable set with predecessor links for witness recovery."""

    def __init__(self, start: int, parent: dict):
        self.start = start
        self.parent = parent

    @property
    def states(self):
        return self.parent.keys()

    def __contains__(self, y: int) -> bool:
        return y in self.parent

    def __len__(self) -> int:
        return len(self.parent)

    def witness(self, y: int) -> list:
        """Valid move sequence from start to y."""
        if y not in self.parent:
            raise KeyError(f"state {y} not reachable")
        seq = []
        while self.parent[y] is not None:
            prev, v = self.parent[y]
            seq.append(v)
            y = prev
        seq.reverse()
        return seq


def litonly_reachable(g: Graph, x: int, cap: int = DEFAULT_CAP) -> Reachable:
    """Forward BFS over lit-only moves; explores moves in ascending vertex order."""
    if g.n > cap:
        raise CapExceededError(f"state space 2^{g.n} exceeds cap 2^{cap}")
    masks = g.neighbor_masks
    n = g.n
    parent = {x: None}
    dq = deque([x])
    while dq:
        s = dq.popleft()
        for v in range(n):
            if (s >> v) & 1 and masks[v]:
                t = s ^ masks[v]
                if t not in parent:
                    parent[t] = (s, v)
                    dq.append(t)
    return Reachable(x, parent)


def ml_litonly(g: Graph, x: int, cap: int = DEFAULT_CAP) -> MlStarResult:
    """Exact minimum light number under lit-only play, with a strict witness.

    BFS order with ascending moves; the first state attaining the minimum
    wins, which pins witnesses for golden tests.
    """
    reach = litonly_reachable(g, x, cap)
    best_w = light_number(x)
    best = x
    # dict preserves insertion order = BFS discovery order
    for s in reach.parent:
        w = light_number(s)
        if w < best_w:
            best_w, best = w, s
    return MlStarResult(best_w, best, tuple(reach.witness(best)))


def ml_table(g: Graph, cap: int = DEFAULT_CAP) -> np.ndarray:
    """ML value for every configuration, via per-coset minimum weight."""
    basis = NeighborhoodBasis.from_graph(g)
    if g.n > cap:
        raise CapExceededError(f"table over 2^{g.n} configurations exceeds cap")
    size = 1 << g.n
    idx = np.arange(size, dtype=np.uint32)
    res = idx.copy()
    for vec, _tag in basis.rows:
        p = vec.bit_length() - 1
        bit = (res >> np.uint32(p)) & np.uint32(1)
        res ^= bit * np.uint32(vec)
    uniq, inverse = np.unique(res, return_inverse=True)
    mins = np.full(len(uniq), 255, dtype=np.uint8)
    np.minimum.at(mins, inverse, _popcounts(idx))
    return mins[inverse]


def mlstar_table(g: Graph, cap: int = DEFAULT_CAP) -> np.ndarray:
    """ML* value for every configuration.

    Value iteration from above: start at the light numbers and relax
    through every valid move until nothing changes.  The fixpoint reached
    this way is the minimum light over each state's reachable set,
    independent of sweep order.
    """
    if g.n > cap:
        raise CapExceededError(f"state space 2^{g.n} exceeds cap 2^{cap}")
    n = g.n
    size = 1 << n
    idx = np.arange(size, dtype=np.uint32)
    ml = _popcounts(idx)
    masks = g.neighbor_masks
    succs = []
    for v in range(n):
        if masks[v]:
            bit = (idx >> np.uint32(v)) & np.uint32(1)
            succs.append(idx ^ bit * np.uint32(masks[v]))
    changed = True
    while changed:
        changed = False
        for succ in succs:
            cand = ml[succ]
            if (cand < ml).any():
                np.minimum(ml, cand, out=ml)
                changed = True
    return ml


@dataclass(frozen=True)
class GapProfile:
    """Per-configuration ML/ML* tables plus worst-case aggregates."""

    n: int
    ml: np.ndarray
    mlstar: np.ndarray
    graph_ml: int
    graph_mlstar: int
    max_config_gap: int
    gap_config: int
    ml_config: int
    mlstar_config: int


def gap_profile(g: Graph, cap: int = DEFAULT_CAP) -> GapProfile:
    ml = ml_table(g, cap)
    mls = mlstar_table(g, cap)
    gap = mls.astype(np.int16) - ml.astype(np.int16)
    return GapProfile(
        n=g.n,
        ml=ml,
        mlstar=mls,
        graph_ml=int(ml.max()),
        graph_mlstar=int(mls.max()),
        max_config_gap=int(gap.max()),
        gap_config=int(np.argmax(gap)),  # first = smallest configuration
        ml_config=int(np.argmax(ml)),
        mlstar_config=int(np.argmax(mls)),
    )


def verify_ml_witness(g: Graph, x: int, result: MlResult) -> bool:
    """Replay the regular move set and check the claimed value."""
    y = x
    for v in result.move_set:
        y ^= g.neighbor_mask(v)
    return y == result.witness_config and light_number(y) == result.value


def verify_mlstar_witness(g: Graph, x: int, result: MlStarResult) -> bool:
    """Strict-replay the lit-only witness sequence and check the claimed value."""
    z = replay_lit(g, x, result.sequence, strict=True)
    return z == result.witness_config and light_number(z) == result.value
