"""Graphs with loops, on/off configurations, and sigma-game move semantics.

Configurations are plain ints used as bit vectors: bit i is the state of
vertex i (vertices are 0-based internally, 1-based in instance files).
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property


class SigmaGameError(Exception):
    """Base class for errors raised by this package."""


class FormatError(SigmaGameError):
    """Malformed instance text."""


class ShapeError(SigmaGameError):
    """Graph does not match the shape an operation requires."""


class CapExceededError(SigmaGameError):
    """Instance too large for an exact sweep; raise the cap explicitly."""


class InvalidMoveError(SigmaGameError):
    """Strict replay hit a lit-only move at an off vertex."""

    def __init__(self, index: int, vertex: int):
        super().__init__(
            f"invalid lit-only move at sequence index {index}: vertex {vertex + 1} is off"
        )
        self.index = index
        self.vertex = vertex


class BoundViolationError(SigmaGameError):
    """A solver certificate failed its bound assertion (implementation defect)."""


REGULAR = "regular"
LIT = "lit"


@dataclass(frozen=True)
class Graph:
    """Graph on vertices 0..n-1 with simple edges plus a separate loop set.

    A loop at v puts v into its own neighborhood; degree counts non-loop
    edges only.
    """

    n: int
    edges: frozenset
    loops: frozenset

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")
        for v in self.loops:
            if not 0 <= v < self.n:
                raise ValueError(f"loop vertex {v} out of range")

    @staticmethod
    def make(n: int, edges=(), loops=()) -> "Graph":
        """Normalizing constructor; rejects duplicate or degenerate edges."""
        norm = []
        for u, v in edges:
            if u == v:
                raise ValueError(f"edge ({u}, {v}) is a loop; use the loop set")
            norm.append((min(u, v), max(u, v)))
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate edge")
        loops = list(loops)
        if len(set(loops)) != len(loops):
            raise ValueError("duplicate loop")
        return Graph(n, frozenset(norm), frozenset(loops))

    @cached_property
    def adj(self) -> tuple:
        """Sorted non-loop neighbor lists."""
        lists = [[] for _ in range(self.n)]
        for u, v in self.edges:
            lists[u].append(v)
            lists[v].append(u)
        return tuple(tuple(sorted(l)) for l in lists)

    @cached_property
    def neighbor_masks(self) -> tuple:
        """Bitmask of N(v) for each v, loop included."""
        masks = []
        for v in range(self.n):
            m = 0
            for u in self.adj[v]:
                m |= 1 << u
            if v in self.loops:
                m |= 1 << v
            masks.append(m)
        return tuple(masks)

    @cached_property
    def degrees(self) -> tuple:
        """Non-loop degree of each vertex."""
        return tuple(len(self.adj[v]) for v in range(self.n))

    @cached_property
    def leaves(self) -> tuple:
        return tuple(v for v in range(self.n) if self.degrees[v] == 1)

    @cached_property
    def branch_vertices(self) -> tuple:
        return tuple(v for v in range(self.n) if self.degrees[v] >= 3)

    def neighbors(self, v: int) -> frozenset:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        out = set(self.adj[v])
        if v in self.loops:
            out.add(v)
        return frozenset(out)

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        return self.degrees[v]

    def neighbor_mask(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        return self.neighbor_masks[v]

    def with_loops(self, loop_mask: int) -> "Graph":
        """Replace the loop set by the vertices of `loop_mask`."""
        return Graph(self.n, self.edges, frozenset(bits_of(loop_mask)))


def bits_of(mask: int):
    """Yield set bit positions of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def chi(vertices) -> int:
    """Indicator bitmask of a vertex collection."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def light_number(x: int) -> int:
    """Number of lit vertices in a configuration."""
    return x.bit_count()


def config_from_string(s: str) -> int:
    """Parse a bitstring whose i-th character is the state of vertex i+1."""
    x = 0
    for i, ch in enumerate(s):
        if ch == "1":
            x |= 1 << i
        elif ch != "0":
            raise FormatError(f"bad configuration character {ch!r}")
    return x


def config_to_string(x: int, n: int) -> str:
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def regular_move(g: Graph, x: int, v: int) -> int:
    """Toggle the states of all neighbors of v."""
    return x ^ g.neighbor_mask(v)


def lit_only_move(g: Graph, x: int, v: int) -> int:
    """Toggle N(v) if v is lit; a move at an off vertex changes nothing."""
    if (x >> v) & 1:
        return x ^ g.neighbor_mask(v)
    g.neighbor_mask(v)  # still range-check v
    return x


def replay_lit(g: Graph, x: int, seq, strict: bool = False) -> int:
    """Fold a lit-only move sequence left to right.

    In strict mode the first move applied at an off vertex raises
    InvalidMoveError with its index.
    """
    masks = g.neighbor_masks
    for i, v in enumerate(seq):
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range")
        if (x >> v) & 1:
            x ^= masks[v]
        elif strict:
            raise InvalidMoveError(i, v)
    return x


def replay(g: Graph, x: int, moves, strict: bool = False) -> int:
    """Replay a mixed move sequence: items are (vertex, kind) or bare ints (lit)."""
    for i, m in enumerate(moves):
        if isinstance(m, int):
            v, kind = m, LIT
        else:
            v, kind = m
        if kind == REGULAR:
            x = regular_move(g, x, v)
        elif kind == LIT:
            if (x >> v) & 1:
                x ^= g.neighbor_mask(v)
            elif strict:
                raise InvalidMoveError(i, v)
            else:
                g.neighbor_mask(v)
        else:
            raise ValueError(f"unknown move kind {kind!r}")
    return x


def apply_move_set(g: Graph, x: int, vertices) -> int:
    """Apply a multiset of regular moves; order is irrelevant, so reduce by parity."""
    parity = set()
    for v in vertices:
        if v in parity:
            parity.remove(v)
        else:
            parity.add(v)
    for v in parity:
        x ^= g.neighbor_mask(v)
    return x


# ---------------------------------------------------------------------------
# Traversal helpers (non-loop adjacency; loops never affect connectivity).


def bfs_levels(g: Graph, source: int, allowed=None):
    """BFS distances and parents from source, restricted to `allowed` vertices.

    Neighbors are scanned in ascending order, so parent chains give the
    lexicographically smallest shortest paths.
    """
    dist = {source: 0}
    parent = {source: None}
    dq = deque([source])
    while dq:
        u = dq.popleft()
        for w in g.adj[u]:
            if allowed is not None and w not in allowed:
                continue
            if w not in dist:
                dist[w] = dist[u] + 1
                parent[w] = u
                dq.append(w)
    return dist, parent


def shortest_path(g: Graph, a: int, b: int, allowed=None) -> list:
    """Deterministic shortest path from a to b (inclusive)."""
    dist, parent = bfs_levels(g, a, allowed)
    if b not in dist:
        raise SigmaGameError(f"no path from {a} to {b}")
    path = [b]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def components(g: Graph, exclude=frozenset(), within=None) -> list:
    """Connected components as sorted tuples, ordered by smallest member."""
    if within is None:
        within = range(g.n)
    pool = [v for v in within if v not in exclude]
    pool_set = set(pool)
    seen = set()
    comps = []
    for v in pool:
        if v in seen:
            continue
        comp = []
        dq = deque([v])
        seen.add(v)
        while dq:
            u = dq.popleft()
            comp.append(u)
            for w in g.adj[u]:
                if w in pool_set and w not in seen:
                    seen.add(w)
                    dq.append(w)
        comps.append(tuple(sorted(comp)))
    comps.sort(key=lambda c: c[0])
    return comps


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return len(components(g)) == 1


def underlying_is_tree(g: Graph) -> bool:
    """True when the loopless skeleton is a tree."""
    return g.n >= 1 and len(g.edges) == g.n - 1 and is_connected(g)


# ---------------------------------------------------------------------------
# Standard families.


def build_family(kind: str, *params, loop_mask: int = 0):
    """Construct a named graph family member.

    Returns (graph, config) where config is the family's bundled starting
    configuration or None.
    """
    cfg = None
    if kind == "path":
        (n,) = params
        _require_positive(n)
        g = Graph.make(n, [(i, i + 1) for i in range(n - 1)])
    elif kind == "rake":
        n, k = params
        _require_positive(n, k)
        edges = [(i, i + 1) for i in range(n - 1)]
        edges += [(n - 1, n + j) for j in range(k)]
        g = Graph.make(n + k, edges)
    elif kind == "complete":
        (n,) = params
        _require_positive(n)
        g = Graph.make(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    elif kind == "complete_tripartite":
        (m,) = params
        _require_positive(m)
        part = lambda i: range(i * m, (i + 1) * m)
        edges = []
        for i in range(3):
            for j in range(i + 1, 3):
                edges += [(u, v) for u in part(i) for v in part(j)]
        g = Graph.make(3 * m, edges)
        cfg = chi(range(m, 3 * m))  # lit everywhere except the first part
    elif kind == "grid":
        r, c = params
        _require_positive(r, c)
        edges = []
        for i in range(r):
            for j in range(c):
                if j + 1 < c:
                    edges.append((i * c + j, i * c + j + 1))
                if i + 1 < r:
                    edges.append((i * c + j, (i + 1) * c + j))
        g = Graph.make(r * c, edges)
    elif kind == "loopy":
        (n,) = params
        _require_positive(n)
        g = Graph.make(
            n, [(i, j) for i in range(n) for j in range(i + 1, n)], loops=range(n)
        )
        cfg = (1 << n) - 1
    elif kind == "fig1":
        g = Graph.make(8, [(0, 1), (1, 2), (2, 3), (3, 4), (3, 5), (5, 6), (6, 7)])
        cfg = chi([0, 7])
    elif kind == "fig2":
        g = Graph.make(7, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)])
        cfg = chi([1, 3])
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    if loop_mask:
        if loop_mask >> g.n:
            raise ValueError("loop mask out of range")
        g = g.with_loops(loop_mask)
    return g, cfg


def _require_positive(*values):
    for v in values:
        if v <= 0:
            raise ValueError("family parameters must be positive")


# ---------------------------------------------------------------------------
# Instance file format.
#
#   # comment
#   n <count>
#   e <u> <v>        (1-based, u != v)
#   l <v>
#   x <bitstring>    (at most once; char i = state of vertex i)


def parse_instance(text: str):
    """Parse instance text into (Graph, config-or-None)."""
    n = None
    edges = []
    loops = []
    cfg = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if n is None:
            if key != "n" or len(parts) != 2:
                raise FormatError(f"line {lineno}: expected 'n <count>' first")
            try:
                n = int(parts[1])
            except ValueError:
                raise FormatError(f"line {lineno}: bad vertex count") from None
            if n < 0:
                raise FormatError(f"line {lineno}: negative vertex count")
            continue
        if key == "e":
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'e <u> <v>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise FormatError(f"line {lineno}: bad edge endpoints") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise FormatError(f"line {lineno}: edge vertex out of range")
            if u == v:
                raise FormatError(f"line {lineno}: self edge; use 'l {u}'")
            e = (min(u, v) - 1, max(u, v) - 1)
            if e in edges:
                raise FormatError(f"line {lineno}: duplicate edge")
            edges.append(e)
        elif key == "l":
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: expected 'l <v>'")
            try:
                v = int(parts[1])
            except ValueError:
                raise FormatError(f"line {lineno}: bad loop vertex") from None
            if not 1 <= v <= n:
                raise FormatError(f"line {lineno}: loop vertex out of range")
            if v - 1 in loops:
                raise FormatError(f"line {lineno}: duplicate loop")
            loops.append(v - 1)
        elif key == "x":
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: expected 'x <bits>'")
            if cfg is not None:
                raise FormatError(f"line {lineno}: repeated configuration")
            if len(parts[1]) != n:
                raise FormatError(
                    f"line {lineno}: configuration length {len(parts[1])} != n={n}"
                )
            cfg = config_from_string(parts[1])
        else:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
    if n is None:
        raise FormatError("empty instance")
    return Graph.make(n, edges, loops), cfg


def serialize_instance(g: Graph, x=None) -> str:
    """Serialize to the instance format; parse(serialize(...)) round-trips."""
    out = [f"n {g.n}"]
    for u, v in sorted(g.edges):
        out.append(f"e {u + 1} {v + 1}")
    for v in sorted(g.loops):
        out.append(f"l {v + 1}")
    if x is not None:
        out.append(f"x {config_to_string(x, g.n)}")
    return "\n".join(out) + "\n"
