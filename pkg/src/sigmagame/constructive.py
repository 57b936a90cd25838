"""Constructive lit-only solvers with certified bounds.

Every solver emits an explicit valid-move sequence and checks its own
bound at certificate construction time: final light at most ML + 2 on
decorated trees and planted trees, ML + 1 on rakes.  A bound violation is
an implementation defect and raises, carrying the full replay trace.
"""

from dataclasses import dataclass

from .model import (
    BoundViolationError,
    Graph,
    InvalidMoveError,
    ShapeError,
    bits_of,
    chi,
    components,
    config_to_string,
    is_connected,
    light_number,
    replay_lit,
    serialize_instance,
    shortest_path,
    underlying_is_tree,
)
from .search import (
    DEFAULT_CAP,
    CapExceededError,
    NeighborhoodBasis,
    min_coset_member,
    ml_litonly,
)


# ---------------------------------------------------------------------------
# Tree anatomy.


@dataclass(frozen=True)
class TreeAnatomy:
    """Branch/leaf structure and per-vertex deletion components of a tree.

    components[v] lists the components of G - v as sorted vertex tuples
    (ordered by smallest member); good[v] flags the ones containing no
    branch vertex; appropriate[v] means at least two good components.
    """

    branch_vertices: tuple
    leaves: tuple
    components: tuple
    good: tuple
    appropriate: tuple


def tree_anatomy(g: Graph) -> TreeAnatomy:
    if not underlying_is_tree(g):
        raise ShapeError("underlying graph is not a tree")
    branches = set(g.branch_vertices)
    per_comps = []
    per_good = []
    per_appr = []
    for v in range(g.n):
        comps = components(g, exclude={v})
        flags = tuple(not (branches & set(c)) for c in comps)
        per_comps.append(tuple(comps))
        per_good.append(flags)
        per_appr.append(sum(flags) >= 2)
    return TreeAnatomy(
        branch_vertices=tuple(sorted(branches)),
        leaves=g.leaves,
        components=tuple(per_comps),
        good=tuple(per_good),
        appropriate=tuple(per_appr),
    )


def _deg_within(g: Graph, v: int, allowed) -> int:
    return sum(1 for u in g.adj[v] if u in allowed)


def _path_order(g: Graph, allowed) -> tuple:
    """Order a vertex set that induces a path, starting at its smallest end."""
    verts = sorted(allowed)
    if len(verts) == 1:
        return (verts[0],)
    ends = [v for v in verts if _deg_within(g, v, allowed) <= 1]
    if len(ends) != 2:
        raise ShapeError("vertex set does not induce a path")
    order = [min(ends)]
    prev = None
    while True:
        nxt = [u for u in g.adj[order[-1]] if u in allowed and u != prev]
        if not nxt:
            break
        if len(nxt) != 1:
            raise ShapeError("vertex set does not induce a path")
        prev = order[-1]
        order.append(nxt[0])
    if len(order) != len(verts):
        raise ShapeError("vertex set does not induce a path")
    return tuple(order)


def _orient_pendant_path(g: Graph, comp, root) -> tuple:
    """Order a pendant path component from its far leaf toward the root."""
    attach = [u for u in comp if root in g.adj[u]]
    if len(attach) != 1:
        raise ShapeError("component is not attached at a single vertex")
    cset = set(comp)
    order = [attach[0]]
    prev = root
    while True:
        nxt = [u for u in g.adj[order[-1]] if u in cset and u != prev]
        if not nxt:
            break
        if len(nxt) != 1:
            raise ShapeError("component is not a pendant path")
        prev = order[-1]
        order.append(nxt[0])
    if len(order) != len(comp):
        raise ShapeError("component is not a pendant path")
    order.reverse()
    return tuple(order)


def _nylen_parts(g: Graph, allowed, extra_marks=frozenset()):
    """Split a tree (restricted to `allowed`) for leaf-to-leaf path extraction.

    Returns (w, parts).  When the restricted tree has no branch vertex and
    no extra mark, w is None and parts is the whole path order.  Otherwise
    w is the chosen spine-end branch vertex and parts lists the marked-free
    components of the tree minus w, each oriented far-end first, ordered by
    smallest vertex.
    """
    allowed = set(allowed)
    branches = {v for v in allowed if _deg_within(g, v, allowed) >= 3}
    marks = branches | set(extra_marks)
    if not marks:
        return None, _path_order(g, allowed)
    # minimal connected superset of the marks: strip unmarked leaves
    span = set(allowed)
    changed = True
    while changed:
        changed = False
        for v in sorted(span):
            if v not in marks and _deg_within(g, v, span) <= 1:
                span.remove(v)
                changed = True
    ends = [v for v in span if _deg_within(g, v, span) <= 1]
    candidates = sorted(v for v in ends if v in branches)
    if not candidates:
        raise ShapeError("no usable spine end (need a true branch vertex)")
    w = candidates[0]
    comps = components(g, exclude={w}, within=allowed)
    goods = [c for c in comps if not (marks & set(c))]
    if len(goods) < 2:
        raise ShapeError("chosen spine end has fewer than two clean components")
    return w, [_orient_pendant_path(g, c, w) for c in goods]


def nylen_path(h: Graph, avoid=None) -> tuple:
    """A path through two distinct leaves containing at most one branch vertex.

    With `avoid` given (a leaf, tree must have at least three leaves) the
    returned path excludes it.
    """
    if not underlying_is_tree(h):
        raise ShapeError("underlying graph is not a tree")
    if h.n < 2:
        raise ShapeError("need at least two vertices")
    if avoid is not None:
        if avoid not in h.leaves:
            raise ShapeError("avoid vertex must be a leaf")
        if len(h.leaves) < 3:
            raise ShapeError("need at least three leaves to avoid one")
    extra = frozenset() if avoid is None else frozenset({avoid})
    w, parts = _nylen_parts(h, range(h.n), extra)
    if w is None:
        return parts
    first, second = parts[0], parts[1]
    return first + (w,) + tuple(reversed(second))


# ---------------------------------------------------------------------------
# State splitting: reach a configuration where two vertices disagree.


def make_states_differ(g: Graph, x: int, a: int, b: int):
    """Valid moves from x to some y with y(a) != y(b).

    Procedure: pick the smallest contact vertex c with c in exactly one of
    N(a), N(b); if c is dark, push a light along a shortest path onto c;
    finally move at c if a and b still agree.
    """
    if x == 0:
        raise ShapeError("no valid move exists from the all-off configuration")
    na, nb = g.neighbors(a), g.neighbors(b)
    if na == nb:
        raise ShapeError("vertices have identical neighborhoods")
    if not is_connected(g):
        raise ShapeError("graph must be connected")
    c = min(na ^ nb)
    masks = g.neighbor_masks
    seq = []
    cur = x
    if not (cur >> c) & 1:
        d = min(bits_of(cur))
        path = shortest_path(g, d, c)
        q = max(i for i in range(len(path) - 1) if (cur >> path[i]) & 1)
        for v in path[q:-1]:
            if not (cur >> v) & 1:
                raise AssertionError("push move at a dark vertex")
            seq.append(v)
            cur ^= masks[v]
    if ((cur >> a) & 1) == ((cur >> b) & 1):
        if not (cur >> c) & 1:
            raise AssertionError("contact vertex failed to light up")
        seq.append(c)
        cur ^= masks[c]
    if ((cur >> a) & 1) == ((cur >> b) & 1):
        raise AssertionError("states still agree after contact move")
    return seq, cur


# ---------------------------------------------------------------------------
# Zone realization: reach any regular-move target up to junk outside a zone.


@dataclass(frozen=True)
class PlantedSetup:
    """Zone data for realize_up_to_outside.

    a and b are nonadjacent vertices with common neighbor c; S is a vertex
    set outside N(a) and N(b) such that S + {c} induces a connected
    subgraph.  a and b themselves must stay outside S + {c}.
    """

    a: int
    b: int
    c: int
    S: frozenset

    def validate(self, g: Graph):
        a, b, c, S = self.a, self.b, self.c, self.S
        if a == b:
            raise ShapeError("a and b must be distinct")
        if (min(a, b), max(a, b)) in g.edges:
            raise ShapeError("a and b must not be adjacent")
        na, nb = g.neighbors(a), g.neighbors(b)
        if c not in na or c not in nb:
            raise ShapeError("c must be a common neighbor of a and b")
        if S & (na | nb):
            raise ShapeError("S must avoid the neighborhoods of a and b")
        if a in S or b in S or a == c or b == c:
            raise ShapeError("a and b must lie outside S + {c}")
        zone = S | {c}
        seen = {c}
        stack = [c]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w in zone and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != zone:
            raise ShapeError("S + {c} must induce a connected subgraph")


def _realize(g: Graph, x: int, setup: PlantedSetup, y: int):
    """Valid moves from x to y + junk moves R outside the zone S + {c}.

    Targets are processed farthest from c first; each one is simulated by
    cascading valid moves down the c-to-target path, seeded either from a
    lit path vertex or from the lit one of {a, b} (with a leading and
    trailing move there when it carries a loop).
    """
    setup.validate(g)
    a, b, c = setup.a, setup.b, setup.c
    zone = set(setup.S) | {c}
    if x == 0:
        raise ShapeError("realization needs a nonzero starting configuration")
    masks = g.neighbor_masks
    seq = []
    cur = x
    if ((cur >> a) & 1) == ((cur >> b) & 1):
        if g.neighbors(a) == g.neighbors(b):
            raise ShapeError(
                "states of a and b agree and their neighborhoods coincide"
            )
        dseq, cur = make_states_differ(g, x, a, b)
        seq.extend(dseq)
    moves = NeighborhoodBasis.from_graph(g).decompose(cur ^ y)
    if moves is None:
        raise ShapeError("target is not reachable by regular moves")
    targets = {v for v in bits_of(moves) if v in zone}
    junk = {v for v in bits_of(moves) if v not in zone}
    from .model import bfs_levels

    dist, _ = bfs_levels(g, c, allowed=zone)
    guard = 0
    while targets:
        guard += 1
        if guard > 4 * (len(zone) + 2) ** 2:
            raise BoundViolationError("zone realization failed to terminate")
        far = max(dist[t] for t in targets)
        dvert = min(t for t in targets if dist[t] == far)
        path = shortest_path(g, c, dvert, allowed=zone)
        la, lb = (cur >> a) & 1, (cur >> b) & 1
        if la == lb:
            raise AssertionError("a/b disagreement invariant broken")
        v0 = a if la else b
        chain = [v0] + path
        t_idx = max(i for i, v in enumerate(chain) if (cur >> v) & 1)
        if t_idx > 0 or v0 not in g.loops:
            mvs = chain[t_idx:]
        else:
            mvs = chain + [v0]
        for m in mvs:
            if not (cur >> m) & 1:
                raise AssertionError("cascade move at a dark vertex")
            seq.append(m)
            cur ^= masks[m]
        parity = set()
        for m in mvs:
            parity.symmetric_difference_update({m})
        targets.symmetric_difference_update(parity & zone)
        junk.symmetric_difference_update(parity - zone)
    return seq, cur, tuple(sorted(junk))


def realize_up_to_outside(g: Graph, x: int, setup: PlantedSetup, y: int):
    """Public wrapper: returns (sequence, R) with strict replay of the
    sequence from x equal to y plus the regular-move effects of R."""
    seq, _cur, junk = _realize(g, x, setup, y)
    return seq, junk


# ---------------------------------------------------------------------------
# Path normalization: drive a pendant path down to at most one light.


def path_normalize(g: Graph, x: int, order=None):
    """Valid moves inside order[1:] leaving at most one light on the path.

    `order` is the path from its protected top outward; if omitted the
    whole graph must be a path and the smallest endpoint becomes the top.
    Vertices after the top must have all their neighbors inside the path.
    """
    if order is None:
        if not underlying_is_tree(g) or any(d > 2 for d in g.degrees):
            raise ShapeError("graph is not a path")
        order = _path_order(g, range(g.n))
    else:
        order = tuple(order)
        oset = set(order)
        if len(oset) != len(order):
            raise ShapeError("path order repeats a vertex")
        for i in range(len(order) - 1):
            u, v = order[i], order[i + 1]
            if (min(u, v), max(u, v)) not in g.edges:
                raise ShapeError("order is not a path in the graph")
        for u in order[1:]:
            if not set(g.adj[u]) <= oset:
                raise ShapeError(f"vertex {u} has neighbors outside the path")
    masks = g.neighbor_masks
    m = len(order)
    seq = []
    cur = x
    prev_first = -1
    while True:
        lit = [i for i in range(m) if (cur >> order[i]) & 1]
        if len(lit) <= 1:
            return seq, cur
        t_y, t = lit[0], lit[1]
        if t_y <= prev_first:
            raise AssertionError("first lit index failed to advance")
        prev_first = t_y
        for j in range(t, t_y, -1):
            v = order[j]
            if not (cur >> v) & 1:
                raise AssertionError("normalization move at a dark vertex")
            seq.append(v)
            cur ^= masks[v]


# ---------------------------------------------------------------------------
# Rakes: a handle path with pendant teeth at its far end.


@dataclass(frozen=True)
class RakeView:
    """A rake embedded in a host graph: handle[0] is the protected top,
    teeth hang off handle[-1]; everything except the top is common."""

    graph: Graph
    handle: tuple
    teeth: tuple

    def __post_init__(self):
        g = self.graph
        verts = self.handle + self.teeth
        if len(set(verts)) != len(verts) or not verts:
            raise ShapeError("rake vertices must be distinct")
        if not self.teeth:
            raise ShapeError("a rake needs at least one tooth")
        if tuple(sorted(self.teeth)) != self.teeth:
            raise ShapeError("teeth must be sorted")
        for i in range(len(self.handle) - 1):
            u, v = self.handle[i], self.handle[i + 1]
            if (min(u, v), max(u, v)) not in g.edges:
                raise ShapeError("handle is not a path")
        vset = set(verts)
        last = self.handle[-1]
        for w in self.teeth:
            if set(g.adj[w]) & vset != {last}:
                raise ShapeError("teeth must attach only to the handle end")
        for i, h in enumerate(self.handle):
            expect = set()
            if i > 0:
                expect.add(self.handle[i - 1])
            if i + 1 < len(self.handle):
                expect.add(self.handle[i + 1])
            if i == len(self.handle) - 1:
                expect |= set(self.teeth)
            if set(g.adj[h]) & vset != expect:
                raise ShapeError("handle has extra adjacencies inside the rake")

    @property
    def top(self) -> int:
        return self.handle[0]

    @property
    def vertices(self) -> tuple:
        return self.handle + self.teeth

    @property
    def common(self) -> tuple:
        return self.handle[1:] + self.teeth


def rake_view(g: Graph, top=None) -> RakeView:
    """View a whole decorated rake graph, deriving handle and teeth.

    Paths count as rakes with a single tooth; the top defaults to the
    smallest eligible endpoint.
    """
    if not underlying_is_tree(g) or g.n < 2:
        raise ShapeError("not a rake")
    branches = g.branch_vertices
    if len(branches) > 1:
        raise ShapeError("not a rake: multiple branch vertices")
    if branches:
        hub = branches[0]
        comps = components(g, exclude={hub})
        big = [c for c in comps if len(c) > 1]
        if len(big) > 1:
            raise ShapeError("not a rake: two long branches")
        teeth = tuple(sorted(c[0] for c in comps if len(c) == 1))
        if big:
            tail = _orient_pendant_path(g, big[0], hub)  # far end first
            handle = tail + (hub,)
        else:
            handle = (hub,)
        if top is not None and top != handle[0]:
            raise ShapeError("top is forced by the rake shape")
    else:
        order = _path_order(g, range(g.n))
        if top is not None:
            if top not in (order[0], order[-1]):
                raise ShapeError("top must be a path endpoint")
            if top == order[-1]:
                order = tuple(reversed(order))
        handle, teeth = order[:-1], (order[-1],)
    return RakeView(g, handle, teeth)


def pendant_rake_view(g: Graph, top: int, vertices) -> RakeView:
    """View a pendant subtree (all outside neighbors through `top`) as a rake."""
    verts = set(vertices)
    verts.discard(top)
    if not verts:
        raise ShapeError("empty pendant component")
    for u in verts:
        if not set(g.adj[u]) <= verts | {top}:
            raise ShapeError(f"vertex {u} has neighbors outside the pendant rake")
    handle = [top]
    prev = None
    while True:
        nxt = sorted(u for u in g.adj[handle[-1]] if u in verts and u != prev)
        if not nxt:
            # walked onto the far end of a bare path: it is the single tooth
            tooth = handle.pop()
            teeth = (tooth,)
            break
        if len(nxt) == 1:
            prev = handle[-1]
            handle.append(nxt[0])
            continue
        if any(sorted(u for u in g.adj[t] if u in verts or u == top) != [handle[-1]]
               for t in nxt):
            raise ShapeError("pendant component is not a rake")
        teeth = tuple(sorted(nxt))
        break
    if len(handle) + len(teeth) != len(verts) + 1:
        raise ShapeError("pendant component is not a rake")
    return RakeView(g, tuple(handle), teeth)


def _rake_engine(rv: RakeView, x: int, move_mask: int, allow_top: bool):
    """Realize a regular move set on a rake with valid moves, up to one light.

    Walks the residual move set nearest-the-top first: lit residual
    vertices are played directly; a dark one is charged by pulling the
    nearest light beyond it back along the handle.  Stops when the
    residual is gone, when everything beyond the nearest residual vertex
    is dark, or when only dark residual teeth remain; each terminal state
    provably carries at most one light beyond the target.

    Returns (sequence, final, (terminal kind, stall vertex)).
    """
    g = rv.graph
    handle, teeth = rv.handle, set(rv.teeth)
    nh = len(handle)
    masks = g.neighbor_masks
    pos = {h: i for i, h in enumerate(handle)}
    vset = set(rv.vertices)
    residual = set(bits_of(move_mask))
    if not residual <= vset:
        raise ShapeError("move set leaves the rake")
    if not allow_top and rv.top in residual:
        raise ShapeError("move set touches the top")

    def dist(u):
        return pos.get(u, nh)

    seq = []
    cur = x
    guard = 0
    limit = (len(vset) + 2) ** 3 + 100
    while True:
        guard += 1
        if guard > limit:
            raise BoundViolationError("rake engine failed to terminate")
        if not residual:
            return seq, cur, ("exact", None)
        d = min(dist(u) for u in residual)
        layer = sorted(u for u in residual if dist(u) == d)
        lit_layer = [u for u in layer if (cur >> u) & 1]
        u = lit_layer[0] if lit_layer else layer[0]
        if (cur >> u) & 1:
            seq.append(u)
            cur ^= masks[u]
            residual.remove(u)
            continue
        if d == nh:
            return seq, cur, ("teeth-stalled", u)
        mvs = None
        for j in range(d + 1, nh):
            if (cur >> handle[j]) & 1:
                mvs = [handle[i] for i in range(j, d, -1)]
                break
        if mvs is None:
            lit_teeth = sorted(t for t in teeth if (cur >> t) & 1)
            if lit_teeth:
                mvs = [lit_teeth[0]] + [handle[i] for i in range(nh - 1, d, -1)]
        if mvs is None:
            return seq, cur, ("dark-beyond", u)
        for m in mvs:
            if not (cur >> m) & 1:
                raise AssertionError("rake cascade move at a dark vertex")
            seq.append(m)
            cur ^= masks[m]
        residual.symmetric_difference_update(mvs)


def rake_normalize(rv: RakeView, x: int, move_set):
    """Valid moves inside the common vertices tracking a regular move set.

    With y the configuration the move set would reach, the result z
    satisfies light(z restricted to the rake) <= light(y restricted) + 1.
    """
    mask = chi(move_set)
    seq, cur, _term = _rake_engine(rv, x, mask, allow_top=False)
    return seq, cur


# ---------------------------------------------------------------------------
# Certificates and solvers.


@dataclass(frozen=True)
class SolveCertificate:
    """A strict-replayable lit-only sequence with a checked light bound."""

    start: int
    sequence: tuple
    final_config: int
    final_light: int
    bound: int
    ml: int


def _trace(g, x, seq, extra=""):
    return (
        f"instance:\n{serialize_instance(g, x)}"
        f"sequence (1-based): {[v + 1 for v in seq]}\n{extra}"
    )


def _certify(g: Graph, x: int, seq, bound: int, ml: int) -> SolveCertificate:
    try:
        z = replay_lit(g, x, seq, strict=True)
    except InvalidMoveError as e:
        raise BoundViolationError(
            "emitted sequence is not strictly valid: " + str(e) + "\n" + _trace(g, x, seq)
        ) from e
    fl = light_number(z)
    if fl > ml + bound:
        raise BoundViolationError(
            f"certificate bound broken: final light {fl} > {ml} + {bound}\n"
            + _trace(g, x, seq, f"final: {config_to_string(z, g.n)}\n")
        )
    return SolveCertificate(
        start=x, sequence=tuple(seq), final_config=z, final_light=fl,
        bound=bound, ml=ml,
    )


class MlOracle:
    """Shared coset-minimum oracle: lexicographically smallest optimum."""

    def __init__(self, g: Graph, cap: int = DEFAULT_CAP):
        self.g = g
        self.basis = NeighborhoodBasis.from_graph(g)
        if self.basis.rank > cap:
            raise CapExceededError(
                f"coset sweep needs 2^{self.basis.rank} members; cap is 2^{cap}"
            )

    def min_coset(self, x: int):
        return min_coset_member(self.basis, x)


class PendantPathsSolver:
    """Solver for a connected core with two pendant paths at one vertex.

    Applicable when one pendant path has length >= 2, or a loop sits at a
    path's first vertex, or the two first vertices differ in the starting
    configuration.  Emits certificates with bound 2.
    """

    def __init__(self, g: Graph, pivot: int, path1, path2,
                 cap: int = DEFAULT_CAP, oracle: MlOracle | None = None):
        self.g = g
        self.pivot = pivot
        self.path1 = tuple(path1)
        self.path2 = tuple(path2)
        self._validate()
        self.setup = PlantedSetup(
            a=self.path1[0], b=self.path2[0], c=pivot,
            S=frozenset(self.core) - {pivot},
        )
        self.setup.validate(g)
        self.oracle = oracle or MlOracle(g, cap)
        self._core_basis = None

    def _validate(self):
        g, pivot = self.g, self.pivot
        p1, p2 = self.path1, self.path2
        if not p1 or not p2:
            raise ShapeError("both pendant paths must be nonempty")
        pend = set(p1) | set(p2)
        if len(pend) != len(p1) + len(p2) or pivot in pend:
            raise ShapeError("pendant paths must be disjoint")
        for path in (p1, p2):
            prev = pivot
            for i, u in enumerate(path):
                expect = {prev}
                if i + 1 < len(path):
                    expect.add(path[i + 1])
                if set(g.adj[u]) != expect:
                    raise ShapeError("pendant paths must be induced and pendant")
                prev = u
        self.core = frozenset(range(g.n)) - pend
        if pivot not in self.core:
            raise ShapeError("pivot must belong to the core")
        comp = components(g, within=self.core)
        if len(comp) != 1:
            raise ShapeError("core must be connected")

    def proviso(self, x: int) -> bool:
        a, b = self.path1[0], self.path2[0]
        return (
            max(len(self.path1), len(self.path2)) >= 2
            or a in self.g.loops
            or b in self.g.loops
            or ((x >> a) & 1) != ((x >> b) & 1)
        )

    def _core_graph(self):
        if self._core_basis is None:
            order = sorted(self.core)
            back = {v: i for i, v in enumerate(order)}
            edges = [
                (back[u], back[v])
                for u, v in self.g.edges
                if u in self.core and v in self.core
            ]
            loops = [back[v] for v in self.g.loops if v in self.core]
            cg = Graph.make(len(order), edges, loops)
            self._core_basis = (cg, order, NeighborhoodBasis.from_graph(cg))
        return self._core_basis

    def core_ml(self, x: int) -> int:
        """Exact ML of the restriction of x to the core, inside the core graph."""
        cg, order, basis = self._core_graph()
        xc = chi(i for i, v in enumerate(order) if (x >> v) & 1)
        return min_coset_member(basis, xc)[0]

    def solve(self, x: int, core_target: bool = False) -> SolveCertificate:
        g = self.g
        if x == 0:
            return _certify(g, x, [], 2, 0)
        if not self.proviso(x):
            raise ShapeError(
                "applicability proviso fails: equal-length-1 loopless paths "
                "with equal states"
            )
        if core_target:
            cg, order, basis = self._core_graph()
            xc = chi(i for i, v in enumerate(order) if (x >> v) & 1)
            ml_ref, _yc, mask = min_coset_member(basis, xc)
            y = x
            for i in bits_of(mask):
                y ^= g.neighbor_mask(order[i])
        else:
            ml_ref, y, _ = self.oracle.min_coset(x)
        seq, cur, _junk = _realize(g, x, self.setup, y)
        s1, cur = path_normalize(g, cur, (self.pivot,) + self.path1)
        s2, _cur = path_normalize(g, cur, (self.pivot,) + self.path2)
        return _certify(g, x, list(seq) + s1 + s2, 2, ml_ref)


def solve_pendant_paths(g: Graph, pivot: int, path1, path2, x: int,
                        core_target: bool = False) -> SolveCertificate:
    return PendantPathsSolver(g, pivot, path1, path2).solve(x, core_target)


class _TreePipeline:
    """Shared machinery for whole trees and planted trees.

    `allowed` is the decorated-tree part; `glue` (optional) is the vertex
    shared with the rest of the graph and is treated as an honorary branch
    vertex so that no construction crosses into the attached component.
    """

    def __init__(self, g: Graph, allowed, glue, cap: int, allow_rake: bool):
        self.g = g
        self.allowed = frozenset(allowed)
        self.glue = glue
        self.oracle = MlOracle(g, cap)
        self.cap = cap
        self.tiny = g.n <= 2
        self.rake = None
        self.static_plant = None
        self.sub1 = None
        self.sub2 = None
        self._plants = {}
        if allow_rake:
            try:
                self.rake = rake_view(g)
            except ShapeError:
                self.rake = None
        if self.tiny or self.rake is not None:
            return
        self._analyze()

    # -- structure ---------------------------------------------------------

    def _analyze(self):
        g, allowed = self.g, self.allowed
        marks = {v for v in allowed if _deg_within(g, v, allowed) >= 3}
        if self.glue is not None:
            marks.add(self.glue)
        self.appropriate = []
        for w in sorted(allowed):
            comps = components(g, exclude={w}, within=allowed)
            goods = [c for c in comps if not (marks & set(c))]
            if len(goods) >= 2:
                self.appropriate.append(
                    (w, [_orient_pendant_path(g, c, w) for c in goods])
                )
        for w, goods in self.appropriate:
            for i, comp in enumerate(goods):
                if len(comp) >= 2 or set(comp) & g.loops:
                    other = goods[1] if i == 0 else goods[0]
                    # plant paths run pivot-outward; components are far-end first
                    self.static_plant = PendantPathsSolver(
                        g, w, tuple(reversed(comp)), tuple(reversed(other)),
                        oracle=self.oracle,
                    )
                    return
        self._prepare_general(marks)

    def _prepare_general(self, marks):
        g, allowed = self.g, self.allowed
        self.deleted_at = {}
        removed = set()
        for w, goods in self.appropriate:
            for comp in goods:
                if len(comp) != 1 or set(comp) & g.loops:
                    raise AssertionError("reduction scan missed a violation")
            keep = goods[0][0]
            drop = [c[0] for c in goods[1:]]
            self.deleted_at[w] = tuple(drop)
            removed.update(drop)
        h_set = set(allowed) - removed
        extra = frozenset() if self.glue is None else frozenset({self.glue})
        w, parts = _nylen_parts(g, h_set, extra)
        if w is None:
            self._prepare_subcase1(parts)
        else:
            self._prepare_subcase2(w, parts)

    def _prepare_subcase1(self, path_order):
        # the pruned tree is a bare path; the two fan carriers sit just
        # inside its endpoints
        g = self.g
        if self.glue is not None:
            raise AssertionError("planted pipeline cannot reach the path case")
        p = list(path_order)
        if len(p) < 4:
            raise AssertionError("path case needs two interior fan carriers")
        near, far = p[1], p[-2]
        extra = set(self.deleted_at) - {near, far}
        if extra:
            raise AssertionError("fans outside the path endpoints")
        removed = set(self.deleted_at.get(near, ()))
        teeth = tuple(sorted(set(self.deleted_at.get(far, ())) | {p[-1]}))
        rake = RakeView(g, tuple(p[:-1]), teeth)
        keep = [v for v in range(g.n) if v not in removed]
        self.sub1 = (rake, NeighborhoodBasis.from_graph(g, keep))

    def _prepare_subcase2(self, w, parts):
        g = self.g
        arms = sorted(parts, key=lambda c: (-len(c), c[0]))
        arm_p, arm_q = arms[0], arms[1]
        if len(arm_p) < 2:
            raise AssertionError("longest clean component must have two vertices")
        a, b = arm_p[-1], arm_q[-1]
        u_comp = next(c for c in components(g, exclude={w}) if a in c)
        v_comp = next(c for c in components(g, exclude={w}) if b in c)
        zone = frozenset(range(g.n)) - {w} - set(u_comp) - set(v_comp)
        setup = PlantedSetup(a=a, b=b, c=w, S=zone)
        setup.validate(g)
        rake_u = pendant_rake_view(g, w, u_comp)
        rake_v = pendant_rake_view(g, w, v_comp)
        self.sub2 = (setup, set(u_comp), set(v_comp), rake_u, rake_v)

    # -- per-configuration solving -----------------------------------------

    def solve(self, x: int) -> SolveCertificate:
        g = self.g
        if x >> g.n:
            raise ValueError("configuration out of range")
        if x == 0:
            return _certify(g, x, [], 1 if self.rake is not None else 2, 0)
        if self.tiny:
            ml = self.oracle.min_coset(x)[0]
            res = ml_litonly(g, x, self.cap)
            bound = 1 if self.rake is not None else 2
            return _certify(g, x, list(res.sequence), bound, ml)
        if self.rake is not None:
            ml, _y, mask = self.oracle.min_coset(x)
            seq, _cur, _term = _rake_engine(self.rake, x, mask, allow_top=True)
            return _certify(g, x, seq, 1, ml)
        if self.static_plant is not None:
            return self.static_plant.solve(x)
        mixed = self._find_mixed(x)
        if mixed is not None:
            return self._plant_for(mixed).solve(x)
        if self.sub1 is not None:
            return self._solve_sub1(x)
        return self._solve_sub2(x)

    def _find_mixed(self, x):
        for w, goods in self.appropriate:
            first = (x >> goods[0][0]) & 1
            for comp in goods[1:]:
                if ((x >> comp[0]) & 1) != first:
                    return (w, goods[0], comp)
        return None

    def _plant_for(self, key):
        if key not in self._plants:
            w, p1, p2 = key
            self._plants[key] = PendantPathsSolver(
                self.g, w, p1, p2, oracle=self.oracle
            )
        return self._plants[key]

    def _solve_sub1(self, x):
        g = self.g
        rake, sub_basis = self.sub1
        ml = self.oracle.min_coset(x)[0]
        w_sub, _y_sub, mask = min_coset_member(sub_basis, x)
        if w_sub > ml + 1:
            raise BoundViolationError(
                f"restricted coset minimum {w_sub} exceeds ML+1 = {ml + 1}\n"
                + _trace(g, x, [])
            )
        seq, cur, (kind, stall) = _rake_engine(rake, x, mask, allow_top=True)
        top, second = rake.handle[0], rake.handle[1]
        if kind == "dark-beyond" and stall == second and (cur >> top) & 1:
            # park the light off the heavy top: it drags the removed fan
            for m in (top, second):
                if not (cur >> m) & 1:
                    raise AssertionError("fan-clearing move at a dark vertex")
                seq.append(m)
                cur ^= g.neighbor_masks[m]
        return _certify(g, x, seq, 2, ml)

    def _solve_sub2(self, x):
        g = self.g
        setup, u_comp, v_comp, rake_u, rake_v = self.sub2
        ml, y, _ = self.oracle.min_coset(x)
        seq, cur, junk = _realize(g, x, setup, y)
        jset = set(junk)
        if not jset <= u_comp | v_comp:
            raise AssertionError("realization junk escaped the two components")
        seq = list(seq)
        s2, cur, _ = _rake_engine(rake_u, cur, chi(jset & u_comp), allow_top=False)
        seq += s2
        s3, _cur, _ = _rake_engine(rake_v, cur, chi(jset & v_comp), allow_top=False)
        seq += s3
        return _certify(g, x, seq, 2, ml)


class TreeSolver:
    """Certifying lit-only solver for decorated trees: final light <= ML + 2,
    and <= ML + 1 when the tree is a rake."""

    def __init__(self, g: Graph, cap: int = DEFAULT_CAP):
        if not underlying_is_tree(g):
            raise ShapeError("underlying graph is not a tree")
        self._pipe = _TreePipeline(
            g, range(g.n), glue=None, cap=cap, allow_rake=True
        )

    def solve(self, x: int) -> SolveCertificate:
        return self._pipe.solve(x)


def solve_tree(g: Graph, x: int, cap: int = DEFAULT_CAP) -> SolveCertificate:
    return TreeSolver(g, cap).solve(x)


class PlantedTreeSolver:
    """Solver for a decorated tree with at least three branch vertices glued
    to an arbitrary connected component at a single vertex."""

    def __init__(self, g: Graph, part1, part2, pivot: int, cap: int = DEFAULT_CAP):
        v1, v2 = frozenset(part1), frozenset(part2)
        if v1 | v2 != frozenset(range(g.n)) or v1 & v2 != {pivot}:
            raise ShapeError("parts must cover the graph and share only the pivot")
        for u, w in g.edges:
            if not ((u in v1 and w in v1) or (u in v2 and w in v2)):
                raise ShapeError("no edge may cross between the two parts")
        in_v1 = sum(1 for u, w in g.edges if u in v1 and w in v1)
        if in_v1 != len(v1) - 1 or len(components(g, within=v1)) != 1:
            raise ShapeError("first part must induce a tree")
        branches = [u for u in v1 if _deg_within(g, u, v1) >= 3]
        if len(branches) < 3:
            raise ShapeError("tree part needs at least three branch vertices")
        if len(components(g, within=v2)) != 1:
            raise ShapeError("second part must induce a connected subgraph")
        if v2 == {pivot}:
            self._pipe = _TreePipeline(
                g, range(g.n), glue=None, cap=cap, allow_rake=True
            )
        else:
            self._pipe = _TreePipeline(
                g, v1, glue=pivot, cap=cap, allow_rake=False
            )

    def solve(self, x: int) -> SolveCertificate:
        return self._pipe.solve(x)


def solve_planted_tree(g: Graph, partition, x: int,
                       cap: int = DEFAULT_CAP) -> SolveCertificate:
    """partition = (part1 vertices, part2 vertices, shared pivot)."""
    part1, part2, pivot = partition
    return PlantedTreeSolver(g, part1, part2, pivot, cap).solve(x)
