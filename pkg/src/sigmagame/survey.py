"""Family enumeration and exhaustive verification scans.

Scans sweep (graph, loop mask) instances, check a per-configuration or
per-graph bound, and emit a machine-readable report.  Proved bounds fail
the scan on any violation; conjectured bounds record findings instead.
Every reported witness is recomputed by replay before emission.
"""

import json
import multiprocessing
import os
import time
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .model import (
    Graph,
    bits_of,
    chi,
    config_to_string,
    is_connected,
    light_number,
    parse_instance,
    serialize_instance,
)
from .search import (
    DEFAULT_CAP,
    ml_litonly,
    ml_regular,
    ml_table,
    mlstar_table,
    verify_ml_witness,
    verify_mlstar_witness,
)

# ---------------------------------------------------------------------------
# Canonical tree enumeration (rooted-at-center encodings).


def _tree_encoding(adj, root, parent):
    subs = sorted(
        _tree_encoding(adj, c, root) for c in adj[root] if c != parent
    )
    return "(" + "".join(subs) + ")"


def _tree_centers(adj, n):
    if n == 1:
        return [0]
    deg = {v: len(adj[v]) for v in adj}
    layer = [v for v in adj if deg[v] <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for u in adj[v]:
                deg[u] -= 1
                if deg[u] == 1:
                    nxt.append(u)
            deg[v] = 0
        layer = nxt
    return sorted(layer)


def _canonical_form(edges, n):
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return min(_tree_encoding(adj, c, None) for c in _tree_centers(adj, n))


def _canonical_relabel(edges, n):
    """Relabel so equal-form trees become identical edge lists."""
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    centers = _tree_centers(adj, n)
    best = min(
        (_tree_encoding(adj, c, None), c) for c in centers
    )
    root = best[1]
    new_id = {}
    order = [root]
    new_id[root] = 0
    # children visited by canonical sub-encoding, largest first for stability
    stack = [(root, None)]
    while stack:
        v, parent = stack.pop()
        kids = sorted(
            (c for c in adj[v] if c != parent),
            key=lambda c: _tree_encoding(adj, c, v),
        )
        for c in kids:
            new_id[c] = len(new_id)
            stack.append((c, v))
    return sorted(
        (min(new_id[u], new_id[v]), max(new_id[u], new_id[v])) for u, v in edges
    )


def enumerate_trees(n: int) -> list:
    """One representative per isomorphism class of n-vertex trees,
    deterministically ordered by canonical encoding."""
    if not 1 <= n <= 12:
        raise ValueError("tree enumeration supports 1 <= n <= 12")
    level = {(): ()}  # canonical form -> edge tuple, for size 1
    size = 1
    while size < n:
        nxt = {}
        for edges in level.values():
            for v in range(size):
                cand = list(edges) + [(v, size)]
                form = _canonical_form(cand, size + 1)
                if form not in nxt:
                    nxt[form] = tuple(_canonical_relabel(cand, size + 1))
        level = nxt
        size += 1
    if n == 1:
        return [Graph.make(1)]
    forms = sorted(level)
    return [Graph.make(n, level[f]) for f in forms]


def _to_nx(g: Graph):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def _dedup_isomorphic(graphs):
    """Keep the first representative of each isomorphism class."""
    kept = []
    buckets = {}
    for g in graphs:
        key = (g.n, len(g.edges), tuple(sorted(g.degrees)))
        fresh = True
        for h, hx in buckets.get(key, ()):
            if nx.is_isomorphic(_to_nx(g), hx):
                fresh = False
                break
        if fresh:
            buckets.setdefault(key, []).append((g, _to_nx(g)))
            kept.append(g)
    return kept


def enumerate_unicyclic(n: int) -> list:
    """Connected graphs with exactly one cycle, one per isomorphism class."""
    if not 3 <= n <= 9:
        raise ValueError("unicyclic enumeration supports 3 <= n <= 9")
    cands = []
    for tree in enumerate_trees(n):
        present = set(tree.edges)
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in present:
                    cands.append(Graph.make(n, sorted(present | {(u, v)})))
    return _dedup_isomorphic(cands)


def enumerate_all_graphs(n: int) -> list:
    """All loopless simple graphs up to isomorphism (n <= 6)."""
    if not 1 <= n <= 6:
        raise ValueError("exhaustive graph enumeration supports n <= 6")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    cands = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
        cands.append(Graph.make(n, edges))
    cands.sort(key=lambda g: (len(g.edges), sorted(g.edges)))
    return _dedup_isomorphic(cands)


def enumerate_grids(max_n: int) -> list:
    out = []
    for r in range(2, max_n + 1):
        for c in range(r, max_n + 1):
            if r * c <= max_n:
                from .model import build_family

                out.append(build_family("grid", r, c)[0])
    return out


def enumerate_rakes(max_total: int) -> list:
    from .model import build_family

    out = []
    for n in range(1, max_total):
        for k in range(1, max_total - n + 1):
            out.append(build_family("rake", n, k)[0])
    return out


def enumerate_planted(max_n: int) -> list:
    """Connected cores with two pendant paths at a pivot; loops go on the
    pendant side (enumerated separately by the scan)."""
    shapes = []
    cores = []
    for m in range(1, max_n - 1):
        if m <= 6:
            cores.extend((m, g) for g in enumerate_all_graphs(m) if is_connected(g))
    for m, core in cores:
        for pivot in range(m):
            for n1 in range(1, max_n - m + 1):
                for n2 in range(n1, max_n - m - n1 + 1):
                    edges = list(core.edges)
                    p1 = list(range(m, m + n1))
                    p2 = list(range(m + n1, m + n1 + n2))
                    edges.append((pivot, p1[0]))
                    edges += [(p1[i], p1[i + 1]) for i in range(n1 - 1)]
                    edges.append((pivot, p2[0]))
                    edges += [(p2[i], p2[i + 1]) for i in range(n2 - 1)]
                    g = Graph.make(m + n1 + n2, edges)
                    shapes.append((g, pivot, tuple(p1), tuple(p2)))
    return shapes


def enumerate_family(kind: str, max_n: int):
    """Instance stream for the scanner families."""
    if kind == "trees":
        return [g for n in range(1, max_n + 1) for g in enumerate_trees(n)]
    if kind == "unicyclic":
        return [g for n in range(3, max_n + 1) for g in enumerate_unicyclic(n)]
    if kind == "grid":
        return enumerate_grids(max_n)
    if kind == "all_graphs":
        return [g for n in range(1, min(max_n, 6) + 1) for g in enumerate_all_graphs(n)]
    if kind == "rakes":
        return enumerate_rakes(max_n)
    raise ValueError(f"unknown family {kind!r}")


def decorate_loops(g: Graph):
    """All 2^n loop masks, ascending; no automorphism reduction."""
    for mask in range(1 << g.n):
        yield mask


# ---------------------------------------------------------------------------
# Scan harness.


@dataclass
class ScanReport:
    check: str
    family: str
    max_n: int
    instances_checked: int
    max_config_gap: int
    max_graph_gap: int
    status: str  # pass | finding | fail
    violations: list = field(default_factory=list)
    extremal: dict | None = None
    notes: str = ""
    elapsed_ms: int = 0

    def to_json(self, timing: bool = False) -> str:
        data = {
            "check": self.check,
            "family": self.family,
            "max_n": self.max_n,
            "instances_checked": self.instances_checked,
            "max_config_gap": self.max_config_gap,
            "max_graph_gap": self.max_graph_gap,
            "status": self.status,
            "violations": self.violations,
            "extremal": self.extremal,
            "notes": self.notes,
        }
        if timing:
            data["elapsed_ms"] = self.elapsed_ms
        return json.dumps(data, sort_keys=True, indent=2)


# check id -> (default family, default max_n, loop mode, kind)
# kind: "assert" fails on violation, "conjecture" records findings
CHECKS = {
    "tree-bound-2": ("trees", 8, "all", "assert"),
    "unicyclic-bound-3": ("unicyclic", 7, "all", "assert"),
    "grid-bound-3": ("grid", 9, "all", "assert"),
    "rake-bound-1": ("rakes", 7, "all", "assert"),
    "loops-everywhere-equal": ("all_graphs", 4, "full", "assert"),
    "leaf-bounds": ("trees", 8, "all", "assert"),
    "pendant-core-bound": ("planted", 7, "pendant", "assert"),
    "conj-tree-gap": ("trees", 8, "all", "conjecture"),
    "conj-half-order": ("all_graphs", 5, "all", "conjecture"),
    "conj-max-degree": ("all_graphs", 5, "none", "conjecture"),
}


def _config_bound(check: str, g: Graph) -> int | None:
    """Per-configuration gap bound, or None when the check is per-graph."""
    if check == "tree-bound-2":
        return 2
    if check in ("unicyclic-bound-3", "grid-bound-3"):
        return 3
    if check == "rake-bound-1":
        return 1
    if check == "loops-everywhere-equal":
        return 0
    if check == "conj-max-degree":
        return max(g.degrees) if g.n else 0
    return None


def _graph_bound(check: str, g: Graph, base: Graph) -> int | None:
    if check == "conj-tree-gap":
        return 1
    if check == "conj-half-order":
        return g.n // 2
    return None


def _scan_task(args):
    """Evaluate one (graph, loop mask) instance; returns a summary dict."""
    check, text, extra = args
    g, _ = parse_instance(text)
    ml = ml_table(g)
    mls = mlstar_table(g)
    gap = mls.astype(np.int16) - ml.astype(np.int16)
    out = {
        "key": text,
        "configs": 1 << g.n,
        "max_config_gap": int(gap.max()),
        "gap_config": int(np.argmax(gap)),
        "graph_ml": int(ml.max()),
        "graph_mlstar": int(mls.max()),
        "violations": [],
    }
    if check == "leaf-bounds":
        leaves = len(extra["base_leaves"])
        if leaves >= 2 and out["graph_ml"] > leaves // 2:
            worst = int(np.argmax(ml))
            out["violations"].append((worst, int(ml[worst]), "graph_ml"))
        if leaves >= 2 and not g.loops and out["graph_mlstar"] > (leaves + 1) // 2:
            worst = int(np.argmax(mls))
            out["violations"].append((worst, int(mls[worst]), "graph_mlstar"))
        return out
    if check == "pendant-core-bound":
        pivot, p1, p2 = extra["pivot"], extra["path1"], extra["path2"]
        from .constructive import PendantPathsSolver

        solver = PendantPathsSolver(g, pivot, list(p1), list(p2))
        for x in range(1 << g.n):
            if not solver.proviso(x):
                continue
            bound = solver.core_ml(x) + 2
            if int(mls[x]) > bound:
                out["violations"].append((x, int(gap[x]), "core-bound"))
        return out
    bound = _config_bound(check, g)
    if bound is not None:
        for x in np.nonzero(gap > bound)[0]:
            out["violations"].append((int(x), int(gap[x]), "config-gap"))
    gbound = _graph_bound(check, g, extra.get("base"))
    if gbound is not None:
        ggap = out["graph_mlstar"] - out["graph_ml"]
        if ggap > gbound:
            out["violations"].append((out["gap_config"], ggap, "graph-gap"))
    return out


def _loop_masks(mode: str, g: Graph):
    if mode == "all":
        return range(1 << g.n)
    if mode == "none":
        return (0,)
    if mode == "full":
        return ((1 << g.n) - 1,)
    raise ValueError(mode)


def _witness_entry(text: str, x: int) -> dict:
    """Replay-verified certificate for one (instance, configuration)."""
    g, _ = parse_instance(text)
    r = ml_regular(g, x)
    s = ml_litonly(g, x)
    if not verify_ml_witness(g, x, r) or not verify_mlstar_witness(g, x, s):
        raise AssertionError("witness failed replay verification")
    return {
        "instance": text,
        "config": config_to_string(x, g.n),
        "ml": r.value,
        "mlstar": s.value,
        "gap": s.value - r.value,
        "move_set": [v + 1 for v in r.move_set],
        "sequence": [v + 1 for v in s.sequence],
    }


def scan(check: str, family: str | None = None, max_n: int | None = None,
         jobs: int | None = None, cap: int = DEFAULT_CAP,
         timing: bool = False) -> ScanReport:
    if check not in CHECKS:
        raise ValueError(f"unknown check {check!r}; known: {sorted(CHECKS)}")
    def_family, def_n, loop_mode, kind = CHECKS[check]
    family = family or def_family
    max_n = max_n if max_n is not None else def_n
    started = time.monotonic()

    tasks = []
    if check == "pendant-core-bound":
        for g, pivot, p1, p2 in enumerate_planted(max_n):
            pend = list(p1) + list(p2)
            for sub in range(1 << len(pend)):
                mask = chi(pend[i] for i in range(len(pend)) if (sub >> i) & 1)
                inst = g.with_loops(mask)
                tasks.append((check, serialize_instance(inst),
                              {"pivot": pivot, "path1": p1, "path2": p2}))
    else:
        for base in enumerate_family(family, max_n):
            if base.n > cap:
                raise ValueError(f"family member exceeds cap {cap}")
            extra = {"base_leaves": base.leaves, "base": None}
            for mask in _loop_masks(loop_mode, base):
                tasks.append((check, serialize_instance(base.with_loops(mask)),
                              extra))
    tasks.sort(key=lambda t: (len(t[1]), t[1]))

    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 8:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs) as pool:
            results = pool.map(_scan_task, tasks, chunksize=64)
    else:
        results = [_scan_task(t) for t in tasks]

    instances = 0
    max_cfg_gap = -1
    max_graph_gap = -1
    best = None  # (gap, key, config) for the extremal witness
    violations = []
    for res in results:
        instances += res["configs"]
        if res["max_config_gap"] > max_cfg_gap:
            max_cfg_gap = res["max_config_gap"]
            best = (res["key"], res["gap_config"])
        ggap = res["graph_mlstar"] - res["graph_ml"]
        max_graph_gap = max(max_graph_gap, ggap)
        for x, val, tag in res["violations"]:
            violations.append(_witness_entry(res["key"], x) | {"kind": tag})

    extremal = _witness_entry(*best) if best is not None else None
    if kind == "assert":
        status = "pass" if not violations else "fail"
    else:
        status = "pass" if not violations else "finding"
    report = ScanReport(
        check=check,
        family=family if check != "pendant-core-bound" else "planted",
        max_n=max_n,
        instances_checked=instances,
        max_config_gap=max_cfg_gap,
        max_graph_gap=max_graph_gap,
        status=status,
        violations=violations,
        extremal=extremal,
        notes=f"loop masks: {loop_mode}",
        elapsed_ms=int((time.monotonic() - started) * 1000),
    )
    return report


# ---------------------------------------------------------------------------
# Worked-example reproduction: exact values, hard failure on mismatch.


def reproduce_example(example: str, m: int | None = None) -> dict:
    from .model import build_family

    checks = []

    def expect(name, got, want):
        checks.append({"quantity": name, "computed": got, "expected": want,
                       "match": got == want})

    if example == "tripartite":
        if m is None or not 1 <= m <= 2:
            raise ValueError("tripartite reproduction supports m in {1, 2}")
        g, x = build_family("complete_tripartite", m)
        ml = ml_table(g)
        mls = mlstar_table(g)
        expect("ml_x", int(ml[x]), 0)
        expect("mlstar_x", int(mls[x]), 2 * m)
        expect("graph_ml", int(ml.max()), 3 * m // 2)
        expect("graph_mlstar", int(mls.max()), 2 * m)
    elif example == "complete":
        if m is None or not 1 <= m <= 3:
            raise ValueError("complete reproduction supports m in {1, 2, 3}")
        g, _ = build_family("complete", 2 * m)
        ml = ml_table(g)
        mls = mlstar_table(g)
        ok_ml = all(int(ml[x]) == 0 for x in range(1 << g.n)
                    if light_number(x) == m)
        ok_star = all(int(mls[x]) == m for x in range(1 << g.n)
                      if light_number(x) == m)
        expect("ml_zero_on_weight_m", ok_ml, True)
        expect("mlstar_m_on_weight_m", ok_star, True)
        expect("graph_ml", int(ml.max()), 0)
        expect("graph_mlstar", int(mls.max()), m)
    elif example in ("fig1", "fig2"):
        g, x = build_family(example)
        r = ml_regular(g, x)
        s = ml_litonly(g, x)
        if not verify_ml_witness(g, x, r) or not verify_mlstar_witness(g, x, s):
            raise AssertionError("witness failed replay verification")
        want = {"fig1": (1, 2), "fig2": (0, 2)}[example]
        expect("ml_x", r.value, want[0])
        expect("mlstar_x", s.value, want[1])
    else:
        raise ValueError(f"unknown example {example!r}")

    return {
        "example": example,
        "m": m,
        "checks": checks,
        "ok": all(c["match"] for c in checks),
    }
