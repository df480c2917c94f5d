"""Weakly fundamental cycle bases with low edge multiplicity.

An ordered cycle basis is weakly fundamental when every cycle owns an edge
(its certificate) that no later cycle uses.  :func:`cycle_basis` builds one
with a randomized peeling procedure that repeats these steps on a shrinking
residual multigraph:

1. drop a vertex of degree one together with its edge;
2. at a vertex of degree two, either emit its self-loop or splice its two
   edges into one edge that remembers the original path;
3. otherwise find a short cycle, emit it and delete one of its edges chosen
   uniformly at random.

Each residual edge carries the path of original edges it stands for, so
every emitted cycle is a simple cycle of the input graph.  Self-loops and
parallel edges are handled up front (see :func:`preprocess`).
"""

from __future__ import annotations

import heapq
import math
import random
from collections import Counter, deque
from dataclasses import dataclass

from .core import xor_basis
from .errors import DegreeCapExceeded, RetriesExhausted

__all__ = [
    "Multigraph",
    "CycleBasis",
    "Preprocessed",
    "WeakReport",
    "MultiplicityStats",
    "IntersectionStats",
    "preprocess",
    "cycle_basis",
    "shortest_cycle",
    "local_short_cycle",
    "verify_weakly_fundamental",
    "verify_certificates",
    "verify_spanning",
    "is_simple_cycle",
    "multiplicity_stats",
    "basis_weight",
    "intersection_stats",
    "cycle_space_rank",
    "multiplicity_bound",
    "random_regular_graph",
    "bfs_fundamental_basis",
]


@dataclass(frozen=True)
class Multigraph:
    """Undirected multigraph; edge ``i`` is ``edges[i]`` and loops ``(u, u)`` are allowed."""

    v: int
    edges: tuple
    weights: tuple | None = None

    def __post_init__(self):
        pairs, weights = [], []
        has_w = False
        for e in self.edges:
            if len(e) == 3:
                has_w = True
                weights.append(e[2])
            else:
                weights.append(None)
            u, w = int(e[0]), int(e[1])
            if not (0 <= u < self.v and 0 <= w < self.v):
                raise ValueError(f"edge {e} has an endpoint outside 0..{self.v - 1}")
            pairs.append((u, w))
        if self.weights is not None:
            if has_w:
                raise ValueError("give weights either inline or separately, not both")
            weights = list(self.weights)
            if len(weights) != len(pairs):
                raise ValueError("one weight per edge required")
            has_w = True
        if has_w:
            weights = [1 if x is None else x for x in weights]
            if any(x < 0 for x in weights):
                raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "edges", tuple(pairs))
        object.__setattr__(self, "weights", tuple(weights) if has_w else None)

    def weight(self, e: int):
        return 1 if self.weights is None else self.weights[e]

    def degrees(self) -> list[int]:
        deg = [0] * self.v
        for u, w in self.edges:
            deg[u] += 1
            deg[w] += 1
        return deg

    def components(self) -> int:
        parent = list(range(self.v))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        count = self.v
        for u, w in self.edges:
            ru, rw = find(u), find(w)
            if ru != rw:
                parent[ru] = rw
                count -= 1
        return count


def cycle_space_rank(g: Multigraph) -> int:
    """Dimension of the cycle space: ``E - V + components``."""
    return len(g.edges) - g.v + g.components()


@dataclass(frozen=True)
class CycleBasis:
    cycles: tuple  # each a tuple of edge indices in walk order
    certificates: tuple
    attempts: int = 1
    max_multiplicity: int = 0
    seed: int = 0

    @property
    def retries_used(self) -> int:
        return self.attempts - 1

    def __len__(self) -> int:
        return len(self.cycles)


# ---------------------------------------------------------------- preprocessing

@dataclass(frozen=True)
class Preprocessed:
    simple: Multigraph  # loop-free, one edge per adjacent pair
    remap: tuple  # simple edge index -> original edge index
    extra_cycles: tuple  # (cycle, certificate) pairs, in basis order


def preprocess(g: Multigraph) -> Preprocessed:
    """Split off self-loops and parallel edges.

    Every self-loop becomes a one-edge cycle.  A class of parallel edges
    ``e1 < e2 < ... < ek`` contributes the two-edge cycles ``(ej, ej+1)`` with
    certificate ``ej`` and keeps ``ek`` as its representative, so no later
    cycle can touch an earlier certificate.  Loops come first, then pairs.
    """
    loops = []
    classes: dict = {}
    for i, (u, w) in enumerate(g.edges):
        if u == w:
            loops.append(((i,), i))
        else:
            classes.setdefault((min(u, w), max(u, w)), []).append(i)
    pairs = []
    reps = []
    for members in classes.values():
        for a, b in zip(members, members[1:]):
            pairs.append(((a, b), a))
        reps.append(members[-1])
    pairs.sort(key=lambda p: p[0])
    reps.sort()
    simple = Multigraph(g.v, tuple(g.edges[i] for i in reps))
    return Preprocessed(simple, tuple(reps), tuple(loops + pairs))


# ---------------------------------------------------------------- residual multigraph

class _Residual:
    """Mutable residual multigraph whose edges remember original paths."""

    def __init__(self, g: Multigraph):
        self.ends: dict = {}
        self.paths: dict = {}
        self.inc = [dict() for _ in range(g.v)]  # vertex -> {edge id: None}, insertion ordered
        self.deg = [0] * g.v
        self.next_id = 0
        for i, (u, w) in enumerate(g.edges):
            self.add(u, w, (i,))

    def add(self, u, w, path):
        eid = self.next_id
        self.next_id += 1
        self.ends[eid] = (u, w)
        self.paths[eid] = path
        self.inc[u][eid] = None
        self.inc[w][eid] = None
        self.deg[u] += 1
        self.deg[w] += 1
        return eid

    def remove(self, eid):
        u, w = self.ends.pop(eid)
        path = self.paths.pop(eid)
        self.inc[u].pop(eid, None)
        self.inc[w].pop(eid, None)
        self.deg[u] -= 1
        self.deg[w] -= 1
        return u, w, path

    def oriented(self, eid, start):
        """Path of ``eid`` read from endpoint ``start``, and the far endpoint."""
        u, w = self.ends[eid]
        path = self.paths[eid]
        if start == u:
            return path, w
        return path[::-1], u


def local_short_cycle(g: Multigraph, root: int = 0) -> list[int]:
    """Cycle found by breadth-first search from ``root``, as original edge indices.

    The search stops at the first non-tree edge.  When every vertex has
    degree at least three it stops within depth ``ceil(log2 V)``, so the cycle
    has at most ``2 ceil(log2 V) + 1`` edges.
    """
    res = _Residual(g)
    edges, start = _bfs_cycle_edges(res, root)
    return [p for eid, frm in _walk_cycle(res, edges, start) for p in res.oriented(eid, frm)[0]]


def _walk_cycle(res: _Residual, edges_in_order: list, start: int) -> list:
    """Orient a cyclic sequence of residual edges starting at ``start``."""
    out = []
    cur = start
    for eid in edges_in_order:
        out.append((eid, cur))
        a, b = res.ends[eid]
        cur = b if a == cur else a
    if cur != start:
        raise AssertionError("edges do not close up into a cycle")
    return out


def _bfs_cycle_edges(res: _Residual, root: int):
    """Edge list and start vertex of the cycle found by :func:`local_short_cycle`."""
    parent = {root: (None, None)}
    depth = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for eid in res.inc[u]:
            if eid == parent[u][1]:
                continue
            a, b = res.ends[eid]
            w = b if a == u else a
            if w in parent:
                up_u, up_w = [], []
                x, y = u, w
                while depth[x] > depth[y]:
                    up_u.append(parent[x][1])
                    x = parent[x][0]
                while depth[y] > depth[x]:
                    up_w.append(parent[y][1])
                    y = parent[y][0]
                while x != y:
                    up_u.append(parent[x][1])
                    x = parent[x][0]
                    up_w.append(parent[y][1])
                    y = parent[y][0]
                return up_u[::-1] + [eid] + up_w, x
            parent[w] = (u, eid)
            depth[w] = depth[u] + 1
            queue.append(w)
    raise ValueError("residual graph component is acyclic")


def _girth_cycle_edges(res: _Residual):
    """Shortest cycle of the residual graph by a BFS per edge, first in edge order."""
    best = None
    for eid in sorted(res.ends):
        u, w = res.ends[eid]
        if u == w:
            return [eid], u
        path = _bfs_path(res, w, u, skip=eid, limit=None if best is None else len(best[0]) - 1)
        if path is not None and (best is None or len(path) + 1 < len(best[0])):
            best = ([eid] + path, u)
    if best is None:
        raise ValueError("graph is acyclic")
    return best


def _bfs_path(res: _Residual, src, dst, skip, limit):
    """Edge ids of a shortest src->dst path avoiding ``skip``, or None."""
    parent = {src: None}
    depth = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if limit is not None and depth[u] >= limit:
            break
        for eid in res.inc[u]:
            if eid == skip:
                continue
            a, b = res.ends[eid]
            w = b if a == u else a
            if w in parent:
                continue
            parent[w] = (u, eid)
            depth[w] = depth[u] + 1
            if w == dst:
                path = []
                x = w
                while parent[x] is not None:
                    path.append(parent[x][1])
                    x = parent[x][0]
                return path[::-1]
            queue.append(w)
    return None


def shortest_cycle(g: Multigraph) -> list[int]:
    """A minimum-length simple cycle, as edge indices in walk order.

    For every edge the shortest path between its endpoints avoiding it is
    found by breadth-first search; the first minimal cycle in edge order wins.
    """
    res = _Residual(g)
    edges, start = _girth_cycle_edges(res)
    return [p for eid, frm in _walk_cycle(res, edges, start) for p in res.oriented(eid, frm)[0]]


# ---------------------------------------------------------------- main algorithm

def multiplicity_bound(v: int) -> int:
    """Default ceiling on edge multiplicity: ``4 * ceil(log2 V)^2``."""
    lg = max(1, math.ceil(math.log2(max(v, 2))))
    return 4 * lg * lg


def _peel(g: Multigraph, rng: random.Random, search: str) -> tuple[list, list]:
    res = _Residual(g)
    cycles, certs = [], []
    deg1, deg2 = [], []
    alive = list(range(g.v))  # already a heap
    for x in range(g.v):
        if res.deg[x] == 1:
            deg1.append(x)
        elif res.deg[x] == 2:
            deg2.append(x)
    heapq.heapify(deg1)
    heapq.heapify(deg2)

    def touched(x):
        d = res.deg[x]
        if d == 1:
            heapq.heappush(deg1, x)
        elif d == 2:
            heapq.heappush(deg2, x)

    def emit(walk, removed):
        cyc = []
        for eid, frm in walk:
            cyc.extend(res.oriented(eid, frm)[0])
        cycles.append(tuple(cyc))
        certs.append(res.paths[removed][0])
        u, w, _ = res.remove(removed)
        touched(u)
        touched(w)

    while True:
        while deg1 and res.deg[deg1[0]] != 1:
            heapq.heappop(deg1)
        if deg1:
            x = heapq.heappop(deg1)
            (eid,) = res.inc[x]
            u, w, _ = res.remove(eid)
            touched(w if u == x else u)
            continue
        while deg2 and res.deg[deg2[0]] != 2:
            heapq.heappop(deg2)
        if deg2:
            x = heapq.heappop(deg2)
            eids = list(res.inc[x])
            if len(eids) == 1:  # a self-loop is the only edge
                emit(_walk_cycle(res, eids, x), eids[0])
                continue
            e1, e2 = eids
            p1, a = res.oriented(e1, x)
            p2, b = res.oriented(e2, x)
            res.remove(e1)
            res.remove(e2)
            res.add(a, b, p1[::-1] + p2)
            continue
        while alive and res.deg[alive[0]] == 0:
            heapq.heappop(alive)
        if not alive:
            break
        if search == "local":
            edges, start = _bfs_cycle_edges(res, alive[0])
        elif search == "girth":
            edges, start = _girth_cycle_edges(res)
        else:
            raise ValueError(f"unknown cycle search {search!r}")
        walk = _walk_cycle(res, edges, start)
        emit(walk, edges[rng.randrange(len(edges))])
    return cycles, certs


def cycle_basis(
    g: Multigraph,
    seed: int = 0,
    max_retries: int = 32,
    degree_cap: int = 16,
    bound: int | None = None,
    search: str = "local",
) -> CycleBasis:
    """Weakly fundamental cycle basis whose max edge multiplicity is at most ``bound``.

    ``bound`` defaults to :func:`multiplicity_bound`.  Attempt ``k`` (from 0)
    uses the generator seeded with ``seed + k``; if no attempt meets the
    bound, :class:`RetriesExhausted` carries the best multiplicity seen.
    ``search`` picks the short-cycle finder: ``"local"`` (breadth-first from
    the lowest live vertex) or ``"girth"`` (a true shortest cycle each time).
    """
    for x, d in enumerate(g.degrees()):
        if d > degree_cap:
            raise DegreeCapExceeded(x, d, degree_cap)
    if bound is None:
        bound = multiplicity_bound(g.v)
    pre = preprocess(g)
    best = None
    for attempt in range(max_retries):
        rng = random.Random(seed + attempt)
        cycles, certs = _peel(pre.simple, rng, search)
        all_cycles = [c for c, _ in pre.extra_cycles] + [tuple(pre.remap[e] for e in c) for c in cycles]
        all_certs = [e for _, e in pre.extra_cycles] + [pre.remap[e] for e in certs]
        counts = Counter(e for c in all_cycles for e in c)
        worst = max(counts.values(), default=0)
        best = worst if best is None else min(best, worst)
        if worst <= bound:
            return CycleBasis(tuple(all_cycles), tuple(all_certs), attempt + 1, worst, seed + attempt)
    raise RetriesExhausted(max_retries, best)


# ---------------------------------------------------------------- verifiers and statistics

def is_simple_cycle(g: Multigraph, cycle) -> bool:
    """Whether ``cycle`` is a closed walk with no repeated vertex or edge."""
    if not cycle or len(set(cycle)) != len(cycle):
        return False
    u0, w0 = g.edges[cycle[0]]
    for start in (u0, w0):
        cur, seen, ok = start, [], True
        for e in cycle:
            a, b = g.edges[e]
            seen.append(cur)
            if cur == a:
                cur = b
            elif cur == b:
                cur = a
            else:
                ok = False
                break
        if ok and cur == start and len(set(seen)) == len(seen):
            return True
    return False


@dataclass(frozen=True)
class WeakReport:
    ok: bool
    failing_index: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_weakly_fundamental(g: Multigraph, basis) -> WeakReport:
    """Every cycle must own an edge absent from all later cycles."""
    cycles = basis.cycles if isinstance(basis, CycleBasis) else basis
    later: set = set()
    failing = None
    for i in range(len(cycles) - 1, -1, -1):
        if not set(cycles[i]) - later:
            failing = i
        later.update(cycles[i])
    return WeakReport(failing is None, failing)


def verify_certificates(g: Multigraph, basis: CycleBasis) -> WeakReport:
    """Each certificate lies in its cycle and in no later one; each cycle is simple."""
    later: set = set()
    failing = None
    for i in range(len(basis.cycles) - 1, -1, -1):
        cyc = basis.cycles[i]
        if basis.certificates[i] not in cyc or basis.certificates[i] in later or not is_simple_cycle(g, cyc):
            failing = i
        later.update(cyc)
    return WeakReport(failing is None, failing)


def _in_cycle_space(g: Multigraph, cycle) -> bool:
    parity = Counter()
    for e in cycle:
        u, w = g.edges[e]
        parity[u] ^= 1
        parity[w] ^= 1
    return not any(parity.values())


def verify_spanning(g: Multigraph, basis) -> bool:
    """F2 rank of the cycles equals the cycle-space rank, and every cycle is a cycle."""
    cycles = basis.cycles if isinstance(basis, CycleBasis) else basis
    if not all(_in_cycle_space(g, c) for c in cycles):
        return False
    masks = [sum(1 << e for e in set(c)) for c in cycles]
    return len(xor_basis(masks)) == cycle_space_rank(g)


@dataclass(frozen=True)
class MultiplicityStats:
    per_edge: tuple
    max: int
    histogram: dict


def multiplicity_stats(basis, g: Multigraph) -> MultiplicityStats:
    cycles = basis.cycles if isinstance(basis, CycleBasis) else basis
    counts = [0] * len(g.edges)
    for c in cycles:
        for e in c:
            counts[e] += 1
    return MultiplicityStats(tuple(counts), max(counts, default=0), dict(sorted(Counter(counts).items())))


def basis_weight(basis, g: Multigraph):
    cycles = basis.cycles if isinstance(basis, CycleBasis) else basis
    return sum(g.weight(e) for c in cycles for e in c)


@dataclass(frozen=True)
class IntersectionStats:
    per_cycle: tuple  # number of later cycles sharing a vertex
    max: int


def intersection_stats(basis, g: Multigraph) -> IntersectionStats:
    cycles = basis.cycles if isinstance(basis, CycleBasis) else basis
    verts = [{x for e in c for x in g.edges[e]} for c in cycles]
    by_vertex: dict = {}
    for i, vs in enumerate(verts):
        for x in vs:
            by_vertex.setdefault(x, []).append(i)
    per = []
    for i, vs in enumerate(verts):
        later = set()
        for x in vs:
            later.update(j for j in by_vertex[x] if j > i)
        per.append(len(later))
    return IntersectionStats(tuple(per), max(per, default=0))


def bfs_fundamental_basis(g: Multigraph) -> list[tuple]:
    """Fundamental cycles of a breadth-first spanning forest, one per non-tree edge."""
    parent: dict = {}
    depth: dict = {}
    inc = [[] for _ in range(g.v)]
    for i, (u, w) in enumerate(g.edges):
        inc[u].append(i)
        if w != u:
            inc[w].append(i)
    tree = set()
    for root in range(g.v):
        if root in parent:
            continue
        parent[root] = (None, None)
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for e in inc[u]:
                a, b = g.edges[e]
                w = b if a == u else a
                if w not in parent:
                    parent[w] = (u, e)
                    depth[w] = depth[u] + 1
                    tree.add(e)
                    queue.append(w)
    out = []
    for e, (u, w) in enumerate(g.edges):
        if e in tree:
            continue
        up_u, up_w = [], []
        x, y = u, w
        while depth[x] > depth[y]:
            up_u.append(parent[x][1])
            x = parent[x][0]
        while depth[y] > depth[x]:
            up_w.append(parent[y][1])
            y = parent[y][0]
        while x != y:
            up_u.append(parent[x][1])
            x = parent[x][0]
            up_w.append(parent[y][1])
            y = parent[y][0]
        out.append(tuple(up_u[::-1] + [e] + up_w))
    return out


def random_regular_graph(degree: int, v: int, seed: int = 0, weights: str | None = None) -> Multigraph:
    """Uniform simple ``degree``-regular graph by the pairing model with restarts.

    ``weights="random"`` attaches independent uniform integer weights in 1..100.
    """
    if (degree * v) % 2 or degree >= v:
        raise ValueError(f"no simple {degree}-regular graph on {v} vertices")
    rng = random.Random(seed)
    while True:
        stubs = [x for x in range(v) for _ in range(degree)]
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for k in range(0, len(stubs), 2):
            a, b = stubs[k], stubs[k + 1]
            key = (min(a, b), max(a, b))
            if a == b or key in edges:
                ok = False
                break
            edges.add(key)
        if ok:
            break
    ordered = sorted(edges)
    if weights == "random":
        return Multigraph(v, tuple((a, b, rng.randint(1, 100)) for a, b in ordered))
    return Multigraph(v, tuple(ordered))
