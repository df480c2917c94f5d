"""Combinatorial handle skeleton built from a lifted three-term complex.

Handles are plain records carrying an index, an origin and a list of signed
attachments; no geometry is stored.  The build runs through the stages

``X``      a 0-handle and a 3-handle for every X-stabilizer;
``QX``     a "4-handle" per qubit, attached to X 3-handles with unit degrees
           that add up to the lifted column of the first boundary;
``ZQX``    a "5-handle" per Z-stabilizer plus the internal 1- and 2-handles
           that make each "4-" and "5-handle" an honest handlebody;
``ZQX+``   2-handles killing the fundamental group along a weakly
           fundamental cycle basis of the 1-skeleton;
``double`` a mirrored copy in which index ``k`` becomes ``11 - k``.

Build functions return new skeletons; verifiers and audits are pure.  The
module also has :func:`mc_push`, a Monte Carlo estimate of how much a
random radial projection to the unit sphere inflates the area of a small
flat simplex.
"""

from __future__ import annotations

import math
import random
from collections import Counter, deque
from dataclasses import dataclass, replace

import numpy as np

from .core import ChainComplexZ, IntMatrix
from .decongestion import CycleBasis, Multigraph, cycle_basis
from .errors import DimensionMismatch, PairingError, StageError

__all__ = [
    "HandleRecord",
    "HandleSkeleton",
    "PairingWitness",
    "MiddleReport",
    "CongestionReport",
    "PushEstimate",
    "build_X",
    "attach_qubit_handles",
    "euler_pairing",
    "attach_z_handles",
    "kill_pi1",
    "height_coloring",
    "double",
    "verify_middle_complex",
    "congestion_audit",
    "volume_report",
    "build_skeleton",
    "shared_zero_handle_skeleton",
    "CONGESTION_THRESHOLD",
    "to_dot",
    "mc_push",
    "STAGES",
]

STAGES = ("X", "QX", "ZQX", "ZQX+", "double")

# contact count above which a handle is reported as congested
CONGESTION_THRESHOLD = 12


@dataclass(frozen=True)
class HandleRecord:
    """One handle.

    ``origin`` is a tuple such as ``("X", 3)``, ``("qubit", 7)``, ``("Z", 2)``,
    ``("internal-1", owner id, slot)``, ``("internal-2", owner id, slot)`` or
    ``("pi1-2", j)``.  ``attachments`` lists ``(other id, signed degree)`` pairs,
    one per unit attachment.  ``cells`` is the ordered list of handle ids a
    fundamental-group disk runs through (empty for other handles).
    """

    id: int
    index: int
    origin: tuple
    attachments: tuple = ()
    cells: tuple = ()
    mirror_of: int | None = None


@dataclass(frozen=True)
class HandleSkeleton:
    handles: tuple
    stage: str
    x_ids: tuple = ()  # (0-handle id, 3-handle id) per X-stabilizer
    qubit_ids: tuple = ()  # 4-handle id per qubit
    z_ids: tuple = ()  # 5-handle id per Z-stabilizer
    pairings: tuple = ()  # PairingWitness per Z-stabilizer
    pi1_graph: Multigraph | None = None
    pi1_basis: CycleBasis | None = None
    pi1_edge_handles: tuple = ()  # handle id standing for each 1-skeleton edge
    colors: tuple = ()

    def count_by_index(self) -> dict:
        return dict(sorted(Counter(h.index for h in self.handles).items()))

    def of_origin(self, kind: str) -> list:
        return [h for h in self.handles if h.origin[0] == kind]

    @property
    def max_contact(self) -> int:
        return max(_contact_counts(self, skip_disks=False), default=0)


def _require(sk: HandleSkeleton, *stages: str) -> None:
    if sk.stage not in stages:
        raise StageError(f"operation needs stage {' or '.join(stages)}, skeleton is at {sk.stage}")


def _require_code_complex(cz: ChainComplexZ) -> None:
    if len(cz.dims) != 3:
        raise DimensionMismatch(f"skeleton needs a three-term complex, got {len(cz.dims)} degrees")


# ---------------------------------------------------------------- stages

def build_X(cz: ChainComplexZ) -> HandleSkeleton:
    _require_code_complex(cz)
    handles, ids = [], []
    for i in range(cz.dims[0]):
        h0 = len(handles)
        handles.append(HandleRecord(h0, 0, ("X", i)))
        handles.append(HandleRecord(h0 + 1, 3, ("X", i), ((h0, 1),)))
        ids.append((h0, h0 + 1))
    return HandleSkeleton(tuple(handles), "X", x_ids=tuple(ids))


def shared_zero_handle_skeleton(cz: ChainComplexZ) -> HandleSkeleton:
    """X stage built the wrong way: every 3-handle hangs off one shared 0-handle.

    This is the congested layout that the one-0-handle-per-stabilizer design
    avoids; the shared handle touches every other handle.
    """
    _require_code_complex(cz)
    handles = [HandleRecord(0, 0, ("X", 0))]
    ids = []
    for i in range(cz.dims[0]):
        handles.append(HandleRecord(i + 1, 3, ("X", i), ((0, 1),)))
        ids.append((0, i + 1))
    return HandleSkeleton(tuple(handles), "X", x_ids=tuple(ids))


def _unit_attachments(column: dict, target) -> tuple:
    out = []
    for row in sorted(column):
        val = column[row]
        sign = 1 if val > 0 else -1
        out.extend([(target(row), sign)] * abs(val))
    return tuple(out)


def attach_qubit_handles(sk: HandleSkeleton, cz: ChainComplexZ) -> HandleSkeleton:
    """Add one record per qubit with ``|entry|`` unit attachments per nonzero entry."""
    _require(sk, "X")
    _require_code_complex(cz)
    d1 = cz.boundaries[0]
    handles = list(sk.handles)
    ids = []
    for i in range(cz.dims[1]):
        hid = len(handles)
        att = _unit_attachments(d1.col_dicts[i], lambda a: sk.x_ids[a][1])
        handles.append(HandleRecord(hid, 4, ("qubit", i), att))
        ids.append(hid)
    return replace(sk, handles=tuple(handles), stage="QX", qubit_ids=tuple(ids))


@dataclass(frozen=True)
class PairingWitness:
    """Resolution of one Z-stabilizer's boundary into embedded pieces.

    ``red`` lists the qubit copies as ``(qubit, sign)``.  ``half_edges`` lists
    ``(red copy, X-stabilizer, sign)``.  ``pairs`` matches a positive and a
    negative half-edge at the same X-stabilizer.  ``components`` groups red
    copies joined by pairs, and ``betti1`` is the cycle rank of each group.
    """

    z_stab: int
    red: tuple
    half_edges: tuple
    black_sums: dict
    pairs: tuple
    components: tuple
    betti1: tuple
    spanning_edges: tuple = ()  # pair indices forming a spanning forest
    extra_edges: tuple = ()  # the remaining pair indices, one per independent cycle


def euler_pairing(sk: HandleSkeleton, cz: ChainComplexZ, k: int, policy: str = "first-fit", seed: int = 0) -> PairingWitness:
    """Pair opposite-sign half-edges at each X-stabilizer around Z-stabilizer ``k``.

    ``policy`` is ``"first-fit"`` (index order) or ``"random"`` (shuffled with
    ``seed``).  A nonzero signed sum at some X-stabilizer means the lift is
    not admissible and raises :class:`PairingError`.
    """
    _require(sk, "QX", "ZQX", "ZQX+", "double")
    _require_code_complex(cz)
    d1, d2 = cz.boundaries
    column = d2.col_dicts[k]
    red = []
    half = []
    for qubit in sorted(column):
        c = column[qubit]
        sign = 1 if c > 0 else -1
        for _ in range(abs(c)):
            rid = len(red)
            red.append((qubit, sign))
            for x in sorted(d1.col_dicts[qubit]):
                d = d1.col_dicts[qubit][x]
                s = 1 if d > 0 else -1
                for _ in range(abs(d)):
                    half.append((rid, x, sign * s))
    sums: dict = {}
    for _, x, s in half:
        sums[x] = sums.get(x, 0) + s
    for x in sorted(sums):
        if sums[x]:
            raise PairingError(k, x, sums[x])
    rng = random.Random(seed)
    by_black: dict = {}
    for h, (_, x, s) in enumerate(half):
        by_black.setdefault(x, ([], []))[0 if s > 0 else 1].append(h)
    pairs = []
    for x in sorted(by_black):
        plus, minus = by_black[x]
        if policy == "random":
            rng.shuffle(minus)
        elif policy != "first-fit":
            raise ValueError(f"unknown pairing policy {policy!r}")
        pairs.extend((a, b, x) for a, b in zip(plus, minus))
    # components of the graph on red copies whose edges are the pairs
    adj = [[] for _ in red]
    for p, (a, b, _) in enumerate(pairs):
        ra, rb = half[a][0], half[b][0]
        adj[ra].append((rb, p))
        adj[rb].append((ra, p))
    comp_of = [-1] * len(red)
    comps, tree = [], []
    for start in range(len(red)):
        if comp_of[start] >= 0:
            continue
        cid = len(comps)
        comp_of[start] = cid
        members = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w, p in adj[u]:
                if comp_of[w] < 0:
                    comp_of[w] = cid
                    members.append(w)
                    tree.append(p)
                    queue.append(w)
        comps.append(tuple(sorted(members)))
    edges_per = Counter(comp_of[half[a][0]] for a, _, _ in pairs)
    betti = tuple(edges_per[c] - len(m) + 1 for c, m in enumerate(comps))
    tree_set = set(tree)
    extra = tuple(p for p in range(len(pairs)) if p not in tree_set)
    return PairingWitness(
        k, tuple(red), tuple(half), sums, tuple(pairs), tuple(comps), betti, tuple(sorted(tree)), extra
    )


def _heap_tree_edges(n: int) -> list[tuple[int, int]]:
    """Edges ``(parent, child)`` of the binary-heap tree on ``n`` nodes; degrees stay <= 3."""
    return [((t - 1) // 2, t) for t in range(1, n)]


def attach_z_handles(sk: HandleSkeleton, cz: ChainComplexZ, policy: str = "first-fit", seed: int = 0) -> HandleSkeleton:
    """Add 5-handles with their internal 1- and 2-handles, and the qubit internal 1-handles."""
    _require(sk, "QX")
    _require_code_complex(cz)
    handles = list(sk.handles)

    def new(index, origin, attachments=(), cells=()):
        hid = len(handles)
        handles.append(HandleRecord(hid, index, origin, tuple(attachments), tuple(cells)))
        return hid

    # qubit side: f(i) - 1 one-handles joining the boundary spheres of each 4-handle
    for i, qid in enumerate(sk.qubit_ids):
        ports = sk.handles[qid].attachments
        for slot, (a, b) in enumerate(_heap_tree_edges(len(ports))):
            new(1, ("internal-1", qid, slot), [(qid, 1), (ports[a][0], 1), (ports[b][0], 1)], cells=(a, b))
    d2 = cz.boundaries[1]
    z_ids, pairings = [], []
    for k in range(cz.dims[2]):
        att = _unit_attachments(d2.col_dicts[k], lambda i: sk.qubit_ids[i])
        zid = new(5, ("Z", k) if att else ("top", k), att)
        z_ids.append(zid)
        wit = euler_pairing(sk, cz, k, policy, seed + k)
        pairings.append(wit)
        for slot, (a, b) in enumerate(_heap_tree_edges(len(wit.components))):
            new(1, ("internal-1", zid, slot), [(zid, 1)], cells=(a, b))
        for slot, p in enumerate(wit.extra_edges):
            ha, hb, _ = wit.pairs[p]
            qa = sk.qubit_ids[wit.red[wit.half_edges[ha][0]][0]]
            qb = sk.qubit_ids[wit.red[wit.half_edges[hb][0]][0]]
            new(2, ("internal-2", zid, slot), [(zid, 1), (qa, 1), (qb, 1)])
    return replace(sk, handles=tuple(handles), stage="ZQX", z_ids=tuple(z_ids), pairings=tuple(pairings))


def one_skeleton(sk: HandleSkeleton) -> tuple[Multigraph, tuple]:
    """The graph whose cycles generate the fundamental group of the ZQX stage.

    Vertices are the X 0-handles followed by one hub per boundary component
    of every 5-handle.  Edges are the qubit internal 1-handles (joining the
    X-stabilizers of the two spheres they connect), the 5-handle internal
    1-handles (joining hubs), and one arc from each hub to the X-stabilizer of
    its first half-edge.  The second value names the handle behind each edge.
    """
    _require(sk, "ZQX", "ZQX+", "double")
    x_index = {h3: i for i, (_, h3) in enumerate(sk.x_ids)}
    hub_base = {}
    nv = len(sk.x_ids)
    for k, wit in enumerate(sk.pairings):
        hub_base[sk.z_ids[k]] = nv
        nv += len(wit.components)
    edges, names = [], []
    for h in sk.handles:
        if h.origin[0] != "internal-1" or h.mirror_of is not None:
            continue
        owner = h.origin[1]
        if sk.handles[owner].origin[0] == "qubit":
            edges.append((x_index[h.attachments[1][0]], x_index[h.attachments[2][0]]))
        else:
            base = hub_base[owner]
            edges.append((base + h.cells[0], base + h.cells[1]))
        names.append(h.id)
    for k, wit in enumerate(sk.pairings):
        for c, members in enumerate(wit.components):
            first = next(x for rid, x, _ in wit.half_edges if rid == members[0]) if any(
                rid == members[0] for rid, _, _ in wit.half_edges
            ) else None
            if first is not None:
                edges.append((hub_base[sk.z_ids[k]] + c, first))
                names.append(sk.z_ids[k])
    return Multigraph(nv, tuple(edges)), tuple(names)


def kill_pi1(sk: HandleSkeleton, seed: int = 0, max_retries: int = 32, degree_cap: int = 64) -> HandleSkeleton:
    """Attach one 2-handle along each cycle of a weakly fundamental basis of the 1-skeleton."""
    _require(sk, "ZQX")
    graph, names = one_skeleton(sk)
    basis = cycle_basis(graph, seed=seed, max_retries=max_retries, degree_cap=max(degree_cap, max(graph.degrees(), default=0)))
    handles = list(sk.handles)
    for j, cyc in enumerate(basis.cycles):
        cells = []
        for e in cyc:
            u, w = graph.edges[e]
            cells.append(names[e])
            for x in (u, w):
                if x < len(sk.x_ids):
                    cells.append(sk.x_ids[x][0])
        cells = tuple(dict.fromkeys(cells))
        hid = len(handles)
        handles.append(HandleRecord(hid, 2, ("pi1-2", j), tuple((c, 1) for c in cells), cells))
    return replace(
        sk, handles=tuple(handles), stage="ZQX+", pi1_graph=graph, pi1_basis=basis, pi1_edge_handles=names
    )


def height_coloring(sk: HandleSkeleton, load: int = 2) -> tuple[tuple, int]:
    """First-fit colors for the fundamental-group disks.

    Disks are taken in basis order; each gets the smallest color that appears
    fewer than ``load`` times among disks already through every cell it uses.
    """
    _require(sk, "ZQX+", "double")
    disks = [h for h in sk.handles if h.origin[0] == "pi1-2" and h.mirror_of is None]
    used: dict = {}  # cell -> Counter of colors
    colors = []
    for d in disks:
        c = 0
        while any(used.get(cell, Counter())[c] >= load for cell in d.cells):
            c += 1
        for cell in d.cells:
            used.setdefault(cell, Counter())[c] += 1
        colors.append(c)
    return tuple(colors), (max(colors) + 1 if colors else 0)


def double(sk: HandleSkeleton) -> HandleSkeleton:
    """Append a mirror of every handle with index ``11 - k`` and mirrored attachments."""
    _require(sk, "ZQX+")
    n = len(sk.handles)
    mirrored = [
        HandleRecord(
            n + h.id,
            11 - h.index,
            h.origin,
            tuple((n + o, d) for o, d in h.attachments),
            tuple(n + c for c in h.cells),
            mirror_of=h.id,
        )
        for h in sk.handles
    ]
    return replace(sk, handles=sk.handles + tuple(mirrored), stage="double")


def build_skeleton(cz: ChainComplexZ, stage: str = "double", seed: int = 0, policy: str = "first-fit") -> HandleSkeleton:
    """Run the stages in order up to ``stage``."""
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    sk = build_X(cz)
    steps = [
        lambda s: attach_qubit_handles(s, cz),
        lambda s: attach_z_handles(s, cz, policy, seed),
        lambda s: kill_pi1(s, seed),
        double,
    ]
    for step in steps[: STAGES.index(stage)]:
        sk = step(sk)
    if sk.stage in ("ZQX+", "double"):
        colors, _ = height_coloring(sk)
        sk = replace(sk, colors=colors)
    return sk


# ---------------------------------------------------------------- verifiers and audits

@dataclass(frozen=True)
class MiddleReport:
    ok: bool
    mismatch: tuple | None = None  # (which boundary, row, col, expected, found)

    def __bool__(self) -> bool:
        return self.ok


def _degree_matrix(sk: HandleSkeleton, sources, targets, rows: int, cols: int) -> IntMatrix:
    row_of = {hid: r for r, hid in enumerate(targets)}
    acc: dict = {}
    for c, hid in enumerate(sources):
        for other, deg in sk.handles[hid].attachments:
            if other in row_of:
                key = (row_of[other], c)
                acc[key] = acc.get(key, 0) + deg
    return IntMatrix.from_dict(rows, cols, acc)


def verify_middle_complex(sk: HandleSkeleton, cz: ChainComplexZ) -> MiddleReport:
    """Compare attachment degrees 5 -> 4 and 4 -> 3 with the lifted boundaries."""
    _require(sk, "ZQX", "ZQX+", "double")
    _require_code_complex(cz)
    x3 = [h3 for _, h3 in sk.x_ids]
    checks = (
        ("d2", _degree_matrix(sk, sk.z_ids, sk.qubit_ids, cz.dims[1], cz.dims[2]), cz.boundaries[1]),
        ("d1", _degree_matrix(sk, sk.qubit_ids, x3, cz.dims[0], cz.dims[1]), cz.boundaries[0]),
    )
    for name, found, expected in checks:
        if found.shape != expected.shape:
            return MiddleReport(False, (name, None, None, expected.shape, found.shape))
        if found != expected:
            fd, ed = found.as_dict, expected.as_dict
            key = min(set(fd) ^ set(ed) | {k for k in fd if k in ed and fd[k] != ed[k]})
            return MiddleReport(False, (name, key[0], key[1], ed.get(key, 0), fd.get(key, 0)))
    return MiddleReport(True)


@dataclass(frozen=True)
class CongestionReport:
    per_handle: tuple
    max: int
    histogram: dict
    mode: str
    congested: bool = False


def _contact_counts(sk: HandleSkeleton, skip_disks: bool) -> list[int]:
    counts = [0] * len(sk.handles)
    for h in sk.handles:
        if skip_disks and h.origin[0] == "pi1-2":
            continue
        for other, _ in h.attachments:
            counts[h.id] += 1
            counts[other] += 1
    return counts


def congestion_audit(sk: HandleSkeleton, mode: str = "subdivided", load: int = 2,
                     threshold: int = CONGESTION_THRESHOLD) -> CongestionReport:
    """Number of attachment contacts per handle.

    ``raw`` counts every attachment incidence.  ``subdivided`` models the
    height subdivision: every disk is cut into one segment per cell it
    crosses (each segment touches its cell and at most two neighbouring
    segments), and a cell's disk contacts are counted per height subcell,
    which never exceeds ``load``.
    """
    if mode == "raw":
        counts = _contact_counts(sk, skip_disks=False)
    elif mode == "subdivided":
        counts = _contact_counts(sk, skip_disks=True)
        colors = sk.colors
        if not colors and sk.stage in ("ZQX+", "double"):
            colors, _ = height_coloring(sk, load)
        disks = [h for h in sk.handles if h.origin[0] == "pi1-2"]
        slot = {d.id: j for j, d in enumerate(h for h in disks if h.mirror_of is None)}
        per_cell: dict = {}
        for h in disks:
            base = h.mirror_of if h.mirror_of is not None else h.id
            color = colors[slot[base]] if colors else 0
            for cell in h.cells:
                per_cell.setdefault(cell, Counter())[color] += 1
            counts[h.id] = min(3, len(h.cells)) if h.cells else 0
        for cell, by_color in per_cell.items():
            counts[cell] += max(by_color.values())
    else:
        raise ValueError(f"unknown audit mode {mode!r}")
    worst = max(counts, default=0)
    return CongestionReport(tuple(counts), worst, dict(sorted(Counter(counts).items())), mode, worst > threshold)


def volume_report(sk: HandleSkeleton, dims: tuple | None = None) -> dict:
    """Handle totals against the size of the source complex.

    ``pi1_segments`` counts one piece per cell crossed by each fundamental-group
    disk; ``subdivided_total`` replaces each disk by its pieces, so
    ``subdivided_total - total_handles == pi1_segments - pi1_handles``.
    """
    disks = [h for h in sk.handles if h.origin[0] == "pi1-2"]
    total = len(sk.handles)
    segments = sum(max(1, len(h.cells)) for h in disks)
    if dims is None:
        dims = (len(sk.x_ids), len(sk.qubit_ids), len(sk.z_ids))
    size = sum(dims)
    layers = (max(sk.colors) + 1) if sk.colors else 1
    return {
        "total_handles": total,
        "complex_size": size,
        "volume_ratio": (total / size) if size else 0.0,
        "pi1_handles": len(disks),
        "pi1_segments": segments,
        "subdivided_total": total - len(disks) + segments,
        "height_layers": layers,
        "b2_ball_volume_term": size ** (11 / 9) if size else 0.0,
        "counts_by_index": {str(k): v for k, v in sk.count_by_index().items()},
    }


def to_dot(sk: HandleSkeleton) -> str:
    """Contact graph in Graphviz DOT syntax."""
    lines = ["graph skeleton {"]
    for h in sk.handles:
        label = f"{h.index}:{'/'.join(str(x) for x in h.origin)}"
        lines.append(f'  h{h.id} [label="{label}"];')
    seen = Counter()
    for h in sk.handles:
        for other, _ in h.attachments:
            seen[min(h.id, other), max(h.id, other)] += 1
    for (a, b), mult in sorted(seen.items()):
        extra = f' [label="{mult}"]' if mult > 1 else ""
        lines.append(f"  h{a} -- h{b}{extra};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- radial projection estimate

@dataclass(frozen=True)
class PushEstimate:
    k: int
    n: int
    samples: int
    mean: float
    stderr: float
    ceiling: float
    finite: bool
    below_ceiling: bool
    source_area: float


def regular_simplex(k: int, n: int, center=None) -> np.ndarray:
    """Vertices (rows) of a regular ``k``-simplex with unit edges in the first ``k`` axes.

    The barycenter sits at ``center``; the default shifts it by 0.25 along
    axis ``k``, off the simplex's own plane.
    """
    # standard simplex in R^{k+1}, centered, then rotated into R^k
    std = np.eye(k + 1) / math.sqrt(2.0)
    std = std - std.mean(axis=0)
    _, _, vt = np.linalg.svd(std)
    coords = std @ vt[:k].T
    verts = np.zeros((k + 1, n))
    verts[:, :k] = coords
    if center is None:
        center = np.zeros(n)
        center[k] = 0.25
    return verts + np.asarray(center, dtype=float)


def _gauss(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return (x + 1) / 2, w / 2


def _star_rule(verts: np.ndarray, center: np.ndarray, scale: np.ndarray, order: int):
    """Signed polar quadrature on a simplex, one rule per row of ``center``.

    ``verts`` holds the simplex vertices in plane coordinates.  The simplex is
    split into signed cones from the foot ``q`` of ``center`` on its affine
    hull; each facet is integrated by the same rule recursively, and along
    every ray from ``q`` the radius is substituted by ``r = D tan(phi)``,
    where ``D`` is the distance from the true peak to the affine hull.  The
    result integrates functions that peak like an inverse power of the
    distance to a point just off the simplex.

    Returns points of shape (N, P, k) and signed weights of shape (N, P).
    """
    n_rows, k = center.shape
    m = len(verts) - 1
    if m == 0:
        return np.broadcast_to(verts[0], (n_rows, 1, k)).copy(), np.ones((n_rows, 1))
    base = verts[0]
    basis, _ = np.linalg.qr((verts[1:] - base).T)
    q = base + ((center - base) @ basis) @ basis.T
    dist = np.sqrt(scale ** 2 + np.sum((center - q) ** 2, axis=1))
    safe = np.where(dist > 0, dist, 1.0)
    phi_x, phi_w = _gauss(order)
    points, weights = [], []
    for drop in range(m + 1):
        facet = np.delete(verts, drop, axis=0)
        out = facet[0] - verts[drop]
        out = basis @ (basis.T @ out)
        if m > 1:
            fb, _ = np.linalg.qr((facet[1:] - facet[0]).T)
            out = out - fb @ (fb.T @ out)
        out = out / np.linalg.norm(out)
        h = (facet[0] - q) @ out  # positive when q sits on the simplex side
        ys, wy = _star_rule(facet, q, dist, order)
        vec = ys - q[:, None, :]
        length = np.linalg.norm(vec, axis=2)
        length = np.where(length > 1e-300, length, 1e-300)
        top = np.arctan(length / safe[:, None])
        phis = top[:, :, None] * phi_x
        s = safe[:, None, None] * np.tan(phis) / length[:, :, None]
        ds = safe[:, None, None] / np.cos(phis) ** 2 / length[:, :, None] * top[:, :, None] * phi_w
        x = q[:, None, None, :] + s[..., None] * vec[:, :, None, :]
        w = (h[:, None] * wy)[:, :, None] * s ** (m - 1) * ds
        points.append(x.reshape(n_rows, -1, k))
        weights.append(w.reshape(n_rows, -1))
    return np.concatenate(points, axis=1), np.concatenate(weights, axis=1)


def _jacobian_many(x: np.ndarray, p: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """k-dimensional Jacobian of x -> sphere point on the ray from p through x.

    Rows of ``x`` and ``p`` pair up; ``frame`` is an (n, k) orthonormal basis of
    the plane the source lies in.
    """
    diff = x - p
    rho = np.linalg.norm(diff, axis=1)
    u = diff / rho[:, None]
    pu = np.einsum("ni,ni->n", p, u)
    pp = np.einsum("ni,ni->n", p, p)
    t = -pu + np.sqrt(pu * pu - pp + 1.0)
    y = p + t[:, None] * u
    uf = u @ frame
    w = frame[None, :, :] - u[:, :, None] * uf[:, None, :]
    yw = np.einsum("ni,nik->nk", y, w)
    yu = np.einsum("ni,ni->n", y, u)
    m = (t / rho)[:, None, None] * (w - u[:, :, None] * (yw / yu[:, None])[:, None, :])
    gram = np.einsum("nik,nil->nkl", m, m)
    if frame.shape[1] == 1:
        return np.sqrt(gram[:, 0, 0])
    if frame.shape[1] == 2:
        det = gram[:, 0, 0] * gram[:, 1, 1] - gram[:, 0, 1] ** 2
        return np.sqrt(np.clip(det, 0.0, None))
    return np.sqrt(np.clip(np.linalg.det(gram), 0.0, None))


class _PushEvaluator:
    """Image area of a fixed flat simplex for many projection centers at once."""

    def __init__(self, verts: np.ndarray, order: int):
        self.origin = verts[0]
        self.frame, _ = np.linalg.qr((verts[1:] - self.origin).T)
        self.local = (verts - self.origin) @ self.frame
        self.order = order

    def __call__(self, ps: np.ndarray) -> np.ndarray:
        rel = ps - self.origin
        q_loc = rel @ self.frame
        d = np.linalg.norm(rel - q_loc @ self.frame.T, axis=1)
        flat = d < 1e-12
        pts, wts = _star_rule(self.local, q_loc, np.where(flat, 1.0, d), self.order)
        n_rows, n_pts, _ = pts.shape
        x = self.origin + pts.reshape(-1, pts.shape[-1]) @ self.frame.T
        jac = _jacobian_many(x, np.repeat(ps, n_pts, axis=0), self.frame).reshape(n_rows, n_pts)
        out = np.abs(np.sum(jac * wts, axis=1))
        out[flat] = 0.0
        return out


def push_area(verts: np.ndarray, p: np.ndarray, order: int = 10) -> float:
    """Area of the radial image of a flat simplex on the unit sphere, seen from ``p``.

    Returns 0 when ``p`` lies in the simplex's plane: the image then
    collapses onto a lower-dimensional arc.
    """
    return float(_PushEvaluator(np.asarray(verts, dtype=float), order)(np.asarray(p, dtype=float)[None])[0])


def mc_push(k: int, n: int, samples: int = 100_000, seed: int = 0, center=None,
            ceiling: float = 50.0, order: int = 6, block: int = 1000) -> PushEstimate:
    """Mean ratio of image area to source area over centers uniform in the radius-1/2 ball.

    Samples are drawn in blocks of ``block``; block ``b`` uses the ``b``-th
    child of ``numpy.random.SeedSequence(seed)``, so results do not depend
    on how blocks are scheduled.
    """
    if not 1 <= k < n <= 6:
        raise ValueError("need 1 <= k < n <= 6")
    if samples < 1:
        raise ValueError("need at least one sample")
    verts = regular_simplex(k, n, center)
    if np.max(np.linalg.norm(verts, axis=1)) >= 1.0 - 1e-9:
        raise ValueError("simplex touches or leaves the unit ball")
    edges = verts[1:] - verts[0]
    src_area = math.sqrt(np.linalg.det(edges @ edges.T)) / math.factorial(k)
    children = np.random.SeedSequence(seed).spawn(-(-samples // block))
    evaluator = _PushEvaluator(verts, order)
    ratios = np.empty(samples)
    pos = 0
    for child in children:
        size = min(block, samples - pos)
        rng = np.random.default_rng(child)
        g = rng.standard_normal((size, n))
        g /= np.linalg.norm(g, axis=1)[:, None]
        r = 0.5 * rng.random(size) ** (1.0 / n)
        ratios[pos:pos + size] = evaluator(g * r[:, None]) / src_area
        pos += size
    mean = float(np.mean(ratios))
    stderr = float(np.std(ratios, ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    finite = math.isfinite(mean)
    return PushEstimate(k, n, samples, mean, stderr, ceiling, finite, finite and mean < ceiling, src_area)
