"""Planar triangulations: generators, file import/export, edge predicates.

Node ordering convention: interior nodes come first (indices 0..N-1), then
boundary nodes.  All assembly code relies on this, so every construction
path funnels through the same finalizer which reorders nodes, orients
triangles counterclockwise, and derives boundary flags from the edge
topology when no markers are given.

Mesh families built here:

  uniform      unit square, right triangles with parallel diagonals
  crossed      unit square cut into 1x2 rectangles, both diagonals drawn,
               crossing node added at each rectangle center; every interior
               vertical edge violates the Delaunay angle condition
  sliver       uniform square where one boundary triangle is subdivided by
               three extra nodes into six triangles, two of them slivers of
               height eps*h0 hugging the boundary edge
  equilateral  rhombus tiled by equilateral triangles
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParameter, OrientationError, ParseError

__all__ = [
    "TriMesh",
    "EdgeInfo",
    "gen_uniform_square",
    "gen_crossed_rectangles",
    "gen_sliver_square",
    "gen_equilateral_rhombus",
    "load_triangle_format",
    "save_triangle_format",
    "bundled_mesh",
    "bundled_mesh_names",
    "delaunay_edges",
    "is_delaunay",
    "is_normal",
    "normal_witness",
    "mesh_size",
    "validate_mesh",
]

_AREA_TOL = 1e-14
_ANGLE_SUM_TOL = 1e-12


@dataclass(eq=False)
class TriMesh:
    """Triangulation with interior-first node ordering.

    nodes: (n, 2) float array.  triangles: (m, 3) int array, counterclockwise.
    boundary: (n,) bool flags.  family/h0 carry provenance for generated
    meshes and stay empty/None for imported ones.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    family: str = ""
    h0: float = None

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    @property
    def interior_count(self):
        return int(np.count_nonzero(~self.boundary))


def _triangle_areas(nodes, triangles):
    p = nodes[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _edge_table(triangles):
    """Map sorted node pair -> list of (triangle index, opposite local vertex)."""
    table = {}
    for t, tri in enumerate(triangles):
        for k in range(3):
            a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
            key = (a, b) if a < b else (b, a)
            table.setdefault(key, []).append((t, k))
    return table


def _finalize(nodes, triangles, boundary=None, family="", h0=None, from_file=False):
    nodes = np.asarray(nodes, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    areas = 0.5 * (
        (nodes[triangles[:, 1], 0] - nodes[triangles[:, 0], 0])
        * (nodes[triangles[:, 2], 1] - nodes[triangles[:, 0], 1])
        - (nodes[triangles[:, 1], 1] - nodes[triangles[:, 0], 1])
        * (nodes[triangles[:, 2], 0] - nodes[triangles[:, 0], 0])
    )
    tiny = np.abs(areas) < _AREA_TOL
    if np.any(tiny):
        msg = "degenerate triangle(s) at index %s" % np.nonzero(tiny)[0][:5]
        if from_file:
            raise OrientationError(msg)
        raise InvalidParameter(msg)
    flip = areas < 0.0
    if np.any(flip):
        triangles = triangles.copy()
        triangles[flip, 1], triangles[flip, 2] = (
            triangles[flip, 2].copy(),
            triangles[flip, 1].copy(),
        )
    if boundary is None:
        boundary = np.zeros(nodes.shape[0], dtype=bool)
        for (a, b), tris in _edge_table(triangles).items():
            if len(tris) == 1:
                boundary[a] = True
                boundary[b] = True
    else:
        boundary = np.asarray(boundary, dtype=bool)
    # reorder interior nodes first, preserving creation order within groups
    order = np.concatenate([np.nonzero(~boundary)[0], np.nonzero(boundary)[0]])
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0])
    return TriMesh(
        nodes=nodes[order],
        triangles=rank[triangles],
        boundary=boundary[order],
        family=family,
        h0=h0,
    )


# ---------------------------------------------------------------------------
# generators


def gen_uniform_square(m):
    """Uniform right-triangle mesh of the unit square, h0 = 1/m.

    Each cell is split along the diagonal of positive slope, so diagonal
    grid neighbors share two triangles but no stiffness coupling.
    """
    if m < 2:
        raise InvalidParameter("need m >= 2, got %r" % (m,))
    h0 = 1.0 / m
    idx = lambda i, j: j * (m + 1) + i
    nodes = [(i * h0, j * h0) for j in range(m + 1) for i in range(m + 1)]
    boundary = [
        i in (0, m) or j in (0, m) for j in range(m + 1) for i in range(m + 1)
    ]
    tris = []
    for j in range(m):
        for i in range(m):
            a, b = idx(i, j), idx(i + 1, j)
            c, d = idx(i + 1, j + 1), idx(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return _finalize(nodes, tris, boundary, family="uniform(M=%d)" % m, h0=h0)


def gen_crossed_rectangles(m):
    """Unit square cut into 2m x m rectangles of size h0 x 2h0, h0 = 1/(2m).

    Both diagonals of every rectangle are drawn; keeping the triangulation
    simplicial forces a crossing node at each rectangle center, giving four
    triangles per rectangle.  The longest edges are the vertical rectangle
    sides (length 2h0), and each interior one is shared by two triangles
    whose opposite angles sum to about 253 degrees: not Delaunay.
    """
    if m < 2:
        raise InvalidParameter("need m >= 2, got %r" % (m,))
    h0 = 0.5 / m
    nx, ny = 2 * m, m
    idx = lambda i, j: j * (nx + 1) + i
    nodes = [(i * h0, j * 2.0 * h0) for j in range(ny + 1) for i in range(nx + 1)]
    boundary = [
        i in (0, nx) or j in (0, ny) for j in range(ny + 1) for i in range(nx + 1)
    ]
    tris = []
    for j in range(ny):
        for i in range(nx):
            c = len(nodes)
            nodes.append((i * h0 + 0.5 * h0, j * 2.0 * h0 + h0))
            boundary.append(False)
            bl, br = idx(i, j), idx(i + 1, j)
            tr, tl = idx(i + 1, j + 1), idx(i, j + 1)
            tris += [(bl, br, c), (br, tr, c), (tr, tl, c), (tl, bl, c)]
    return _finalize(nodes, tris, boundary, family="crossed(M=%d)" % m, h0=h0)


def gen_sliver_square(m, eps=1e-3):
    """Uniform mesh with one boundary triangle subdivided into slivers.

    The lower boundary triangle with vertices A=(1/2, 0), B=(1/2+h0, 0),
    C=(1/2+h0, h0) gains three nodes: P at the midpoint of AB on the
    boundary, and Q, R at heights eps*h0 above the quarter points of AB.
    It is replaced by the six triangles APQ, PRQ, PBR, BCR, QRC, AQC;
    eps < 1/4 keeps AQC oriented.  The edge QR fails the Delaunay test by
    nearly the full possible margin.
    """
    if m < 4 or m % 2:
        raise InvalidParameter("need even m >= 4, got %r" % (m,))
    if not 0.0 < eps < 0.25:
        raise InvalidParameter("eps must lie in (0, 1/4), got %r" % (eps,))
    h0 = 1.0 / m
    idx = lambda i, j: j * (m + 1) + i
    nodes = [(i * h0, j * h0) for j in range(m + 1) for i in range(m + 1)]
    boundary = [
        i in (0, m) or j in (0, m) for j in range(m + 1) for i in range(m + 1)
    ]
    i0 = m // 2
    target = (idx(i0, 0), idx(i0 + 1, 0), idx(i0 + 1, 1))
    tris = []
    for j in range(m):
        for i in range(m):
            a, b = idx(i, j), idx(i + 1, j)
            c, d = idx(i + 1, j + 1), idx(i, j + 1)
            if (a, b, c) != target:
                tris.append((a, b, c))
            tris.append((a, c, d))
    na, nb, nc = target
    p = len(nodes)
    nodes.append((0.5 + 0.5 * h0, 0.0))
    boundary.append(True)
    q = len(nodes)
    nodes.append((0.5 + 0.25 * h0, eps * h0))
    boundary.append(False)
    r = len(nodes)
    nodes.append((0.5 + 0.75 * h0, eps * h0))
    boundary.append(False)
    tris += [
        (na, p, q),
        (p, r, q),
        (p, nb, r),
        (nb, nc, r),
        (q, r, nc),
        (na, q, nc),
    ]
    return _finalize(
        nodes, tris, boundary, family="sliver(M=%d,eps=%g)" % (m, eps), h0=h0
    )


def gen_equilateral_rhombus(m):
    """Rhombus spanned by (1,0) and (1/2, sqrt(3)/2), equilateral triangles."""
    if m < 2:
        raise InvalidParameter("need m >= 2, got %r" % (m,))
    h0 = 1.0 / m
    rt3 = math.sqrt(3.0)
    idx = lambda i, j: j * (m + 1) + i
    nodes = [
        ((i + 0.5 * j) * h0, 0.5 * rt3 * j * h0)
        for j in range(m + 1)
        for i in range(m + 1)
    ]
    boundary = [
        i in (0, m) or j in (0, m) for j in range(m + 1) for i in range(m + 1)
    ]
    tris = []
    for j in range(m):
        for i in range(m):
            tris.append((idx(i, j), idx(i + 1, j), idx(i, j + 1)))
            tris.append((idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)))
    return _finalize(
        nodes, tris, boundary, family="equilateral(M=%d)" % m, h0=h0
    )


# ---------------------------------------------------------------------------
# Triangle-format files (.node / .ele)


def _data_lines(path):
    out = []
    try:
        fh = open(path)
    except OSError as exc:
        raise ParseError("cannot open %s: %s" % (path, exc.strerror)) from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                out.append((lineno, stripped))
    return out


def _ints(tokens, path, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError("%s:%d: expected integers" % (path, lineno)) from exc


def load_triangle_format(node_path, ele_path):
    """Read a .node/.ele pair; node indices may be 0- or 1-based."""
    nlines = _data_lines(node_path)
    if not nlines:
        raise ParseError("%s: empty file" % node_path)
    lineno, header = nlines[0]
    head = header.split()
    if len(head) != 4:
        raise ParseError("%s:%d: node header needs 4 fields" % (node_path, lineno))
    count, dim, nattr, nmark = _ints(head, node_path, lineno)
    if dim != 2:
        raise ParseError("%s:%d: only 2-d meshes supported" % (node_path, lineno))
    if len(nlines) - 1 != count:
        raise ParseError(
            "%s: header says %d nodes, found %d" % (node_path, count, len(nlines) - 1)
        )
    want = 3 + nattr + (1 if nmark else 0)
    raw_ids = []
    coords = []
    markers = []
    for lineno, line in nlines[1:]:
        toks = line.split()
        if len(toks) != want:
            raise ParseError(
                "%s:%d: expected %d fields, got %d" % (node_path, lineno, want, len(toks))
            )
        raw_ids.append(_ints(toks[:1], node_path, lineno)[0])
        try:
            coords.append((float(toks[1]), float(toks[2])))
        except ValueError as exc:
            raise ParseError("%s:%d: bad coordinate" % (node_path, lineno)) from exc
        if nmark:
            markers.append(_ints(toks[-1:], node_path, lineno)[0])
    base = min(raw_ids)
    if base not in (0, 1):
        raise ParseError("%s: node indices must start at 0 or 1" % node_path)
    ids = [r - base for r in raw_ids]
    if sorted(ids) != list(range(count)):
        raise ParseError("%s: node indices must cover 0..%d" % (node_path, count - 1))
    nodes = np.empty((count, 2))
    boundary = np.zeros(count, dtype=bool) if nmark else None
    for pos, nid in enumerate(ids):
        nodes[nid] = coords[pos]
        if nmark:
            boundary[nid] = markers[pos] != 0

    elines = _data_lines(ele_path)
    if not elines:
        raise ParseError("%s: empty file" % ele_path)
    lineno, header = elines[0]
    head = header.split()
    if len(head) != 3:
        raise ParseError("%s:%d: ele header needs 3 fields" % (ele_path, lineno))
    tcount, npe, tattr = _ints(head, ele_path, lineno)
    if npe != 3:
        raise ParseError("%s:%d: only 3-node triangles supported" % (ele_path, lineno))
    if len(elines) - 1 != tcount:
        raise ParseError(
            "%s: header says %d triangles, found %d" % (ele_path, tcount, len(elines) - 1)
        )
    tris = np.empty((tcount, 3), dtype=np.int64)
    for row, (lineno, line) in enumerate(elines[1:]):
        toks = line.split()
        if len(toks) < 4:
            raise ParseError("%s:%d: expected 4 fields" % (ele_path, lineno))
        vals = _ints(toks[:4], ele_path, lineno)
        for k in range(3):
            v = vals[1 + k] - base
            if not 0 <= v < count:
                raise ParseError("%s:%d: node index out of range" % (ele_path, lineno))
            tris[row, k] = v
    return _finalize(nodes, tris, boundary, from_file=True)


def save_triangle_format(mesh, node_path, ele_path):
    """Write a 1-based .node/.ele pair with boundary markers."""
    with open(node_path, "w") as fh:
        fh.write("%d 2 0 1\n" % mesh.n_nodes)
        for i, (x, y) in enumerate(mesh.nodes, start=1):
            fh.write("%d %.17g %.17g %d\n" % (i, x, y, int(mesh.boundary[i - 1])))
    with open(ele_path, "w") as fh:
        fh.write("%d 3 0\n" % mesh.n_triangles)
        for i, tri in enumerate(mesh.triangles, start=1):
            fh.write("%d %d %d %d\n" % (i, tri[0] + 1, tri[1] + 1, tri[2] + 1))


_MESH_DIR = Path(__file__).parent / "meshes"


def bundled_mesh_names():
    return sorted(p.stem for p in _MESH_DIR.glob("*.node"))


def bundled_mesh(name):
    node = _MESH_DIR / (name + ".node")
    ele = _MESH_DIR / (name + ".ele")
    if not node.exists() or not ele.exists():
        raise InvalidParameter(
            "no bundled mesh %r (have: %s)" % (name, ", ".join(bundled_mesh_names()))
        )
    mesh = load_triangle_format(node, ele)
    mesh.family = name
    return mesh


# ---------------------------------------------------------------------------
# edge predicates


@dataclass(frozen=True)
class EdgeInfo:
    node_a: int
    node_b: int
    opposite_angles: tuple
    is_boundary: bool
    is_delaunay: bool


def _angle_at(nodes, apex, a, b):
    va = nodes[a] - nodes[apex]
    vb = nodes[b] - nodes[apex]
    cross = va[0] * vb[1] - va[1] * vb[0]
    dot = va[0] * vb[0] + va[1] * vb[1]
    return math.atan2(abs(cross), dot)


def delaunay_edges(mesh):
    """Classify every edge by the opposite-angle criterion.

    An edge is Delaunay when the angles opposite to it sum to at most pi
    (plus 1e-12 slack, so edges of cocircular quads count as Delaunay).
    Boundary edges see a single angle and pass trivially.
    """
    out = []
    for (a, b), hits in sorted(_edge_table(mesh.triangles).items()):
        if len(hits) > 2:
            raise InvalidParameter(
                "edge (%d, %d) shared by %d triangles" % (a, b, len(hits))
            )
        angles = tuple(
            _angle_at(mesh.nodes, mesh.triangles[t, k], a, b) for t, k in hits
        )
        out.append(
            EdgeInfo(
                node_a=a,
                node_b=b,
                opposite_angles=angles,
                is_boundary=len(hits) == 1,
                is_delaunay=sum(angles) <= math.pi + _ANGLE_SUM_TOL,
            )
        )
    return out


def is_delaunay(mesh):
    """True when every interior edge satisfies the angle-sum condition."""
    return all(e.is_delaunay for e in delaunay_edges(mesh) if not e.is_boundary)


def _adjacency(mesh):
    nbrs = [set() for _ in range(mesh.n_nodes)]
    for (a, b) in _edge_table(mesh.triangles):
        nbrs[a].add(b)
        nbrs[b].add(a)
    return nbrs


def normal_witness(mesh):
    """A strictly interior node all of whose neighbors can see past it.

    Returns the index of an interior node whose neighbors are all interior
    and where every neighbor has a further neighbor not adjacent to the
    node itself; None when no such node exists.
    """
    nbrs = _adjacency(mesh)
    for j in range(mesh.n_nodes):
        if mesh.boundary[j]:
            continue
        ring = nbrs[j]
        if any(mesh.boundary[i] for i in ring):
            continue
        if all(any(k != j and k not in ring for k in nbrs[i]) for i in ring):
            return j
    return None


def is_normal(mesh):
    return normal_witness(mesh) is not None


def mesh_size(mesh):
    """Longest edge length."""
    h = 0.0
    for (a, b) in _edge_table(mesh.triangles):
        h = max(h, float(np.hypot(*(mesh.nodes[a] - mesh.nodes[b]))))
    return h


def validate_mesh(mesh):
    """Raise InvalidParameter when a structural invariant is broken."""
    nodes, tris = mesh.nodes, mesh.triangles
    if not np.all(np.isfinite(nodes)):
        raise InvalidParameter("non-finite node coordinates")
    rounded = np.round(nodes / 1e-12) * 1e-12
    if np.unique(rounded, axis=0).shape[0] != nodes.shape[0]:
        raise InvalidParameter("duplicate nodes within 1e-12")
    if tris.min() < 0 or tris.max() >= nodes.shape[0]:
        raise InvalidParameter("triangle index out of range")
    areas = _triangle_areas(nodes, tris)
    if areas.min() < _AREA_TOL:
        raise InvalidParameter("triangle area below 1e-14 or negative orientation")
    interior = mesh.interior_count
    if mesh.boundary[:interior].any() or not mesh.boundary[interior:].all():
        raise InvalidParameter("nodes are not ordered interior-first")
    topological = np.zeros(nodes.shape[0], dtype=bool)
    for (a, b), hits in _edge_table(tris).items():
        if len(hits) > 2:
            raise InvalidParameter("edge shared by more than two triangles")
        if len(hits) == 1:
            topological[a] = True
            topological[b] = True
    if not np.array_equal(topological, mesh.boundary):
        raise InvalidParameter("boundary flags disagree with edge topology")
