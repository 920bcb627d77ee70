"""P1 finite element matrices on triangulations, three mass inner products.

Methods:

  sg   standard Galerkin: exact L2 mass, local matrix |K|/12 * (I + ones)
  lm   lumped mass: diagonal, node weight = third of the adjacent area
  fve  finite volume element: mass entry (i, j) integrates basis function j
       over the control volume around node i (barycentric dual: barycenter
       joined to edge midpoints), local matrix |K|/108 * (15 I + 7 ones)

Assembly always runs over all nodes; homogeneous Dirichlet conditions are
imposed by restricting rows and columns to the interior block afterwards,
which the interior-first node ordering makes a plain slice.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateTriangle, InvalidParameter, NotPositiveDefinite

__all__ = [
    "METHODS",
    "FemSystem",
    "assemble_stiffness",
    "assemble_mass",
    "assemble_mass_sg",
    "assemble_mass_lm",
    "assemble_mass_fve",
    "build_fem_system",
    "system_from_matrices",
    "is_stieltjes",
    "is_diagonally_dominant",
    "neighbor_pairs",
]

METHODS = ("sg", "lm", "fve")

_SG_LOCAL = (np.eye(3) + np.ones((3, 3))) / 12.0
_FVE_LOCAL = (15.0 * np.eye(3) + 7.0 * np.ones((3, 3))) / 108.0


def _geometry(mesh):
    p = mesh.nodes[mesh.triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    areas = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    if np.any(areas < 1e-14):
        raise DegenerateTriangle(
            "triangle area below 1e-14 at index %d" % int(np.argmin(areas))
        )
    return p, areas


def _scatter(mesh, local_blocks):
    n = mesh.n_nodes
    full = np.zeros((n, n))
    tri = mesh.triangles
    for a in range(3):
        for b in range(3):
            np.add.at(full, (tri[:, a], tri[:, b]), local_blocks[:, a, b])
    return full


def _restrict(mesh, full, interior_only):
    if not interior_only:
        return full
    n = mesh.interior_count
    if n == 0:
        raise InvalidParameter("mesh has no interior nodes")
    return full[:n, :n].copy()


def assemble_stiffness(mesh, interior_only=True):
    """Stiffness matrix of the Dirichlet Laplacian (P1 elements).

    Row sums over all nodes vanish; the interior block is SPD whenever the
    mesh has at least one interior node.
    """
    p, areas = _geometry(mesh)
    # gradients of barycentric coordinates: rotated opposite edges / (2|K|)
    edges = np.stack(
        [p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1
    )
    rot = np.empty_like(edges)
    rot[:, :, 0] = -edges[:, :, 1]
    rot[:, :, 1] = edges[:, :, 0]
    grads = rot / (2.0 * areas)[:, None, None]
    local = np.einsum("tad,tbd->tab", grads, grads) * areas[:, None, None]
    return _restrict(mesh, _scatter(mesh, local), interior_only)


def assemble_mass_sg(mesh, interior_only=True):
    """Consistent L2 mass matrix."""
    _, areas = _geometry(mesh)
    local = _SG_LOCAL[None, :, :] * areas[:, None, None]
    return _restrict(mesh, _scatter(mesh, local), interior_only)


def assemble_mass_lm(mesh, interior_only=True):
    """Lumped (diagonal) mass matrix; equals the row sums of the sg mass."""
    _, areas = _geometry(mesh)
    n = mesh.n_nodes
    diag = np.zeros(n)
    np.add.at(diag, mesh.triangles.ravel(), np.repeat(areas / 3.0, 3))
    return _restrict(mesh, np.diag(diag), interior_only)


def assemble_mass_fve(mesh, interior_only=True):
    """Control-volume mass matrix over the barycentric dual mesh.

    Symmetric with row sum |V_i| (the control volume area), and the same
    sparsity as the sg mass.
    """
    _, areas = _geometry(mesh)
    local = _FVE_LOCAL[None, :, :] * areas[:, None, None]
    return _restrict(mesh, _scatter(mesh, local), interior_only)


_MASS = {
    "sg": assemble_mass_sg,
    "lm": assemble_mass_lm,
    "fve": assemble_mass_fve,
}


def assemble_mass(mesh, method, interior_only=True):
    if method not in _MASS:
        raise InvalidParameter("unknown method %r (have %s)" % (method, METHODS))
    return _MASS[method](mesh, interior_only)


def is_stieltjes(a):
    """Symmetric positive definite with nonpositive off-diagonal entries."""
    a = np.asarray(a, dtype=float)
    off = a - np.diag(np.diag(a))
    if off.max(initial=0.0) > 1e-14:
        return False
    try:
        linalg.cholesky(a)
    except NotPositiveDefinite:
        return False
    return True


def is_diagonally_dominant(a):
    """Rows satisfy sum of off-diagonal magnitudes <= diagonal (1e-14 slack)."""
    a = np.asarray(a, dtype=float)
    diag = np.diag(a)
    off = np.abs(a).sum(axis=1) - np.abs(diag)
    return bool(np.all(off <= diag + 1e-14))


@dataclass(eq=False)
class FemSystem:
    """Interior mass/stiffness pair with its generalized eigensystem."""

    method: str
    mass: np.ndarray
    stiffness: np.ndarray
    eigen: linalg.EigenSystem
    interior_count: int
    mesh: object = None

    @property
    def size(self):
        return self.interior_count


def build_fem_system(mesh, method):
    """Assemble interior matrices for a method and factor the pencil."""
    mass = assemble_mass(mesh, method)
    stiffness = assemble_stiffness(mesh)
    eigen = linalg.gen_sym_eigen(stiffness, mass)
    return FemSystem(
        method=method,
        mass=mass,
        stiffness=stiffness,
        eigen=eigen,
        interior_count=mass.shape[0],
        mesh=mesh,
    )


def system_from_matrices(mass, stiffness, method="sg", mesh=None):
    """Wrap explicit matrices (synthetic test systems) as a FemSystem."""
    mass = np.asarray(mass, dtype=float)
    stiffness = np.asarray(stiffness, dtype=float)
    eigen = linalg.gen_sym_eigen(stiffness, mass)
    return FemSystem(
        method=method,
        mass=mass,
        stiffness=stiffness,
        eigen=eigen,
        interior_count=mass.shape[0],
        mesh=mesh,
    )


def neighbor_pairs(mesh):
    """Interior node pairs joined by an edge, as (i, j) with i < j."""
    from .mesh import _edge_table

    n = mesh.interior_count
    pairs = []
    for (a, b) in sorted(_edge_table(mesh.triangles)):
        if a < n and b < n:
            pairs.append((a, b))
    return pairs
