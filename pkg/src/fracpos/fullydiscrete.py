"""Backward Euler time stepping with convolution-quadrature memory.

One step solves (omega_0 M + S) U^n = M (sum_{j<n} omega_j V -
sum_{0<j<n} omega_{n-j} U^j); the matrix factorization is shared across
steps of the same run.  The one-step operator

    E_{1,tau} = omega_0 (omega_0 M + S)^{-1} M

decides nonnegativity of the whole scheme: once it is nonnegative for some
step size (and H^{-1} >= 0), every longer step inherits the property.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import fem, kernel, mesh as meshmod
from .errors import InvalidParameter, NoConvergence
from .semidiscrete import ScanSpec, SolutionMatrix, ThresholdReport, detect_threshold

__all__ = [
    "SteppingState",
    "step_solution",
    "fd_solution_matrix",
    "first_step_matrix",
    "FirstStepBound",
    "first_step_positivity_omega",
    "fd_positivity_threshold",
    "ScaleLawReport",
    "weight_scale_law",
    "convergence_rate",
    "ContractivityReport",
    "max_norm_contractivity_check",
]


@dataclass(eq=False)
class SteppingState:
    """Full-memory history of a backward Euler run.

    history[k] is U^k (same trailing shape as the initial data); weights
    are the convolution weights omega_0..omega_n actually used.
    """

    system: object
    operator: str
    tau: float
    weights: np.ndarray
    history: np.ndarray

    @property
    def steps(self):
        return self.history.shape[0] - 1

    @property
    def solution(self):
        return self.history[-1]


def step_solution(system, op, tau, n, v):
    """Run n backward Euler steps from initial data v (vector or matrix)."""
    if n < 1:
        raise InvalidParameter("need at least one step")
    v = np.asarray(v, dtype=float)
    flat = v.ndim == 1
    data = v[:, None] if flat else v
    if data.shape[0] != system.size:
        raise InvalidParameter(
            "initial data has %d rows, system has %d" % (data.shape[0], system.size)
        )
    w = kernel.cq_weights(op, tau, n)
    csum = np.cumsum(w)
    factor = scipy.linalg.cho_factor(w[0] * system.mass + system.stiffness, lower=True)
    hist = np.empty((n + 1,) + data.shape)
    hist[0] = data
    for m in range(1, n + 1):
        rhs = csum[m - 1] * data
        if m > 1:
            rhs -= np.tensordot(w[m - 1:0:-1], hist[1:m], axes=1)
        hist[m] = scipy.linalg.cho_solve(factor, system.mass @ rhs)
    if flat:
        hist = hist[:, :, 0]
    return SteppingState(
        system=system, operator=op.label, tau=tau, weights=w, history=hist
    )


def fd_solution_matrix(system, op, tau, n):
    """E_{n,tau} built mode by mode from the scalar discrete kernel."""
    r = kernel.r_scalar_many(op, system.eigen.eigenvalues, tau, n)
    mat = system.eigen.matrix_function(r)
    return SolutionMatrix(
        matrix=mat,
        time=n * tau,
        method=system.method,
        operator=op.label,
        tau=tau,
        steps=n,
    )


def first_step_matrix(system, omega0):
    """E_{1,tau} expressed through omega_0 = P(1/tau)."""
    if omega0 < 0.0:
        raise InvalidParameter("omega0 must be nonnegative")
    a = omega0 * system.mass + system.stiffness
    return omega0 * scipy.linalg.cho_solve(
        scipy.linalg.cho_factor(a, lower=True), system.mass
    )


@dataclass(frozen=True)
class FirstStepBound:
    """Largest nonnegativity-preserving omega_0, with certified bounds.

    omega_bisect: largest omega_0 with (omega_0 M + S)^{-1} M entrywise
    nonnegative; inf when every omega_0 works, None when none does.
    omega_certified: largest omega_0 for which every off-diagonal of
    omega_0 M + S is certainly nonpositive (min over neighbor pairs), a
    sufficient condition.  omega_stated: the max-over-pairs variant of the
    same ratio, kept for comparison; it exceeds the certified bound
    whenever the neighbor ratios differ.
    """

    omega_bisect: float
    omega_certified: float
    omega_stated: float

    @property
    def forms_disagree(self):
        return not math.isclose(
            self.omega_certified, self.omega_stated, rel_tol=1e-12, abs_tol=0.0
        )


def _pair_bounds(system):
    """Per neighbor pair, the largest omega_0 with omega_0*m_ij + s_ij <= 0."""
    m, s = system.mass, system.stiffness
    if system.mesh is not None:
        pairs = fem.neighbor_pairs(system.mesh)
    else:
        coupled = (np.abs(m) > 0.0) | (np.abs(s) > 0.0)
        idx = np.nonzero(np.triu(coupled, k=1))
        pairs = list(zip(idx[0], idx[1]))
    sups = []
    ratios = []
    for i, j in pairs:
        mij, sij = m[i, j], s[i, j]
        if mij > 0.0:
            ratios.append(abs(sij) / mij)
            sups.append(-sij / mij if sij < 0.0 else 0.0)
        else:
            sups.append(math.inf if sij <= 0.0 else 0.0)
    certified = min(sups, default=math.inf)
    stated = max(ratios, default=math.inf)
    return certified, stated


def first_step_positivity_omega(system, tol=1e-13, omega_cap=None):
    """Bisect the largest omega_0 keeping the first step nonnegative."""

    def nonneg(omega0):
        a = omega0 * system.mass + system.stiffness
        x = scipy.linalg.cho_solve(scipy.linalg.cho_factor(a, lower=True), system.mass)
        return x.min() >= -tol * max(1.0, np.abs(x).max())

    certified, stated = _pair_bounds(system)
    if omega_cap is None:
        omega_cap = 1e16 * system.eigen.eigenvalues[-1]
    if not nonneg(0.0):
        return FirstStepBound(None, certified, stated)
    lo = 0.0
    hi = 1.0
    while nonneg(hi):
        hi *= 10.0
        if hi > omega_cap:
            return FirstStepBound(math.inf, certified, stated)
        lo = hi / 10.0
    lo = max(lo, 1e-3)
    while hi / lo > 1.002:
        mid = math.sqrt(lo * hi)
        if nonneg(mid):
            lo = mid
        else:
            hi = mid
    return FirstStepBound(math.sqrt(lo * hi), certified, stated)


def fd_positivity_threshold(system, op, scan=None, tol=None):
    """Step size beyond which E_{1,tau} is entrywise nonnegative.

    Scans tau on a log grid (at least six decades) and refines the last
    sign change of the smallest entry of E_{1,tau} by bisection.
    """
    scan = scan if scan is not None else ScanSpec()
    if scan.decades < 6.0 - 1e-9:
        raise InvalidParameter("scan must cover at least six decades")
    if tol is None:
        tol = 1e-12 * system.size

    def min_entry(tau):
        return first_step_matrix(system, kernel.char_fn(op, 1.0 / tau)).min()

    grid = scan.grid()
    curve = np.empty((grid.shape[0], 2))
    for k, tau in enumerate(grid):
        curve[k, 0] = tau
        curve[k, 1] = min_entry(tau)
    status, value, bracket = detect_threshold(grid, curve[:, 1], min_entry, tol)
    return ThresholdReport(
        status=status,
        value=value,
        bracket=bracket,
        tolerance=tol,
        curve=curve,
        method=system.method,
        operator=op.label,
    )


_FAMILIES = {
    "uniform": meshmod.gen_uniform_square,
    "crossed": meshmod.gen_crossed_rectangles,
    "sliver": meshmod.gen_sliver_square,
    "equilateral": meshmod.gen_equilateral_rhombus,
}


@dataclass(frozen=True)
class ScaleLawReport:
    slope: float
    levels: tuple
    h_values: tuple
    thresholds: tuple


def weight_scale_law(family, alpha, levels, method="sg", scan=None):
    """Fit log tau_0 against log h across refinement levels.

    For the single-term operator of exponent alpha the first-step
    threshold scales like h^{2/alpha}.
    """
    if family not in _FAMILIES:
        raise InvalidParameter(
            "unknown family %r (have %s)" % (family, sorted(_FAMILIES))
        )
    if len(levels) < 2:
        raise InvalidParameter("need at least two refinement levels")
    op = kernel.FracOperator.single_term(alpha)
    hs = []
    taus = []
    for m in levels:
        msh = _FAMILIES[family](m)
        system = fem.build_fem_system(msh, method)
        rep = fd_positivity_threshold(system, op, scan=scan)
        if not rep.found:
            raise NoConvergence(
                "no threshold at level %r (status %s)" % (m, rep.status)
            )
        hs.append(meshmod.mesh_size(msh))
        taus.append(rep.value)
    slope = float(np.polyfit(np.log(hs), np.log(taus), 1)[0])
    return ScaleLawReport(
        slope=slope, levels=tuple(levels), h_values=tuple(hs), thresholds=tuple(taus)
    )


def convergence_rate(system, op, t, n_list):
    """Fitted decay rate of max_i |u_{lambda_i}(t) - r_{n,t/n}(lambda_i)|."""
    lams = system.eigen.eigenvalues
    exact = kernel.u_lambda_many(op, lams, t)
    errors = np.empty((len(n_list), 2))
    for k, n in enumerate(n_list):
        r = kernel.r_scalar_many(op, lams, t / n, n)
        errors[k] = (n, np.abs(exact - r).max())
    rate = -float(np.polyfit(np.log(errors[:, 0]), np.log(errors[:, 1]), 1)[0])
    return rate, errors


@dataclass(frozen=True)
class ContractivityReport:
    tau: float
    max_norm: float
    norms: np.ndarray
    contractive: bool


def max_norm_contractivity_check(system, op, taus, n_max=100, slack=1e-10):
    """Max-norm of E_{n,tau} over n = 0..n_max for each step size.

    For the lumped mass method with a diagonally dominant stiffness matrix
    the norms must never exceed 1 (up to slack).
    """
    out = []
    eye = np.eye(system.size)
    for tau in taus:
        state = step_solution(system, op, tau, n_max, eye)
        norms = np.abs(state.history).sum(axis=2).max(axis=1)
        max_norm = float(norms.max())
        out.append(
            ContractivityReport(
                tau=tau,
                max_norm=max_norm,
                norms=norms,
                contractive=max_norm <= 1.0 + slack,
            )
        )
    return out
