"""Low-energy spectra along the schedule, gap and susceptibility diagnostics."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla
from scipy.optimize import linear_sum_assignment

from .basis import occupation_matrix
from .errors import DegenerateGroundStateError, EigensolverError
from .hamiltonian import HamiltonianParts, SparseOperator, assemble

DENSE_DIM_LIMIT = 2000
DEGENERACY_TOL = 1e-10
RESIDUAL_RTOL = 1e-9
NORM_TOL = 1e-8

DEFAULT_LEVELS = 12
DEFAULT_TRACE_GRID = 101
DEFAULT_GAP_GRID = 201
GAP_REFINE_TOL = 1e-4


def _residual_ok(H: SparseOperator, values, vectors) -> bool:
    R = H.matvec(vectors) - vectors * values[None, :]
    res = np.linalg.norm(R, axis=0)
    return bool(np.all(res <= RESIDUAL_RTOL * np.maximum(1.0, np.abs(values))))


def _rayleigh_ritz(H: SparseOperator, block: np.ndarray):
    """Orthonormalize a near-invariant block and re-resolve it exactly."""
    Q, _ = np.linalg.qr(block)
    M = Q.T @ H.matvec(Q)
    M = 0.5 * (M + M.T)
    w, U = np.linalg.eigh(M)
    return w, Q @ U


def lowest_eigs(
    H: SparseOperator, k: int, method: str = "auto", seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """k smallest eigenpairs of a real symmetric sparse operator.

    Returns (values ascending, vectors as columns). method "auto" picks the
    dense LAPACK path below DENSE_DIM_LIMIT and restarted Lanczos (ARPACK with
    a Rayleigh-Ritz polish) above; "dense"/"iterative" force a path. Residuals
    are verified to RESIDUAL_RTOL; EigensolverError on non-convergence.
    """
    dim = H.dim
    if not 1 <= k <= dim:
        raise ValueError(f"k={k} out of range 1..{dim}")
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "dense" if dim <= DENSE_DIM_LIMIT else "iterative"
    if method == "iterative" and k >= dim - 1:
        method = "dense"  # ARPACK requires k < dim - 1

    if method == "dense":
        w, V = scipy.linalg.eigh(H.to_dense(), subset_by_index=(0, k - 1))
        return w, V

    A = H.to_csr()
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    last_err = None
    for ncv in (min(dim, max(4 * k, 40)), min(dim, max(8 * k, 80))):
        if ncv <= k:
            break
        try:
            w, V = spla.eigsh(A, k=k, which="SA", ncv=ncv, tol=0, v0=v0, maxiter=50 * dim)
        except spla.ArpackNoConvergence as exc:
            last_err = exc
            continue
        w, V = _rayleigh_ritz(H, V)
        if _residual_ok(H, w, V):
            return w, V
    raise EigensolverError(
        f"Lanczos failed to converge {k} eigenpairs at dim {dim}: {last_err}"
    )


@dataclass
class SpectralTrace:
    """Lowest-k eigenlevels (and optionally eigenvectors) on an s-grid.

    `levels[t]` is ascending; `tracks[t]` maps each plotting track to the
    sorted-level index it continues at grid point t (maximal-overlap
    assignment, only available when vectors are retained). Gap computations
    always use the sorted order.
    """

    s_grid: np.ndarray
    levels: np.ndarray
    k: int
    parts: HamiltonianParts
    vectors: list[np.ndarray] | None = None
    tracks: np.ndarray | None = None


@dataclass
class GapReport:
    """Minimum over s of the gap to the first level outside the ground subspace."""

    relevant_gap: float
    argmin_s: float
    s_grid: np.ndarray
    per_s_gap: np.ndarray


def spectral_trace(
    parts: HamiltonianParts,
    s_grid,
    k: int = DEFAULT_LEVELS,
    degeneracy_hint: int | None = None,
    keep_vectors: bool = False,
    method: str = "auto",
) -> SpectralTrace:
    """Diagonalize H(s) on an ascending grid, keeping max(k, D+1) levels."""
    s_grid = np.asarray(s_grid, dtype=np.float64)
    if s_grid.ndim != 1 or s_grid.size == 0:
        raise ValueError("s_grid must be a non-empty 1-d array")
    if np.any(np.diff(s_grid) <= 0) or s_grid[0] < 0 or s_grid[-1] > 1:
        raise ValueError("s_grid must ascend within [0, 1]")
    k_eff = max(k, (degeneracy_hint + 1) if degeneracy_hint else 0)
    k_eff = min(k_eff, parts.dim)
    levels = np.empty((s_grid.size, k_eff))
    vectors = [] if keep_vectors else None
    tracks = np.empty((s_grid.size, k_eff), dtype=np.int64) if keep_vectors else None
    prev_V = None
    for t, s in enumerate(s_grid):
        try:
            w, V = lowest_eigs(assemble(parts, s), k_eff, method=method)
        except EigensolverError as exc:
            raise EigensolverError(f"at s={s}: {exc}") from exc
        levels[t] = w
        if keep_vectors:
            vectors.append(V)
            if prev_V is None:
                tracks[t] = np.arange(k_eff)
            else:
                overlap = np.abs(prev_V.T @ V)
                _, assign = linear_sum_assignment(-overlap)
                tracks[t] = assign[tracks[t - 1]]
            prev_V = V
    return SpectralTrace(
        s_grid=s_grid, levels=levels, k=k_eff, parts=parts, vectors=vectors, tracks=tracks
    )


def relevant_gap(trace: SpectralTrace, degeneracy: int, method: str = "auto") -> GapReport:
    """min over s of E_D(s) - E_0(s), golden-section refined around the grid argmin."""
    if degeneracy < 1 or degeneracy >= trace.k:
        raise ValueError(
            f"need degeneracy+1 <= {trace.k} levels, got degeneracy {degeneracy}"
        )
    per_s = trace.levels[:, degeneracy] - trace.levels[:, 0]
    t0 = int(np.argmin(per_s))
    best_gap = float(per_s[t0])
    best_s = float(trace.s_grid[t0])

    def gap_at(s: float) -> float:
        w, _ = lowest_eigs(assemble(trace.parts, s), degeneracy + 1, method=method)
        return float(w[degeneracy] - w[0])

    lo = trace.s_grid[max(t0 - 1, 0)]
    hi = trace.s_grid[min(t0 + 1, trace.s_grid.size - 1)]
    if hi - lo > GAP_REFINE_TOL:
        invphi = (np.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = gap_at(c), gap_at(d)
        while b - a > GAP_REFINE_TOL:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = gap_at(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = gap_at(d)
        for s_cand, g_cand in ((c, fc), (d, fd)):
            if g_cand < best_gap:
                best_gap, best_s = float(g_cand), float(s_cand)
    return GapReport(
        relevant_gap=best_gap, argmin_s=best_s, s_grid=trace.s_grid, per_s_gap=per_s
    )


def _ground_state(provider, s: float, method: str):
    op = provider.operator_at(s)
    k = min(2, op.dim)
    w, V = lowest_eigs(op, k, method=method)
    if k == 2 and w[1] - w[0] <= DEGENERACY_TOL:
        raise DegenerateGroundStateError(
            f"ground state split {w[1] - w[0]:.3e} at s={s}"
        )
    return V[:, 0]


def fidelity_susceptibility(
    parts, s: float, delta_s: float, method: str = "auto"
) -> float:
    """Per-site susceptibility -2 ln F / (N ds^2) from the symmetric pair s +/- ds/2.

    `parts` is anything with operator_at(s) and n_sites (HamiltonianParts or a
    custom schedule). Requires a unique ground state at both stencil points.
    """
    if delta_s <= 0:
        raise ValueError(f"delta_s must be positive, got {delta_s}")
    lo, hi = s - delta_s / 2.0, s + delta_s / 2.0
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"stencil [{lo}, {hi}] exits the schedule interval")
    g_lo = _ground_state(parts, lo, method)
    g_hi = _ground_state(parts, hi, method)
    fid = min(float(np.abs(np.vdot(g_lo, g_hi))), 1.0)
    return max(-2.0 * np.log(fid) / (parts.n_sites * delta_s**2), 0.0)


def susceptibility_curve(
    parts, s_grid, delta_s: float = 1e-3, method: str = "auto"
) -> np.ndarray:
    """Susceptibility sampled on the grid, restricted to s in [delta_s, 1-delta_s].

    Outside that window, and at points where the ground state is numerically
    degenerate, the sample is NaN.
    """
    s_grid = np.asarray(s_grid, dtype=np.float64)
    out = np.full(s_grid.size, np.nan)
    for t, s in enumerate(s_grid):
        if s < delta_s or s > 1.0 - delta_s:
            continue
        try:
            out[t] = fidelity_susceptibility(parts, s, delta_s, method=method)
        except DegenerateGroundStateError:
            pass
    return out


def glass_order(state: np.ndarray, basis) -> float:
    """Site-averaged squared local polarization of a normalized pure state.

    Equals (1/N) sum_i <2 n_i - 1>^2 on occupation bases and
    (1/N) sum_i <sigma_i^z>^2 on the spin basis; both lie in [0, 1].
    """
    state = np.asarray(state)
    probs = np.abs(state) ** 2
    total = probs.sum()
    if abs(np.sqrt(total) - 1.0) > NORM_TOL:
        raise ValueError(f"state norm {np.sqrt(total):.12f} != 1")
    if probs.size != basis.dim:
        raise ValueError(f"state dim {probs.size} != basis dim {basis.dim}")
    occ = basis.occupations().astype(np.float64)
    site_means = 2.0 * (probs @ occ) - total
    return float(np.mean(site_means**2))


def glass_order_lowk(trace: SpectralTrace, k: int = DEFAULT_LEVELS) -> np.ndarray:
    """Per-s mean glass order of the k lowest eigenstates (vectors required)."""
    if trace.vectors is None:
        raise ValueError("trace was computed without keep_vectors")
    if k > trace.k:
        raise ValueError(f"trace holds {trace.k} levels, asked for {k}")
    basis = trace.parts.basis
    out = np.empty(trace.s_grid.size)
    for t, V in enumerate(trace.vectors):
        out[t] = np.mean([glass_order(V[:, j], basis) for j in range(k)])
    return out


def export_trace_csv(
    trace: SpectralTrace,
    path,
    q_gs: np.ndarray | None = None,
    q_lowk: np.ndarray | None = None,
    susceptibility: np.ndarray | None = None,
) -> None:
    """Write columns s, E_0..E_{k-1} and any provided diagnostic columns."""
    header = ["s"] + [f"E_{j}" for j in range(trace.k)]
    extras = []
    for name, col in (("q_gs", q_gs), ("q_low12", q_lowk), ("S", susceptibility)):
        if col is not None:
            header.append(name)
            extras.append(np.asarray(col))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t, s in enumerate(trace.s_grid):
            row = [f"{s:.10g}"] + [f"{e:.17g}" for e in trace.levels[t]]
            row += [f"{col[t]:.17g}" for col in extras]
            writer.writerow(row)
