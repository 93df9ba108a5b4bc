"""Sparse operator components of the three annealers and the schedule assembly.

All operators are real symmetric in the computational basis. Off-diagonal
structure is stored once (row < col) with the symmetric completion implied;
the diagonal is kept dense.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
import scipy.sparse as sp

from .basis import FullBasis, SectorBasis, build_sector_basis
from .graphs import Graph, ProblemInstance, cut_sizes

ANNEALER_KINDS = ("fermion", "boson", "ising")

DEFAULT_LAMBDA = 3.0
DEFAULT_ALPHA = 1.0


@dataclass(frozen=True)
class LatticeGeometry:
    """Rectangular lattice with open boundaries; sites numbered 1..N row-major."""

    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"bad lattice {self.rows}x{self.cols}")

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    def site(self, r: int, c: int) -> int:
        return (r - 1) * self.cols + c

    @cached_property
    def bonds(self) -> tuple[tuple[int, int], ...]:
        """Nearest-neighbor site pairs (i, j) with i < j."""
        out = []
        for r in range(1, self.rows + 1):
            for c in range(1, self.cols + 1):
                i = self.site(r, c)
                if c < self.cols:
                    out.append((i, i + 1))
                if r < self.rows:
                    out.append((i, i + self.cols))
        return tuple(out)


@dataclass(frozen=True)
class SparseOperator:
    """Real symmetric operator: dense diagonal + deduplicated upper triangle."""

    dim: int
    diagonal: np.ndarray
    rows: np.ndarray = field(default=None)
    cols: np.ndarray = field(default=None)
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        diag = np.asarray(self.diagonal, dtype=np.float64)
        if diag.shape != (self.dim,):
            raise ValueError(f"diagonal shape {diag.shape} != ({self.dim},)")
        rows = np.asarray(
            self.rows if self.rows is not None else [], dtype=np.int64
        )
        cols = np.asarray(
            self.cols if self.cols is not None else [], dtype=np.int64
        )
        vals = np.asarray(
            self.values if self.values is not None else [], dtype=np.float64
        )
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("rows/cols/values length mismatch")
        if rows.size:
            if rows.min() < 0 or cols.max() >= self.dim:
                raise ValueError("off-diagonal index out of range")
            if np.any(rows >= cols):
                raise ValueError("off-diagonal entries must satisfy row < col")
            keep = vals != 0.0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
            order = np.lexsort((cols, rows))
            rows, cols, vals = rows[order], cols[order], vals[order]
            packed = rows * self.dim + cols
            if np.any(np.diff(packed) == 0):
                raise ValueError("duplicate off-diagonal entry")
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", vals)

    @property
    def nnz_offdiag(self) -> int:
        return int(self.rows.size)

    @cached_property
    def _sym_csr(self) -> sp.csr_matrix:
        """Full symmetric CSR including the diagonal (matvec workhorse)."""
        r = np.concatenate([self.rows, self.cols, np.arange(self.dim)])
        c = np.concatenate([self.cols, self.rows, np.arange(self.dim)])
        v = np.concatenate([self.values, self.values, self.diagonal])
        return sp.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    @cached_property
    def offdiag_csr(self) -> sp.csr_matrix:
        """Symmetric CSR of the off-diagonal part only."""
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        v = np.concatenate([self.values, self.values])
        return sp.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    @cached_property
    def offdiag_csr_complex(self) -> sp.csr_matrix:
        """Complex copy of offdiag_csr; avoids per-matvec upcasts in propagation."""
        return self.offdiag_csr.astype(np.complex128)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._sym_csr @ x

    def to_csr(self) -> sp.csr_matrix:
        return self._sym_csr

    def to_dense(self) -> np.ndarray:
        return self._sym_csr.toarray()

    def dump_coo(self, path) -> None:
        """Debug dump: one "row col value" line, diagonal entries first."""
        lines = []
        for i, v in enumerate(self.diagonal):
            lines.append(f"{i} {i} {v:.17g}")
        for r, c, v in zip(self.rows, self.cols, self.values):
            lines.append(f"{r} {c} {v:.17g}")
        Path(path).write_text("\n".join(lines) + "\n")


Basis = Union[SectorBasis, FullBasis]


@dataclass(frozen=True)
class HamiltonianParts:
    """The three schedule-weighted components of one annealer.

    h_initial and h_problem are purely diagonal; h_driver is purely
    off-diagonal. All share one Hilbert dimension (half-filling sector for
    atomic kinds, full spin space for the Ising kind).
    """

    kind: str
    h_initial: SparseOperator
    h_driver: SparseOperator
    h_problem: SparseOperator
    lam: float
    alpha: float
    basis: Basis
    geometry: LatticeGeometry

    def __post_init__(self):
        if self.kind not in ANNEALER_KINDS:
            raise ValueError(f"unknown annealer kind {self.kind!r}")
        dims = {self.h_initial.dim, self.h_driver.dim, self.h_problem.dim}
        if dims != {self.basis.dim}:
            raise ValueError(f"component dimensions {dims} != basis dim {self.basis.dim}")
        for op in (self.h_initial, self.h_problem):
            if op.nnz_offdiag:
                raise ValueError("initial/problem components must be diagonal")
        if np.any(self.h_driver.diagonal != 0.0):
            raise ValueError("driver component must be purely off-diagonal")

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def n_sites(self) -> int:
        return self.basis.n

    def operator_at(self, s: float) -> SparseOperator:
        return assemble(self, s)

    def matvec_at(self, s: float, x: np.ndarray, lam: float | None = None) -> np.ndarray:
        """H(s) @ x without materializing the assembled operator."""
        w0, wd, wp = schedule_weights(s, self.lam if lam is None else lam)
        y = (w0 * self.h_initial.diagonal + wp * self.h_problem.diagonal) * x
        if wd != 0.0:
            y += wd * (self.h_driver.offdiag_csr @ x)
        return y


def schedule_weights(s: float, lam: float) -> tuple[float, float, float]:
    """Interpolation weights (initial, driver, problem) at schedule point s."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"schedule parameter s={s} outside [0, 1]")
    return 1.0 - s, lam * s * (1.0 - s), s


def assemble(parts: HamiltonianParts, s: float) -> SparseOperator:
    """(1-s) * h_initial + lam * s * (1-s) * h_driver + s * h_problem."""
    w0, wd, wp = schedule_weights(s, parts.lam)
    diag = w0 * parts.h_initial.diagonal + wp * parts.h_problem.diagonal
    drv = parts.h_driver
    return SparseOperator(
        dim=parts.dim,
        diagonal=diag,
        rows=drv.rows,
        cols=drv.cols,
        values=wd * drv.values,
    )


def build_onsite(geometry: LatticeGeometry, basis: SectorBasis) -> SparseOperator:
    """Diagonal onsite potential: -2 on even sites, 0 on odd sites (1-based)."""
    if basis.n != geometry.n_sites:
        raise ValueError(f"basis has {basis.n} sites, lattice {geometry.n_sites}")
    site_v = np.array(
        [-2.0 if i % 2 == 0 else 0.0 for i in range(1, basis.n + 1)]
    )
    diag = basis.occupations().astype(np.float64) @ site_v
    return SparseOperator(dim=basis.dim, diagonal=diag)


def jw_sign(state: int, p: int, q: int) -> int:
    """Parity sign of occupied sites strictly between positions p < q.

    Positions follow the row-major site order, which is also the fermion
    linearization; the parity is evaluated on `state`.
    """
    if not p < q:
        raise ValueError(f"need p < q, got p={p}, q={q}")
    between = ((1 << (q - 1)) - 1) ^ ((1 << p) - 1)
    return -1 if (int(state) & between).bit_count() % 2 else 1


def build_tunneling(
    geometry: LatticeGeometry, basis: SectorBasis, statistics: str
) -> SparseOperator:
    """Nearest-neighbor hopping over the lattice bonds.

    Every matrix element is -1 for hard-core bosons; spinless fermions pick up
    the Jordan-Wigner string parity between the bond endpoints, so vertical
    bonds can flip the sign to +1.
    """
    if statistics not in ("fermion", "boson"):
        raise ValueError(f"unknown statistics {statistics!r}")
    if basis.n != geometry.n_sites:
        raise ValueError(f"basis has {basis.n} sites, lattice {geometry.n_sites}")
    states = basis.states
    occ = basis.occupations()
    rows, cols, vals = [], [], []
    for i, j in geometry.bonds:
        # count each unordered pair once: particle at i, hole at j
        sel = np.nonzero((occ[:, i - 1] == 1) & (occ[:, j - 1] == 0))[0]
        if sel.size == 0:
            continue
        mask = np.uint64((1 << (i - 1)) | (1 << (j - 1)))
        partners = states[sel] ^ mask
        pidx = np.searchsorted(states, partners)
        if statistics == "fermion" and j - i > 1:
            parity = occ[sel, i : j - 1].sum(axis=1) & 1
            v = 2.0 * parity - 1.0
        else:
            v = np.full(sel.size, -1.0)
        rows.append(sel)
        cols.append(pidx)
        vals.append(v)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        v = np.concatenate(vals)
    else:
        r = c = v = np.array([])
    return SparseOperator(
        dim=basis.dim, diagonal=np.zeros(basis.dim), rows=r, cols=c, values=v
    )


def build_problem_atomic(graph: Graph, basis: SectorBasis) -> SparseOperator:
    """Diagonal cost operator on the sector basis: entry = cut size of the state."""
    if graph.n != basis.n:
        raise ValueError(f"graph has {graph.n} vertices, basis {basis.n} sites")
    diag = cut_sizes(graph, basis.states).astype(np.float64)
    return SparseOperator(dim=basis.dim, diagonal=diag)


def ising_alpha_bound(graph: Graph) -> float:
    """Smallest imbalance penalty that keeps ground states balanced."""
    deg = np.zeros(graph.n + 1, dtype=np.int64)
    for u, v in graph.edges:
        deg[u] += 1
        deg[v] += 1
    return min(2 * int(deg.max()), graph.n) / 8.0


def build_ising_problem(
    graph: Graph, alpha: float, strict: bool = True
) -> SparseOperator:
    """Cut cost plus alpha * (total magnetization)^2 over the full spin basis."""
    bound = ising_alpha_bound(graph)
    if alpha < bound:
        msg = f"alpha={alpha} below validity bound {bound}; ground states may be unbalanced"
        if strict:
            raise ValueError(msg)
        warnings.warn(msg, stacklevel=2)
    basis = FullBasis(graph.n)
    states = basis.states
    magnetization = 2.0 * np.bitwise_count(states).astype(np.float64) - graph.n
    diag = cut_sizes(graph, states).astype(np.float64) + alpha * magnetization**2
    return SparseOperator(dim=basis.dim, diagonal=diag)


def build_ising_drivers(n: int) -> tuple[SparseOperator, SparseOperator]:
    """Longitudinal (h_i = -1 even i, +1 odd i) and transverse (-sum sigma_x) fields."""
    if n < 1:
        raise ValueError(f"need at least one site, got {n}")
    basis = FullBasis(n)
    states = basis.states
    h = np.array([-1.0 if i % 2 == 0 else 1.0 for i in range(1, n + 1)])
    spins = 2.0 * basis.occupations().astype(np.float64) - 1.0
    h_z = SparseOperator(dim=basis.dim, diagonal=spins @ h)
    rows, cols = [], []
    for t in range(n):
        bit = np.uint64(1 << t)
        lo = np.nonzero((states & bit) == 0)[0]
        rows.append(lo)
        cols.append(lo | (1 << t))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    h_x = SparseOperator(
        dim=basis.dim,
        diagonal=np.zeros(basis.dim),
        rows=r,
        cols=c,
        values=np.full(r.size, -1.0),
    )
    return h_z, h_x


def build_atomic_parts(
    instance: ProblemInstance, statistics: str, lam: float = DEFAULT_LAMBDA
) -> HamiltonianParts:
    """Assemble the half-filling annealer components for one problem instance."""
    geometry = LatticeGeometry(rows=instance.rows, cols=instance.cols)
    basis = build_sector_basis(instance.n, instance.n // 2)
    return HamiltonianParts(
        kind=statistics,
        h_initial=build_onsite(geometry, basis),
        h_driver=build_tunneling(geometry, basis, statistics),
        h_problem=build_problem_atomic(instance.graph, basis),
        lam=lam,
        alpha=0.0,
        basis=basis,
        geometry=geometry,
    )


def build_ising_parts(
    instance: ProblemInstance,
    lam: float = DEFAULT_LAMBDA,
    alpha: float = DEFAULT_ALPHA,
    strict_alpha: bool = True,
) -> HamiltonianParts:
    """Assemble the penalty-encoded spin annealer components for one instance."""
    geometry = LatticeGeometry(rows=instance.rows, cols=instance.cols)
    basis = FullBasis(instance.n)
    h_z, h_x = build_ising_drivers(instance.n)
    return HamiltonianParts(
        kind="ising",
        h_initial=h_z,
        h_driver=h_x,
        h_problem=build_ising_problem(instance.graph, alpha, strict=strict_alpha),
        lam=lam,
        alpha=alpha,
        basis=basis,
        geometry=geometry,
    )


def build_parts(
    instance: ProblemInstance,
    kind: str,
    lam: float = DEFAULT_LAMBDA,
    alpha: float = DEFAULT_ALPHA,
    strict_alpha: bool = True,
) -> HamiltonianParts:
    if kind in ("fermion", "boson"):
        return build_atomic_parts(instance, kind, lam=lam)
    if kind == "ising":
        return build_ising_parts(instance, lam=lam, alpha=alpha, strict_alpha=strict_alpha)
    raise ValueError(f"unknown annealer kind {kind!r}")
