"""Time-dependent Schrodinger evolution along the schedule and its observables."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DegenerateGroundStateError
from .graphs import PartitionSolution
from .hamiltonian import HamiltonianParts, schedule_weights
from .spectral import glass_order, lowest_eigs

DEFAULT_TOTAL_TIME = 50.0
DEFAULT_STEP_DT = 0.1  # 500 steps at total_time 50; fourth-order stepper
DEFAULT_SAMPLES = 201
STEP_TOL = 1e-10
NORM_DRIFT_LIMIT = 1e-6
MAX_KRYLOV = 64
MAX_SUBDIVISION_DEPTH = 10
GROUND_SUBSPACE_ATOL = 1e-9


@dataclass(frozen=True)
class AnnealSchedule:
    """Linear ramp s(t) = t / total_time with driving strength lam.

    lam=None means "use the lam baked into the Hamiltonian parts"; when given
    explicitly it must agree with the parts it drives.
    """

    total_time: float
    lam: float | None = None

    def __post_init__(self):
        if self.total_time <= 0:
            raise ValueError(f"total_time must be positive, got {self.total_time}")

    def s_of_t(self, t: float) -> float:
        return min(max(t / self.total_time, 0.0), 1.0)


@dataclass
class ObserverSpec:
    """What to record along the evolution and at how many sample instants."""

    n_samples: int = DEFAULT_SAMPLES
    success: PartitionSolution | None = None
    ground_probability: bool = False
    effective_dim: bool = False
    glass: bool = False


@dataclass
class DynamicsTrace:
    """Sampled observables of one evolution; unrecorded channels stay NaN."""

    times: np.ndarray
    s_values: np.ndarray
    p_s: np.ndarray
    p_g: np.ndarray
    d_eff: np.ndarray
    q: np.ndarray
    norm_error: np.ndarray
    final_state: np.ndarray
    warnings: list[str] = field(default_factory=list)


def default_steps(total_time: float) -> int:
    return max(1, round(total_time / DEFAULT_STEP_DT))


def initial_configuration(n: int) -> int:
    """Occupation bitstring with every even site (1-based) occupied."""
    return sum(1 << (i - 1) for i in range(2, n + 1, 2))


def initial_state(parts: HamiltonianParts) -> np.ndarray:
    """Unique ground state of H(0): the alternating occupation/spin product state."""
    config = initial_configuration(parts.n_sites)
    psi = np.zeros(parts.dim, dtype=np.complex128)
    psi[parts.basis.rank(config)] = 1.0
    return psi


def _expm_tridiag_e1(alphas: np.ndarray, betas: np.ndarray, tau: complex) -> np.ndarray:
    """exp(tau * T) @ e1 for the real symmetric tridiagonal T."""
    if alphas.size == 1:
        return np.array([np.exp(tau * alphas[0])])
    w, U = scipy.linalg.eigh_tridiagonal(alphas, betas, check_finite=False)
    return U @ (np.exp(tau * w) * U[0])


def krylov_expm_apply(
    apply_h,
    v: np.ndarray,
    tau: complex,
    tol: float = STEP_TOL,
    m_max: int = MAX_KRYLOV,
    m_hint: int = 2,
) -> tuple[np.ndarray | None, int]:
    """exp(tau * H) @ v by a Lanczos subspace with full reorthogonalization.

    Stops when the a-posteriori estimate beta * |last component| drops below
    tol; `m_hint` skips the estimate for subspaces known to be too small (the
    converged size of the previous, nearly identical step). Returns
    (result, m) or (None, m_max) when the cap is hit and the caller must
    subdivide. Norm is preserved to round-off for anti-Hermitian tau*H.
    """
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        return v.copy(), 0
    m_max = min(m_max, v.size)
    m_hint = min(max(m_hint, 1), m_max)
    V = np.empty((m_max, v.size), dtype=np.complex128)
    Vc = np.empty_like(V)
    alphas = np.empty(m_max)
    betas = np.empty(m_max)
    V[0] = v / nrm
    Vc[0] = V[0].conj()
    w = apply_h(V[0])
    alphas[0] = np.vdot(V[0], w).real
    w = w - alphas[0] * V[0]
    for m in range(1, m_max + 1):
        beta = np.linalg.norm(w)
        if m >= m_hint or beta <= 1e-14:
            y = _expm_tridiag_e1(alphas[:m], betas[: m - 1], tau)
            if beta <= 1e-14 or beta * abs(y[-1]) <= tol:
                return nrm * (V[:m].T @ y), m
        if m == m_max:
            return None, m_max
        betas[m - 1] = beta
        q = w / beta
        q -= V[:m].T @ (Vc[:m] @ q)
        renorm = np.linalg.norm(q)
        if renorm < 1e-7:
            # residual lives in the retained block: the subspace is invariant
            y = _expm_tridiag_e1(alphas[:m], betas[: m - 1], tau)
            return nrm * (V[:m].T @ y), m
        q /= renorm
        V[m] = q
        Vc[m] = q.conj()
        w = apply_h(q)
        alphas[m] = np.vdot(q, w).real
        w = w - alphas[m] * q - beta * V[m - 1]
    return None, m_max


def _step(apply_h, psi, tau, tol, m_hint=2, depth=0):
    out, m_used = krylov_expm_apply(apply_h, psi, tau, tol, m_hint=m_hint)
    if out is not None:
        return out, m_used
    if depth >= MAX_SUBDIVISION_DEPTH:
        raise ConvergenceError(
            f"propagation step failed to reach tol {tol} after "
            f"{MAX_SUBDIVISION_DEPTH} subdivisions"
        )
    half, m1 = _step(apply_h, psi, tau / 2.0, tol / 2.0, m_hint=2, depth=depth + 1)
    full, m2 = _step(apply_h, half, tau / 2.0, tol / 2.0, m_hint=m1, depth=depth + 1)
    return full, max(m1, m2)


# Fourth-order commutator-free scheme: two exponentials per step built from
# the Hamiltonian at the two Gauss-Legendre nodes of the step.
_GAUSS_OFFSET = np.sqrt(3.0) / 6.0
_CF4_A1 = 0.25 + _GAUSS_OFFSET
_CF4_A2 = 0.25 - _GAUSS_OFFSET


def propagate(
    parts: HamiltonianParts,
    psi: np.ndarray,
    s_midpoints: np.ndarray,
    dts: np.ndarray,
    total_time: float,
    lam: float | None = None,
    tol: float = STEP_TOL,
) -> np.ndarray:
    """March the state through steps centered at s_midpoints with widths dts.

    Each step applies the fourth-order commutator-free pair of Krylov
    exponentials. Negating dts (with the midpoint sequence reversed) applies
    the exact inverse, step by step. Each factor's diagonal is recentered
    before exponentiation; the discarded identity is a pure global phase.
    """
    lam = parts.lam if lam is None else lam
    drv = parts.h_driver.offdiag_csr_complex
    d0 = parts.h_initial.diagonal
    dp = parts.h_problem.diagonal
    psi = psi.astype(np.complex128, copy=True)
    m_hint = 2
    for s_mid, dt in zip(s_midpoints, dts):
        dt = float(dt)
        ds = dt / total_time
        s1 = float(s_mid) - _GAUSS_OFFSET * ds
        s2 = float(s_mid) + _GAUSS_OFFSET * ds
        w1 = schedule_weights(s1, lam)
        w2 = schedule_weights(s2, lam)
        for a, b in ((_CF4_A1, _CF4_A2), (_CF4_A2, _CF4_A1)):
            wd = a * w1[1] + b * w2[1]
            diag = (a * w1[0] + b * w2[0]) * d0 + (a * w1[2] + b * w2[2]) * dp
            diag -= 0.5 * (diag.max() + diag.min())
            if wd != 0.0:
                def apply_h(x, _d=diag, _w=wd):
                    return _w * (drv @ x) + _d * x
            else:
                def apply_h(x, _d=diag):
                    return _d * x
            psi, m_used = _step(apply_h, psi, -1j * dt, tol, m_hint=m_hint)
            m_hint = max(m_used - 1, 2)
    return psi


def _clip01(p: float) -> float:
    return min(max(p, 0.0), 1.0)


def success_probability(
    state: np.ndarray, solution: PartitionSolution, basis
) -> float:
    """Total weight of the state on the solution configurations."""
    idx = [basis.rank(b) for b in solution.solutions]
    return _clip01(float(np.sum(np.abs(state[idx]) ** 2)))


def ground_state_probability(state: np.ndarray, parts: HamiltonianParts, s: float) -> float:
    """Weight on the instantaneous ground state; on the full ground subspace at s=1."""
    if s == 1.0:
        diag = parts.h_problem.diagonal
        idx = np.nonzero(diag <= diag.min() + GROUND_SUBSPACE_ATOL)[0]
        return _clip01(float(np.sum(np.abs(state[idx]) ** 2)))
    ground = _interior_ground_state(parts, s)
    return _clip01(float(np.abs(np.vdot(ground, state)) ** 2))


def _interior_ground_state(parts: HamiltonianParts, s: float) -> np.ndarray:
    op = parts.operator_at(s)
    k = min(2, op.dim)
    w, V = lowest_eigs(op, k)
    if k == 2 and w[1] - w[0] <= 1e-10:
        raise DegenerateGroundStateError(
            f"instantaneous ground state degenerate at s={s}"
        )
    return V[:, 0]


def effective_dimension(state: np.ndarray) -> float:
    """Inverse participation ratio over the computational basis."""
    probs = np.abs(np.asarray(state)) ** 2
    return float(1.0 / np.sum(probs**2))


def evolve(
    parts: HamiltonianParts,
    schedule: AnnealSchedule,
    steps: int | None = None,
    observers: ObserverSpec | None = None,
    step_tol: float = STEP_TOL,
) -> DynamicsTrace:
    """Integrate the annealing dynamics from s=0 to s=1.

    Each step applies the exponential of the step-midpoint Hamiltonian via a
    Krylov subspace to `step_tol`; observables are recorded at the step
    boundaries nearest to the requested sample instants. Aborts when the norm
    drifts by more than NORM_DRIFT_LIMIT.
    """
    if schedule.lam is not None and schedule.lam != parts.lam:
        raise ValueError(
            f"schedule lam {schedule.lam} disagrees with parts lam {parts.lam}"
        )
    obs = observers if observers is not None else ObserverSpec()
    total_time = schedule.total_time
    if steps is None:
        steps = default_steps(total_time)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    dt = total_time / steps

    n_samples = min(obs.n_samples, steps + 1)
    sample_bounds = np.unique(
        np.round(np.linspace(0, steps, n_samples)).astype(np.int64)
    )
    sample_pos = {int(b): i for i, b in enumerate(sample_bounds)}
    n_rec = sample_bounds.size

    times = sample_bounds * dt
    s_values = sample_bounds / steps
    p_s = np.full(n_rec, np.nan)
    p_g = np.full(n_rec, np.nan)
    d_eff = np.full(n_rec, np.nan)
    q = np.full(n_rec, np.nan)
    norm_error = np.full(n_rec, np.nan)
    warnings_list: list[str] = []

    solution_idx = None
    if obs.success is not None:
        solution_idx = np.array(
            [parts.basis.rank(b) for b in obs.success.solutions], dtype=np.int64
        )

    psi = initial_state(parts)

    def record(boundary: int) -> None:
        i = sample_pos[boundary]
        nrm = float(np.linalg.norm(psi))
        norm_error[i] = abs(nrm - 1.0)
        if norm_error[i] > NORM_DRIFT_LIMIT:
            raise ConvergenceError(
                f"norm drift {norm_error[i]:.3e} at t={times[i]:.6g} exceeds "
                f"{NORM_DRIFT_LIMIT}"
            )
        if solution_idx is not None:
            p_s[i] = float(np.sum(np.abs(psi[solution_idx]) ** 2))
        if obs.ground_probability:
            s = float(s_values[i])
            try:
                p_g[i] = ground_state_probability(psi, parts, s)
            except DegenerateGroundStateError as exc:
                warnings_list.append(str(exc))
        if obs.effective_dim:
            d_eff[i] = effective_dimension(psi)
        if obs.glass:
            q[i] = glass_order(psi, parts.basis)

    record(0)
    midpoints = (np.arange(steps) + 0.5) / steps
    dts = np.full(steps, dt)
    for a, b in zip(sample_bounds[:-1], sample_bounds[1:]):
        psi = propagate(parts, psi, midpoints[a:b], dts[a:b], total_time, tol=step_tol)
        record(int(b))

    return DynamicsTrace(
        times=times,
        s_values=s_values,
        p_s=p_s,
        p_g=p_g,
        d_eff=d_eff,
        q=q,
        norm_error=norm_error,
        final_state=psi,
        warnings=warnings_list,
    )


def export_dynamics_csv(trace: DynamicsTrace, path) -> None:
    """Write columns t, s, P_s, P_g, D_eff, q, norm_error (NaN when unrecorded)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "s", "P_s", "P_g", "D_eff", "q", "norm_error"])
        for i in range(trace.times.size):
            writer.writerow(
                [
                    f"{trace.times[i]:.10g}",
                    f"{trace.s_values[i]:.10g}",
                    f"{trace.p_s[i]:.17g}",
                    f"{trace.p_g[i]:.17g}",
                    f"{trace.d_eff[i]:.17g}",
                    f"{trace.q[i]:.17g}",
                    f"{trace.norm_error[i]:.3e}",
                ]
            )


def final_summary(
    instance_id: str,
    parts: HamiltonianParts,
    schedule: AnnealSchedule,
    steps: int,
    trace: DynamicsTrace,
    solution: PartitionSolution,
) -> dict:
    """Run summary in the final-state JSON schema."""
    p_s_final = success_probability(trace.final_state, solution, parts.basis)
    return {
        "instance_id": instance_id,
        "annealer": parts.kind,
        "T": schedule.total_time,
        "steps": steps,
        "P_s_final": p_s_final,
        "D": solution.degeneracy,
        "min_cut": solution.min_cut,
    }
