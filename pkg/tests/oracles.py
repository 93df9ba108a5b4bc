"""Independent dense constructions used as oracles against the sparse builders.

These deliberately avoid the package's bit-mask shortcuts: fermionic hopping
is built by explicit ladder-operator application with left-parity counting,
and the spin-exchange form is built from Kronecker products.
"""

from __future__ import annotations

import numpy as np

# single-site operators in occupation order (index 0 = empty, 1 = occupied)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # |0> -> |1>
SIGMA_MINUS = SIGMA_PLUS.T
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
SIGMA_Z = np.diag([-1.0, 1.0])  # occupied site carries +1
IDENTITY2 = np.eye(2)


def pauli_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-site operator; site 1 is the least significant bit."""
    ops = [IDENTITY2] * n
    ops[n - site] = op  # kron puts the first factor on the most significant bit
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def dense_fermion_hopping(bonds, basis) -> np.ndarray:
    """-(a_i^dag a_j + a_j^dag a_i) summed over bonds, by ladder-operator rules.

    Signs come from counting occupied sites to the LEFT of the acted site
    before each operator application (textbook second quantization), not from
    string-between-parities.
    """

    def left_parity(occ: list[int], site: int) -> int:
        return sum(occ[: site - 1]) % 2

    n = basis.n
    dim = basis.dim
    H = np.zeros((dim, dim))
    for r, state in enumerate(basis.states):
        occ = [(int(state) >> t) & 1 for t in range(n)]
        for i, j in bonds:
            for src, dst in ((j, i), (i, j)):
                if occ[src - 1] == 1 and occ[dst - 1] == 0:
                    sign = -1 if left_parity(occ, src) else 1
                    mid = occ.copy()
                    mid[src - 1] = 0
                    if left_parity(mid, dst):
                        sign = -sign
                    mid[dst - 1] = 1
                    new_state = sum(1 << t for t, b in enumerate(mid) if b)
                    H[basis.rank(new_state), r] += -1.0 * sign
    return H


def dense_exchange_half(bonds, n: int) -> np.ndarray:
    """Sum over bonds of -(sx sx + sy sy)/2 = -(s+ s- + s- s+), via kron."""
    dim = 1 << n
    H = np.zeros((dim, dim))
    for i, j in bonds:
        H -= pauli_site(SIGMA_PLUS, i, n) @ pauli_site(SIGMA_MINUS, j, n)
        H -= pauli_site(SIGMA_MINUS, i, n) @ pauli_site(SIGMA_PLUS, j, n)
    return H


def project_to_sector(H_full: np.ndarray, basis) -> np.ndarray:
    """Restrict a full-space dense matrix to the sector basis, in basis order."""
    idx = basis.states.astype(np.int64)
    return H_full[np.ix_(idx, idx)]


def dense_transverse_field(n: int) -> np.ndarray:
    """-sum_i sigma_x^i via kron."""
    dim = 1 << n
    H = np.zeros((dim, dim))
    for i in range(1, n + 1):
        H -= pauli_site(SIGMA_X, i, n)
    return H


def dense_longitudinal_field(n: int) -> np.ndarray:
    """sum_i h_i sigma_z^i with h_i = -1 (even i), +1 (odd i), via kron."""
    dim = 1 << n
    H = np.zeros((dim, dim))
    for i in range(1, n + 1):
        H += (-1.0 if i % 2 == 0 else 1.0) * pauli_site(SIGMA_Z, i, n)
    return H


def brute_force_balanced_mincut(edges, n: int):
    """Balanced min-cut by raw itertools enumeration (no package machinery)."""
    from itertools import combinations

    best = None
    best_sets = []
    for chosen in combinations(range(1, n + 1), n // 2):
        in_v1 = set(chosen)
        cut = sum(1 for u, v in edges if (u in in_v1) != (v in in_v1))
        if best is None or cut < best:
            best = cut
            best_sets = [in_v1]
        elif cut == best:
            best_sets.append(in_v1)
    configs = sorted(sum(1 << (v - 1) for v in s) for s in best_sets)
    return best, configs
