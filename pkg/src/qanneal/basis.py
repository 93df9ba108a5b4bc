"""Occupation-number bases: fixed-particle-number sectors and the full spin space.

A state is an integer whose bit ``i-1`` stores the occupation of site ``i``;
sites are numbered 1..N row-major over the lattice. The pretty-printed form
``|b_1 b_2 ... b_N>`` puts the site-1 bit leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


def occupation_matrix(states: np.ndarray, n: int) -> np.ndarray:
    """Bit matrix of shape (len(states), n); column i-1 holds the site-i bit."""
    s = states.astype(np.uint64)[:, None]
    shifts = np.arange(n, dtype=np.uint64)
    return ((s >> shifts) & np.uint64(1)).astype(np.uint8)


def format_state(state: int, n: int) -> str:
    """Render a state integer as ``|b_1 b_2 ... b_N>``, site 1 leftmost."""
    bits = "".join(str((int(state) >> i) & 1) for i in range(n))
    return f"|{bits}⟩"


def parse_state(label: str) -> int:
    """Inverse of :func:`format_state`; also accepts a bare bitstring."""
    bits = label.strip().lstrip("|").rstrip("⟩>")
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"not a state label: {label!r}")
    return sum(1 << i for i, c in enumerate(bits) if c == "1")


@dataclass(frozen=True)
class SectorBasis:
    """All n-site states with exactly k particles, ascending as integers.

    The enumeration order is the shared index contract for every diagonal
    operator built on this basis: entry r of a diagonal belongs to
    ``states[r]``.
    """

    n: int
    k: int
    states: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.states.size)

    def rank(self, state: int) -> int:
        """Index of ``state`` in the ascending enumeration (combinadic formula)."""
        state = int(state)
        if state >> self.n:
            raise ValueError(f"state {state:#x} exceeds {self.n} sites")
        if state.bit_count() != self.k:
            raise ValueError(
                f"state has {state.bit_count()} particles, sector holds {self.k}"
            )
        r = 0
        j = 0
        s = state
        while s:
            p = (s & -s).bit_length() - 1
            j += 1
            r += comb(p, j)
            s &= s - 1
        return r

    def unrank(self, index: int) -> int:
        """State integer at position ``index``; inverse of :meth:`rank`."""
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} out of range [0, {self.dim})")
        state = 0
        r = int(index)
        for j in range(self.k, 0, -1):
            # largest p with C(p, j) <= r
            p = j - 1
            while comb(p + 1, j) <= r:
                p += 1
            state |= 1 << p
            r -= comb(p, j)
        return state

    def occupations(self) -> np.ndarray:
        return occupation_matrix(self.states, self.n)

    def format(self, state: int) -> str:
        return format_state(state, self.n)


@dataclass(frozen=True)
class FullBasis:
    """Computational basis of n spins; the index of a state is the state itself."""

    n: int

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def states(self) -> np.ndarray:
        return np.arange(self.dim, dtype=np.uint64)

    def rank(self, state: int) -> int:
        state = int(state)
        if not 0 <= state < self.dim:
            raise ValueError(f"state {state} out of range for {self.n} spins")
        return state

    def unrank(self, index: int) -> int:
        return self.rank(index)

    def occupations(self) -> np.ndarray:
        return occupation_matrix(self.states, self.n)

    def format(self, state: int) -> str:
        return format_state(state, self.n)


def build_sector_basis(n: int, k: int) -> SectorBasis:
    """Enumerate the k-particle sector of n sites in ascending integer order.

    Raises ValueError when k is out of range or n exceeds the 63-bit budget.
    """
    if n < 0 or n > 63:
        raise ValueError(f"site count {n} outside supported range 0..63")
    if not 0 <= k <= n:
        raise ValueError(f"particle count {k} out of range 0..{n}")
    dim = comb(n, k)
    states = np.empty(dim, dtype=np.uint64)
    x = (1 << k) - 1
    for i in range(dim):
        states[i] = x
        if i + 1 < dim:
            # Gosper's hack: next integer with the same popcount
            u = x & -x
            v = x + u
            x = v | (((x ^ v) >> 2) // u)
    return SectorBasis(n=n, k=k, states=states)
