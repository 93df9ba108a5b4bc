"""Exact-diagonalization toolkit for three quantum annealers on graph partitioning.

Builds the spinless-fermion, hard-core-boson and transverse-field Ising
annealers for random 3-regular partitioning instances and measures success
probabilities, low-energy spectra, fidelity susceptibility, glass order and
annealing dynamics.
"""

from .basis import FullBasis, SectorBasis, build_sector_basis, format_state, parse_state
from .dynamics import (
    AnnealSchedule,
    DynamicsTrace,
    ObserverSpec,
    effective_dimension,
    evolve,
    export_dynamics_csv,
    final_summary,
    ground_state_probability,
    initial_state,
    success_probability,
)
from .errors import (
    ConvergenceError,
    DegenerateGroundStateError,
    EigensolverError,
    GraphGenerationError,
    QannealError,
)
from .experiment import (
    ComparisonReport,
    ResultRecord,
    SweepConfig,
    aggregate_by_degeneracy,
    compare_annealers,
    load_records,
    parse_sweep_config,
    run_sweep,
    save_records,
)
from .graphs import (
    Graph,
    PartitionSolution,
    ProblemInstance,
    cut_size,
    gen_regular_graph,
    load_instance,
    save_instance,
    solve_partition_bruteforce,
)
from .hamiltonian import (
    HamiltonianParts,
    LatticeGeometry,
    SparseOperator,
    assemble,
    build_atomic_parts,
    build_ising_drivers,
    build_ising_parts,
    build_onsite,
    build_parts,
    build_problem_atomic,
    build_ising_problem,
    build_tunneling,
    jw_sign,
)
from .spectral import (
    GapReport,
    SpectralTrace,
    export_trace_csv,
    fidelity_susceptibility,
    glass_order,
    glass_order_lowk,
    lowest_eigs,
    relevant_gap,
    spectral_trace,
    susceptibility_curve,
)

__version__ = "0.1.0"
